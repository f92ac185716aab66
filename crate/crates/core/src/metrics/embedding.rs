//! Precomputed embedding sets and the `.emb` file format.
//!
//! `.emb` layout, little-endian: `"EMB1" | N u32 | D u32 | role u8 | N x D f32`.
//! Role 0 is motion, 1 is text. CSV input is one row per embedding, with an
//! optional non-numeric header row.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use super::{MetricsError, Result};

pub const EMB_MAGIC: [u8; 4] = *b"EMB1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingRole {
    Motion,
    Text,
}

impl EmbeddingRole {
    fn code(self) -> u8 {
        match self {
            Self::Motion => 0,
            Self::Text => 1,
        }
    }
}

/// `N x D` row-major embedding matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    data: Vec<f64>,
    rows: usize,
    dim: usize,
    pub role: EmbeddingRole,
    /// Optional pairing ids, one per row.
    pub ids: Option<Vec<u64>>,
}

impl EmbeddingSet {
    pub fn new(data: Vec<f64>, rows: usize, dim: usize, role: EmbeddingRole) -> Result<Self> {
        if rows.checked_mul(dim) != Some(data.len()) || dim == 0 {
            return Err(MetricsError::Shape(format!(
                "{} values cannot form {rows} x {dim}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(MetricsError::NonFinite("embeddings"));
        }
        Ok(Self {
            data,
            rows,
            dim,
            role,
            ids: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], role: EmbeddingRole) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(MetricsError::Shape("ragged embedding rows".into()));
        }
        Self::new(rows.concat(), rows.len(), dim, role)
    }

    pub fn with_ids(mut self, ids: Vec<u64>) -> Result<Self> {
        if ids.len() != self.rows {
            return Err(MetricsError::Shape(format!(
                "{} ids for {} rows",
                ids.len(),
                self.rows
            )));
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(13 + self.data.len() * 4);
        buf.extend_from_slice(&EMB_MAGIC);
        buf.extend_from_slice(&(self.rows as u32).to_le_bytes());
        buf.extend_from_slice(&(self.dim as u32).to_le_bytes());
        buf.push(self.role.code());
        for v in &self.data {
            buf.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| MetricsError::Format(m.to_string());
        if bytes.len() < 13 {
            return Err(bad("truncated header"));
        }
        if bytes[..4] != EMB_MAGIC {
            return Err(bad("bad magic"));
        }
        let rows = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let role = match bytes[12] {
            0 => EmbeddingRole::Motion,
            1 => EmbeddingRole::Text,
            _ => return Err(bad("unknown role")),
        };
        let body = &bytes[13..];
        if rows.checked_mul(dim).and_then(|n| n.checked_mul(4)) != Some(body.len()) {
            return Err(bad("payload size does not match N x D"));
        }
        let data = body
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect();
        Self::new(data, rows, dim, role)
    }

    pub fn read_csv<R: Read>(r: R, role: EmbeddingRole) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => continue,
                Err(_) => return Err(MetricsError::Format(format!("bad number on line {}", i + 1))),
            }
        }
        if rows.is_empty() {
            return Err(MetricsError::TooFew {
                required: 1,
                actual: 0,
            });
        }
        Self::from_rows(&rows, role)
    }

    /// Loads `.emb` or `.csv` (by extension). CSV files get `csv_role`.
    pub fn load(path: impl AsRef<Path>, csv_role: EmbeddingRole) -> Result<Self> {
        let path = path.as_ref();
        if path.extension().and_then(|e| e.to_str()) == Some("csv") {
            Self::read_csv(std::fs::File::open(path)?, csv_role)
        } else {
            Self::from_bytes(&std::fs::read(path)?)
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Checks two sets are row-paired: same shape and, when both carry ids, the same ids.
pub(crate) fn check_paired(a: &EmbeddingSet, b: &EmbeddingSet) -> Result<()> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(MetricsError::Shape(format!(
            "{}x{} vs {}x{}",
            a.len(),
            a.dim(),
            b.len(),
            b.dim()
        )));
    }
    if let (Some(x), Some(y)) = (&a.ids, &b.ids) {
        if x != y {
            return Err(MetricsError::Shape("pairing ids differ".into()));
        }
    }
    Ok(())
}
