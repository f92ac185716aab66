use std::path::Path;

use motionkit_core::diffusion::{GaussianOracle, NoiseSchedule};
use motionkit_core::FRAME_DIM;

use crate::{CliError, Result};

fn parse_fields(line: &str) -> std::result::Result<Vec<f64>, std::num::ParseFloatError> {
    line.split([',', ' ', '\t'])
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

/// Numeric rows of a comma- or whitespace-separated file. A first line that
/// does not parse is treated as a header.
pub fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_fields(line) {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(CliError::Input(format!("{}:{}: {e}", path.display(), i + 1))),
        }
    }
    Ok(rows)
}

/// All numbers in a file, flattened.
pub fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    Ok(read_rows(path)?.into_iter().flatten().collect())
}

pub fn read_fixed<const N: usize>(path: &Path, what: &str) -> Result<[f64; N]> {
    let v = read_numbers(path)?;
    v.as_slice()
        .try_into()
        .map_err(|_| CliError::Input(format!("{what}: expected {N} values in {}, found {}", path.display(), v.len())))
}

/// `a,b,c` on the command line.
pub fn parse_vec3(s: &str) -> Result<[f64; 3]> {
    let v = parse_fields(s).map_err(|e| CliError::Input(format!("bad vector {s:?}: {e}")))?;
    v.as_slice()
        .try_into()
        .map_err(|_| CliError::Input(format!("expected 3 comma-separated values, got {s:?}")))
}

/// Builds the oracle from `mean.csv,var.csv`.
pub fn load_oracle(spec: &str) -> Result<GaussianOracle> {
    let (mean, var) = spec
        .split_once(',')
        .ok_or_else(|| CliError::Input(format!("--oracle expects mean.csv,var.csv, got {spec:?}")))?;
    let mean: [f64; FRAME_DIM] = read_fixed(Path::new(mean), "oracle mean")?;
    let var: [f64; FRAME_DIM] = read_fixed(Path::new(var), "oracle variance")?;
    Ok(GaussianOracle::new(mean.to_vec(), var.to_vec(), NoiseSchedule::default())?)
}

/// Keypoint frames: each row holds `x, y, z` for every keypoint.
pub fn read_keypoints(path: &Path) -> Result<Vec<Vec<[f64; 3]>>> {
    read_rows(path)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            if row.is_empty() || row.len() % 3 != 0 {
                return Err(CliError::Input(format!(
                    "{} row {}: {} values is not a multiple of 3",
                    path.display(),
                    i + 1,
                    row.len()
                )));
            }
            Ok(row.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())
        })
        .collect()
}
