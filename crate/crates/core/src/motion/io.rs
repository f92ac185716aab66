//! `.emc` binary clips and the CSV frame table.
//!
//! `.emc` layout, little-endian:
//!
//! ```text
//! "EMC1" | frame_dim u16 (=38) | num_frames u32 | fps u8 | reserved [0; 3]
//! | has_stats u8 | [38 x f32 mean, 38 x f32 std] | num_frames x 38 x f32
//! ```
//!
//! CSV has a header `j00..j28,vx,vy,h,r0..r5` and one frame per row. Values
//! are written with the shortest representation that round-trips through f32.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{MotionClip, MotionError, NormStats, Result, FRAME_DIM, NUM_JOINTS};

pub const EMC_MAGIC: [u8; 4] = *b"EMC1";
const HEADER_LEN: usize = 4 + 2 + 4 + 1 + 3 + 1;

fn fmt_err(msg: impl Into<String>) -> MotionError {
    MotionError::Format(msg.into())
}

pub fn encode_emc(clip: &MotionClip, stats: Option<&NormStats>) -> Result<Vec<u8>> {
    clip.validate()?;
    let num_frames = u32::try_from(clip.len()).map_err(|_| fmt_err("too many frames"))?;
    let stats_len = if stats.is_some() { 2 * FRAME_DIM * 4 } else { 0 };
    let mut buf = Vec::with_capacity(HEADER_LEN + stats_len + clip.len() * FRAME_DIM * 4);
    buf.extend_from_slice(&EMC_MAGIC);
    buf.extend_from_slice(&(FRAME_DIM as u16).to_le_bytes());
    buf.extend_from_slice(&num_frames.to_le_bytes());
    buf.push(clip.fps);
    buf.extend_from_slice(&[0; 3]);
    match stats {
        Some(s) => {
            buf.push(1);
            for v in s.mean.iter().chain(&s.std) {
                buf.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
        None => buf.push(0),
    }
    for frame in &clip.frames {
        for v in frame.to_array() {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    Ok(buf)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| fmt_err("truncated .emc data"))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n * 4)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect())
    }
}

/// Parses an `.emc` byte buffer. Trailing bytes are rejected.
pub fn decode_emc(data: &[u8]) -> Result<(MotionClip, Option<NormStats>)> {
    let mut cur = Cursor { data, pos: 0 };
    if cur.take(4)? != EMC_MAGIC {
        return Err(fmt_err("bad .emc magic"));
    }
    let dim = cur.take(2)?;
    let dim = u16::from_le_bytes([dim[0], dim[1]]);
    if usize::from(dim) != FRAME_DIM {
        return Err(fmt_err(format!("unsupported frame_dim {dim}")));
    }
    let n = cur.take(4)?;
    let num_frames = u32::from_le_bytes([n[0], n[1], n[2], n[3]]) as usize;
    let fps = cur.take(1)?[0];
    if cur.take(3)? != [0, 0, 0] {
        return Err(fmt_err("reserved bytes must be zero"));
    }
    let stats = match cur.take(1)?[0] {
        0 => None,
        1 => {
            let v = cur.f32s(2 * FRAME_DIM)?;
            let mut mean = [0.0; FRAME_DIM];
            let mut std = [0.0; FRAME_DIM];
            mean.copy_from_slice(&v[..FRAME_DIM]);
            std.copy_from_slice(&v[FRAME_DIM..]);
            Some(NormStats::new(mean, std)?)
        }
        flag => return Err(fmt_err(format!("bad stats flag {flag}"))),
    };
    let expected = num_frames
        .checked_mul(FRAME_DIM * 4)
        .ok_or_else(|| fmt_err("frame count overflow"))?;
    if data.len() - cur.pos != expected {
        return Err(fmt_err(format!(
            "frame data is {} bytes, header implies {expected}",
            data.len() - cur.pos
        )));
    }
    let flat = cur.f32s(num_frames * FRAME_DIM)?;
    let clip = MotionClip::from_flat(&flat, fps)?;
    Ok((clip, stats))
}

pub fn read_emc(path: impl AsRef<Path>) -> Result<(MotionClip, Option<NormStats>)> {
    let mut data = Vec::new();
    File::open(path)?.read_to_end(&mut data)?;
    decode_emc(&data)
}

pub fn write_emc(
    path: impl AsRef<Path>,
    clip: &MotionClip,
    stats: Option<&NormStats>,
) -> Result<()> {
    let bytes = encode_emc(clip, stats)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn csv_header() -> String {
    let mut cols: Vec<String> = (0..NUM_JOINTS).map(|i| format!("j{i:02}")).collect();
    cols.extend(["vx", "vy", "h"].map(String::from));
    cols.extend((0..6).map(|i| format!("r{i}")));
    cols.join(",")
}

pub fn write_csv<W: Write>(mut w: W, clip: &MotionClip) -> Result<()> {
    writeln!(w, "{}", csv_header())?;
    for frame in &clip.frames {
        let row: Vec<String> = frame
            .to_array()
            .iter()
            .map(|v| format!("{}", *v as f32))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_csv<R: Read>(r: R, fps: u8) -> Result<MotionClip> {
    let mut lines = BufReader::new(r).lines();
    let header = lines.next().ok_or(MotionError::Empty)??;
    if header.trim() != csv_header() {
        return Err(fmt_err("unexpected CSV header"));
    }
    let mut flat = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let before = flat.len();
        for field in line.split(',') {
            let v: f32 = field
                .trim()
                .parse()
                .map_err(|_| fmt_err(format!("row {}: bad number {field:?}", i + 1)))?;
            flat.push(f64::from(v));
        }
        if flat.len() - before != FRAME_DIM {
            return Err(fmt_err(format!(
                "row {}: expected {FRAME_DIM} columns, got {}",
                i + 1,
                flat.len() - before
            )));
        }
    }
    MotionClip::from_flat(&flat, fps)
}

pub fn read_csv_file(path: impl AsRef<Path>, fps: u8) -> Result<MotionClip> {
    read_csv(File::open(path)?, fps)
}

pub fn write_csv_file(path: impl AsRef<Path>, clip: &MotionClip) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(&mut w, clip)?;
    w.flush()?;
    Ok(())
}

/// Reads `.emc` or `.csv` by extension; CSV clips get `csv_fps`.
pub fn read_clip(path: impl AsRef<Path>, csv_fps: u8) -> Result<MotionClip> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_csv_file(path, csv_fps),
        _ => read_emc(path).map(|(clip, _)| clip),
    }
}
