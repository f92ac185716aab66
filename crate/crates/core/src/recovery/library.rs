use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{check_unit, RecoveryError, Result, NOMINAL_GRAVITY};
use crate::motion::io::read_emc;
use crate::motion::{MotionClip, NUM_JOINTS};

/// Name of the index file inside a library directory.
pub const INDEX_FILE: &str = "recovery.index";

const ENTRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryEntry {
    pub clip: MotionClip,
    /// Source file, when loaded from disk.
    pub clip_path: Option<PathBuf>,
    /// Unit gravity direction in the pelvis frame at clip start.
    pub initial_gravity: [f64; 3],
    pub initial_joints: [f64; NUM_JOINTS],
}

impl RecoveryEntry {
    pub fn new(clip: MotionClip, gravity: [f64; 3], joints: [f64; NUM_JOINTS]) -> Result<Self> {
        check_unit(&gravity, ENTRY_TOL)?;
        Ok(Self {
            clip,
            clip_path: None,
            initial_gravity: gravity,
            initial_joints: joints,
        })
    }

    /// Derives gravity and joints from the first frame of `clip`.
    pub fn from_clip(clip: MotionClip) -> Result<Self> {
        let first = clip.frames.first().ok_or(RecoveryError::Config("empty clip".into()))?;
        let r = first.root_rotation()?;
        let g = r.transpose() * nalgebra::Vector3::from(NOMINAL_GRAVITY);
        let n = g.norm();
        let gravity = [g.x / n, g.y / n, g.z / n];
        let joints = first.joint_pos;
        Self::new(clip, gravity, joints)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryLibrary {
    pub entries: Vec<RecoveryEntry>,
    pub gravity_threshold_deg: f64,
    pub fall_threshold_deg: f64,
    /// Consecutive frames needed to raise or clear the fall flag.
    pub fall_persist_frames: usize,
}

impl Default for RecoveryLibrary {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
            gravity_threshold_deg: 30.0,
            fall_threshold_deg: 60.0,
            fall_persist_frames: 10,
        }
    }
}

impl RecoveryLibrary {
    pub fn new(entries: Vec<RecoveryEntry>) -> Result<Self> {
        let lib = Self {
            entries,
            ..Self::default()
        };
        lib.validate()?;
        Ok(lib)
    }

    pub fn validate(&self) -> Result<()> {
        for t in [self.gravity_threshold_deg, self.fall_threshold_deg] {
            if !(t > 0.0 && t < 180.0) {
                return Err(RecoveryError::Config(format!("threshold {t} not in (0, 180)")));
            }
        }
        if self.fall_persist_frames == 0 {
            return Err(RecoveryError::Config("fall persistence must be >= 1 frame".into()));
        }
        Ok(())
    }
}

fn fmt_entry(path: &Path, e: &RecoveryEntry) -> String {
    let mut line = format!("entry: {}", path.display());
    for v in e.initial_gravity.iter().chain(&e.initial_joints) {
        write!(line, ", {v:?}").expect("writing to a String");
    }
    line
}

/// Writes `recovery.index` into `dir`. Paths are written relative to `dir`
/// when possible.
pub fn write_index(dir: &Path, lib: &RecoveryLibrary) -> Result<PathBuf> {
    let mut out = String::from("# entry: clip_path, gx, gy, gz, 29 joint angles\n");
    for e in &lib.entries {
        let path = e
            .clip_path
            .as_deref()
            .ok_or_else(|| RecoveryError::Config("entry has no clip path".into()))?;
        let rel = path.strip_prefix(dir).unwrap_or(path);
        out.push_str(&fmt_entry(rel, e));
        out.push('\n');
    }
    let index = dir.join(INDEX_FILE);
    std::fs::write(&index, out)?;
    Ok(index)
}

/// Scans `dir` for `.emc` clips (sorted by name), derives each entry from
/// the first frame and writes the index file.
pub fn build_index(dir: &Path) -> Result<RecoveryLibrary> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "emc"))
        .collect();
    paths.sort();
    let mut entries = Vec::with_capacity(paths.len());
    for path in paths {
        let (clip, _) = read_emc(&path)?;
        let mut entry = RecoveryEntry::from_clip(clip)?;
        entry.clip_path = Some(path);
        entries.push(entry);
    }
    let lib = RecoveryLibrary::new(entries)?;
    write_index(dir, &lib)?;
    Ok(lib)
}

/// Loads a library from an index file; clip paths resolve relative to the
/// index's directory.
pub fn load_index(index: &Path) -> Result<RecoveryLibrary> {
    let text = std::fs::read_to_string(index)?;
    let base = index.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| RecoveryError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let body = line.strip_prefix("entry:").ok_or_else(|| bad("expected `entry:`"))?;
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        if fields.len() != 4 + NUM_JOINTS {
            return Err(bad("expected clip path, 3 gravity and 29 joint values"));
        }
        let nums = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| bad("bad number"))?;
        let path = base.join(fields[0]);
        let (clip, _) = read_emc(&path)?;
        let mut joints = [0.0; NUM_JOINTS];
        joints.copy_from_slice(&nums[3..]);
        let mut entry = RecoveryEntry::new(clip, [nums[0], nums[1], nums[2]], joints)?;
        entry.clip_path = Some(path);
        entries.push(entry);
    }
    RecoveryLibrary::new(entries)
}
