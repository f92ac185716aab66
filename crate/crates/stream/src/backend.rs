use std::path::Path;
use std::sync::Arc;

use motionkit_core::diffusion::{sample, GaussianOracle, NoiseSchedule, SamplerConfig};
use motionkit_core::motion::io::read_emc;
use motionkit_core::{MotionClip, NormStats};

use crate::wire::TextCommand;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendError {
    UnknownPrompt(String),
    Failure(String),
}

impl std::fmt::Display for BackendError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::UnknownPrompt(p) => write!(f, "unknown prompt {p:?}"),
            Self::Failure(m) => write!(f, "backend failure: {m}"),
        }
    }
}

impl std::error::Error for BackendError {}

/// Resolves a text command to a motion clip.
pub trait Backend: Send + Sync {
    fn generate(&self, cmd: &TextCommand) -> Result<MotionClip, BackendError>;
}

/// Lowercase with runs of whitespace collapsed to one space.
pub fn normalize_prompt(p: &str) -> String {
    p.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Prompt-to-clip lookup: exact match first, then normalized match.
/// Clips are served whole; `requested_frames` is ignored.
#[derive(Debug, Clone, Default)]
pub struct LibraryBackend {
    clips: Vec<(String, Arc<MotionClip>)>,
}

impl LibraryBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prompt: impl Into<String>, clip: MotionClip) {
        self.clips.push((prompt.into(), Arc::new(clip)));
    }

    /// Loads every `.emc` in `dir`; the prompt is the file stem with
    /// underscores read as spaces (`jump_forward.emc` -> "jump forward").
    pub fn from_dir(dir: &Path) -> std::io::Result<Self> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "emc"))
            .collect();
        paths.sort();
        let mut lib = Self::new();
        for path in paths {
            let (clip, _) = read_emc(&path)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            lib.insert(stem.replace('_', " "), clip);
        }
        Ok(lib)
    }

    pub fn len(&self) -> usize {
        self.clips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clips.is_empty()
    }

    pub fn prompts(&self) -> impl Iterator<Item = &str> {
        self.clips.iter().map(|(p, _)| p.as_str())
    }

    pub fn lookup(&self, prompt: &str) -> Option<&MotionClip> {
        if let Some((_, c)) = self.clips.iter().find(|(p, _)| p == prompt) {
            return Some(c);
        }
        let want = normalize_prompt(prompt);
        self.clips
            .iter()
            .find(|(p, _)| normalize_prompt(p) == want)
            .map(|(_, c)| c.as_ref())
    }
}

impl Backend for LibraryBackend {
    fn generate(&self, cmd: &TextCommand) -> Result<MotionClip, BackendError> {
        self.lookup(&cmd.prompt)
            .cloned()
            .ok_or_else(|| BackendError::UnknownPrompt(cmd.prompt.clone()))
    }
}

/// Samples from the Gaussian oracle with the command's guidance scale and
/// step count; every prompt is accepted.
pub struct OracleBackend {
    pub oracle: GaussianOracle,
    pub norm: NormStats,
    pub default_frames: usize,
    pub seed: u64,
}

impl OracleBackend {
    pub fn new(oracle: GaussianOracle, norm: NormStats) -> Self {
        Self {
            oracle,
            norm,
            default_frames: 100,
            seed: 0,
        }
    }
}

impl Backend for OracleBackend {
    fn generate(&self, cmd: &TextCommand) -> Result<MotionClip, BackendError> {
        let frames = match cmd.requested_frames {
            0 => self.default_frames,
            n => n as usize,
        };
        let cfg = SamplerConfig {
            num_steps: if cmd.num_steps == 0 { 10 } else { cmd.num_steps as usize },
            cfg_scale: cmd.cfg_scale as f64,
            seed: self.seed,
            ..SamplerConfig::default()
        };
        let sched: &NoiseSchedule = self.oracle.schedule();
        sample(&self.oracle, Some(&cmd.prompt), frames, &cfg, sched, &self.norm)
            .map(|out| out.clip)
            .map_err(|e| BackendError::Failure(e.to_string()))
    }
}

/// Tries each backend in order; the first that knows the prompt answers.
#[derive(Clone, Default)]
pub struct ChainBackend(pub Vec<Arc<dyn Backend>>);

impl Backend for ChainBackend {
    fn generate(&self, cmd: &TextCommand) -> Result<MotionClip, BackendError> {
        for b in &self.0 {
            match b.generate(cmd) {
                Err(BackendError::UnknownPrompt(_)) => continue,
                other => return other,
            }
        }
        Err(BackendError::UnknownPrompt(cmd.prompt.clone()))
    }
}
