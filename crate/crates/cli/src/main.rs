//! `motionkit`: clip conversion, metrics, oracle sampling, streaming and
//! recovery retrieval from the command line.
//!
//! Results are printed to stdout as one JSON object per line. Failures print
//! `{"error": kind, "message": text}` to stderr and exit with status 1;
//! usage errors exit with status 2.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use motionkit_core::diffusion::DiffusionError;
use motionkit_core::metrics::MetricsError;
use motionkit_core::policy::PolicyError;
use motionkit_core::recovery::RecoveryError;
use motionkit_core::MotionError;
use motionkit_stream::StreamError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            Self::Motion(_) => "motion",
            Self::Metrics(_) => "metrics",
            Self::Diffusion(_) => "diffusion",
            Self::Policy(_) => "policy",
            Self::Recovery(_) => "recovery",
            Self::Stream(_) => "stream",
            Self::Io(_) => "io",
            Self::Input(_) => "input",
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(name = "motionkit", version, about = "Humanoid motion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a clip between .emc and .csv (chosen by extension).
    Convert {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Frame rate assigned to CSV input.
        #[arg(long, default_value_t = motionkit_core::motion::DEFAULT_FPS)]
        fps: u8,
    },
    /// Evaluate a metric.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Sample a clip from the Gaussian oracle denoiser.
    Sample(SampleArgs),
    /// Run the motion streaming server.
    Serve(ServeArgs),
    /// Request motions from a server and report the session log.
    Client(ClientArgs),
    /// Fall-recovery library tools.
    #[command(subcommand)]
    Recover(RecoverCommand),
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Motion Safety Score of a clip.
    Mss {
        clip: PathBuf,
        /// Joint limit table (`name, lower, upper` per line); G1 by default.
        #[arg(long)]
        limits: Option<PathBuf>,
        #[arg(long, default_value_t = motionkit_core::motion::DEFAULT_FPS)]
        fps: u8,
    },
    /// Root Trajectory Consistency of a generated clip against a reference.
    Rtc {
        generated: PathBuf,
        reference: PathBuf,
        #[arg(long, default_value_t = motionkit_core::motion::DEFAULT_FPS)]
        fps: u8,
    },
    /// Frechet distance between two embedding sets (.emb or .csv).
    Fid { a: PathBuf, b: PathBuf },
    /// Top-1/2/3 R-Precision of paired motion and text embeddings.
    Rprec {
        motion: PathBuf,
        text: PathBuf,
        #[arg(long, default_value_t = 32)]
        pool: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Diversity of an embedding set.
    Div {
        embeddings: PathBuf,
        #[arg(long, default_value_t = 300)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mean distance between paired motion and text embeddings.
    Mmdist { motion: PathBuf, text: PathBuf },
    /// Global and root-relative keypoint error (CSV: x,y,z per keypoint per row).
    Mpjpe {
        actual: PathBuf,
        reference: PathBuf,
        #[arg(long, default_value_t = 0)]
        root: usize,
    },
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value = "ddim")]
    pub scheduler: String,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long = "cfg", default_value_t = 2.5)]
    pub cfg_scale: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `mean.csv,var.csv`, each with 38 values.
    #[arg(long)]
    pub oracle: String,
    #[arg(long, default_value_t = 100)]
    pub frames: usize,
    #[arg(long, default_value = "motion")]
    pub prompt: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Defaults to $ECHO_BIND, then 127.0.0.1:8765.
    #[arg(long)]
    pub bind: Option<String>,
    /// Directory of .emc clips; file stems are the prompts.
    #[arg(long)]
    pub library: Option<PathBuf>,
    /// `mean.csv,var.csv` for oracle generation of unknown prompts.
    #[arg(long)]
    pub oracle: Option<String>,
    #[arg(long, default_value = "realtime")]
    pub pace: String,
    #[arg(long, default_value_t = 25)]
    pub chunk: usize,
}

#[derive(Debug, Args)]
pub struct ClientArgs {
    #[arg(long)]
    pub url: String,
    /// Repeat to send several prompts over one connection.
    #[arg(long, required = true)]
    pub prompt: Vec<String>,
    /// Where to write the last received clip.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "cfg", default_value_t = 2.5)]
    pub cfg_scale: f32,
    #[arg(long, default_value_t = 10)]
    pub steps: u16,
    /// 0 asks for the server default.
    #[arg(long, default_value_t = 0)]
    pub frames: u16,
    #[arg(long, default_value_t = 30.0)]
    pub timeout: f64,
}

#[derive(Debug, Subcommand)]
pub enum RecoverCommand {
    /// Derive entries from every .emc in a directory and write its index.
    BuildIndex { dir: PathBuf },
    /// Retrieve the best recovery clip for a fallen state.
    Query {
        /// Library directory or index file.
        #[arg(long)]
        library: PathBuf,
        /// Body-frame gravity `gx,gy,gz`.
        #[arg(long, allow_hyphen_values = true)]
        gravity: String,
        /// File with 29 joint angles.
        #[arg(long)]
        joints: PathBuf,
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Convert { input, out, fps } => commands::convert(&input, &out, fps),
        Command::Eval(cmd) => commands::eval(cmd),
        Command::Sample(args) => commands::sample(&args),
        Command::Serve(args) => commands::serve(&args),
        Command::Client(args) => commands::client(&args),
        Command::Recover(cmd) => commands::recover(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
