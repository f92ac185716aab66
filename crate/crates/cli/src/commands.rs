use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use motionkit_core::diffusion::{sample as sample_clip, SamplerConfig, Scheduler};
use motionkit_core::metrics::{
    diversity, fid, mm_dist, motion_safety_score, mpjpe, r_precision, root_trajectory_consistency, EmbeddingRole,
    EmbeddingSet, RtcConfig, SafetyLimits,
};
use motionkit_core::motion::io::{read_clip, read_emc, write_csv_file, write_emc};
use motionkit_core::motion::joints::parse_joint_limits;
use motionkit_core::recovery::{build_index, load_index, retrieve_recovery, INDEX_FILE};
use motionkit_core::{MotionClip, NormStats, NUM_JOINTS};
use motionkit_stream::{
    default_bind, Backend, ChainBackend, ChunkPolicy, Client, ClientOptions, LibraryBackend, OracleBackend, Pacing,
    Server,
};
use serde_json::{json, Value};

use crate::input::{load_oracle, parse_vec3, read_fixed, read_keypoints};
use crate::{ClientArgs, CliError, EvalCommand, RecoverCommand, Result, SampleArgs, ServeArgs};

fn emit(v: Value) {
    let mut out = std::io::stdout().lock();
    // A closed stdout is not worth failing the command over.
    let _ = writeln!(out, "{v}");
    let _ = out.flush();
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "csv")
}

fn write_clip(path: &Path, clip: &MotionClip, stats: Option<&NormStats>) -> Result<()> {
    if is_csv(path) {
        write_csv_file(path, clip)?;
    } else {
        write_emc(path, clip, stats)?;
    }
    Ok(())
}

pub fn convert(input: &Path, out: &Path, fps: u8) -> Result<()> {
    let (clip, stats) = if is_csv(input) {
        (read_clip(input, fps)?, None)
    } else {
        read_emc(input)?
    };
    write_clip(out, &clip, stats.as_ref())?;
    emit(json!({
        "input": input.display().to_string(),
        "out": out.display().to_string(),
        "frames": clip.len(),
        "fps": clip.fps,
        "stats_dropped": stats.is_some() && is_csv(out),
    }));
    Ok(())
}

fn rtc_json(gen: &MotionClip, gt: &MotionClip) -> Result<Value> {
    let s = root_trajectory_consistency(gen, gt, &RtcConfig::default())?;
    Ok(json!({
        "metric": "rtc",
        "rtc": s.rtc,
        "s_shape": s.s_shape,
        "s_extent": s.s_extent,
        "shape_error": s.shape_error,
        "len_gen": s.len_gen,
        "len_gt": s.len_gt,
    }))
}

pub fn eval(cmd: EvalCommand) -> Result<()> {
    let load = |p: &Path, role| EmbeddingSet::load(p, role);
    let value = match cmd {
        EvalCommand::Mss { clip, limits, fps } => {
            let clip = read_clip(&clip, fps)?;
            let limits = match limits {
                Some(p) => SafetyLimits::with_joints(parse_joint_limits(&std::fs::read_to_string(p)?)?),
                None => SafetyLimits::default(),
            };
            let s = motion_safety_score(&clip, &limits)?;
            json!({
                "metric": "mss",
                "mss": s.mss,
                "s_pos": s.s_pos,
                "s_vel": s.s_vel,
                "s_acc": s.s_acc,
                "v_pos": s.v_pos,
                "v_vel": s.v_vel,
                "v_acc": s.v_acc,
            })
        }
        EvalCommand::Rtc {
            generated,
            reference,
            fps,
        } => rtc_json(&read_clip(&generated, fps)?, &read_clip(&reference, fps)?)?,
        EvalCommand::Fid { a, b } => {
            let a = load(&a, EmbeddingRole::Motion)?;
            let b = load(&b, EmbeddingRole::Motion)?;
            json!({ "metric": "fid", "fid": fid(&a, &b)?, "n_a": a.len(), "n_b": b.len(), "dim": a.dim() })
        }
        EvalCommand::Rprec {
            motion,
            text,
            pool,
            seed,
        } => {
            let m = load(&motion, EmbeddingRole::Motion)?;
            let t = load(&text, EmbeddingRole::Text)?;
            let r = r_precision(&m, &t, pool, seed)?;
            json!({ "metric": "r_precision", "top1": r.top1, "top2": r.top2, "top3": r.top3, "pool": pool })
        }
        EvalCommand::Div {
            embeddings,
            pairs,
            seed,
        } => {
            let e = load(&embeddings, EmbeddingRole::Motion)?;
            json!({ "metric": "diversity", "diversity": diversity(&e, pairs, seed)?, "pairs": pairs })
        }
        EvalCommand::Mmdist { motion, text } => {
            let m = load(&motion, EmbeddingRole::Motion)?;
            let t = load(&text, EmbeddingRole::Text)?;
            json!({ "metric": "mm_dist", "mm_dist": mm_dist(&m, &t)? })
        }
        EvalCommand::Mpjpe {
            actual,
            reference,
            root,
        } => {
            let r = mpjpe(&read_keypoints(&actual)?, &read_keypoints(&reference)?, root)?;
            json!({ "metric": "mpjpe", "g_mpjpe_mm": r.global_mm, "mpjpe_mm": r.local_mm })
        }
    };
    emit(value);
    Ok(())
}

pub fn sample(args: &SampleArgs) -> Result<()> {
    let scheduler: Scheduler = args.scheduler.parse()?;
    let oracle = load_oracle(&args.oracle)?;
    let cfg = SamplerConfig {
        scheduler,
        num_steps: args.steps,
        cfg_scale: args.cfg_scale,
        eta: args.eta,
        seed: args.seed,
        ..SamplerConfig::default()
    };
    let norm = NormStats::identity();
    let out = sample_clip(&oracle, Some(&args.prompt), args.frames, &cfg, oracle.schedule(), &norm)?;
    if let Some(path) = &args.out {
        write_clip(path, &out.clip, None)?;
    }
    emit(json!({
        "scheduler": args.scheduler,
        "steps": args.steps,
        "cfg": args.cfg_scale,
        "seed": args.seed,
        "frames": out.clip.len(),
        "time_s": out.elapsed.as_secs_f64(),
        "out": args.out.as_ref().map(|p| p.display().to_string()),
    }));
    Ok(())
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

pub fn serve(args: &ServeArgs) -> Result<()> {
    let pacing: Pacing = args.pace.parse().map_err(CliError::Input)?;
    let policy = ChunkPolicy {
        chunk_frames: args.chunk,
        pacing,
    };
    let mut backends: Vec<Arc<dyn Backend>> = Vec::new();
    let mut prompts = 0;
    if let Some(dir) = &args.library {
        let lib = LibraryBackend::from_dir(dir)?;
        prompts = lib.len();
        backends.push(Arc::new(lib));
    }
    if let Some(spec) = &args.oracle {
        backends.push(Arc::new(OracleBackend::new(load_oracle(spec)?, NormStats::identity())));
    }
    if backends.is_empty() {
        return Err(CliError::Input("serve needs --library and/or --oracle".into()));
    }
    let bind = args.bind.clone().unwrap_or_else(default_bind);
    runtime()?.block_on(async move {
        let server = Server::bind(&bind, Arc::new(ChainBackend(backends)), policy).await?;
        emit(json!({
            "listening": server.local_addr()?.to_string(),
            "library_prompts": prompts,
            "oracle": args.oracle.is_some(),
            "chunk_frames": policy.chunk_frames,
            "pacing": args.pace,
        }));
        server.run().await?;
        Ok(())
    })
}

pub fn client(args: &ClientArgs) -> Result<()> {
    if !(args.timeout > 0.0 && args.timeout.is_finite()) {
        return Err(CliError::Input("--timeout must be positive".into()));
    }
    let opts = ClientOptions {
        timeout: Duration::from_secs_f64(args.timeout),
        cfg_scale: args.cfg_scale,
        num_steps: args.steps,
        requested_frames: args.frames,
        ..ClientOptions::default()
    };
    runtime()?.block_on(async {
        let mut client = Client::connect(&args.url).await?;
        let mut last = None;
        for prompt in &args.prompt {
            let got = client.request(prompt, &opts).await?;
            let log = &got.log;
            emit(json!({
                "prompt": log.prompt,
                "motion_id": log.motion_id,
                "frames": log.frames_received,
                "chunks": log.chunks,
                "first_chunk_latency_ms": log.first_chunk_latency_ms,
                "total_ms": log.total_ms,
                "jitter_ms": { "mean": log.jitter.mean_ms, "std": log.jitter.std_ms, "max": log.jitter.max_ms },
                "mss": log.final_mss(),
            }));
            last = Some(got.clip);
        }
        client.close().await?;
        if let (Some(path), Some(clip)) = (&args.out, &last) {
            write_clip(path, clip, None)?;
        }
        Ok(())
    })
}

pub fn recover(cmd: RecoverCommand) -> Result<()> {
    match cmd {
        RecoverCommand::BuildIndex { dir } => {
            let lib = build_index(&dir)?;
            emit(json!({
                "index": dir.join(INDEX_FILE).display().to_string(),
                "entries": lib.entries.len(),
            }));
        }
        RecoverCommand::Query {
            library,
            gravity,
            joints,
            top,
        } => {
            let index = if library.is_dir() {
                library.join(INDEX_FILE)
            } else {
                library
            };
            let lib = load_index(&index)?;
            let gravity = parse_vec3(&gravity)?;
            let joints: [f64; NUM_JOINTS] = read_fixed(&joints, "joints")?;
            let r = retrieve_recovery(&gravity, &joints, &lib)?;
            let path_of = |i: usize| {
                lib.entries[i]
                    .clip_path
                    .as_ref()
                    .map(|p| p.display().to_string())
            };
            let ranked: Vec<Value> = r
                .ranked
                .iter()
                .take(top)
                .map(|&(i, d)| json!({ "index": i, "clip": path_of(i), "joint_distance": d }))
                .collect();
            emit(json!({
                "best": r.best,
                "clip": path_of(r.best),
                "fallback": r.fallback,
                "ranked": ranked,
            }));
        }
    }
    Ok(())
}
