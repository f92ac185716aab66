use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use motionkit_core::motion::io::{read_emc, write_emc};
use motionkit_core::motion::joints::g1_joint_limits;
use motionkit_core::{MotionClip, MotionFrame, FRAME_DIM, NUM_JOINTS};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_motionkit");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn json_lines(bytes: &[u8]) -> Vec<Value> {
    String::from_utf8_lossy(bytes)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{l:?}: {e}")))
        .collect()
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    json_lines(&out.stdout).pop().expect("one JSON line")
}

/// Joints oscillate gently around their range centres, so the clip is
/// within every G1 limit.
fn walking_clip(n: usize, phase: f64) -> MotionClip {
    let limits = g1_joint_limits();
    let frames = (0..n)
        .map(|t| {
            let mut f = MotionFrame {
                root_vel_xy: [0.02f32 as f64, 0.0],
                root_height: 0.75,
                ..MotionFrame::default()
            };
            for (j, (q, r)) in f.joint_pos.iter_mut().zip(&limits).enumerate() {
                let centre = 0.5 * (r.lower + r.upper);
                *q = (centre + 0.05 * ((t as f64) * 0.05 + phase + j as f64).sin()) as f32 as f64;
            }
            f
        })
        .collect();
    MotionClip::new(frames, 50).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn convert_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let emc = dir.path().join("a.emc");
    let csv = dir.path().join("a.csv");
    let back = dir.path().join("b.emc");
    write_emc(&emc, &walking_clip(60, 0.3), None).unwrap();
    let v = ok_json(&["convert", path_str(&emc), "--out", path_str(&csv)]);
    assert_eq!(v["frames"], 60);
    ok_json(&["convert", path_str(&csv), "--out", path_str(&back)]);
    assert_eq!(std::fs::read(&emc).unwrap(), std::fs::read(&back).unwrap());
}

#[test]
fn eval_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let clip = dir.path().join("c.emc");
    write_emc(&clip, &walking_clip(80, 0.0), None).unwrap();
    let v = ok_json(&["eval", "mss", path_str(&clip)]);
    assert_eq!(v["mss"], 1.0);
    let v = ok_json(&["eval", "rtc", path_str(&clip), path_str(&clip)]);
    assert!((v["rtc"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let rows = |shift: f64| {
        (0..40)
            .map(|i| format!("{},{},{}\n", (i as f64 * 0.37).sin() + shift, (i as f64 * 0.91).cos(), i as f64 * 0.01))
            .collect::<String>()
    };
    std::fs::write(&a, rows(0.0)).unwrap();
    std::fs::write(&b, rows(0.5)).unwrap();
    let v = ok_json(&["eval", "fid", path_str(&a), path_str(&a)]);
    assert!(v["fid"].as_f64().unwrap().abs() < 1e-6);
    let v = ok_json(&["eval", "fid", path_str(&a), path_str(&b)]);
    assert!((v["fid"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    let v = ok_json(&["eval", "rprec", path_str(&a), path_str(&a), "--pool", "8"]);
    assert_eq!(v["top1"], 1.0);
    let v = ok_json(&["eval", "mmdist", path_str(&a), path_str(&b)]);
    assert!((v["mm_dist"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let v = ok_json(&["eval", "div", path_str(&a), "--pairs", "50"]);
    assert!(v["diversity"].as_f64().unwrap() > 0.0);

    let kp = dir.path().join("kp.csv");
    let kp2 = dir.path().join("kp2.csv");
    std::fs::write(&kp, "0,0,0,1,0,0\n0,0,0,0,1,0\n").unwrap();
    std::fs::write(&kp2, "0,0,0.1,1,0,0.1\n0,0,0.1,0,1,0.1\n").unwrap();
    let v = ok_json(&["eval", "mpjpe", path_str(&kp2), path_str(&kp)]);
    assert!((v["g_mpjpe_mm"].as_f64().unwrap() - 100.0).abs() < 1e-9);
    assert!(v["mpjpe_mm"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn custom_limits_table() {
    let dir = tempfile::tempdir().unwrap();
    let clip = dir.path().join("c.emc");
    write_emc(&clip, &walking_clip(80, 0.0), None).unwrap();
    let limits = dir.path().join("tight.limits");
    let table: String = (0..NUM_JOINTS).map(|j| format!("j{j}, -0.01, 0.01\n")).collect();
    std::fs::write(&limits, table).unwrap();
    let v = ok_json(&["eval", "mss", path_str(&clip), "--limits", path_str(&limits)]);
    assert!(v["mss"].as_f64().unwrap() < 1.0);
    assert!(v["v_pos"].as_f64().unwrap() > 0.0);
}

#[test]
fn errors_are_json_on_stderr() {
    let out = run(&["eval", "mss", "/nonexistent/clip.emc"]);
    assert_eq!(out.status.code(), Some(1));
    let err = json_lines(&out.stderr).pop().unwrap();
    assert!(err["error"].is_string() && err["message"].is_string());

    let out = run(&["eval", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["sample"]);
    assert_eq!(out.status.code(), Some(2));
}

fn oracle_files(dir: &Path) -> String {
    let mean = dir.join("mean.csv");
    let var = dir.join("var.csv");
    let m: Vec<String> = (0..FRAME_DIM).map(|i| format!("{}", i as f64 * 0.01)).collect();
    std::fs::write(&mean, m.join(",")).unwrap();
    std::fs::write(&var, vec!["0.04"; FRAME_DIM].join(",")).unwrap();
    format!("{},{}", mean.display(), var.display())
}

#[test]
fn sample_writes_clip_and_reports_time() {
    let dir = tempfile::tempdir().unwrap();
    let oracle = oracle_files(dir.path());
    let out = dir.path().join("s.emc");
    let args = [
        "sample", "--scheduler", "ddim", "--steps", "10", "--cfg", "2.5", "--seed", "4", "--oracle", &oracle,
        "--frames", "64", "--out", path_str(&out),
    ];
    let v = ok_json(&args);
    assert!(v["time_s"].as_f64().unwrap() >= 0.0);
    let (clip, _) = read_emc(&out).unwrap();
    assert_eq!(clip.len(), 64);
    let first = std::fs::read(&out).unwrap();
    ok_json(&args);
    assert_eq!(first, std::fs::read(&out).unwrap());

    let bad = run(&["sample", "--scheduler", "dpm-solver", "--oracle", &oracle]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json_lines(&bad.stderr)[0]["error"], "diffusion");
}

#[test]
fn recover_build_and_query() {
    let dir = tempfile::tempdir().unwrap();
    let mut lying = walking_clip(10, 0.0);
    for f in &mut lying.frames {
        // Pitched -90 deg about y: columns of R are (0,0,1) and (0,1,0).
        f.root_rot6d = [0.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        f.joint_pos = [0.3; NUM_JOINTS];
    }
    write_emc(dir.path().join("stand.emc"), &walking_clip(10, 0.0), None).unwrap();
    write_emc(dir.path().join("supine.emc"), &lying, None).unwrap();
    let v = ok_json(&["recover", "build-index", path_str(dir.path())]);
    assert_eq!(v["entries"], 2);

    let joints = dir.path().join("q.txt");
    std::fs::write(&joints, vec!["0.3"; NUM_JOINTS].join(" ")).unwrap();
    let v = ok_json(&[
        "recover", "query", "--library", path_str(dir.path()), "--gravity", "-1,0,0", "--joints", path_str(&joints),
    ]);
    assert_eq!(v["best"], 1);
    assert_eq!(v["fallback"], false);
    assert!(v["clip"].as_str().unwrap().ends_with("supine.emc"));

    let bad = run(&[
        "recover", "query", "--library", path_str(dir.path()), "--gravity", "0,0,-2", "--joints", path_str(&joints),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json_lines(&bad.stderr)[0]["error"], "recovery");
}

struct Killed(std::process::Child);

impl Drop for Killed {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn serve_and_client_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let lib = dir.path().join("lib");
    std::fs::create_dir(&lib).unwrap();
    let clip = walking_clip(300, 1.0);
    write_emc(lib.join("walk_forward.emc"), &clip, None).unwrap();
    let oracle = oracle_files(dir.path());

    let mut child = Command::new(BIN)
        .args(["serve", "--bind", "127.0.0.1:0", "--library", path_str(&lib), "--oracle", &oracle])
        .args(["--pace", "burst", "--chunk", "40"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let stdout = child.stdout.take().unwrap();
    let server = Killed(child);
    let mut line = String::new();
    BufReader::new(stdout).read_line(&mut line).unwrap();
    let info: Value = serde_json::from_str(&line).unwrap();
    let addr = info["listening"].as_str().unwrap().to_string();
    assert_eq!(info["library_prompts"], 1);

    for url in [format!("tcp://{addr}"), format!("ws://{addr}/")] {
        let out = dir.path().join("got.emc");
        let res = run(&[
            "client", "--url", &url, "--prompt", "walk forward", "--prompt", "anything else", "--frames", "30",
            "--out", path_str(&out),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        let logs = json_lines(&res.stdout);
        assert_eq!(logs.len(), 2);
        assert_eq!(logs[0]["frames"], 300);
        assert_eq!(logs[0]["chunks"], 8);
        assert_eq!(logs[1]["frames"], 30);
        assert!(logs[1]["motion_id"].as_u64() > logs[0]["motion_id"].as_u64());

        let single = dir.path().join("single.emc");
        let res = run(&["client", "--url", &url, "--prompt", "Walk  Forward", "--out", path_str(&single)]);
        assert!(res.status.success());
        let (got, _) = read_emc(&single).unwrap();
        assert_eq!(got.frames, clip.frames);
    }
    drop(server);
}

#[test]
fn client_reports_unreachable_server() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let out = run(&["client", "--url", &format!("tcp://{addr}"), "--prompt", "x"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_lines(&out.stderr)[0]["error"], "stream");
}
