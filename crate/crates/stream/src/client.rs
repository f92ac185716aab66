use std::time::{Duration, Instant};

use motionkit_core::metrics::{motion_safety_score, SafetyLimits};
use motionkit_core::motion::decode_clip;
use motionkit_core::policy::ActionFilter;
use motionkit_core::{AbsoluteTrajectory, MotionClip, MotionFrame, NUM_JOINTS};

use crate::transport::Connection;
use crate::wire::{TextCommand, WireMessage};
use crate::{Result, StreamError};

#[derive(Debug, Clone)]
pub struct ClientOptions {
    /// Maximum wait for any single message.
    pub timeout: Duration,
    pub cfg_scale: f32,
    pub num_steps: u16,
    pub requested_frames: u16,
    /// EMA coefficient applied to joint targets.
    pub filter_beta: f64,
    pub limits: SafetyLimits,
}

impl Default for ClientOptions {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(30),
            cfg_scale: 2.5,
            num_steps: 10,
            requested_frames: 0,
            filter_beta: ActionFilter::DEFAULT_BETA,
            limits: SafetyLimits::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JitterStats {
    pub mean_ms: f64,
    pub std_ms: f64,
    pub max_ms: f64,
}

impl JitterStats {
    fn from_intervals(iv: &[f64]) -> Self {
        if iv.is_empty() {
            return Self::default();
        }
        let n = iv.len() as f64;
        let mean = iv.iter().sum::<f64>() / n;
        let var = iv.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean_ms: mean,
            std_ms: var.sqrt(),
            max_ms: iv.iter().cloned().fold(0.0, f64::max),
        }
    }
}

/// Timing and safety record of one request.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestLog {
    pub prompt: String,
    pub motion_id: u32,
    pub chunks: usize,
    pub frames_received: usize,
    pub first_chunk_latency_ms: f64,
    pub total_ms: f64,
    /// Gaps between consecutive chunk arrivals.
    pub inter_chunk_ms: Vec<f64>,
    pub jitter: JitterStats,
    /// `(frames so far, MSS of the received prefix)` after each chunk once
    /// at least three frames have arrived.
    pub online_mss: Vec<(usize, f64)>,
}

impl RequestLog {
    pub fn final_mss(&self) -> Option<f64> {
        self.online_mss.last().map(|(_, m)| *m)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionLog {
    pub requests: Vec<RequestLog>,
}

/// Everything the edge side derives from one streamed motion.
#[derive(Debug, Clone)]
pub struct Received {
    pub clip: MotionClip,
    /// EMA-smoothed joint targets handed to the tracker.
    pub joint_targets: Vec<[f64; NUM_JOINTS]>,
    /// World-frame trajectory integrated from the origin.
    pub trajectory: AbsoluteTrajectory,
    pub log: RequestLog,
}

/// Edge-side session on one persistent connection.
pub struct Client {
    conn: Connection,
    last_motion_id: Option<u32>,
    pub log: SessionLog,
}

fn violation(msg: impl Into<String>) -> StreamError {
    StreamError::ProtocolViolation(msg.into())
}

impl Client {
    pub async fn connect(url: &str) -> Result<Self> {
        Ok(Self::from_connection(Connection::connect(url).await?))
    }

    pub fn from_connection(conn: Connection) -> Self {
        Self {
            conn,
            last_motion_id: None,
            log: SessionLog::default(),
        }
    }

    /// Sends a heartbeat and waits for the acknowledgement.
    pub async fn heartbeat(&mut self, timeout: Duration) -> Result<Duration> {
        let t0 = Instant::now();
        self.conn.send(&WireMessage::Heartbeat).await?;
        match self.conn.recv_timeout(timeout).await? {
            Some(WireMessage::Ack) => Ok(t0.elapsed()),
            Some(WireMessage::ErrorMsg { code, message }) => Err(StreamError::Server { code, message }),
            Some(other) => Err(violation(format!("expected Ack, got {:?}", other.msg_type()))),
            None => Err(StreamError::Closed),
        }
    }

    /// Requests one motion and receives it completely.
    pub async fn request(&mut self, prompt: &str, opts: &ClientOptions) -> Result<Received> {
        let cmd = TextCommand {
            prompt: prompt.to_string(),
            cfg_scale: opts.cfg_scale,
            num_steps: opts.num_steps,
            requested_frames: opts.requested_frames,
        };
        let t0 = Instant::now();
        self.conn.send(&WireMessage::TextCommand(cmd)).await?;

        let mut frames: Vec<MotionFrame> = Vec::new();
        let mut filter = ActionFilter::new(opts.filter_beta);
        let mut joint_targets = Vec::new();
        let mut motion: Option<(u32, u8)> = None;
        let mut arrivals: Vec<Instant> = Vec::new();
        let mut online_mss = Vec::new();

        let total = loop {
            let msg = self
                .conn
                .recv_timeout(opts.timeout)
                .await?
                .ok_or(StreamError::Closed)?;
            match msg {
                WireMessage::MotionChunk(chunk) => {
                    arrivals.push(Instant::now());
                    let (id, fps) = *motion.get_or_insert((chunk.motion_id, chunk.fps));
                    if chunk.motion_id != id {
                        return Err(violation(format!("chunk for motion {} inside motion {id}", chunk.motion_id)));
                    }
                    if frames.is_empty() && self.last_motion_id.is_some_and(|last| id <= last) {
                        return Err(violation(format!("motion id {id} is not newer than the previous one")));
                    }
                    if chunk.fps != fps || fps == 0 {
                        return Err(violation("frame rate changed within a motion"));
                    }
                    if chunk.start_frame as usize != frames.len() {
                        return Err(violation(format!(
                            "chunk starts at frame {}, expected {}",
                            chunk.start_frame,
                            frames.len()
                        )));
                    }
                    if chunk.frames.is_empty() {
                        return Err(violation("empty motion chunk"));
                    }
                    for row in &chunk.frames {
                        let f = MotionFrame::from_array(&row.map(f64::from));
                        joint_targets.push(
                            filter
                                .apply(&f.joint_pos)
                                .try_into()
                                .expect("filter preserves length"),
                        );
                        frames.push(f);
                    }
                    if frames.len() >= 3 {
                        let prefix = MotionClip::new(frames.clone(), fps)?;
                        let score = motion_safety_score(&prefix, &opts.limits)?;
                        online_mss.push((frames.len(), score.mss));
                    }
                }
                WireMessage::EndOfMotion {
                    motion_id,
                    total_frames,
                } => {
                    let Some((id, _)) = motion else {
                        return Err(violation("end of motion before any chunk"));
                    };
                    if motion_id != id || total_frames as usize != frames.len() {
                        return Err(violation(format!(
                            "end of motion {motion_id} with {total_frames} frames, received {} of motion {id}",
                            frames.len()
                        )));
                    }
                    break total_frames as usize;
                }
                WireMessage::ErrorMsg { code, message } => return Err(StreamError::Server { code, message }),
                WireMessage::Ack | WireMessage::Heartbeat => {}
                WireMessage::TextCommand(_) => return Err(violation("server sent a text command")),
            }
        };

        let (motion_id, fps) = motion.expect("set by the first chunk");
        self.last_motion_id = Some(motion_id);
        let clip = MotionClip::new(frames, fps)?.with_prompt(prompt);
        let trajectory = decode_clip(&clip, [0.0, 0.0])?;
        let inter_chunk_ms: Vec<f64> = arrivals
            .windows(2)
            .map(|w| (w[1] - w[0]).as_secs_f64() * 1e3)
            .collect();
        let log = RequestLog {
            prompt: prompt.to_string(),
            motion_id,
            chunks: arrivals.len(),
            frames_received: total,
            first_chunk_latency_ms: (arrivals[0] - t0).as_secs_f64() * 1e3,
            total_ms: t0.elapsed().as_secs_f64() * 1e3,
            jitter: JitterStats::from_intervals(&inter_chunk_ms),
            inter_chunk_ms,
            online_mss,
        };
        self.log.requests.push(log.clone());
        Ok(Received {
            clip,
            joint_targets,
            trajectory,
            log,
        })
    }

    pub async fn close(mut self) -> Result<SessionLog> {
        self.conn.close().await?;
        Ok(self.log)
    }
}

/// Connects, requests one prompt, closes.
pub async fn client_run(url: &str, prompt: &str, opts: &ClientOptions) -> Result<(SessionLog, MotionClip)> {
    let mut client = Client::connect(url).await?;
    let received = client.request(prompt, opts).await?;
    let log = client.close().await?;
    Ok((log, received.clip))
}
