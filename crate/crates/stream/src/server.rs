use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use motionkit_core::{MotionClip, FRAME_DIM};
use tokio::net::{TcpListener, TcpStream};
use tokio::task::JoinHandle;
use tokio::time::Instant;

use crate::backend::{Backend, BackendError};
use crate::transport::{ws_error, Connection};
use crate::wire::{ErrorCode, MotionChunk, WireMessage};
use crate::{Result, StreamError};

pub const DEFAULT_BIND: &str = "127.0.0.1:8765";
pub const BIND_ENV: &str = "ECHO_BIND";

/// `ECHO_BIND` if set, otherwise [`DEFAULT_BIND`].
pub fn default_bind() -> String {
    std::env::var(BIND_ENV).unwrap_or_else(|_| DEFAULT_BIND.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pacing {
    /// Chunk `i` leaves at `i * chunk_frames / fps` seconds, the end marker
    /// at `total_frames / fps`.
    Realtime,
    /// Everything as fast as the socket accepts it.
    Burst,
}

impl std::str::FromStr for Pacing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "realtime" => Ok(Self::Realtime),
            "burst" => Ok(Self::Burst),
            other => Err(format!("unknown pacing {other:?} (realtime|burst)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkPolicy {
    pub chunk_frames: usize,
    pub pacing: Pacing,
}

impl Default for ChunkPolicy {
    fn default() -> Self {
        Self {
            chunk_frames: 25,
            pacing: Pacing::Realtime,
        }
    }
}

impl ChunkPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.chunk_frames == 0 || self.chunk_frames > u16::MAX as usize {
            return Err(StreamError::Config(format!(
                "chunk_frames {} not in 1..=65535",
                self.chunk_frames
            )));
        }
        Ok(())
    }
}

/// One motion being streamed on a connection.
struct Job {
    motion_id: u32,
    fps: u8,
    frames: Vec<[f32; FRAME_DIM]>,
    start: Instant,
    sent: usize,
    policy: ChunkPolicy,
}

impl Job {
    fn new(motion_id: u32, clip: &MotionClip, policy: ChunkPolicy) -> Self {
        let frames = clip
            .frames
            .iter()
            .map(|f| f.to_array().map(|v| v as f32))
            .collect();
        Self {
            motion_id,
            fps: clip.fps,
            frames,
            start: Instant::now(),
            sent: 0,
            policy,
        }
    }

    fn deadline(&self) -> Instant {
        match self.policy.pacing {
            Pacing::Burst => self.start,
            Pacing::Realtime => self.start + Duration::from_secs_f64(self.sent as f64 / self.fps as f64),
        }
    }

    /// Next message to send and whether it finishes the motion.
    fn next_message(&mut self) -> (WireMessage, bool) {
        if self.sent >= self.frames.len() {
            let end = WireMessage::EndOfMotion {
                motion_id: self.motion_id,
                total_frames: self.frames.len() as u32,
            };
            return (end, true);
        }
        let end = (self.sent + self.policy.chunk_frames).min(self.frames.len());
        let chunk = MotionChunk {
            motion_id: self.motion_id,
            start_frame: self.sent as u32,
            fps: self.fps,
            frames: self.frames[self.sent..end].to_vec(),
        };
        self.sent = end;
        (WireMessage::MotionChunk(chunk), false)
    }
}

/// Peeks the first bytes to tell a WebSocket upgrade from the raw protocol.
async fn accept(stream: TcpStream) -> Result<Option<Connection>> {
    stream.set_nodelay(true)?;
    let mut head = [0u8; 4];
    loop {
        let n = stream.peek(&mut head).await?;
        if n == 0 {
            return Ok(None);
        }
        if n >= 4 || (!b"GET "[..n].eq(&head[..n])) {
            break;
        }
        tokio::time::sleep(Duration::from_millis(1)).await;
    }
    if &head == b"GET " {
        let ws = tokio_tungstenite::accept_async(stream).await.map_err(ws_error)?;
        Ok(Some(Connection::Ws(Box::new(ws))))
    } else {
        Ok(Some(Connection::raw(stream)))
    }
}

async fn handle_connection(stream: TcpStream, backend: Arc<dyn Backend>, policy: ChunkPolicy) -> Result<()> {
    let Some(mut conn) = accept(stream).await? else {
        return Ok(());
    };
    let mut next_id: u32 = 1;
    let mut job: Option<Job> = None;
    loop {
        let deadline = job.as_ref().map(Job::deadline);
        tokio::select! {
            incoming = conn.recv() => {
                let msg = match incoming {
                    Ok(Some(msg)) => msg,
                    Ok(None) => return Ok(()),
                    Err(StreamError::Wire(e)) => {
                        conn.send(&WireMessage::error(ErrorCode::ProtocolViolation, e.to_string())).await?;
                        if matches!(conn, Connection::Raw { .. }) {
                            // The byte stream cannot be resynchronized.
                            return Ok(());
                        }
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                match msg {
                    WireMessage::TextCommand(cmd) => {
                        if let Some(old) = job.take() {
                            let text = format!("motion {} superseded by a new command", old.motion_id);
                            conn.send(&WireMessage::error(ErrorCode::Cancelled, text)).await?;
                        }
                        let b = backend.clone();
                        let generated = tokio::task::spawn_blocking(move || b.generate(&cmd)).await;
                        match generated {
                            Ok(Ok(clip)) if !clip.is_empty() => {
                                job = Some(Job::new(next_id, &clip, policy));
                                next_id += 1;
                            }
                            Ok(Ok(_)) => {
                                conn.send(&WireMessage::error(ErrorCode::BackendFailure, "backend returned an empty clip")).await?;
                            }
                            Ok(Err(BackendError::UnknownPrompt(p))) => {
                                conn.send(&WireMessage::error(ErrorCode::UnknownPrompt, format!("unknown prompt {p:?}"))).await?;
                            }
                            Ok(Err(BackendError::Failure(m))) => {
                                conn.send(&WireMessage::error(ErrorCode::BackendFailure, m)).await?;
                            }
                            Err(e) => {
                                conn.send(&WireMessage::error(ErrorCode::BackendFailure, e.to_string())).await?;
                            }
                        }
                    }
                    WireMessage::Heartbeat => conn.send(&WireMessage::Ack).await?,
                    WireMessage::Ack => {}
                    other => {
                        let text = format!("unexpected {:?} from client", other.msg_type());
                        conn.send(&WireMessage::error(ErrorCode::ProtocolViolation, text)).await?;
                    }
                }
            }
            _ = tokio::time::sleep_until(deadline.unwrap_or_else(Instant::now)), if deadline.is_some() => {
                let current = job.as_mut().expect("deadline implies a job");
                let (msg, finished) = current.next_message();
                conn.send(&msg).await?;
                if finished {
                    job = None;
                }
            }
        }
    }
}

/// A bound, not yet running server.
pub struct Server {
    listener: TcpListener,
    backend: Arc<dyn Backend>,
    policy: ChunkPolicy,
}

impl Server {
    pub async fn bind(addr: &str, backend: Arc<dyn Backend>, policy: ChunkPolicy) -> Result<Self> {
        policy.validate()?;
        let listener = TcpListener::bind(addr).await?;
        Ok(Self {
            listener,
            backend,
            policy,
        })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts connections forever; each one runs on its own task.
    pub async fn run(self) -> Result<()> {
        loop {
            let (stream, _) = self.listener.accept().await?;
            let backend = self.backend.clone();
            let policy = self.policy;
            tokio::spawn(async move {
                let _ = handle_connection(stream, backend, policy).await;
            });
        }
    }

    pub fn spawn(self) -> Result<ServerHandle> {
        let addr = self.local_addr()?;
        let task = tokio::spawn(async move {
            let _ = self.run().await;
        });
        Ok(ServerHandle { addr, task })
    }
}

pub struct ServerHandle {
    pub addr: SocketAddr,
    task: JoinHandle<()>,
}

impl ServerHandle {
    pub fn raw_url(&self) -> String {
        format!("tcp://{}", self.addr)
    }

    pub fn ws_url(&self) -> String {
        format!("ws://{}/", self.addr)
    }

    /// Stops accepting new connections.
    pub fn shutdown(self) {
        self.task.abort();
    }
}

/// Binds `addr` and serves until the process ends.
pub async fn serve(addr: &str, backend: Arc<dyn Backend>, policy: ChunkPolicy) -> Result<()> {
    Server::bind(addr, backend, policy).await?.run().await
}
