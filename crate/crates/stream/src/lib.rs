//! Edge-cloud motion streaming: the binary wire protocol, a motion server
//! that chunks clips over raw TCP or WebSocket, and an edge client that
//! reassembles, smooths and scores what it receives.

pub mod backend;
pub mod client;
pub mod server;
pub mod transport;
pub mod wire;

pub use backend::{Backend, BackendError, ChainBackend, LibraryBackend, OracleBackend};
pub use client::{client_run, Client, ClientOptions, JitterStats, Received, RequestLog, SessionLog};
pub use server::{default_bind, serve, ChunkPolicy, Pacing, Server, ServerHandle, BIND_ENV, DEFAULT_BIND};
pub use transport::{Connection, TransportKind};
pub use wire::{decode_message, decode_prefix, encode_message, ErrorCode, MotionChunk, TextCommand, WireError, WireMessage};

use motionkit_core::metrics::MetricsError;
use motionkit_core::MotionError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StreamError {
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("websocket: {0}")]
    WebSocket(String),
    #[error("timed out waiting for the server")]
    Timeout,
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("server error {code:?}: {message}")]
    Server { code: ErrorCode, message: String },
    #[error("connection closed")]
    Closed,
    #[error("unsupported url {0}")]
    BadUrl(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

pub type Result<T, E = StreamError> = std::result::Result<T, E>;
