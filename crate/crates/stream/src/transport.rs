use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::WebSocketStream;

use crate::wire::{decode_message, decode_prefix, encode_message, WireMessage};
use crate::{Result, StreamError};

/// Which byte carrier a connection uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportKind {
    /// Messages back to back on a TCP stream.
    Raw,
    /// One message per binary WebSocket frame.
    WebSocket,
}

/// A message-oriented connection over either transport.
pub enum Connection {
    Raw { stream: TcpStream, buf: Vec<u8> },
    Ws(Box<WebSocketStream<TcpStream>>),
}

impl Connection {
    pub fn raw(stream: TcpStream) -> Self {
        Self::Raw {
            stream,
            buf: Vec::with_capacity(4096),
        }
    }

    pub fn kind(&self) -> TransportKind {
        match self {
            Self::Raw { .. } => TransportKind::Raw,
            Self::Ws(_) => TransportKind::WebSocket,
        }
    }

    /// Connects to `tcp://host:port`, `ws://host:port/path` or bare
    /// `host:port` (raw).
    pub async fn connect(url: &str) -> Result<Self> {
        if let Some(rest) = url.strip_prefix("ws://") {
            let host = rest.split('/').next().unwrap_or(rest);
            let stream = TcpStream::connect(host).await?;
            stream.set_nodelay(true)?;
            let (ws, _) = tokio_tungstenite::client_async(url, stream)
                .await
                .map_err(ws_error)?;
            return Ok(Self::Ws(Box::new(ws)));
        }
        if url.contains("://") && !url.starts_with("tcp://") {
            return Err(StreamError::BadUrl(url.to_string()));
        }
        let host = url.trim_start_matches("tcp://").trim_end_matches('/');
        let stream = TcpStream::connect(host).await?;
        stream.set_nodelay(true)?;
        Ok(Self::raw(stream))
    }

    /// Sends pre-encoded bytes as one unit (one WebSocket frame).
    pub async fn send_bytes(&mut self, bytes: Vec<u8>) -> Result<()> {
        match self {
            Self::Raw { stream, .. } => {
                stream.write_all(&bytes).await?;
                Ok(())
            }
            Self::Ws(ws) => ws.send(Message::binary(bytes)).await.map_err(ws_error),
        }
    }

    pub async fn send(&mut self, msg: &WireMessage) -> Result<()> {
        self.send_bytes(encode_message(msg)?).await
    }

    /// Next message, or `None` once the peer has closed cleanly.
    ///
    /// Cancel-safe: bytes already read stay buffered for the next call.
    pub async fn recv(&mut self) -> Result<Option<WireMessage>> {
        match self {
            Self::Raw { stream, buf } => loop {
                if !buf.is_empty() {
                    if let Some((msg, used)) = decode_prefix(buf)? {
                        buf.drain(..used);
                        return Ok(Some(msg));
                    }
                }
                if stream.read_buf(buf).await? == 0 {
                    return if buf.is_empty() {
                        Ok(None)
                    } else {
                        Err(StreamError::Wire(decode_message(buf).unwrap_err()))
                    };
                }
            },
            Self::Ws(ws) => loop {
                match ws.next().await {
                    None => return Ok(None),
                    Some(Err(e)) => return Err(ws_error(e)),
                    Some(Ok(Message::Binary(b))) => return Ok(Some(decode_message(&b)?)),
                    Some(Ok(Message::Close(_))) => return Ok(None),
                    Some(Ok(Message::Text(_))) => {
                        return Err(StreamError::ProtocolViolation("text frame on binary protocol".into()))
                    }
                    Some(Ok(_)) => continue,
                }
            },
        }
    }

    /// [`recv`](Self::recv) with a deadline.
    pub async fn recv_timeout(&mut self, timeout: Duration) -> Result<Option<WireMessage>> {
        tokio::time::timeout(timeout, self.recv())
            .await
            .map_err(|_| StreamError::Timeout)?
    }

    pub async fn close(&mut self) -> Result<()> {
        match self {
            Self::Raw { stream, .. } => {
                stream.shutdown().await?;
                Ok(())
            }
            Self::Ws(ws) => match ws.close(None).await {
                Ok(()) => Ok(()),
                Err(tokio_tungstenite::tungstenite::Error::ConnectionClosed) => Ok(()),
                Err(e) => Err(ws_error(e)),
            },
        }
    }
}

pub(crate) fn ws_error(e: tokio_tungstenite::tungstenite::Error) -> StreamError {
    StreamError::WebSocket(e.to_string())
}
