//! Length-prefixed binary codec shared by every transport.
//!
//! Header (10 bytes, little-endian): magic `ECHO`, version `u8 = 1`,
//! message type `u8`, payload length `u32`. Payloads:
//!
//! | type | payload |
//! |------|---------|
//! | 1 TextCommand | prompt_len u16, prompt UTF-8, cfg_scale f32, num_steps u16, requested_frames u16 |
//! | 2 MotionChunk | motion_id u32, start_frame u32, frame_count u16, fps u8, frame_count x 38 f32 |
//! | 3 EndOfMotion | motion_id u32, total_frames u32 |
//! | 4 Heartbeat | empty |
//! | 5 ErrorMsg | code u16, msg_len u16, UTF-8 text |
//! | 6 Ack | empty |

use motionkit_core::FRAME_DIM;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"ECHO";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
/// Fixed part of a MotionChunk payload before the frame data.
pub const CHUNK_PREFIX_LEN: usize = 11;
pub const FRAME_BYTES: usize = FRAME_DIM * 4;
/// Upper bound on accepted payloads.
pub const MAX_PAYLOAD: usize = 64 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported protocol version {0}")]
    BadVersion(u8),
    #[error("truncated message: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("unknown message type {0}")]
    UnknownType(u8),
    #[error("malformed payload: {0}")]
    Malformed(String),
    #[error("{0} trailing bytes after message")]
    TrailingBytes(usize),
    #[error("message too large: {0}")]
    TooLarge(String),
}

pub type Result<T, E = WireError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    TextCommand = 1,
    MotionChunk = 2,
    EndOfMotion = 3,
    Heartbeat = 4,
    ErrorMsg = 5,
    Ack = 6,
}

impl TryFrom<u8> for MsgType {
    type Error = WireError;

    fn try_from(v: u8) -> Result<Self> {
        Ok(match v {
            1 => Self::TextCommand,
            2 => Self::MotionChunk,
            3 => Self::EndOfMotion,
            4 => Self::Heartbeat,
            5 => Self::ErrorMsg,
            6 => Self::Ack,
            other => return Err(WireError::UnknownType(other)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    UnknownPrompt,
    BackendFailure,
    ProtocolViolation,
    Cancelled,
    Other(u16),
}

impl From<u16> for ErrorCode {
    fn from(v: u16) -> Self {
        match v {
            1 => Self::UnknownPrompt,
            2 => Self::BackendFailure,
            3 => Self::ProtocolViolation,
            4 => Self::Cancelled,
            other => Self::Other(other),
        }
    }
}

impl From<ErrorCode> for u16 {
    fn from(c: ErrorCode) -> u16 {
        match c {
            ErrorCode::UnknownPrompt => 1,
            ErrorCode::BackendFailure => 2,
            ErrorCode::ProtocolViolation => 3,
            ErrorCode::Cancelled => 4,
            ErrorCode::Other(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextCommand {
    pub prompt: String,
    pub cfg_scale: f32,
    pub num_steps: u16,
    /// 0 asks for the backend default.
    pub requested_frames: u16,
}

impl TextCommand {
    pub fn new(prompt: impl Into<String>) -> Self {
        Self {
            prompt: prompt.into(),
            cfg_scale: 2.5,
            num_steps: 10,
            requested_frames: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionChunk {
    pub motion_id: u32,
    pub start_frame: u32,
    pub fps: u8,
    pub frames: Vec<[f32; FRAME_DIM]>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WireMessage {
    TextCommand(TextCommand),
    MotionChunk(MotionChunk),
    EndOfMotion { motion_id: u32, total_frames: u32 },
    Heartbeat,
    ErrorMsg { code: ErrorCode, message: String },
    Ack,
}

impl WireMessage {
    pub fn msg_type(&self) -> MsgType {
        match self {
            Self::TextCommand(_) => MsgType::TextCommand,
            Self::MotionChunk(_) => MsgType::MotionChunk,
            Self::EndOfMotion { .. } => MsgType::EndOfMotion,
            Self::Heartbeat => MsgType::Heartbeat,
            Self::ErrorMsg { .. } => MsgType::ErrorMsg,
            Self::Ack => MsgType::Ack,
        }
    }

    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        Self::ErrorMsg {
            code,
            message: message.into(),
        }
    }
}

fn u16_len(what: &str, n: usize) -> Result<u16> {
    u16::try_from(n).map_err(|_| WireError::TooLarge(format!("{what} of {n} exceeds u16")))
}

fn encode_payload(m: &WireMessage, out: &mut Vec<u8>) -> Result<()> {
    match m {
        WireMessage::TextCommand(c) => {
            out.extend_from_slice(&u16_len("prompt", c.prompt.len())?.to_le_bytes());
            out.extend_from_slice(c.prompt.as_bytes());
            out.extend_from_slice(&c.cfg_scale.to_le_bytes());
            out.extend_from_slice(&c.num_steps.to_le_bytes());
            out.extend_from_slice(&c.requested_frames.to_le_bytes());
        }
        WireMessage::MotionChunk(c) => {
            out.extend_from_slice(&c.motion_id.to_le_bytes());
            out.extend_from_slice(&c.start_frame.to_le_bytes());
            out.extend_from_slice(&u16_len("frame count", c.frames.len())?.to_le_bytes());
            out.push(c.fps);
            for frame in &c.frames {
                for v in frame {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        WireMessage::EndOfMotion {
            motion_id,
            total_frames,
        } => {
            out.extend_from_slice(&motion_id.to_le_bytes());
            out.extend_from_slice(&total_frames.to_le_bytes());
        }
        WireMessage::ErrorMsg { code, message } => {
            out.extend_from_slice(&u16::from(*code).to_le_bytes());
            out.extend_from_slice(&u16_len("error text", message.len())?.to_le_bytes());
            out.extend_from_slice(message.as_bytes());
        }
        WireMessage::Heartbeat | WireMessage::Ack => {}
    }
    Ok(())
}

pub fn encode_message(m: &WireMessage) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(m.msg_type() as u8);
    out.extend_from_slice(&[0; 4]);
    encode_payload(m, &mut out)?;
    let len = out.len() - HEADER_LEN;
    if len > MAX_PAYLOAD {
        return Err(WireError::TooLarge(format!("payload of {len} bytes")));
    }
    out[6..10].copy_from_slice(&(len as u32).to_le_bytes());
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(WireError::Malformed(format!("{what} runs past the payload end")));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn utf8(&mut self, n: usize, what: &str) -> Result<String> {
        let bytes = self.take(n, what)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| WireError::Malformed(format!("{what} is not UTF-8")))
    }

    fn finish(&self) -> Result<()> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            extra => Err(WireError::Malformed(format!("{extra} unused payload bytes"))),
        }
    }
}

fn decode_payload(ty: MsgType, payload: &[u8]) -> Result<WireMessage> {
    let mut r = Reader { buf: payload, pos: 0 };
    let msg = match ty {
        MsgType::TextCommand => {
            let n = r.u16("prompt length")? as usize;
            WireMessage::TextCommand(TextCommand {
                prompt: r.utf8(n, "prompt")?,
                cfg_scale: r.f32("cfg_scale")?,
                num_steps: r.u16("num_steps")?,
                requested_frames: r.u16("requested_frames")?,
            })
        }
        MsgType::MotionChunk => {
            let motion_id = r.u32("motion_id")?;
            let start_frame = r.u32("start_frame")?;
            let count = r.u16("frame_count")? as usize;
            let fps = r.u8("fps")?;
            let data = r.take(count * FRAME_BYTES, "frame data")?;
            let frames = data
                .chunks_exact(FRAME_BYTES)
                .map(|f| {
                    let mut row = [0f32; FRAME_DIM];
                    for (v, b) in row.iter_mut().zip(f.chunks_exact(4)) {
                        *v = f32::from_le_bytes(b.try_into().unwrap());
                    }
                    row
                })
                .collect();
            WireMessage::MotionChunk(MotionChunk {
                motion_id,
                start_frame,
                fps,
                frames,
            })
        }
        MsgType::EndOfMotion => WireMessage::EndOfMotion {
            motion_id: r.u32("motion_id")?,
            total_frames: r.u32("total_frames")?,
        },
        MsgType::ErrorMsg => {
            let code = ErrorCode::from(r.u16("error code")?);
            let n = r.u16("message length")? as usize;
            WireMessage::ErrorMsg {
                code,
                message: r.utf8(n, "error text")?,
            }
        }
        MsgType::Heartbeat => WireMessage::Heartbeat,
        MsgType::Ack => WireMessage::Ack,
    };
    r.finish()?;
    Ok(msg)
}

/// Validates the header and returns `(type, payload_len)`.
fn parse_header(buf: &[u8]) -> Result<(MsgType, usize)> {
    let magic: [u8; 4] = buf[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(WireError::BadMagic(magic));
    }
    if buf[4] != VERSION {
        return Err(WireError::BadVersion(buf[4]));
    }
    let ty = MsgType::try_from(buf[5])?;
    let len = u32::from_le_bytes(buf[6..10].try_into().unwrap()) as usize;
    if len > MAX_PAYLOAD {
        return Err(WireError::TooLarge(format!("declared payload of {len} bytes")));
    }
    Ok((ty, len))
}

/// Decodes the first message of `buf`, returning it with its encoded size.
/// `Ok(None)` means more bytes are needed. Header errors are reported as
/// soon as the bytes that reveal them are available.
pub fn decode_prefix(buf: &[u8]) -> Result<Option<(WireMessage, usize)>> {
    let avail = buf.len().min(4);
    if buf[..avail] != MAGIC[..avail] {
        let mut magic = [0u8; 4];
        magic[..avail].copy_from_slice(&buf[..avail]);
        return Err(WireError::BadMagic(magic));
    }
    if buf.len() < HEADER_LEN {
        return Ok(None);
    }
    let (ty, len) = parse_header(buf)?;
    let total = HEADER_LEN + len;
    if buf.len() < total {
        return Ok(None);
    }
    Ok(Some((decode_payload(ty, &buf[HEADER_LEN..total])?, total)))
}

/// Decodes exactly one message occupying all of `buf`.
pub fn decode_message(buf: &[u8]) -> Result<WireMessage> {
    if buf.len() < HEADER_LEN {
        if buf.len() >= 4 && buf[..4] != MAGIC {
            return Err(WireError::BadMagic(buf[..4].try_into().unwrap()));
        }
        return Err(WireError::Truncated {
            needed: HEADER_LEN,
            available: buf.len(),
        });
    }
    let (ty, len) = parse_header(buf)?;
    let total = HEADER_LEN + len;
    if buf.len() < total {
        return Err(WireError::Truncated {
            needed: total,
            available: buf.len(),
        });
    }
    if buf.len() > total {
        return Err(WireError::TrailingBytes(buf.len() - total));
    }
    decode_payload(ty, &buf[HEADER_LEN..])
}
