//! Frame layout (big-endian):
//!
//! ```text
//! offset  size  field
//!      0     4  magic "FLRV"
//!      4     1  version (1)
//!      5     1  message type
//!      6     4  payload length, u32
//!     10     n  payload
//! ```

use std::io::{self, Read, Write};

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"FLRV";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
pub const MAX_PAYLOAD: u32 = 16 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MsgType {
    Hello = 1,
    Image = 2,
    Report = 3,
    Cmd = 4,
    Error = 5,
}

impl MsgType {
    pub fn from_u8(b: u8) -> Option<Self> {
        Some(match b {
            1 => MsgType::Hello,
            2 => MsgType::Image,
            3 => MsgType::Report,
            4 => MsgType::Cmd,
            5 => MsgType::Error,
            _ => return None,
        })
    }
}

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported protocol version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown message type {0}")]
    UnknownType(u8),
    #[error("payload of {0} bytes exceeds the 16 MiB limit")]
    Oversize(u32),
    #[error("stream ended inside a frame")]
    Truncated,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub msg_type: MsgType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(msg_type: MsgType, payload: impl Into<Vec<u8>>) -> Self {
        Self {
            msg_type,
            payload: payload.into(),
        }
    }

    pub fn hello() -> Self {
        Self::new(MsgType::Hello, Vec::new())
    }

    pub fn error(message: &str) -> Self {
        Self::new(MsgType::Error, message.as_bytes())
    }
}

/// Panics if the payload exceeds [`MAX_PAYLOAD`].
pub fn encode_frame(f: &Frame) -> Vec<u8> {
    let len = u32::try_from(f.payload.len())
        .ok()
        .filter(|&n| n <= MAX_PAYLOAD)
        .expect("frame payload exceeds 16 MiB");
    let mut out = Vec::with_capacity(HEADER_LEN + f.payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(f.msg_type as u8);
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(&f.payload);
    out
}

pub fn write_frame<W: Write>(w: &mut W, f: &Frame) -> io::Result<()> {
    w.write_all(&encode_frame(f))?;
    w.flush()
}

fn read_exact_or_truncated<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), FrameError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => FrameError::Truncated,
        _ => FrameError::Io(e),
    })
}

/// Validates a 10-byte header and returns the message type and payload length.
pub fn parse_header(h: &[u8; HEADER_LEN]) -> Result<(MsgType, u32), FrameError> {
    let magic: [u8; 4] = h[..4].try_into().expect("4 bytes");
    if magic != MAGIC {
        return Err(FrameError::BadMagic(magic));
    }
    if h[4] != VERSION {
        return Err(FrameError::UnsupportedVersion(h[4]));
    }
    let msg_type = MsgType::from_u8(h[5]).ok_or(FrameError::UnknownType(h[5]))?;
    let len = u32::from_be_bytes(h[6..10].try_into().expect("4 bytes"));
    if len > MAX_PAYLOAD {
        return Err(FrameError::Oversize(len));
    }
    Ok((msg_type, len))
}

/// Reads exactly one frame (`10 + length` bytes) from the stream.
pub fn decode_frame<R: Read>(r: &mut R) -> Result<Frame, FrameError> {
    let mut header = [0u8; HEADER_LEN];
    read_exact_or_truncated(r, &mut header)?;
    let (msg_type, len) = parse_header(&header)?;
    let mut payload = vec![0u8; len as usize];
    read_exact_or_truncated(r, &mut payload)?;
    Ok(Frame { msg_type, payload })
}

/// Reads one frame, or `None` on a clean end of stream before any header byte.
pub fn read_frame_or_eof<R: Read>(r: &mut R) -> Result<Option<Frame>, FrameError> {
    let mut first = [0u8; 1];
    loop {
        match r.read(&mut first) {
            Ok(0) => return Ok(None),
            Ok(_) => break,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let mut chained = (&first[..]).chain(r);
    decode_frame(&mut chained).map(Some)
}
