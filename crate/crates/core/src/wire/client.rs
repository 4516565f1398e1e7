use std::io::{self, BufReader, BufWriter};
use std::net::{TcpStream, ToSocketAddrs};

use thiserror::Error;

use crate::diagnose::{report_from_json, MalformedReport, QualityReport};
use crate::pilot::control::MotionCommand;
use crate::raster::{encode_image, ImageFormat, RasterImage};

use super::frame::{read_frame_or_eof, write_frame, Frame, FrameError, MsgType};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("connection failed: {0}")]
    ConnectionFailed(#[source] io::Error),
    /// Unexpected frame order, or an ERROR frame from the server carrying its
    /// message verbatim.
    #[error("protocol error: {0}")]
    ProtocolError(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Report(#[from] MalformedReport),
}

/// Server answer to one IMAGE frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    /// REPORT payload as received.
    pub report_json: Vec<u8>,
    pub report: QualityReport,
    pub command: MotionCommand,
}

pub struct Client {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl Client {
    /// Connects and performs the HELLO handshake.
    pub fn connect(endpoint: impl ToSocketAddrs) -> Result<Self, ClientError> {
        let stream = TcpStream::connect(endpoint).map_err(ClientError::ConnectionFailed)?;
        stream.set_nodelay(true).ok();
        let reader = BufReader::new(stream.try_clone().map_err(ClientError::ConnectionFailed)?);
        let mut client = Self {
            reader,
            writer: BufWriter::new(stream),
        };
        client.send(&Frame::hello())?;
        client.expect(MsgType::Hello)?;
        Ok(client)
    }

    fn send(&mut self, f: &Frame) -> Result<(), ClientError> {
        write_frame(&mut self.writer, f).map_err(|e| ClientError::Frame(e.into()))
    }

    fn expect(&mut self, want: MsgType) -> Result<Frame, ClientError> {
        match read_frame_or_eof(&mut self.reader)? {
            None => Err(ClientError::ProtocolError(format!(
                "connection closed while waiting for {want:?}"
            ))),
            Some(f) if f.msg_type == want => Ok(f),
            Some(f) if f.msg_type == MsgType::Error => Err(ClientError::ProtocolError(
                String::from_utf8_lossy(&f.payload).into_owned(),
            )),
            Some(f) => Err(ClientError::ProtocolError(format!(
                "expected {want:?}, got {:?}",
                f.msg_type
            ))),
        }
    }

    /// Sends an already-encoded image payload.
    pub fn send_encoded(&mut self, payload: Vec<u8>) -> Result<Reply, ClientError> {
        self.send(&Frame::new(MsgType::Image, payload))?;
        let report_json = self.expect(MsgType::Report)?.payload;
        let report = report_from_json(&report_json)?;
        let cmd = self.expect(MsgType::Cmd)?;
        let command = MotionCommand::from_be_bytes(&cmd.payload).ok_or_else(|| {
            ClientError::ProtocolError(format!("CMD payload has {} bytes, expected 16", cmd.payload.len()))
        })?;
        Ok(Reply {
            report_json,
            report,
            command,
        })
    }

    pub fn send_image(&mut self, img: &RasterImage) -> Result<Reply, ClientError> {
        self.send_encoded(encode_image(img, ImageFormat::Png))
    }
}

/// Handshake, one IMAGE (sent as PNG), and the decoded REPORT and CMD.
pub fn send_image(endpoint: impl ToSocketAddrs, img: &RasterImage) -> Result<(QualityReport, MotionCommand), ClientError> {
    let reply = Client::connect(endpoint)?.send_image(img)?;
    Ok((reply.report, reply.command))
}
