use std::io::{self, BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use crate::config::PipelineConfig;
use crate::diagnose::{inspect, report_to_json};
use crate::pilot::camera::CameraModel;
use crate::pilot::control::{ControlParams, MotionCommand};
use crate::pilot::mission::command_for;
use crate::raster::decode_image;

use super::frame::{read_frame_or_eof, write_frame, Frame, MsgType};

/// What the server needs to answer an IMAGE frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ServeConfig {
    pub pipeline: PipelineConfig,
    pub control: ControlParams,
    /// Horizontal field of view assumed for incoming frames, radians.
    pub fov: f64,
    /// Idle read timeout per connection.
    pub read_timeout: Option<Duration>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            pipeline: PipelineConfig::default(),
            control: ControlParams::default(),
            fov: CameraModel::default().fov,
            read_timeout: Some(Duration::from_secs(60)),
        }
    }
}

impl ServeConfig {
    pub fn with_pipeline(pipeline: PipelineConfig) -> Self {
        Self {
            pipeline,
            ..Self::default()
        }
    }
}

/// Sends an ERROR frame and ends the connection.
fn fail(w: &mut BufWriter<TcpStream>, message: &str) -> io::Result<()> {
    write_frame(w, &Frame::error(message))?;
    w.get_ref().shutdown(std::net::Shutdown::Both).ok();
    Ok(())
}

/// Runs the per-connection state machine: HELLO first, then any number of
/// IMAGE frames each answered by REPORT and CMD.
pub fn handle_connection(stream: TcpStream, cfg: &ServeConfig) -> io::Result<()> {
    stream.set_read_timeout(cfg.read_timeout)?;
    stream.set_nodelay(true).ok();
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);

    match read_frame_or_eof(&mut reader) {
        Ok(None) => return Ok(()),
        Ok(Some(f)) if f.msg_type == MsgType::Hello => write_frame(&mut writer, &Frame::hello())?,
        Ok(Some(f)) => return fail(&mut writer, &format!("expected HELLO, got {:?}", f.msg_type)),
        Err(e) => return fail(&mut writer, &format!("malformed frame: {e}")),
    }

    loop {
        let frame = match read_frame_or_eof(&mut reader) {
            Ok(None) => return Ok(()),
            Ok(Some(f)) => f,
            Err(e) => return fail(&mut writer, &format!("malformed frame: {e}")),
        };
        if frame.msg_type != MsgType::Image {
            return fail(&mut writer, &format!("expected IMAGE, got {:?}", frame.msg_type));
        }
        let img = match decode_image(&frame.payload) {
            Ok(img) => img,
            Err(e) => return fail(&mut writer, &format!("cannot decode image: {e}")),
        };
        let report = match inspect(&img, &cfg.pipeline) {
            Ok(r) => r,
            Err(e) => return fail(&mut writer, &format!("inspection failed: {e}")),
        };
        let cmd = command_for(&report, cfg.fov, &cfg.control).unwrap_or(MotionCommand::STOP);
        write_frame(&mut writer, &Frame::new(MsgType::Report, report_to_json(&report)))?;
        write_frame(&mut writer, &Frame::new(MsgType::Cmd, cmd.to_be_bytes().to_vec()))?;
    }
}

fn accept_loop(listener: TcpListener, cfg: Arc<ServeConfig>, stop: Arc<AtomicBool>) {
    for conn in listener.incoming() {
        if stop.load(Ordering::SeqCst) {
            break;
        }
        let Ok(stream) = conn else { continue };
        let cfg = Arc::clone(&cfg);
        thread::spawn(move || {
            let _ = handle_connection(stream, &cfg);
        });
    }
}

/// Serves on `endpoint` until the process exits.
pub fn serve(endpoint: impl ToSocketAddrs, cfg: ServeConfig) -> io::Result<()> {
    let listener = TcpListener::bind(endpoint)?;
    accept_loop(listener, Arc::new(cfg), Arc::new(AtomicBool::new(false)));
    Ok(())
}

/// A server running on a background thread.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting connections. Connections already open run to
    /// completion.
    pub fn shutdown(mut self) {
        self.stop_inner();
    }

    fn stop_inner(&mut self) {
        if let Some(t) = self.thread.take() {
            self.stop.store(true, Ordering::SeqCst);
            // wake the blocking accept
            let _ = TcpStream::connect(self.addr);
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_inner();
    }
}

pub fn spawn(endpoint: impl ToSocketAddrs, cfg: ServeConfig) -> io::Result<ServerHandle> {
    let listener = TcpListener::bind(endpoint)?;
    let addr = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let thread = {
        let stop = Arc::clone(&stop);
        let cfg = Arc::new(cfg);
        thread::Builder::new()
            .name("flora-accept".into())
            .spawn(move || accept_loop(listener, cfg, stop))?
    };
    Ok(ServerHandle {
        addr,
        stop,
        thread: Some(thread),
    })
}
