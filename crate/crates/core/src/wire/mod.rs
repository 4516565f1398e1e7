//! Length-prefixed TCP link between a robot (client) and the inspection host
//! (server). There is no authentication or encryption.
//!
//! A session is `HELLO -> HELLO`, then per image `IMAGE -> REPORT, CMD`. Any
//! protocol violation is answered with an `ERROR` frame (UTF-8 text) and the
//! connection is closed.

pub mod client;
pub mod frame;
pub mod server;

pub use client::{send_image, Client, ClientError, Reply};
pub use frame::{decode_frame, encode_frame, Frame, FrameError, MsgType};
pub use server::{serve, spawn, ServeConfig, ServerHandle};
