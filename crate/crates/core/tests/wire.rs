use std::io::{Cursor, Write};
use std::net::TcpStream;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flora_core::config::PipelineConfig;
use flora_core::diagnose::{inspect, report_to_json, Verdict};
use flora_core::pilot::MotionCommand;
use flora_core::raster::{encode_image, ImageFormat, RasterImage};
use flora_core::synth::{disc_fixture, disc_image, DISC_BACKGROUND, DISC_RED};
use flora_core::wire::frame::{read_frame_or_eof, write_frame};
use flora_core::wire::{decode_frame, encode_frame, send_image, spawn, Client, ClientError, Frame, MsgType, ServeConfig};

const TYPES: [MsgType; 5] = [MsgType::Hello, MsgType::Image, MsgType::Report, MsgType::Cmd, MsgType::Error];

#[test]
fn codec_round_trip_random_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let mut stream = Vec::new();
    let mut frames = Vec::new();
    for _ in 0..200 {
        let len = if rng.gen_bool(0.1) { rng.gen_range(0..70_000) } else { rng.gen_range(0..64) };
        let payload: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let f = Frame::new(TYPES[rng.gen_range(0..5)], payload);
        let bytes = encode_frame(&f);
        assert_eq!(bytes.len(), 10 + f.payload.len());
        assert_eq!(decode_frame(&mut Cursor::new(&bytes)).unwrap(), f);
        stream.extend_from_slice(&bytes);
        frames.push(f);
    }
    let mut cur = Cursor::new(stream);
    for f in &frames {
        assert_eq!(&decode_frame(&mut cur).unwrap(), f);
    }
    assert!(read_frame_or_eof(&mut cur).unwrap().is_none());
}

#[test]
fn hello_encoding_is_bit_exact() {
    assert_eq!(encode_frame(&Frame::hello()), b"FLRV\x01\x01\x00\x00\x00\x00");
}

fn random_scene(rng: &mut ChaCha8Rng) -> RasterImage {
    let (w, h) = (rng.gen_range(40..160), rng.gen_range(40..160));
    let r = rng.gen_range(0..w.min(h) as i64 / 2);
    let cx = rng.gen_range(0..w as i64);
    let cy = rng.gen_range(0..h as i64);
    let mut img = disc_image(w, h, cx, cy, r, DISC_RED, DISC_BACKGROUND);
    for _ in 0..(w * h / 20) {
        let (x, y) = (rng.gen_range(0..w), rng.gen_range(0..h));
        img.put(x, y, rng.gen());
    }
    img
}

#[test]
fn server_reports_match_local_inspection() {
    let server = spawn("127.0.0.1:0", ServeConfig::default()).unwrap();
    let mut client = Client::connect(server.local_addr()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(82);
    let cfg = PipelineConfig::default();
    let mut verdicts = std::collections::HashSet::new();
    for _ in 0..20 {
        let img = random_scene(&mut rng);
        let reply = client.send_image(&img).unwrap();
        let local = inspect(&img, &cfg).unwrap();
        assert_eq!(reply.report_json, report_to_json(&local));
        assert_eq!(reply.report, local);
        if local.verdict == Verdict::NoFlower {
            assert_eq!(reply.command, MotionCommand::STOP);
        }
        verdicts.insert(local.verdict);
    }
    assert!(verdicts.len() >= 2, "scenes should not all share one verdict");
    server.shutdown();
}

#[test]
fn centred_disc_drives_straight() {
    let server = spawn("127.0.0.1:0", ServeConfig::default()).unwrap();
    let (report, cmd) = send_image(server.local_addr(), &disc_fixture()).unwrap();
    assert_eq!(report.verdict, Verdict::ExportGrade);
    assert_eq!(cmd.v_left, cmd.v_right);
    assert!(cmd.v_left > 0.0);
}

fn raw_connect(addr: std::net::SocketAddr) -> TcpStream {
    let s = TcpStream::connect(addr).unwrap();
    s.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    s
}

#[test]
fn malformed_first_frame_is_isolated() {
    let server = spawn("127.0.0.1:0", ServeConfig::default()).unwrap();
    let mut healthy = Client::connect(server.local_addr()).unwrap();

    let mut bad = raw_connect(server.local_addr());
    bad.write_all(b"GET / HTTP/1.1\r\n\r\n").unwrap();
    let reply = read_frame_or_eof(&mut bad).unwrap().unwrap();
    assert_eq!(reply.msg_type, MsgType::Error);
    assert!(read_frame_or_eof(&mut bad).unwrap().is_none(), "server should close");

    let reply = healthy.send_image(&disc_fixture()).unwrap();
    assert_eq!(reply.report.verdict, Verdict::ExportGrade);
}

#[test]
fn image_before_hello_is_refused() {
    let server = spawn("127.0.0.1:0", ServeConfig::default()).unwrap();
    let mut s = raw_connect(server.local_addr());
    let png = encode_image(&disc_fixture(), ImageFormat::Png);
    write_frame(&mut s, &Frame::new(MsgType::Image, png)).unwrap();
    let reply = read_frame_or_eof(&mut s).unwrap().unwrap();
    assert_eq!(reply.msg_type, MsgType::Error);
    assert!(String::from_utf8_lossy(&reply.payload).contains("HELLO"));
}

#[test]
fn undecodable_image_surfaces_as_protocol_error() {
    let server = spawn("127.0.0.1:0", ServeConfig::default()).unwrap();
    let mut client = Client::connect(server.local_addr()).unwrap();
    match client.send_encoded(b"not an image".to_vec()) {
        Err(ClientError::ProtocolError(msg)) => assert!(msg.contains("decode"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn connection_refused() {
    // bind then drop to find a port with nothing listening
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let img = RasterImage::filled(4, 4, DISC_RED).unwrap();
    assert!(matches!(send_image(("127.0.0.1", port), &img), Err(ClientError::ConnectionFailed(_))));
}

#[test]
fn oversize_header_rejected_without_allocation() {
    let server = spawn("127.0.0.1:0", ServeConfig::default()).unwrap();
    let mut s = raw_connect(server.local_addr());
    write_frame(&mut s, &Frame::hello()).unwrap();
    assert_eq!(read_frame_or_eof(&mut s).unwrap().unwrap(), Frame::hello());
    s.write_all(b"FLRV\x01\x02\xff\xff\xff\xff").unwrap();
    let reply = read_frame_or_eof(&mut s).unwrap().unwrap();
    assert_eq!(reply.msg_type, MsgType::Error);
}
