use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use flora_core::config::{parse_entries, Entry, PipelineConfig};
use flora_core::diagnose::{annotate, inspect, report_to_json, QualityReport, Verdict};
use flora_core::footprint::Shape;
use flora_core::pilot::mission::{run_mission_with_frames, MissionSettings};
use flora_core::pilot::{RobotState, World};
use flora_core::raster::{decode_image, encode_image, ImageFormat, RasterImage};
use flora_core::wire::{self, ClientError, ServeConfig};

/// Environment variable naming a config file, used when `--config` is absent.
const CONFIG_ENV: &str = "FLORA_CONFIG";

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NOINPUT: u8 = 66;
const EXIT_UNAVAILABLE: u8 = 69;
const EXIT_IOERR: u8 = 74;
const EXIT_PROTOCOL: u8 = 76;

#[derive(Parser)]
#[command(name = "flora", version, about = "Flower quality inspection and robot simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect one image and print its verdict.
    Inspect(InspectArgs),
    /// Inspect every PNG/PPM in a directory and write a CSV summary.
    Batch(BatchArgs),
    /// Run a closed-loop mission in a simulated world.
    Simulate(SimulateArgs),
    /// Serve inspection requests over TCP.
    Serve(ServeArgs),
    /// Send one image to a server and print the reply.
    Send(SendArgs),
}

#[derive(Args)]
struct PipelineFlags {
    /// Config file (`key = value` lines); overrides $FLORA_CONFIG.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Mean-filter mask, e.g. `circular:5` or `rect:5x5`.
    #[arg(long, value_name = "SHAPE")]
    mask: Option<Shape>,
    /// Integer downscale factor applied before filtering.
    #[arg(long, value_name = "N")]
    factor: Option<usize>,
}

#[derive(Args)]
struct InspectArgs {
    image: PathBuf,
    #[command(flatten)]
    pipeline: PipelineFlags,
    /// Write the JSON report here.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Write an annotated PNG here.
    #[arg(long, value_name = "FILE")]
    annotate: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    dir: PathBuf,
    #[command(flatten)]
    pipeline: PipelineFlags,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// World file (`flower = x,y,radius,r,g,b` lines).
    #[arg(long, value_name = "FILE")]
    world: Option<PathBuf>,
    /// Seed for a generated single-flower world (used without --world).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum number of control steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Write the mission log CSV here.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Dump one annotated PNG per step into this directory.
    #[arg(long, value_name = "DIR")]
    frames: Option<PathBuf>,
    /// Config file with pipeline and `pilot.*` keys.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 7878)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[command(flatten)]
    pipeline: PipelineFlags,
}

#[derive(Args)]
struct SendArgs {
    /// Server address, `host:port`.
    #[arg(long, value_name = "HOST:PORT")]
    connect: String,
    image: PathBuf,
}

/// A failure that ends the command with a specific exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(EXIT_NOINPUT, format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::new(EXIT_IOERR, format!("cannot write {}: {e}", path.display())))
}

fn config_entries(explicit: Option<&Path>) -> Result<Vec<Entry>, Failure> {
    let path = explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    let text = String::from_utf8(read_file(&path)?)
        .map_err(|_| Failure::new(EXIT_DATA, format!("{} is not UTF-8", path.display())))?;
    parse_entries(&text).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

/// Compiled-in defaults, then the config file, then flags.
fn pipeline_config(flags: &PipelineFlags) -> Result<PipelineConfig, Failure> {
    let mut cfg = PipelineConfig::default();
    let entries = config_entries(flags.config.as_deref())?;
    cfg.apply_entries(&entries)
        .map_err(|e| Failure::new(EXIT_DATA, format!("config: {e}")))?;
    if let Some(mask) = flags.mask {
        cfg.mask = mask;
    }
    if let Some(f) = flags.factor {
        cfg.resize_factor = f;
    }
    cfg.validate()
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    Ok(cfg)
}

fn load_image(path: &Path) -> Result<RasterImage, Failure> {
    decode_image(&read_file(path)?)
        .map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::ExportGrade => 0,
        Verdict::Reject => 1,
        Verdict::NoFlower => 2,
    }
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn summary(name: &str, r: &QualityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "image: {name}");
    let _ = writeln!(out, "size: {}x{}", r.source.width, r.source.height);
    let _ = writeln!(out, "verdict: {}", r.verdict);
    if let Some(b) = &r.blob {
        let _ = writeln!(out, "area: {}", b.area);
        let _ = writeln!(out, "perimeter: {}", b.perimeter);
        let _ = writeln!(out, "centroid: ({:.3}, {:.3})", b.centroid[0], b.centroid[1]);
        let _ = writeln!(
            out,
            "bbox: ({}, {})-({}, {})",
            b.bbox.min_x, b.bbox.min_y, b.bbox.max_x, b.bbox.max_y
        );
    }
    let _ = writeln!(out, "area_fraction: {:.6}", r.area_fraction);
    let _ = writeln!(out, "uniformity: {:.6}", r.uniformity);
    let _ = writeln!(out, "defect_ratio: {:.6}", r.defect_ratio);
    out
}

fn cmd_inspect(args: InspectArgs) -> CmdResult {
    let cfg = pipeline_config(&args.pipeline)?;
    let img = load_image(&args.image)?;
    let report = inspect(&img, &cfg).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    print!("{}", summary(&display_name(&args.image), &report));
    if let Some(path) = &args.json {
        let mut json = report_to_json(&report);
        json.push(b'\n');
        write_file(path, &json)?;
    }
    if let Some(path) = &args.annotate {
        let out = annotate(&img, &report).expect("report built from this image");
        write_file(path, &encode_image(&out, ImageFormat::Png))?;
    }
    Ok(verdict_code(report.verdict))
}

fn is_image_file(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png") || e.eq_ignore_ascii_case("ppm"))
}

const BATCH_HEADER: &str = "filename,verdict,area,perimeter,centroid_x,centroid_y,uniformity,defect_ratio";

fn batch_row(name: &str, outcome: &Result<QualityReport, String>) -> String {
    match outcome {
        Err(_) => format!("{name},error,,,,,,"),
        Ok(r) => match &r.blob {
            Some(b) => format!(
                "{name},{},{},{},{:.3},{:.3},{:.6},{:.6}",
                r.verdict, b.area, b.perimeter, b.centroid[0], b.centroid[1], r.uniformity, r.defect_ratio
            ),
            None => format!("{name},{},,,,,,", r.verdict),
        },
    }
}

fn cmd_batch(args: BatchArgs) -> CmdResult {
    let cfg = pipeline_config(&args.pipeline)?;
    let dir = fs::read_dir(&args.dir)
        .map_err(|e| Failure::new(EXIT_NOINPUT, format!("cannot read {}: {e}", args.dir.display())))?;
    let mut files: Vec<PathBuf> = dir
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_image_file(p))
        .collect();
    files.sort_by_key(|p| display_name(p));

    let outcomes: Vec<(String, Result<QualityReport, String>)> = files
        .par_iter()
        .map(|p| {
            let outcome = fs::read(p)
                .map_err(|e| e.to_string())
                .and_then(|b| decode_image(&b).map_err(|e| e.to_string()))
                .and_then(|img| inspect(&img, &cfg).map_err(|e| e.to_string()));
            (display_name(p), outcome)
        })
        .collect();

    let mut csv = format!("{BATCH_HEADER}\n");
    let mut all_export = true;
    for (name, outcome) in &outcomes {
        csv += &batch_row(name, outcome);
        csv.push('\n');
        match outcome {
            Ok(r) => all_export &= r.verdict == Verdict::ExportGrade,
            Err(e) => {
                all_export = false;
                eprintln!("{name}: {e}");
            }
        }
    }
    match &args.csv {
        Some(path) => {
            write_file(path, csv.as_bytes())?;
            for (name, outcome) in &outcomes {
                let v = outcome.as_ref().map_or("error", |r| r.verdict.as_str());
                println!("{name}: {v}");
            }
            println!("{} file(s) inspected", outcomes.len());
        }
        None => print!("{csv}"),
    }
    Ok(if all_export { 0 } else { 1 })
}

/// Three decimals without a sign on values that round to zero.
fn fixed3(v: f64) -> String {
    let s = format!("{v:.3}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn cmd_simulate(args: SimulateArgs) -> CmdResult {
    let mut settings = MissionSettings::default();
    let entries = config_entries(args.config.as_deref())?;
    settings
        .apply_entries(&entries)
        .map_err(|e| Failure::new(EXIT_DATA, format!("config: {e}")))?;
    if let Some(n) = args.steps {
        settings.limits.max_steps = n;
    }
    let world = match &args.world {
        Some(path) => {
            let text = String::from_utf8(read_file(path)?)
                .map_err(|_| Failure::new(EXIT_DATA, format!("{} is not UTF-8", path.display())))?;
            World::parse(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?
        }
        None => World::seeded(args.seed, &settings.camera),
    };
    let start = world.start.unwrap_or_else(RobotState::origin);

    if let Some(dir) = &args.frames {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::new(EXIT_IOERR, format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut frame_error = None;
    let log = run_mission_with_frames(&world, start, &settings, |i, frame, report| {
        let Some(dir) = &args.frames else { return };
        if frame_error.is_some() {
            return;
        }
        let out = annotate(frame, report).expect("report built from this frame");
        let path = dir.join(format!("frame_{i:04}.png"));
        if let Err(e) = fs::write(&path, encode_image(&out, ImageFormat::Png)) {
            frame_error = Some(Failure::new(EXIT_IOERR, format!("cannot write {}: {e}", path.display())));
        }
    })
    .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    if let Some(f) = frame_error {
        return Err(f);
    }

    if let Some(path) = &args.csv {
        write_file(path, log.to_csv().as_bytes())?;
    }
    let s = log.final_state;
    match log.captured_at {
        Some(n) => println!("captured at step {n}"),
        None => println!("not captured after {} steps", log.steps.len()),
    }
    println!(
        "final pose: x={} y={} heading={}",
        fixed3(s.x),
        fixed3(s.y),
        fixed3(s.heading)
    );
    if let Some(d) = world.nearest_distance(&s) {
        println!("distance to nearest flower: {}", fixed3(d));
    }
    Ok(if log.captured() { 0 } else { 1 })
}

fn cmd_serve(args: ServeArgs) -> CmdResult {
    let cfg = ServeConfig::with_pipeline(pipeline_config(&args.pipeline)?);
    let endpoint = format!("{}:{}", args.host, args.port);
    let handle = wire::spawn(endpoint.as_str(), cfg)
        .map_err(|e| Failure::new(EXIT_UNAVAILABLE, format!("cannot bind {endpoint}: {e}")))?;
    println!("listening on {}", handle.local_addr());
    loop {
        std::thread::park();
    }
}

fn cmd_send(args: SendArgs) -> CmdResult {
    let img = load_image(&args.image)?;
    let reply = wire::Client::connect(args.connect.as_str())
        .and_then(|mut c| c.send_image(&img))
        .map_err(|e| match e {
            ClientError::ConnectionFailed(_) => Failure::new(EXIT_UNAVAILABLE, e.to_string()),
            _ => Failure::new(EXIT_PROTOCOL, e.to_string()),
        })?;
    print!("{}", summary(&display_name(&args.image), &reply.report));
    println!(
        "command: v_left={:.6} v_right={:.6}",
        reply.command.v_left, reply.command.v_right
    );
    Ok(verdict_code(reply.report.verdict))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Inspect(a) => cmd_inspect(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Serve(a) => cmd_serve(a),
        Command::Send(a) => cmd_send(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("flora: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
