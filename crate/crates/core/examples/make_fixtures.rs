//! Regenerates the committed files under `fixtures/`.
//!
//! ```text
//! cargo run --example make_fixtures
//! FLORA_BLESS=1 cargo test -p flora-core --test cli   # CLI transcripts
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use flora_core::config::PipelineConfig;
use flora_core::diagnose::{annotate, inspect, report_to_json};
use flora_core::raster::{encode_image, ImageFormat, RasterImage};
use flora_core::synth::{carnation_fixture, disc_fixture, CARNATION_SEED, DISC_BACKGROUND};

fn write(path: PathBuf, bytes: &[u8]) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(&path, bytes).unwrap();
    println!("wrote {}", path.display());
}

fn golden(dir: &Path, stem: &str, img: &RasterImage) {
    let report = inspect(img, &PipelineConfig::default()).unwrap();
    let mut json = report_to_json(&report);
    json.push(b'\n');
    write(dir.join(format!("{stem}.report.json")), &json);
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");

    let disc = disc_fixture();
    let disc_png = encode_image(&disc, ImageFormat::Png);
    write(dir.join("disc_640x480.png"), &disc_png);
    golden(&dir, "disc_640x480", &disc);
    let report = inspect(&disc, &PipelineConfig::default()).unwrap();
    write(
        dir.join("disc_640x480.annotated.png"),
        &encode_image(&annotate(&disc, &report).unwrap(), ImageFormat::Png),
    );

    let carnation = carnation_fixture(CARNATION_SEED);
    write(dir.join("carnation_399x515.png"), &encode_image(&carnation, ImageFormat::Png));
    golden(&dir, "carnation_399x515", &carnation);

    let black = RasterImage::filled(64, 48, DISC_BACKGROUND).unwrap();
    let black_png = encode_image(&black, ImageFormat::Png);
    write(dir.join("black_64x48.png"), &black_png);

    // batch input: names chosen so the listing order is not the sort order
    write(dir.join("batch/b_disc.png"), &disc_png);
    write(dir.join("batch/a_black.ppm"), &encode_image(&black, ImageFormat::Ppm));
    write(dir.join("batch/c_broken.png"), b"\x89PNG\r\n\x1a\nnot really");
    write(dir.join("batch/notes.txt"), b"ignored: not an image\n");

    write(
        dir.join("worlds/ahead.world"),
        b"# one flower 2 m straight ahead of the start pose\nflower = 2.0, 0.0, 0.05, 180, 20, 20\n",
    );
    write(dir.join("worlds/empty.world"), b"# nothing to find\n");
}
