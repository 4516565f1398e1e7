mod common;

use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{disc_lattice_count, fixtures_dir};
use flora_core::config::PipelineConfig;
use flora_core::diagnose::{annotate, inspect, report_from_json, report_to_json, Verdict};
use flora_core::filter::{make_kernel, mean_filter};
use flora_core::footprint::{Footprint, Shape};
use flora_core::raster::{decode_image, RasterImage};
use flora_core::synth::{carnation_fixture, disc_fixture, disc_image, CARNATION_SEED, DISC_BACKGROUND, DISC_RED};

fn load(name: &str) -> RasterImage {
    decode_image(&fs::read(fixtures_dir().join(name)).unwrap()).unwrap()
}

#[test]
fn disc_fixture_is_detected_at_the_centre() {
    let img = load("disc_640x480.png");
    assert_eq!(img, disc_fixture());
    let report = inspect(&img, &PipelineConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::ExportGrade);
    let blob = report.blob.as_ref().unwrap();
    let [cx, cy] = blob.centroid;
    assert!((cx - 320.0).abs() <= 1.0 && (cy - 240.0).abs() <= 1.0, "{cx} {cy}");
    let expected = disc_lattice_count(50) as f64;
    assert!((blob.area as f64 - expected).abs() / expected <= 0.02, "{} vs {expected}", blob.area);
}

#[test]
fn disc_survives_downscaling() {
    let cfg = PipelineConfig {
        resize_factor: 2,
        mask: Shape::Circular(2),
        ..PipelineConfig::default()
    };
    let report = inspect(&disc_fixture(), &cfg).unwrap();
    let blob = report.blob.unwrap();
    assert!((blob.centroid[0] - 320.0).abs() <= 1.0 && (blob.centroid[1] - 240.0).abs() <= 1.0);
    let expected = disc_lattice_count(50) as f64;
    assert!((blob.area as f64 - expected).abs() / expected <= 0.05);
}

#[test]
fn carnation_report_matches_golden() {
    let img = load("carnation_399x515.png");
    assert_eq!((img.width(), img.height()), (399, 515));
    assert_eq!(img, carnation_fixture(CARNATION_SEED));
    let golden = fs::read(fixtures_dir().join("carnation_399x515.report.json")).unwrap();
    let cfg = PipelineConfig::default();
    for _ in 0..2 {
        let mut json = report_to_json(&inspect(&img, &cfg).unwrap());
        json.push(b'\n');
        assert_eq!(String::from_utf8(json).unwrap(), String::from_utf8(golden.clone()).unwrap());
    }
}

#[test]
fn disc_report_and_annotation_match_golden() {
    let img = disc_fixture();
    let report = inspect(&img, &PipelineConfig::default()).unwrap();
    let golden = fs::read(fixtures_dir().join("disc_640x480.report.json")).unwrap();
    assert_eq!(report_from_json(&golden).unwrap(), report);
    assert_eq!(annotate(&img, &report).unwrap(), load("disc_640x480.annotated.png"));
}

#[test]
fn json_round_trip_is_exact() {
    for img in [disc_fixture(), carnation_fixture(CARNATION_SEED), load("black_64x48.png")] {
        let report = inspect(&img, &PipelineConfig::default()).unwrap();
        let json = report_to_json(&report);
        let back = report_from_json(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(report_to_json(&back), json);
    }
}

#[test]
fn verdicts_follow_thresholds() {
    let img = disc_fixture();
    assert_eq!(inspect(&load("black_64x48.png"), &PipelineConfig::default()).unwrap().verdict, Verdict::NoFlower);

    let mut too_big = PipelineConfig::default();
    too_big.thresholds.min_area_fraction = 0.001;
    too_big.thresholds.max_area_fraction = 0.01;
    assert_eq!(inspect(&img, &too_big).unwrap().verdict, Verdict::Reject);

    let mut too_small = PipelineConfig::default();
    too_small.thresholds.min_area_fraction = 0.5;
    let r = inspect(&img, &too_small).unwrap();
    assert_eq!(r.verdict, Verdict::NoFlower);
    assert!(r.area_fraction > 0.02);

    // a pale disc passes the base range but fails the strict one
    let pale = disc_image(200, 200, 100, 100, 40, [150, 95, 95], DISC_BACKGROUND);
    let r = inspect(&pale, &PipelineConfig::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Reject);
    assert!(r.uniformity < 0.85);
}

/// Direct evaluation of the replicate-border mean at one pixel.
fn naive_mean(img: &RasterImage, k: &Footprint, x: usize, y: usize) -> [u8; 3] {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut sum = [0u64; 3];
    let mut n = 0u64;
    for (dx, dy) in k.offsets() {
        let sx = (x as isize + dx).clamp(0, w - 1) as usize;
        let sy = (y as isize + dy).clamp(0, h - 1) as usize;
        let p = img.get(sx, sy);
        for c in 0..3 {
            sum[c] += p[c] as u64;
        }
        n += 1;
    }
    sum.map(|s| ((s as f64 / n as f64) + 0.5).floor() as u8)
}

#[test]
fn mean_filter_matches_naive_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for shape in [Shape::Circular(5), Shape::Circular(2), Shape::Rect(3, 5), Shape::Rect(1, 1)] {
        let k = make_kernel(shape).unwrap();
        for _ in 0..5 {
            let (w, h) = (rng.gen_range(1..30), rng.gen_range(1..30));
            let img = RasterImage::from_fn(w, h, |_, _| rng.gen()).unwrap();
            let out = mean_filter(&img, &k);
            for y in 0..h {
                for x in 0..w {
                    assert_eq!(out.get(x, y), naive_mean(&img, &k, x, y), "{shape} at ({x},{y})");
                }
            }
        }
    }
}

#[test]
fn filter_kernel_and_identity_checks() {
    let k = make_kernel(Shape::Circular(5)).unwrap();
    assert_eq!(k.active_count() as u64, disc_lattice_count(5));
    assert_eq!(k.active_count(), 81);
    let flat = RasterImage::filled(37, 23, DISC_RED).unwrap();
    assert_eq!(mean_filter(&flat, &k), flat);
    let img = carnation_fixture(CARNATION_SEED);
    assert_eq!(mean_filter(&img, &make_kernel(Shape::Rect(1, 1)).unwrap()), img);
}
