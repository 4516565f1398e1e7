//! Deterministic synthetic test scenes.
//!
//! The committed fixtures under `fixtures/` are produced by these functions
//! (see `examples/make_fixtures.rs`).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::{RasterImage, Rgb};

pub const DISC_BACKGROUND: Rgb = [20, 20, 20];
pub const DISC_RED: Rgb = [180, 20, 20];

/// Filled disc with integer centre: pixel `(x, y)` is inside when
/// `(x - cx)² + (y - cy)² <= r²`.
pub fn disc_image(width: usize, height: usize, cx: i64, cy: i64, radius: i64, fg: Rgb, bg: Rgb) -> RasterImage {
    RasterImage::from_fn(width, height, |x, y| {
        let (dx, dy) = (x as i64 - cx, y as i64 - cy);
        if dx * dx + dy * dy <= radius * radius {
            fg
        } else {
            bg
        }
    })
    .expect("non-zero dimensions")
}

/// Red disc of radius 50 centred in a 640x480 frame.
pub fn disc_fixture() -> RasterImage {
    disc_image(640, 480, 320, 240, 50, DISC_RED, DISC_BACKGROUND)
}

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// A 399x515 photo-like carnation: ruffled red head with petal shading, a few
/// dark spots, a stem with two leaves, and sensor noise on a pale backdrop.
pub fn carnation_fixture(seed: u64) -> RasterImage {
    const W: usize = 399;
    const H: usize = 515;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (hx, hy) = (201.0, 178.0);
    let head_r = 118.0;
    let ruffle: Vec<(f64, f64, f64)> = (0..9)
        .map(|k| {
            let freq = (7 + 2 * k) as f64;
            (freq, rng.gen_range(0.01..0.045), rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    let spots: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            let a = rng.gen_range(0.0..2.0 * PI);
            let d = rng.gen_range(10.0..75.0);
            (hx + d * a.cos(), hy + d * a.sin(), rng.gen_range(2.5..5.5))
        })
        .collect();

    let stem_x = |y: f64| 199.0 + 6.0 * ((y - 280.0) / 90.0).sin();
    let leaves = [(150.0, 390.0, 52.0, 13.0, 0.55), (252.0, 430.0, 48.0, 12.0, -0.5)];

    let mut img = RasterImage::from_fn(W, H, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        // backdrop: vertical gradient
        let t = yf / H as f64;
        let mut c = [232.0 - 25.0 * t, 228.0 - 22.0 * t, 214.0 - 18.0 * t];

        // stem
        if yf > hy + 60.0 && (xf - stem_x(yf)).abs() <= 4.5 {
            let edge = (xf - stem_x(yf)).abs() / 4.5;
            c = [54.0 + 20.0 * edge, 118.0 - 25.0 * edge, 48.0];
        }
        // leaves as rotated ellipses
        for &(lx, ly, a, b, rot) in &leaves {
            let (dx, dy) = (xf - lx, yf - ly);
            let (u, v) = (dx * f64::cos(rot) + dy * f64::sin(rot), -dx * f64::sin(rot) + dy * f64::cos(rot));
            let q = (u / a).powi(2) + (v / b).powi(2);
            if q <= 1.0 {
                c = [62.0 + 30.0 * q, 132.0 - 30.0 * q, 58.0];
            }
        }

        // flower head with ruffled outline
        let (dx, dy) = (xf - hx, yf - hy);
        let dist = dx.hypot(dy);
        let theta = dy.atan2(dx);
        let edge: f64 = head_r
            * (1.0 + ruffle.iter().map(|&(f, amp, ph)| amp * (f * theta + ph).sin()).sum::<f64>());
        if dist <= edge {
            let rho = dist / edge;
            // concentric petal rings darken toward petal bases
            let rings = 0.5 + 0.5 * (rho * 5.0 * PI + 0.7 * (6.0 * theta).sin()).cos();
            let fold = (13.0 * theta + 4.0 * rho).sin().abs();
            let shade = 0.78 + 0.14 * rings + 0.08 * fold - 0.12 * rho * rho;
            c = [214.0 * shade, 22.0 + 14.0 * (1.0 - shade), 34.0 + 10.0 * (1.0 - shade)];
            for &(sx, sy, sr) in &spots {
                if (xf - sx).hypot(yf - sy) <= sr {
                    c = [70.0, 38.0, 30.0];
                }
            }
        }
        [clamp_u8(c[0]), clamp_u8(c[1]), clamp_u8(c[2])]
    })
    .expect("fixed dimensions");

    // sensor noise
    for y in 0..H {
        for x in 0..W {
            let p = img.get(x, y);
            let n: i16 = rng.gen_range(-9..=9);
            let q = p.map(|v| (v as i16 + n + rng.gen_range(-3..=3)).clamp(0, 255) as u8);
            img.put(x, y, q);
        }
    }
    img
}

pub const CARNATION_SEED: u64 = 399_515;
