//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use flora_core::blob::{BoundingBox, Connectivity};
use flora_core::footprint::Footprint;
use flora_core::segment::BinaryMask;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn random_mask(rng: &mut ChaCha8Rng, max_side: usize) -> BinaryMask {
    let w = rng.gen_range(1..=max_side);
    let h = rng.gen_range(1..=max_side);
    let density: f64 = rng.gen_range(0.05..0.95);
    BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(density))
}

/// Odd-sized element up to 5x5 with a random pattern and an active anchor.
pub fn random_se(rng: &mut ChaCha8Rng) -> Footprint {
    let w = [1, 3, 5][rng.gen_range(0..3)];
    let h = [1, 3, 5][rng.gen_range(0..3)];
    let mut active: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.6)).collect();
    active[(h / 2) * w + w / 2] = true;
    Footprint::from_grid(w, h, active).unwrap()
}

fn se_cells(se: &Footprint) -> Vec<(isize, isize)> {
    let (rx, ry) = (se.radius_x() as isize, se.radius_y() as isize);
    let mut cells = Vec::new();
    for dy in -ry..=ry {
        for dx in -rx..=rx {
            if se.is_active(dx, dy) {
                cells.push((dx, dy));
            }
        }
    }
    cells
}

/// Erosion straight from the definition: a pixel survives when every element
/// cell that lands inside the frame lands on a set pixel.
pub fn oracle_erode(m: &BinaryMask, se: &Footprint) -> BinaryMask {
    let cells = se_cells(se);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        cells.iter().all(|&(dx, dy)| {
            m.get_signed(x as isize + dx, y as isize + dy).unwrap_or(true)
        })
    })
}

/// Dilation as a Minkowski sum: every set pixel stamps the element onto the
/// output, clipped to the frame.
pub fn oracle_dilate(m: &BinaryMask, se: &Footprint) -> BinaryMask {
    let cells = se_cells(se);
    let (w, h) = (m.width() as isize, m.height() as isize);
    let mut out = BinaryMask::new(m.width(), m.height());
    for y in 0..h {
        for x in 0..w {
            if !m.get(x as usize, y as usize) {
                continue;
            }
            for &(dx, dy) in &cells {
                let (px, py) = (x + dx, y + dy);
                if (0..w).contains(&px) && (0..h).contains(&py) {
                    out.set(px as usize, py as usize, true);
                }
            }
        }
    }
    out
}

pub fn crop(m: &BinaryMask, x0: usize, y0: usize, w: usize, h: usize) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| m.get(x + x0, y + y0))
}

#[derive(Debug, Clone)]
pub struct OracleBlob {
    pub pixels: Vec<(usize, usize)>,
    pub area: u64,
    pub perimeter: u64,
    pub centroid: [f64; 2],
    pub bbox: BoundingBox,
}

/// Breadth-first flood fill from every unvisited set pixel in scan order.
pub fn flood_fill(m: &BinaryMask, conn: Connectivity) -> Vec<OracleBlob> {
    let (w, h) = (m.width(), m.height());
    let neighbours: &[(isize, isize)] = match conn {
        Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Connectivity::Eight => &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
    };
    let mut seen = vec![false; w * h];
    let mut blobs = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            if !m.get(sx, sy) || seen[sy * w + sx] {
                continue;
            }
            seen[sy * w + sx] = true;
            let mut queue = VecDeque::from([(sx, sy)]);
            let mut pixels = Vec::new();
            while let Some((x, y)) = queue.pop_front() {
                pixels.push((x, y));
                for &(dx, dy) in neighbours {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if m.get_signed(nx, ny) == Some(true) && !seen[ny as usize * w + nx as usize] {
                        seen[ny as usize * w + nx as usize] = true;
                        queue.push_back((nx as usize, ny as usize));
                    }
                }
            }
            blobs.push(oracle_metrics(m, pixels));
        }
    }
    blobs
}

fn oracle_metrics(m: &BinaryMask, mut pixels: Vec<(usize, usize)>) -> OracleBlob {
    pixels.sort_by_key(|&(x, y)| (y, x));
    let n = pixels.len() as f64;
    let mut perimeter = 0;
    for &(x, y) in &pixels {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            if m.get_signed(x as isize + dx, y as isize + dy) != Some(true) {
                perimeter += 1;
            }
        }
    }
    let sx: f64 = pixels.iter().map(|p| p.0 as f64).sum();
    let sy: f64 = pixels.iter().map(|p| p.1 as f64).sum();
    let bbox = BoundingBox {
        min_x: pixels.iter().map(|p| p.0).min().unwrap(),
        min_y: pixels.iter().map(|p| p.1).min().unwrap(),
        max_x: pixels.iter().map(|p| p.0).max().unwrap(),
        max_y: pixels.iter().map(|p| p.1).max().unwrap(),
    };
    OracleBlob {
        area: pixels.len() as u64,
        perimeter,
        centroid: [sx / n, sy / n],
        bbox,
        pixels,
    }
}

/// Lattice points inside a circle of integer radius centred on a lattice point.
pub fn disc_lattice_count(r: i64) -> u64 {
    let mut n = 0;
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                n += 1;
            }
        }
    }
    n
}
