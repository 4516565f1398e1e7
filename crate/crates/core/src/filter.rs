//! Equal-weight mean (average low-pass) filtering over circular or
//! rectangular masks, with replicate-border handling and integer arithmetic.

use rayon::prelude::*;

use crate::footprint::{Footprint, FootprintError, Shape};
use crate::raster::{div_round, RasterImage};

/// Mean-filter mask. Every active cell carries weight one.
pub type Kernel = Footprint;

/// `Circular(r)` activates `dx² + dy² <= r²` on a `(2r+1)²` grid; `Rect(w, h)`
/// activates every cell and requires odd sides.
pub fn make_kernel(shape: Shape) -> Result<Kernel, FootprintError> {
    Footprint::from_shape(shape)
}

/// Replaces each channel value by the rounded mean over the kernel's active
/// cells. Samples outside the image take the value of the nearest edge pixel.
pub fn mean_filter(img: &RasterImage, kernel: &Kernel) -> RasterImage {
    let w = img.width();
    let h = img.height();
    let rx = kernel.radius_x();
    let padded = w + 2 * rx;
    let runs = kernel.runs();
    let count = kernel.active_count() as u64;

    // Per source row, prefix sums over the horizontally replicate-padded row.
    // Entry k holds the sum of padded columns [0, k).
    let prefix: Vec<Vec<[u32; 3]>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let row = img.row(y);
            let mut acc = [0u32; 3];
            let mut out = Vec::with_capacity(padded + 1);
            out.push(acc);
            for px in 0..padded {
                let sx = px.saturating_sub(rx).min(w - 1);
                for c in 0..3 {
                    acc[c] += row[sx * 3 + c] as u32;
                }
                out.push(acc);
            }
            out
        })
        .collect();

    let rows: Vec<Vec<u8>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut out = Vec::with_capacity(w * 3);
            for x in 0..w {
                let mut sum = [0u64; 3];
                for run in &runs {
                    let sy = (y as isize + run.dy).clamp(0, h as isize - 1) as usize;
                    let pre = &prefix[sy];
                    // padded column of source column x + dx is x + dx + rx
                    let a = (x as isize + run.dx_start + rx as isize) as usize;
                    let b = (x as isize + run.dx_end + rx as isize) as usize + 1;
                    for c in 0..3 {
                        sum[c] += (pre[b][c] - pre[a][c]) as u64;
                    }
                }
                out.extend(sum.iter().map(|&s| div_round(s, count) as u8));
            }
            out
        })
        .collect();

    RasterImage::from_raw(w, h, rows.concat()).expect("dimensions preserved")
}
