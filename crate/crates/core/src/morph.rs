//! Binary erosion, dilation, opening and closing.
//!
//! Cells of the structuring element that fall outside the image are ignored by
//! both erosion and dilation. With that convention the two operators form an
//! adjunction on masks of a fixed size, so opening is anti-extensive, closing is
//! extensive and both are idempotent right up to the frame edge.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::footprint::Footprint;
use crate::segment::BinaryMask;

pub type StructuringElement = Footprint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphOp {
    Erode,
    Dilate,
    Open,
    Close,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown morphology operation {0:?} (expected erode, dilate, open or close)")]
pub struct UnknownOp(pub String);

impl fmt::Display for MorphOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MorphOp::Erode => "erode",
            MorphOp::Dilate => "dilate",
            MorphOp::Open => "open",
            MorphOp::Close => "close",
        })
    }
}

impl FromStr for MorphOp {
    type Err = UnknownOp;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "erode" => Ok(MorphOp::Erode),
            "dilate" => Ok(MorphOp::Dilate),
            "open" => Ok(MorphOp::Open),
            "close" => Ok(MorphOp::Close),
            other => Err(UnknownOp(other.to_string())),
        }
    }
}

/// Parses a comma list such as `open,close`. An empty string is the empty
/// sequence.
pub fn parse_sequence(s: &str) -> Result<Vec<MorphOp>, UnknownOp> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

pub fn format_sequence(ops: &[MorphOp]) -> String {
    ops.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Visits, for one offset `(dx, dy)`, every output pixel `(x, y)` whose
/// partner `(x + dx, y + dy)` lies inside the mask.
fn for_each_overlap(
    w: usize,
    h: usize,
    dx: isize,
    dy: isize,
    mut f: impl FnMut(usize, usize),
) {
    let x0 = (-dx).max(0) as usize;
    let x1 = (w as isize - dx.max(0)).max(0) as usize;
    let y0 = (-dy).max(0) as usize;
    let y1 = (h as isize - dy.max(0)).max(0) as usize;
    for y in y0..y1.min(h) {
        for x in x0..x1.min(w) {
            f(x, y);
        }
    }
}

/// Output bit set iff every in-bounds cell under the element is set.
pub fn erode(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (m.width(), m.height());
    let src = m.bits();
    let mut out = src.to_vec();
    for (dx, dy) in se.offsets() {
        if dx == 0 && dy == 0 {
            continue;
        }
        for_each_overlap(w, h, dx, dy, |x, y| {
            let partner = (y as isize + dy) as usize * w + (x as isize + dx) as usize;
            if !src[partner] {
                out[y * w + x] = false;
            }
        });
    }
    BinaryMask::from_bits(w, h, out)
}

/// Output bit set iff the element reflected through its anchor and placed at
/// the pixel hits a set input bit.
pub fn dilate(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (m.width(), m.height());
    let src = m.bits();
    let mut out = src.to_vec();
    for (dx, dy) in se.offsets() {
        if dx == 0 && dy == 0 {
            continue;
        }
        // out(x, y) |= m(x - dx, y - dy)
        for_each_overlap(w, h, -dx, -dy, |x, y| {
            let partner = (y as isize - dy) as usize * w + (x as isize - dx) as usize;
            if src[partner] {
                out[y * w + x] = true;
            }
        });
    }
    BinaryMask::from_bits(w, h, out)
}

pub fn open(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    dilate(&erode(m, se), se)
}

pub fn close(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    erode(&dilate(m, se), se)
}

pub fn apply(m: &BinaryMask, se: &StructuringElement, op: MorphOp) -> BinaryMask {
    match op {
        MorphOp::Erode => erode(m, se),
        MorphOp::Dilate => dilate(m, se),
        MorphOp::Open => open(m, se),
        MorphOp::Close => close(m, se),
    }
}

pub fn apply_sequence(m: &BinaryMask, se: &StructuringElement, ops: &[MorphOp]) -> BinaryMask {
    ops.iter().fold(m.clone(), |acc, &op| apply(&acc, se, op))
}
