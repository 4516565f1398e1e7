//! RGB colour-range classification and binarization.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{RasterImage, Rgb};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RangeError {
    #[error("channel {channel}: min {min} exceeds max {max}")]
    Inverted { channel: char, min: u8, max: u8 },
    #[error("dominance factor {num}/{den} must be a ratio >= 1 with non-zero denominator")]
    BadDominance { num: u32, den: u32 },
    #[error("cannot parse dominance {0:?}")]
    Parse(String),
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Red-dominance ratio `num/den`, stored exactly: a pixel passes when
/// `r * den >= num * g` and `r * den >= num * b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dominance {
    num: u32,
    den: u32,
}

impl Dominance {
    pub fn new(num: u32, den: u32) -> Result<Self, RangeError> {
        if den == 0 || num < den {
            return Err(RangeError::BadDominance { num, den });
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self + a/b`, exact.
    pub fn raised_by(&self, a: u32, b: u32) -> Self {
        Self::new(self.num * b + a * self.den, self.den * b).expect("sum of ratios >= 1")
    }

    #[inline]
    fn holds(&self, p: Rgb) -> bool {
        let r = p[0] as u64 * self.den as u64;
        r >= self.num as u64 * p[1] as u64 && r >= self.num as u64 * p[2] as u64
    }
}

impl fmt::Display for Dominance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Dominance {
    type Err = RangeError;

    /// Accepts `num/den` or a short decimal such as `1.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || RangeError::Parse(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            return Self::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            );
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 6 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u32.pow(frac.len() as u32);
        let int: u32 = int.parse().map_err(|_| bad())?;
        let frac: u32 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        Self::new(int * den + frac, den)
    }
}

impl Serialize for Dominance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dominance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Inclusive per-channel bounds plus an optional red-dominance ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorRange {
    pub r_min: u8,
    pub r_max: u8,
    pub g_min: u8,
    pub g_max: u8,
    pub b_min: u8,
    pub b_max: u8,
    pub dominance: Option<Dominance>,
}

impl Default for ColorRange {
    /// Red petals: r in [100,255], g and b in [0,100], r >= 1.5 g and r >= 1.5 b.
    fn default() -> Self {
        Self {
            r_min: 100,
            r_max: 255,
            g_min: 0,
            g_max: 100,
            b_min: 0,
            b_max: 100,
            dominance: Some(Dominance { num: 3, den: 2 }),
        }
    }
}

impl ColorRange {
    pub fn validate(&self) -> Result<(), RangeError> {
        for (channel, min, max) in [
            ('r', self.r_min, self.r_max),
            ('g', self.g_min, self.g_max),
            ('b', self.b_min, self.b_max),
        ] {
            if min > max {
                return Err(RangeError::Inverted { channel, min, max });
            }
        }
        Ok(())
    }

    /// Same bounds with the dominance ratio raised by `1/4`. An absent ratio is
    /// treated as 1 before raising.
    pub fn strict(&self) -> Self {
        let base = self.dominance.unwrap_or(Dominance { num: 1, den: 1 });
        Self {
            dominance: Some(base.raised_by(1, 4)),
            ..*self
        }
    }
}

#[inline]
pub fn classify_pixel(p: Rgb, range: &ColorRange) -> bool {
    (range.r_min..=range.r_max).contains(&p[0])
        && (range.g_min..=range.g_max).contains(&p[1])
        && (range.b_min..=range.b_max).contains(&p[2])
        && range.dominance.is_none_or(|d| d.holds(p))
}

/// Row-major foreground flags; `true` is foreground ("white").
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMask {}x{}", self.width, self.height)?;
        if self.width * self.height <= 64 * 64 {
            for row in self.bits.chunks(self.width) {
                let line: String = row.iter().map(|&b| if b { '#' } else { '.' }).collect();
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "mask bit count");
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let bits = (0..width * height).map(|i| f(i % width, i / width)).collect();
        Self {
            width,
            height,
            bits,
        }
    }

    /// Parses rows of `#` (foreground) and `.` (background); whitespace-only
    /// lines are skipped. Handy in tests.
    pub fn from_ascii(art: &str) -> Self {
        let rows: Vec<&str> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let width = rows.first().map_or(0, |r| r.len());
        let mut bits = Vec::with_capacity(width * rows.len());
        for r in &rows {
            assert_eq!(r.len(), width, "ragged mask art");
            bits.extend(r.bytes().map(|b| b == b'#'));
        }
        Self::from_bits(width, rows.len(), bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-range coordinates read as `None`.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> Option<bool> {
        if x < 0 || y < 0 || x >= self.width as isize || y >= self.height as isize {
            None
        } else {
            Some(self.bits[y as usize * self.width + x as usize])
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// True when every foreground bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Adds a background border of `px` columns and `py` rows on each side.
    pub fn padded(&self, px: usize, py: usize) -> Self {
        let w = self.width + 2 * px;
        let h = self.height + 2 * py;
        Self::from_fn(w, h, |x, y| {
            x >= px && y >= py && x - px < self.width && y - py < self.height
                && self.get(x - px, y - py)
        })
    }

    pub fn transposed(&self) -> Self {
        Self::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }
}

/// Sets exactly the pixels for which [`classify_pixel`] holds.
pub fn binarize(img: &RasterImage, range: &ColorRange) -> BinaryMask {
    BinaryMask {
        width: img.width(),
        height: img.height(),
        bits: img.pixels().map(|p| classify_pixel(p, range)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_red_range_examples() {
        let red = ColorRange::default();
        assert!(classify_pixel([200, 30, 30], &red));
        assert!(!classify_pixel([200, 150, 30], &red));
        assert!(!classify_pixel([255, 255, 255], &red));
    }

    #[test]
    fn dominance_boundary_is_inclusive() {
        let r = ColorRange {
            r_min: 0,
            r_max: 255,
            g_min: 0,
            g_max: 255,
            b_min: 0,
            b_max: 255,
            dominance: Some("1.5".parse().unwrap()),
        };
        assert!(classify_pixel([120, 80, 80], &r));
        assert!(!classify_pixel([119, 80, 80], &r));
        assert!(!classify_pixel([120, 80, 81], &r));
    }

    #[test]
    fn dominance_parsing_and_strict_raise() {
        let d: Dominance = "1.5".parse().unwrap();
        assert_eq!((d.num(), d.den()), (3, 2));
        assert_eq!("6/4".parse::<Dominance>().unwrap(), d);
        assert_eq!(d.raised_by(1, 4).to_string(), "7/4");
        assert!("0.9".parse::<Dominance>().is_err());
        assert!("3/0".parse::<Dominance>().is_err());
        assert_eq!(
            ColorRange::default().strict().dominance.unwrap().to_string(),
            "7/4"
        );
        let none = ColorRange {
            dominance: None,
            ..ColorRange::default()
        };
        assert_eq!(none.strict().dominance.unwrap().to_string(), "5/4");
    }

    #[test]
    fn binarize_uniform_images() {
        let red = ColorRange::default();
        let white = RasterImage::filled(5, 4, [255, 255, 255]).unwrap();
        assert!(binarize(&white, &red).is_empty());
        let pure = RasterImage::filled(5, 4, [255, 0, 0]).unwrap();
        assert_eq!(binarize(&pure, &red).count_ones(), 20);
    }

    #[test]
    fn validate_rejects_inverted_bounds() {
        let r = ColorRange {
            g_min: 120,
            ..ColorRange::default()
        };
        assert_eq!(
            r.validate(),
            Err(RangeError::Inverted {
                channel: 'g',
                min: 120,
                max: 100
            })
        );
    }

    #[test]
    fn mask_helpers() {
        let m = BinaryMask::from_ascii(
            "
            #..
            .##
            ",
        );
        assert_eq!((m.width(), m.height(), m.count_ones()), (3, 2, 3));
        let t = m.transposed();
        assert!(t.get(1, 2) && t.get(0, 0) && !t.get(1, 0));
        let p = m.padded(1, 2);
        assert_eq!((p.width(), p.height(), p.count_ones()), (5, 6, 3));
        assert!(p.get(1, 2));
        assert_eq!(m.complement().count_ones(), 3);
    }
}
