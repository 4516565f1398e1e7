//! Odd-sized boolean neighbourhood grids shared by the mean filter (as a
//! [`Kernel`](crate::filter::Kernel)) and by morphology (as a
//! [`StructuringElement`](crate::morph::StructuringElement)).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FootprintError {
    #[error("footprint dimensions must be odd, got {width}x{height}")]
    EvenDimension { width: usize, height: usize },
    #[error("footprint grid holds {actual} cells, expected {expected}")]
    GridSize { expected: usize, actual: usize },
    #[error("footprint centre cell must be active")]
    InactiveAnchor,
    #[error("cannot parse footprint shape {0:?} (expected circular:R or rect:WxH)")]
    BadShape(String),
}

/// Parametric footprint shapes accepted on the command line and in config
/// files (`circular:5`, `rect:5x5`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Circular(usize),
    Rect(usize, usize),
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Circular(r) => write!(f, "circular:{r}"),
            Shape::Rect(w, h) => write!(f, "rect:{w}x{h}"),
        }
    }
}

impl FromStr for Shape {
    type Err = FootprintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FootprintError::BadShape(s.to_string());
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "circular" | "circle" | "disc" => {
                Ok(Shape::Circular(arg.trim().parse().map_err(|_| bad())?))
            }
            "rect" => {
                let (w, h) = arg.trim().split_once('x').ok_or_else(bad)?;
                Ok(Shape::Rect(
                    w.trim().parse().map_err(|_| bad())?,
                    h.trim().parse().map_err(|_| bad())?,
                ))
            }
            _ => Err(bad()),
        }
    }
}

/// A horizontal run of active cells `[dx_start, dx_end]` on kernel row `dy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Run {
    pub dy: isize,
    pub dx_start: isize,
    pub dx_end: isize,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Footprint {
    width: usize,
    height: usize,
    active: Vec<bool>,
}

impl fmt::Debug for Footprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Footprint {}x{}", self.width, self.height)?;
        for row in self.active.chunks(self.width) {
            let line: String = row.iter().map(|&a| if a { '#' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

impl Footprint {
    pub fn from_shape(shape: Shape) -> Result<Self, FootprintError> {
        match shape {
            Shape::Circular(r) => {
                let side = 2 * r + 1;
                let r = r as isize;
                let active = (-r..=r)
                    .flat_map(|dy| (-r..=r).map(move |dx| dx * dx + dy * dy <= r * r))
                    .collect();
                Ok(Self {
                    width: side,
                    height: side,
                    active,
                })
            }
            Shape::Rect(w, h) => Self::from_grid(w, h, vec![true; w * h]),
        }
    }

    /// Builds an arbitrary footprint from a row-major activity grid.
    pub fn from_grid(width: usize, height: usize, active: Vec<bool>) -> Result<Self, FootprintError> {
        if width.is_multiple_of(2) || height.is_multiple_of(2) {
            return Err(FootprintError::EvenDimension { width, height });
        }
        if active.len() != width * height {
            return Err(FootprintError::GridSize {
                expected: width * height,
                actual: active.len(),
            });
        }
        let fp = Self {
            width,
            height,
            active,
        };
        if !fp.is_active(0, 0) {
            return Err(FootprintError::InactiveAnchor);
        }
        Ok(fp)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn radius_x(&self) -> usize {
        self.width / 2
    }

    pub fn radius_y(&self) -> usize {
        self.height / 2
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Whether the cell at offset `(dx, dy)` from the anchor is active.
    pub fn is_active(&self, dx: isize, dy: isize) -> bool {
        let cx = dx + self.radius_x() as isize;
        let cy = dy + self.radius_y() as isize;
        if cx < 0 || cy < 0 || cx >= self.width as isize || cy >= self.height as isize {
            return false;
        }
        self.active[cy as usize * self.width + cx as usize]
    }

    /// Active offsets `(dx, dy)` relative to the anchor, in raster order.
    pub fn offsets(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        let rx = self.radius_x() as isize;
        let ry = self.radius_y() as isize;
        self.active.iter().enumerate().filter(|(_, &a)| a).map(move |(i, _)| {
            ((i % self.width) as isize - rx, (i / self.width) as isize - ry)
        })
    }

    /// Point reflection through the anchor.
    pub fn reflect(&self) -> Self {
        let mut active = self.active.clone();
        active.reverse();
        Self {
            width: self.width,
            height: self.height,
            active,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.active.iter().eq(self.active.iter().rev())
    }

    pub(crate) fn runs(&self) -> Vec<Run> {
        let rx = self.radius_x() as isize;
        let ry = self.radius_y() as isize;
        let mut runs = Vec::new();
        for (row, cells) in self.active.chunks(self.width).enumerate() {
            let mut start = None;
            for (col, &a) in cells.iter().chain(std::iter::once(&false)).enumerate() {
                match (a, start) {
                    (true, None) => start = Some(col),
                    (false, Some(s)) => {
                        runs.push(Run {
                            dy: row as isize - ry,
                            dx_start: s as isize - rx,
                            dx_end: col as isize - 1 - rx,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
        }
        runs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_round_trips_through_text() {
        for s in [Shape::Circular(5), Shape::Rect(5, 3)] {
            assert_eq!(s.to_string().parse::<Shape>().unwrap(), s);
        }
        assert!("square:3".parse::<Shape>().is_err());
        assert!("rect:3".parse::<Shape>().is_err());
    }

    #[test]
    fn reflect_is_point_reflection() {
        let fp = Footprint::from_grid(3, 1, vec![true, true, false]).unwrap();
        let r = fp.reflect();
        assert!(r.is_active(1, 0) && r.is_active(0, 0) && !r.is_active(-1, 0));
        assert!(!fp.is_symmetric());
        assert!(Footprint::from_shape(Shape::Circular(3)).unwrap().is_symmetric());
    }

    #[test]
    fn runs_cover_active_cells() {
        let fp = Footprint::from_grid(5, 1, vec![true, false, true, true, false]).unwrap();
        let runs = fp.runs();
        assert_eq!(
            runs,
            vec![
                Run { dy: 0, dx_start: -2, dx_end: -2 },
                Run { dy: 0, dx_start: 0, dx_end: 1 },
            ]
        );
    }

    #[test]
    fn rejects_bad_grids() {
        assert_eq!(
            Footprint::from_grid(2, 3, vec![true; 6]),
            Err(FootprintError::EvenDimension { width: 2, height: 3 })
        );
        assert_eq!(
            Footprint::from_grid(3, 1, vec![true, false, true]),
            Err(FootprintError::InactiveAnchor)
        );
    }
}
