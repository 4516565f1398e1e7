//! Connected-component labeling and per-component shape features.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segment::BinaryMask;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("label {0} does not occur in the label map")]
pub struct UnknownLabel(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn as_number(self) -> u8 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> usize {
        self.max_y - self.min_y + 1
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.min_x as f64 && x <= self.max_x as f64 && y >= self.min_y as f64 && y <= self.max_y as f64
    }
}

/// One connected component. The perimeter counts unit pixel edges shared with
/// background or the image border; the centroid is the mean of member pixel
/// coordinates, pixel `(x, y)` contributing exactly `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub label: u32,
    pub area: u64,
    pub perimeter: u64,
    pub centroid: [f64; 2],
    pub bbox: BoundingBox,
}

/// Sort key: larger area first, then smaller min-y, then smaller min-x.
pub fn blob_order(a: &Blob, b: &Blob) -> Ordering {
    b.area
        .cmp(&a.area)
        .then(a.bbox.min_y.cmp(&b.bbox.min_y))
        .then(a.bbox.min_x.cmp(&b.bbox.min_x))
}

/// Per-pixel component ids; 0 is background, components are `1..=count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: u32,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn component_count(&self) -> u32 {
        self.count
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Member pixels of `label` in raster order.
    pub fn members(&self, label: u32) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == label)
            .map(|(i, _)| (i % self.width, i / self.width))
    }
}

struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

#[derive(Default, Clone)]
struct Accum {
    area: u64,
    edges: u64,
    sum_x: u64,
    sum_y: u64,
    min_x: usize,
    min_y: usize,
    max_x: usize,
    max_y: usize,
}

impl Accum {
    fn add(&mut self, x: usize, y: usize, exposed: u64) {
        if self.area == 0 {
            (self.min_x, self.min_y, self.max_x, self.max_y) = (x, y, x, y);
        } else {
            self.min_x = self.min_x.min(x);
            self.min_y = self.min_y.min(y);
            self.max_x = self.max_x.max(x);
            self.max_y = self.max_y.max(y);
        }
        self.area += 1;
        self.edges += exposed;
        self.sum_x += x as u64;
        self.sum_y += y as u64;
    }

    fn into_blob(self, label: u32) -> Blob {
        let n = self.area as f64;
        Blob {
            label,
            area: self.area,
            perimeter: self.edges,
            centroid: [self.sum_x as f64 / n, self.sum_y as f64 / n],
            bbox: BoundingBox {
                min_x: self.min_x,
                min_y: self.min_y,
                max_x: self.max_x,
                max_y: self.max_y,
            },
        }
    }
}

fn exposed_edges(map: &LabelMap, x: usize, y: usize, label: u32) -> u64 {
    let same = |nx: isize, ny: isize| {
        nx >= 0
            && ny >= 0
            && (nx as usize) < map.width
            && (ny as usize) < map.height
            && map.get(nx as usize, ny as usize) == label
    };
    let (x, y) = (x as isize, y as isize);
    [(1, 0), (-1, 0), (0, 1), (0, -1)]
        .iter()
        .filter(|(dx, dy)| !same(x + dx, y + dy))
        .count() as u64
}

/// Two-pass union-find labeling. Returns blobs sorted by [`blob_order`].
pub fn label_components(m: &BinaryMask, connectivity: Connectivity) -> (LabelMap, Vec<Blob>) {
    let (w, h) = (m.width(), m.height());
    let mut provisional = vec![u32::MAX; w * h];
    let mut sets = DisjointSets { parent: Vec::new() };

    // previously visited neighbours in raster order
    let back: &[(isize, isize)] = match connectivity {
        Connectivity::Four => &[(-1, 0), (0, -1)],
        Connectivity::Eight => &[(-1, 0), (-1, -1), (0, -1), (1, -1)],
    };

    for y in 0..h {
        for x in 0..w {
            if !m.get(x, y) {
                continue;
            }
            let mut current: Option<u32> = None;
            for &(dx, dy) in back {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx >= w as isize {
                    continue;
                }
                let n = provisional[ny as usize * w + nx as usize];
                if n == u32::MAX {
                    continue;
                }
                match current {
                    None => current = Some(n),
                    Some(c) => sets.union(c, n),
                }
            }
            provisional[y * w + x] = current.unwrap_or_else(|| sets.make());
        }
    }

    // dense ids in order of first appearance
    let mut dense = vec![0u32; sets.parent.len()];
    let mut count = 0u32;
    let mut labels = vec![0u32; w * h];
    for (i, &p) in provisional.iter().enumerate() {
        if p == u32::MAX {
            continue;
        }
        let root = sets.find(p) as usize;
        if dense[root] == 0 {
            count += 1;
            dense[root] = count;
        }
        labels[i] = dense[root];
    }

    let map = LabelMap {
        width: w,
        height: h,
        labels,
        count,
    };

    let mut acc = vec![Accum::default(); count as usize + 1];
    for y in 0..h {
        for x in 0..w {
            let l = map.get(x, y);
            if l != 0 {
                acc[l as usize].add(x, y, exposed_edges(&map, x, y, l));
            }
        }
    }
    let mut blobs: Vec<Blob> = acc
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(l, a)| a.into_blob(l as u32))
        .collect();
    blobs.sort_by(blob_order);
    (map, blobs)
}

/// Features of a single labelled component.
pub fn blob_metrics(map: &LabelMap, label: u32) -> Result<Blob, UnknownLabel> {
    if label == 0 {
        return Err(UnknownLabel(label));
    }
    let mut acc = Accum::default();
    for (x, y) in map.members(label) {
        acc.add(x, y, exposed_edges(map, x, y, label));
    }
    if acc.area == 0 {
        return Err(UnknownLabel(label));
    }
    Ok(acc.into_blob(label))
}

pub fn largest_blob(blobs: &[Blob]) -> Option<&Blob> {
    blobs.iter().min_by(|a, b| blob_order(a, b))
}
