//! Whole-pipeline inspection: resize, filter, binarize, morphology, labeling,
//! feature extraction and a ternary quality verdict, plus the JSON log format
//! and an annotated copy of the frame.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blob::{label_components, largest_blob, Blob, BoundingBox, LabelMap};
use crate::config::{ConfigError, PipelineConfig};
use crate::filter::{make_kernel, mean_filter};
use crate::footprint::Footprint;
use crate::morph::apply_sequence;
use crate::raster::{div_round, resize_box, RasterError, RasterImage, Rgb};
use crate::segment::{binarize, classify_pixel, BinaryMask};

#[derive(Debug, Error)]
pub enum InspectError {
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed report: {0}")]
pub struct MalformedReport(pub String);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("report describes a {expected_w}x{expected_h} image, got {actual_w}x{actual_h}")]
pub struct DimensionMismatch {
    pub expected_w: usize,
    pub expected_h: usize,
    pub actual_w: usize,
    pub actual_h: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ExportGrade,
    Reject,
    NoFlower,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ExportGrade => "export_grade",
            Verdict::Reject => "reject",
            Verdict::NoFlower => "no_flower",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceDims {
    pub width: usize,
    pub height: usize,
}

/// One inspection log entry. Blob coordinates, area and perimeter are in
/// source-image units; the fractions are computed at the working resolution
/// and carry six decimal places.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub verdict: Verdict,
    pub detected: bool,
    pub source: SourceDims,
    #[serde(with = "fixed6")]
    pub area_fraction: f64,
    #[serde(with = "fixed6")]
    pub uniformity: f64,
    #[serde(with = "fixed6")]
    pub defect_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blob: Option<Blob>,
    pub config: PipelineConfig,
}

mod fixed6 {
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format!("{v:.6}")).map_err(serde::ser::Error::custom)?;
        serde::Serialize::serialize(&raw, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d)
    }
}

/// `num / den` rounded to six decimals, ties up, computed in integers.
fn fraction6(num: u64, den: u64) -> f64 {
    if den == 0 {
        return 0.0;
    }
    div_round(num * 1_000_000, den) as f64 / 1_000_000.0
}

/// Intermediate products of one pipeline run at working resolution.
#[derive(Debug, Clone)]
pub struct PipelineTrace {
    pub working: RasterImage,
    pub filtered: RasterImage,
    pub raw_mask: BinaryMask,
    pub mask: BinaryMask,
    pub labels: LabelMap,
    pub blobs: Vec<Blob>,
}

pub fn run_pipeline(img: &RasterImage, cfg: &PipelineConfig) -> Result<PipelineTrace, InspectError> {
    cfg.validate()?;
    let working = resize_box(img, cfg.resize_factor)?;
    let kernel = make_kernel(cfg.mask).map_err(ConfigError::from)?;
    let filtered = mean_filter(&working, &kernel);
    let raw_mask = binarize(&filtered, &cfg.color);
    let se = Footprint::from_shape(cfg.se).map_err(ConfigError::from)?;
    let mask = apply_sequence(&raw_mask, &se, &cfg.sequence);
    let (labels, blobs) = label_components(&mask, cfg.connectivity);
    Ok(PipelineTrace {
        working,
        filtered,
        raw_mask,
        mask,
        labels,
        blobs,
    })
}

/// Fraction of blob pixels whose filtered colour passes the strict range
/// (dominance raised by 1/4), and the defect ratio: among bounding-box pixels
/// that are members of or 8-adjacent to the blob, the fraction failing the
/// configured range.
fn colour_metrics(trace: &PipelineTrace, blob: &Blob, cfg: &PipelineConfig) -> (f64, f64) {
    let strict = cfg.color.strict();
    let bb = blob.bbox;

    // membership of this blob only; other components may share the bbox
    let member = |x: usize, y: usize| trace.labels.get(x, y) == blob.label;
    let mut uniform = 0u64;
    let mut candidates = 0u64;
    let mut defects = 0u64;
    for y in bb.min_y..=bb.max_y {
        for x in bb.min_x..=bb.max_x {
            let p = trace.filtered.get(x, y);
            let inside = member(x, y);
            if inside && classify_pixel(p, &strict) {
                uniform += 1;
            }
            let adjacent = inside || neighbours8(x, y, bb).any(|(nx, ny)| member(nx, ny));
            if adjacent {
                candidates += 1;
                if !classify_pixel(p, &cfg.color) {
                    defects += 1;
                }
            }
        }
    }
    (fraction6(uniform, blob.area), fraction6(defects, candidates))
}

fn neighbours8(x: usize, y: usize, bb: BoundingBox) -> impl Iterator<Item = (usize, usize)> {
    let (x, y) = (x as isize, y as isize);
    (-1..=1)
        .flat_map(move |dy| (-1..=1).map(move |dx| (x + dx, y + dy)))
        .filter(move |&(nx, ny)| {
            (nx, ny) != (x, y)
                && nx >= bb.min_x as isize
                && ny >= bb.min_y as isize
                && nx <= bb.max_x as isize
                && ny <= bb.max_y as isize
        })
        .map(|(nx, ny)| (nx as usize, ny as usize))
}

fn to_source(blob: &Blob, factor: usize, src_w: usize, src_h: usize) -> Blob {
    if factor == 1 {
        return blob.clone();
    }
    let f = factor as f64;
    let offset = (f - 1.0) / 2.0;
    let fu = factor as u64;
    Blob {
        label: blob.label,
        area: blob.area * fu * fu,
        perimeter: blob.perimeter * fu,
        centroid: [blob.centroid[0] * f + offset, blob.centroid[1] * f + offset],
        bbox: BoundingBox {
            min_x: blob.bbox.min_x * factor,
            min_y: blob.bbox.min_y * factor,
            max_x: ((blob.bbox.max_x + 1) * factor - 1).min(src_w - 1),
            max_y: ((blob.bbox.max_y + 1) * factor - 1).min(src_h - 1),
        },
    }
}

pub fn inspect(img: &RasterImage, cfg: &PipelineConfig) -> Result<QualityReport, InspectError> {
    let trace = run_pipeline(img, cfg)?;
    Ok(report_from_trace(img, &trace, cfg))
}

pub fn report_from_trace(img: &RasterImage, trace: &PipelineTrace, cfg: &PipelineConfig) -> QualityReport {
    let t = &cfg.thresholds;
    let source = SourceDims {
        width: img.width(),
        height: img.height(),
    };
    let total = trace.working.pixel_count() as u64;
    let no_flower = |area_fraction| QualityReport {
        verdict: Verdict::NoFlower,
        detected: false,
        source,
        area_fraction,
        uniformity: 0.0,
        defect_ratio: 0.0,
        blob: None,
        config: cfg.clone(),
    };
    let Some(blob) = largest_blob(&trace.blobs) else {
        return no_flower(0.0);
    };
    let area_fraction = fraction6(blob.area, total);
    if area_fraction < t.min_area_fraction {
        return no_flower(area_fraction);
    }
    let (uniformity, defect_ratio) = colour_metrics(trace, blob, cfg);
    let verdict = if area_fraction > t.max_area_fraction
        || uniformity < t.min_uniformity
        || defect_ratio > t.max_defect_ratio
    {
        Verdict::Reject
    } else {
        Verdict::ExportGrade
    };
    QualityReport {
        verdict,
        detected: true,
        source,
        area_fraction,
        uniformity,
        defect_ratio,
        blob: Some(to_source(blob, cfg.resize_factor, img.width(), img.height())),
        config: cfg.clone(),
    }
}

/// Fixed overlay colour for annotations.
pub const ANNOTATION_COLOR: Rgb = [0, 255, 0];
/// Half-length of the centroid cross arms.
pub const CROSS_ARM: isize = 4;

/// Draws the blob's bounding box outline and a 9-pixel centroid cross.
/// Reports without a flower leave the copy untouched.
pub fn annotate(img: &RasterImage, report: &QualityReport) -> Result<RasterImage, DimensionMismatch> {
    if (img.width(), img.height()) != (report.source.width, report.source.height) {
        return Err(DimensionMismatch {
            expected_w: report.source.width,
            expected_h: report.source.height,
            actual_w: img.width(),
            actual_h: img.height(),
        });
    }
    let mut out = img.clone();
    let Some(blob) = report.blob.as_ref().filter(|_| report.detected) else {
        return Ok(out);
    };
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut plot = |x: isize, y: isize| {
        if x >= 0 && y >= 0 && x < w && y < h {
            out.put(x as usize, y as usize, ANNOTATION_COLOR);
        }
    };
    let bb = blob.bbox;
    for x in bb.min_x..=bb.max_x {
        plot(x as isize, bb.min_y as isize);
        plot(x as isize, bb.max_y as isize);
    }
    for y in bb.min_y..=bb.max_y {
        plot(bb.min_x as isize, y as isize);
        plot(bb.max_x as isize, y as isize);
    }
    let cx = blob.centroid[0].round() as isize;
    let cy = blob.centroid[1].round() as isize;
    for d in -CROSS_ARM..=CROSS_ARM {
        plot(cx + d, cy);
        plot(cx, cy + d);
    }
    Ok(out)
}

/// Compact JSON with stable field names.
pub fn report_to_json(report: &QualityReport) -> Vec<u8> {
    serde_json::to_vec(report).expect("report serialization is infallible")
}

pub fn report_from_json(bytes: &[u8]) -> Result<QualityReport, MalformedReport> {
    let r: QualityReport =
        serde_json::from_slice(bytes).map_err(|e| MalformedReport(e.to_string()))?;
    for (name, v) in [
        ("area_fraction", r.area_fraction),
        ("uniformity", r.uniformity),
        ("defect_ratio", r.defect_ratio),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(MalformedReport(format!("{name} {v} outside [0, 1]")));
        }
    }
    let no_flower = r.verdict == Verdict::NoFlower;
    if no_flower == r.detected || no_flower != r.blob.is_none() {
        return Err(MalformedReport(
            "detected, verdict and blob presence disagree".into(),
        ));
    }
    Ok(r)
}
