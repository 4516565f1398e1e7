//! Flower quality inspection.
//!
//! The image pipeline runs in stages, each in its own module:
//!
//! 1. [`raster`] decodes PNG / PPM frames and optionally box-downscales them.
//! 2. [`filter`] suppresses noise with an equal-weight mean over a circular or
//!    rectangular mask.
//! 3. [`segment`] binarizes by an RGB colour range (red by default).
//! 4. [`morph`] cleans the mask with opening and closing.
//! 5. [`blob`] labels connected components and measures area, perimeter,
//!    centroid and bounding box.
//! 6. [`diagnose`] picks the largest component, grades it and writes the JSON
//!    log entry.
//!
//! [`pilot`] closes the loop around a simulated differential-drive robot with a
//! synthetic camera, and [`wire`] carries frames, reports and motion commands
//! over a length-prefixed TCP protocol.

pub mod blob;
pub mod config;
pub mod diagnose;
pub mod filter;
pub mod footprint;
pub mod morph;
pub mod pilot;
pub mod raster;
pub mod segment;
pub mod synth;
pub mod wire;

pub use blob::{Blob, BoundingBox, Connectivity, LabelMap};
pub use config::{PipelineConfig, Thresholds};
pub use diagnose::{inspect, QualityReport, Verdict};
pub use footprint::{Footprint, Shape};
pub use raster::{ImageFormat, RasterImage};
pub use segment::{BinaryMask, ColorRange};
