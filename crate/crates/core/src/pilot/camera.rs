use std::f64::consts::PI;

use crate::config::{parse_value, ConfigError};
use crate::raster::{RasterImage, Rgb};

use super::kinematics::RobotState;
use super::world::World;

pub const SKY: Rgb = [20, 20, 20];

/// Forward-facing camera on the robot. Columns map linearly to bearing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub width: usize,
    pub height: usize,
    /// Horizontal field of view, radians.
    pub fov: f64,
    /// Height of the optical centre above the ground, metres.
    pub mount_height: f64,
}

impl Default for CameraModel {
    /// 640x480 VGA sensor with a 60 degree horizontal field of view.
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
            fov: PI / 3.0,
            mount_height: 0.05,
        }
    }
}

impl CameraModel {
    pub fn with_size(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.width == 0 || self.height == 0 {
            return Err(ConfigError::Invalid("camera dimensions must be >= 1".into()));
        }
        if !(self.fov > 0.0 && self.fov < PI) {
            return Err(ConfigError::Invalid("camera fov must lie in (0, pi)".into()));
        }
        Ok(())
    }

    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        match key {
            "pilot.fov_deg" => self.fov = parse_value::<f64>(key, value)?.to_radians(),
            "pilot.mount_height" => self.mount_height = parse_value(key, value)?,
            "pilot.camera_width" => self.width = parse_value(key, value)?,
            "pilot.camera_height" => self.height = parse_value(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Focal length in pixels.
    pub fn focal_px(&self) -> f64 {
        (self.width as f64 / 2.0) / (self.fov / 2.0).tan()
    }

    fn half_w(&self) -> f64 {
        self.width as f64 / 2.0
    }
}

/// Bearing of image column `cx`, positive to the right of centre.
pub fn bearing_from_centroid(cx: f64, cam: &CameraModel) -> f64 {
    (cx - cam.half_w()) / cam.half_w() * (cam.fov / 2.0)
}

/// Projection of one flower: image centre (column, row) and pixel radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub column: f64,
    pub row: f64,
    pub radius_px: f64,
    pub distance: f64,
    pub bearing: f64,
}

/// Projects a ground disc seen from `state`, or `None` when it lies behind the
/// camera or its centre is outside the field of view.
pub fn project(fx: f64, fy: f64, radius: f64, state: &RobotState, cam: &CameraModel) -> Option<Projection> {
    let (dx, dy) = (fx - state.x, fy - state.y);
    let (s, c) = state.heading.sin_cos();
    let forward = dx * c + dy * s;
    let left = -dx * s + dy * c;
    if forward <= 0.0 {
        return None;
    }
    let bearing = (-left).atan2(forward);
    if bearing.abs() > cam.fov / 2.0 {
        return None;
    }
    let distance = dx.hypot(dy);
    let focal = cam.focal_px();
    Some(Projection {
        column: cam.half_w() + bearing / (cam.fov / 2.0) * cam.half_w(),
        row: cam.height as f64 / 2.0 + focal * cam.mount_height / forward,
        radius_px: radius / distance * focal,
        distance,
        bearing,
    })
}

/// Renders the flowers visible from `state` as filled discs on a dark
/// background, farthest first.
pub fn render_view(world: &World, state: &RobotState, cam: &CameraModel) -> RasterImage {
    let mut img = RasterImage::filled(cam.width, cam.height, SKY).expect("camera dims validated");
    let mut visible: Vec<(Projection, Rgb)> = world
        .flowers
        .iter()
        .filter_map(|f| project(f.x, f.y, f.radius, state, cam).map(|p| (p, f.color)))
        .collect();
    visible.sort_by(|a, b| b.0.distance.total_cmp(&a.0.distance));

    let (w, h) = (cam.width as f64, cam.height as f64);
    for (p, color) in visible {
        let r = p.radius_px;
        let x0 = (p.column - r).ceil().max(0.0);
        let x1 = (p.column + r).floor().min(w - 1.0);
        let y0 = (p.row - r).ceil().max(0.0);
        let y1 = (p.row + r).floor().min(h - 1.0);
        if x0 > x1 || y0 > y1 {
            continue;
        }
        for y in y0 as usize..=y1 as usize {
            let dy = y as f64 - p.row;
            for x in x0 as usize..=x1 as usize {
                let dx = x as f64 - p.column;
                if dx * dx + dy * dy <= r * r {
                    img.put(x, y, color);
                }
            }
        }
    }
    img
}
