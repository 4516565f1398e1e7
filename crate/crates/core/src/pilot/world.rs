use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{bad_value, parse_entries, ConfigError};
use crate::raster::Rgb;

use super::camera::CameraModel;
use super::kinematics::RobotState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flower {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub color: Rgb,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            min_x: -10.0,
            min_y: -10.0,
            max_x: 10.0,
            max_y: 10.0,
        }
    }
}

impl Bounds {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.min_x..=self.max_x).contains(&x) && (self.min_y..=self.max_y).contains(&y)
    }
}

/// Flat world of flower discs.
///
/// Text form, one item per line, `#` comments:
///
/// ```text
/// bounds = -5,-5,5,5
/// start  = 0,0,0          # x, y, heading (radians)
/// flower = 2.0,0.0,0.05,180,20,20
/// ```
#[derive(Debug, Clone, PartialEq, Default)]
pub struct World {
    pub flowers: Vec<Flower>,
    pub bounds: Bounds,
    pub start: Option<RobotState>,
}

pub const DEFAULT_FLOWER_RADIUS: f64 = 0.05;
pub const DEFAULT_FLOWER_COLOR: Rgb = [180, 20, 20];

fn floats(key: &str, value: &str, n: usize) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| bad_value(key, value, e))?;
    if parts.len() != n {
        return Err(bad_value(key, value, format!("expected {n} comma-separated numbers")));
    }
    if parts.iter().any(|v| !v.is_finite()) {
        return Err(bad_value(key, value, "values must be finite"));
    }
    Ok(parts)
}

impl World {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut world = World::default();
        for e in parse_entries(text)? {
            match e.key.as_str() {
                "flower" => {
                    let v = floats(&e.key, &e.value, 6)?;
                    let mut color = [0u8; 3];
                    for (c, &f) in color.iter_mut().zip(&v[3..]) {
                        if !(0.0..=255.0).contains(&f) || f.fract() != 0.0 {
                            return Err(bad_value(&e.key, &e.value, "colour channels must be integers in 0..=255"));
                        }
                        *c = f as u8;
                    }
                    world.flowers.push(Flower {
                        x: v[0],
                        y: v[1],
                        radius: v[2],
                        color,
                    });
                }
                "bounds" => {
                    let v = floats(&e.key, &e.value, 4)?;
                    world.bounds = Bounds {
                        min_x: v[0],
                        min_y: v[1],
                        max_x: v[2],
                        max_y: v[3],
                    };
                }
                "start" => {
                    let v = floats(&e.key, &e.value, 3)?;
                    world.start = Some(RobotState::new(v[0], v[1], v[2]));
                }
                _ => return Err(ConfigError::UnknownKey(e.key)),
            }
        }
        world.validate()?;
        Ok(world)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let b = &self.bounds;
        if !(b.min_x < b.max_x && b.min_y < b.max_y) {
            return Err(ConfigError::Invalid("world bounds are empty".into()));
        }
        for f in &self.flowers {
            if f.radius.is_nan() || f.radius <= 0.0 {
                return Err(ConfigError::Invalid(format!("flower at ({}, {}) has non-positive radius", f.x, f.y)));
            }
            if !b.contains(f.x, f.y) {
                return Err(ConfigError::Invalid(format!("flower at ({}, {}) lies outside the bounds", f.x, f.y)));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let b = &self.bounds;
        let mut out = format!("bounds = {},{},{},{}\n", b.min_x, b.min_y, b.max_x, b.max_y);
        if let Some(s) = self.start {
            out += &format!("start = {},{},{}\n", s.x, s.y, s.heading);
        }
        for f in &self.flowers {
            out += &format!(
                "flower = {},{},{},{},{},{}\n",
                f.x, f.y, f.radius, f.color[0], f.color[1], f.color[2]
            );
        }
        out
    }

    /// One flower 1-3 m in front of a robot at the origin facing +x, within
    /// 80% of the half field of view.
    pub fn seeded(seed: u64, cam: &CameraModel) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let distance = rng.gen_range(1.0..=3.0);
        let half = 0.8 * cam.fov / 2.0;
        let bearing: f64 = rng.gen_range(-half..=half);
        // positive bearing is to the robot's right, i.e. toward -y
        World {
            flowers: vec![Flower {
                x: distance * bearing.cos(),
                y: -distance * bearing.sin(),
                radius: DEFAULT_FLOWER_RADIUS,
                color: DEFAULT_FLOWER_COLOR,
            }],
            bounds: Bounds {
                min_x: -5.0,
                min_y: -5.0,
                max_x: 5.0,
                max_y: 5.0,
            },
            start: Some(RobotState::origin()),
        }
    }

    /// Distance from `state` to the nearest flower centre.
    pub fn nearest_distance(&self, state: &RobotState) -> Option<f64> {
        self.flowers
            .iter()
            .map(|f| state.distance_to(f.x, f.y))
            .min_by(f64::total_cmp)
    }
}
