use crate::config::{parse_value, ConfigError};

/// Wheel rim speeds in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotionCommand {
    pub v_left: f64,
    pub v_right: f64,
}

impl MotionCommand {
    pub const STOP: Self = Self {
        v_left: 0.0,
        v_right: 0.0,
    };

    pub fn clamped(self, v_max: f64) -> Self {
        Self {
            v_left: self.v_left.clamp(-v_max, v_max),
            v_right: self.v_right.clamp(-v_max, v_max),
        }
    }

    /// Two big-endian IEEE-754 doubles, left then right.
    pub fn to_be_bytes(&self) -> [u8; 16] {
        let mut out = [0u8; 16];
        out[..8].copy_from_slice(&self.v_left.to_be_bytes());
        out[8..].copy_from_slice(&self.v_right.to_be_bytes());
        out
    }

    pub fn from_be_bytes(b: &[u8]) -> Option<Self> {
        if b.len() != 16 {
            return None;
        }
        Some(Self {
            v_left: f64::from_be_bytes(b[..8].try_into().ok()?),
            v_right: f64::from_be_bytes(b[8..].try_into().ok()?),
        })
    }
}

/// Gains and geometry of the proportional visual-servo law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    /// Wheel separation, metres.
    pub track: f64,
    pub v_max: f64,
    pub k_v: f64,
    pub k_omega: f64,
    /// Blob area fraction at which forward motion stops.
    pub target_fraction: f64,
    /// Turn rate used while no flower is in view (counter-clockwise).
    pub search_omega: f64,
}

impl Default for ControlParams {
    fn default() -> Self {
        Self {
            track: 0.3,
            v_max: 0.5,
            k_v: 0.5,
            k_omega: 2.0,
            target_fraction: 0.3,
            search_omega: 0.6,
        }
    }
}

impl ControlParams {
    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        let slot = match key {
            "pilot.track" => &mut self.track,
            "pilot.v_max" => &mut self.v_max,
            "pilot.k_v" => &mut self.k_v,
            "pilot.k_omega" => &mut self.k_omega,
            "pilot.target_fraction" => &mut self.target_fraction,
            "pilot.search_omega" => &mut self.search_omega,
            _ => return Ok(false),
        };
        *slot = parse_value(key, value)?;
        Ok(true)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.track > 0.0 && self.v_max > 0.0) {
            return Err(ConfigError::Invalid("track and v_max must be positive".into()));
        }
        if !(self.target_fraction > 0.0 && self.target_fraction <= 1.0) {
            return Err(ConfigError::Invalid("target_fraction must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// Largest turn rate the wheels can produce at zero forward speed.
    pub fn omega_max(&self) -> f64 {
        2.0 * self.v_max / self.track
    }
}

/// Proportional steering toward a target at `bearing` (radians, positive to
/// the right of the optical axis). Forward speed falls off linearly as the
/// blob's area fraction approaches the target fraction and is zero beyond it.
pub fn steer(bearing: f64, area_fraction: f64, p: &ControlParams) -> MotionCommand {
    let omega_max = p.omega_max();
    let angular = (-p.k_omega * bearing).clamp(-omega_max, omega_max);
    let linear = p.k_v * (1.0 - (area_fraction / p.target_fraction).min(1.0));
    let half = angular * p.track / 2.0;
    MotionCommand {
        v_left: linear - half,
        v_right: linear + half,
    }
    .clamped(p.v_max)
}

/// Rotate in place, counter-clockwise.
pub fn search(p: &ControlParams) -> MotionCommand {
    let half = p.search_omega.min(p.omega_max()) * p.track / 2.0;
    MotionCommand {
        v_left: -half,
        v_right: half,
    }
    .clamped(p.v_max)
}
