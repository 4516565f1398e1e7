//! Pipeline tunables and the line-based `key = value` config format.
//!
//! ```text
//! # comments start with '#'
//! resize.factor = 1
//! filter.mask = circular:5
//! red.r_min = 100
//! red.dominance_num = 3
//! red.dominance_denom = 2
//! morph.se = rect:3x3
//! morph.sequence = open,close
//! blob.connectivity = 8
//! verdict.min_uniformity = 0.85
//! ```
//!
//! Keys under `pilot.` belong to the simulator and are skipped here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blob::Connectivity;
use crate::footprint::{Footprint, FootprintError, Shape};
use crate::morph::{self, MorphOp};
use crate::segment::{ColorRange, Dominance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Footprint(#[from] FootprintError),
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { line: i + 1 })?;
        let key = k.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        out.push(Entry {
            line: i + 1,
            key: key.to_string(),
            value: v.trim().to_string(),
        });
    }
    Ok(out)
}

pub(crate) fn bad_value(key: &str, value: &str, reason: impl ToString) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

pub(crate) fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| bad_value(key, value, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub min_area_fraction: f64,
    pub max_area_fraction: f64,
    pub min_uniformity: f64,
    pub max_defect_ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            min_area_fraction: 0.02,
            max_area_fraction: 0.8,
            min_uniformity: 0.85,
            max_defect_ratio: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub resize_factor: usize,
    #[serde(with = "shape_text")]
    pub mask: Shape,
    pub color: ColorRange,
    #[serde(with = "shape_text")]
    pub se: Shape,
    #[serde(with = "sequence_text")]
    pub sequence: Vec<MorphOp>,
    #[serde(with = "connectivity_number")]
    pub connectivity: Connectivity,
    pub thresholds: Thresholds,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            resize_factor: 1,
            mask: Shape::Circular(5),
            color: ColorRange::default(),
            se: Shape::Rect(3, 3),
            sequence: vec![MorphOp::Open, MorphOp::Close],
            connectivity: Connectivity::Eight,
            thresholds: Thresholds::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.resize_factor == 0 {
            return Err(ConfigError::Invalid("resize factor must be >= 1".into()));
        }
        Footprint::from_shape(self.mask)?;
        Footprint::from_shape(self.se)?;
        self.color
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let t = &self.thresholds;
        for (name, v) in [
            ("min_area_fraction", t.min_area_fraction),
            ("max_area_fraction", t.max_area_fraction),
            ("min_uniformity", t.min_uniformity),
            ("max_defect_ratio", t.max_defect_ratio),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::Invalid(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if t.min_area_fraction > t.max_area_fraction {
            return Err(ConfigError::Invalid(
                "min_area_fraction exceeds max_area_fraction".into(),
            ));
        }
        Ok(())
    }

    /// Applies one key. Returns `Ok(false)` for keys this type does not own.
    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        let c = &mut self.color;
        match key {
            "resize.factor" => self.resize_factor = parse_value(key, value)?,
            "filter.mask" => self.mask = parse_value(key, value)?,
            "red.r_min" => c.r_min = parse_value(key, value)?,
            "red.r_max" => c.r_max = parse_value(key, value)?,
            "red.g_min" => c.g_min = parse_value(key, value)?,
            "red.g_max" => c.g_max = parse_value(key, value)?,
            "red.b_min" => c.b_min = parse_value(key, value)?,
            "red.b_max" => c.b_max = parse_value(key, value)?,
            "red.dominance" => {
                c.dominance = match value {
                    "none" | "off" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "red.dominance_num" | "red.dominance_denom" => {
                let n: u32 = parse_value(key, value)?;
                let cur = c.dominance.map_or((1, 1), |d| (d.num(), d.den()));
                let (num, den) = if key == "red.dominance_num" {
                    (n, cur.1)
                } else {
                    (cur.0, n)
                };
                c.dominance = set_dominance(key, value, num, den)?;
            }
            "morph.se" => self.se = parse_value(key, value)?,
            "morph.sequence" => {
                self.sequence = morph::parse_sequence(value).map_err(|e| bad_value(key, value, e))?
            }
            "blob.connectivity" => {
                self.connectivity = value
                    .parse()
                    .ok()
                    .and_then(Connectivity::from_number)
                    .ok_or_else(|| bad_value(key, value, "expected 4 or 8"))?
            }
            "verdict.min_area_fraction" => self.thresholds.min_area_fraction = parse_value(key, value)?,
            "verdict.max_area_fraction" => self.thresholds.max_area_fraction = parse_value(key, value)?,
            "verdict.min_uniformity" => self.thresholds.min_uniformity = parse_value(key, value)?,
            "verdict.max_defect_ratio" => self.thresholds.max_defect_ratio = parse_value(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Applies every non-`pilot.` entry, rejecting unknown keys, then
    /// validates the result.
    pub fn apply_entries(&mut self, entries: &[Entry]) -> Result<(), ConfigError> {
        let find = |k: &str| entries.iter().rev().find(|e| e.key == k);
        let num = find("red.dominance_num");
        let den = find("red.dominance_denom");
        for e in entries {
            if e.key.starts_with("pilot.") {
                continue;
            }
            // the numerator/denominator pair is applied together below
            if e.key == "red.dominance_num" || e.key == "red.dominance_denom" {
                continue;
            }
            if !self.apply_key(&e.key, &e.value)? {
                return Err(ConfigError::UnknownKey(e.key.clone()));
            }
        }
        if num.is_some() || den.is_some() {
            let cur = self.color.dominance.map_or((1, 1), |d| (d.num(), d.den()));
            let n = match num {
                Some(e) => parse_value(&e.key, &e.value)?,
                None => cur.0,
            };
            let d = match den {
                Some(e) => parse_value(&e.key, &e.value)?,
                None => cur.1,
            };
            let e = num.or(den).expect("one present");
            self.color.dominance = set_dominance(&e.key, &e.value, n, d)?;
        }
        self.validate()
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_entries(&parse_entries(text)?)?;
        Ok(cfg)
    }
}

/// A zero numerator disables the dominance test.
fn set_dominance(key: &str, value: &str, num: u32, den: u32) -> Result<Option<Dominance>, ConfigError> {
    if num == 0 {
        return Ok(None);
    }
    Dominance::new(num, den)
        .map(Some)
        .map_err(|e| bad_value(key, value, e))
}

mod shape_text {
    use super::Shape;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &Shape, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Shape, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

mod sequence_text {
    use super::{morph, MorphOp};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ops: &[MorphOp], ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&morph::format_sequence(ops))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<MorphOp>, D::Error> {
        morph::parse_sequence(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

mod connectivity_number {
    use super::Connectivity;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Connectivity, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_u8(c.as_number())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Connectivity, D::Error> {
        let n = u8::deserialize(d)?;
        Connectivity::from_number(n)
            .ok_or_else(|| serde::de::Error::custom(format!("connectivity must be 4 or 8, got {n}")))
    }
}
