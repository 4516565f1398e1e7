use std::fmt::Write as _;

use crate::config::{ConfigError, PipelineConfig};
use crate::diagnose::{inspect, InspectError, QualityReport, Verdict};
use crate::footprint::Shape;
use crate::raster::RasterImage;

use super::camera::{bearing_from_centroid, render_view, CameraModel};
use super::control::{search, steer, ControlParams, MotionCommand};
use super::kinematics::{step, RobotState};
use super::world::World;

/// Simulation step, one camera frame at 15 fps.
pub const DT: f64 = 1.0 / 15.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissionLimits {
    pub max_steps: usize,
    /// Capture when the nearest flower centre is closer than this, metres.
    pub capture_distance: f64,
}

impl Default for MissionLimits {
    fn default() -> Self {
        Self {
            max_steps: 500,
            capture_distance: 0.2,
        }
    }
}

/// Pipeline settings used in the loop: half-resolution frames, a smaller
/// mask, and a minimum area low enough to see a 5 cm flower at 3 m.
pub fn mission_pipeline() -> PipelineConfig {
    let mut cfg = PipelineConfig {
        resize_factor: 2,
        mask: Shape::Circular(2),
        ..PipelineConfig::default()
    };
    cfg.thresholds.min_area_fraction = 0.0002;
    cfg
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionSettings {
    pub pipeline: PipelineConfig,
    pub camera: CameraModel,
    pub control: ControlParams,
    pub limits: MissionLimits,
    pub dt: f64,
}

impl Default for MissionSettings {
    fn default() -> Self {
        Self {
            pipeline: mission_pipeline(),
            camera: CameraModel::default(),
            control: ControlParams::default(),
            limits: MissionLimits::default(),
            dt: DT,
        }
    }
}

impl MissionSettings {
    /// Applies `pilot.*` keys to the controller, camera and limits and every
    /// other key to the pipeline.
    pub fn apply_entries(&mut self, entries: &[crate::config::Entry]) -> Result<(), ConfigError> {
        for e in entries {
            if !e.key.starts_with("pilot.") {
                continue;
            }
            let known = self.control.apply_key(&e.key, &e.value)?
                || self.camera.apply_key(&e.key, &e.value)?
                || match e.key.as_str() {
                    "pilot.capture_distance" => {
                        self.limits.capture_distance = crate::config::parse_value(&e.key, &e.value)?;
                        true
                    }
                    "pilot.max_steps" => {
                        self.limits.max_steps = crate::config::parse_value(&e.key, &e.value)?;
                        true
                    }
                    _ => false,
                };
            if !known {
                return Err(ConfigError::UnknownKey(e.key.clone()));
            }
        }
        self.pipeline.apply_entries(entries)?;
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.pipeline.validate()?;
        self.camera.validate()?;
        self.control.validate()?;
        if self.dt.is_nan() || self.dt <= 0.0 {
            return Err(ConfigError::Invalid("dt must be positive".into()));
        }
        Ok(())
    }
}

/// One control cycle: the pose the frame was taken from, what the pipeline
/// said, and the wheel command issued.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionStep {
    pub step: usize,
    pub state: RobotState,
    pub verdict: Verdict,
    pub command: MotionCommand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionLog {
    pub steps: Vec<MissionStep>,
    /// Step index at which the capture condition first held.
    pub captured_at: Option<usize>,
    pub final_state: RobotState,
}

impl MissionLog {
    pub fn captured(&self) -> bool {
        self.captured_at.is_some()
    }

    /// CSV with header `step,x,y,heading,verdict,v_l,v_r`, six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,x,y,heading,verdict,v_l,v_r\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{},{:.6},{:.6}",
                s.step,
                s.state.x,
                s.state.y,
                s.state.heading,
                s.verdict,
                s.command.v_left,
                s.command.v_right
            );
        }
        out
    }
}

/// Wheel command for one inspected frame: search on no flower, otherwise
/// steer toward the blob centroid.
pub fn command_for(report: &QualityReport, cam_fov: f64, control: &ControlParams) -> Option<MotionCommand> {
    let blob = report.blob.as_ref().filter(|_| report.detected)?;
    let cam = CameraModel {
        width: report.source.width,
        height: report.source.height,
        fov: cam_fov,
        ..CameraModel::default()
    };
    let bearing = bearing_from_centroid(blob.centroid[0], &cam);
    Some(steer(bearing, report.area_fraction, control))
}

pub fn run_mission(world: &World, start: RobotState, settings: &MissionSettings) -> Result<MissionLog, InspectError> {
    run_mission_with_frames(world, start, settings, |_, _, _| {})
}

/// Like [`run_mission`], handing every rendered frame and its report to
/// `on_frame` before the command is applied.
pub fn run_mission_with_frames(
    world: &World,
    start: RobotState,
    settings: &MissionSettings,
    mut on_frame: impl FnMut(usize, &RasterImage, &QualityReport),
) -> Result<MissionLog, InspectError> {
    settings.validate()?;
    let limits = settings.limits;
    let captured = |s: &RobotState| {
        world
            .nearest_distance(s)
            .is_some_and(|d| d < limits.capture_distance)
    };

    let mut state = start;
    let mut steps = Vec::new();
    for i in 0..limits.max_steps {
        if captured(&state) {
            return Ok(MissionLog {
                steps,
                captured_at: Some(i),
                final_state: state,
            });
        }
        let frame = render_view(world, &state, &settings.camera);
        let report = inspect(&frame, &settings.pipeline)?;
        on_frame(i, &frame, &report);
        let command = command_for(&report, settings.camera.fov, &settings.control)
            .unwrap_or_else(|| search(&settings.control));
        steps.push(MissionStep {
            step: i,
            state,
            verdict: report.verdict,
            command,
        });
        state = step(state, command, settings.control.track, settings.dt).expect("dt validated");
    }
    let captured_at = captured(&state).then_some(limits.max_steps);
    Ok(MissionLog {
        steps,
        captured_at,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pilot::world::{Flower, DEFAULT_FLOWER_COLOR};

    #[test]
    fn empty_world_exhausts_steps() {
        let settings = MissionSettings {
            limits: MissionLimits {
                max_steps: 12,
                ..MissionLimits::default()
            },
            ..MissionSettings::default()
        };
        let log = run_mission(&World::default(), RobotState::origin(), &settings).unwrap();
        assert!(!log.captured());
        assert_eq!(log.steps.len(), 12);
        assert!(log.steps.iter().all(|s| s.verdict == Verdict::NoFlower));
        // searching spins in place
        assert!(log.final_state.x.abs() < 1e-12 && log.final_state.y.abs() < 1e-12);
        assert_eq!(log.to_csv().lines().count(), 13);
    }

    #[test]
    fn flower_underfoot_is_captured_immediately() {
        let world = World {
            flowers: vec![Flower {
                x: 0.0,
                y: 0.0,
                radius: 0.05,
                color: DEFAULT_FLOWER_COLOR,
            }],
            ..World::default()
        };
        let log = run_mission(&world, RobotState::origin(), &MissionSettings::default()).unwrap();
        assert_eq!(log.captured_at, Some(0));
        assert!(log.steps.is_empty());
    }

    #[test]
    fn drives_to_flower_dead_ahead() {
        let world = World {
            flowers: vec![Flower {
                x: 2.0,
                y: 0.0,
                radius: 0.05,
                color: DEFAULT_FLOWER_COLOR,
            }],
            ..World::default()
        };
        let settings = MissionSettings::default();
        let log = run_mission(&world, RobotState::origin(), &settings).unwrap();
        assert!(log.captured(), "{:?}", log.final_state);
        let d = world.nearest_distance(&log.final_state).unwrap();
        assert!(d < settings.limits.capture_distance);
    }
}
