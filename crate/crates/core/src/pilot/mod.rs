//! Closed-loop simulation: a synthetic camera renders a flat world of flower
//! discs, the inspection pipeline locates the flower, and a proportional
//! controller drives a differential-drive robot toward it.

pub mod camera;
pub mod control;
pub mod kinematics;
pub mod mission;
pub mod world;

pub use camera::{bearing_from_centroid, render_view, CameraModel};
pub use control::{steer, ControlParams, MotionCommand};
pub use kinematics::{step, NonPositiveDt, RobotState};
pub use mission::{run_mission, run_mission_with_frames, MissionLimits, MissionLog, MissionSettings, DT};
pub use world::{Flower, World};
