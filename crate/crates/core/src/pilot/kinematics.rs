use std::f64::consts::PI;

use thiserror::Error;

use super::control::MotionCommand;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("time step must be positive, got {0}")]
pub struct NonPositiveDt(pub f64);

/// Planar pose in the world frame. Heading is counter-clockwise from +x and
/// kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl RobotState {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: normalize_angle(heading),
        }
    }

    pub fn origin() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        (x - self.x).hypot(y - self.y)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    let t = a.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Exact differential-drive update for constant wheel speeds over `dt`.
pub fn step(state: RobotState, cmd: MotionCommand, track: f64, dt: f64) -> Result<RobotState, NonPositiveDt> {
    if dt <= 0.0 || dt.is_nan() {
        return Err(NonPositiveDt(dt));
    }
    let v = (cmd.v_left + cmd.v_right) / 2.0;
    let omega = (cmd.v_right - cmd.v_left) / track;
    let th = state.heading;
    let (x, y, heading) = if omega.abs() < 1e-9 {
        (state.x + v * dt * th.cos(), state.y + v * dt * th.sin(), th)
    } else {
        let th1 = th + omega * dt;
        let r = v / omega;
        (
            state.x + r * (th1.sin() - th.sin()),
            state.y + r * (th.cos() - th1.cos()),
            th1,
        )
    };
    Ok(RobotState::new(x, y, heading))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRACK: f64 = 0.3;

    fn cmd(l: f64, r: f64) -> MotionCommand {
        MotionCommand { v_left: l, v_right: r }
    }

    #[test]
    fn straight_line() {
        let s = step(RobotState::origin(), cmd(1.0, 1.0), TRACK, 1.0).unwrap();
        assert_eq!((s.x, s.y, s.heading), (1.0, 0.0, 0.0));
    }

    #[test]
    fn spin_in_place() {
        let s = step(RobotState::new(2.0, -1.0, 0.3), cmd(-0.15, 0.15), TRACK, 0.5).unwrap();
        assert!((s.x - 2.0).abs() < 1e-12 && (s.y + 1.0).abs() < 1e-12);
        assert!((s.heading - 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_command_holds_pose() {
        let s0 = RobotState::new(0.4, 0.7, -2.0);
        assert_eq!(step(s0, cmd(0.0, 0.0), TRACK, 1.0 / 15.0).unwrap(), s0);
    }

    #[test]
    fn rejects_bad_dt() {
        assert!(step(RobotState::origin(), cmd(1.0, 1.0), TRACK, 0.0).is_err());
        assert!(step(RobotState::origin(), cmd(1.0, 1.0), TRACK, -0.1).is_err());
        assert!(step(RobotState::origin(), cmd(1.0, 1.0), TRACK, f64::NAN).is_err());
    }

    #[test]
    fn heading_wraps_into_half_open_interval() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((normalize_angle(-5.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
    }
}
