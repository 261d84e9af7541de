//! Direct transcription of the quasi-static lifting problem plus the
//! initial- and goal-configuration programs.
//!
//! A trajectory is a sequence of knots `(q[k], u[k])` with the exact state
//! transition `q[k+1] = q[k] + u[k] * dt`. The box rides the hand from the
//! moment of the grip: its rectangle translates with the hand point and its
//! orientation never changes.

mod collocation;
mod poses;
mod validate;

pub use collocation::solve_trajectory;
pub use poses::{solve_goal_config, solve_initial_config, solve_lifted_config, PoseOptions};
pub use validate::{validate_trajectory, ValidationTolerances};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{BoxRect, Vec2};
use crate::scalar::Real;

/// Schema version of the weights config file.
pub const WEIGHTS_SCHEMA_VERSION: u32 = 1;

/// One lifting task instance: the cell parameters plus the fixed world
/// placement of the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftTask<R> {
    /// Box weight, newtons.
    pub weight: R,
    /// Box COM in the box frame (from the near bottom corner), metres.
    pub com_x_box: R,
    /// Largest allowed horizontal distance between hand and box COM, metres.
    pub grip_distance: R,
    /// World x of the box frame origin (near bottom corner, robot side).
    pub box_origin_x: R,
    /// In-plane box length, metres.
    pub box_length: R,
    /// Box height, metres.
    pub box_height: R,
    /// Initial box orientation, radians.
    pub theta_0: R,
}

impl<R: Real> LiftTask<R> {
    /// Box COM world x coordinate while the box rests on the ground.
    pub fn com_world_x(&self) -> R {
        self.box_origin_x + self.com_x_box
    }

    /// Box rectangle while resting on the ground.
    pub fn ground_rect(&self) -> BoxRect<R> {
        BoxRect {
            center: Vec2::new(
                self.box_origin_x + self.box_length * R::c(0.5),
                self.box_height * R::c(0.5),
            ),
            theta: self.theta_0,
            length: self.box_length,
            height: self.box_height,
        }
    }

    /// Top surface height of the grounded box.
    pub fn top_z(&self) -> R {
        self.box_height
    }

    /// Horizontal grip interval: within `grip_distance` of the COM and on
    /// the box top surface.
    pub fn grip_interval(&self) -> (R, R) {
        let com = self.com_world_x();
        let lo = (com - self.grip_distance).max(self.box_origin_x);
        let hi = (com + self.grip_distance).min(self.box_origin_x + self.box_length);
        (lo, hi)
    }
}

/// Cost weights and pose-program parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajOptWeights<R> {
    pub schema_version: u32,
    /// Terminal weight (diagonal scale of the identity).
    pub p_f: R,
    /// Path weight on the distance to the goal configuration.
    pub q_q: R,
    /// Path weight on joint torques.
    pub q_t: R,
    /// Path weight on the system COM excursion.
    pub q_c: R,
    /// Initial-pose weights: stability, joint torques, hand torque.
    pub w1: R,
    pub w2: R,
    pub w3: R,
    /// Goal-pose weights: stability, joint torques.
    pub w4: R,
    pub w5: R,
    /// Goal-pose bound on leg joint angles, radians.
    pub sigma_leg: R,
}

impl<R: Real> Default for TrajOptWeights<R> {
    fn default() -> Self {
        Self {
            schema_version: WEIGHTS_SCHEMA_VERSION,
            p_f: R::c(100.0),
            q_q: R::one(),
            q_t: R::c(0.01),
            q_c: R::c(10.0),
            w1: R::c(10.0),
            w2: R::c(0.01),
            w3: R::one(),
            w4: R::c(10.0),
            w5: R::c(0.01),
            sigma_leg: R::c(0.35),
        }
    }
}

impl<R: Real> TrajOptWeights<R> {
    pub fn validate(&self) -> Result<(), TrajOptError> {
        let all = [
            self.p_f, self.q_q, self.q_t, self.q_c, self.w1, self.w2, self.w3, self.w4,
            self.w5, self.sigma_leg,
        ];
        if all.iter().any(|w| !(*w >= R::zero()) || !w.is_finite()) {
            return Err(TrajOptError::InvalidWeights);
        }
        if self.schema_version != WEIGHTS_SCHEMA_VERSION {
            return Err(TrajOptError::WeightsSchemaMismatch {
                found: self.schema_version,
                expected: WEIGHTS_SCHEMA_VERSION,
            });
        }
        Ok(())
    }
}

/// One trajectory sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knot<R> {
    pub q: Vec<R>,
    pub u: Vec<R>,
}

/// A transcribed lifting trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<R> {
    pub dt: R,
    pub knots: Vec<Knot<R>>,
    pub task: LiftTask<R>,
    /// Box orientation per knot (constant by construction).
    pub theta_box: Vec<R>,
    /// Grip point at knot 0, world coordinates.
    pub grip_world: Vec2<R>,
    /// Box rectangle centre per knot, world coordinates.
    pub box_path: Vec<Vec2<R>>,
}

impl<R: Real> Trajectory<R> {
    pub fn n_knots(&self) -> usize {
        self.knots.len()
    }

    /// Grip point at knot `k`: the knot-0 grip translated with the box.
    pub fn grip_at(&self, k: usize) -> Vec2<R> {
        self.grip_world.add(self.box_path[k].sub(self.box_path[0]))
    }

    /// Box COM world x at knot `k`.
    pub fn box_com_x_at(&self, k: usize) -> R {
        self.task.com_world_x() + (self.box_path[k].x - self.box_path[0].x)
    }

    /// Box rectangle at knot `k`.
    pub fn box_rect_at(&self, k: usize) -> BoxRect<R> {
        BoxRect {
            center: self.box_path[k],
            theta: self.theta_box[k],
            length: self.task.box_length,
            height: self.task.box_height,
        }
    }
}

/// Worst-case margins of a trajectory against every path constraint,
/// computed purely from `model` primitives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport<R> {
    pub pass: bool,
    /// Worst COP distance inside the inset support interval (>= 0 is good).
    pub cop_margin: R,
    /// Worst `tau_max - |tau|` over knots and joints.
    pub torque_margin: R,
    /// Worst distance inside the joint limits.
    pub joint_margin: R,
    /// Largest hand-to-grip-point distance.
    pub grip_error: R,
    /// Worst box-corner clearance against the body ellipses.
    pub collision_clearance: R,
    /// Largest per-interval speed-bound violation (<= 0 is good).
    pub speed_violation: R,
    /// Largest box orientation drift from knot 0.
    pub theta_drift: R,
    /// Whether `q[k+1] == q[k] + u[k] dt` holds bit-exactly everywhere.
    pub transcription_exact: bool,
    /// First failing knot and the constraint that failed, if any.
    pub first_failure: Option<(usize, String)>,
}

#[derive(Debug, Error)]
pub enum TrajOptError {
    #[error("grip region is beyond kinematic reach")]
    Unreachable,
    #[error("no feasible pose satisfies the constraints")]
    InfeasiblePose,
    #[error("trajectory optimization did not converge")]
    InfeasibleTrajectory,
    #[error("solved trajectory failed independent validation")]
    ValidationFailed,
    #[error("weights must be finite and non-negative")]
    InvalidWeights,
    #[error("weights schema version {found} != supported {expected}")]
    WeightsSchemaMismatch { found: u32, expected: u32 },
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}
