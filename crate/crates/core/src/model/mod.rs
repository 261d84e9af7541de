//! Planar sagittal-plane model of the humanoid and the gripped box.
//!
//! The robot is a serial chain of pitch joints fixed at the ankle. Both legs
//! and both arms are collapsed into single equivalent links, so the default
//! profile has five joints: ankle, knee, hip, shoulder, elbow. All statics
//! are quasi-static: torques and the centre of pressure follow from gravity
//! alone.

mod collision;
mod kinematics;
mod statics;

pub use collision::{
    collision_clearance, collision_clearance_from_chain, collision_ellipses, point_clearance,
    COLLISION_MARGIN,
};
pub use kinematics::{forward_kinematics, ChainState};
pub use statics::{
    com_x_gradient, cop_x, gravity_torque_jacobian, gravity_torques, gravity_torques_from_chain,
    system_com, system_com_from_chain, SystemCom,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Vec2;
use crate::scalar::{gravity, Real};

/// Schema version of the robot model config file.
pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("configuration has {got} joint angles, model has {expected} joints")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model schema version {found} != supported {expected}")]
    SchemaMismatch { found: u32, expected: u32 },
    #[error("malformed model file: {0}")]
    Malformed(String),
}

/// One rigid link of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link<R> {
    pub name: String,
    /// Link length, metres.
    pub length: R,
    /// Link mass, kilograms (both limbs combined for leg/arm links).
    pub mass: R,
    /// Centre of mass offset along the link axis from the proximal joint.
    pub com_offset: R,
}

/// Limits of one pitch joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec<R> {
    pub name: String,
    /// Lower angle limit, radians.
    pub q_min: R,
    /// Upper angle limit, radians.
    pub q_max: R,
    /// Torque limit magnitude, newton-metres.
    pub tau_max: R,
    /// Joint speed limit magnitude, radians/second.
    pub u_max: R,
}

/// Foot contact interval on the ground, foot frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportPolygon<R> {
    pub x_heel: R,
    pub x_toe: R,
}

impl<R: Real> SupportPolygon<R> {
    /// Centre of the support interval.
    pub fn center(&self) -> R {
        (self.x_heel + self.x_toe) * R::c(0.5)
    }

    /// Signed margin of `x` to the interval shrunk by `inset` on both ends.
    /// Positive means inside.
    pub fn margin(&self, x: R, inset: R) -> R {
        let lo = self.x_heel + inset;
        let hi = self.x_toe - inset;
        (x - lo).min(hi - x)
    }
}

/// Friction capacities of the two-hand grip under the fixed nominal squeeze.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandContactModel<R> {
    /// Nominal squeeze force per hand, newtons.
    pub nominal_grip_force: R,
    /// Hand/box friction coefficient.
    pub mu_grip: R,
    /// Effective contact patch radius, metres.
    pub contact_radius_r_eff: R,
    /// Number of hands gripping (default 2).
    pub hand_count: u32,
}

impl<R: Real> HandContactModel<R> {
    /// Total friction force capacity of the grip, newtons.
    pub fn f_cap(&self) -> R {
        R::c(self.hand_count as f64) * self.mu_grip * self.nominal_grip_force
    }

    /// Total friction torque capacity of the grip, newton-metres.
    pub fn tau_cap(&self) -> R {
        self.f_cap() * self.contact_radius_r_eff
    }
}

/// Joint angle vector. Angles are relative between consecutive links; zero
/// is the fully extended vertical chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration<R> {
    pub q: Vec<R>,
}

impl<R: Real> Configuration<R> {
    pub fn new(q: Vec<R>) -> Self {
        Self { q }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }
}

/// A box held by (or about to be gripped by) the hands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxAttachment<R> {
    /// Box weight, newtons.
    pub weight_g_box: R,
    /// Box COM horizontal coordinate, foot frame.
    pub com_x: R,
    /// Grip point in the foot frame.
    pub grip_point: Vec2<R>,
    /// Whether the box currently loads the robot.
    pub attached: bool,
}

impl<R: Real> BoxAttachment<R> {
    /// No box at all.
    pub fn none() -> Self {
        Self {
            weight_g_box: R::zero(),
            com_x: R::zero(),
            grip_point: Vec2::zero(),
            attached: false,
        }
    }

    /// Box mass in kilograms.
    pub fn mass(&self) -> R {
        self.weight_g_box / gravity::<R>()
    }
}

/// The full planar robot model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotModel<R> {
    pub schema_version: u32,
    pub links: Vec<Link<R>>,
    pub joints: Vec<JointSpec<R>>,
    pub support_polygon: SupportPolygon<R>,
    /// Total robot weight, newtons; must equal g * sum of link masses.
    pub total_weight_g_robot: R,
    pub hand_contact: HandContactModel<R>,
}

impl<R: Real> RobotModel<R> {
    /// Number of joints (= number of links).
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    /// Sum of link masses, kilograms.
    pub fn total_mass(&self) -> R {
        self.links.iter().map(|l| l.mass).sum()
    }

    /// Total chain length, metres.
    pub fn reach(&self) -> R {
        self.links.iter().map(|l| l.length).sum()
    }

    pub fn check_dim(&self, q: &Configuration<R>) -> Result<(), ModelError> {
        if q.dim() != self.dof() {
            return Err(ModelError::DimensionMismatch { got: q.dim(), expected: self.dof() });
        }
        Ok(())
    }

    /// Validate all structural invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(ModelError::SchemaMismatch {
                found: self.schema_version,
                expected: MODEL_SCHEMA_VERSION,
            });
        }
        let bad = |msg: String| Err(ModelError::InvalidModel(msg));
        if self.links.is_empty() || self.links.len() != self.joints.len() {
            return bad(format!(
                "expected matching link/joint counts, got {} links, {} joints",
                self.links.len(),
                self.joints.len()
            ));
        }
        for l in &self.links {
            if !(l.length > R::zero()) {
                return bad(format!("link {} has non-positive length", l.name));
            }
            if !(l.mass >= R::zero()) {
                return bad(format!("link {} has negative mass", l.name));
            }
            if !(l.com_offset >= R::zero() && l.com_offset <= l.length) {
                return bad(format!("link {} com_offset outside [0, length]", l.name));
            }
        }
        for j in &self.joints {
            if !(j.q_min < j.q_max) {
                return bad(format!("joint {} has q_min >= q_max", j.name));
            }
            if !(j.tau_max > R::zero()) {
                return bad(format!("joint {} has non-positive tau_max", j.name));
            }
            if !(j.u_max > R::zero()) {
                return bad(format!("joint {} has non-positive u_max", j.name));
            }
        }
        if !(self.support_polygon.x_heel < self.support_polygon.x_toe) {
            return bad("support polygon has x_heel >= x_toe".to_string());
        }
        let hc = &self.hand_contact;
        if !(hc.nominal_grip_force > R::zero()
            && hc.mu_grip > R::zero()
            && hc.contact_radius_r_eff > R::zero()
            && hc.hand_count > 0)
        {
            return bad("hand contact fields must all be positive".to_string());
        }
        let expected = gravity::<R>() * self.total_mass();
        let rel = ((self.total_weight_g_robot - expected) / expected).abs();
        if !(rel <= R::c(1e-9)) {
            return bad(format!(
                "total_weight_g_robot {} inconsistent with g * link masses {}",
                self.total_weight_g_robot, expected
            ));
        }
        Ok(())
    }

    /// Parse and validate a model from its JSON config text.
    pub fn from_json(text: &str) -> Result<Self, ModelError>
    where
        R: serde::de::DeserializeOwned,
    {
        // Surface version mismatches before full deserialization.
        let probe: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
        if let Some(v) = probe.get("schema_version").and_then(|v| v.as_u64()) {
            if v as u32 != MODEL_SCHEMA_VERSION {
                return Err(ModelError::SchemaMismatch {
                    found: v as u32,
                    expected: MODEL_SCHEMA_VERSION,
                });
            }
        }
        let model: Self =
            serde_json::from_value(probe).map_err(|e| ModelError::Malformed(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String
    where
        R: serde::Serialize,
    {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

/// The shipped NAO-like default profile: 5.3 kg over five collapsed links,
/// 0.58 m of chain, foot interval [-0.05, 0.10].
pub fn default_profile<R: Real>() -> RobotModel<R> {
    let links = vec![
        Link { name: "shank".into(), length: R::c(0.11), mass: R::c(0.6), com_offset: R::c(0.055) },
        Link { name: "thigh".into(), length: R::c(0.11), mass: R::c(0.8), com_offset: R::c(0.055) },
        Link { name: "torso".into(), length: R::c(0.15), mass: R::c(2.9), com_offset: R::c(0.075) },
        Link {
            name: "upper_arm".into(),
            length: R::c(0.09),
            mass: R::c(0.6),
            com_offset: R::c(0.045),
        },
        Link {
            name: "forearm".into(),
            length: R::c(0.12),
            mass: R::c(0.4),
            com_offset: R::c(0.06),
        },
    ];
    let joint = |name: &str, q_min: f64, q_max: f64, tau_max: f64| JointSpec {
        name: name.into(),
        q_min: R::c(q_min),
        q_max: R::c(q_max),
        tau_max: R::c(tau_max),
        u_max: R::c(0.2),
    };
    let joints = vec![
        joint("ankle", -1.0, 1.3, 6.5),
        joint("knee", -2.3, 0.3, 6.0),
        joint("hip", -0.5, 2.6, 6.0),
        joint("shoulder", -0.8, 2.4, 3.0),
        joint("elbow", -0.8, 2.2, 1.5),
    ];
    let total_mass: R = links.iter().map(|l| l.mass).sum();
    RobotModel {
        schema_version: MODEL_SCHEMA_VERSION,
        links,
        joints,
        support_polygon: SupportPolygon { x_heel: R::c(-0.05), x_toe: R::c(0.10) },
        total_weight_g_robot: gravity::<R>() * total_mass,
        hand_contact: HandContactModel {
            nominal_grip_force: R::c(10.0),
            mu_grip: R::c(0.5),
            contact_radius_r_eff: R::c(0.0417),
            hand_count: 2,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_is_valid() {
        let m: RobotModel<f64> = default_profile();
        m.validate().unwrap();
        assert_eq!(m.dof(), 5);
        assert!((m.total_weight_g_robot - 9.81 * 5.3).abs() < 1e-12);
        assert!((m.reach() - 0.58).abs() < 1e-12);
    }

    #[test]
    fn default_profile_valid_in_f32() {
        let m: RobotModel<f32> = default_profile();
        m.validate().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let m: RobotModel<f64> = default_profile();
        let text = m.to_json();
        let back = RobotModel::<f64>::from_json(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn schema_mismatch_reported() {
        let m: RobotModel<f64> = default_profile();
        let text = m.to_json().replace("\"schema_version\": 1", "\"schema_version\": 7");
        match RobotModel::<f64>::from_json(&text) {
            Err(ModelError::SchemaMismatch { found: 7, expected: 1 }) => {}
            other => panic!("expected schema mismatch, got {other:?}"),
        }
    }

    #[test]
    fn capacities() {
        let hc = HandContactModel {
            nominal_grip_force: 10.0f64,
            mu_grip: 0.5,
            contact_radius_r_eff: 0.02,
            hand_count: 2,
        };
        assert!((hc.f_cap() - 10.0).abs() < 1e-12);
        assert!((hc.tau_cap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn invalid_weight_rejected() {
        let mut m: RobotModel<f64> = default_profile();
        m.total_weight_g_robot += 1.0;
        assert!(matches!(m.validate(), Err(ModelError::InvalidModel(_))));
    }
}
