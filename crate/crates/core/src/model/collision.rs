//! Box/robot collision model: the leg pair (shank+thigh) and the torso are
//! each enclosed in one 2D ellipse; the box must keep all corner points
//! outside both.

use crate::geom::{BoxRect, Ellipse, Vec2};
use crate::model::{ChainState, Configuration, ModelError, RobotModel};
use crate::scalar::Real;

/// Inflation margin around the enclosed link segments, metres.
pub const COLLISION_MARGIN: f64 = 0.005;

/// The two enclosing ellipses for a chain state: one over the leg segment
/// (ankle to hip) and one over the torso segment (hip to shoulder).
pub fn collision_ellipses<R: Real>(model: &RobotModel<R>, fk: &ChainState<R>) -> [Ellipse<R>; 2] {
    let margin = R::c(COLLISION_MARGIN);
    // Leg ellipse spans links 0..=1, torso ellipse spans link 2. Models with
    // fewer than three links degenerate to the available prefix.
    let n = model.dof();
    let hip = fk.joints.get(2.min(n - 1)).copied().unwrap_or(fk.hand);
    let shoulder = if n > 3 { fk.joints[3] } else { fk.hand };
    let legs = Ellipse::enclosing_segment(fk.joints[0], hip, margin);
    let torso = Ellipse::enclosing_segment(hip, shoulder, margin);
    [legs, torso]
}

/// Minimum signed clearance of the box corner points against both ellipses.
/// Positive means every corner is outside every ellipse.
pub fn collision_clearance<R: Real>(
    model: &RobotModel<R>,
    q: &Configuration<R>,
    box_pose: &BoxRect<R>,
) -> Result<R, ModelError> {
    let fk = crate::model::forward_kinematics(model, q)?;
    Ok(collision_clearance_from_chain(model, &fk, box_pose))
}

/// Same as [`collision_clearance`] but reusing a chain state.
pub fn collision_clearance_from_chain<R: Real>(
    model: &RobotModel<R>,
    fk: &ChainState<R>,
    box_pose: &BoxRect<R>,
) -> R {
    let ellipses = collision_ellipses(model, fk);
    let mut min = R::infinity();
    for corner in box_pose.corners() {
        for e in &ellipses {
            let m = e.signed_margin(corner);
            if m < min {
                min = m;
            }
        }
    }
    min
}

/// Signed margin of a single point against a chain's ellipses.
pub fn point_clearance<R: Real>(model: &RobotModel<R>, fk: &ChainState<R>, p: Vec2<R>) -> R {
    let ellipses = collision_ellipses(model, fk);
    let a = ellipses[0].signed_margin(p);
    let b = ellipses[1].signed_margin(p);
    a.min(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_profile;

    fn upright() -> (RobotModel<f64>, Configuration<f64>) {
        (default_profile::<f64>(), Configuration::new(vec![0.0; 5]))
    }

    #[test]
    fn far_box_is_clear() {
        let (m, q) = upright();
        let pose = BoxRect {
            center: Vec2::new(1.0, 0.07),
            theta: 0.0,
            length: 0.26,
            height: 0.14,
        };
        assert!(collision_clearance(&m, &q, &pose).unwrap() > 0.0);
    }

    #[test]
    fn corner_at_ellipse_center_is_inside() {
        let (m, q) = upright();
        let fk = crate::model::forward_kinematics(&m, &q).unwrap();
        let ellipses = collision_ellipses(&m, &fk);
        let c = ellipses[0].center;
        // Box whose first corner (-L/2, -H/2 offset) lands on the centre.
        let pose = BoxRect {
            center: Vec2::new(c.x + 0.13, c.z + 0.07),
            theta: 0.0,
            length: 0.26,
            height: 0.14,
        };
        assert!(collision_clearance(&m, &q, &pose).unwrap() < 0.0);
    }

    #[test]
    fn corner_on_boundary_is_zero() {
        let (m, q) = upright();
        let fk = crate::model::forward_kinematics(&m, &q).unwrap();
        let e = collision_ellipses(&m, &fk)[0];
        // Upright chain: leg ellipse axis is vertical, so the point at
        // (semi_minor, center.z) lies exactly on the boundary.
        let boundary = Vec2::new(e.center.x + e.semi_minor, e.center.z);
        let pose = BoxRect {
            center: Vec2::new(boundary.x + 0.13, boundary.z + 0.07),
            theta: 0.0,
            length: 0.26,
            height: 0.14,
        };
        let c = collision_clearance(&m, &q, &pose).unwrap();
        assert!(c.abs() <= 1e-9, "clearance {c}");
    }
}
