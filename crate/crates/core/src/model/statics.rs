//! Quasi-static force quantities: system centre of mass, gravity-induced
//! joint torques and the centre of pressure.
//!
//! Under the quasi-static assumption there are no inertial forces, so the
//! centre of pressure coincides with the horizontal coordinate of the total
//! system COM, and joint torques are pure gravity lever sums.

use crate::model::{BoxAttachment, ChainState, Configuration, ModelError, RobotModel};
use crate::scalar::{gravity, Real};

/// Mass-weighted mean of the system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemCom<R> {
    pub com_x: R,
    pub com_z: R,
    /// Link masses plus attached box mass, kilograms.
    pub total_mass: R,
}

/// System centre of mass. An attached box contributes its mass at
/// `box.com_x`; its vertical coordinate is taken at the grip point (the
/// vertical COM offset inside the box never enters the planar statics).
pub fn system_com<R: Real>(
    model: &RobotModel<R>,
    q: &Configuration<R>,
    attachment: &BoxAttachment<R>,
) -> Result<SystemCom<R>, ModelError> {
    let fk = crate::model::forward_kinematics(model, q)?;
    Ok(system_com_from_chain(model, &fk, attachment))
}

/// Same as [`system_com`] but reusing an already computed chain state.
pub fn system_com_from_chain<R: Real>(
    model: &RobotModel<R>,
    fk: &ChainState<R>,
    attachment: &BoxAttachment<R>,
) -> SystemCom<R> {
    let mut mx = R::zero();
    let mut mz = R::zero();
    let mut mass = R::zero();
    for (link, com) in model.links.iter().zip(&fk.link_coms) {
        mx = mx + link.mass * com.x;
        mz = mz + link.mass * com.z;
        mass = mass + link.mass;
    }
    if attachment.attached {
        let mb = attachment.mass();
        mx = mx + mb * attachment.com_x;
        mz = mz + mb * attachment.grip_point.z;
        mass = mass + mb;
    }
    SystemCom { com_x: mx / mass, com_z: mz / mass, total_mass: mass }
}

/// Gravity-induced torque at every joint: the lever sum of all masses distal
/// to the joint, plus the box when attached. Positive torque resists forward
/// (toward-box) toppling.
pub fn gravity_torques<R: Real>(
    model: &RobotModel<R>,
    q: &Configuration<R>,
    attachment: &BoxAttachment<R>,
) -> Result<Vec<R>, ModelError> {
    let fk = crate::model::forward_kinematics(model, q)?;
    Ok(gravity_torques_from_chain(model, &fk, attachment))
}

/// Same as [`gravity_torques`] but reusing a chain state.
pub fn gravity_torques_from_chain<R: Real>(
    model: &RobotModel<R>,
    fk: &ChainState<R>,
    attachment: &BoxAttachment<R>,
) -> Vec<R> {
    let g = gravity::<R>();
    let n = model.dof();
    let mut tau = vec![R::zero(); n];
    for j in 0..n {
        let xj = fk.joints[j].x;
        let mut lever = R::zero();
        for i in j..n {
            lever = lever + model.links[i].mass * (fk.link_coms[i].x - xj);
        }
        if attachment.attached {
            lever = lever + attachment.mass() * (attachment.com_x - xj);
        }
        tau[j] = g * lever;
    }
    tau
}

/// Jacobian `d tau_j / d q_k` of [`gravity_torques`] for a box that rides
/// the hand (its COM translates with the hand point, constant orientation,
/// which is the attachment model used along trajectories).
pub fn gravity_torque_jacobian<R: Real>(
    model: &RobotModel<R>,
    fk: &ChainState<R>,
    attachment: &BoxAttachment<R>,
) -> Vec<Vec<R>> {
    let g = gravity::<R>();
    let n = model.dof();
    let last = n - 1;
    let mb = if attachment.attached { attachment.mass() } else { R::zero() };
    let mut jac = vec![vec![R::zero(); n]; n];
    for j in 0..n {
        for k in 0..n {
            let mut d = R::zero();
            // d x_j / d q_k: joint j origin depends on q_0..q_{j-1}.
            let dxj = if k < j { fk.joints[j].z - fk.joints[k].z } else { R::zero() };
            for i in j..n {
                let dcx = if k <= i { fk.link_coms[i].z - fk.joints[k].z } else { R::zero() };
                d = d + model.links[i].mass * (dcx - dxj);
            }
            if attachment.attached {
                let dbx = fk.dpx_dq(k, fk.hand, last);
                d = d + mb * (dbx - dxj);
            }
            jac[j][k] = g * d;
        }
    }
    jac
}

/// Gradient `d COM_x / d q_k` of the system COM, box riding the hand.
pub fn com_x_gradient<R: Real>(
    model: &RobotModel<R>,
    fk: &ChainState<R>,
    attachment: &BoxAttachment<R>,
) -> Vec<R> {
    let n = model.dof();
    let last = n - 1;
    let mut mass: R = model.total_mass();
    let mb = if attachment.attached { attachment.mass() } else { R::zero() };
    mass = mass + mb;
    (0..n)
        .map(|k| {
            let mut d = R::zero();
            for i in k..n {
                d = d + model.links[i].mass * (fk.link_coms[i].z - fk.joints[k].z);
            }
            if attachment.attached {
                d = d + mb * fk.dpx_dq(k, fk.hand, last);
            }
            d / mass
        })
        .collect()
}

/// Centre of pressure, foot frame. Quasi-statics make this identical to the
/// system COM horizontal coordinate, computed through the same path.
pub fn cop_x<R: Real>(
    model: &RobotModel<R>,
    q: &Configuration<R>,
    attachment: &BoxAttachment<R>,
) -> Result<R, ModelError> {
    Ok(system_com(model, q, attachment)?.com_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::model::{default_profile, forward_kinematics, Link};
    use rand::{Rng, SeedableRng};

    fn two_mass_model() -> RobotModel<f64> {
        let mut m = default_profile::<f64>();
        m.links = vec![
            Link { name: "a".into(), length: 0.1, mass: 1.0, com_offset: 0.0 },
            Link { name: "b".into(), length: 0.1, mass: 1.0, com_offset: 0.0 },
        ];
        m.joints.truncate(2);
        m.total_weight_g_robot = 9.81 * 2.0;
        m
    }

    #[test]
    fn two_point_masses_symmetric() {
        // 1 kg at x=0 and 1 kg at x=0.1: second link com sits at the top of a
        // horizontal first link.
        let m = two_mass_model();
        let q = Configuration::new(vec![std::f64::consts::FRAC_PI_2, 0.0]);
        let com = system_com(&m, &q, &BoxAttachment::none()).unwrap();
        assert!((com.com_x - 0.05).abs() < 1e-12);
        assert!((com.total_mass - 2.0).abs() < 1e-15);
    }

    #[test]
    fn detached_box_ignored() {
        let m = default_profile::<f64>();
        let q = Configuration::new(vec![0.3, -0.4, 0.5, 0.2, 0.1]);
        let detached = BoxAttachment {
            weight_g_box: 50.0,
            com_x: 9.0,
            grip_point: Vec2::new(9.0, 9.0),
            attached: false,
        };
        let a = system_com(&m, &q, &detached).unwrap();
        let b = system_com(&m, &q, &BoxAttachment::none()).unwrap();
        assert_eq!(a.com_x, b.com_x);
        assert_eq!(a.total_mass, b.total_mass);
    }

    #[test]
    fn weighted_mean_with_box() {
        // Robot COM_x = 0 (vertical stack), 5.3 kg total, box 0.85 kg at
        // x = 0.1447058823529412: COM_x = 0.02.
        let m = default_profile::<f64>();
        let q = Configuration::new(vec![0.0; 5]);
        let p_box = 0.12300000000000001 / 0.85;
        let att = BoxAttachment {
            weight_g_box: 0.85 * 9.81,
            com_x: p_box,
            grip_point: Vec2::new(p_box, 0.14),
            attached: true,
        };
        let com = system_com(&m, &q, &att).unwrap();
        assert!((com.com_x - 0.02).abs() < 1e-12, "com_x = {}", com.com_x);
        assert!((com.total_mass - 6.15).abs() < 1e-12);
    }

    #[test]
    fn single_link_torque() {
        let mut m = two_mass_model();
        m.links.truncate(1);
        m.links[0].com_offset = 0.05;
        m.joints.truncate(1);
        m.total_weight_g_robot = 9.81;
        // Horizontal link: |tau| = 1 * 9.81 * 0.05.
        let q = Configuration::new(vec![std::f64::consts::FRAC_PI_2]);
        let tau = gravity_torques(&m, &q, &BoxAttachment::none()).unwrap();
        assert!((tau[0].abs() - 0.4905).abs() < 1e-12);
        // Vertical link: zero moment arm.
        let q = Configuration::new(vec![0.0]);
        let tau = gravity_torques(&m, &q, &BoxAttachment::none()).unwrap();
        assert!(tau[0].abs() < 1e-15);
    }

    #[test]
    fn cop_equals_com() {
        let m = default_profile::<f64>();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let q: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q = Configuration::new(q);
            let att = BoxAttachment {
                weight_g_box: rng.gen_range(0.0..10.0),
                com_x: rng.gen_range(0.0..0.3),
                grip_point: Vec2::new(0.2, 0.14),
                attached: rng.gen_bool(0.5),
            };
            let c = cop_x(&m, &q, &att).unwrap();
            let s = system_com(&m, &q, &att).unwrap();
            assert_eq!(c, s.com_x);
        }
    }

    #[test]
    fn torque_jacobian_matches_finite_differences() {
        let m = default_profile::<f64>();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for trial in 0..20 {
            let q: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.2..1.2)).collect();
            let fk0 = forward_kinematics(&m, &Configuration::new(q.clone())).unwrap();
            let grip0 = fk0.hand;
            let r_x = 0.03;
            let att = |hand: Vec2<f64>| BoxAttachment {
                weight_g_box: 6.0,
                com_x: hand.x + r_x,
                grip_point: hand,
                attached: trial % 2 == 0,
            };
            let jac = gravity_torque_jacobian(&m, &fk0, &att(grip0));
            let grad_com = com_x_gradient(&m, &fk0, &att(grip0));
            for k in 0..5 {
                let h = 1e-7;
                let eval = |qk: f64| {
                    let mut qv = q.clone();
                    qv[k] = qk;
                    let fk = forward_kinematics(&m, &Configuration::new(qv.clone())).unwrap();
                    let a = att(fk.hand);
                    let tau =
                        gravity_torques(&m, &Configuration::new(qv.clone()), &a).unwrap();
                    let com = system_com(&m, &Configuration::new(qv), &a).unwrap();
                    (tau, com.com_x)
                };
                let (tp, cp) = eval(q[k] + h);
                let (tm, cm) = eval(q[k] - h);
                for j in 0..5 {
                    let fd = (tp[j] - tm[j]) / (2.0 * h);
                    assert!((jac[j][k] - fd).abs() < 1e-5, "tau jac ({j},{k})");
                }
                let fd = (cp - cm) / (2.0 * h);
                assert!((grad_com[k] - fd).abs() < 1e-6, "com grad {k}");
            }
        }
    }
}
