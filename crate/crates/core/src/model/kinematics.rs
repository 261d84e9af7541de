//! Forward kinematics of the planar chain.
//!
//! The chain is rooted at the ankle joint, which sits at the foot frame
//! origin on the ground. Link `i` leaves joint `i` at the absolute angle
//! `theta_i = q_0 + ... + q_i` measured from vertical; positive angles lean
//! forward (+x, toward the box).

use crate::geom::Vec2;
use crate::model::{Configuration, ModelError, RobotModel};
use crate::scalar::Real;

/// Pose of every joint, link COM and the hand for one configuration.
#[derive(Debug, Clone)]
pub struct ChainState<R> {
    /// Joint origins; `joints[0]` is the chain base at the origin.
    pub joints: Vec<Vec2<R>>,
    /// Absolute link angles from vertical.
    pub angles: Vec<R>,
    /// Link COM positions.
    pub link_coms: Vec<Vec2<R>>,
    /// Distal end of the last link.
    pub hand: Vec2<R>,
}

impl<R: Real> ChainState<R> {
    /// d(p.x)/d(q_k) for a point `p` rigidly attached to link `attached_to`.
    ///
    /// Rotating joint `k` moves every point distal to it on a circle about
    /// the joint origin, so the derivative is the perpendicular lever arm.
    #[inline]
    pub fn dpx_dq(&self, k: usize, p: Vec2<R>, attached_to: usize) -> R {
        if k > attached_to {
            R::zero()
        } else {
            p.z - self.joints[k].z
        }
    }

    /// d(p.z)/d(q_k) for a point attached to link `attached_to`.
    #[inline]
    pub fn dpz_dq(&self, k: usize, p: Vec2<R>, attached_to: usize) -> R {
        if k > attached_to {
            R::zero()
        } else {
            -(p.x - self.joints[k].x)
        }
    }

    /// Hand Jacobian rows: `(d hand.x / d q_k, d hand.z / d q_k)`.
    pub fn hand_jacobian(&self) -> Vec<(R, R)> {
        let last = self.angles.len() - 1;
        (0..self.angles.len())
            .map(|k| (self.dpx_dq(k, self.hand, last), self.dpz_dq(k, self.hand, last)))
            .collect()
    }
}

/// Chained frames of every link plus the hand point.
pub fn forward_kinematics<R: Real>(
    model: &RobotModel<R>,
    q: &Configuration<R>,
) -> Result<ChainState<R>, ModelError> {
    model.check_dim(q)?;
    let n = model.dof();
    let mut joints = Vec::with_capacity(n);
    let mut angles = Vec::with_capacity(n);
    let mut link_coms = Vec::with_capacity(n);
    let mut origin = Vec2::zero();
    let mut theta = R::zero();
    for i in 0..n {
        theta = theta + q.q[i];
        joints.push(origin);
        angles.push(theta);
        let (s, c) = theta.sin_cos();
        let axis = Vec2::new(s, c);
        link_coms.push(origin.add(axis.scale(model.links[i].com_offset)));
        origin = origin.add(axis.scale(model.links[i].length));
    }
    Ok(ChainState { joints, angles, link_coms, hand: origin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_profile, Link};
    use rand::{Rng, SeedableRng};

    fn stacked_model(lengths: &[f64]) -> RobotModel<f64> {
        let mut m = default_profile::<f64>();
        m.links = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| Link {
                name: format!("l{i}"),
                length: l,
                mass: 1.0,
                com_offset: l / 2.0,
            })
            .collect();
        m.joints.truncate(lengths.len());
        while m.joints.len() < lengths.len() {
            let mut j = m.joints[0].clone();
            j.name = format!("j{}", m.joints.len());
            m.joints.push(j);
        }
        m.total_weight_g_robot = 9.81 * lengths.len() as f64;
        m
    }

    #[test]
    fn straight_chain_sums_lengths() {
        let m = stacked_model(&[0.10, 0.10, 0.20, 0.15, 0.10]);
        let fk = forward_kinematics(&m, &Configuration::new(vec![0.0; 5])).unwrap();
        assert!((fk.hand.z - 0.65).abs() < 1e-12);
        assert!(fk.hand.x.abs() < 1e-12);
    }

    #[test]
    fn single_link_quarter_turn() {
        let m = stacked_model(&[0.1]);
        let fk =
            forward_kinematics(&m, &Configuration::new(vec![std::f64::consts::FRAC_PI_2]))
                .unwrap();
        assert!((fk.hand.x - 0.1).abs() < 1e-12);
        assert!(fk.hand.z.abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let m = stacked_model(&[0.1]);
        let err = forward_kinematics(&m, &Configuration::new(vec![0.0, 0.0])).unwrap_err();
        assert!(matches!(err, ModelError::DimensionMismatch { got: 2, expected: 1 }));
    }

    #[test]
    fn rigid_body_lengths_preserved() {
        let m = default_profile::<f64>();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let q: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let fk = forward_kinematics(&m, &Configuration::new(q)).unwrap();
            for i in 0..4 {
                let d = fk.joints[i + 1].dist(fk.joints[i]);
                assert!((d - m.links[i].length).abs() <= 1e-12);
            }
            let d = fk.hand.dist(fk.joints[4]);
            assert!((d - m.links[4].length).abs() <= 1e-12);
        }
    }

    #[test]
    fn point_jacobian_matches_finite_differences() {
        let m = default_profile::<f64>();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let q: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.2..1.2)).collect();
            let fk = forward_kinematics(&m, &Configuration::new(q.clone())).unwrap();
            let jac = fk.hand_jacobian();
            for k in 0..5 {
                let h = 1e-7;
                let mut qp = q.clone();
                qp[k] += h;
                let mut qm = q.clone();
                qm[k] -= h;
                let fp = forward_kinematics(&m, &Configuration::new(qp)).unwrap();
                let fm = forward_kinematics(&m, &Configuration::new(qm)).unwrap();
                let dx = (fp.hand.x - fm.hand.x) / (2.0 * h);
                let dz = (fp.hand.z - fm.hand.z) / (2.0 * h);
                assert!((jac[k].0 - dx).abs() < 1e-6, "dx joint {k}");
                assert!((jac[k].1 - dz).abs() < 1e-6, "dz joint {k}");
            }
        }
    }
}
