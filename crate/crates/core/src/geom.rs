//! Small planar geometry helpers: points, enclosing ellipses and the box
//! rectangle used by the collision checks.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A point or vector in the sagittal plane, metres. `x` points forward
/// (away from the robot), `z` points up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2<R> {
    pub x: R,
    pub z: R,
}

impl<R: Real> Vec2<R> {
    #[inline]
    pub fn new(x: R, z: R) -> Self {
        Self { x, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self { x: R::zero(), z: R::zero() }
    }

    #[inline]
    pub fn add(self, other: Self) -> Self {
        Self { x: self.x + other.x, z: self.z + other.z }
    }

    #[inline]
    pub fn sub(self, other: Self) -> Self {
        Self { x: self.x - other.x, z: self.z - other.z }
    }

    #[inline]
    pub fn scale(self, s: R) -> Self {
        Self { x: self.x * s, z: self.z * s }
    }

    #[inline]
    pub fn norm(self) -> R {
        (self.x * self.x + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn dist(self, other: Self) -> R {
        self.sub(other).norm()
    }
}

/// An ellipse in the plane: centre, semi-axes and the orientation of the
/// major axis measured from the +z axis (same convention as link angles).
#[derive(Debug, Clone, Copy)]
pub struct Ellipse<R> {
    pub center: Vec2<R>,
    /// Semi-axis along the segment direction.
    pub semi_major: R,
    /// Semi-axis across the segment.
    pub semi_minor: R,
    /// Angle of the major axis from vertical, radians.
    pub angle: R,
}

impl<R: Real> Ellipse<R> {
    /// Ellipse enclosing the segment `a -> b`, inflated by `margin` on all
    /// sides. Degenerates gracefully for zero-length segments.
    pub fn enclosing_segment(a: Vec2<R>, b: Vec2<R>, margin: R) -> Self {
        let d = b.sub(a);
        let len = d.norm();
        let angle = if len > R::zero() { d.x.atan2(d.z) } else { R::zero() };
        Ellipse {
            center: a.add(d.scale(R::c(0.5))),
            semi_major: len * R::c(0.5) + margin,
            semi_minor: margin,
            angle,
        }
    }

    /// Signed membership margin of a point, in metres (approximate): zero on
    /// the boundary, negative inside, positive outside. Exact for circles;
    /// for ellipses the radial distance is scaled by the minor semi-axis.
    pub fn signed_margin(&self, p: Vec2<R>) -> R {
        let d = p.sub(self.center);
        // Rotate into the ellipse frame (major axis -> local z).
        let (s, c) = self.angle.sin_cos();
        let along = d.x * s + d.z * c;
        let across = d.x * c - d.z * s;
        let u = along / self.semi_major;
        let v = across / self.semi_minor;
        let rho = (u * u + v * v).sqrt();
        (rho - R::one()) * self.semi_minor.min(self.semi_major)
    }
}

/// An oriented rectangle (the box cross-section in the sagittal plane).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxRect<R> {
    pub center: Vec2<R>,
    /// Orientation from upright, radians.
    pub theta: R,
    /// Full horizontal extent, metres.
    pub length: R,
    /// Full vertical extent, metres.
    pub height: R,
}

impl<R: Real> BoxRect<R> {
    /// The four corner points in world coordinates.
    pub fn corners(&self) -> [Vec2<R>; 4] {
        let hl = self.length * R::c(0.5);
        let hh = self.height * R::c(0.5);
        let (s, c) = self.theta.sin_cos();
        let rot = |lx: R, lz: R| Vec2 {
            x: self.center.x + lx * c + lz * s,
            z: self.center.z - lx * s + lz * c,
        };
        [rot(-hl, -hh), rot(hl, -hh), rot(hl, hh), rot(-hl, hh)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_ellipse_margins() {
        let e = Ellipse::enclosing_segment(
            Vec2::new(0.0f64, 0.0),
            Vec2::new(0.0, 0.2),
            0.005,
        );
        // Point at the centre is strictly inside.
        assert!(e.signed_margin(Vec2::new(0.0, 0.1)) < 0.0);
        // Point on the minor boundary is on the surface.
        let m = e.signed_margin(Vec2::new(0.005, 0.1));
        assert!(m.abs() < 1e-12, "margin {m}");
        // Far point is outside.
        assert!(e.signed_margin(Vec2::new(0.5, 0.1)) > 0.0);
    }

    #[test]
    fn rect_corners_upright() {
        let r = BoxRect {
            center: Vec2::new(1.0f64, 0.5),
            theta: 0.0,
            length: 0.2,
            height: 0.1,
        };
        let cs = r.corners();
        assert_eq!(cs[0], Vec2::new(0.9, 0.45));
        assert_eq!(cs[2], Vec2::new(1.1, 0.55));
    }
}
