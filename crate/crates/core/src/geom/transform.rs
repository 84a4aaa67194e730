use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Point2, Polygon};

/// Rotation about the origin followed by a translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform {
    rotation: f64,
    translation: Point2,
}

/// Wrap an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

impl RigidTransform {
    pub fn new(rotation: f64, translation: Point2) -> Self {
        Self {
            rotation: normalize_angle(rotation),
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(0.0, Point2::ORIGIN)
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn translation(&self) -> Point2 {
        self.translation
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        p.rotated(self.rotation) + self.translation
    }

    /// Rotate a free vector (translation ignored).
    pub fn apply_vector(&self, v: Point2) -> Point2 {
        v.rotated(self.rotation)
    }
}

pub fn apply_transform(poly: &Polygon, t: &RigidTransform) -> Polygon {
    if *t == RigidTransform::identity() {
        return poly.clone();
    }
    let map = |ring: &[Point2]| ring.iter().map(|&p| t.apply(p)).collect::<Vec<_>>();
    Polygon::from_trusted(map(poly.exterior()), poly.holes().iter().map(|h| map(h)).collect())
        .expect("isometry preserves polygon validity")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_same_polygon() {
        let sq = Polygon::rect(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(apply_transform(&sq, &RigidTransform::identity()), sq);
    }

    #[test]
    fn quarter_turn_of_unit_square() {
        let sq = Polygon::rect(0.0, 0.0, 1.0, 1.0).unwrap();
        let r = apply_transform(&sq, &RigidTransform::new(PI / 2.0, Point2::ORIGIN));
        let expect = [(0.0, 0.0), (0.0, 1.0), (-1.0, 1.0), (-1.0, 0.0)];
        for (x, y) in expect {
            assert!(r.exterior().iter().any(|p| p.dist(Point2::new(x, y)) < 1e-12));
        }
        assert!((r.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_is_normalized() {
        assert!((RigidTransform::new(3.0 * PI, Point2::ORIGIN).rotation() - PI).abs() < 1e-12);
        assert!((RigidTransform::new(-PI / 2.0 - 2.0 * PI, Point2::ORIGIN).rotation() + PI / 2.0).abs() < 1e-12);
    }
}
