//! Planar poses, body-frame odometry increments and the odometry noise model.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::geometry::Point2;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2 {
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Maps a point from the body frame into the world frame.
    pub fn transform(&self, p: Point2) -> Point2 {
        let (s, c) = self.theta.sin_cos();
        Point2::new(self.x + c * p.x - s * p.y, self.y + s * p.x + c * p.y)
    }

    /// Applies a body-frame increment.
    pub fn compose(&self, delta: OdometryDelta) -> Pose2 {
        let (s, c) = self.theta.sin_cos();
        Pose2::new(
            self.x + c * delta.forward - s * delta.lateral,
            self.y + s * delta.forward + c * delta.lateral,
            normalize_angle(self.theta + delta.rotation),
        )
    }

    /// Increment that takes `self` to `to`, expressed in the frame of `self`.
    pub fn delta_to(&self, to: &Pose2) -> OdometryDelta {
        let (s, c) = self.theta.sin_cos();
        let (dx, dy) = (to.x - self.x, to.y - self.y);
        OdometryDelta {
            forward: c * dx + s * dy,
            lateral: -s * dx + c * dy,
            rotation: normalize_angle(to.theta - self.theta),
        }
    }
}

pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct OdometryDelta {
    pub forward: f64,
    pub lateral: f64,
    pub rotation: f64,
}

impl OdometryDelta {
    pub const ZERO: OdometryDelta = OdometryDelta {
        forward: 0.0,
        lateral: 0.0,
        rotation: 0.0,
    };

    pub fn new(forward: f64, lateral: f64, rotation: f64) -> Self {
        Self {
            forward,
            lateral,
            rotation,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.forward.is_finite() && self.lateral.is_finite() && self.rotation.is_finite()
    }

    pub fn translation(&self) -> f64 {
        self.forward.hypot(self.lateral)
    }
}

/// Zero-mean Gaussian perturbation of an odometry increment.
///
/// Translation components get std `translation_floor + a1·|forward| +
/// a2·|rotation|`; rotation gets `rotation_floor + a3·|rotation| +
/// a4·|forward|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionNoise {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub translation_floor: f64,
    pub rotation_floor: f64,
}

impl Default for MotionNoise {
    fn default() -> Self {
        Self {
            a1: 0.05,
            a2: 0.02,
            a3: 0.05,
            a4: 0.01,
            translation_floor: 0.0,
            rotation_floor: 0.0,
        }
    }
}

impl MotionNoise {
    pub const NONE: MotionNoise = MotionNoise {
        a1: 0.0,
        a2: 0.0,
        a3: 0.0,
        a4: 0.0,
        translation_floor: 0.0,
        rotation_floor: 0.0,
    };

    pub fn translation_std(&self, delta: &OdometryDelta) -> f64 {
        self.translation_floor + self.a1 * delta.forward.abs() + self.a2 * delta.rotation.abs()
    }

    pub fn rotation_std(&self, delta: &OdometryDelta) -> f64 {
        self.rotation_floor + self.a3 * delta.rotation.abs() + self.a4 * delta.forward.abs()
    }

    /// Every coefficient multiplied by `k`.
    pub fn scaled(&self, k: f64) -> MotionNoise {
        MotionNoise {
            a1: self.a1 * k,
            a2: self.a2 * k,
            a3: self.a3 * k,
            a4: self.a4 * k,
            translation_floor: self.translation_floor * k,
            rotation_floor: self.rotation_floor * k,
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == MotionNoise::NONE
    }

    pub fn perturb<R: Rng + ?Sized>(&self, delta: OdometryDelta, rng: &mut R) -> OdometryDelta {
        let ts = self.translation_std(&delta);
        let rs = self.rotation_std(&delta);
        OdometryDelta {
            forward: delta.forward + gaussian(rng, ts),
            lateral: delta.lateral + gaussian(rng, ts),
            rotation: delta.rotation + gaussian(rng, rs),
        }
    }
}

pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R, std: f64) -> f64 {
    if std <= 0.0 {
        return 0.0;
    }
    Normal::new(0.0, std).map(|n| n.sample(rng)).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn compose_and_delta_are_inverse() {
        let a = Pose2::new(1.0, -2.0, 0.7);
        let b = Pose2::new(3.5, 0.25, -2.9);
        let d = a.delta_to(&b);
        let c = a.compose(d);
        assert_relative_eq!(c.x, b.x, epsilon = 1e-12);
        assert_relative_eq!(c.y, b.y, epsilon = 1e-12);
        assert_relative_eq!(c.theta, b.theta, epsilon = 1e-12);
    }

    #[test]
    fn angle_normalization() {
        assert_relative_eq!(normalize_angle(3.0 * PI), PI);
        assert_relative_eq!(normalize_angle(-3.0 * PI / 2.0), PI / 2.0);
        assert_relative_eq!(normalize_angle(0.1), 0.1);
    }
}
