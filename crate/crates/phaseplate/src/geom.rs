//! Minimal 2-D vector algebra used by the field and path modules.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self x other`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Counterclockwise perpendicular (rotation by +90 degrees).
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A unit vector. Construction normalizes and rejects near-zero input, so
/// downstream operations can take direction arguments as total functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction(Vec2);

impl Direction {
    pub const PLUS_X: Direction = Direction(Vec2 { x: 1.0, y: 0.0 });
    pub const MINUS_X: Direction = Direction(Vec2 { x: -1.0, y: 0.0 });
    pub const PLUS_Y: Direction = Direction(Vec2 { x: 0.0, y: 1.0 });

    pub fn new(v: Vec2) -> Result<Direction> {
        let n = v.norm();
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::RejectedInput(
                "direction must be a nonzero finite vector".into(),
            ));
        }
        Ok(Direction(v.scale(1.0 / n)))
    }

    pub fn from_angle(theta_rad: f64) -> Direction {
        Direction(Vec2::new(theta_rad.cos(), theta_rad.sin()))
    }

    pub fn vec(self) -> Vec2 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perp_is_ccw_rotation() {
        let v = Vec2::new(1.0, 0.0);
        assert_eq!(v.perp(), Vec2::new(0.0, 1.0));
        assert_eq!(v.perp().perp(), -v);
    }

    #[test]
    fn direction_normalizes_and_rejects_zero() {
        let d = Direction::new(Vec2::new(3.0, 4.0)).unwrap();
        assert!((d.vec().norm() - 1.0).abs() < 1e-15);
        assert!(Direction::new(Vec2::ZERO).is_err());
    }

    #[test]
    fn cross_sign_is_right_handed() {
        assert!(Vec2::new(1.0, 0.0).cross(Vec2::new(0.0, 1.0)) > 0.0);
    }
}
