use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Plain 2D vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub const ZERO: Vec2 = Vec2::new(0.0, 0.0);

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product; positive when `o` is CCW from self.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Rotation by +90°.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Unit direction vector. Construction normalizes and rejects near-zero input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dir2(Vec2);

impl Dir2 {
    pub const X: Dir2 = Dir2(Vec2::new(1.0, 0.0));
    pub const Y: Dir2 = Dir2(Vec2::new(0.0, 1.0));

    pub fn new(x: f64, y: f64) -> crate::Result<Dir2> {
        let v = Vec2::new(x, y);
        let n = v.norm();
        if !(n > 1e-14) || !n.is_finite() {
            return Err(crate::Error::InvalidArgument(
                "direction vector must be nonzero and finite".into(),
            ));
        }
        Ok(Dir2(v * (1.0 / n)))
    }

    pub fn from_angle(theta: f64) -> Dir2 {
        Dir2(Vec2::new(theta.cos(), theta.sin()))
    }

    pub fn vec(self) -> Vec2 {
        self.0
    }

    pub fn dot(self, v: Vec2) -> f64 {
        self.0.dot(v)
    }

    /// The transverse unit vector: self rotated by +90°.
    pub fn transverse(self) -> Dir2 {
        Dir2(self.0.perp())
    }

    /// Longitudinal coordinate of `p` along this direction.
    pub fn along(self, p: Vec2) -> f64 {
        self.dot(p)
    }

    /// Transverse coordinate of `p` (component along `self.transverse()`).
    pub fn across(self, p: Vec2) -> f64 {
        self.transverse().dot(p)
    }

    /// Point at longitudinal coordinate `t` on the line with transverse
    /// anchor `y0`.
    pub fn line_point(self, y0: f64, t: f64) -> Vec2 {
        self.transverse().vec() * y0 + self.vec() * t
    }
}
