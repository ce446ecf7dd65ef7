//! Minimal Euclidean 3-vector support.
//!
//! The crate views ℍ as ℝ³ whenever Euclidean geometry is needed (balls,
//! lines, distances), so a tiny ad-hoc vector type is enough.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction. Panics on the zero vector.
    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize zero vector");
        self * (1.0 / n)
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// An infinite straight line in ℝ³, stored as a point plus unit direction.
#[derive(Debug, Clone, Copy)]
pub struct Line3 {
    pub anchor: Vec3,
    pub direction: Vec3,
}

impl Line3 {
    /// Builds a line, normalizing the direction.
    pub fn new(anchor: Vec3, direction: Vec3) -> Self {
        Line3 {
            anchor,
            direction: direction.normalized(),
        }
    }

    pub fn point_at(&self, lambda: f64) -> Vec3 {
        self.anchor + self.direction * lambda
    }

    /// Parameter of the orthogonal projection of `p` onto the line.
    pub fn project_param(&self, p: Vec3) -> f64 {
        (p - self.anchor).dot(self.direction)
    }

    /// Euclidean distance from `p` to the line.
    pub fn distance_to(&self, p: Vec3) -> f64 {
        let d = p - self.anchor;
        let along = d.dot(self.direction);
        (d - self.direction * along).norm()
    }

    /// Parameter interval where the line is inside the closed ball
    /// `|x - center| <= radius`, or `None` if it misses the ball.
    pub fn clip_to_ball(&self, center: Vec3, radius: f64) -> Option<(f64, f64)> {
        let m = self.project_param(center);
        let d2 = (center - self.point_at(m)).norm_squared();
        let h2 = radius * radius - d2;
        if h2 < 0.0 {
            return None;
        }
        let h = h2.sqrt();
        Some((m - h, m + h))
    }
}
