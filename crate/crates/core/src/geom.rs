//! Plane geometry shared by the phantom and ray modules.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2-D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Rotation by +pi/2.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        Point::new(self * p.x, self * p.y)
    }
}

/// Unit direction `(cos w, sin w)`.
pub fn theta(omega: f64) -> Point {
    let (s, c) = omega.sin_cos();
    Point::new(c, s)
}

/// `theta(omega)` rotated anti-clockwise by pi/2, i.e. `d/dw theta(w)`.
pub fn theta_perp(omega: f64) -> Point {
    let (s, c) = omega.sin_cos();
    Point::new(-s, c)
}

/// The directed line `t -> x + t theta(omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedLine {
    pub x: Point,
    pub omega: f64,
}

impl DirectedLine {
    pub fn new(x: Point, omega: f64) -> Self {
        DirectedLine { x, omega }
    }

    /// Parallel-beam parameterisation: the line through `s * theta_perp(omega)`.
    pub fn from_sinogram(omega: f64, s: f64) -> Self {
        DirectedLine { x: s * theta_perp(omega), omega }
    }

    pub fn dir(&self) -> Point {
        theta(self.omega)
    }

    pub fn normal(&self) -> Point {
        theta_perp(self.omega)
    }

    pub fn at(&self, t: f64) -> Point {
        self.x + t * self.dir()
    }

    /// Same line traversed with base point moved to `x + l theta`.
    pub fn shifted(&self, l: f64) -> Self {
        DirectedLine { x: self.at(l), omega: self.omega }
    }

    pub fn rotated(&self, d_omega: f64) -> Self {
        DirectedLine { x: self.x, omega: self.omega + d_omega }
    }

    /// Signed distance of `p` from the line, positive on the `theta_perp` side.
    pub fn signed_distance(&self, p: Point) -> f64 {
        (p - self.x).dot(self.normal())
    }
}
