//! Pixel-grid images and admissible value sets.
//!
//! An [`Image`] is an `m x m` grid of square pixels of side `dx`, stored
//! row-major from the top-left pixel. The grid is centred on the origin with
//! `y` increasing upward, so pixel `(r, c)` has its centre at
//! `x = (c + 0.5) dx - m dx / 2`, `y = m dx / 2 - (r + 0.5) dx`.

use crate::error::{invalid, Error, Result};
use crate::geom::Point;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ImageRepr", into = "ImageRepr")]
pub struct Image {
    m: usize,
    dx: f64,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ImageRepr {
    m: usize,
    dx: f64,
    values: Vec<f64>,
}

impl TryFrom<ImageRepr> for Image {
    type Error = Error;
    fn try_from(r: ImageRepr) -> Result<Self> {
        Image::from_values(r.m, r.dx, r.values)
    }
}

impl From<Image> for ImageRepr {
    fn from(img: Image) -> Self {
        ImageRepr { m: img.m, dx: img.dx, values: img.values }
    }
}

impl Image {
    pub fn new(m: usize, dx: f64, fill: f64) -> Result<Self> {
        make_image(m, dx, fill)
    }

    pub fn from_values(m: usize, dx: f64, values: Vec<f64>) -> Result<Self> {
        check_geometry(m, dx)?;
        if values.len() != m * m {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values for m = {m}, got {}",
                m * m,
                values.len()
            )));
        }
        Ok(Image { m, dx, values })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Physical side length of the grid.
    pub fn width(&self) -> f64 {
        self.m as f64 * self.dx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.m + col
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.index(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        let i = self.index(row, col);
        self.values[i] = v;
    }

    pub fn pixel_center(&self, row: usize, col: usize) -> Point {
        pixel_center(self.m, self.dx, row, col)
    }

    pub fn same_grid(&self, other: &Image) -> bool {
        self.m == other.m && self.dx == other.dx
    }

    pub fn check_same_grid(&self, other: &Image) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "grids differ: (m = {}, dx = {}) vs (m = {}, dx = {})",
                self.m, self.dx, other.m, other.dx
            )))
        }
    }

    /// Image on the same grid with new values.
    pub fn with_values(&self, values: Vec<f64>) -> Image {
        assert_eq!(values.len(), self.values.len());
        Image { m: self.m, dx: self.dx, values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

fn check_geometry(m: usize, dx: f64) -> Result<()> {
    if m == 0 {
        return Err(invalid("grid side m must be positive"));
    }
    if !(dx > 0.0) || !dx.is_finite() {
        return Err(invalid(format!("pixel size dx must be positive, got {dx}")));
    }
    Ok(())
}

pub fn pixel_center(m: usize, dx: f64, row: usize, col: usize) -> Point {
    let half = m as f64 * dx / 2.0;
    Point::new((col as f64 + 0.5) * dx - half, half - (row as f64 + 0.5) * dx)
}

pub fn make_image(m: usize, dx: f64, fill: f64) -> Result<Image> {
    check_geometry(m, dx)?;
    Ok(Image { m, dx, values: vec![fill; m * m] })
}

/// Strictly increasing finite set `a_0 < a_1 < ... < a_n` with at least two values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AdmissibleSet {
    values: Vec<f64>,
}

impl AdmissibleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("admissible set needs at least two values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("admissible values must be finite"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("admissible values must be strictly increasing"));
        }
        Ok(AdmissibleSet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.values.contains(&t)
    }

    /// Nearest admissible value; ties go to the smaller one.
    pub fn nearest(&self, t: f64) -> f64 {
        let mut best = self.values[0];
        let mut best_d = (t - best).abs();
        for &v in &self.values[1..] {
            let d = (t - v).abs();
            if d < best_d {
                best = v;
                best_d = d;
            }
        }
        best
    }
}

impl TryFrom<Vec<f64>> for AdmissibleSet {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        AdmissibleSet::new(v)
    }
}

impl From<AdmissibleSet> for Vec<f64> {
    fn from(a: AdmissibleSet) -> Self {
        a.values
    }
}

pub fn multibang_project(img: &Image, set: &AdmissibleSet) -> Image {
    img.map(|v| set.nearest(v))
}

/// `||x - ref|| / ||ref||`, or `||x||` when `ref` is identically zero.
pub fn rel_l2_error(x: &Image, reference: &Image) -> Result<f64> {
    x.check_same_grid(reference)?;
    let diff: f64 = x
        .values
        .iter()
        .zip(&reference.values)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let rn = reference.norm();
    if rn == 0.0 {
        Ok(x.norm())
    } else {
        Ok(diff / rn)
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
