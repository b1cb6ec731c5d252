use crate::error::{invalid, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::TAU;

/// Measurements over `(angle, offset)` pairs, stored row-major with one row
/// per angle. Entry `(i, j)` is the transform along the line through
/// `offsets[j] * theta_perp(angles[i])` with direction `theta(angles[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    angles: Vec<f64>,
    offsets: Vec<f64>,
    data: Vec<f64>,
}

impl Sinogram {
    pub fn new(angles: Vec<f64>, offsets: Vec<f64>, data: Vec<f64>) -> Result<Self> {
        if angles.is_empty() || offsets.is_empty() {
            return Err(invalid("sinogram needs at least one angle and one offset"));
        }
        if data.len() != angles.len() * offsets.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} angles x {} offsets needs {} entries, got {}",
                angles.len(),
                offsets.len(),
                angles.len() * offsets.len(),
                data.len()
            )));
        }
        if data.iter().chain(&angles).chain(&offsets).any(|v| !v.is_finite()) {
            return Err(invalid("sinogram contains non-finite values"));
        }
        Ok(Sinogram { angles, offsets, data })
    }

    pub fn zeros(angles: Vec<f64>, offsets: Vec<f64>) -> Result<Self> {
        let n = angles.len() * offsets.len();
        Sinogram::new(angles, offsets, vec![0.0; n])
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn n_offsets(&self) -> usize {
        self.offsets.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, angle: usize, offset: usize) -> f64 {
        self.data[angle * self.offsets.len() + offset]
    }

    pub fn norm(&self) -> f64 {
        crate::grid::norm2(&self.data)
    }

    pub fn same_geometry(&self, other: &Sinogram) -> bool {
        self.angles == other.angles && self.offsets == other.offsets
    }

    pub fn with_data(&self, data: Vec<f64>) -> Result<Sinogram> {
        Sinogram::new(self.angles.clone(), self.offsets.clone(), data)
    }
}

/// `n` equally spaced angles covering `[0, 2 pi)`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * TAU / n as f64).collect()
}

/// `n` equally spaced offsets covering `[-half_width, half_width]`.
pub fn uniform_offsets(n: usize, half_width: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|k| -half_width + 2.0 * half_width * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Adds i.i.d. Gaussian noise with standard deviation `level * ||d|| / sqrt(N)`.
pub fn add_gaussian_noise(sino: &Sinogram, level: f64, seed: u64) -> Result<Sinogram> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(invalid(format!("noise level must be >= 0, got {level}")));
    }
    if level == 0.0 {
        return Ok(sino.clone());
    }
    let sigma = level * sino.norm() / (sino.len() as f64).sqrt();
    if sigma == 0.0 {
        return Ok(sino.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = sino.data.iter().map(|&v| v + normal.sample(&mut rng)).collect();
    sino.with_data(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n_a: usize, n_s: usize) -> Sinogram {
        let data = (0..n_a * n_s).map(|k| 1.0 + (k % 17) as f64 * 0.1).collect();
        Sinogram::new(uniform_angles(n_a), uniform_offsets(n_s, 1.0), data).unwrap()
    }

    #[test]
    fn geometry_helpers() {
        let a = uniform_angles(4);
        assert_eq!(a[0], 0.0);
        assert!((a[2] - std::f64::consts::PI).abs() < 1e-15);
        let s = uniform_offsets(3, 2.0);
        assert_eq!(s, vec![-2.0, 0.0, 2.0]);
    }

    #[test]
    fn shape_is_checked() {
        assert!(Sinogram::new(vec![0.0], vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Sinogram::new(vec![0.0], vec![0.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn noise_level_and_determinism() {
        let s = ramp(100, 120);
        assert_eq!(add_gaussian_noise(&s, 0.0, 1).unwrap(), s);
        let n1 = add_gaussian_noise(&s, 0.05, 7).unwrap();
        let n2 = add_gaussian_noise(&s, 0.05, 7).unwrap();
        assert_eq!(n1, n2);
        assert_ne!(n1, add_gaussian_noise(&s, 0.05, 8).unwrap());
        let diff: f64 = n1.data().iter().zip(s.data()).map(|(a, b)| (a - b) * (a - b)).sum();
        let ratio = diff.sqrt() / s.norm();
        assert!((ratio - 0.05).abs() < 0.005, "ratio {ratio}");
        assert!(add_gaussian_noise(&s, -0.1, 1).is_err());
    }
}
