//! Exact attenuated projection of pixel images.
//!
//! Each ray is traced once through the pixel borders; the resulting
//! `(pixel, length)` lists are reused for every evaluation. Per-ray work runs
//! in parallel, but scatter-type sums (adjoints, gradients) are accumulated
//! in ray order afterwards, so results are bitwise independent of the number
//! of threads.

use super::{segment_emission_da, Sinogram};
#[cfg(doc)]
use super::segment_emission;
use crate::error::{invalid, Error, Result};
use crate::geom::{theta, theta_perp};
use crate::grid::Image;
use crate::par::map_indexed;

const MERGE_TOL: f64 = 1e-12;

/// Pixels crossed by one ray, ordered along the direction of travel.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RayPath {
    pub pixels: Vec<u32>,
    pub lengths: Vec<f64>,
}

impl RayPath {
    pub fn trace(m: usize, dx: f64, omega: f64, s: f64) -> RayPath {
        let half = m as f64 * dx / 2.0;
        let d = theta(omega);
        let p = s * theta_perp(omega);
        let mut t_lo = f64::NEG_INFINITY;
        let mut t_hi = f64::INFINITY;
        for (pc, dc) in [(p.x, d.x), (p.y, d.y)] {
            if dc == 0.0 {
                if pc <= -half || pc >= half {
                    return RayPath::default();
                }
            } else {
                let t1 = (-half - pc) / dc;
                let t2 = (half - pc) / dc;
                t_lo = t_lo.max(t1.min(t2));
                t_hi = t_hi.min(t1.max(t2));
            }
        }
        if !(t_hi - t_lo > MERGE_TOL) {
            return RayPath::default();
        }
        let mut ts = vec![t_lo, t_hi];
        for (pc, dc) in [(p.x, d.x), (p.y, d.y)] {
            if dc != 0.0 {
                for k in 1..m {
                    let t = (-half + k as f64 * dx - pc) / dc;
                    if t > t_lo && t < t_hi {
                        ts.push(t);
                    }
                }
            }
        }
        ts.sort_by(|a, b| a.total_cmp(b));
        ts.dedup_by(|b, a| *b - *a <= MERGE_TOL);
        let mut path = RayPath::default();
        for w in ts.windows(2) {
            let len = w[1] - w[0];
            let mid = p + (0.5 * (w[0] + w[1])) * d;
            let col = (((mid.x + half) / dx).floor().max(0.0) as usize).min(m - 1);
            let row = (((half - mid.y) / dx).floor().max(0.0) as usize).min(m - 1);
            path.pixels.push((row * m + col) as u32);
            path.lengths.push(len);
        }
        path
    }

    /// Transform value for pixel values `a`, `f`.
    pub fn forward(&self, a: &[f64], f: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut trans = 1.0f64;
        for (&p, &len) in self.pixels.iter().zip(&self.lengths).rev() {
            let (ap, fp) = (a[p as usize], f[p as usize]);
            let (q, em) = segment_terms(ap, len);
            total += fp * em * trans;
            trans *= q;
        }
        total
    }

    /// Sensitivity of the ray value to each crossed pixel's `f`.
    pub fn f_weights(&self, a: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.pixels.len()];
        let mut trans = 1.0f64;
        for j in (0..self.pixels.len()).rev() {
            let (q, em) = segment_terms(a[self.pixels[j] as usize], self.lengths[j]);
            w[j] = em * trans;
            trans *= q;
        }
        w
    }

    /// Ray value with sensitivities to `f` and to `a` along the path.
    pub fn value_and_weights(&self, a: &[f64], f: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let n = self.pixels.len();
        let mut wf = vec![0.0; n];
        let mut wa = vec![0.0; n];
        let mut trans = 1.0f64;
        for j in (0..n).rev() {
            let p = self.pixels[j] as usize;
            let len = self.lengths[j];
            let (q, em) = segment_terms(a[p], len);
            wf[j] = em * trans;
            if f[p] != 0.0 {
                wa[j] = f[p] * segment_emission_da_with(a[p], len, q) * trans;
            }
            trans *= q;
        }
        // emission from upstream pixels is attenuated by every pixel it crosses
        let mut upstream = 0.0;
        for j in 0..n {
            let p = self.pixels[j] as usize;
            wa[j] -= self.lengths[j] * upstream;
            upstream += f[p] * wf[j];
        }
        (upstream, wf, wa)
    }
}

/// Transmission `exp(-a L)` of a segment and its emission
/// [`segment_emission`], sharing one exponential.
fn segment_terms(a: f64, len: f64) -> (f64, f64) {
    let x = a * len;
    if x == 0.0 {
        return (1.0, len);
    }
    let em1 = (-x).exp_m1();
    let emission = if x.abs() < 1e-8 { len - 0.5 * a * len * len } else { -em1 / a };
    (1.0 + em1, emission)
}

/// [`segment_emission_da`] given the transmission `q = exp(-a L)`.
fn segment_emission_da_with(a: f64, len: f64, q: f64) -> f64 {
    let x = a * len;
    if x.abs() < 1e-3 {
        segment_emission_da(a, len)
    } else {
        (x * q - (1.0 - q)) / (a * a)
    }
}

/// Pixel-grid attenuated projector for a fixed scan geometry.
#[derive(Debug, Clone)]
pub struct Projector {
    m: usize,
    dx: f64,
    angles: Vec<f64>,
    offsets: Vec<f64>,
    rays: Vec<RayPath>,
}

impl Projector {
    pub fn new(m: usize, dx: f64, angles: &[f64], offsets: &[f64]) -> Result<Self> {
        crate::grid::make_image(m, dx, 0.0)?;
        if angles.is_empty() || offsets.is_empty() {
            return Err(invalid("projector needs at least one angle and one offset"));
        }
        let n = offsets.len();
        let rays = map_indexed(angles.len() * n, |k| RayPath::trace(m, dx, angles[k / n], offsets[k % n]));
        Ok(Projector { m, dx, angles: angles.to_vec(), offsets: offsets.to_vec(), rays })
    }

    pub fn for_data(img: &Image, sino: &Sinogram) -> Result<Self> {
        Projector::new(img.m(), img.dx(), sino.angles(), sino.offsets())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn n_pixels(&self) -> usize {
        self.m * self.m
    }

    pub fn rays(&self) -> &[RayPath] {
        &self.rays
    }

    pub fn check_image(&self, img: &Image) -> Result<()> {
        if img.m() != self.m || img.dx() != self.dx {
            return Err(Error::ShapeMismatch(format!(
                "image grid (m = {}, dx = {}) does not match projector (m = {}, dx = {})",
                img.m(),
                img.dx(),
                self.m,
                self.dx
            )));
        }
        Ok(())
    }

    pub fn check_data(&self, sino: &Sinogram) -> Result<()> {
        if sino.angles() != self.angles.as_slice() || sino.offsets() != self.offsets.as_slice() {
            return Err(Error::ShapeMismatch("sinogram geometry does not match projector".into()));
        }
        Ok(())
    }

    pub fn forward(&self, a: &[f64], f: &[f64]) -> Vec<f64> {
        map_indexed(self.rays.len(), |i| self.rays[i].forward(a, f))
    }

    /// The operator `f -> R[a] f` for fixed `a`.
    pub fn linear_in_f(&self, a: &[f64]) -> FLinearMap<'_> {
        FLinearMap { proj: self, weights: map_indexed(self.rays.len(), |i| self.rays[i].f_weights(a)) }
    }

    fn scatter(&self, per_ray: &[Vec<f64>], scale: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_pixels()];
        for (i, (ray, w)) in self.rays.iter().zip(per_ray).enumerate() {
            let q = scale(i);
            if q == 0.0 {
                continue;
            }
            for (&p, &wj) in ray.pixels.iter().zip(w) {
                out[p as usize] += q * wj;
            }
        }
        out
    }

    /// `||R[a] f - d||^2` with gradients in `a` and `f`.
    pub fn value_grad(&self, a: &[f64], f: &[f64], d: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let terms = map_indexed(self.rays.len(), |i| self.rays[i].value_and_weights(a, f));
        let resid: Vec<f64> = terms.iter().zip(d).map(|(t, &di)| t.0 - di).collect();
        let value = resid.iter().map(|r| r * r).sum();
        let (wf, wa): (Vec<_>, Vec<_>) = terms.into_iter().map(|(_, wf, wa)| (wf, wa)).unzip();
        let grad_f = self.scatter(&wf, |i| 2.0 * resid[i]);
        let grad_a = self.scatter(&wa, |i| 2.0 * resid[i]);
        (value, grad_a, grad_f)
    }

    /// Directional derivative of `R[a] f` in `a` along `v`.
    pub fn jvp_a(&self, a: &[f64], f: &[f64], v: &[f64]) -> Vec<f64> {
        map_indexed(self.rays.len(), |i| {
            let ray = &self.rays[i];
            let (_, _, wa) = ray.value_and_weights(a, f);
            ray.pixels.iter().zip(&wa).map(|(&p, w)| w * v[p as usize]).sum()
        })
    }

    /// Transposed derivative of `R[a] f` in `a` applied to `q`.
    pub fn vjp_a(&self, a: &[f64], f: &[f64], q: &[f64]) -> Vec<f64> {
        let wa = map_indexed(self.rays.len(), |i| self.rays[i].value_and_weights(a, f).2);
        self.scatter(&wa, |i| q[i])
    }
}

/// `f -> R[a] f` at fixed attenuation, with its exact adjoint.
pub struct FLinearMap<'a> {
    proj: &'a Projector,
    weights: Vec<Vec<f64>>,
}

impl FLinearMap<'_> {
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        map_indexed(self.weights.len(), |i| {
            let ray = &self.proj.rays[i];
            ray.pixels.iter().zip(&self.weights[i]).map(|(&p, w)| w * f[p as usize]).sum()
        })
    }

    pub fn adjoint(&self, q: &[f64]) -> Vec<f64> {
        self.proj.scatter(&self.weights, |i| q[i])
    }
}

fn check_attenuation(a: &Image) -> Result<()> {
    if let Some(v) = a.values().iter().find(|&&v| !(v >= 0.0)) {
        return Err(invalid(format!("attenuation must be non-negative, found {v}")));
    }
    Ok(())
}

pub fn project_discrete(a: &Image, f: &Image, angles: &[f64], offsets: &[f64]) -> Result<Sinogram> {
    a.check_same_grid(f)?;
    check_attenuation(a)?;
    let proj = Projector::new(a.m(), a.dx(), angles, offsets)?;
    Sinogram::new(angles.to_vec(), offsets.to_vec(), proj.forward(a.values(), f.values()))
}

/// `(||R[a] f - d||^2, grad_a, grad_f)`.
pub fn fidelity_value_grad(a: &Image, f: &Image, d: &Sinogram) -> Result<(f64, Image, Image)> {
    a.check_same_grid(f)?;
    check_attenuation(a)?;
    let proj = Projector::for_data(a, d)?;
    let (v, ga, gf) = proj.value_grad(a.values(), f.values(), d.data());
    Ok((v, a.with_values(ga), f.with_values(gf)))
}
