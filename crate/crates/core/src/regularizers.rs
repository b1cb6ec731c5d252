//! Multi-bang penalty, smoothed total variation and the finite-difference
//! operator they share.

use crate::grid::{AdmissibleSet, Image};
use serde::{Deserialize, Serialize};

/// Forward differences on an `m x m` row-major image: `(right - self,
/// below - self)` per pixel, zero across the last column / row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffOperator {
    m: usize,
}

impl DiffOperator {
    pub fn new(m: usize) -> Self {
        DiffOperator { m }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Upper bound on `||D||^2`.
    pub fn norm_sq_bound(&self) -> f64 {
        8.0
    }

    pub fn apply(&self, x: &[f64]) -> Vec<[f64; 2]> {
        let m = self.m;
        assert_eq!(x.len(), m * m, "image size does not match operator");
        let mut out = vec![[0.0; 2]; m * m];
        for r in 0..m {
            for c in 0..m {
                let i = r * m + c;
                if c + 1 < m {
                    out[i][0] = x[i + 1] - x[i];
                }
                if r + 1 < m {
                    out[i][1] = x[i + m] - x[i];
                }
            }
        }
        out
    }

    pub fn adjoint(&self, y: &[[f64; 2]]) -> Vec<f64> {
        let m = self.m;
        assert_eq!(y.len(), m * m, "field size does not match operator");
        let mut out = vec![0.0; m * m];
        for r in 0..m {
            for c in 0..m {
                let i = r * m + c;
                if c + 1 < m {
                    out[i + 1] += y[i][0];
                    out[i] -= y[i][0];
                }
                if r + 1 < m {
                    out[i + m] += y[i][1];
                    out[i] -= y[i][1];
                }
            }
        }
        out
    }
}

/// Value used in place of `+inf` for infeasible arguments.
pub const OUT_OF_RANGE: f64 = 1e300;

/// A penalty value that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    pub value: f64,
    pub out_of_range: bool,
}

impl Penalty {
    fn finite(value: f64) -> Self {
        Penalty { value, out_of_range: false }
    }

    fn infinite() -> Self {
        Penalty { value: OUT_OF_RANGE, out_of_range: true }
    }
}

/// Index `i` of the interval `[a_i, a_{i+1}]` holding `t`, for `t` in range.
fn interval(t: f64, set: &AdmissibleSet) -> usize {
    let v = set.values();
    v.windows(2).position(|w| t <= w[1]).unwrap_or(v.len() - 2)
}

fn penalty_on(t: f64, lo: f64, hi: f64) -> f64 {
    (hi - t) * (t - lo)
}

/// `(a_{i+1} - t)(t - a_i)` on `[a_i, a_{i+1}]`, infinite outside the range.
pub fn mb_penalty(t: f64, set: &AdmissibleSet) -> Penalty {
    if !(t >= set.min() && t <= set.max()) {
        return Penalty::infinite();
    }
    let v = set.values();
    let i = interval(t, set);
    Penalty::finite(penalty_on(t, v[i], v[i + 1]).max(0.0))
}

/// Sum of [`mb_penalty`] over all pixels.
pub fn mb_value(img: &Image, set: &AdmissibleSet) -> Penalty {
    let mut sum = 0.0;
    for &t in img.values() {
        let p = mb_penalty(t, set);
        if p.out_of_range {
            return p;
        }
        sum += p.value;
    }
    Penalty::finite(sum)
}

/// `argmin_z 1/2 (z - t)^2 + step * m(z)` over `[a_0, a_n]`; ties go to the
/// smaller minimiser.
pub fn mb_prox(t: f64, step: f64, set: &AdmissibleSet) -> f64 {
    assert!(step > 0.0, "prox step must be positive");
    let v = set.values();
    let mut best = v[0];
    let mut best_val = 0.5 * (v[0] - t) * (v[0] - t);
    let mut consider = |z: f64, pen: f64| {
        let val = 0.5 * (z - t) * (z - t) + step * pen;
        if val < best_val || (val == best_val && z < best) {
            best = z;
            best_val = val;
        }
    };
    for w in v.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        consider(hi, 0.0);
        let curv = 1.0 - 2.0 * step;
        if curv > 0.0 {
            let z = ((t - step * (lo + hi)) / curv).clamp(lo, hi);
            consider(z, penalty_on(z, lo, hi));
        }
    }
    best
}

/// [`mb_prox`] applied pixelwise.
pub fn mb_prox_image(img: &Image, step: f64, set: &AdmissibleSet) -> Image {
    img.map(|t| mb_prox(t, step, set))
}

pub(crate) fn tv_value_slice(m: usize, x: &[f64], c: f64) -> f64 {
    let d = DiffOperator::new(m).apply(x);
    d[..d.len().saturating_sub(1)]
        .iter()
        .map(|g| (g[0] * g[0] + g[1] * g[1] + c).sqrt())
        .sum()
}

pub(crate) fn tv_grad_slice(m: usize, x: &[f64], c: f64) -> Vec<f64> {
    let op = DiffOperator::new(m);
    let mut d = op.apply(x);
    let n = d.len();
    for (i, g) in d.iter_mut().enumerate() {
        if i + 1 == n {
            *g = [0.0; 2];
            continue;
        }
        let s = (g[0] * g[0] + g[1] * g[1] + c).sqrt();
        g[0] /= s;
        g[1] /= s;
    }
    op.adjoint(&d)
}

/// Smoothed isotropic total variation `sum_i sqrt(|D_i x|^2 + c)` over all
/// pixels but the last.
pub fn tv_value(img: &Image, c: f64) -> f64 {
    assert!(c > 0.0, "TV smoothing must be positive");
    tv_value_slice(img.m(), img.values(), c)
}

pub fn tv_grad(img: &Image, c: f64) -> Image {
    assert!(c > 0.0, "TV smoothing must be positive");
    img.with_values(tv_grad_slice(img.m(), img.values(), c))
}
