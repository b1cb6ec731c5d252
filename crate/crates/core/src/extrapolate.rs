//! Polynomial (Richardson) extrapolation of sampled one-sided limits.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    /// Difference between the two highest-order estimates.
    pub residual: f64,
    /// The raw samples the estimate was built from.
    pub samples: Vec<f64>,
}

/// Value at `h = 0` of the polynomial in `x = h^power` through the samples
/// `(h_i, v_i)`, by Neville's scheme.
pub fn richardson(hs: &[f64], vals: &[f64], power: f64) -> Result<Extrapolated> {
    if hs.len() != vals.len() || hs.len() < 2 {
        return Err(invalid("extrapolation needs at least two matching samples"));
    }
    if hs.iter().any(|&h| !(h > 0.0)) || hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("step schedule must be positive and strictly decreasing"));
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.powf(power)).collect();
    let n = xs.len();
    // prev[i] holds the estimate using samples i..=i+k
    let mut prev = vals.to_vec();
    let mut last_two = (vals[n - 2], vals[n - 1]);
    for k in 1..n {
        let cur: Vec<f64> = (0..n - k)
            .map(|i| (xs[i] * prev[i + 1] - xs[i + k] * prev[i]) / (xs[i] - xs[i + k]))
            .collect();
        last_two = if cur.len() >= 2 { (cur[cur.len() - 2], cur[cur.len() - 1]) } else { (prev[1], cur[0]) };
        prev = cur;
    }
    let value = prev[0];
    let residual = (last_two.1 - last_two.0).abs();
    Ok(Extrapolated { value, residual, samples: vals.to_vec() })
}

/// [`richardson`] with a convergence check: fails when the residual exceeds
/// `10 * tol * max(|value|, scale)`.
pub fn limit(hs: &[f64], vals: &[f64], power: f64, tol: f64, scale: f64) -> Result<Extrapolated> {
    let e = richardson(hs, vals, power)?;
    if !e.value.is_finite() || e.residual > 10.0 * tol * e.value.abs().max(scale) {
        return Err(Error::NonConvergent { residual: e.residual, values: e.samples });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_in_root_h() {
        let hs = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
        let v: Vec<f64> = hs.iter().map(|h: &f64| 0.7 + 2.0 * h.sqrt() - 3.0 * h + 0.5 * h.powf(1.5)).collect();
        let e = richardson(&hs, &v, 0.5).unwrap();
        assert!((e.value - 0.7).abs() < 1e-10);
    }

    #[test]
    fn linear_extrapolation_in_h() {
        let hs = [0.4, 0.2, 0.1];
        let v: Vec<f64> = hs.iter().map(|h| 1.0 + h).collect();
        let e = richardson(&hs, &v, 1.0).unwrap();
        assert!((e.value - 1.0).abs() < 1e-14);
        assert!(e.residual < 1e-14);
    }

    #[test]
    fn detects_divergence() {
        let hs = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
        let v: Vec<f64> = hs.iter().map(|h: &f64| 1.0 / h).collect();
        assert!(matches!(limit(&hs, &v, 0.5, 1e-3, 1.0), Err(Error::NonConvergent { .. })));
        assert!(richardson(&[1.0, 2.0], &[0.0, 0.0], 1.0).is_err());
    }
}
