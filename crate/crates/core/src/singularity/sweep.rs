use super::{d_omega, DataOracle};
use crate::error::{invalid, Result};
use crate::geom::{DirectedLine, Point};
use crate::par::map_indexed;
use serde::{Deserialize, Serialize};

/// Transform values over a uniform grid of angles about a fixed point, with
/// first and second finite-difference derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

pub fn sweep_transform<O: DataOracle + ?Sized>(
    oracle: &O,
    x: Point,
    range: (f64, f64),
    n: usize,
) -> Result<SweepCurve> {
    let (lo, hi) = range;
    if n < 16 {
        return Err(invalid(format!("sweep needs n >= 16, got {n}")));
    }
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("degenerate angle range ({lo}, {hi})")));
    }
    let h = (hi - lo) / (n - 1) as f64;
    let omegas: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    let values = map_indexed(n, |i| oracle.transform(&DirectedLine::new(x, omegas[i])));
    let v = &values;
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n - 1 {
        d1[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        d2[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
    }
    d1[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d1[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    d2[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h);
    d2[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / (h * h);
    Ok(SweepCurve { omegas, values, d1, d2 })
}

/// Least-squares slope of `log |dR/domega|` against `log delta` for angles
/// `omega_star + side * delta`. About `-1/2` next to a detectable tangency,
/// about `0` where the leading singularity cancels.
pub fn growth_exponent<O: DataOracle + ?Sized>(
    oracle: &O,
    x: Point,
    omega_star: f64,
    side: f64,
    deltas: &[f64],
) -> Result<f64> {
    if deltas.len() < 2 || deltas.iter().any(|&d| !(d > 0.0)) {
        return Err(invalid("growth fit needs at least two positive offsets"));
    }
    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .map(|&d| {
            let line = DirectedLine::new(x, omega_star + side.signum() * d);
            (d.ln(), d_omega(oracle, &line, 1e-3 * d).abs().max(f64::MIN_POSITIVE).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantoms::{radial_family, PhantomSpec};

    #[test]
    fn zero_source_gives_zero_curve() {
        let c = sweep_transform(&PhantomSpec::empty(), Point::new(0.0, -0.6), (2.0, 4.3), 16).unwrap();
        assert!(c.values.iter().chain(&c.d1).chain(&c.d2).all(|&v| v == 0.0));
    }

    #[test]
    fn derivatives_are_finite_and_consistent() {
        let spec = radial_family(1.0, 1.0, 1.4).unwrap();
        let c = sweep_transform(&spec, Point::new(0.0, -0.6), (2.0, 4.3), 16).unwrap();
        assert_eq!(c.omegas.len(), 16);
        assert!(c.d1.iter().chain(&c.d2).all(|v| v.is_finite()));
        assert!(sweep_transform(&spec, Point::new(0.0, -0.6), (1.0, 1.0), 32).is_err());
        assert!(sweep_transform(&spec, Point::new(0.0, -0.6), (1.0, 2.0), 8).is_err());
    }

    #[test]
    fn end_stencils_are_exact_for_quadratics() {
        struct Quad;
        impl DataOracle for Quad {
            fn transform(&self, line: &DirectedLine) -> f64 {
                let w = line.omega;
                1.0 + 2.0 * w - 0.5 * w * w
            }
        }
        let c = sweep_transform(&Quad, Point::new(0.0, 0.0), (0.0, 1.5), 16).unwrap();
        for (w, (d1, d2)) in c.omegas.iter().zip(c.d1.iter().zip(&c.d2)) {
            assert!((d1 - (2.0 - w)).abs() < 1e-10);
            assert!((d2 + 1.0).abs() < 1e-8);
        }
    }
}
