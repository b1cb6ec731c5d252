use super::{segment_emission, Sinogram};
use crate::error::Result;
use crate::geom::{DirectedLine, Point};
use crate::phantoms::PhantomSpec;

const MERGE_TOL: f64 = 1e-12;

/// A directed line cut into pieces on which `a` and `f` are constant.
///
/// `values[i]` holds `(a, f)` between `breakpoints[i - 1]` and
/// `breakpoints[i]`; `values[0]` and the last entry are the unbounded
/// leading and trailing pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub breakpoints: Vec<f64>,
    pub values: Vec<(f64, f64)>,
}

impl Segmentation {
    /// Finite pieces as `(t_lo, t_hi, a, f)`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values[1..])
            .map(|(w, &(a, f))| (w[0], w[1], a, f))
    }
}

pub fn segment_line(spec: &PhantomSpec, line: &DirectedLine) -> Segmentation {
    let mut ts: Vec<f64> = spec.layers.iter().flat_map(|l| l.region.line_crossings(line)).collect();
    ts.sort_by(|a, b| a.total_cmp(b));
    let mut breakpoints: Vec<f64> = Vec::with_capacity(ts.len());
    for t in ts {
        match breakpoints.last() {
            Some(&last) if t - last <= MERGE_TOL => {}
            _ => breakpoints.push(t),
        }
    }
    let mut values = Vec::with_capacity(breakpoints.len() + 1);
    values.push((0.0, 0.0));
    for w in breakpoints.windows(2) {
        values.push(spec.eval_nudged(line.at(0.5 * (w[0] + w[1]))));
    }
    if !breakpoints.is_empty() {
        values.push((0.0, 0.0));
    }
    Segmentation { breakpoints, values }
}

/// `int_{t_lo}^{t_hi} f(t) exp(-int_t^{t_hi} a) dt` over a segmentation.
pub fn attenuated_integral(seg: &Segmentation, t_lo: f64, t_hi: f64) -> f64 {
    let mut total = 0.0;
    let mut atten = 0.0f64;
    let pieces: Vec<_> = seg.pieces().collect();
    for &(lo, hi, a, f) in pieces.iter().rev() {
        let lo = lo.max(t_lo);
        let hi = hi.min(t_hi);
        if hi <= lo {
            continue;
        }
        let len = hi - lo;
        if f != 0.0 {
            total += f * segment_emission(a, len) * (-atten).exp();
        }
        atten += a * len;
    }
    total
}

/// Attenuated transform along the whole line.
pub fn forward_point(spec: &PhantomSpec, line: &DirectedLine) -> f64 {
    attenuated_integral(&segment_line(spec, line), f64::NEG_INFINITY, f64::INFINITY)
}

/// Beam transform `Da(x, theta(omega))`: total attenuation ahead of `x`.
pub fn beam_transform(spec: &PhantomSpec, x: Point, omega: f64) -> f64 {
    let seg = segment_line(spec, &DirectedLine::new(x, omega));
    seg.pieces()
        .map(|(lo, hi, a, _)| a * (hi - lo.max(0.0)).max(0.0))
        .sum()
}

/// Transport solution: flux arriving at `x` travelling along `theta(omega)`.
pub fn compute_u(spec: &PhantomSpec, x: Point, omega: f64) -> f64 {
    attenuated_integral(&segment_line(spec, &DirectedLine::new(x, omega)), f64::NEG_INFINITY, 0.0)
}

/// Continuum sinogram of an analytic phantom.
pub fn project_continuum(spec: &PhantomSpec, angles: &[f64], offsets: &[f64]) -> Result<Sinogram> {
    let n = offsets.len();
    let data = crate::par::map_indexed(angles.len() * n, |k| {
        forward_point(spec, &DirectedLine::from_sinogram(angles[k / n], offsets[k % n]))
    });
    Sinogram::new(angles.to_vec(), offsets.to_vec(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantoms::{radial_family, Layer, Region};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn disk(a: f64, f: f64, r: f64) -> PhantomSpec {
        PhantomSpec::new(vec![Layer {
            region: Region::Disk { center: Point::new(0.0, 0.0), radius: r },
            a,
            f,
        }])
        .unwrap()
    }

    #[test]
    fn radial_chord_breakpoints() {
        let spec = radial_family(1.0, 1.0, 1.4).unwrap();
        let seg = segment_line(&spec, &DirectedLine::new(Point::new(0.0, 0.0), 0.3));
        let expect = [-0.8, -0.5, 0.5, 0.8];
        assert_eq!(seg.breakpoints.len(), 4);
        for (t, e) in seg.breakpoints.iter().zip(expect) {
            assert!((t - e).abs() < 1e-15);
        }
        assert_eq!(seg.values, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.4), (0.0, 1.0), (0.0, 0.0)]);
    }

    #[test]
    fn missing_line_has_single_piece() {
        let spec = radial_family(1.0, 1.0, 1.4).unwrap();
        let seg = segment_line(&spec, &DirectedLine::from_sinogram(0.0, 3.0));
        assert!(seg.breakpoints.is_empty());
        assert_eq!(seg.values, vec![(0.0, 0.0)]);
        assert_eq!(forward_point(&spec, &DirectedLine::from_sinogram(0.0, 3.0)), 0.0);
    }

    #[test]
    fn tangent_line_collapses_root() {
        let spec = radial_family(1.0, 1.0, 1.4).unwrap();
        let seg = segment_line(&spec, &DirectedLine::from_sinogram(0.0, 0.5));
        assert_eq!(seg.breakpoints.len(), 3);
        let half = (0.64f64 - 0.25).sqrt();
        assert!((seg.breakpoints[0] + half).abs() < 1e-15);
        assert!(seg.breakpoints[1].abs() < 1e-15);
        assert!((seg.breakpoints[2] - half).abs() < 1e-15);
    }

    #[test]
    fn closed_form_values() {
        let d = disk(1.0, 1.0, 0.5);
        let through = DirectedLine::new(Point::new(0.0, -2.0), FRAC_PI_2);
        assert!((forward_point(&d, &through) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((compute_u(&d, Point::new(0.0, 0.0), 1.1) - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert!((beam_transform(&d, Point::new(0.0, 0.0), 2.0) - 0.5).abs() < 1e-15);
        assert!((beam_transform(&d, Point::new(0.0, -2.0), FRAC_PI_2) - 1.0).abs() < 1e-15);
        let unatt = disk(0.0, 1.0, 0.5);
        assert!((forward_point(&unatt, &through) - 1.0).abs() < 1e-15);
        assert_eq!(beam_transform(&unatt, Point::new(0.0, 0.0), 0.0), 0.0);
        let dark = disk(1.0, 0.0, 0.5);
        assert_eq!(compute_u(&dark, Point::new(0.0, 0.0), 0.0), 0.0);
    }

    #[test]
    fn u_equals_transform_beyond_support() {
        let spec = radial_family(1.0, 1.0, 1.4).unwrap();
        for &(w, s) in &[(0.2, 0.1), (1.0, -0.45), (4.0, 0.7)] {
            let line = DirectedLine::from_sinogram(w, s);
            let r = forward_point(&spec, &line);
            let u = compute_u(&spec, line.at(5.0), w);
            assert!((u - r).abs() <= 1e-12 * r.abs());
        }
    }

    #[test]
    fn direction_matters_only_with_attenuation() {
        let spec = crate::phantoms::square_family(1.0, 0.3, 1.0).unwrap();
        let l = DirectedLine::from_sinogram(0.0, -0.25);
        let rev = DirectedLine::new(l.x, l.omega + PI);
        assert!((forward_point(&spec, &l) - forward_point(&spec, &rev)).abs() > 1e-3);
        let mut unatt = spec.clone();
        unatt.layers[1].a = 0.0;
        let d = forward_point(&unatt, &l) - forward_point(&unatt, &rev);
        assert!(d.abs() < 1e-14);
    }
}
