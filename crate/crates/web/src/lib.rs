//! Browser bindings: angular sweeps, flat-edge jump profiles and
//! cancellation roots for the two built-in phantom families.

use spect_mb::singularity::{edge_jump_profile, solve_cancellation, sweep_transform, Family, FixedParams, LimitOptions};
use spect_mb::{radial_family, square_family, PhantomSpec, Point};
use wasm_bindgen::prelude::*;

fn to_js(e: spect_mb::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn family(name: &str, c: f64, f1: f64, f2: f64) -> Result<PhantomSpec, JsError> {
    match name {
        "radial" => radial_family(c, f1, f2).map_err(to_js),
        "square" => square_family(c, f1, f2).map_err(to_js),
        other => Err(JsError::new(&format!("unknown phantom family {other:?}"))),
    }
}

/// Transform about `(x, y)` for `n` angles in `[lo, hi]`, returned as
/// `[omegas.., values.., d_omega..]`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sweep(name: &str, c: f64, f1: f64, f2: f64, x: f64, y: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let spec = family(name, c, f1, f2)?;
    let curve = sweep_transform(&spec, Point::new(x, y), (lo, hi), n).map_err(to_js)?;
    Ok([curve.omegas, curve.values, curve.d1].concat())
}

/// Jump of the data across the horizontal direction along the bottom edge
/// line of the square phantom, from `x0` to `x1`, as `[xs.., jumps..]`.
#[wasm_bindgen]
pub fn edge_profile(c: f64, f1: f64, f2: f64, x0: f64, x1: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let spec = square_family(c, f1, f2).map_err(to_js)?;
    let prof = edge_jump_profile(&spec, Point::new(x0, -0.5), Point::new(x1, -0.5), n, &LimitOptions::default())
        .map_err(to_js)?;
    let xs = prof.iter().map(|&(l, _)| x0 + l);
    let jumps = prof.iter().map(|&(_, j)| j);
    Ok(xs.chain(jumps).collect())
}

/// Source value that cancels the leading singularity: `f2` for the radial
/// family, `f1` for the square family, the other two parameters fixed.
#[wasm_bindgen]
pub fn cancellation_root(name: &str, c: f64, other: f64) -> Result<f64, JsError> {
    let (fam, fixed) = match name {
        "radial" => (Family::Radial, FixedParams { c: Some(c), f1: Some(other), f2: None }),
        "square" => (Family::Edge, FixedParams { c: Some(c), f1: None, f2: Some(other) }),
        other => return Err(JsError::new(&format!("unknown phantom family {other:?}"))),
    };
    solve_cancellation(fam, fixed, (1e-3, 10.0)).map_err(to_js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_layout() {
        let v = sweep("radial", 1.0, 1.0, 1.4, 0.0, -0.6, 2.0, 4.3, 64).unwrap();
        assert_eq!(v.len(), 3 * 64);
        assert_eq!(v[0], 2.0);
        assert!((v[63] - 4.3).abs() < 1e-12);
    }

    #[test]
    fn roots_match_library() {
        assert!((cancellation_root("radial", 1.0, 1.0).unwrap() - 1.6245).abs() < 1e-3);
        assert!((cancellation_root("square", 1.0, 1.0).unwrap() - 0.4244).abs() < 1e-3);
    }

    #[test]
    fn profile_is_flat_before_the_square() {
        let v = edge_profile(1.0, 0.3, 1.0, -0.1, 0.6, 8).unwrap();
        let jumps = &v[8..];
        assert!((jumps[0] - jumps[1]).abs() < 1e-9);
        assert!((v[7] - 0.6).abs() < 1e-12);
    }
}
