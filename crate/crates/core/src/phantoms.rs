//! Analytic phantoms: layered regions carrying constant attenuation `a` and
//! source `f`, rasterisation onto pixel grids, and the boundary atlas used by
//! the singularity analysis.
//!
//! Layers are painted in order; a later layer overwrites earlier ones where
//! it covers them. Everything outside all layers is `(a, f) = (0, 0)`.

use crate::error::{invalid, Error, Result};
use crate::geom::{theta, theta_perp, DirectedLine, Point};
use crate::grid::{make_image, Image};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Inner and outer radii of the radial phantom family.
pub const RADIAL_INNER: f64 = 0.5;
pub const RADIAL_OUTER: f64 = 0.8;
/// Side of the inner square of the edge family; its bottom edge runs along
/// `y = -0.5` from `x = 0` to `x = 0.5`.
pub const SQUARE_INNER: f64 = 0.5;
/// Side of the outer square of the edge family, centred at the origin.
pub const SQUARE_OUTER: f64 = 1.6;

/// Offset used when a sample point has to be pushed off a boundary.
pub const BOUNDARY_NUDGE: f64 = 1e-9;
const ON_BOUNDARY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Disk { center: Point, radius: f64 },
    Annulus { center: Point, r_inner: f64, r_outer: f64 },
    Rect { x_min: f64, x_max: f64, y_min: f64, y_max: f64 },
}

impl Region {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Region::Disk { radius, .. } => radius > 0.0 && radius.is_finite(),
            Region::Annulus { r_inner, r_outer, .. } => {
                r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()
            }
            Region::Rect { x_min, x_max, y_min, y_max } => {
                x_min < x_max && y_min < y_max && x_max.is_finite() && y_max.is_finite()
                    && x_min.is_finite() && y_min.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("degenerate region {self:?}")))
        }
    }

    /// Open-set membership.
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Region::Disk { center, radius } => (p - center).norm() < radius,
            Region::Annulus { center, r_inner, r_outer } => {
                let d = (p - center).norm();
                d > r_inner && d < r_outer
            }
            Region::Rect { x_min, x_max, y_min, y_max } => {
                p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max
            }
        }
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        match *self {
            Region::Disk { center, radius } => ((p - center).norm() - radius).abs(),
            Region::Annulus { center, r_inner, r_outer } => {
                let d = (p - center).norm();
                (d - r_inner).abs().min((d - r_outer).abs())
            }
            Region::Rect { .. } => self
                .segments()
                .iter()
                .map(|&(a, b)| segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Boundary circles as `(center, radius)`.
    pub fn circles(&self) -> Vec<(Point, f64)> {
        match *self {
            Region::Disk { center, radius } => vec![(center, radius)],
            Region::Annulus { center, r_inner, r_outer } => {
                vec![(center, r_inner), (center, r_outer)]
            }
            Region::Rect { .. } => Vec::new(),
        }
    }

    /// Boundary segments, oriented anti-clockwise so the region lies on the
    /// `theta_perp` side of each one.
    pub fn segments(&self) -> Vec<(Point, Point)> {
        match *self {
            Region::Rect { x_min, x_max, y_min, y_max } => {
                let bl = Point::new(x_min, y_min);
                let br = Point::new(x_max, y_min);
                let tr = Point::new(x_max, y_max);
                let tl = Point::new(x_min, y_max);
                vec![(bl, br), (br, tr), (tr, tl), (tl, bl)]
            }
            _ => Vec::new(),
        }
    }

    /// Distance from the origin to the farthest point of the region.
    pub fn extent(&self) -> f64 {
        match *self {
            Region::Disk { center, radius } => center.norm() + radius,
            Region::Annulus { center, r_outer, .. } => center.norm() + r_outer,
            Region::Rect { x_min, x_max, y_min, y_max } => {
                let w = x_min.abs().max(x_max.abs());
                let h = y_min.abs().max(y_max.abs());
                w.hypot(h)
            }
        }
    }

    /// Line parameters where `line` crosses the region boundary.
    pub fn line_crossings(&self, line: &DirectedLine) -> Vec<f64> {
        let mut out = Vec::new();
        for (c, r) in self.circles() {
            out.extend(circle_crossings(line, c, r));
        }
        if let Region::Rect { x_min, x_max, y_min, y_max } = *self {
            let d = line.dir();
            let x = line.x;
            if d.x != 0.0 {
                for xe in [x_min, x_max] {
                    let t = (xe - x.x) / d.x;
                    let y = x.y + t * d.y;
                    if y >= y_min - ON_BOUNDARY && y <= y_max + ON_BOUNDARY {
                        out.push(t);
                    }
                }
            }
            if d.y != 0.0 {
                for ye in [y_min, y_max] {
                    let t = (ye - x.y) / d.y;
                    let xx = x.x + t * d.x;
                    if xx >= x_min - ON_BOUNDARY && xx <= x_max + ON_BOUNDARY {
                        out.push(t);
                    }
                }
            }
        }
        out
    }
}

/// Roots of `|x + t theta - c| = r`; a grazing line yields one root.
pub(crate) fn circle_crossings(line: &DirectedLine, c: Point, r: f64) -> Vec<f64> {
    let d = line.dir();
    let w = line.x - c;
    let b = w.dot(d);
    // disc = r^2 - (distance from centre to line)^2
    let perp = w.cross(d);
    let disc = (r - perp.abs()) * (r + perp.abs());
    let eps = 1e-14 * r * r;
    if disc < -eps {
        Vec::new()
    } else if disc <= eps {
        vec![-b]
    } else {
        let s = disc.sqrt();
        vec![-b - s, -b + s]
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    #[serde(flatten)]
    pub region: Region,
    pub a: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct PhantomSpec {
    pub layers: Vec<Layer>,
    /// Free-form description of how the phantom was generated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

#[derive(Deserialize)]
struct RawSpec {
    layers: Vec<Layer>,
    #[serde(default)]
    family: Option<String>,
}

impl TryFrom<RawSpec> for PhantomSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        let mut spec = PhantomSpec::new(raw.layers)?;
        spec.family = raw.family;
        Ok(spec)
    }
}

impl PhantomSpec {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        for (i, l) in layers.iter().enumerate() {
            l.region.validate()?;
            if !(l.a >= 0.0) || !l.a.is_finite() {
                return Err(invalid(format!("layer {i}: attenuation must be >= 0, got {}", l.a)));
            }
            if !l.f.is_finite() {
                return Err(invalid(format!("layer {i}: source value must be finite")));
            }
        }
        Ok(PhantomSpec { layers, family: None })
    }

    pub fn empty() -> Self {
        PhantomSpec { layers: Vec::new(), family: None }
    }

    /// Radius of a disc about the origin containing the whole support.
    pub fn extent(&self) -> f64 {
        self.layers.iter().map(|l| l.region.extent()).fold(0.0, f64::max)
    }

    pub fn eval(&self, p: Point) -> (f64, f64) {
        eval_phantom(self, p)
    }

    pub fn near_boundary(&self, p: Point, tol: f64) -> bool {
        self.layers.iter().any(|l| l.region.boundary_distance(p) < tol)
    }

    /// Evaluation that first nudges points lying on a boundary.
    pub fn eval_nudged(&self, p: Point) -> (f64, f64) {
        if self.near_boundary(p, ON_BOUNDARY) {
            self.eval(p + Point::new(BOUNDARY_NUDGE, BOUNDARY_NUDGE))
        } else {
            self.eval(p)
        }
    }
}

pub fn eval_phantom(spec: &PhantomSpec, p: Point) -> (f64, f64) {
    spec.layers
        .iter()
        .rev()
        .find(|l| l.region.contains(p))
        .map(|l| (l.a, l.f))
        .unwrap_or((0.0, 0.0))
}

pub(crate) fn radial_layers(c: f64, f1: f64, f2: f64) -> PhantomSpec {
    let origin = Point::new(0.0, 0.0);
    PhantomSpec {
        layers: vec![
            Layer {
                region: Region::Annulus { center: origin, r_inner: RADIAL_INNER, r_outer: RADIAL_OUTER },
                a: 0.0,
                f: f1,
            },
            Layer { region: Region::Disk { center: origin, radius: RADIAL_INNER }, a: c, f: f2 },
        ],
        family: Some(format!(
            "radial c={c} f1={f1} f2={f2} r_inner={RADIAL_INNER} r_outer={RADIAL_OUTER}"
        )),
    }
}

pub(crate) fn square_layers(c: f64, f1: f64, f2: f64) -> PhantomSpec {
    let h = SQUARE_OUTER / 2.0;
    PhantomSpec {
        layers: vec![
            Layer { region: Region::Rect { x_min: -h, x_max: h, y_min: -h, y_max: h }, a: 0.0, f: f1 },
            Layer {
                region: Region::Rect {
                    x_min: 0.0,
                    x_max: SQUARE_INNER,
                    y_min: -SQUARE_INNER,
                    y_max: 0.0,
                },
                a: c,
                f: f2,
            },
        ],
        family: Some(format!(
            "square c={c} f1={f1} f2={f2} inner=[0,{SQUARE_INNER}]x[-{SQUARE_INNER},0] outer_side={SQUARE_OUTER}"
        )),
    }
}

/// Disk of radius 0.5 with `(a, f) = (c, f2)` inside an annulus 0.5-0.8 with
/// `(a, f) = (0, f1)`.
pub fn radial_family(c: f64, f1: f64, f2: f64) -> Result<PhantomSpec> {
    if !(c > 0.0) {
        return Err(invalid(format!("radial family needs c > 0, got {c}")));
    }
    if f1 == f2 {
        return Err(invalid("radial family needs f1 != f2"));
    }
    if !f1.is_finite() || !f2.is_finite() {
        return Err(invalid("non-finite source value"));
    }
    Ok(radial_layers(c, f1, f2))
}

/// Inner square `[0, 0.5] x [-0.5, 0]` with `(a, f) = (c, f2)` inside a
/// centred outer square of side 1.6 with `(a, f) = (0, f1)`.
pub fn square_family(c: f64, f1: f64, f2: f64) -> Result<PhantomSpec> {
    if !(c > 0.0) {
        return Err(invalid(format!("square family needs c > 0, got {c}")));
    }
    if !f1.is_finite() || !f2.is_finite() {
        return Err(invalid("non-finite source value"));
    }
    Ok(square_layers(c, f1, f2))
}

#[derive(Debug, Clone)]
pub struct Raster {
    pub a: Image,
    pub f: Image,
    /// Set when the grid does not contain the phantom support.
    pub warning: Option<String>,
}

/// Samples the phantom at every pixel centre.
pub fn rasterize(spec: &PhantomSpec, m: usize, dx: f64) -> Result<Raster> {
    let mut a = make_image(m, dx, 0.0)?;
    let mut f = make_image(m, dx, 0.0)?;
    for r in 0..m {
        for c in 0..m {
            let (av, fv) = spec.eval_nudged(a.pixel_center(r, c));
            a.set(r, c, av);
            f.set(r, c, fv);
        }
    }
    let half = m as f64 * dx / 2.0;
    let warning = spec
        .layers
        .iter()
        .any(|l| match l.region {
            Region::Disk { center, radius } => {
                center.x.abs() + radius > half || center.y.abs() + radius > half
            }
            Region::Annulus { center, r_outer, .. } => {
                center.x.abs() + r_outer > half || center.y.abs() + r_outer > half
            }
            Region::Rect { x_min, x_max, y_min, y_max } => {
                x_min < -half || x_max > half || y_min < -half || y_max > half
            }
        })
        .then(|| format!("grid half-width {half} does not cover the phantom support"));
    Ok(Raster { a, f, warning })
}

/// Values of `(a, f)` on one side of a boundary piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideValues {
    pub a: f64,
    pub f: f64,
}

/// A full boundary circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: Point,
    pub radius: f64,
    /// Angular extent `(start, end)` in radians about the centre.
    pub extent: (f64, f64),
    pub inside: SideValues,
    pub outside: SideValues,
}

impl Arc {
    pub fn curvature(&self) -> f64 {
        1.0 / self.radius
    }

    pub fn point_at(&self, phi: f64) -> Point {
        self.center + self.radius * theta(phi)
    }
}

/// A flat boundary segment from `p0` to `p1`. `left` is the `theta_perp`
/// side for the direction `p0 -> p1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub p0: Point,
    pub p1: Point,
    pub left: SideValues,
    pub right: SideValues,
}

impl Edge {
    pub fn curvature(&self) -> f64 {
        0.0
    }

    pub fn length(&self) -> f64 {
        (self.p1 - self.p0).norm()
    }

    pub fn omega(&self) -> f64 {
        let d = self.p1 - self.p0;
        d.y.atan2(d.x)
    }

    /// The directed line carrying the edge, based at `p0`.
    pub fn line(&self) -> DirectedLine {
        DirectedLine::new(self.p0, self.omega())
    }

    /// Whether `line` contains this edge (either orientation).
    pub fn lies_on(&self, line: &DirectedLine, tol: f64) -> bool {
        line.signed_distance(self.p0).abs() < tol && line.signed_distance(self.p1).abs() < tol
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryAtlas {
    pub arcs: Vec<Arc>,
    pub edges: Vec<Edge>,
    pub corners: Vec<Point>,
}

impl BoundaryAtlas {
    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty() && self.edges.is_empty() && self.corners.is_empty()
    }

    /// Edges lying on `line`, i.e. the reason `line` belongs to the set of
    /// lines through flat edges.
    pub fn edges_on_line(&self, line: &DirectedLine) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.lies_on(line, 1e-9)).collect()
    }

    pub fn is_corner(&self, p: Point, tol: f64) -> bool {
        self.corners.iter().any(|&c| (c - p).norm() < tol)
    }
}

const SIDE_PROBE: f64 = 1e-7;

fn side_values(spec: &PhantomSpec, p: Point) -> SideValues {
    let (a, f) = spec.eval(p);
    SideValues { a, f }
}

/// Classifies every boundary of the phantom into arcs, flat edges and corners.
pub fn boundary_atlas(spec: &PhantomSpec) -> Result<BoundaryAtlas> {
    check_overlaps(spec)?;
    let mut atlas = BoundaryAtlas::default();

    let mut circles: Vec<(Point, f64)> = Vec::new();
    for l in &spec.layers {
        for (c, r) in l.region.circles() {
            if !circles.iter().any(|&(c2, r2)| (c - c2).norm() < 1e-12 && (r - r2).abs() < 1e-12) {
                circles.push((c, r));
            }
        }
    }
    for (center, radius) in circles {
        // sample at an angle unlikely to coincide with an axis-aligned feature
        let n = theta(0.3);
        let p = center + radius * n;
        let inside = side_values(spec, p - SIDE_PROBE * n);
        let outside = side_values(spec, p + SIDE_PROBE * n);
        if inside != outside {
            atlas.arcs.push(Arc { center, radius, extent: (0.0, TAU), inside, outside });
        }
    }

    let mut segs: Vec<(Point, Point)> = Vec::new();
    let mut corner_candidates: Vec<Point> = Vec::new();
    for l in &spec.layers {
        for (a, b) in l.region.segments() {
            let dup = segs.iter().any(|&(c, d)| {
                ((a - c).norm() < 1e-12 && (b - d).norm() < 1e-12)
                    || ((a - d).norm() < 1e-12 && (b - c).norm() < 1e-12)
            });
            if !dup {
                segs.push((a, b));
            }
            if !corner_candidates.iter().any(|&c| (c - a).norm() < 1e-12) {
                corner_candidates.push(a);
            }
        }
    }
    for (p0, p1) in segs {
        let mid = 0.5 * (p0 + p1);
        let n = (p1 - p0).perp();
        let n = (1.0 / n.norm()) * n;
        let left = side_values(spec, mid + SIDE_PROBE * n);
        let right = side_values(spec, mid - SIDE_PROBE * n);
        if left != right {
            atlas.edges.push(Edge { p0, p1, left, right });
        }
    }
    for c in corner_candidates {
        let touching = atlas
            .edges
            .iter()
            .filter(|e| (e.p0 - c).norm() < 1e-12 || (e.p1 - c).norm() < 1e-12)
            .count();
        if touching >= 2 {
            atlas.corners.push(c);
        }
    }
    Ok(atlas)
}

fn check_overlaps(spec: &PhantomSpec) -> Result<()> {
    for i in 0..spec.layers.len() {
        for j in (i + 1)..spec.layers.len() {
            if boundaries_cross(&spec.layers[i].region, &spec.layers[j].region) {
                return Err(Error::UnsupportedOverlap(i, j));
            }
        }
    }
    Ok(())
}

fn boundaries_cross(p: &Region, q: &Region) -> bool {
    const TOL: f64 = 1e-12;
    for (c1, r1) in p.circles() {
        for (c2, r2) in q.circles() {
            let d = (c1 - c2).norm();
            if d > (r1 - r2).abs() + TOL && d < r1 + r2 - TOL {
                return true;
            }
        }
    }
    let circle_seg = |circles: Vec<(Point, f64)>, segs: Vec<(Point, Point)>| {
        circles.iter().any(|&(c, r)| {
            segs.iter().any(|&(a, b)| {
                let len = (b - a).norm();
                let line = DirectedLine::new(a, (b.y - a.y).atan2(b.x - a.x));
                let roots = circle_crossings(&line, c, r);
                roots.len() == 2 && roots.iter().any(|&t| t >= -TOL && t <= len + TOL)
            })
        })
    };
    if circle_seg(p.circles(), q.segments()) || circle_seg(q.circles(), p.segments()) {
        return true;
    }
    for (a0, a1) in p.segments() {
        for (b0, b1) in q.segments() {
            if segments_conflict(a0, a1, b0, b1) {
                return true;
            }
        }
    }
    false
}

/// Transversal crossings, T-junctions and partial collinear overlaps.
fn segments_conflict(a0: Point, a1: Point, b0: Point, b1: Point) -> bool {
    const TOL: f64 = 1e-12;
    let da = a1 - a0;
    let db = b1 - b0;
    let denom = da.cross(db);
    if denom.abs() > TOL {
        let t = (b0 - a0).cross(db) / denom;
        let u = (b0 - a0).cross(da) / denom;
        let inside = |s: f64| s > TOL && s < 1.0 - TOL;
        let on = |s: f64| (-TOL..=1.0 + TOL).contains(&s);
        return (inside(t) && on(u)) || (on(t) && inside(u));
    }
    if (b0 - a0).cross(da).abs() > TOL * da.norm().max(1.0) {
        return false;
    }
    // collinear: project b onto a
    let len2 = da.dot(da);
    let s0 = (b0 - a0).dot(da) / len2;
    let s1 = (b1 - a0).dot(da) / len2;
    let (lo, hi) = (s0.min(s1), s0.max(s1));
    let overlap = hi.min(1.0) - lo.max(0.0);
    let identical = (lo.abs() < TOL && (hi - 1.0).abs() < TOL) || overlap <= TOL;
    !identical
}

/// Geometry of one tangency between a directed line and a boundary arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentPointInfo {
    pub x_star: Point,
    pub omega_star: f64,
    /// Signed parameter distance from the probe point to `x_star` along `theta(omega_star)`.
    pub ell: f64,
    pub kappa: f64,
    /// `sqrt(|ell| / (2 kappa))`.
    pub k0: f64,
    /// Side sign: rotating the line towards `omega_star + s 0` makes it cut the arc.
    pub s: f64,
    /// Jump `a_+ - a_-` across the arc at `x_star`, sides taken along `theta_perp`.
    pub delta_a: f64,
    /// Jump `f_+ - f_-` across the arc at `x_star`.
    pub delta_f: f64,
}

/// Tangency data for the line through `x` with direction `omega` touching
/// `arc`. Fails if the line is not tangent to the circle.
pub fn tangent_info_for_direction(arc: &Arc, x: Point, omega: f64) -> Result<TangentPointInfo> {
    let th = theta(omega);
    let perp = theta_perp(omega);
    let ell = (arc.center - x).dot(th);
    let x_star = x + ell * th;
    let to_center = arc.center - x_star;
    let dist = to_center.norm();
    if (dist - arc.radius).abs() > 1e-9 * arc.radius.max(1.0) {
        return Err(Error::Geometry(format!(
            "line through {x:?} at angle {omega} is not tangent to the circle (distance {dist}, radius {})",
            arc.radius
        )));
    }
    let sigma = if to_center.dot(perp) > 0.0 { 1.0 } else { -1.0 };
    let (plus, minus) = if sigma > 0.0 { (arc.inside, arc.outside) } else { (arc.outside, arc.inside) };
    let kappa = arc.curvature();
    let s = if ell < 0.0 { -sigma } else { sigma };
    Ok(TangentPointInfo {
        x_star,
        omega_star: omega.rem_euclid(TAU),
        ell,
        kappa,
        k0: (ell.abs() / (2.0 * kappa)).sqrt(),
        s,
        delta_a: plus.a - minus.a,
        delta_f: plus.f - minus.f,
    })
}

/// The two tangent lines from `x` to arc `which_arc`, each oriented from `x`
/// towards its tangency point (so `ell > 0`).
pub fn tangent_info(atlas: &BoundaryAtlas, x: Point, which_arc: usize) -> Result<Vec<TangentPointInfo>> {
    let arc = atlas
        .arcs
        .get(which_arc)
        .ok_or_else(|| invalid(format!("arc index {which_arc} out of range ({} arcs)", atlas.arcs.len())))?;
    let to_c = arc.center - x;
    let d = to_c.norm();
    if d <= arc.radius * (1.0 + 1e-12) {
        return Err(Error::Geometry(format!(
            "probe point {x:?} is not strictly outside the circle of radius {}",
            arc.radius
        )));
    }
    let base = to_c.y.atan2(to_c.x);
    let half = (arc.radius / d).asin();
    [base - half, base + half]
        .into_iter()
        .map(|w| tangent_info_for_direction(arc, x, w))
        .collect()
}

/// Tangency at the arc point with polar angle `phi`, for the line through
/// that point with direction `omega = phi + pi/2` (anti-clockwise tangent).
pub fn tangent_at_arc_point(arc: &Arc, phi: f64) -> TangentPointInfo {
    let p = arc.point_at(phi);
    tangent_info_for_direction(arc, p, phi + PI / 2.0).expect("tangent through an arc point")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn radial_evaluation() {
        let spec = radial_family(1.0, 1.0, 1.4).unwrap();
        assert_eq!(eval_phantom(&spec, p(0.0, 0.0)), (1.0, 1.4));
        assert_eq!(eval_phantom(&spec, p(0.0, 0.7)), (0.0, 1.0));
        assert_eq!(eval_phantom(&spec, p(5.0, 5.0)), (0.0, 0.0));
    }

    #[test]
    fn family_preconditions() {
        assert!(radial_family(1.0, 1.0, 1.0).is_err());
        assert!(radial_family(0.0, 1.0, 1.4).is_err());
        assert!(square_family(1.0, 1.0, 1.0).is_ok());
        assert!(square_family(-1.0, 0.3, 1.0).is_err());
    }

    #[test]
    fn square_geometry() {
        let spec = square_family(1.0, 0.3, 1.0).unwrap();
        assert_eq!(eval_phantom(&spec, p(0.25, -0.25)), (1.0, 1.0));
        assert_eq!(eval_phantom(&spec, p(0.25, -0.6)), (0.0, 0.3));
        assert_eq!(eval_phantom(&spec, p(-0.7, 0.7)), (0.0, 0.3));
        assert_eq!(eval_phantom(&spec, p(0.9, 0.0)), (0.0, 0.0));
    }

    #[test]
    fn rasterize_centre_and_area() {
        let spec = radial_family(1.0, 1.0, 1.4).unwrap();
        let m = 256;
        let dx = 2.0 / m as f64;
        let r = rasterize(&spec, m, dx).unwrap();
        assert!(r.warning.is_none());
        // the four pixels around the origin all sit inside the disk
        assert_eq!(r.a.get(m / 2, m / 2), 1.0);
        assert_eq!(r.f.get(m / 2 - 1, m / 2 - 1), 1.4);
        let count = r.a.values().iter().filter(|&&v| v == 1.0).count() as f64;
        let area = PI * 0.25 / (dx * dx);
        let perimeter = 2.0 * PI * 0.5 / dx;
        assert!((count - area).abs() < perimeter, "count {count} vs area {area}");
        assert!(r.a.values().iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn rasterize_empty_and_warning() {
        let r = rasterize(&PhantomSpec::empty(), 8, 0.1).unwrap();
        assert!(r.a.values().iter().all(|&v| v == 0.0));
        assert!(r.f.values().iter().all(|&v| v == 0.0));
        let spec = radial_family(1.0, 1.0, 1.4).unwrap();
        assert!(rasterize(&spec, 8, 0.1).unwrap().warning.is_some());
    }

    #[test]
    fn atlas_radial() {
        let atlas = boundary_atlas(&radial_family(1.0, 1.0, 1.4).unwrap()).unwrap();
        assert_eq!(atlas.arcs.len(), 2);
        assert!(atlas.edges.is_empty());
        let inner = atlas.arcs.iter().find(|a| a.radius == 0.5).unwrap();
        assert_eq!(inner.inside, SideValues { a: 1.0, f: 1.4 });
        assert_eq!(inner.outside, SideValues { a: 0.0, f: 1.0 });
        let outer = atlas.arcs.iter().find(|a| a.radius == 0.8).unwrap();
        assert_eq!(outer.inside.a, outer.outside.a);
        assert_ne!(outer.inside.f, outer.outside.f);
        assert_eq!(inner.curvature(), 2.0);
    }

    #[test]
    fn atlas_square_and_empty() {
        let atlas = boundary_atlas(&square_family(1.0, 0.3, 1.0).unwrap()).unwrap();
        assert_eq!(atlas.edges.len(), 8);
        assert_eq!(atlas.corners.len(), 8);
        assert!(atlas.arcs.is_empty());
        assert!(atlas.edges.iter().all(|e| e.curvature() == 0.0));
        assert!(boundary_atlas(&PhantomSpec::empty()).unwrap().is_empty());
    }

    #[test]
    fn atlas_rejects_partial_overlap() {
        let layers = vec![
            Layer { region: Region::Disk { center: p(0.0, 0.0), radius: 0.5 }, a: 1.0, f: 1.0 },
            Layer { region: Region::Disk { center: p(0.6, 0.0), radius: 0.5 }, a: 0.5, f: 1.0 },
        ];
        let spec = PhantomSpec::new(layers).unwrap();
        assert!(matches!(boundary_atlas(&spec), Err(Error::UnsupportedOverlap(0, 1))));
        let layers = vec![
            Layer { region: Region::Rect { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 }, a: 1.0, f: 1.0 },
            Layer { region: Region::Disk { center: p(1.0, 0.5), radius: 0.3 }, a: 0.5, f: 1.0 },
        ];
        assert!(boundary_atlas(&PhantomSpec::new(layers).unwrap()).is_err());
    }

    #[test]
    fn atlas_side_values_match_painter() {
        for spec in [radial_family(1.0, 1.0, 1.4).unwrap(), square_family(1.0, 0.3, 1.0).unwrap()] {
            let atlas = boundary_atlas(&spec).unwrap();
            for eps in [1e-4, 1e-6] {
                for arc in &atlas.arcs {
                    for phi in [0.1, 1.7, 4.0] {
                        let n = theta(phi);
                        let q = arc.point_at(phi);
                        let (ai, fi) = spec.eval(q - eps * n);
                        let (ao, fo) = spec.eval(q + eps * n);
                        assert_eq!(SideValues { a: ai, f: fi }, arc.inside);
                        assert_eq!(SideValues { a: ao, f: fo }, arc.outside);
                    }
                }
                for e in &atlas.edges {
                    let n = theta_perp(e.omega());
                    for s in [0.25, 0.5, 0.75] {
                        let q = e.p0 + s * (e.p1 - e.p0);
                        let (al, fl) = spec.eval(q + eps * n);
                        let (ar, fr) = spec.eval(q - eps * n);
                        assert_eq!(SideValues { a: al, f: fl }, e.left);
                        assert_eq!(SideValues { a: ar, f: fr }, e.right);
                    }
                }
            }
        }
    }

    #[test]
    fn tangent_geometry() {
        let atlas = boundary_atlas(&radial_family(1.0, 1.0, 1.4).unwrap()).unwrap();
        let inner = atlas.arcs.iter().position(|a| a.radius == 0.5).unwrap();
        let infos = tangent_info(&atlas, p(0.0, -0.6), inner).unwrap();
        assert_eq!(infos.len(), 2);
        let ell = 0.11f64.sqrt();
        for t in &infos {
            assert!((t.ell - ell).abs() < 1e-14);
            assert_eq!(t.kappa, 2.0);
            assert!((t.k0 - (ell / 4.0).sqrt()).abs() < 1e-14);
            // the tangent line is at distance r from the centre
            let line = DirectedLine::new(p(0.0, -0.6), t.omega_star);
            assert!((line.signed_distance(p(0.0, 0.0)).abs() - 0.5).abs() < 1e-12);
            // jump across the shared boundary of a and f, seen from the centre side
            assert_eq!(t.delta_a.abs(), 1.0);
            assert!((t.delta_f.abs() - 0.4).abs() < 1e-12);
        }
        let far = tangent_info(&atlas, p(0.0, -10.0), inner).unwrap();
        assert!((far[0].ell - (100.0f64 - 0.25).sqrt()).abs() < 1e-12);
        assert!(tangent_info(&atlas, p(0.0, -0.5), inner).is_err());
        assert!(tangent_info(&atlas, p(0.0, 0.1), inner).is_err());
    }

    #[test]
    fn spec_json_layout() {
        let spec = radial_family(1.0, 1.0, 1.4).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.starts_with(r#"{"layers":[{"kind":"annulus","center":[0.0,0.0],"r_inner":0.5"#));
        let back: PhantomSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"layers":[{"kind":"disk","center":[0,0],"radius":-1,"a":1,"f":1}]}"#;
        assert!(serde_json::from_str::<PhantomSpec>(bad).is_err());
    }
}
