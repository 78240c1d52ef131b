//! Exact-model geometry of `H^m` (curvature -1) on the upper sheet of the
//! hyperboloid `<x,x>_M = -1` in Minkowski space `R^{m,1}`.
//!
//! Every [`HPoint`] carries a polar form `(r, u)` about the basepoint
//! `o = (1,0,...,0)`, meaning the point `exp_o(r u)`. Hyperboloid coordinates
//! are attached only while `r <= 30`; past that `cosh r` loses too much to be
//! useful and the polar form is authoritative.
//!
//! Points built near a far-away anchor (nets around a centre at radius 50,
//! say) additionally keep a *chart*: the anchor's polar form plus the point's
//! offset in the anchor's transported frame. Two nearby points at radius 50
//! differ in direction by about `e^-50`, which no `f64` direction vector can
//! resolve, so distances between points sharing an anchor are evaluated in
//! the chart instead.
//!
//! Tangent vectors are stored in *frame coordinates*: components with respect
//! to the orthonormal frame at the base point obtained by parallel transport
//! of the standard frame at `o` along the geodesic from `o`. The Minkowski
//! ambient vector is available through [`HTangent::ambient`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, HypError, Result};
use crate::numerics::{
    asinh_exp, axis, dist, dot, ln_cosh, ln_sinh, log_add_exp, norm, scale,
};

/// Largest polar radius for which hyperboloid coordinates are kept.
pub const COORDS_RADIUS_LIMIT: f64 = 30.0;

/// Default absolute tolerance on distances.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Minkowski bilinear form `-x0 y0 + sum_i xi yi`.
pub fn minkowski_inner(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "minkowski_inner: length mismatch");
    -x[0] * y[0] + dot(&x[1..], &y[1..])
}

/// Polar form `(r, u)` of the point `exp_o(r u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    radius: f64,
    direction: Vec<f64>,
}

impl Polar {
    pub fn new(radius: f64, direction: Vec<f64>) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(precondition(format!("polar radius must be finite and >= 0, got {radius}")));
        }
        if direction.is_empty() {
            return Err(precondition("direction must have length m >= 1"));
        }
        let n = norm(&direction);
        if !(n.is_finite() && n > 0.0) {
            return Err(precondition("direction must be a non-zero finite vector"));
        }
        Ok(Self {
            radius,
            direction: scale(&direction, 1.0 / n),
        })
    }

    pub fn origin(m: usize) -> Self {
        Self {
            radius: 0.0,
            direction: axis(m, 0),
        }
    }

    /// Polar form of `exp_o(v)`.
    pub fn from_tangent(v: &[f64]) -> Self {
        let r = norm(v);
        if r == 0.0 {
            Self::origin(v.len())
        } else {
            Self {
                radius: r,
                direction: scale(v, 1.0 / r),
            }
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn is_origin(&self) -> bool {
        self.radius == 0.0
    }

    /// `r u`, the preimage under `exp_o`.
    pub fn tangent(&self) -> Vec<f64> {
        scale(&self.direction, self.radius)
    }

    /// `cosh(r) o + sinh(r) (0, u)`. Overflows to infinity past r ~ 710.
    pub fn coords(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim() + 1);
        x.push(self.radius.cosh());
        let s = self.radius.sinh();
        x.extend(self.direction.iter().map(|d| s * d));
        x
    }
}

/// Offset of a point in the transported frame of an anchor.
#[derive(Clone, Debug)]
struct Chart {
    anchor: Arc<Polar>,
    offset: Vec<f64>,
}

impl Chart {
    fn same_anchor(&self, other: &Chart) -> bool {
        Arc::ptr_eq(&self.anchor, &other.anchor) || *self.anchor == *other.anchor
    }
}

/// A point of `H^m`.
#[derive(Clone, Debug)]
pub struct HPoint {
    polar: Polar,
    coords: Option<Vec<f64>>,
    chart: Option<Chart>,
}

impl HPoint {
    pub fn origin(m: usize) -> Self {
        Self::from_polar_value(Polar::origin(m))
    }

    pub fn from_polar(radius: f64, direction: Vec<f64>) -> Result<Self> {
        Ok(Self::from_polar_value(Polar::new(radius, direction)?))
    }

    pub fn from_polar_value(polar: Polar) -> Self {
        let coords = (polar.radius <= COORDS_RADIUS_LIMIT).then(|| polar.coords());
        Self {
            polar,
            coords,
            chart: None,
        }
    }

    /// `exp_o(v)` for `v` in frame coordinates at `o`.
    pub fn exp_origin(v: &[f64]) -> Self {
        Self::from_polar_value(Polar::from_tangent(v))
    }

    /// Builds a point from hyperboloid coordinates. The time component is
    /// re-projected onto the sheet from the spatial part.
    pub fn from_coords(x: Vec<f64>) -> Result<Self> {
        if x.len() < 3 {
            return Err(precondition("hyperboloid coordinates need length m+1 >= 3"));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(HypError::NumericRange("non-finite hyperboloid coordinates".into()));
        }
        if x[0] < 1.0 - 1e-12 {
            return Err(precondition(format!("x0 = {} is below the upper sheet", x[0])));
        }
        let self_product = minkowski_inner(&x, &x);
        if (self_product + 1.0).abs() > 1e-9 * x[0] * x[0] {
            return Err(precondition(format!(
                "<x,x>_M = {self_product} is not -1 within tolerance"
            )));
        }
        let spatial = &x[1..];
        let s = norm(spatial);
        let polar = if s == 0.0 {
            Polar::origin(spatial.len())
        } else {
            Polar {
                radius: s.asinh(),
                direction: scale(spatial, 1.0 / s),
            }
        };
        let coords = (polar.radius <= COORDS_RADIUS_LIMIT).then(|| {
            let mut c = Vec::with_capacity(x.len());
            c.push((1.0 + s * s).sqrt());
            c.extend_from_slice(spatial);
            c
        });
        Ok(Self {
            polar,
            coords,
            chart: None,
        })
    }

    /// The point with frame offset `offset` at `anchor`, i.e. the image of
    /// `exp_o(offset)` under the transvection taking `o` to `anchor`.
    pub(crate) fn in_chart(anchor: Arc<Polar>, offset: Vec<f64>) -> Self {
        if anchor.is_origin() {
            return Self::exp_origin(&offset);
        }
        let polar = boost_polar(&anchor, &offset);
        let mut p = Self::from_polar_value(polar);
        p.chart = Some(Chart { anchor, offset });
        p
    }

    pub fn dim(&self) -> usize {
        self.polar.dim()
    }

    pub fn polar(&self) -> &Polar {
        &self.polar
    }

    pub fn radius(&self) -> f64 {
        self.polar.radius
    }

    /// Hyperboloid coordinates, present while the radius is at most
    /// [`COORDS_RADIUS_LIMIT`].
    pub fn coords(&self) -> Option<&[f64]> {
        self.coords.as_deref()
    }

    /// `(anchor, offset)` when the point was built in a far anchor's chart.
    pub fn chart(&self) -> Option<(&Polar, &[f64])> {
        self.chart.as_ref().map(|c| (c.anchor.as_ref(), c.offset.as_slice()))
    }

    /// `[r, u_1, ..., u_m]`, the serialized polar form.
    pub fn polar_row(&self) -> Vec<f64> {
        let mut row = Vec::with_capacity(self.dim() + 1);
        row.push(self.polar.radius);
        row.extend_from_slice(&self.polar.direction);
        row
    }

    pub fn from_polar_row(row: &[f64]) -> Result<Self> {
        match row.split_first() {
            Some((r, dir)) => Self::from_polar(*r, dir.to_vec()),
            None => Err(precondition("empty polar row")),
        }
    }
}

/// Hyperbolic law of cosines in the form
/// `sinh^2(d/2) = sinh^2((r1-r2)/2) + sinh r1 sinh r2 sin^2(theta/2)`,
/// which has no cancellation at small `d` and is evaluated in log domain past
/// radius 300.
pub fn distance_from_sin_half(r1: f64, r2: f64, sin_half: f64) -> f64 {
    let s = sin_half.clamp(0.0, 1.0);
    if r1.max(r2) < 300.0 {
        let a = ((r1 - r2) / 2.0).sinh();
        let t = a * a + r1.sinh() * r2.sinh() * s * s;
        return 2.0 * t.sqrt().asinh();
    }
    let la = 2.0 * ln_sinh((r1 - r2).abs() / 2.0);
    let lb = ln_sinh(r1) + ln_sinh(r2) + 2.0 * s.ln();
    2.0 * asinh_exp(log_add_exp(la, lb) / 2.0)
}

/// Distance between `exp_o(r1 u1)` and `exp_o(r2 u2)` where `cos_theta = u1 . u2`.
pub fn polar_distance(r1: f64, r2: f64, cos_theta: f64) -> Result<f64> {
    if !(r1 >= 0.0 && r2 >= 0.0) {
        return Err(precondition("polar radii must be >= 0"));
    }
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&cos_theta) {
        return Err(precondition(format!("cos_theta = {cos_theta} outside [-1, 1]")));
    }
    let c = cos_theta.clamp(-1.0, 1.0);
    Ok(distance_from_sin_half(r1, r2, ((1.0 - c) / 2.0).sqrt()))
}

fn polar_chord(a: &Polar, b: &Polar) -> f64 {
    let s = dist(&a.direction, &b.direction) / 2.0;
    distance_from_sin_half(a.radius, b.radius, s)
}

fn local_distance(a: &[f64], b: &[f64]) -> f64 {
    polar_chord(&Polar::from_tangent(a), &Polar::from_tangent(b))
}

fn chart_distance(chart: &Chart, other: &Polar) -> f64 {
    let v = chart_log(&chart.anchor, other);
    local_distance(&chart.offset, &v)
}

/// Geodesic distance.
pub fn distance(x: &HPoint, y: &HPoint) -> f64 {
    match (&x.chart, &y.chart) {
        (Some(a), Some(b)) if a.same_anchor(b) => local_distance(&a.offset, &b.offset),
        (Some(a), Some(b)) => {
            if b.anchor.radius > a.anchor.radius {
                chart_distance(b, &x.polar)
            } else {
                chart_distance(a, &y.polar)
            }
        }
        (Some(a), None) => chart_distance(a, &y.polar),
        (None, Some(b)) => chart_distance(b, &x.polar),
        (None, None) => polar_chord(&x.polar, &y.polar),
    }
}

/// Polar form of `T_anchor(exp_o(offset))`, with `T_anchor` the transvection
/// along the geodesic from `o` to the anchor.
///
/// The spatial part of the image is `A u + B w` where `u` is the anchor
/// direction and `w` the unit component of the offset orthogonal to it;
/// both are computed scaled by `e^-(R+s)` so nothing overflows.
fn boost_polar(anchor: &Polar, offset: &[f64]) -> Polar {
    let s = norm(offset);
    if s == 0.0 {
        return anchor.clone();
    }
    let big = anchor.radius;
    let u = &anchor.direction;
    let vh = scale(offset, 1.0 / s);
    let cb = dot(&vh, u).clamp(-1.0, 1.0);
    let perp: Vec<f64> = vh.iter().zip(u).map(|(v, a)| v - cb * a).collect();
    let sb = norm(&perp);

    let em2r = (-2.0 * big).exp();
    let em2s = (-2.0 * s).exp();
    let sr = -(-2.0 * big).exp_m1();
    let ss = -(-2.0 * s).exp_m1();
    let a = if cb >= 0.0 {
        (sr * (1.0 + em2s) + (1.0 + em2r) * ss * cb) / 4.0
    } else {
        // sinh(R - s) e^-(R+s) + cosh R sinh s (1 + cb) e^-(R+s)
        let one_plus = dist(&vh, &scale(u, -1.0)).powi(2) / 2.0;
        let head = if big >= s {
            em2s * (-(-2.0 * (big - s)).exp_m1()) / 2.0
        } else {
            -em2r * (-(-2.0 * (s - big)).exp_m1()) / 2.0
        };
        head + (1.0 + em2r) * ss * one_plus / 4.0
    };
    let b = ss / 2.0 * (-big).exp() * sb;
    let nrm = a.hypot(b);
    if nrm == 0.0 {
        return Polar::origin(u.len());
    }
    let radius = asinh_exp(big + s + nrm.ln());
    let mut direction: Vec<f64> = u.iter().map(|x| a * x).collect();
    if sb > 0.0 {
        for (d, p) in direction.iter_mut().zip(&perp) {
            *d += b * p / sb;
        }
    }
    let dn = norm(&direction);
    Polar {
        radius,
        direction: scale(&direction, 1.0 / dn),
    }
}

/// Frame coordinates at `anchor` of `log_anchor(target)`.
///
/// Equivalently the `o`-tangent of `T_anchor^{-1}(target)`: its component
/// along the anchor direction is proportional to
/// `sinh(ry - rx) - 2 cosh rx sinh ry sin^2(theta/2)`, the orthogonal one to
/// `sinh ry sin theta`. Both are formed in log domain and normalized.
pub(crate) fn chart_log(anchor: &Polar, target: &Polar) -> Vec<f64> {
    let rx = anchor.radius;
    let ry = target.radius;
    let m = anchor.dim();
    if rx == 0.0 {
        return target.tangent();
    }
    if ry == 0.0 {
        return scale(&anchor.direction, -rx);
    }
    let u = &anchor.direction;
    let t = &target.direction;
    let sin_half = (dist(u, t) / 2.0).min(1.0);
    let d = distance_from_sin_half(rx, ry, sin_half);
    if d == 0.0 {
        return vec![0.0; m];
    }
    let c = dot(u, t).clamp(-1.0, 1.0);
    let perp: Vec<f64> = t.iter().zip(u).map(|(ti, ui)| ti - c * ui).collect();
    let sin_theta = norm(&perp);

    let delta = ry - rx;
    let l1 = ln_sinh(delta.abs());
    let l2 = std::f64::consts::LN_2 + ln_cosh(rx) + ln_sinh(ry) + 2.0 * sin_half.ln();
    let l3 = ln_sinh(ry) + sin_theta.ln();
    let top = l1.max(l2).max(l3);
    let along = delta.signum() * (l1 - top).exp() - (l2 - top).exp();
    let across = (l3 - top).exp();
    let nrm = along.hypot(across);
    if nrm == 0.0 {
        return vec![0.0; m];
    }
    let mut v: Vec<f64> = u.iter().map(|x| along * x).collect();
    if sin_theta > 0.0 {
        for (vi, p) in v.iter_mut().zip(&perp) {
            *vi += across * p / sin_theta;
        }
    }
    let vn = norm(&v);
    scale(&v, d / vn)
}

/// Tangent vector at `base`, in the transported frame at `base`.
#[derive(Clone, Debug)]
pub struct HTangent {
    base: HPoint,
    frame: Vec<f64>,
}

impl HTangent {
    pub fn new(base: HPoint, frame: Vec<f64>) -> Result<Self> {
        if frame.len() != base.dim() {
            return Err(precondition(format!(
                "tangent has {} components, base dimension is {}",
                frame.len(),
                base.dim()
            )));
        }
        Ok(Self { base, frame })
    }

    pub fn zero(base: HPoint) -> Self {
        let m = base.dim();
        Self {
            base,
            frame: vec![0.0; m],
        }
    }

    /// From an ambient Minkowski vector, which must be orthogonal to `base`.
    pub fn from_ambient(base: HPoint, vec: &[f64]) -> Result<Self> {
        let x = base
            .coords()
            .ok_or_else(|| HypError::NumericRange("base beyond the coordinate range".into()))?;
        if vec.len() != x.len() {
            return Err(precondition("ambient tangent has the wrong length"));
        }
        let scale_ref = x[0] * vec.iter().fold(1.0_f64, |a, b| a.max(b.abs()));
        if minkowski_inner(x, vec).abs() > 1e-12 * scale_ref {
            return Err(precondition("vector is not Minkowski-orthogonal to its base"));
        }
        let r = base.radius();
        let u = base.polar.direction.clone();
        let vs = &vec[1..];
        let along = (r.cosh() - 1.0) * dot(vs, &u) - r.sinh() * vec[0];
        let frame = vs.iter().zip(&u).map(|(v, ui)| v + along * ui).collect();
        Ok(Self { base, frame })
    }

    pub fn base(&self) -> &HPoint {
        &self.base
    }

    pub fn frame(&self) -> &[f64] {
        &self.frame
    }

    /// Riemannian length, equal to the Minkowski norm of the ambient vector.
    pub fn norm(&self) -> f64 {
        norm(&self.frame)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            base: self.base.clone(),
            frame: scale(&self.frame, s),
        }
    }

    /// The ambient Minkowski vector `(sinh R (f.u), f + (cosh R - 1)(f.u) u)`.
    pub fn ambient(&self) -> Result<Vec<f64>> {
        let r = self.base.radius();
        if r > COORDS_RADIUS_LIMIT {
            return Err(HypError::NumericRange(format!(
                "ambient tangent requested at radius {r} > {COORDS_RADIUS_LIMIT}"
            )));
        }
        let u = self.base.polar.direction();
        let fu = dot(&self.frame, u);
        let mut out = Vec::with_capacity(self.frame.len() + 1);
        out.push(r.sinh() * fu);
        out.extend(self.frame.iter().zip(u).map(|(f, ui)| f + (r.cosh() - 1.0) * fu * ui));
        Ok(out)
    }
}

/// `exp_base(v)`. The result carries a chart at the base, so its distance to
/// the base is `|v|` exactly.
pub fn exp_map(v: &HTangent) -> HPoint {
    if v.norm() == 0.0 {
        return v.base.clone();
    }
    HPoint::in_chart(Arc::new(v.base.polar.clone()), v.frame.clone())
}

/// `exp_x^{-1}(y)`; the zero vector when the points coincide.
pub fn log_map(x: &HPoint, y: &HPoint) -> HTangent {
    let frame = match &y.chart {
        Some(c) if *c.anchor == x.polar => c.offset.clone(),
        _ => chart_log(&x.polar, &y.polar),
    };
    HTangent {
        base: x.clone(),
        frame,
    }
}

/// Rotation of `f` inside `span(a, b)` taking the unit vector `a` to the unit
/// vector `b`, identity on the orthogonal complement.
fn rotate_taking(a: &[f64], b: &[f64], f: &[f64]) -> Vec<f64> {
    let c = dot(a, b).clamp(-1.0, 1.0);
    let e: Vec<f64> = b.iter().zip(a).map(|(bi, ai)| bi - c * ai).collect();
    let se = norm(&e);
    if se == 0.0 {
        return f.to_vec();
    }
    let ap: Vec<f64> = scale(&e, 1.0 / se);
    let fa = dot(f, a);
    let fp = dot(f, &ap);
    let new_a = fa * c - fp * se;
    let new_p = fa * se + fp * c;
    f.iter()
        .zip(a.iter().zip(&ap))
        .map(|(fi, (ai, pi))| fi + (new_a - fa) * ai + (new_p - fp) * pi)
        .collect()
}

/// Parallel transport of `v` along the geodesic from its base to `to`.
///
/// In transported frames the transport is the rotation of the plane of the
/// triangle `(o, base, to)` that carries the departing velocity of the
/// geodesic to its arriving velocity; vectors normal to that plane are fixed.
pub fn parallel_transport(v: &HTangent, to: &HPoint) -> HTangent {
    let x = &v.base.polar;
    let y = &to.polar;
    let fwd = chart_log(x, y);
    let d = norm(&fwd);
    let frame = if d == 0.0 {
        v.frame.clone()
    } else {
        let back = chart_log(y, x);
        let a = scale(&fwd, 1.0 / d);
        let b = scale(&back, -1.0 / norm(&back));
        rotate_taking(&a, &b, &v.frame)
    };
    HTangent {
        base: to.clone(),
        frame,
    }
}

/// Interior angles at `a`, `b`, `c`.
pub fn triangle_angles(a: &HPoint, b: &HPoint, c: &HPoint) -> Result<[f64; 3]> {
    let ab = distance(a, b);
    let bc = distance(b, c);
    let ca = distance(c, a);
    for (d, name) in [(ab, "a,b"), (bc, "b,c"), (ca, "a,c")] {
        if d <= 1e-12 {
            return Err(HypError::Degenerate(format!("vertices {name} coincide")));
        }
    }
    Ok([angle_from_sides(ab, ca, bc), angle_from_sides(bc, ab, ca), angle_from_sides(ca, bc, ab)])
}

/// Angle between the log vectors of length `x` and `y` whose endpoints are
/// `d` apart. Half-angle tangent of the law of cosines, written with the
/// triangle-inequality slacks so that thin triangles keep relative accuracy.
fn angle_from_sides(x: f64, y: f64, d: f64) -> f64 {
    let near = slack(d, x.min(y), x.max(y));
    let far = slack(x, y, d);
    if near <= 0.0 {
        return 0.0;
    }
    if far <= 0.0 {
        return std::f64::consts::PI;
    }
    // sinh(w) / sinh(t) with t - w = min(x, y) kept exact
    let wide = (d + (x - y).abs()) / 2.0;
    let total = (x + y + d) / 2.0;
    let outer = (-x.min(y)).exp() * (-2.0 * wide).exp_m1() / (-2.0 * total).exp_m1();
    let inner = if near.max(far) < 600.0 {
        (near / 2.0).sinh() / (far / 2.0).sinh()
    } else {
        ((near - far) / 2.0).exp() * (-near).exp_m1() / (-far).exp_m1()
    };
    2.0 * (inner * outer).sqrt().atan()
}

/// `p + q - r` with the rounding error of `p + q` carried along, so that the
/// result is accurate when it is tiny compared to the terms.
fn slack(p: f64, q: f64, r: f64) -> f64 {
    let s = p + q;
    let bp = s - q;
    let err = (p - bp) + (q - (s - bp));
    (s - r) + err
}

/// Largest pairwise gap among `sinh(side_i) / sin(angle_i)`, with
/// `angle_i` opposite `side_i`.
pub fn law_of_sines_residual(sides: [f64; 3], angles: [f64; 3]) -> f64 {
    let ratios: Vec<f64> = sides
        .iter()
        .zip(&angles)
        .map(|(s, a)| s.sinh() / a.sin())
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in i + 1..3 {
            worst = worst.max((ratios[i] - ratios[j]).abs());
        }
    }
    worst
}

/// The transvection along the geodesic from `o` to a target point. Its
/// differential at `o` is parallel transport, so it realizes
/// `exp_p . iota_p . exp_o^{-1}` with `iota_p` the frame transport.
#[derive(Clone, Debug)]
pub struct Transvection {
    anchor: Arc<Polar>,
}

impl Transvection {
    pub fn to(p: &HPoint) -> Self {
        Self {
            anchor: Arc::new(p.polar.clone()),
        }
    }

    pub fn target(&self) -> &Polar {
        &self.anchor
    }

    pub fn apply(&self, x: &HPoint) -> HPoint {
        // a point charted at the inverse target comes back exactly
        if let Some(c) = &x.chart {
            let opposite = c.anchor.radius == self.anchor.radius
                && c.anchor.direction.iter().zip(&self.anchor.direction).all(|(a, b)| *a == -*b);
            if opposite {
                return HPoint::exp_origin(&c.offset);
            }
        }
        HPoint::in_chart(self.anchor.clone(), x.polar.tangent())
    }

    /// Image of `exp_o(v)`.
    pub fn apply_tangent(&self, v: &[f64]) -> HPoint {
        HPoint::in_chart(self.anchor.clone(), v.to_vec())
    }

    /// The inverse is the transvection to the antipodal polar point `(r, -u)`.
    pub fn inverse(&self) -> Self {
        Self {
            anchor: Arc::new(Polar {
                radius: self.anchor.radius,
                direction: scale(&self.anchor.direction, -1.0),
            }),
        }
    }
}

/// Convenience for [`Transvection::to`].
pub fn transvection_to(p: &HPoint) -> Transvection {
    Transvection::to(p)
}
