//! Disjoint balls of radius `C` inside `B(p, R)` with centres on a geodesic
//! 2-plane through `p`, and the exponential lower bound on their number.
//!
//! The centres sit at distance `R - C` from `p` along the directions
//! `v_j = cos(2 j alpha) u + sin(2 j alpha) w`, `j = 0..=k`, where
//! `sin alpha = sinh C / sinh(R - C)` makes neighbouring centres exactly
//! `2C` apart and `k` is the largest integer with `k alpha <= pi - alpha`.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, HypError, Result};
use crate::hyperboloid::{distance, exp_map, HPoint, HTangent, Polar};
use crate::numerics::{dist_sq, dot, ln_sinh, norm};
use crate::parallel::map_range;

/// Centre count used when no cap is given.
pub const DEFAULT_CAP: usize = 100_000;

/// Largest exact integer in `f64`; direction counts above it are refused.
const MAX_EXACT_COUNT: f64 = 9_007_199_254_740_992.0;

#[derive(Clone, Debug)]
pub struct PackingSpec {
    pub c: f64,
    pub r: f64,
    pub center: HPoint,
    /// Orthonormal pair `(u, w)` at `center` spanning the packing plane.
    pub plane: (HTangent, HTangent),
}

impl PackingSpec {
    pub fn new(c: f64, r: f64, center: HPoint, plane: (HTangent, HTangent)) -> Result<Self> {
        check_radii(c, r)?;
        let (u, w) = (&plane.0, &plane.1);
        for t in [u, w] {
            if t.frame().len() != center.dim() || distance(t.base(), &center) > 1e-12 {
                return Err(precondition("plane vectors must be tangent at the packing centre"));
            }
            if (t.norm() - 1.0).abs() > 1e-12 {
                return Err(precondition("plane vectors must be unit"));
            }
        }
        if dot(u.frame(), w.frame()).abs() > 1e-12 {
            return Err(precondition("plane vectors must be orthogonal"));
        }
        Ok(Self { c, r, center, plane })
    }

    /// Packing at `center` in the plane of the first two frame directions.
    pub fn at(c: f64, r: f64, center: HPoint) -> Result<Self> {
        let m = center.dim();
        if m < 2 {
            return Err(precondition("packing needs dimension m >= 2"));
        }
        let e = |i| HTangent::new(center.clone(), crate::numerics::axis(m, i));
        let plane = (e(0)?, e(1)?);
        Self::new(c, r, center, plane)
    }

    /// Packing about the basepoint `o` of `H^m`.
    pub fn standard(c: f64, r: f64, m: usize) -> Result<Self> {
        Self::at(c, r, HPoint::origin(m))
    }
}

fn check_radii(c: f64, r: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(precondition(format!("C must be finite and > 0, got {c}")));
    }
    if !(r.is_finite() && r > 2.0 * c) {
        return Err(precondition(format!("R = {r} must exceed 2C = {}", 2.0 * c)));
    }
    Ok(())
}

/// `arcsin(sinh C / sinh(R - C))`, the half-angle between neighbouring
/// directions.
pub fn packing_angle(c: f64, r: f64) -> Result<f64> {
    check_radii(c, r)?;
    let ratio = (ln_sinh(c) - ln_sinh(r - c)).exp();
    if ratio > 1.0 {
        return Err(precondition(format!("sinh C / sinh(R-C) = {ratio} > 1")));
    }
    Ok(ratio.asin())
}

/// Largest `k` with `k alpha <= pi - alpha`; the family has `k + 1` members.
pub fn direction_count(alpha: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha <= PI / 2.0) {
        return Err(precondition(format!("alpha = {alpha} outside (0, pi/2]")));
    }
    let target = PI - alpha;
    let guess = (target / alpha).floor();
    if !(guess < MAX_EXACT_COUNT) {
        return Err(HypError::NumericRange(format!("direction count for alpha = {alpha} exceeds 2^53")));
    }
    let mut k = guess as u64;
    while k > 0 && k as f64 * alpha > target {
        k -= 1;
    }
    while (k + 1) as f64 * alpha <= target {
        k += 1;
    }
    Ok(k)
}

/// `(1/2)(sin alpha / alpha)(pi / sinh C) sinh(R - C)`, a lower bound on
/// the family size `k + 1`.
pub fn count_lower_bound(c: f64, r: f64) -> Result<f64> {
    let alpha = packing_angle(c, r)?;
    Ok(0.5 * (alpha.sin() / alpha) * PI * (ln_sinh(r - c) - ln_sinh(c)).exp())
}

/// Centres of disjoint radius-`radius` balls.
#[derive(Clone, Debug)]
pub struct BallFamily {
    pub centers: Vec<HPoint>,
    pub radius: f64,
    /// Certified lower bound on pairwise centre distance.
    pub min_separation: f64,
    pub enclosing: Option<(HPoint, f64)>,
    /// Size of the uncapped family.
    pub full_count: u64,
    /// Index `j` of each emitted centre in the uncapped family.
    pub indices: Vec<u64>,
    pub alpha: f64,
}

impl BallFamily {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Indices `i * total / cap` for `i < cap`: evenly spaced, strictly increasing.
pub fn subsample_indices(total: u64, cap: usize) -> Vec<u64> {
    if total <= cap as u64 {
        return (0..total).collect();
    }
    (0..cap as u128)
        .map(|i| (i * total as u128 / cap as u128) as u64)
        .collect()
}

/// Builds the planar family, keeping at most `cap` centres (evenly spaced
/// in `j`) when it is larger.
pub fn generate_centers(spec: &PackingSpec, cap: usize) -> Result<BallFamily> {
    if cap < 2 {
        return Err(precondition("cap must be >= 2"));
    }
    let alpha = packing_angle(spec.c, spec.r)?;
    let k = direction_count(alpha)?;
    let indices = subsample_indices(k + 1, cap);
    let u = spec.plane.0.frame();
    let w = spec.plane.1.frame();
    let reach = spec.r - spec.c;
    let centers = map_range(indices.len(), |i| {
        let angle = 2.0 * indices[i] as f64 * alpha;
        let (s, c) = angle.sin_cos();
        let v: Vec<f64> = u.iter().zip(w).map(|(a, b)| reach * (c * a + s * b)).collect();
        exp_map(&HTangent::new(spec.center.clone(), v).expect("plane vectors match the centre"))
    });
    Ok(BallFamily {
        centers,
        radius: spec.c,
        min_separation: 2.0 * spec.c,
        enclosing: Some((spec.center.clone(), spec.r)),
        full_count: k + 1,
        indices,
        alpha,
    })
}

/// Polar forms of the points in one common frame when there is one: the
/// chart offsets if all points share an anchor, the global polar forms if
/// none has a chart.
pub(crate) fn common_frame(points: &[HPoint]) -> Option<Vec<Polar>> {
    let first = points.first()?;
    match first.chart() {
        None => points
            .iter()
            .map(|p| p.chart().is_none().then(|| p.polar().clone()))
            .collect(),
        Some((anchor, _)) => points
            .iter()
            .map(|p| match p.chart() {
                Some((a, off)) if a == anchor => Some(Polar::from_tangent(off)),
                _ => None,
            })
            .collect(),
    }
}

/// Minimum pairwise distance, `None` for fewer than two points.
///
/// Points in a common frame of moderate radius go through a precomputed
/// kernel comparing `sinh^2(d/2)`; anything else falls back to
/// [`distance`].
pub fn min_pairwise_distance(points: &[HPoint]) -> Option<f64> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    if let Some(polars) = common_frame(points).filter(|ps| ps.iter().all(|p| p.radius() < 300.0)) {
        let sh: Vec<f64> = polars.iter().map(|p| p.radius().sinh()).collect();
        let row_min = map_range(n - 1, |i| {
            let (pi, si) = (&polars[i], sh[i]);
            let mut best = f64::INFINITY;
            for j in i + 1..n {
                let a = ((pi.radius() - polars[j].radius()) / 2.0).sinh();
                let chord2 = dist_sq(pi.direction(), polars[j].direction()) / 4.0;
                best = best.min(a * a + si * sh[j] * chord2);
            }
            best
        });
        let t = row_min.into_iter().fold(f64::INFINITY, f64::min);
        return Some(2.0 * t.sqrt().asinh());
    }
    let row_min = map_range(n - 1, |i| {
        (i + 1..n)
            .map(|j| distance(&points[i], &points[j]))
            .fold(f64::INFINITY, f64::min)
    });
    Some(row_min.into_iter().fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackingReport {
    pub count: usize,
    pub min_pairwise: Option<f64>,
    pub max_center_offset: Option<f64>,
    pub separation_ok: bool,
    pub enclosing_ok: bool,
    pub pass: bool,
}

/// Brute-force check of pairwise separation and containment in the
/// enclosing ball, with tolerance `1e-9`.
pub fn verify_packing(fam: &BallFamily) -> PackingReport {
    verify_packing_with_tolerance(fam, 1e-9)
}

pub fn verify_packing_with_tolerance(fam: &BallFamily, tol: f64) -> PackingReport {
    let min_pairwise = min_pairwise_distance(&fam.centers);
    let separation_ok = min_pairwise.map_or(true, |d| d >= fam.min_separation - tol);
    let (max_center_offset, enclosing_ok) = match &fam.enclosing {
        Some((c, big)) => {
            let worst = fam
                .centers
                .iter()
                .map(|p| distance(p, c))
                .fold(0.0_f64, f64::max);
            (Some(worst), worst <= big - fam.radius + tol)
        }
        None => (None, true),
    };
    PackingReport {
        count: fam.centers.len(),
        min_pairwise,
        max_center_offset,
        separation_ok,
        enclosing_ok,
        pass: separation_ok && enclosing_ok,
    }
}

/// Smallest angle between distinct unit directions `v_i` of a family,
/// read off the centres' offsets at the packing centre.
pub fn min_direction_angle(fam: &BallFamily) -> Option<f64> {
    let (center, _) = fam.enclosing.as_ref()?;
    let dirs: Vec<Vec<f64>> = fam
        .centers
        .iter()
        .map(|p| {
            let v = crate::hyperboloid::log_map(center, p);
            let n = norm(v.frame());
            v.frame().iter().map(|x| x / n).collect()
        })
        .collect();
    let mut best = f64::INFINITY;
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            best = best.min(crate::numerics::angle_between(&dirs[i], &dirs[j]));
        }
    }
    best.is_finite().then_some(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    #[serde(rename = "R")]
    pub r: f64,
    pub alpha: f64,
    pub family_size: u64,
    pub lower_bound: f64,
    /// `family_size` over the previous row's; absent on the first row.
    pub ratio: Option<f64>,
}

pub fn growth_table(c: f64, r_values: &[f64]) -> Result<Vec<GrowthRow>> {
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let alpha = packing_angle(c, r)?;
        let family_size = direction_count(alpha)? + 1;
        let ratio = rows.last().map(|prev| family_size as f64 / prev.family_size as f64);
        rows.push(GrowthRow {
            r,
            alpha,
            family_size,
            lower_bound: count_lower_bound(c, r)?,
            ratio,
        });
    }
    Ok(rows)
}

/// CSV with header `R,alpha,family_size,lower_bound,ratio`.
pub fn write_growth_csv<W: Write>(rows: &[GrowthRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(["R", "alpha", "family_size", "lower_bound", "ratio"])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperboloid::log_map;
    use proptest::prelude::*;

    // mpmath at 50 digits
    const ALPHA_1_3: f64 = 0.329_983_202_107_899_687_5;
    const BOUND_1_3: f64 = 4.760_231_177_710_885_909_7;

    #[test]
    fn packing_angle_examples() {
        let a = packing_angle(1.0, 3.0).unwrap();
        assert!((a - ALPHA_1_3).abs() < 1e-15);
        let edge = packing_angle(1.0, 2.0 + 1e-12).unwrap();
        assert!((edge - PI / 2.0).abs() < 1e-5);
        assert!(packing_angle(1.0, 5.0).unwrap() < packing_angle(1.0, 4.0).unwrap());
        assert!(packing_angle(1.0, 2.0).is_err());
        assert!(packing_angle(0.0, 2.0).is_err());
    }

    #[test]
    fn direction_count_examples() {
        assert_eq!(direction_count(PI / 2.0).unwrap(), 1);
        assert_eq!(direction_count(PI / 4.0).unwrap(), 3);
        assert_eq!(direction_count(ALPHA_1_3).unwrap(), 8);
        assert!(direction_count(0.0).is_err());
        assert!(direction_count(1e-17).is_err());
    }

    #[test]
    fn count_lower_bound_examples() {
        let b = count_lower_bound(1.0, 3.0).unwrap();
        assert!(((b - BOUND_1_3) / BOUND_1_3).abs() < 1e-14);
        assert!(b <= 9.0);
        let ratio = count_lower_bound(1.0, 21.0).unwrap() / count_lower_bound(1.0, 20.0).unwrap();
        assert!((ratio - std::f64::consts::E).abs() < 1e-3);
    }

    #[test]
    fn generate_small_family() {
        let spec = PackingSpec::standard(1.0, 3.0, 2).unwrap();
        let fam = generate_centers(&spec, DEFAULT_CAP).unwrap();
        assert_eq!(fam.len(), 9);
        let o = HPoint::origin(2);
        for p in &fam.centers {
            assert!((distance(&o, p) - 2.0).abs() < 1e-12);
        }
        let rep = verify_packing(&fam);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.min_pairwise.unwrap() >= 2.0 - 1e-9);
        let ang = min_direction_angle(&fam).unwrap();
        assert!(ang >= 2.0 * fam.alpha - 1e-12);
    }

    #[test]
    fn boundary_family_is_antipodal() {
        let spec = PackingSpec::standard(1.0, 2.0 + 1e-6, 2).unwrap();
        let fam = generate_centers(&spec, DEFAULT_CAP).unwrap();
        assert_eq!(fam.len(), 2);
        let d = distance(&fam.centers[0], &fam.centers[1]);
        assert!((d - 2.0 * (spec.r - spec.c)).abs() < 1e-3);
    }

    #[test]
    fn subsampling_is_even() {
        let idx = subsample_indices(1_000_000, 100);
        assert_eq!(idx.len(), 100);
        assert!(idx.windows(2).all(|w| w[1] - w[0] == 10_000));
        assert_eq!(subsample_indices(5, 100), vec![0, 1, 2, 3, 4]);
        // a huge family capped to 100 centres
        let spec = PackingSpec::standard(1.0, 16.0, 2).unwrap();
        let fam = generate_centers(&spec, 100).unwrap();
        assert_eq!(fam.len(), 100);
        assert!(fam.full_count > 1_000_000);
        assert!(verify_packing(&fam).pass);
    }

    #[test]
    fn verify_flags_duplicates_and_single() {
        let spec = PackingSpec::standard(1.0, 3.0, 2).unwrap();
        let mut fam = generate_centers(&spec, DEFAULT_CAP).unwrap();
        let dup = fam.centers[0].clone();
        fam.centers.push(dup);
        assert!(!verify_packing(&fam).pass);
        fam.centers.truncate(1);
        let rep = verify_packing(&fam);
        assert!(rep.pass && rep.min_pairwise.is_none());
    }

    #[test]
    fn far_centre_packing() {
        let p = HPoint::from_polar(50.0, vec![0.0, 0.6, 0.8]).unwrap();
        let spec = PackingSpec::at(0.7, 6.0, p.clone()).unwrap();
        let fam = generate_centers(&spec, DEFAULT_CAP).unwrap();
        let rep = verify_packing(&fam);
        assert!(rep.pass, "{rep:?}");
        for q in &fam.centers {
            assert!((log_map(&p, q).norm() - 5.3).abs() < 1e-9);
        }
    }

    #[test]
    fn isoceles_identity_on_family() {
        let spec = PackingSpec::standard(0.8, 5.0, 3).unwrap();
        let fam = generate_centers(&spec, DEFAULT_CAP).unwrap();
        let o = HPoint::origin(3);
        for i in 0..fam.len() {
            for j in i + 1..fam.len() {
                let a = log_map(&o, &fam.centers[i]);
                let b = log_map(&o, &fam.centers[j]);
                let ang = crate::numerics::angle_between(a.frame(), b.frame());
                let lhs = (distance(&fam.centers[i], &fam.centers[j]) / 2.0).sinh();
                let rhs = (spec.r - spec.c).sinh() * (ang / 2.0).sin();
                assert!(((lhs - rhs) / rhs).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn growth_table_examples() {
        let rs: Vec<f64> = (3..=12).map(f64::from).collect();
        let rows = growth_table(1.0, &rs).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.windows(2).all(|w| w[1].family_size > w[0].family_size));
        assert!(rows[0].ratio.is_none());
        assert_eq!(rows[0].family_size, 9);
        assert_eq!(rows[9].family_size, 80028);
        assert!(growth_table(1.0, &[]).unwrap().is_empty());
        let one = growth_table(1.0, &[4.0]).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].ratio.is_none());
        for r in 15..25 {
            let rows = growth_table(1.0, &[r as f64, r as f64 + 1.0]).unwrap();
            assert!((rows[1].ratio.unwrap() / std::f64::consts::E - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn growth_csv_layout() {
        let rows = growth_table(1.0, &[3.0, 4.0]).unwrap();
        let mut buf = Vec::new();
        write_growth_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("R,alpha,family_size,lower_bound,ratio"));
        assert!(lines.next().unwrap().ends_with(','));
        let mut empty = Vec::new();
        write_growth_csv(&[], &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim(), "R,alpha,family_size,lower_bound,ratio");
    }

    proptest! {
        #[test]
        fn family_size_dominates_bounds(c in 0.1..3.0f64, excess in 0.01..12.0f64) {
            let r = 2.0 * c + excess;
            let alpha = packing_angle(c, r).unwrap();
            let k = direction_count(alpha).unwrap();
            prop_assert!(k as f64 * alpha <= PI - alpha);
            prop_assert!((k + 1) as f64 * alpha > PI - alpha);
            prop_assert!((k + 1) as f64 > (PI - alpha) / alpha);
            prop_assert!((k + 1) as f64 >= count_lower_bound(c, r).unwrap());
        }

        #[test]
        fn generated_families_are_separated(c in 0.3..2.0f64, excess in 0.1..4.0f64) {
            let spec = PackingSpec::standard(c, 2.0 * c + excess, 2).unwrap();
            let fam = generate_centers(&spec, 2000).unwrap();
            prop_assert!(verify_packing(&fam).pass);
        }
    }
}
