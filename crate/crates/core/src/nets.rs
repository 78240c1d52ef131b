//! Reference nets of a geodesic ball and their transport to other centres.
//!
//! A template is a finite set of tangent vectors `q_j` at `o` with
//! `|q_j| <= rho` whose images `exp_o(q_j)` are a `delta`-net of `B(o, rho)`.
//! Moving the template to `p` with the transvection `o -> p` gives the maps
//! `p -> sigma_j(p)`; since transvections are isometries, `{sigma_j(p)}` is a
//! `delta`-net of `B(p, rho)` for every `p`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::hyperboloid::{distance, HPoint, Transvection};
use crate::numerics::{dist, dist_sq, norm, scale};
use crate::parallel::map_range;
use crate::sampling::volume_uniform_offset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetTemplate {
    pub rho: f64,
    pub delta: f64,
    pub m: usize,
    /// The `q_j`, in frame coordinates at the reference centre.
    pub points: Vec<Vec<f64>>,
}

impl NetTemplate {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the shape invariants after deserialization.
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.delta > 0.0) {
            return Err(precondition("net radii must be positive"));
        }
        if self.points.is_empty() {
            return Err(precondition("net must have at least one point"));
        }
        for q in &self.points {
            if q.len() != self.m {
                return Err(precondition("net point has the wrong dimension"));
            }
            if norm(q) > self.rho * (1.0 + 1e-12) {
                return Err(precondition("net point lies outside the ball"));
            }
        }
        Ok(())
    }
}

/// Tangent-space spacing that yields hyperbolic cover radius `delta`:
/// `exp_o` stretches distances inside the tangent ball by at most
/// `sinh(rho) / rho`.
pub fn effective_spacing(rho: f64, delta: f64) -> f64 {
    delta * rho / rho.sinh()
}

/// Candidate points: a cubic grid covering the tangent ball, projected
/// radially onto it. Every point of the ball is within `h sqrt(m) / 2` of a
/// candidate.
fn grid_candidates(rho: f64, h: f64, m: usize) -> Vec<Vec<f64>> {
    let half = h * (m as f64).sqrt() / 2.0;
    let reach = rho + half;
    let steps = (reach / h).ceil() as i64;
    let mut out = Vec::new();
    let mut idx = vec![-steps; m];
    loop {
        let g: Vec<f64> = idx.iter().map(|&i| i as f64 * h).collect();
        let n = norm(&g);
        if n <= reach {
            out.push(if n > rho { scale(&g, rho / n) } else { g });
        }
        let mut d = 0;
        loop {
            if d == m {
                return out;
            }
            idx[d] += 1;
            if idx[d] <= steps {
                break;
            }
            idx[d] = -steps;
            d += 1;
        }
    }
}

/// Greedy farthest-point net of the tangent ball, started at `0`.
///
/// With `delta' = effective_spacing(rho, delta)` the candidate grid is fine
/// enough that covering every candidate within `2 delta' / 3` covers the
/// whole ball within `delta'`, hence `B(o, rho)` within `delta`.
pub fn build_reference_net(rho: f64, delta: f64, m: usize) -> Result<NetTemplate> {
    if !(rho.is_finite() && rho > 0.0 && delta.is_finite() && delta > 0.0) {
        return Err(precondition("rho and delta must be finite and positive"));
    }
    if m < 1 {
        return Err(precondition("dimension must be >= 1"));
    }
    let origin = vec![0.0; m];
    if delta >= rho {
        return Ok(NetTemplate { rho, delta, m, points: vec![origin] });
    }
    let spacing = effective_spacing(rho, delta);
    let h = 2.0 * spacing / (3.0 * (m as f64).sqrt());
    let stop = 2.0 * spacing / 3.0;
    let candidates = grid_candidates(rho, h, m);
    let mut gap: Vec<f64> = candidates.iter().map(|c| norm(c)).collect();
    let mut points = vec![origin];
    loop {
        let (far, worst) = gap
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &g)| if g > acc.1 { (i, g) } else { acc });
        if worst < stop {
            break;
        }
        let q = candidates[far].clone();
        let fresh = map_range(candidates.len(), |i| dist(&candidates[i], &q));
        for (g, f) in gap.iter_mut().zip(fresh) {
            *g = g.min(f);
        }
        points.push(q);
    }
    Ok(NetTemplate { rho, delta, m, points })
}

/// `sigma_1(p), ..., sigma_l(p)`.
pub fn transport_net(tmpl: &NetTemplate, p: &HPoint) -> Result<Vec<HPoint>> {
    if p.dim() != tmpl.m {
        return Err(precondition(format!(
            "net dimension {} does not match point dimension {}",
            tmpl.m,
            p.dim()
        )));
    }
    let t = Transvection::to(p);
    Ok(tmpl.points.iter().map(|q| t.apply_tangent(q)).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverReport {
    pub samples: usize,
    pub covered: usize,
    pub fraction: f64,
    /// Largest distance from a sample to its nearest net point.
    pub max_gap: f64,
    /// Largest `d(p, sigma_j(p))`.
    pub max_net_radius: f64,
    pub pass: bool,
}

/// Monte-Carlo check that `{sigma_j(p)}` covers `B(p, rho)` within `delta`,
/// using volume-uniform samples.
pub fn verify_cover(tmpl: &NetTemplate, p: &HPoint, samples: usize, seed: u64) -> Result<CoverReport> {
    if samples == 0 {
        return Err(precondition("samples must be >= 1"));
    }
    let net = transport_net(tmpl, p)?;
    let t = Transvection::to(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<Vec<f64>> = (0..samples)
        .map(|_| volume_uniform_offset(&mut rng, tmpl.rho, tmpl.m))
        .collect();
    // exp_o never shrinks distances, so the tangent distance prunes
    // candidates that cannot beat the current best.
    let gaps = map_range(samples, |i| {
        let x = t.apply_tangent(&offsets[i]);
        let mut best = f64::INFINITY;
        for (q, s) in tmpl.points.iter().zip(&net) {
            if dist_sq(q, &offsets[i]) < best * best {
                best = best.min(distance(&x, s));
            }
        }
        best
    });
    let covered = gaps.iter().filter(|&&g| g < tmpl.delta).count();
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    let max_net_radius = net.iter().map(|s| distance(p, s)).fold(0.0, f64::max);
    Ok(CoverReport {
        samples,
        covered,
        fraction: covered as f64 / samples as f64,
        max_gap,
        max_net_radius,
        pass: covered == samples && max_net_radius <= tmpl.rho + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperboloid::{exp_map, HTangent};
    use proptest::prelude::*;

    #[test]
    fn trivial_net_when_delta_exceeds_rho() {
        let t = build_reference_net(1.0, 1.5, 2).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.points[0], vec![0.0, 0.0]);
        let rep = verify_cover(&t, &HPoint::origin(2), 2000, 1).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn default_net_size_and_radius() {
        let t = build_reference_net(1.0, 0.25, 2).unwrap();
        assert!((30..=300).contains(&t.len()), "l = {}", t.len());
        assert!(t.points.iter().all(|q| norm(q) <= 1.0 + 1e-15));
        t.validate().unwrap();
    }

    #[test]
    fn transport_at_origin_is_identity() {
        let t = build_reference_net(1.0, 0.4, 2).unwrap();
        let o = HPoint::origin(2);
        for (q, s) in t.points.iter().zip(transport_net(&t, &o).unwrap()) {
            let direct = HPoint::exp_origin(q);
            assert!(distance(&direct, &s) < 1e-15);
        }
    }

    #[test]
    fn transported_points_keep_their_radius() {
        let t = build_reference_net(1.0, 0.25, 2).unwrap();
        let p = HPoint::from_polar(7.0, vec![0.3, -0.9]).unwrap();
        for (q, s) in t.points.iter().zip(transport_net(&t, &p).unwrap()) {
            assert!((distance(&p, &s) - norm(q)).abs() < 1e-9);
            // agrees with exp_p of the frame vector
            let e = exp_map(&HTangent::new(p.clone(), q.clone()).unwrap());
            assert!(distance(&e, &s) < 1e-12);
        }
    }

    #[test]
    fn default_cover_passes_and_thinned_net_fails() {
        let t = build_reference_net(1.0, 0.25, 2).unwrap();
        let p = HPoint::from_polar(3.0, vec![1.0, 1.0]).unwrap();
        let rep = verify_cover(&t, &p, 20_000, 7).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.max_gap <= 0.25);
        let mut thin = t.clone();
        thin.points = t.points.iter().step_by(2).cloned().collect();
        let bad = verify_cover(&thin, &p, 20_000, 7).unwrap();
        assert!(!bad.pass && bad.max_gap > 0.25, "{bad:?}");
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let t = build_reference_net(1.0, 0.5, 2).unwrap();
        assert!(transport_net(&t, &HPoint::origin(3)).is_err());
    }

    #[test]
    fn json_shape() {
        let t = build_reference_net(1.0, 1.5, 2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        for key in ["rho", "delta", "m", "points"] {
            assert!(v.get(key).is_some());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn transported_nets_are_congruent(r1 in 0.0..40.0f64, r2 in 0.0..40.0f64, t1 in 0.0..6.3f64, t2 in 0.0..6.3f64) {
            let t = build_reference_net(1.0, 0.5, 2).unwrap();
            let a = transport_net(&t, &HPoint::from_polar(r1, vec![t1.cos(), t1.sin()]).unwrap()).unwrap();
            let b = transport_net(&t, &HPoint::from_polar(r2, vec![t2.cos(), t2.sin()]).unwrap()).unwrap();
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    prop_assert!((distance(&a[i], &a[j]) - distance(&b[i], &b[j])).abs() < 1e-9);
                }
            }
        }
    }
}
