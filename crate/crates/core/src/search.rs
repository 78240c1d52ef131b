//! Search for `k` far-apart balls whose images under a Lipschitz map are
//! bunched together, and an independent certifier for the result.
//!
//! For each radius `R` of a schedule the planar packing of `B(o, R)` by balls
//! of radius `C` is generated and mapped. A greedy scan keeps a maximal
//! subfamily whose images are pairwise at least `1/C` apart; every other
//! centre is assigned to its nearest kept image, which is less than `1/C`
//! away. The kept images are `1/C`-separated inside a ball of radius about
//! `LR`, so there are at most `(3CLR + 1)^n` of them while the packing grows
//! like `e^R`. Some fiber of the assignment therefore eventually holds `k`
//! centres: they are `2C` apart in `H^m` and their images are within `2/C`.
//!
//! With the Hausdorff option the map is replaced by
//! `F^(p) = (F(sigma_1(p)), ..., F(sigma_l(p)))` for a net `sigma` of
//! `B(p, r)`, so bunching of `F^` bunches whole balls.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, HypError, Result};
use crate::hyperboloid::{distance, HPoint, Transvection};
use crate::maps::LipschitzMap;
use crate::nets::{build_reference_net, transport_net, NetTemplate};
use crate::numerics::dist;
use crate::packing::{direction_count, generate_centers, packing_angle, PackingSpec, DEFAULT_CAP};
use crate::parallel::map_range;
use crate::sampling::volume_uniform_offset;

fn check_r_eps(r: f64, epsilon: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(precondition(format!("r must be finite and >= 0, got {r}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(precondition(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

/// `C = 2(2 r eps + 1)/eps`, so that `2C - 2r > 1/eps` and `2/C <= eps`.
#[allow(non_snake_case)]
pub fn choose_C_setdist(r: f64, epsilon: f64) -> Result<f64> {
    check_r_eps(r, epsilon)?;
    Ok(2.0 * (2.0 * r * epsilon + 1.0) / epsilon)
}

/// `C = max{(2 r eps + 1)/(2 eps), 4/eps}`, so that `2C - 2r >= 1/eps` and
/// `2/C <= eps/2`.
#[allow(non_snake_case)]
pub fn choose_C_hausdorff(r: f64, epsilon: f64) -> Result<f64> {
    check_r_eps(r, epsilon)?;
    Ok(((2.0 * r * epsilon + 1.0) / (2.0 * epsilon)).max(4.0 / epsilon))
}

/// Volume of the unit ball in `R^n`, `pi^(n/2) / Gamma(n/2 + 1)`.
pub fn ball_volume_constant(n: usize) -> f64 {
    // V_n = V_{n-2} 2 pi / n
    let mut v = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut d = if n % 2 == 0 { 2 } else { 3 };
    while d <= n {
        v *= 2.0 * std::f64::consts::PI / d as f64;
        d += 2;
    }
    v
}

pub fn ln_ball_volume_constant(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    // ln Gamma(n/2 + 1) by the recursion Gamma(x + 1) = x Gamma(x)
    let mut ln_gamma = if n % 2 == 0 { 0.0 } else { 0.5 * std::f64::consts::PI.ln() };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    while x <= half + 1e-9 {
        ln_gamma += x.ln();
        x += 1.0;
    }
    half * std::f64::consts::PI.ln() - ln_gamma
}

/// `(3 C L R + 1)^n`: at most this many points of `D(F(p_0), LR + 1/(3C))`
/// carry pairwise disjoint balls of radius `1/(3C)`. The volume constant
/// `c(n)` cancels from the ratio.
#[allow(non_snake_case)]
pub fn counting_upper_bound(R: f64, C: f64, L: f64, n: usize) -> f64 {
    ln_counting_upper_bound(R, C, L, n).exp()
}

#[allow(non_snake_case)]
pub fn ln_counting_upper_bound(R: f64, C: f64, L: f64, n: usize) -> f64 {
    n as f64 * (3.0 * C * L * R).ln_1p()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchParams {
    pub r: f64,
    pub epsilon: f64,
    pub k: usize,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "R_schedule")]
    pub r_schedule: Vec<f64>,
    pub cap: usize,
    pub seed: u64,
    pub hausdorff: bool,
}

impl SearchParams {
    /// Parameters with `C` from the matching rule and the default schedule.
    pub fn new(r: f64, epsilon: f64, k: usize, hausdorff: bool, cap: usize, seed: u64) -> Result<Self> {
        let c = if hausdorff {
            choose_C_hausdorff(r, epsilon)?
        } else {
            choose_C_setdist(r, epsilon)?
        };
        let params = Self {
            r,
            epsilon,
            k,
            c,
            r_schedule: default_schedule(c, cap)?,
            cap,
            seed,
            hausdorff,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Result<Self> {
        self.r_schedule = schedule;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_r_eps(self.r, self.epsilon)?;
        if self.k < 2 {
            return Err(precondition("k must be >= 2"));
        }
        if self.cap < 2 {
            return Err(precondition("cap must be >= 2"));
        }
        let needed = if self.hausdorff {
            choose_C_hausdorff(self.r, self.epsilon)?
        } else {
            choose_C_setdist(self.r, self.epsilon)?
        };
        let c_ok = if self.hausdorff { self.c >= needed } else { self.c == needed };
        if !c_ok {
            return Err(precondition(format!("C = {} does not satisfy its rule (needs {needed})", self.c)));
        }
        if let Some(bad) = self.r_schedule.iter().find(|&&big| !(big > 2.0 * self.c)) {
            return Err(precondition(format!("schedule radius {bad} is not above 2C = {}", 2.0 * self.c)));
        }
        if self.r_schedule.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(precondition("schedule must be strictly increasing"));
        }
        Ok(())
    }
}

impl Default for SearchParams {
    fn default() -> Self {
        Self::new(1.0, 0.5, 2, false, DEFAULT_CAP, 0).expect("default parameters are valid")
    }
}

/// `R = 2C + 2^i` for `i = 1, 2, ...`, ending with the first radius whose
/// uncapped family exceeds `10 * cap` centres.
pub fn default_schedule(c: f64, cap: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for i in 1..=62 {
        let big = 2.0 * c + 2f64.powi(i);
        let size = match packing_angle(c, big).and_then(direction_count) {
            Ok(k) => k + 1,
            Err(HypError::NumericRange(_)) => break,
            Err(e) => return Err(e),
        };
        out.push(big);
        if size > 10 * cap as u64 {
            break;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparatedFamily {
    pub selected: Vec<usize>,
    pub images: Vec<Vec<f64>>,
    pub separation: f64,
}

/// Index-order scan keeping a centre iff its image is at least `sep` from
/// every image kept so far. The result is maximal: each skipped image is
/// within `sep` of a kept one.
pub fn greedy_separated_subfamily(images: &[Vec<f64>], sep: f64) -> SeparatedFamily {
    let mut selected: Vec<usize> = Vec::new();
    for (i, img) in images.iter().enumerate() {
        if selected.iter().all(|&s| dist(&images[s], img) >= sep) {
            selected.push(i);
        }
    }
    SeparatedFamily {
        images: selected.iter().map(|&s| images[s].clone()).collect(),
        selected,
        separation: sep,
    }
}

/// Fibers of the assignment of each non-selected centre to its nearest
/// selected image (lowest position on ties). `fibers[s]` lists the members
/// assigned to `fam.selected[s]`.
pub fn theta_assignment(images: &[Vec<f64>], fam: &SeparatedFamily) -> Vec<Vec<usize>> {
    let mut is_selected = vec![false; images.len()];
    for &s in &fam.selected {
        is_selected[s] = true;
    }
    let nearest = map_range(images.len(), |i| {
        if is_selected[i] {
            return None;
        }
        let mut best = (0, f64::INFINITY);
        for (pos, img) in fam.images.iter().enumerate() {
            let d = dist(img, &images[i]);
            if d < best.1 {
                best = (pos, d);
            }
        }
        assert!(best.1 < fam.separation, "maximality violated at centre {i}");
        Some(best.0)
    });
    let mut fibers = vec![Vec::new(); fam.selected.len()];
    for (i, slot) in nearest.into_iter().enumerate() {
        if let Some(pos) = slot {
            fibers[pos].push(i);
        }
    }
    fibers
}

/// One radius of the schedule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageStats {
    #[serde(rename = "R")]
    pub r: f64,
    pub family_size: u64,
    pub centers_used: usize,
    pub selected: usize,
    /// Natural log of the counting bound on `selected`.
    pub ln_bound: f64,
    pub largest_fiber: usize,
}

impl StageStats {
    pub fn within_bound(&self) -> bool {
        (self.selected as f64).ln() <= self.ln_bound + 1e-12
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BunchedConfiguration {
    #[serde(skip)]
    pub centers: Vec<HPoint>,
    #[serde(skip)]
    pub fiber_anchor: Option<HPoint>,
    pub r: f64,
    pub epsilon: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "R_used")]
    pub r_used: f64,
    /// Positions of the centres in the packing family at `R_used`.
    pub member_indices: Vec<usize>,
    pub pairwise_manifold_min: f64,
    /// Largest pairwise distance of the images used by the search.
    pub pairwise_image_max: f64,
    pub hausdorff_max: Option<f64>,
}

impl BunchedConfiguration {
    pub fn centers_polar(&self) -> Vec<Vec<f64>> {
        self.centers.iter().map(HPoint::polar_row).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub config: BunchedConfiguration,
    pub trace: Vec<StageStats>,
}

/// The net with `rho = r` and `delta = eps / (2L)` used by the Hausdorff
/// search and by certification.
pub fn default_net(f: &LipschitzMap, r: f64, epsilon: f64) -> Result<NetTemplate> {
    let rho = if r > 0.0 { r } else { epsilon };
    let delta = if f.lipschitz > 0.0 { epsilon / (2.0 * f.lipschitz) } else { rho };
    build_reference_net(rho, delta, f.in_dim)
}

fn augmented_images(f: &LipschitzMap, net: &NetTemplate, centers: &[HPoint]) -> Result<Vec<Vec<f64>>> {
    if net.m != f.in_dim {
        return Err(precondition("net dimension does not match the map"));
    }
    Ok(map_range(centers.len(), |i| {
        let t = Transvection::to(&centers[i]);
        net.points.iter().flat_map(|q| f.eval(&t.apply_tangent(q))).collect()
    }))
}

fn pairwise_max<T>(items: &[T], d: impl Fn(&T, &T) -> f64) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            worst = worst.max(d(&items[i], &items[j]));
        }
    }
    worst
}

fn pairwise_min<T>(items: &[T], d: impl Fn(&T, &T) -> f64) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            best = best.min(d(&items[i], &items[j]));
        }
    }
    best
}

/// Runs the schedule until some fiber has `k` members and returns `k` of
/// them, those whose images are nearest the fiber's anchor.
pub fn find_bunched_configuration(
    f: &LipschitzMap,
    params: &SearchParams,
    net: Option<&NetTemplate>,
) -> Result<SearchOutcome> {
    params.validate()?;
    if f.in_dim < 2 {
        return Err(precondition("the map must be defined on H^m with m >= 2"));
    }
    let owned_net;
    let net = match (params.hausdorff, net) {
        (false, _) => None,
        (true, Some(n)) => Some(n),
        (true, None) => {
            owned_net = default_net(f, params.r, params.epsilon)?;
            Some(&owned_net)
        }
    };
    let sep = 1.0 / params.c;
    let (lip, dim, reach) = match net {
        Some(n) => ((n.len() as f64).sqrt() * f.lipschitz, n.len() * f.out_dim, 2.0 * n.rho),
        None => (f.lipschitz, f.out_dim, 0.0),
    };
    let mut trace = Vec::new();
    let mut largest_overall = 0;
    for &big in &params.r_schedule {
        let spec = PackingSpec::standard(params.c, big, f.in_dim)?;
        let fam = generate_centers(&spec, params.cap)?;
        let images = match net {
            Some(n) => augmented_images(f, n, &fam.centers)?,
            None => map_range(fam.len(), |i| f.eval(&fam.centers[i])),
        };
        let chosen = greedy_separated_subfamily(&images, sep);
        let fibers = theta_assignment(&images, &chosen);
        let (best_pos, best_len) = fibers
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (pos, fib)| if fib.len() > acc.1 { (pos, fib.len()) } else { acc });
        largest_overall = largest_overall.max(best_len);
        trace.push(StageStats {
            r: big,
            family_size: fam.full_count,
            centers_used: fam.len(),
            selected: chosen.selected.len(),
            ln_bound: ln_counting_upper_bound(big + reach, params.c, lip, dim),
            largest_fiber: best_len,
        });
        if best_len < params.k {
            continue;
        }
        let anchor = chosen.selected[best_pos];
        let mut members = fibers[best_pos].clone();
        members.sort_by(|&a, &b| {
            dist(&images[a], &images[anchor])
                .total_cmp(&dist(&images[b], &images[anchor]))
                .then(a.cmp(&b))
        });
        members.truncate(params.k);
        members.sort_unstable();
        let centers: Vec<HPoint> = members.iter().map(|&i| fam.centers[i].clone()).collect();
        let member_images: Vec<&Vec<f64>> = members.iter().map(|&i| &images[i]).collect();
        let manifold_min = pairwise_min(&centers, distance);
        let image_max = pairwise_max(&member_images, |a, b| dist(a, b));
        if manifold_min < 2.0 * params.c - 1e-9 || image_max >= 2.0 / params.c + 1e-9 {
            return Err(HypError::NumericRange(format!(
                "re-verification failed at R = {big}: min distance {manifold_min}, image spread {image_max}"
            )));
        }
        return Ok(SearchOutcome {
            config: BunchedConfiguration {
                centers,
                fiber_anchor: Some(fam.centers[anchor].clone()),
                r: params.r,
                epsilon: params.epsilon,
                c: params.c,
                r_used: big,
                member_indices: members,
                pairwise_manifold_min: manifold_min,
                pairwise_image_max: image_max,
                hausdorff_max: None,
            },
            trace,
        });
    }
    Err(HypError::ScheduleExhausted {
        largest_fiber: largest_overall,
        trace,
    })
}

/// `max_x min_y |x - y|`.
pub fn directed_hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(HypError::EmptySet);
    }
    Ok(a.iter()
        .map(|x| b.iter().map(|y| dist(x, y)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max))
}

pub fn hausdorff_distance_estimate(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// Measured value against its threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub measured: f64,
    pub threshold: f64,
    /// Distance to the threshold on the passing side; negative on failure.
    pub margin: f64,
    pub pass: bool,
}

impl Check {
    fn at_least(measured: f64, threshold: f64) -> Self {
        Self { measured, threshold, margin: measured - threshold, pass: measured >= threshold }
    }

    fn at_most(measured: f64, threshold: f64) -> Self {
        Self { measured, threshold, margin: threshold - measured, pass: measured <= threshold }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    /// Smallest `d(p_i, p_j) - 2r` against `1/eps`.
    pub separation: Check,
    /// Largest over pairs of the smallest cross distance between net images,
    /// against `eps`.
    pub set_distance: Check,
    /// Largest net Hausdorff estimate plus the slack `L delta`, against `eps`.
    pub hausdorff: Check,
    pub hausdorff_requested: bool,
    /// Largest pairwise `|F(p_i) - F(p_j)|` against `2/C`.
    pub bunching: Check,
    pub net_slack: f64,
    /// Random points of each ball stay within the Hausdorff bound of the
    /// other ball's net image.
    pub sampled_points: usize,
    pub sampled_max: f64,
    pub sampled_ok: bool,
    pub pass: bool,
}

/// Re-checks the conclusions for a configuration from scratch.
pub fn certify_configuration(
    f: &LipschitzMap,
    cfg: &BunchedConfiguration,
    net: &NetTemplate,
    samples: usize,
    seed: u64,
    hausdorff_requested: bool,
) -> Result<Certificate> {
    if cfg.centers.len() < 2 {
        return Err(precondition("a configuration needs at least two centres"));
    }
    let sep = pairwise_min(&cfg.centers, distance) - 2.0 * cfg.r;
    let separation = Check::at_least(sep, 1.0 / cfg.epsilon);

    let clouds: Vec<Vec<Vec<f64>>> = cfg
        .centers
        .iter()
        .map(|p| Ok(transport_net(net, p)?.iter().map(|x| f.eval(x)).collect()))
        .collect::<Result<_>>()?;
    let mut cross = 0.0_f64;
    let mut haus = 0.0_f64;
    for i in 0..clouds.len() {
        for j in 0..clouds.len() {
            if i == j {
                continue;
            }
            let nearest = clouds[i]
                .iter()
                .flat_map(|x| clouds[j].iter().map(move |y| dist(x, y)))
                .fold(f64::INFINITY, f64::min);
            cross = cross.max(nearest);
            haus = haus.max(directed_hausdorff(&clouds[i], &clouds[j])?);
        }
    }
    let net_slack = f.lipschitz * net.delta;
    let set_distance = Check::at_most(cross, cfg.epsilon);
    let hausdorff = Check::at_most(haus + net_slack, cfg.epsilon);

    let plain: Vec<Vec<f64>> = cfg.centers.iter().map(|p| f.eval(p)).collect();
    let bunching = Check::at_most(pairwise_max(&plain, |a, b| dist(a, b)), 2.0 / cfg.c);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled_max = 0.0_f64;
    let mut sampled_points = 0;
    for (i, p) in cfg.centers.iter().enumerate() {
        let t = Transvection::to(p);
        for _ in 0..samples {
            let x = f.eval(&t.apply_tangent(&volume_uniform_offset(&mut rng, net.rho, net.m)));
            for (j, cloud) in clouds.iter().enumerate() {
                if j != i {
                    let gap = cloud.iter().map(|y| dist(&x, y)).fold(f64::INFINITY, f64::min);
                    sampled_max = sampled_max.max(gap);
                }
            }
            sampled_points += 1;
        }
    }
    let sampled_ok = sampled_max <= haus + net_slack;
    let pass = separation.pass && set_distance.pass && bunching.pass && sampled_ok && (!hausdorff_requested || hausdorff.pass);
    Ok(Certificate {
        separation,
        set_distance,
        hausdorff,
        hausdorff_requested,
        bunching,
        net_slack,
        sampled_points,
        sampled_max,
        sampled_ok,
        pass,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorollaryLevel {
    pub epsilon: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "R_used")]
    pub r_used: f64,
    /// Smallest `d(p_i, p_j) - 2r`.
    pub separation: f64,
    /// Largest `|F(p_i) - F(p_j)|`.
    pub diameter: f64,
    pub centers_polar: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub levels: Vec<CorollaryLevel>,
    pub separations_increasing: bool,
    pub diameters_decreasing: bool,
    #[serde(skip)]
    pub traces: Vec<Vec<StageStats>>,
}

/// Searches at `eps_l <= eps_0 / 2^l` for `l < levels` with `r`, `k` fixed.
/// Each level starts from `min(eps_0 / 2^l, previous diameter)` and halves
/// `eps` until both sequences move strictly, which picks a subsequence of the
/// plain halving schedule.
pub fn corollary_sequences(
    f: &LipschitzMap,
    k: usize,
    levels: usize,
    base: &SearchParams,
) -> Result<CorollaryReport> {
    const RETRIES: usize = 8;
    if levels < 1 {
        return Err(precondition("levels must be >= 1"));
    }
    let mut out: Vec<CorollaryLevel> = Vec::with_capacity(levels);
    let mut traces = Vec::with_capacity(levels);
    for l in 0..levels {
        let mut eps = base.epsilon / 2f64.powi(l as i32);
        if let Some(prev) = out.last() {
            if prev.diameter > 0.0 {
                eps = eps.min(prev.diameter);
            }
        }
        let mut attempt = 0;
        let (level, trace) = loop {
            let params = SearchParams::new(base.r, eps, k, base.hausdorff, base.cap, base.seed)?;
            let found = find_bunched_configuration(f, &params, None)?;
            let cfg = &found.config;
            let images: Vec<Vec<f64>> = cfg.centers.iter().map(|p| f.eval(p)).collect();
            let level = CorollaryLevel {
                epsilon: eps,
                c: cfg.c,
                r_used: cfg.r_used,
                separation: pairwise_min(&cfg.centers, distance) - 2.0 * base.r,
                diameter: pairwise_max(&images, |a, b| dist(a, b)),
                centers_polar: cfg.centers_polar(),
            };
            let moved = out
                .last()
                .map_or(true, |p| level.separation > p.separation && level.diameter < p.diameter);
            attempt += 1;
            if moved || attempt == RETRIES {
                break (level, found.trace);
            }
            eps /= 2.0;
        };
        out.push(level);
        traces.push(trace);
    }
    Ok(CorollaryReport {
        separations_increasing: out.windows(2).all(|w| w[1].separation > w[0].separation),
        diameters_decreasing: out.windows(2).all(|w| w[1].diameter < w[0].diameter),
        levels: out,
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{busemann_map, axis_ideal_points, constant_map, poincare_inclusion};
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn choose_c_examples() {
        assert_eq!(choose_C_setdist(1.0, 0.5).unwrap(), 8.0);
        assert!((choose_C_setdist(1e-12, 0.5).unwrap() - 4.0).abs() < 1e-9);
        let c = choose_C_setdist(1.0, 0.5).unwrap();
        assert!(2.0 * c - 2.0 > 1.0 / 0.5);
        assert_eq!(choose_C_hausdorff(1.0, 0.5).unwrap(), 8.0);
        assert_eq!(choose_C_hausdorff(100.0, 0.5).unwrap(), 101.0);
        assert!((choose_C_hausdorff(0.0, 1.0 - 1e-12).unwrap() - 4.0).abs() < 1e-9);
        assert!(choose_C_setdist(1.0, 1.0).is_err());
        assert!(choose_C_setdist(-1.0, 0.5).is_err());
    }

    #[test]
    fn separation_algebra_on_grid() {
        for i in 0..=40 {
            let r = 0.1 + (10.0 - 0.1) * i as f64 / 40.0;
            for j in 0..=40 {
                let eps = 0.01 + (0.99 - 0.01) * j as f64 / 40.0;
                let c = choose_C_setdist(r, eps).unwrap();
                assert!(2.0 * c - 2.0 * r > 1.0 / eps);
                assert!(2.0 / c <= eps);
                let ch = choose_C_hausdorff(r, eps).unwrap();
                // equality when the first branch of the max is taken
                assert!(2.0 * ch - 2.0 * r >= 1.0 / eps - 4.0 * f64::EPSILON * ch);
                assert!(2.0 / ch <= eps / 2.0 * (1.0 + f64::EPSILON));
            }
        }
    }

    #[test]
    fn greedy_examples() {
        let same = vec![vec![1.0, 2.0]; 5];
        assert_eq!(greedy_separated_subfamily(&same, 0.1).selected, vec![0]);
        let spread: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 2.0]).collect();
        assert_eq!(greedy_separated_subfamily(&spread, 1.0).selected, vec![0, 1, 2, 3, 4]);
        let line: Vec<Vec<f64>> = [0.0, 0.4, 0.9, 1.3].iter().map(|&x| vec![x]).collect();
        assert_eq!(greedy_separated_subfamily(&line, 1.0).selected, vec![0, 3]);
    }

    #[test]
    fn theta_examples() {
        let spread: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 2.0]).collect();
        let fam = greedy_separated_subfamily(&spread, 1.0);
        assert!(theta_assignment(&spread, &fam).iter().all(Vec::is_empty));
        let same = vec![vec![0.0]; 6];
        let fam = greedy_separated_subfamily(&same, 1.0);
        assert_eq!(theta_assignment(&same, &fam), vec![vec![1, 2, 3, 4, 5]]);
        // ties go to the lowest selected position
        let tie: Vec<Vec<f64>> = [0.0, 2.0, 1.0].iter().map(|&x| vec![x]).collect();
        let fam = greedy_separated_subfamily(&tie, 1.5);
        assert_eq!(theta_assignment(&tie, &fam), vec![vec![2], vec![]]);
    }

    #[test]
    fn counting_bound_examples() {
        assert!((counting_upper_bound(3.0, 8.0, 0.5, 2) - 1369.0).abs() < 1e-9);
        assert!((counting_upper_bound(3.0, 8.0, 1e-15, 2) - 1.0).abs() < 1e-12);
        assert!(ln_counting_upper_bound(10.0, 8.0, 1.0, 10_000).is_finite());
        assert!((ball_volume_constant(2) / std::f64::consts::PI - 1.0).abs() < 1e-14);
        assert!((ball_volume_constant(3) / (4.0 * std::f64::consts::PI / 3.0) - 1.0).abs() < 1e-14);
        assert!((ball_volume_constant(1) / 2.0 - 1.0).abs() < 1e-14);
        for n in [1, 2, 5, 10, 31] {
            assert!((ln_ball_volume_constant(n) - ball_volume_constant(n).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn hausdorff_examples() {
        let a = vec![vec![0.0], vec![10.0]];
        let b = vec![vec![0.0]];
        assert_eq!(hausdorff_distance_estimate(&a, &a).unwrap(), 0.0);
        assert_eq!(hausdorff_distance_estimate(&[vec![0.0]], &[vec![3.0]]).unwrap(), 3.0);
        assert_eq!(hausdorff_distance_estimate(&a, &b).unwrap(), 10.0);
        assert_eq!(directed_hausdorff(&b, &a).unwrap(), 0.0);
        assert!(matches!(hausdorff_distance_estimate(&[], &b), Err(HypError::EmptySet)));
    }

    #[test]
    fn default_schedule_shape() {
        let s = default_schedule(8.0, 100_000).unwrap();
        assert_eq!(s[0], 18.0);
        assert!(s.windows(2).all(|w| w[1] - 16.0 == 2.0 * (w[0] - 16.0)));
        let last = *s.last().unwrap();
        let size = direction_count(packing_angle(8.0, last).unwrap()).unwrap() + 1;
        assert!(size > 1_000_000);
    }

    #[test]
    fn invalid_schedules_rejected() {
        let p = SearchParams::default();
        assert!(p.clone().with_schedule(vec![8.0, 10.0]).is_err());
        assert!(p.clone().with_schedule(vec![20.0, 19.0]).is_err());
        let mut q = p.clone();
        q.c = 9.0;
        assert!(q.validate().is_err());
    }

    #[test]
    fn constant_map_bunches_immediately() {
        let f = constant_map(2, vec![0.5]);
        let params = SearchParams::new(1.0, 0.5, 3, false, 1000, 0).unwrap();
        let out = find_bunched_configuration(&f, &params, None).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace[0].selected, 1);
        assert_eq!(out.config.pairwise_image_max, 0.0);
        let net = default_net(&f, 1.0, 0.5).unwrap();
        let cert = certify_configuration(&f, &out.config, &net, 50, 1, true).unwrap();
        assert_eq!(cert.set_distance.measured, 0.0);
        assert_eq!(cert.hausdorff.measured, 0.0);
        assert!(cert.pass);
    }

    #[test]
    fn poincare_search_and_certificate() {
        let f = poincare_inclusion(2).unwrap();
        let params = SearchParams::new(1.0, 0.5, 3, false, 100_000, 0).unwrap();
        let out = find_bunched_configuration(&f, &params, None).unwrap();
        let cfg = &out.config;
        assert_eq!(cfg.centers.len(), 3);
        assert!(cfg.pairwise_manifold_min >= 16.0 - 1e-9);
        assert!(cfg.pairwise_image_max < 0.25);
        for s in &out.trace {
            assert!(s.within_bound());
        }
        let net = default_net(&f, 1.0, 0.5).unwrap();
        let cert = certify_configuration(&f, cfg, &net, 200, 3, false).unwrap();
        assert!(cert.pass, "{cert:?}");
        let mut broken = cfg.clone();
        broken.centers[0] = HPoint::origin(2);
        broken.centers[1] = HPoint::from_polar(0.5, vec![1.0, 0.0]).unwrap();
        let bad = certify_configuration(&f, &broken, &net, 10, 3, false).unwrap();
        assert!(!bad.separation.pass && !bad.pass);
    }

    #[test]
    fn separated_busemann_images_exhaust_small_schedule() {
        let f = busemann_map(&axis_ideal_points(2, 2)).unwrap();
        let params = SearchParams::new(0.1, 0.9, 2, false, 1000, 0).unwrap();
        let tiny = 2.0 * params.c + 0.05;
        let params = params.with_schedule(vec![tiny]).unwrap();
        match find_bunched_configuration(&f, &params, None) {
            Err(HypError::ScheduleExhausted { largest_fiber, trace }) => {
                assert!(largest_fiber < 2);
                assert_eq!(trace.len(), 1);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn families_satisfy_separation_and_maximality() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let n = rng.gen_range(1..300);
            let images: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
            let sep = rng.gen_range(0.05..0.5);
            let fam = greedy_separated_subfamily(&images, sep);
            for (a, x) in fam.images.iter().enumerate() {
                for y in &fam.images[a + 1..] {
                    assert!(dist(x, y) >= sep - 1e-12);
                }
            }
            for img in &images {
                assert!(fam.images.iter().any(|s| dist(s, img) < sep + 1e-12));
            }
            let fibers = theta_assignment(&images, &fam);
            let total: usize = fibers.iter().map(Vec::len).sum();
            assert_eq!(total + fam.selected.len(), n);
            // images lie in the square of half-side 1, radius sqrt 2 about 0
            let lnb = ln_counting_upper_bound(2f64.sqrt(), 1.0 / sep, 1.0, 2);
            assert!((fam.selected.len() as f64).ln() <= lnb);
        }
    }

    proptest! {
        #[test]
        fn hausdorff_is_a_metric(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cloud = |n: usize| -> Vec<Vec<f64>> {
                (0..n).map(|_| vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).collect()
            };
            let (a, b, c) = (cloud(7), cloud(5), cloud(9));
            let ab = hausdorff_distance_estimate(&a, &b).unwrap();
            prop_assert_eq!(ab, hausdorff_distance_estimate(&b, &a).unwrap());
            prop_assert_eq!(hausdorff_distance_estimate(&a, &a).unwrap(), 0.0);
            let ac = hausdorff_distance_estimate(&a, &c).unwrap();
            let bc = hausdorff_distance_estimate(&b, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}
