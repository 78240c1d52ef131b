//! Lipschitz maps `H^m -> R^n` with declared constants, and a sampling
//! estimator for checking those constants.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{precondition, HypError, Result};
use crate::hyperboloid::{distance, HPoint};
use crate::numerics::{dist, dist_sq, log_add_exp, norm, scale};
use crate::parallel::map_range;
use crate::sampling::random_direction;

pub type EvalFn = Arc<dyn Fn(&HPoint) -> Vec<f64> + Send + Sync>;
pub type EuclideanFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A map `H^m -> R^n` together with a Lipschitz constant for it.
#[derive(Clone)]
pub struct LipschitzMap {
    eval: EvalFn,
    pub lipschitz: f64,
    pub in_dim: usize,
    pub out_dim: usize,
    pub label: String,
}

impl fmt::Debug for LipschitzMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipschitzMap")
            .field("label", &self.label)
            .field("lipschitz", &self.lipschitz)
            .field("in_dim", &self.in_dim)
            .field("out_dim", &self.out_dim)
            .finish()
    }
}

impl LipschitzMap {
    pub fn new(
        label: impl Into<String>,
        lipschitz: f64,
        in_dim: usize,
        out_dim: usize,
        eval: impl Fn(&HPoint) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            lipschitz,
            in_dim,
            out_dim,
            label: label.into(),
        }
    }

    pub fn eval(&self, x: &HPoint) -> Vec<f64> {
        (self.eval)(x)
    }
}

/// Poincaré-ball coordinates `x_s / (1 + x_0) = tanh(r/2) u`. The conformal
/// factor `(1 - |z|^2) / 2` is at most `1/2`, which is the constant.
pub fn poincare_inclusion(m: usize) -> Result<LipschitzMap> {
    if m < 2 {
        return Err(precondition("poincare_inclusion needs m >= 2"));
    }
    Ok(LipschitzMap::new("poincare", 0.5, m, m, |x: &HPoint| {
        scale(x.polar().direction(), (x.radius() / 2.0).tanh())
    }))
}

/// Busemann coordinates `log(-<x, xi_i>_M)` for future-null `xi_i`, each
/// rescaled to `xi_0 = 1` so that every coordinate vanishes at `o`. Each
/// coordinate is 1-Lipschitz, so the map is `sqrt(n)`-Lipschitz.
pub fn busemann_map(ideal_points: &[Vec<f64>]) -> Result<LipschitzMap> {
    if ideal_points.is_empty() {
        return Err(precondition("busemann_map needs at least one ideal point"));
    }
    let m = ideal_points[0].len().saturating_sub(1);
    if m < 2 {
        return Err(precondition("ideal points need length m+1 >= 3"));
    }
    let mut dirs = Vec::with_capacity(ideal_points.len());
    for xi in ideal_points {
        if xi.len() != m + 1 {
            return Err(precondition("ideal points have mixed dimensions"));
        }
        if !(xi[0] > 0.0) {
            return Err(HypError::InvalidIdealPoint(format!("xi_0 = {} is not positive", xi[0])));
        }
        let s = norm(&xi[1..]);
        if (s - xi[0]).abs() > 1e-12 * xi[0] {
            return Err(HypError::InvalidIdealPoint(format!(
                "<xi,xi>_M = {} is not null",
                (s - xi[0]) * (s + xi[0])
            )));
        }
        dirs.push(scale(&xi[1..], 1.0 / s));
    }
    let n = dirs.len();
    Ok(LipschitzMap::new("busemann", (n as f64).sqrt(), m, n, move |x: &HPoint| {
        // cosh r - sinh r cos t = e^r |u - xi|^2 / 4 + e^-r |u + xi|^2 / 4
        let r = x.radius();
        let u = x.polar().direction();
        dirs.iter()
            .map(|xi| {
                let minus = dist_sq(u, xi) / 4.0;
                let plus = u.iter().zip(xi).map(|(a, b)| (a + b) * (a + b)).sum::<f64>() / 4.0;
                log_add_exp(r + minus.ln(), -r + plus.ln())
            })
            .collect()
    }))
}

/// Ideal points `(1, e_i)` for `i < n`, the default Busemann directions.
pub fn axis_ideal_points(m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut xi = vec![0.0; m + 1];
            xi[0] = 1.0;
            xi[1 + i % m] = if i < m { 1.0 } else { -1.0 };
            xi
        })
        .collect()
}

pub fn constant_map(m: usize, value: Vec<f64>) -> LipschitzMap {
    let n = value.len();
    LipschitzMap::new("constant", 0.0, m, n, move |_: &HPoint| value.clone())
}

/// `x -> d(o, x)`, 1-Lipschitz by the triangle inequality.
pub fn radial_distance_map(m: usize) -> LipschitzMap {
    LipschitzMap::new("radial", 1.0, m, 1, |x: &HPoint| vec![x.radius()])
}

/// Map selection by CLI label.
pub fn map_by_label(label: &str, m: usize) -> Result<LipschitzMap> {
    match label {
        "poincare" | "poincare_inclusion" => poincare_inclusion(m),
        "busemann" | "busemann_map" => busemann_map(&axis_ideal_points(m, 2)),
        "constant" => Ok(constant_map(m, vec![0.0; 2])),
        "radial" => Ok(radial_distance_map(m)),
        other => Err(precondition(format!(
            "unknown map '{other}' (expected poincare, busemann, constant or radial)"
        ))),
    }
}

/// A map `R^a -> R^b` with a Lipschitz constant.
#[derive(Clone)]
pub struct EuclideanMap {
    f: EuclideanFn,
    pub lipschitz: f64,
    pub in_dim: usize,
    pub out_dim: usize,
    pub label: String,
}

impl EuclideanMap {
    pub fn new(
        label: impl Into<String>,
        lipschitz: f64,
        in_dim: usize,
        out_dim: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            lipschitz,
            in_dim,
            out_dim,
            label: label.into(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new("id", 1.0, n, n, |v: &[f64]| v.to_vec())
    }

    pub fn scaling(factor: f64, n: usize) -> Self {
        Self::new(format!("x{factor}"), factor.abs(), n, n, move |v: &[f64]| scale(v, factor))
    }

    /// Keeps the listed coordinates.
    pub fn projection(coords: Vec<usize>, in_dim: usize) -> Result<Self> {
        if coords.iter().any(|&c| c >= in_dim) {
            return Err(precondition("projection coordinate out of range"));
        }
        let out = coords.len();
        Ok(Self::new("proj", 1.0, in_dim, out, move |v: &[f64]| {
            coords.iter().map(|&c| v[c]).collect()
        }))
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (self.f)(v)
    }
}

/// `G . F` with constant `L_F L_G`.
pub fn compose_euclidean(f: &LipschitzMap, g: &EuclideanMap) -> Result<LipschitzMap> {
    if g.in_dim != f.out_dim {
        return Err(precondition(format!(
            "cannot compose: F has {} outputs, G takes {}",
            f.out_dim, g.in_dim
        )));
    }
    let (inner, outer) = (f.eval.clone(), g.f.clone());
    Ok(LipschitzMap::new(
        format!("{}.{}", g.label, f.label),
        f.lipschitz * g.lipschitz,
        f.in_dim,
        g.out_dim,
        move |x: &HPoint| outer(&inner(x)),
    ))
}

/// Largest sampled `|F(x) - F(y)| / d(x, y)` over random pairs in
/// `B(o, region_radius)`. Half the pairs share a direction, which probes the
/// radial stretch; the rest are independent.
pub fn estimate_lipschitz(f: &LipschitzMap, pairs: usize, seed: u64, region_radius: f64) -> Result<f64> {
    if pairs == 0 {
        return Err(precondition("pairs must be >= 1"));
    }
    if !(region_radius > 0.0) {
        return Err(precondition("region radius must be positive"));
    }
    let m = f.in_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let u = random_direction(&mut rng, m);
        let v = if i % 2 == 0 { u.clone() } else { random_direction(&mut rng, m) };
        let a: f64 = rng.gen_range(0.0..=region_radius);
        let b: f64 = rng.gen_range(0.0..=region_radius);
        draws.push((scale(&u, a), scale(&v, b)));
    }
    let ratios = map_range(pairs, |i| {
        let x = HPoint::exp_origin(&draws[i].0);
        let y = HPoint::exp_origin(&draws[i].1);
        let d = distance(&x, &y);
        if d < 1e-12 {
            0.0
        } else {
            dist(&f.eval(&x), &f.eval(&y)) / d
        }
    });
    Ok(ratios.into_iter().fold(0.0, f64::max))
}
