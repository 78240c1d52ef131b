//! Seeded random sampling in tangent spaces.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{norm, scale};

/// Uniform unit vector in `R^m`.
pub fn random_direction<G: Rng + ?Sized>(rng: &mut G, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return scale(&v, 1.0 / n);
        }
    }
}

/// Radius of a point drawn uniformly by hyperbolic volume from a geodesic
/// ball of radius `rho` in `H^m`: Euclidean-ball proposals `rho U^(1/m)`,
/// accepted with probability `(sinh r / r)^(m-1) / (sinh rho / rho)^(m-1)`.
pub fn volume_radius<G: Rng + ?Sized>(rng: &mut G, rho: f64, m: usize) -> f64 {
    let stretch = |r: f64| if r == 0.0 { 1.0 } else { r.sinh() / r };
    let top = stretch(rho).powi(m as i32 - 1);
    loop {
        let u: f64 = rng.gen();
        let r = rho * u.powf(1.0 / m as f64);
        let accept: f64 = rng.gen();
        if accept * top <= stretch(r).powi(m as i32 - 1) {
            return r;
        }
    }
}

/// Tangent vector whose image under `exp` is volume-uniform in `B(o, rho)`.
pub fn volume_uniform_offset<G: Rng + ?Sized>(rng: &mut G, rho: f64, m: usize) -> Vec<f64> {
    let r = volume_radius(rng, rho, m);
    scale(&random_direction(rng, m), r)
}
