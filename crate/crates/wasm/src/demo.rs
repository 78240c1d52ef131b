//! Plain functions behind the browser bindings. Everything is drawn in the
//! Poincaré disk, where `(r, u)` sits at `tanh(r / 2) u`.

use hypack::maps::poincare_inclusion;
use hypack::nets::{build_reference_net, transport_net};
use hypack::packing::{generate_centers, PackingSpec};
use hypack::search::{certify_configuration, default_net, find_bunched_configuration, SearchParams};
use hypack::{HPoint, Result};
use serde_json::{json, Value};

fn disk(p: &HPoint) -> [f64; 2] {
    let t = (p.radius() / 2.0).tanh();
    let u = p.polar().direction();
    [t * u[0], t * u[1]]
}

/// Euclidean circle `[x, y, radius]` that is the hyperbolic ball `B(p, s)`.
fn disk_circle(p: &HPoint, s: f64) -> [f64; 3] {
    let r = p.radius();
    let u = p.polar().direction();
    let near = ((r - s) / 2.0).tanh();
    let far = ((r + s) / 2.0).tanh();
    let mid = (near + far) / 2.0;
    [mid * u[0], mid * u[1], (far - near) / 2.0]
}

fn from_disk(x: f64, y: f64) -> Result<HPoint> {
    let n = x.hypot(y);
    if n == 0.0 {
        return Ok(HPoint::origin(2));
    }
    if n >= 1.0 {
        return Err(hypack::HypError::Precondition("the point must lie inside the unit disk".into()));
    }
    HPoint::from_polar(2.0 * n.atanh(), vec![x / n, y / n])
}

/// Planar packing of `B(o, R)` by balls of radius `C`.
pub fn packing_disk(c: f64, big_r: f64, cap: usize) -> Result<Value> {
    let fam = generate_centers(&PackingSpec::standard(c, big_r, 2)?, cap)?;
    let circles: Vec<[f64; 3]> = fam.centers.iter().map(|p| disk_circle(p, c)).collect();
    Ok(json!({
        "alpha": fam.alpha,
        "family_size": fam.full_count,
        "shown": circles.len(),
        "enclosing": disk_circle(&HPoint::origin(2), big_r),
        "circles": circles,
    }))
}

/// The reference net of `B(o, rho)` moved to the point at disk position
/// `(x, y)`.
pub fn net_disk(rho: f64, delta: f64, x: f64, y: f64) -> Result<Value> {
    let p = from_disk(x, y)?;
    let net = build_reference_net(rho, delta, 2)?;
    let moved = transport_net(&net, &p)?;
    let points: Vec<[f64; 2]> = moved.iter().map(disk).collect();
    Ok(json!({
        "size": net.len(),
        "ball": disk_circle(&p, rho),
        "points": points,
    }))
}

/// Bunched-ball search for the Poincaré inclusion of the hyperbolic plane.
pub fn bunched_search(r: f64, eps: f64, k: usize, hausdorff: bool) -> Result<Value> {
    let f = poincare_inclusion(2)?;
    let params = SearchParams::new(r, eps, k, hausdorff, 20_000, 0)?;
    let net = default_net(&f, r, eps)?;
    let found = find_bunched_configuration(&f, &params, Some(&net))?;
    let cert = certify_configuration(&f, &found.config, &net, 200, 0, hausdorff)?;
    let cfg = &found.config;
    let balls: Vec<[f64; 3]> = cfg.centers.iter().map(|p| disk_circle(p, r)).collect();
    Ok(json!({
        "C": cfg.c,
        "R_used": cfg.r_used,
        "separation": cert.separation.measured,
        "set_distance": cert.set_distance.measured,
        "hausdorff": cert.hausdorff.measured,
        "pass": cert.pass,
        "balls": balls,
        "images": cfg.centers.iter().map(|p| f.eval(p)).collect::<Vec<_>>(),
    }))
}
