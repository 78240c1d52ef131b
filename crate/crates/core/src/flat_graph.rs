//! A smooth surface in `R^3` whose extrinsic and intrinsic distances
//! disagree without bound, so its inclusion is Lipschitz but not strongly
//! proper.
//!
//! The surface is the graph of `g(x, y) = f(x)`, where `f` is a smooth bump
//! of height `k` supported on `(k - w, k + w)`, `w = 1/(k+1)`, and zero
//! elsewhere. The points `p_k = (k - w, 0, 0)` and `q_k = (k + w, 0, 0)` are
//! `2/(k+1)` apart in `R^3`, but any path on the surface between them climbs
//! over the ridge, so their intrinsic distance is at least `2k`.

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};

/// Half-width of the `k`-th bump.
pub fn bump_half_width(k: u32) -> f64 {
    1.0 / (k as f64 + 1.0)
}

/// `f(x) = k exp(1 - 1/(1 - t^2))` with `t = (x - k)/w`, zero for `|t| >= 1`.
pub fn bump(k: u32, x: f64) -> f64 {
    let w = bump_half_width(k);
    let t = (x - k as f64) / w;
    if t.abs() >= 1.0 {
        return 0.0;
    }
    k as f64 * (1.0 - 1.0 / (1.0 - t * t)).exp()
}

pub fn bump_slope(k: u32, x: f64) -> f64 {
    let w = bump_half_width(k);
    let t = (x - k as f64) / w;
    if t.abs() >= 1.0 {
        return 0.0;
    }
    let s = 1.0 - t * t;
    bump(k, x) * (-2.0 * t / (s * s)) / w
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatRow {
    pub k: u32,
    pub extrinsic: f64,
    pub intrinsic_lo: f64,
    pub intrinsic_hi: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatGraphReport {
    pub rows: Vec<FlatRow>,
    /// Grid cells along `x` used for each row.
    pub mesh_cells: Vec<usize>,
    /// Every lower estimate is at least `0.9 * 2k`.
    pub meets_ridge_bound: bool,
}

const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Length of the lift of the segment `(x0, y0) -> (x0 + dx, y0 + dy)`.
fn lifted_length(k: u32, x0: f64, dx: f64, dy: f64) -> f64 {
    GAUSS_LEGENDRE_8
        .iter()
        .map(|&(node, weight)| {
            let x = x0 + dx * (node + 1.0) / 2.0;
            let s = bump_slope(k, x);
            weight / 2.0 * (dx * dx * (1.0 + s * s) + dy * dy).sqrt()
        })
        .sum()
}

/// Shortest grid paths from `p_k` to `q_k` over the strip
/// `[k - w, k + w] x [-w/2, w/2]` with `cells` squares along `x`; returns
/// `(chord weights, lifted arc-length weights)`.
pub fn grid_estimates(k: u32, cells: usize) -> (f64, f64) {
    let w = bump_half_width(k);
    let nx = cells;
    let ny = (cells / 2).max(2);
    let h = 2.0 * w / nx as f64;
    let x_at = |i: usize| k as f64 - w + h * i as f64;
    let y_at = |j: usize| -w / 2.0 + (w / ny as f64) * j as f64;
    let heights: Vec<f64> = (0..=nx).map(|i| bump(k, x_at(i))).collect();
    let id = |i: usize, j: usize| NodeIndex::new(i * (ny + 1) + j);

    let mut g: UnGraph<(), (f64, f64)> = UnGraph::with_capacity((nx + 1) * (ny + 1), 4 * (nx + 1) * (ny + 1));
    for _ in 0..(nx + 1) * (ny + 1) {
        g.add_node(());
    }
    for i in 0..=nx {
        for j in 0..=ny {
            for (di, dj) in [(1i64, 0i64), (0, 1), (1, 1), (1, -1)] {
                let (i2, j2) = (i as i64 + di, j as i64 + dj);
                if i2 > nx as i64 || j2 < 0 || j2 > ny as i64 {
                    continue;
                }
                let (i2, j2) = (i2 as usize, j2 as usize);
                let dx = x_at(i2) - x_at(i);
                let dy = y_at(j2) - y_at(j);
                let dz = heights[i2] - heights[i];
                let chord = (dx * dx + dy * dy + dz * dz).sqrt();
                let arc = lifted_length(k, x_at(i), dx, dy);
                g.add_edge(id(i, j), id(i2, j2), (chord, arc));
            }
        }
    }
    let start = id(0, ny / 2);
    let goal = id(nx, ny / 2);
    let lo = dijkstra(&g, start, Some(goal), |e| e.weight().0)[&goal];
    let hi = dijkstra(&g, start, Some(goal), |e| e.weight().1)[&goal];
    (lo, hi)
}

/// Rows for `k = 1..=k_max`. The grid is refined (16 to 512 cells along `x`)
/// until the lower estimate moves by at most 1%.
pub fn flat_graph_example(k_max: u32) -> FlatGraphReport {
    let mut rows = Vec::new();
    let mut mesh_cells = Vec::new();
    for k in 1..=k_max {
        let w = bump_half_width(k);
        let p = [k as f64 - w, 0.0, 0.0];
        let q = [k as f64 + w, 0.0, 0.0];
        let extrinsic = crate::numerics::dist(&p, &q);
        let mut prev: Option<f64> = None;
        let mut est = (0.0, 0.0);
        let mut used = 0;
        for n in 4..=9 {
            used = 1usize << n;
            est = grid_estimates(k, used);
            if let Some(prev) = prev {
                if (est.0 - prev).abs() <= 0.01 * prev {
                    break;
                }
            }
            prev = Some(est.0);
        }
        rows.push(FlatRow {
            k,
            extrinsic,
            intrinsic_lo: est.0,
            intrinsic_hi: est.1,
        });
        mesh_cells.push(used);
    }
    let meets_ridge_bound = rows.iter().all(|r| r.intrinsic_lo >= 0.9 * 2.0 * r.k as f64);
    FlatGraphReport {
        rows,
        mesh_cells,
        meets_ridge_bound,
    }
}
