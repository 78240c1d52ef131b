//! Ball packings, transported nets and Lipschitz compression search in
//! hyperbolic space `H^m`, computed on the hyperboloid model.
//!
//! Any Lipschitz map `F: H^m -> R^n` must squeeze far-apart balls together:
//! for every `r`, `eps` and `k` there are `k` balls of radius `r`, pairwise
//! at least `1/eps` apart, whose images lie within `eps` of each other.
//! [`search::find_bunched_configuration`] finds such balls by packing a big
//! ball with a two-dimensional family of small ones ([`packing`]) and
//! pigeonholing their images; [`search::certify_configuration`] re-checks
//! the result independently.

pub mod error;
pub mod flat_graph;
pub mod hyperboloid;
pub mod maps;
pub mod nets;
pub mod numerics;
pub mod packing;
pub mod parallel;
pub mod sampling;
pub mod search;

pub use error::{HypError, Result};
pub use hyperboloid::{
    distance, exp_map, log_map, minkowski_inner, parallel_transport, polar_distance,
    transvection_to, triangle_angles, law_of_sines_residual, HPoint, HTangent, Polar,
    Transvection, COORDS_RADIUS_LIMIT, DEFAULT_TOL,
};
