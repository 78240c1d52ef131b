//! Invariants over randomly drawn inputs.

use hypack::packing::{generate_centers, verify_packing, PackingSpec};
use hypack::search::{greedy_separated_subfamily, theta_assignment};
use hypack::{distance, exp_map, law_of_sines_residual, triangle_angles, HPoint, HTangent, Transvection};
use proptest::prelude::*;

fn point(r: f64, t: f64) -> HPoint {
    HPoint::from_polar(r, vec![t.cos(), t.sin()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn law_of_sines_on_moderate_triangles(
        base in 0.0..4.0f64, b in 0.1..6.0f64, c in 0.1..6.0f64,
        phi in 0.0..std::f64::consts::TAU, gamma in 0.05..3.09f64,
    ) {
        let a = point(base, 1.0);
        let pb = exp_map(&HTangent::new(a.clone(), vec![c * phi.cos(), c * phi.sin()]).unwrap());
        let pc = exp_map(&HTangent::new(a.clone(), vec![b * (phi + gamma).cos(), b * (phi + gamma).sin()]).unwrap());
        let angles = triangle_angles(&a, &pb, &pc).unwrap();
        let sides = [distance(&pb, &pc), distance(&pc, &a), distance(&a, &pb)];
        prop_assert!((angles[0] - gamma).abs() < 1e-9);
        prop_assert!(angles.iter().sum::<f64>() < std::f64::consts::PI);
        prop_assert!(law_of_sines_residual(sides, angles) <= 1e-8);
    }

    #[test]
    fn transvections_are_isometries(
        rp in 0.0..60.0f64, tp in 0.0..std::f64::consts::TAU,
        r1 in 0.0..10.0f64, t1 in 0.0..std::f64::consts::TAU, r2 in 0.0..10.0f64, t2 in 0.0..std::f64::consts::TAU,
    ) {
        let t = Transvection::to(&point(rp, tp));
        let (x, y) = (point(r1, t1), point(r2, t2));
        let before = distance(&x, &y);
        let after = distance(&t.apply(&x), &t.apply(&y));
        prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before));
        let back = t.inverse().apply(&t.apply(&x));
        prop_assert!(distance(&back, &x) <= 1e-8);
    }

    #[test]
    fn packings_are_separated(c in 0.5..3.0f64, extra in 0.51..6.0f64) {
        let fam = generate_centers(&PackingSpec::standard(c, 2.0 * c + extra, 2).unwrap(), 2000).unwrap();
        let rep = verify_packing(&fam);
        prop_assert!(rep.pass);
        prop_assert!(fam.len() as u64 <= fam.full_count);
    }

    #[test]
    fn greedy_and_theta_invariants(
        pts in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 2), 1..80),
        sep in 0.05..0.8f64,
    ) {
        let fam = greedy_separated_subfamily(&pts, sep);
        for (i, &a) in fam.selected.iter().enumerate() {
            for &b in &fam.selected[i + 1..] {
                let d = hypack::numerics::dist(&pts[a], &pts[b]);
                prop_assert!(d >= sep);
            }
        }
        let fibers = theta_assignment(&pts, &fam);
        prop_assert_eq!(fibers.len(), fam.selected.len());
        let total: usize = fibers.iter().map(Vec::len).sum();
        prop_assert_eq!(total + fam.selected.len(), pts.len());
        for (fiber, &anchor) in fibers.iter().zip(&fam.selected) {
            for &i in fiber {
                prop_assert!(hypack::numerics::dist(&pts[i], &pts[anchor]) < sep);
            }
        }
    }
}
