//! Property tests of structural invariants.

use proptest::prelude::*;

use hyperconvex::fuchsian::octagon_group;
use hyperconvex::moebius::{hyperbolic_distance, BidiskPoint, DiskMoebius, DiskPoint, C64};
use hyperconvex::tube::{self, LeviTag};

fn disk(r_max: f64) -> impl Strategy<Value = C64> {
    (0.0..r_max, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| C64::from_polar(r, a))
}

fn automorphism() -> impl Strategy<Value = DiskMoebius> {
    (0.0..std::f64::consts::TAU, 0.0..2.0f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(phi, len, rot)| DiskMoebius::translation(phi, len).compose(&DiskMoebius::rotation(rot)))
}

proptest! {
    #[test]
    fn automorphisms_are_isometries(g in automorphism(), a in disk(0.9), b in disk(0.9)) {
        let (a, b) = (DiskPoint::new(a).unwrap(), DiskPoint::new(b).unwrap());
        let d0 = hyperbolic_distance(a, b);
        let d1 = hyperbolic_distance(g.apply(a), g.apply(b));
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
        prop_assert!((g.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_is_invariant_under_the_diagonal_action(g in automorphism(), z in disk(0.9), w in disk(0.9)) {
        let p = BidiskPoint::new(z, w).unwrap();
        prop_assert!((tube::delta(&g.act_bidisk(p)) - tube::delta(&p)).abs() < 1e-12);
    }

    #[test]
    fn delta_formulas_agree_and_lie_in_unit_interval(z in disk(0.95), w in disk(0.95)) {
        let p = BidiskPoint::new(z, w).unwrap();
        let (d, alt) = (tube::delta(&p), tube::delta_alt(&p));
        prop_assert!((d - alt).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&alt));
    }

    #[test]
    fn generators_preserve_delta(k in 0usize..8, z in disk(0.8), w in disk(0.8)) {
        let g = octagon_group().unwrap();
        let p = BidiskPoint::new(z, w).unwrap();
        let q = g.pairing(k).act_bidisk(p);
        prop_assert!((tube::delta(&q) - tube::delta(&p)).abs() < 1e-12);
    }

    #[test]
    fn neg_sqrt_delta_is_strictly_plurisubharmonic(z in disk(0.7), d in 1e-4..0.999f64, theta in 0.0..std::f64::consts::TAU) {
        let p = tube::level_point(z, (1.0 - d).sqrt(), theta);
        let h = tube::levi_closed(LeviTag::NegSqrtDelta, &p).unwrap();
        prop_assert!(h.min_eigenvalue() > 0.0);
    }

    #[test]
    fn rho_levi_is_degenerate(z in disk(0.7), d in 0.05..0.95f64, theta in 0.0..std::f64::consts::TAU) {
        let p = tube::level_point(z, (1.0 - d).sqrt(), theta);
        let h = tube::levi_closed(LeviTag::Rho, &p).unwrap();
        prop_assert!(h.det().abs() < 1e-10 * h.frobenius_norm().powi(2));
        prop_assert!(h.min_eigenvalue() > -1e-12);
    }
}
