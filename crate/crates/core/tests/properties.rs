use horolab::cocycle::splitting_r;
use horolab::distributions::{invariant_distributions, DEFAULT_KERNEL_TOL};
use horolab::linalg::{CVec, C64};
use horolab::random::TestFunctions;
use horolab::rep::{build_rep, RepParams, Space};
use horolab::tensor::{build_tensor, glue, Factor};
use horolab::vector_field::{bbl_apply, delta_v2_check, pushforward_matrix, MixingConvention, VfSection};
use nalgebra::Matrix3;
use proptest::prelude::*;

fn casimir() -> impl Strategy<Value = f64> {
    prop_oneof![0.26f64..10.0, 0.01f64..0.249, Just(-2.0), Just(-6.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sobolev_norm_is_monotone_in_order(mu in casimir(), seed in 0u64..1000, r in 0.0f64..6.0, dr in 0.0f64..4.0) {
        let rep = build_rep(RepParams::new(mu, 6)).unwrap();
        let v = TestFunctions::new(seed).vector(&rep, Space::Padded, 0);
        let a = rep.log_sobolev_norm(&v, r).unwrap();
        let b = rep.log_sobolev_norm(&v, r + dr).unwrap();
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn sobolev_norm_is_homogeneous(mu in casimir(), seed in 0u64..1000, c in 1e-3f64..1e3, r in 0.0f64..5.0) {
        let rep = build_rep(RepParams::new(mu, 6)).unwrap();
        let v = TestFunctions::new(seed).vector(&rep, Space::Window, 0);
        let a = rep.sobolev_norm(&v, r).unwrap();
        let b = rep.sobolev_norm(&(&v * C64::new(0.0, c)), r).unwrap();
        prop_assert!((b - c * a).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn pushforward_group_law(a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let lhs = pushforward_matrix(a) * pushforward_matrix(b);
        let err = (lhs - pushforward_matrix(a + b)).abs().max();
        prop_assert!(err <= 1e-12 * (1.0 + (a + b).powi(2)));
        let nil = pushforward_matrix(a) - Matrix3::identity();
        prop_assert!((nil * nil * nil).abs().max() <= 1e-12);
        prop_assert!((pushforward_matrix(a).determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn glue_is_bounded_by_extremes(norms in prop::collection::vec(0.0f64..100.0, 1..6), raw in prop::collection::vec(0.01f64..1.0, 6)) {
        let w: Vec<f64> = raw[..norms.len()].to_vec();
        let sum: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / sum).collect();
        let g = glue(&norms, &w).unwrap();
        let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = norms.iter().copied().fold(0.0, f64::max);
        prop_assert!(g >= lo - 1e-12 && g <= hi + 1e-12);
        prop_assert!(glue(&norms, &w[..norms.len() - 1]).is_err());
    }

    #[test]
    fn keyed_coefficients_survive_refinement(seed in 0u64..u64::MAX, stream in 0u64..8) {
        let a = build_rep(RepParams::new(0.25, 4)).unwrap();
        let b = build_rep(RepParams::new(0.25, 7)).unwrap();
        let gen = TestFunctions::new(seed);
        let va = gen.vector(&a, Space::Padded, stream);
        let vb = gen.vector(&b, Space::Padded, stream);
        for (p, k) in a.indices().iter().enumerate() {
            let q = b.indices().iter().position(|x| x == k).unwrap();
            prop_assert_eq!(va[p], vb[q]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn splitting_r_is_a_projection(mu in casimir(), seed in 0u64..1000) {
        let t = build_tensor(RepParams::new(mu, 6), RepParams::new(5.0, 6), 1.0, 1.0).unwrap();
        let ds = invariant_distributions(t.left(), 1.0, DEFAULT_KERNEL_TOL).unwrap().with_duals().unwrap();
        let f = TestFunctions::new(seed).field(&t, Space::Padded, Space::Window, 0);
        let rf = splitting_r(&t, &f, &ds).unwrap();
        let rrf = splitting_r(&t, &rf, &ds).unwrap();
        prop_assert!((&rrf - &rf).norm() <= 1e-10 * f.norm());
        let resid = ds.pair_columns(&(&f - &rf)).unwrap();
        prop_assert!(resid.norm() <= 1e-10 * f.norm());
    }

    #[test]
    fn block_operators_commute(mu in casimir(), theta in casimir(), t in -2.0f64..2.0, s in -2.0f64..2.0, seed in 0u64..1000) {
        let tr = build_tensor(RepParams::new(mu, 5), RepParams::new(theta, 5), t, s).unwrap();
        let gen = TestFunctions::new(seed);
        let h = VfSection::from_fn(|i| gen.field(&tr, Space::Window, Space::Window, i as u64));
        let conv = MixingConvention::Adjoint;
        let b1 = bbl_apply(&tr, Factor::Left, &h, conv).unwrap();
        let b2 = bbl_apply(&tr, Factor::Right, &h, conv).unwrap();
        let d = delta_v2_check(&tr, &b1, &b2, conv).unwrap();
        prop_assert!(d <= 1e-12 * (1.0 + b1.norm() + b2.norm()));
    }
}

#[test]
fn zero_vector_has_no_norm() {
    let rep = build_rep(RepParams::new(0.25, 6)).unwrap();
    assert_eq!(rep.log_sobolev_norm(&CVec::zeros(rep.dim()), 3.0).unwrap(), f64::NEG_INFINITY);
}
