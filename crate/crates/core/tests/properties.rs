//! Property-based invariants across the polynomial, weight and series
//! machinery.

use proptest::prelude::*;

use rfj_core::functions::{lookup, modulus_of_continuity};
use rfj_core::jacobi::{
    eval_p, eval_q, weight_rho, weight_sigma, BasisKind, JacobiBasis, JacobiParams,
};
use rfj_core::quadrature::GaussJacobiRule;

fn params_strategy() -> impl Strategy<Value = JacobiParams> {
    (-0.95f64..4.0, -0.95f64..4.0).prop_map(|(g, d)| JacobiParams::new(g, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// q_n(t) = p_n(2t - 1) to machine rounding for random (params, n, t).
    #[test]
    fn affine_consistency(params in params_strategy(), n in 0usize..=20, t in 0.0f64..=1.0) {
        let q = eval_q(params, n, t).unwrap();
        let p = eval_p(params, n, 2.0 * t - 1.0).unwrap();
        let scale = q.abs().max(p.abs()).max(1.0);
        prop_assert!((q - p).abs() <= 1e-12 * scale, "q = {q}, p = {p}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// For gamma = delta the family alternates parity degree by degree.
    #[test]
    fn symmetry_for_symmetric_params(g in -0.95f64..4.0, n in 0usize..=20, y in 0.0f64..=1.0) {
        let params = JacobiParams::new(g, g).unwrap();
        let plus = eval_p(params, n, y).unwrap();
        let minus = eval_p(params, n, -y).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let scale = plus.abs().max(1.0);
        prop_assert!((minus - sign * plus).abs() <= 1e-12 * scale);
    }

    /// The [0, 1] weight is the affine image of the [-1, 1] weight up to the
    /// constant 2^{gamma+delta}.
    #[test]
    fn sigma_is_affine_image_of_rho(params in params_strategy(), t in 0.001f64..=0.999) {
        let sigma = weight_sigma(params, t).unwrap();
        let rho = weight_rho(params, 2.0 * t - 1.0).unwrap();
        let want = rho / 2f64.powf(params.gamma() + params.delta());
        prop_assert!((sigma - want).abs() <= 1e-12 * want.abs().max(1e-300));
    }

    /// Rules keep positive weights and exact mass for random parameters.
    #[test]
    fn rule_mass_and_positivity(params in params_strategy(), n_nodes in 1usize..=40) {
        let rule = GaussJacobiRule::new(params, n_nodes).unwrap();
        prop_assert!(rule.validate().is_ok());
    }

    /// Evaluating through the basis wrapper agrees with the direct entry
    /// points for every family.
    #[test]
    fn basis_wrapper_consistency(params in params_strategy(), n in 0usize..=15, x in -1.0f64..=1.0) {
        let basis = JacobiBasis::new(BasisKind::OrthonormalP, params, n).unwrap();
        let direct = eval_p(params, n, x).unwrap();
        let wrapped = basis.eval(n, x).unwrap();
        prop_assert!((direct - wrapped).abs() <= 1e-13 * direct.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// The modulus of continuity is nondecreasing in eps on every catalog
    /// entry, and the grid-exact subadditivity bound holds: a doubled
    /// window spans at most 2w + 1 cells, so
    /// w(2 eps) <= 2 w(eps) + (one-cell oscillation).
    #[test]
    fn modulus_monotone_and_subadditive(
        idx in 0usize..16,
        eps in 0.005f64..0.2,
    ) {
        let f = rfj_core::functions::CATALOG[idx];
        let density = 4097;
        let (lo, hi) = f.domain();
        let cell = 1.2 * (hi - lo) / (density - 1) as f64;
        let w1 = modulus_of_continuity(&f, eps, density).unwrap();
        let w15 = modulus_of_continuity(&f, 1.5 * eps, density).unwrap();
        let w2 = modulus_of_continuity(&f, 2.0 * eps, density).unwrap();
        let w_cell = modulus_of_continuity(&f, cell, density).unwrap();
        prop_assert!(w15 + 1e-12 >= w1);
        prop_assert!(w2 + 1e-12 >= w15);
        prop_assert!(
            w2 <= 2.0 * w1 + w_cell + 1e-12,
            "w2 = {w2}, w1 = {w1}, cell = {w_cell}"
        );
    }
}

#[test]
fn catalog_lipschitz_declarations_are_consistent() {
    // Spot-check the declared exponents drive the right rate normalization.
    let f = lookup("abs_pow_5_2").unwrap();
    assert_eq!(f.lipschitz_exponents(), Some((2, 0.5)));
    let f = lookup("abs_pow_3_2").unwrap();
    assert_eq!(f.lipschitz_exponents(), Some((1, 0.5)));
}
