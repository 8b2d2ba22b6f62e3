use gratescat::lattice::{
    analyze, build_modeset, principal_beta, CellFunction, LatticeError, ModeSet, Quasimomentum,
};
use gratescat::Complex64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn mode_law_and_branch(k in 0.05f64..20.0, a1 in -0.5f64..0.5, a2 in -0.5f64..0.5, order in 0usize..6) {
        match ModeSet::new(k, Quasimomentum::new(a1, a2), order) {
            Ok(ms) => {
                for m in ms.modes() {
                    let asq = m.alpha_sqr();
                    let law = m.beta * m.beta + asq - k * k;
                    prop_assert!(law.norm() <= 1e-12 * (k * k).max(asq).max(1.0));
                    prop_assert!(m.beta.im >= 0.0);
                    // propagating iff |α_n| < k, and then β is real
                    prop_assert_eq!(m.propagating, asq < k * k);
                    if m.propagating {
                        prop_assert!(m.beta.im == 0.0 && m.beta.re > 0.0);
                    } else {
                        prop_assert!(m.beta.re == 0.0);
                    }
                }
            }
            Err(LatticeError::WoodAnomaly { beta_abs, wood_tol, .. }) => prop_assert!(beta_abs <= wood_tol),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn parseval_on_random_polynomials(
        (order, raw) in (0usize..5).prop_flat_map(|o| (Just(o), prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), (2 * o + 1).pow(2)))),
        extra in 0usize..4,
    ) {
        let coeffs: Vec<Complex64> = raw.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let f = CellFunction::new(order, coeffs);
        let g = 2 * order + 1 + extra;
        let samples = f.synthesize_grid(g, g);
        let mean_sq = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / (g * g) as f64;
        prop_assert!((mean_sq - f.energy()).abs() <= 1e-12 * f.energy().max(1.0));
        let back = analyze(&samples, g, g, order).unwrap();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }
}

#[test]
fn pointwise_and_grid_synthesis_agree() {
    let mut f = CellFunction::zeros(2);
    f.set_coeff(1, -2, Complex64::new(0.5, 0.25));
    f.set_coeff(0, 0, Complex64::new(1.0, 0.0));
    f.set_coeff(-2, 1, Complex64::new(0.0, -0.75));
    let g = 7;
    let grid = f.synthesize_grid(g, g);
    let h = 2.0 * std::f64::consts::PI / g as f64;
    let pts: Vec<(f64, f64)> = (0..g * g)
        .map(|i| ((i % g) as f64 * h, (i / g) as f64 * h))
        .collect();
    for (a, b) in f.synthesize(&pts).iter().zip(&grid) {
        assert!((a - b).norm() < 1e-13);
    }
}

#[test]
fn wood_guard_respects_custom_tolerance() {
    // |α_(1,0)| = 0.9 + 1 = 1.9; k slightly above puts |β| ≈ sqrt(2·1.9·δ)
    let alpha = Quasimomentum::new(0.9, 0.0);
    let k = 1.9 + 1e-9;
    let beta = principal_beta(k, 1.9 * 1.9).norm();
    assert!(matches!(
        build_modeset(k, alpha, 1, 2.0 * beta),
        Err(LatticeError::WoodAnomaly { n1: 1, n2: 0, .. })
    ));
    assert!(build_modeset(k, alpha, 1, 0.5 * beta).is_ok());
    assert!(build_modeset(k, alpha, 0, 2.0 * beta).is_ok());
}

#[test]
fn rejects_bad_parameters() {
    assert!(matches!(
        ModeSet::new(0.0, Quasimomentum::new(0.0, 0.0), 2),
        Err(LatticeError::InvalidParameter(_))
    ));
    assert!(matches!(
        build_modeset(1.0, Quasimomentum::new(0.1, 0.0), 2, -1.0),
        Err(LatticeError::InvalidParameter(_))
    ));
    let samples = vec![Complex64::new(1.0, 0.0); 9];
    assert!(matches!(
        analyze(&samples, 3, 3, 2),
        Err(LatticeError::GridTooCoarse { .. })
    ));
    assert!(matches!(
        analyze(&samples, 5, 5, 2),
        Err(LatticeError::SampleCount { .. })
    ));
}
