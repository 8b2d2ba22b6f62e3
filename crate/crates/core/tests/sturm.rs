use gratescat::sturm::{solve_sl, solve_sl_with, Normalization, SLProblem, SturmError};
use gratescat::trig::TrigPoly;
use gratescat::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn profile(q0: f64, q1: (f64, f64), q2: (f64, f64), imag: f64) -> TrigPoly {
    TrigPoly::from_terms(&[
        (0, c(q0, imag)),
        (1, c(q1.0, q1.1)),
        (-1, c(q1.0, -q1.1)),
        (2, c(q2.0, q2.1)),
        (-2, c(q2.0, -q2.1)),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn real_index_gives_real_spectrum(
        q0 in 1.5f64..3.0, q1 in (-0.3f64..0.3, -0.3f64..0.3), q2 in (-0.2f64..0.2, -0.2f64..0.2),
        k in 0.5f64..2.0, a1 in -0.5f64..0.5,
    ) {
        let p = SLProblem::new(profile(q0, q1, q2, 0.0), k, a1, 24).unwrap();
        let s = solve_sl(&p).unwrap();
        for lam in &s.eigenvalues {
            prop_assert!(lam.im.abs() <= 1e-10 * lam.norm().max(1.0));
        }
    }

    #[test]
    fn gauge_shift_relabels_the_spectrum(
        q0 in 1.5f64..3.0, q1 in (-0.3f64..0.3, -0.3f64..0.3), imag in 0.0f64..0.3,
        k in 0.5f64..2.0, a1 in -0.5f64..0.5,
    ) {
        let q = profile(q0, q1, (0.0, 0.0), imag);
        let base = solve_sl(&SLProblem::new(q.clone(), k, a1, 40).unwrap()).unwrap();
        let shifted = solve_sl(&SLProblem::new(q, k, a1 + 1.0, 40).unwrap()).unwrap();
        for m in -15..=15 {
            let (l0, _) = base.entry(m).unwrap();
            let (l1, _) = shifted.entry(m - 1).unwrap();
            prop_assert!((l0 - l1).norm() <= 1e-10 * l0.norm().max(1.0), "m = {}: {} vs {}", m, l0, l1);
        }
    }
}

#[test]
fn weyl_count() {
    let q = profile(2.0, (0.25, 0.1), (0.1, 0.0), 0.2);
    let p = SLProblem::new(q, 1.2, 0.31, 64).unwrap();
    let s = solve_sl(&p).unwrap();
    for r in [100.0f64, 400.0, 900.0, 1600.0] {
        let count = s.eigenvalues.iter().filter(|l| -l.re <= r).count() as f64;
        assert!(
            (count - 2.0 * r.sqrt()).abs() <= 2.0,
            "R = {r}: {count} vs {}",
            2.0 * r.sqrt()
        );
    }
}

#[test]
fn labels_follow_the_anchors() {
    let q = profile(1.8, (0.2, 0.05), (0.05, 0.0), 0.1);
    let p = SLProblem::new(q, 1.1, 0.2, 32).unwrap();
    let s = solve_sl(&p).unwrap();
    let mut seen: Vec<i32> = s.labels.clone();
    seen.sort();
    assert_eq!(seen, (-32..=32).collect::<Vec<_>>());
    for m in [-20, -3, 0, 7, 20] {
        let (lam, v) = s.entry(m).unwrap();
        assert!((lam - p.anchor(m)).norm() < 1.0);
        assert!((v.eval(0.0) - c(1.0, 0.0)).norm() < 1e-12);
        // dominant Fourier coefficient sits at the label
        let peak = (-32..=32)
            .max_by(|a, b| v.coeff(*a).norm().total_cmp(&v.coeff(*b).norm()))
            .unwrap();
        assert_eq!(peak, m);
    }
    assert!(s.residuals.iter().all(|r| *r <= 1e-10));
}

#[test]
fn l2_normalisation() {
    let q = profile(1.8, (0.2, 0.05), (0.0, 0.0), 0.1);
    let p = SLProblem::new(q, 1.1, 0.2, 16).unwrap();
    let s = solve_sl_with(&p, Normalization::UnitL2).unwrap();
    for v in &s.eigenfunctions {
        let e: f64 = v.coeffs.iter().map(|x| x.norm_sqr()).sum();
        assert!((e - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rejects_small_truncation_and_nonpositive_index() {
    let q = profile(1.8, (0.2, 0.05), (0.1, 0.0), 0.1);
    assert!(matches!(
        SLProblem::new(q, 1.0, 0.1, 4),
        Err(SturmError::TruncationTooSmall { .. })
    ));
    let neg = TrigPoly::constant(c(-1.0, 0.0));
    assert!(matches!(
        SLProblem::new(neg, 1.0, 0.1, 16),
        Err(SturmError::InvalidProblem(_))
    ));
}
