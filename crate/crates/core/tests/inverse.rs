use gratescat::forward::{Admissibility, Axis, MediumProfile, Slab};
use gratescat::inverse::{
    exact_moment, extract_moments, extract_moments_from, reciprocity_gap, reconstruct_difference,
    richardson_fit, swap_direction, InverseError, MomentOptions,
};
use gratescat::lattice::{ModeSet, Quasimomentum};
use gratescat::rayleigh::TangentialField;
use gratescat::trig::TrigPoly;
use gratescat::vec3::CVec3;
use gratescat::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn trace(ms: &ModeSet, height: f64, phase: f64) -> TangentialField {
    let coeffs: Vec<CVec3> = ms
        .modes()
        .iter()
        .map(|m| {
            let w = (-0.5 * (m.n.0.abs() + m.n.1.abs()) as f64).exp();
            let t = phase + 0.9 * m.n.0 as f64 + 0.4 * m.n.1 as f64;
            [
                c(t.cos(), t.sin()) * w,
                c(0.3 * t.sin(), -0.7) * w,
                c(0.0, 0.0),
            ]
        })
        .collect();
    TangentialField::new(height, coeffs).unwrap()
}

fn options() -> MomentOptions {
    let mut o = MomentOptions::new(1.2, Quasimomentum::new(0.23, 0.31));
    o.truncation = 64;
    o.schedule = vec![8, 12, 16, 24, 32];
    o
}

#[test]
fn reciprocity_gap_on_stacked_slabs() {
    let ms = ModeSet::new(1.1, Quasimomentum::new(0.2, -0.1), 6).unwrap();
    let p1 = MediumProfile::new(
        vec![
            Slab::new(
                0.3,
                TrigPoly::from_terms(&[(0, c(1.5, 0.1)), (1, c(0.1, 0.0)), (-1, c(0.1, 0.0))]),
            ),
            Slab::new(0.5, TrigPoly::constant(c(2.0, 0.05))),
        ],
        Axis::X1,
        Admissibility::Standard,
        None,
    )
    .unwrap();
    let p2 = MediumProfile::new(
        vec![
            Slab::new(
                0.6,
                TrigPoly::from_terms(&[(0, c(1.8, 0.2)), (2, c(0.05, 0.0)), (-2, c(0.05, 0.0))]),
            ),
            Slab::new(0.2, TrigPoly::constant(c(1.3, 0.0))),
        ],
        Axis::X1,
        Admissibility::Standard,
        None,
    )
    .unwrap();
    let rep = reciprocity_gap(&p1, &p2, &trace(&ms, 0.8, 0.0), &trace(&ms, 0.8, 1.3), &ms).unwrap();
    assert!(rep.gap <= 1e-6, "gap {}", rep.gap);
    assert!(rep.lhs.norm() > 1e-6);

    let same =
        reciprocity_gap(&p1, &p1, &trace(&ms, 0.8, 0.0), &trace(&ms, 0.8, 1.3), &ms).unwrap();
    assert_eq!(same.lhs, c(0.0, 0.0));
    assert!(same.rhs.norm() <= 1e-12);
}

#[test]
fn distinct_differences_give_distinct_moments() {
    let q2 = TrigPoly::from_terms(&[(0, c(1.6, 0.1)), (1, c(0.1, 0.0)), (-1, c(0.1, 0.0))]);
    let d1 = TrigPoly::from_terms(&[(0, c(0.1, 0.0)), (1, c(0.05, 0.0))]);
    let d2 = TrigPoly::from_terms(&[(0, c(0.1, 0.0)), (-1, c(0.05, 0.0))]);
    let opts = options();
    let t1 = extract_moments_from(&q2.add(&d1), &q2, 1, &opts).unwrap();
    let t2 = extract_moments_from(&q2.add(&d2), &q2, 1, &opts).unwrap();
    for (d, t) in [(&d1, &t1), (&d2, &t2)] {
        for l in -1..=1 {
            let est = t.estimate(l).unwrap();
            assert!((est.value - exact_moment(d, l)).norm() < 5e-3, "l = {l}");
        }
    }
    let gap = (t1.estimate(1).unwrap().value - t2.estimate(1).unwrap().value).norm();
    assert!(gap > 0.1, "tables should be distinguishable, gap {gap}");
    let rec = reconstruct_difference(&t1, 1).unwrap();
    assert!((rec.difference.coeff(1) - c(0.05, 0.0)).norm() < 1e-3);
    assert!(rec.conjugate_asymmetry() > 0.01);
    assert!(matches!(
        reconstruct_difference(&t1, 2),
        Err(InverseError::InsufficientDegree { .. })
    ));
}

#[test]
fn schedule_and_profile_checks() {
    let q = TrigPoly::from_terms(&[(0, c(1.6, 0.1)), (1, c(0.1, 0.0)), (-1, c(0.1, 0.0))]);
    for bad in [vec![16], vec![16, 16], vec![32, 16]] {
        let mut o = options();
        o.schedule = bad;
        assert!(matches!(
            extract_moments_from(&q, &q, 1, &o),
            Err(InverseError::InvalidSchedule(_))
        ));
    }
    let x1 = MediumProfile::single(1.0, q.clone()).unwrap();
    let x2 = x1.with_axis(Axis::X2);
    assert!(matches!(
        extract_moments(&x2, &x1, 1, &options()),
        Err(InverseError::WrongAxis)
    ));
    let layered = MediumProfile::new(
        vec![
            Slab::new(0.5, q.clone()),
            Slab::new(0.5, TrigPoly::constant(c(1.5, 0.0))),
        ],
        Axis::X1,
        Admissibility::Standard,
        None,
    )
    .unwrap();
    assert!(matches!(
        extract_moments(&layered, &x1, 1, &options()),
        Err(InverseError::NotOneDirectional)
    ));

    let alpha = Quasimomentum::new(0.1, 0.4);
    let (swapped, beta) = swap_direction(&x2, alpha);
    assert_eq!(swapped.axis(), Axis::X1);
    assert_eq!((beta.alpha1, beta.alpha2), (0.4, 0.1));
    assert!(extract_moments(&swapped, &x1, 1, &options()).is_ok());
}

#[test]
fn richardson_fit_recovers_exact_model() {
    let (a, b) = (c(0.3, -0.2), c(1.5, 0.7));
    let pts: Vec<(f64, Complex64)> = [8.0, 12.0, 20.0, 33.0]
        .iter()
        .map(|&m| (m, a + b / m))
        .collect();
    let (fa, fb, res) = richardson_fit(&pts);
    assert!((fa - a).norm() < 1e-13 && (fb - b).norm() < 1e-12 && res < 1e-13);
}
