use gratescat::lattice::{ModeSet, Quasimomentum};
use gratescat::rayleigh::{
    apply_r, energy_forms, inner_product_quadrature, RayleighError, RayleighField, TangentialField,
};
use gratescat::vec3::CVec3;
use gratescat::Complex64;
use proptest::prelude::*;

fn field(ms: &ModeSet, vals: &[(f64, f64, f64, f64)]) -> TangentialField {
    let coeffs: Vec<CVec3> = ms
        .modes()
        .iter()
        .zip(vals.iter().cycle())
        .map(|(_, v)| {
            [
                Complex64::new(v.0, v.1),
                Complex64::new(v.2, v.3),
                Complex64::new(0.0, 0.0),
            ]
        })
        .collect();
    TangentialField::new(1.0, coeffs).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        1..40,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn r_is_linear(x in coeffs(), y in coeffs(), a in (-2.0f64..2.0, -2.0f64..2.0), b in (-2.0f64..2.0, -2.0f64..2.0)) {
        let ms = ModeSet::new(1.4, Quasimomentum::new(0.17, -0.33), 2).unwrap();
        let (fx, fy) = (field(&ms, &x), field(&ms, &y));
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let lhs = apply_r(&fx.scaled(a).plus(&fy.scaled(b)), &ms).unwrap();
        let rhs = apply_r(&fx, &ms).unwrap().scaled(a).plus(&apply_r(&fy, &ms).unwrap().scaled(b));
        let scale = lhs.max_abs().max(1.0);
        prop_assert!(lhs.minus(&rhs).max_abs() <= 1e-13 * scale);
    }

    #[test]
    fn energy_forms_match_pairing_and_quadrature(x in coeffs(), k in 0.4f64..3.0) {
        let ms = match ModeSet::new(k, Quasimomentum::new(0.11, 0.27), 2) {
            Ok(ms) => ms,
            Err(_) => return Ok(()),
        };
        let e = field(&ms, &x);
        let r = apply_r(&e, &ms).unwrap();
        let forms = energy_forms(&e, &ms).unwrap();
        prop_assert!(forms.im_form >= 0.0);
        let pairing = r.inner(&e);
        let scale = pairing.norm().max(1e-12);
        prop_assert!((pairing - Complex64::new(forms.re_form, forms.im_form)).norm() <= 1e-12 * scale);
        let quad = inner_product_quadrature(&r, &e, &ms, 2 * ms.order() + 2);
        prop_assert!((quad - pairing).norm() <= 1e-10 * scale);
    }
}

#[test]
fn upgoing_fields_are_solenoidal() {
    let ms = ModeSet::new(1.2, Quasimomentum::new(0.3, 0.1), 3).unwrap();
    let trace: Vec<CVec3> = ms
        .modes()
        .iter()
        .enumerate()
        .map(|(i, _)| {
            [
                Complex64::new(i as f64 * 0.1, 1.0),
                Complex64::new(-0.5, 0.2 * i as f64),
                Complex64::new(0.0, 0.0),
            ]
        })
        .collect();
    let f = RayleighField::upgoing_from_tangential(&ms, &trace, 0.8);
    f.check_divergence(&ms, 1e-12).unwrap();
    let moved = f.rereferenced(&ms, 1.3);
    moved.check_divergence(&ms, 1e-12).unwrap();
    let x = [0.3, -0.4, 1.7];
    let (a, b) = (f.eval(&ms, x), moved.eval(&ms, x));
    for c in 0..3 {
        assert!((a[c] - b[c]).norm() < 1e-12 * (1.0 + a[c].norm()));
    }
}

#[test]
fn normal_component_is_rejected() {
    let bad = vec![[
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.1, 0.0),
    ]];
    assert!(matches!(
        TangentialField::new(0.0, bad),
        Err(RayleighError::NotTangential(0))
    ));
}
