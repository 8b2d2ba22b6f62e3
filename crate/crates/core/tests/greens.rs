use std::f64::consts::PI;

use gratescat::greens::{
    green_eval, helmholtz_residual, incident_from_density, DipoleDensity, GreensError,
};
use gratescat::lattice::{ModeSet, Quasimomentum};
use gratescat::rayleigh::Direction;
use gratescat::vec3::{self, CVec3};
use gratescat::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quasi_periodic_in_both_directions(
        a1 in -0.5f64..0.5, a2 in -0.5f64..0.5, k in 0.3f64..2.0,
        x1 in -3.0f64..3.0, x2 in -3.0f64..3.0, x3 in 0.2f64..1.5,
    ) {
        let ms = match ModeSet::new(k, Quasimomentum::new(a1, a2), 6) {
            Ok(ms) => ms,
            Err(_) => return Ok(()),
        };
        let y = [0.1, -0.3, 0.0];
        let g0 = green_eval([x1, x2, x3], y, &ms).unwrap();
        let g1 = green_eval([x1 + 2.0 * PI, x2, x3], y, &ms).unwrap();
        let g2 = green_eval([x1, x2 - 2.0 * PI, x3], y, &ms).unwrap();
        let scale = g0.norm().max(1e-3);
        prop_assert!((g1 - Complex64::from_polar(1.0, 2.0 * PI * a1) * g0).norm() <= 1e-10 * scale);
        prop_assert!((g2 - Complex64::from_polar(1.0, -2.0 * PI * a2) * g0).norm() <= 1e-10 * scale);
    }

    #[test]
    fn density_fields_are_downgoing_and_solenoidal(seed in 0u64..1000, a in 1.2f64..3.0) {
        let ms = ModeSet::new(1.3, Quasimomentum::new(0.21, -0.08), 3).unwrap();
        let coeffs: Vec<CVec3> = ms
            .modes()
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let t = (seed as f64 + 1.0) * (i as f64 + 0.5);
                [Complex64::new(t.sin(), t.cos()), Complex64::new((2.0 * t).cos(), 0.3), Complex64::new(0.0, 0.0)]
            })
            .collect();
        let g = DipoleDensity::new(a, coeffs, &ms).unwrap();
        let inc = incident_from_density(&g, &ms).unwrap();
        prop_assert_eq!(inc.direction, Direction::Downgoing);
        prop_assert_eq!(inc.reference_height, 0.0);
        for (idx, c) in inc.coeffs.iter().enumerate() {
            let kappa = inc.wavevector(&ms, idx);
            prop_assert!(kappa[2] == -ms.mode(idx).beta);
            prop_assert!(vec3::dot(&kappa, c).norm() <= 1e-12 * vec3::norm(c).max(1e-300) * vec3::norm(&kappa).max(1.0));
        }
    }
}

#[test]
fn density_field_matches_direct_curl_curl_of_single_term() {
    // one mode: ∫ G g ds = (1/(2iβ)) e^{iα·x + iβ(a - x3)} g, then curl curl = κ×(κ×·) with sign
    let ms = ModeSet::new(1.1, Quasimomentum::new(0.3, 0.1), 1).unwrap();
    let n = (1, -1);
    let gvec = [Complex64::new(0.4, -0.2), Complex64::new(0.1, 0.7)];
    let a = 2.0;
    let dens = DipoleDensity::single_mode(a, &ms, n, gvec).unwrap();
    let field = incident_from_density(&dens, &ms).unwrap();
    let idx = ms.index_of(n.0, n.1).unwrap();
    let m = ms.mode(idx);
    let kappa: CVec3 = [m.alpha[0].into(), m.alpha[1].into(), -m.beta];
    let g: CVec3 = [gvec[0], gvec[1], Complex64::new(0.0, 0.0)];
    // curl curl (v e^{iκ·x}) = (κ·κ) v − (κ·v) κ for constant v; κ·κ = k²
    let k2 = 1.1f64 * 1.1;
    let amp = (Complex64::i() * m.beta * a).exp() / (2.0 * Complex64::i() * m.beta);
    let kv = vec3::dot(&kappa, &g);
    let expect = vec3::scale(
        amp,
        &vec3::sub(&vec3::scale(k2.into(), &g), &vec3::scale(kv, &kappa)),
    );
    for c in 0..3 {
        assert!((field.coeffs[idx][c] - expect[c]).norm() < 1e-14);
    }
    assert!(field
        .coeffs
        .iter()
        .enumerate()
        .all(|(i, c)| i == idx || vec3::norm(c) == 0.0));
}

#[test]
fn helmholtz_residual_is_second_order() {
    let ms = ModeSet::new(0.7, Quasimomentum::new(0.13, 0.29), 10).unwrap();
    let (x, y) = ([0.4, -0.9, 1.3], [0.0, 0.2, 0.0]);
    let r1 = helmholtz_residual(x, y, &ms, 4e-3).unwrap();
    let r2 = helmholtz_residual(x, y, &ms, 2e-3).unwrap();
    assert!(r1 < 1e-5);
    let ratio = r1 / r2;
    assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
}

#[test]
fn coincident_planes_are_rejected() {
    let ms = ModeSet::new(0.7, Quasimomentum::new(0.13, 0.29), 4).unwrap();
    assert!(matches!(
        green_eval([0.5, 0.5, 0.001], [0.0, 0.0, 0.0], &ms),
        Err(GreensError::PointsTooClose { .. })
    ));
}
