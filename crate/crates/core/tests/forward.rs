use std::f64::consts::PI;

use gratescat::forward::{
    assemble_dtn, pde_residual, solve_qpbvp, solve_scattering, Admissibility, Axis, ForwardError,
    Incidence, LayerSolver, MediumProfile, Slab,
};
use gratescat::greens::{DipoleDensity, PlaneWaveIncidence};
use gratescat::lattice::{ModeSet, Quasimomentum};
use gratescat::rayleigh::{efficiencies, TangentialField};
use gratescat::trig::TrigPoly;
use gratescat::vec3::CVec3;
use gratescat::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn grating() -> TrigPoly {
    TrigPoly::from_terms(&[(0, c(1.5, 0.1)), (1, c(0.15, 0.0)), (-1, c(0.15, 0.0))])
}

fn trace(ms: &ModeSet, height: f64) -> TangentialField {
    let coeffs: Vec<CVec3> = ms
        .modes()
        .iter()
        .map(|m| {
            let w = (-0.6 * (m.n.0.abs() + m.n.1.abs()) as f64).exp();
            let t = 0.7 * m.n.0 as f64 - 1.3 * m.n.1 as f64;
            [c(t.cos(), 0.3) * w, c(-0.2, t.sin()) * w, c(0.0, 0.0)]
        })
        .collect();
    TangentialField::new(height, coeffs).unwrap()
}

fn interior_points(b: f64) -> Vec<[f64; 3]> {
    (0..12)
        .map(|i| {
            let t = i as f64;
            [
                (1.7 * t).rem_euclid(2.0 * PI),
                (2.9 * t + 0.4).rem_euclid(2.0 * PI),
                b * (0.05 + 0.9 * ((0.37 * t).fract())),
            ]
        })
        .collect()
}

#[test]
fn layer_solution_satisfies_pde_and_pec() {
    let ms = ModeSet::new(1.3, Quasimomentum::new(0.21, 0.12), 6).unwrap();
    let two = MediumProfile::new(
        vec![
            Slab::new(0.4, grating()),
            Slab::new(0.5, TrigPoly::constant(c(2.2, 0.05))),
        ],
        Axis::X1,
        Admissibility::Standard,
        None,
    )
    .unwrap();
    for profile in [MediumProfile::single(1.0, grating()).unwrap(), two] {
        let b = profile.height();
        let sol = solve_qpbvp(&profile, &trace(&ms, b), &ms).unwrap();
        let res = pde_residual(&sol.field, &interior_points(b)).unwrap();
        assert!(res.iter().all(|r| *r <= 1e-8), "residuals {res:?}");
        let pec = sol.field.tangential_trace(0.0).unwrap();
        assert!(pec.max_abs() <= 1e-10, "PEC defect {}", pec.max_abs());
        let top = sol.field.tangential_trace(b).unwrap();
        assert!(top.minus(&trace(&ms, b)).max_abs() <= 1e-10);
    }
}

#[test]
fn splitting_a_slab_leaves_the_dtn_map_unchanged() {
    let ms = ModeSet::new(1.1, Quasimomentum::new(0.2, -0.15), 4).unwrap();
    let one = MediumProfile::single(0.9, grating()).unwrap();
    let split = MediumProfile::new(
        vec![Slab::new(0.35, grating()), Slab::new(0.55, grating())],
        Axis::X1,
        Admissibility::Standard,
        None,
    )
    .unwrap();
    let (t1, t2) = (
        assemble_dtn(&one, &ms).unwrap(),
        assemble_dtn(&split, &ms).unwrap(),
    );
    let f = trace(&ms, 0.9);
    let diff = t1
        .apply(&f)
        .unwrap()
        .minus(&t2.apply(&f).unwrap())
        .max_abs();
    assert!(diff <= 1e-10 * t1.norm(), "diff {diff}");
    assert_ne!(t1.provenance(), t2.provenance());
}

#[test]
fn lossless_grating_conserves_energy() {
    let q = TrigPoly::from_terms(&[(0, c(2.0, 0.0)), (1, c(0.4, 0.0)), (-1, c(0.4, 0.0))]);
    let profile = MediumProfile::single(0.8, q).unwrap();
    for (t1, t2, pol) in [(0.9, 0.3, 's'), (0.5, 1.1, 'p'), (1.3, -0.4, 's')] {
        let k = 2.3;
        let inc = if pol == 's' {
            PlaneWaveIncidence::s_polarized(k, t1, t2).unwrap()
        } else {
            PlaneWaveIncidence::p_polarized(k, t1, t2).unwrap()
        };
        let ms = ModeSet::new(k, inc.quasimomentum(), 8).unwrap();
        let sol = solve_scattering(&profile, &Incidence::PlaneWave(inc), &ms).unwrap();
        let eff = efficiencies(&sol.scattered, &inc, &ms).unwrap();
        let total: f64 = eff.iter().map(|e| e.efficiency).sum();
        assert!((total - 1.0).abs() < 1e-9, "total {total}");
        assert!(eff.len() > 1, "several orders should propagate");
    }
}

#[test]
fn total_field_is_continuous_across_the_artificial_boundary() {
    let k = 1.4;
    let inc = PlaneWaveIncidence::p_polarized(k, 0.8, 0.2).unwrap();
    let ms = ModeSet::new(k, inc.quasimomentum(), 6).unwrap();
    let profile = MediumProfile::single(1.0, grating()).unwrap();
    let sol = solve_scattering(&profile, &Incidence::PlaneWave(inc), &ms).unwrap();
    for (x1, x2) in [(0.3, 1.2), (2.5, -0.7)] {
        let below = sol.eval_total([x1, x2, 1.0 - 1e-12]).unwrap();
        let above = sol.eval_total([x1, x2, 1.0 + 1e-12]).unwrap();
        for comp in 0..2 {
            assert!(
                (below[comp] - above[comp]).norm() < 1e-8,
                "component {comp}"
            );
        }
    }
}

#[test]
fn density_incidence_requires_source_above_layer() {
    let ms = ModeSet::new(1.2, Quasimomentum::new(0.1, 0.2), 3).unwrap();
    let profile = MediumProfile::single(1.0, grating()).unwrap();
    let low = DipoleDensity::single_mode(0.8, &ms, (0, 0), [c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(matches!(
        solve_scattering(&profile, &Incidence::Density(low), &ms),
        Err(ForwardError::InvalidParameter(_))
    ));
    let high = DipoleDensity::single_mode(1.5, &ms, (1, 0), [c(1.0, 0.0), c(0.0, 0.5)]).unwrap();
    let sol = solve_scattering(&profile, &Incidence::Density(high), &ms).unwrap();
    let pec = sol.layer.tangential_trace(0.0).unwrap();
    assert!(pec.max_abs() < 1e-10);
}

#[test]
fn solver_is_reusable_across_data() {
    let ms = ModeSet::new(1.0, Quasimomentum::new(0.3, 0.05), 4).unwrap();
    let profile = MediumProfile::single(0.7, grating()).unwrap();
    let solver = LayerSolver::new(&profile, &ms).unwrap();
    let f = trace(&ms, 0.7);
    let g = f.scaled(c(0.0, 2.0));
    let (sf, sg) = (solver.solve(&f).unwrap(), solver.solve(&g).unwrap());
    assert!(sg.tf.minus(&sf.tf.scaled(c(0.0, 2.0))).max_abs() < 1e-12 * sf.tf.max_abs());
}

#[test]
fn x2_profiles_are_rejected_by_the_x1_solver() {
    let ms = ModeSet::new(1.0, Quasimomentum::new(0.3, 0.05), 2).unwrap();
    let profile = MediumProfile::new(
        vec![Slab::new(0.7, grating())],
        Axis::X2,
        Admissibility::Standard,
        None,
    )
    .unwrap();
    assert!(matches!(
        LayerSolver::new(&profile, &ms),
        Err(ForwardError::WrongAxis)
    ));
}
