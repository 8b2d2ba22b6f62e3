//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a flat `Float64Array`; the layouts are documented on
//! the native functions, which the wrappers call unchanged.

use gratescat::forward::{solve_scattering, Incidence, MediumProfile};
use gratescat::greens::PlaneWaveIncidence;
use gratescat::inverse::{extract_moments_from, reconstruct_difference, MomentOptions};
use gratescat::lattice::{ModeSet, Quasimomentum};
use gratescat::rayleigh::efficiencies;
use gratescat::sturm::{solve_sl, SLProblem};
use gratescat::trig::TrigPoly;
use gratescat::Complex64;
use wasm_bindgen::prelude::*;

/// Sinusoidal grating `q(x1) = q0 + 2·amp·cos x1` (complex mean).
fn cosine_profile(q0_re: f64, q0_im: f64, amp: f64) -> TrigPoly {
    let a = Complex64::new(amp, 0.0);
    TrigPoly::from_terms(&[(0, Complex64::new(q0_re, q0_im)), (1, a), (-1, a)])
}

/// Reflection efficiencies of an s-polarised plane wave against elevation.
///
/// Rows of `[theta1, total, specular, orders]`, one per step over
/// `theta1 ∈ [lo, hi]`; rows whose angle hits a Wood anomaly are skipped.
#[allow(clippy::too_many_arguments)]
pub fn efficiency_scan_native(
    k: f64,
    q0_re: f64,
    q0_im: f64,
    amp: f64,
    b: f64,
    lo: f64,
    hi: f64,
    steps: usize,
    order: usize,
) -> Result<Vec<f64>, String> {
    if steps < 2 || lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err("need at least two steps and lo < hi".into());
    }
    let profile =
        MediumProfile::single(b, cosine_profile(q0_re, q0_im, amp)).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(4 * steps);
    for i in 0..steps {
        let theta1 = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let inc = PlaneWaveIncidence::s_polarized(k, theta1, 0.0).map_err(|e| e.to_string())?;
        let ms = match ModeSet::new(k, inc.quasimomentum(), order) {
            Ok(ms) => ms,
            Err(_) => continue,
        };
        let sol = solve_scattering(&profile, &Incidence::PlaneWave(inc), &ms)
            .map_err(|e| e.to_string())?;
        let eff = efficiencies(&sol.scattered, &inc, &ms).map_err(|e| e.to_string())?;
        let total: f64 = eff.iter().map(|e| e.efficiency).sum();
        let specular = eff
            .iter()
            .find(|e| e.n == (0, 0))
            .map_or(0.0, |e| e.efficiency);
        out.extend_from_slice(&[theta1, total, specular, eff.len() as f64]);
    }
    Ok(out)
}

/// Sturm-Liouville eigenvalues for the cosine profile.
///
/// Rows of `[label, re_lambda, im_lambda]` sorted by label.
pub fn sturm_spectrum_native(
    q0_re: f64,
    q0_im: f64,
    amp: f64,
    k: f64,
    alpha1: f64,
    truncation: usize,
) -> Result<Vec<f64>, String> {
    let p = SLProblem::new(cosine_profile(q0_re, q0_im, amp), k, alpha1, truncation)
        .map_err(|e| e.to_string())?;
    let s = solve_sl(&p).map_err(|e| e.to_string())?;
    let mut rows: Vec<(i32, Complex64)> = s
        .labels
        .iter()
        .copied()
        .zip(s.eigenvalues.iter().copied())
        .collect();
    rows.sort_by_key(|r| r.0);
    Ok(rows
        .into_iter()
        .flat_map(|(m, l)| [m as f64, l.re, l.im])
        .collect())
}

/// Recovers a planted real difference `d(x1) = Σ_{|j|≤2} d_j e^{ijx1}` with
/// `d_{−j} = d_j` from moment estimates against a fixed background.
///
/// `planted` holds `d_0, d_1, d_2`. Output: `samples` rows of
/// `[x1, planted d(x1), recovered Re d(x1)]`, then the five recovered
/// coefficients as `(re, im)` pairs for `j = −2..=2`.
pub fn reconstruct_demo_native(planted: &[f64], samples: usize) -> Result<Vec<f64>, String> {
    if planted.len() != 3 {
        return Err("expected three coefficients d0, d1, d2".into());
    }
    let background = TrigPoly::from_terms(&[
        (0, Complex64::new(1.6, 0.2)),
        (1, Complex64::new(0.1, 0.02)),
        (-1, Complex64::new(0.05, 0.0)),
    ]);
    let d = TrigPoly::from_terms(
        &(-2i32..=2)
            .map(|j| (j, Complex64::new(planted[j.unsigned_abs() as usize], 0.0)))
            .collect::<Vec<_>>(),
    );
    let mut opts = MomentOptions::new(1.2, Quasimomentum::new(0.23, 0.31));
    opts.truncation = 64;
    opts.schedule = vec![8, 12, 16, 24, 32];
    let table = extract_moments_from(&background.add(&d), &background, 2, &opts)
        .map_err(|e| e.to_string())?;
    let rec = reconstruct_difference(&table, 2).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * samples + 10);
    for i in 0..samples {
        let x = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
        out.extend_from_slice(&[x, d.eval(x).re, rec.difference.eval(x).re]);
    }
    for j in -2..=2 {
        let c = rec.difference.coeff(j);
        out.extend_from_slice(&[c.re, c.im]);
    }
    Ok(out)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn efficiency_scan(
    k: f64,
    q0_re: f64,
    q0_im: f64,
    amp: f64,
    b: f64,
    lo: f64,
    hi: f64,
    steps: usize,
    order: usize,
) -> Result<Vec<f64>, JsError> {
    efficiency_scan_native(k, q0_re, q0_im, amp, b, lo, hi, steps, order)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sturm_spectrum(
    q0_re: f64,
    q0_im: f64,
    amp: f64,
    k: f64,
    alpha1: f64,
    truncation: usize,
) -> Result<Vec<f64>, JsError> {
    sturm_spectrum_native(q0_re, q0_im, amp, k, alpha1, truncation).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn reconstruct_demo(planted: &[f64], samples: usize) -> Result<Vec<f64>, JsError> {
    reconstruct_demo_native(planted, samples).map_err(|e| JsError::new(&e))
}
