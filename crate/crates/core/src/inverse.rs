//! Constructive side of uniqueness: the reciprocity-gap identity, Fourier
//! moments of `q1 − q2` from eigen-data, and reconstruction of the difference.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use thiserror::Error;

use crate::forward::{Axis, ForwardError, LayerField, LayerSolver, MediumProfile};
use crate::lattice::{synthesize_grid, ModeSet, Quasimomentum};
use crate::quadrature::gauss_legendre;
use crate::rayleigh::TangentialField;
use crate::separable::{
    a1_grid, a1_trapezoid, a2_closed_form, LogComplex, SeparableError, TransverseFactor,
};
use crate::sturm::{solve_sl, SLProblem, SLSpectrum, SturmError};
use crate::trig::TrigPoly;

#[derive(Debug, Error)]
pub enum InverseError {
    #[error(transparent)]
    Forward(#[from] ForwardError),
    #[error(transparent)]
    Sturm(#[from] SturmError),
    #[error(transparent)]
    Separable(#[from] SeparableError),
    #[error("A2 fell below the floor for l = {l} at {count} schedule points")]
    A2Floor { l: i32, count: usize },
    #[error("requested degree {requested} exceeds the available moments up to {available}")]
    InsufficientDegree { requested: usize, available: usize },
    #[error("invalid m schedule: {0}")]
    InvalidSchedule(String),
    #[error("profile varies in x2; swap the coordinates first")]
    WrongAxis,
    #[error("profile varies with height; moments need a single x1 profile")]
    NotOneDirectional,
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Both sides of `k²∫(q2 − q1) E1·Ē2 dx = 4π² Σ_n (T1 f − T2 f)_n · conj(g_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
}

/// Absolute size below which both sides count as zero.
pub const GAP_FLOOR: f64 = 1e-300;

/// `E1 = u(q1, f)`, `F2 = u(q2, f)`, `E2 = u(conj q2, g)`; the volume side is a
/// trapezoid × Gauss–Legendre quadrature, the boundary side a mode sum.
pub fn reciprocity_gap(
    profile1: &MediumProfile,
    profile2: &MediumProfile,
    f: &TangentialField,
    g: &TangentialField,
    modeset: &ModeSet,
) -> Result<GapReport, InverseError> {
    let s1 = LayerSolver::new(profile1, modeset)?;
    let s2 = LayerSolver::new(profile2, modeset)?;
    let s2c = LayerSolver::new(&profile2.conj(), modeset)?;
    let e1 = s1.solve(f)?;
    let f2 = s2.solve(f)?;
    let e2 = s2c.solve(g)?;
    let k2 = modeset.k() * modeset.k();
    let lhs = k2 * volume_pairing(&e1.field, &e2.field, profile1, profile2)?;
    let rhs = e1.tf.minus(&f2.tf).inner(g);
    let scale = lhs.norm().max(rhs.norm());
    let gap = if scale <= GAP_FLOOR {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    };
    Ok(GapReport { lhs, rhs, gap })
}

/// `∫_{Ω_b} (q2 − q1) E1·Ē2 dx`.
fn volume_pairing(
    e1: &LayerField,
    e2: &LayerField,
    profile1: &MediumProfile,
    profile2: &MediumProfile,
) -> Result<Complex64, InverseError> {
    let ms = e1.modeset();
    let order = ms.order();
    let deg = profile1.degree().max(profile2.degree());
    let g1 = 2 * order + deg + 1;
    let g2 = 2 * order + 1;
    let mut cuts: Vec<f64> = profile1
        .interfaces()
        .into_iter()
        .chain(profile2.interfaces())
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut total = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let j1 = profile1
            .slab_at(mid)
            .ok_or(ForwardError::OutsideLayer(mid))?;
        let j2 = profile2
            .slab_at(mid)
            .ok_or(ForwardError::OutsideLayer(mid))?;
        let dq = profile2.slabs()[j2].q.sub(&profile1.slabs()[j1].q);
        if dq.is_zero() {
            continue;
        }
        let dqs = dq.sample(g1);
        for (z, wz) in gauss_legendre(40, lo, hi) {
            let a = e1.coefficients(z, 0)?.e;
            let b = e2.coefficients(z, 0)?.e;
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..3 {
                let sa = synthesize_grid(order, &a[c], g1, g2);
                let sb = synthesize_grid(order, &b[c], g1, g2);
                for (i, (x, y)) in sa.iter().zip(&sb).enumerate() {
                    acc += dqs[i % g1] * x * y.conj();
                }
            }
            total += wz * acc * (crate::CELL_AREA / (g1 * g2) as f64);
        }
    }
    Ok(total)
}

/// Parameters of the moment pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentOptions {
    pub k: f64,
    pub alpha: Quasimomentum,
    /// Sturm–Liouville truncation `M`.
    pub truncation: usize,
    pub schedule: Vec<usize>,
    pub a2_floor: f64,
}

impl MomentOptions {
    pub fn new(k: f64, alpha: Quasimomentum) -> Self {
        Self {
            k,
            alpha,
            truncation: 128,
            schedule: vec![16, 24, 32, 48, 64],
            a2_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentEntry {
    pub l: i32,
    pub m: usize,
    pub a1: Complex64,
    pub a2: LogComplex,
    pub a2_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub l: i32,
    /// Intercept `a` of the fit `A1 ≈ a + b/m`.
    pub value: Complex64,
    pub slope: Complex64,
    /// Largest fit residual over the schedule.
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub degree: usize,
    pub entries: Vec<MomentEntry>,
    pub estimates: Vec<MomentEstimate>,
}

impl MomentTable {
    pub fn estimate(&self, l: i32) -> Option<&MomentEstimate> {
        self.estimates.iter().find(|e| e.l == l)
    }

    pub fn entries_for(&self, l: i32) -> impl Iterator<Item = &MomentEntry> {
        self.entries.iter().filter(move |e| e.l == l)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), InverseError> {
        writeln!(
            out,
            "l,m,re_a1,im_a1,ln_abs_a2,arg_a2,re_estimate,im_estimate"
        )?;
        for e in &self.entries {
            let est = self.estimate(e.l).map(|x| x.value).unwrap_or_default();
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                e.l,
                e.m,
                e.a1.re,
                e.a1.im,
                e.a2.ln_abs(),
                e.a2.ln.im,
                est.re,
                est.im
            )?;
        }
        Ok(())
    }
}

/// `a + b/m` least-squares fit; returns `(a, b, max residual)`.
pub fn richardson_fit(points: &[(f64, Complex64)]) -> (Complex64, Complex64, f64) {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / p.0).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<Complex64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: Complex64 = xs
        .iter()
        .zip(points)
        .map(|(x, p)| (x - mx) * (p.1 - my))
        .sum();
    let b = if sxx > 0.0 {
        sxy / sxx
    } else {
        Complex64::new(0.0, 0.0)
    };
    let a = my - b * mx;
    let res = xs
        .iter()
        .zip(points)
        .map(|(x, p)| (p.1 - a - b * x).norm())
        .fold(0.0, f64::max);
    (a, b, res)
}

fn x1_profile(p: &MediumProfile) -> Result<TrigPoly, InverseError> {
    if p.axis() != Axis::X1 && p.degree() > 0 {
        return Err(InverseError::WrongAxis);
    }
    let q = p.slabs()[0].q.clone();
    if p.slabs().iter().any(|s| s.q != q) {
        return Err(InverseError::NotOneDirectional);
    }
    Ok(q)
}

/// Moment table from the spectra of `q1` and `conj(q2)`.
pub fn extract_moments(
    profile1: &MediumProfile,
    profile2: &MediumProfile,
    degree: usize,
    options: &MomentOptions,
) -> Result<MomentTable, InverseError> {
    let q1 = x1_profile(profile1)?;
    let q2 = x1_profile(profile2)?;
    extract_moments_from(&q1, &q2, degree, options)
}

pub fn extract_moments_from(
    q1: &TrigPoly,
    q2: &TrigPoly,
    degree: usize,
    options: &MomentOptions,
) -> Result<MomentTable, InverseError> {
    let sched = &options.schedule;
    if sched.len() < 2 || sched.windows(2).any(|w| w[0] >= w[1]) {
        return Err(InverseError::InvalidSchedule(
            "need at least two strictly increasing entries".into(),
        ));
    }
    let m_max = *sched.last().expect("non-empty");
    if m_max > options.truncation / 2 {
        return Err(InverseError::InvalidSchedule(format!(
            "largest m = {m_max} needs a truncation of at least {}",
            2 * m_max
        )));
    }
    if sched[0] <= degree {
        return Err(InverseError::InvalidSchedule(format!(
            "smallest m must exceed the degree {degree}"
        )));
    }
    let (k, a1, a2) = (options.k, options.alpha.alpha1, options.alpha.alpha2);
    let spec1 = solve_sl(&SLProblem::new(q1.clone(), k, a1, options.truncation)?)?;
    let spec2 = solve_sl(&SLProblem::new(q2.conj(), k, a1, options.truncation)?)?;
    let dq = q1.sub(q2);
    let grid = a1_grid(&spec1, &spec2, &dq);
    let ln_floor = options.a2_floor.ln();
    let l_max = degree as i32;
    let mut entries = Vec::new();
    let mut estimates = Vec::new();
    for l in -l_max..=l_max {
        let mut pts = Vec::new();
        let mut failures = 0;
        for &m in sched {
            let n = m as i32 + l;
            let (lam_n, vn) = spec1.entry(n).ok_or(SeparableError::MissingBranch(n))?;
            let (lam_m, vm) = spec2
                .entry(m as i32)
                .ok_or(SeparableError::MissingBranch(m as i32))?;
            let un = TransverseFactor::growth_preset(-lam_n, a2)?;
            let um = TransverseFactor::growth_preset(-lam_m, a2)?;
            let a1v = if dq.is_zero() {
                Complex64::new(0.0, 0.0)
            } else {
                a1_trapezoid(vn, vm, &dq, grid)
            };
            let a2v = a2_closed_form(&un, &um);
            let ok = a2v.ln_abs() > ln_floor;
            if ok {
                pts.push((m as f64, a1v));
            } else {
                failures += 1;
            }
            entries.push(MomentEntry {
                l,
                m,
                a1: a1v,
                a2: a2v,
                a2_ok: ok,
            });
        }
        if pts.len() < 2 {
            return Err(InverseError::A2Floor { l, count: failures });
        }
        let (value, slope, error_estimate) = richardson_fit(&pts);
        estimates.push(MomentEstimate {
            l,
            value,
            slope,
            error_estimate,
        });
    }
    Ok(MomentTable {
        degree,
        entries,
        estimates,
    })
}

/// `M_l = ∫₀^{2π} d(x) e^{ilx} dx = 2π d_{−l}`.
pub fn exact_moment(diff: &TrigPoly, l: i32) -> Complex64 {
    2.0 * PI * diff.coeff(-l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    /// `q1 − q2 = (1/2π) Σ_l M_l e^{−ilx1}`.
    pub difference: TrigPoly,
    /// Per-coefficient error estimate, indexed like the coefficients `−L..=L`.
    pub errors: Vec<f64>,
    pub m_range: (usize, usize),
}

impl ReconstructionResult {
    /// Largest `|d_j − conj(d_{−j})|`: zero for a real difference.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let d = self.difference.degree() as i32;
        (-d..=d)
            .map(|j| (self.difference.coeff(j) - self.difference.coeff(-j).conj()).norm())
            .fold(0.0, f64::max)
    }
}

pub fn reconstruct_difference(
    moments: &MomentTable,
    degree: usize,
) -> Result<ReconstructionResult, InverseError> {
    if degree > moments.degree {
        return Err(InverseError::InsufficientDegree {
            requested: degree,
            available: moments.degree,
        });
    }
    let d = degree as i32;
    let mut terms = Vec::new();
    let mut errors = Vec::new();
    for j in -d..=d {
        let est = moments
            .estimate(-j)
            .ok_or(InverseError::InsufficientDegree {
                requested: degree,
                available: moments.degree,
            })?;
        terms.push((j, est.value / (2.0 * PI)));
        errors.push(est.error_estimate / (2.0 * PI));
    }
    let ms: Vec<usize> = moments.entries.iter().map(|e| e.m).collect();
    Ok(ReconstructionResult {
        difference: TrigPoly::from_terms(&terms),
        errors,
        m_range: (
            ms.iter().copied().min().unwrap_or(0),
            ms.iter().copied().max().unwrap_or(0),
        ),
    })
}

/// Relabels `x1 ↔ x2`: a profile in `x2` becomes one in `x1` and `α` is swapped.
pub fn swap_direction(
    profile: &MediumProfile,
    alpha: Quasimomentum,
) -> (MediumProfile, Quasimomentum) {
    let axis = match profile.axis() {
        Axis::X1 => Axis::X2,
        Axis::X2 => Axis::X1,
    };
    (profile.with_axis(axis), alpha.swapped())
}

pub fn write_summary<W: Write>(
    table: &MomentTable,
    result: Option<&ReconstructionResult>,
    mut out: W,
) -> Result<(), InverseError> {
    writeln!(out, "[moments]")?;
    writeln!(out, "degree = {}", table.degree)?;
    for e in &table.estimates {
        writeln!(
            out,
            "l = {:3}  estimate = {:.16e} {:+.16e}i  error = {:.3e}",
            e.l, e.value.re, e.value.im, e.error_estimate
        )?;
    }
    if let Some(r) = result {
        writeln!(out, "[reconstruction]")?;
        writeln!(out, "m_range = {} .. {}", r.m_range.0, r.m_range.1)?;
        for ((j, c), err) in r.difference.terms().zip(&r.errors) {
            writeln!(
                out,
                "j = {j:3}  coeff = {:.16e} {:+.16e}i  error = {err:.3e}",
                c.re, c.im
            )?;
        }
    }
    Ok(())
}

/// Convenience: spectra of `q1` and `conj(q2)` with the options' parameters.
pub fn paired_spectra(
    q1: &TrigPoly,
    q2: &TrigPoly,
    options: &MomentOptions,
) -> Result<(SLSpectrum, SLSpectrum), InverseError> {
    let (k, a1) = (options.k, options.alpha.alpha1);
    Ok((
        solve_sl(&SLProblem::new(q1.clone(), k, a1, options.truncation)?)?,
        solve_sl(&SLProblem::new(q2.conj(), k, a1, options.truncation)?)?,
    ))
}
