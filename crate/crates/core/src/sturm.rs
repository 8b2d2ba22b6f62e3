//! Quasi-periodic Sturm–Liouville problem `v'' + k² q(x1) v = λ v`,
//! `v(x1 + 2π) = e^{2πiα1} v(x1)`, by Fourier–Galerkin on `e^{i(m+α1)x1}`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, CMat};
use crate::trig::TrigPoly;

#[derive(Debug, Error)]
pub enum SturmError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("truncation M = {got} is below 2·deg(q) + 4 = {required}")]
    TruncationTooSmall { got: usize, required: usize },
    #[error("eigen-decomposition failed: {0}")]
    EigenFailure(String),
    #[error("eigenpair residual {residual:.3e} exceeds the Galerkin bound")]
    ResidualTooLarge { residual: f64 },
    #[error("eigenfunction {label} has |v(0)| = {value:.3e}; cannot normalise to v(0) = 1")]
    NormalizationDegenerate { label: i32, value: f64 },
    #[error("both shift hypotheses leave remainders above {tol:.3e} (alpha1: {r_alpha:.3e}, alpha1/2pi: {r_scaled:.3e})")]
    FitInconclusive {
        tol: f64,
        r_alpha: f64,
        r_scaled: f64,
    },
    #[error("not enough branch pairs for an asymptotic fit: {0}")]
    TooFewBranches(usize),
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

pub const RESIDUAL_LIMIT: f64 = 1e-10;

/// Eigenfunction normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `v(0) = 1`.
    UnitValueAtOrigin,
    /// `Σ|c_m|² = 1`, i.e. `∫|v|² = 2π`.
    UnitL2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SLProblem {
    pub q: TrigPoly,
    pub k: f64,
    pub alpha1: f64,
    pub truncation: usize,
}

impl SLProblem {
    pub fn new(q: TrigPoly, k: f64, alpha1: f64, truncation: usize) -> Result<Self, SturmError> {
        if !(k > 0.0 && k.is_finite()) || !alpha1.is_finite() {
            return Err(SturmError::InvalidProblem(format!(
                "need k > 0 and finite alpha1, got k = {k}, alpha1 = {alpha1}"
            )));
        }
        if q.terms().any(|(_, c)| !c.is_finite()) {
            return Err(SturmError::InvalidProblem(
                "q has non-finite coefficients".into(),
            ));
        }
        let required = 2 * q.degree() + 4;
        if truncation < required {
            return Err(SturmError::TruncationTooSmall {
                got: truncation,
                required,
            });
        }
        let gamma = q
            .sample((8 * q.degree() + 1).max(64))
            .iter()
            .map(|v| v.re)
            .fold(f64::INFINITY, f64::min);
        if gamma <= 0.0 {
            return Err(SturmError::InvalidProblem(format!(
                "Re q must be positive, minimum sampled value {gamma:.3e}"
            )));
        }
        Ok(Self {
            q,
            k,
            alpha1,
            truncation,
        })
    }

    pub fn size(&self) -> usize {
        2 * self.truncation + 1
    }

    /// `A[m, m'] = −(m+α1)² δ + k² q_{m−m'}`, `|m|, |m'| ≤ M`.
    pub fn matrix(&self) -> CMat {
        let mm = self.truncation as i32;
        let k2 = self.k * self.k;
        linalg::from_fn(self.size(), self.size(), |i, j| {
            let (m, mp) = (i as i32 - mm, j as i32 - mm);
            let mut v = k2 * self.q.coeff(m - mp);
            if m == mp {
                let s = m as f64 + self.alpha1;
                v -= s * s;
            }
            v
        })
    }

    /// Closed-form anchor `k² q̄ − (m+α1)²`.
    pub fn anchor(&self, m: i32) -> Complex64 {
        let s = m as f64 + self.alpha1;
        self.k * self.k * self.q.mean() - s * s
    }

    /// The same family with `q → conj(q)`.
    pub fn conj(&self) -> Self {
        Self {
            q: self.q.conj(),
            ..self.clone()
        }
    }
}

/// `v(x) = Σ c_m e^{i(m+α)x}` over `|m| ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpFunction {
    pub alpha: f64,
    pub coeffs: Vec<Complex64>,
}

impl QpFunction {
    pub fn truncation(&self) -> i32 {
        (self.coeffs.len() / 2) as i32
    }

    pub fn coeff(&self, m: i32) -> Complex64 {
        let mm = self.truncation();
        if m.abs() > mm {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(m + mm) as usize]
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_derivative(x, 0)
    }

    /// `p`-th derivative at `x`.
    pub fn eval_derivative(&self, x: f64, p: u32) -> Complex64 {
        let mm = self.truncation();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let s = (i as i32 - mm) as f64 + self.alpha;
                c * Complex64::new(0.0, s).powu(p) * Complex64::from_polar(1.0, s * x)
            })
            .sum()
    }

    pub fn conj(&self) -> Self {
        // conj(Σ c_m e^{i(m+α)x}) = Σ conj(c_{−m}) e^{i(m−α)x}
        Self {
            alpha: -self.alpha,
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        }
    }
}

/// Eigenpairs sorted by branch label `m` (`v_m ≈ e^{i(m+α1)x1}`).
#[derive(Debug, Clone)]
pub struct SLSpectrum {
    pub problem: SLProblem,
    pub normalization: Normalization,
    pub eigenvalues: Vec<Complex64>,
    pub eigenfunctions: Vec<QpFunction>,
    pub labels: Vec<i32>,
    pub residuals: Vec<f64>,
    pub matrix_norm: f64,
}

impl SLSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn index_of_label(&self, m: i32) -> Option<usize> {
        self.labels.iter().position(|&l| l == m)
    }

    /// `(sign, n)` with `m = ±n`.
    pub fn branch(&self, idx: usize) -> (char, u32) {
        let m = self.labels[idx];
        (if m < 0 { '-' } else { '+' }, m.unsigned_abs())
    }

    pub fn entry(&self, m: i32) -> Option<(Complex64, &QpFunction)> {
        self.index_of_label(m)
            .map(|i| (self.eigenvalues[i], &self.eigenfunctions[i]))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), SturmError> {
        writeln!(out, "index,branch,re_lambda,im_lambda,residual")?;
        for i in 0..self.len() {
            let (s, n) = self.branch(i);
            writeln!(
                out,
                "{},{}{},{:.16e},{:.16e},{:.16e}",
                self.labels[i],
                s,
                n,
                self.eigenvalues[i].re,
                self.eigenvalues[i].im,
                self.residuals[i]
            )?;
        }
        Ok(())
    }
}

pub fn solve_sl(problem: &SLProblem) -> Result<SLSpectrum, SturmError> {
    solve_sl_with(problem, Normalization::UnitValueAtOrigin)
}

pub fn solve_sl_with(
    problem: &SLProblem,
    normalization: Normalization,
) -> Result<SLSpectrum, SturmError> {
    let a = problem.matrix();
    let n = problem.size();
    let mm = problem.truncation as i32;
    let (values, vectors) =
        linalg::eigen(&a).map_err(|e| SturmError::EigenFailure(e.to_string()))?;
    let a_norm = linalg::norm_fro(&a);
    let labels = assign_labels(problem, &values, &vectors);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| labels[i]);
    let mut out = SLSpectrum {
        problem: problem.clone(),
        normalization,
        eigenvalues: Vec::with_capacity(n),
        eigenfunctions: Vec::with_capacity(n),
        labels: Vec::with_capacity(n),
        residuals: Vec::with_capacity(n),
        matrix_norm: a_norm,
    };
    for i in order {
        let mut c = linalg::column_to_vec(&vectors, i);
        let lam = values[i];
        let av = linalg::matvec(&a, &c);
        let vn = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let res = av
            .iter()
            .zip(&c)
            .map(|(x, y)| (x - lam * y).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / (a_norm * vn);
        if res > RESIDUAL_LIMIT {
            return Err(SturmError::ResidualTooLarge { residual: res });
        }
        let scale = match normalization {
            Normalization::UnitValueAtOrigin => {
                let v0: Complex64 = c.iter().sum();
                if v0.norm() < 1e-10 {
                    return Err(SturmError::NormalizationDegenerate {
                        label: labels[i],
                        value: v0.norm(),
                    });
                }
                1.0 / v0
            }
            Normalization::UnitL2 => {
                // fix the phase by making the dominant coefficient real positive
                let dom = c[(labels[i] + mm) as usize];
                let ph = if dom.norm() > 0.0 {
                    dom.conj() / dom.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                };
                ph / vn
            }
        };
        for x in c.iter_mut() {
            *x *= scale;
        }
        out.eigenvalues.push(lam);
        out.eigenfunctions.push(QpFunction {
            alpha: problem.alpha1,
            coeffs: c,
        });
        out.labels.push(labels[i]);
        out.residuals.push(res);
    }
    Ok(out)
}

/// Greedy one-to-one matching of eigenpairs to anchors `k²q̄ − (m+α1)²`:
/// smallest distance first, ties decided by the overlap `|c_m|`.
fn assign_labels(problem: &SLProblem, values: &[Complex64], vectors: &CMat) -> Vec<i32> {
    let n = values.len();
    let mm = problem.truncation as i32;
    let anchors: Vec<Complex64> = (-mm..=mm).map(|m| problem.anchor(m)).collect();
    let scale = anchors.iter().map(|a| a.norm()).fold(1.0, f64::max);
    let tie = 1e-9 * scale;
    let mut cand = Vec::with_capacity(n * n);
    for (i, lam) in values.iter().enumerate() {
        for (j, a) in anchors.iter().enumerate() {
            let d = (lam - a).norm();
            let bucket = (d / tie).floor();
            cand.push((bucket, -vectors[(j, i)].norm(), i, j));
        }
    }
    cand.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.cmp(&y.2))
            .then(x.3.cmp(&y.3))
    });
    let mut label = vec![None; n];
    let mut used = vec![false; n];
    for (_, _, i, j) in cand {
        if label[i].is_none() && !used[j] {
            label[i] = Some(j as i32 - mm);
            used[j] = true;
        }
    }
    label
        .into_iter()
        .map(|l| l.expect("every eigenpair receives a label"))
        .collect()
}

/// Which shift `s` makes `−λ ≈ (m+s)² − k²q̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftConvention {
    /// `s = α1`, forced by the quasi-period factor.
    Alpha1,
    /// `s = α1/2π`.
    Alpha1Over2Pi,
    /// Both shifts coincide (`α1 = 0`).
    Indistinguishable,
}

#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    pub shift_convention: ShiftConvention,
    pub shift: f64,
    /// Fitted constant `C` in `−λ ≈ (m+s)² − C`, averaged over the upper half of the range.
    pub mean_term: Complex64,
    /// `(k²/2π)∫q = k²q̄`.
    pub expected_mean_term: Complex64,
    /// Exponent `p` of `max_± |−λ_{±n} − (±n+s)² + k²q̄| ~ n^{−p}`; `None` when the remainder vanishes.
    pub decay_exponent: Option<f64>,
    /// Same for `‖v_{±n} − e^{i(±n+s)x}‖_∞`.
    pub eigenfunction_exponent: Option<f64>,
    /// `(n, remainder, eigenfunction deviation)` for the fitted shift.
    pub samples: Vec<(u32, f64, f64)>,
    /// Largest remainder over the fit range for `s = α1` and `s = α1/2π`.
    pub max_remainder: [f64; 2],
    /// The fit is made against `−λ`: the ODE as written gives `λ ≈ k²q̄ − (m+α1)²`.
    pub sign_flipped: bool,
}

/// Least-squares slope of `log y` against `log n`, negated.
pub fn decay_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > 1e-13)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

fn sup_deviation(v: &QpFunction, m: i32, s: f64, grid: usize) -> f64 {
    (0..grid)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / grid as f64;
            (v.eval(x) - Complex64::from_polar(1.0, (m as f64 + s) * x)).norm()
        })
        .fold(0.0, f64::max)
}

/// Fits the eigenvalue asymptotics over `n = n_min ..= n_max`; `tol` bounds
/// the admissible remainder for a shift hypothesis.
pub fn check_asymptotics(
    spectrum: &SLSpectrum,
    problem: &SLProblem,
    n_min: u32,
    n_max: u32,
    tol: f64,
) -> Result<AsymptoticReport, SturmError> {
    let ns: Vec<u32> = (n_min..=n_max)
        .filter(|&n| {
            spectrum.index_of_label(n as i32).is_some()
                && spectrum.index_of_label(-(n as i32)).is_some()
        })
        .collect();
    if ns.len() < 8 {
        return Err(SturmError::TooFewBranches(ns.len()));
    }
    let k2q = problem.k * problem.k * problem.q.mean();
    let shifts = [problem.alpha1, problem.alpha1 / (2.0 * PI)];
    let remainder = |s: f64, m: i32| -> Complex64 {
        let lam = spectrum.eigenvalues[spectrum.index_of_label(m).expect("label present")];
        let t = m as f64 + s;
        -lam - (t * t - k2q)
    };
    let mut max_remainder = [0.0; 2];
    for (h, &s) in shifts.iter().enumerate() {
        for &n in &ns {
            for m in [n as i32, -(n as i32)] {
                max_remainder[h] = f64::max(max_remainder[h], remainder(s, m).norm());
            }
        }
    }
    let (convention, shift) = if (shifts[0] - shifts[1]).abs() < 1e-15 {
        (ShiftConvention::Indistinguishable, shifts[0])
    } else if max_remainder[0] <= tol && max_remainder[0] <= max_remainder[1] {
        (ShiftConvention::Alpha1, shifts[0])
    } else if max_remainder[1] <= tol {
        (ShiftConvention::Alpha1Over2Pi, shifts[1])
    } else {
        return Err(SturmError::FitInconclusive {
            tol,
            r_alpha: max_remainder[0],
            r_scaled: max_remainder[1],
        });
    };
    let grid = 8 * problem.size();
    let mut samples = Vec::with_capacity(ns.len());
    for &n in &ns {
        let mut r: f64 = 0.0;
        let mut dev: f64 = 0.0;
        for m in [n as i32, -(n as i32)] {
            r = r.max(remainder(shift, m).norm());
            let v = &spectrum.eigenfunctions[spectrum.index_of_label(m).expect("label present")];
            dev = dev.max(sup_deviation(v, m, shift, grid));
        }
        samples.push((n, r, dev));
    }
    let upper: Vec<&u32> = ns.iter().filter(|&&n| 2 * n >= n_min + n_max).collect();
    let mut mean_term = Complex64::new(0.0, 0.0);
    for &&n in &upper {
        for m in [n as i32, -(n as i32)] {
            let lam = spectrum.eigenvalues[spectrum.index_of_label(m).expect("label present")];
            let t = m as f64 + shift;
            mean_term += t * t + lam;
        }
    }
    mean_term /= (2 * upper.len()) as f64;
    let decay = decay_exponent(
        &samples
            .iter()
            .map(|s| (s.0 as f64, s.1))
            .collect::<Vec<_>>(),
    );
    let efun = decay_exponent(
        &samples
            .iter()
            .map(|s| (s.0 as f64, s.2))
            .collect::<Vec<_>>(),
    );
    Ok(AsymptoticReport {
        shift_convention: convention,
        shift,
        mean_term,
        expected_mean_term: k2q,
        decay_exponent: decay,
        eigenfunction_exponent: efun,
        samples,
        max_remainder,
        sign_flipped: true,
    })
}
