//! Separable fields `E = (0, 0, v(x1) u(x2))` built from a Sturm–Liouville
//! eigenpair and an exponential transverse factor.
//!
//! With `v'' + k²q v = λ v` the field solves `curl curl E − k²qE = 0` exactly
//! when `u'' = μ u` with `μ = −λ`. For the eigenvalues of interest `μ` is
//! large and positive, so `u` and the overlap integrals grow like `e^{2π√μ}`;
//! coefficients are therefore kept as logarithms.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::forward::{Axis, MediumProfile};
use crate::quadrature::periodic_nodes;
use crate::sturm::{QpFunction, SLSpectrum};
use crate::trig::TrigPoly;

#[derive(Debug, Error)]
pub enum SeparableError {
    #[error("the transverse equation needs mu != 0")]
    ZeroLambda,
    #[error("quasimomentum resonance: |e^(2 pi i alpha2) - e^(2 pi sqrt(mu))| = {magnitude:.3e}")]
    DegenerateDenominator { magnitude: f64 },
    #[error("transverse factor built for mu = {got}, eigenvalue requires mu = {expected}")]
    LambdaMismatch { expected: Complex64, got: Complex64 },
    #[error("spectrum has no branch labelled {0}")]
    MissingBranch(i32),
    #[error("profile does not match the spectrum: {0}")]
    ProfileMismatch(String),
}

/// A complex number stored as its logarithm, `z = e^{ln}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub ln: Complex64,
}

impl LogComplex {
    pub fn from_complex(z: Complex64) -> Self {
        Self { ln: z.ln() }
    }

    pub fn ln_abs(&self) -> f64 {
        self.ln.re
    }

    /// The plain value; overflows to infinity past `e^{709}`.
    pub fn value(&self) -> Complex64 {
        self.ln.exp()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            ln: self.ln + other.ln,
        }
    }

    pub fn conj(&self) -> Self {
        Self { ln: self.ln.conj() }
    }
}

/// `ln Σ e^{t_i}` without overflow.
fn log_sum(terms: &[Complex64]) -> Complex64 {
    let top = terms.iter().map(|t| t.re).fold(f64::NEG_INFINITY, f64::max);
    let s: Complex64 = terms.iter().map(|t| (t - top).exp()).sum();
    s.ln() + top
}

/// `ln ∫₀^{2π} e^{κx} dx`.
fn ln_exp_integral(kappa: Complex64) -> Complex64 {
    if kappa.norm() < 1e-12 {
        return Complex64::new((2.0 * PI).ln(), 0.0);
    }
    if kappa.re > 0.0 {
        2.0 * PI * kappa + (1.0 - (-2.0 * PI * kappa).exp()).ln() - kappa.ln()
    } else {
        (((2.0 * PI * kappa).exp() - 1.0) / kappa).ln()
    }
}

/// `u(x2) = c1 e^{√μ x2} + c2 e^{−√μ x2}` with `u(x2 + 2π) = e^{2πiα2} u(x2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseFactor {
    pub mu: Complex64,
    /// Principal root, `Re ≥ 0`.
    pub sqrt_mu: Complex64,
    pub ln_c1: Complex64,
    pub ln_c2: Complex64,
    pub alpha2: f64,
}

/// Builds `u` for `u'' = μu` from `c2`; `c1` follows from the quasi-period condition.
pub fn build_u(
    mu: Complex64,
    alpha2: f64,
    c2: Complex64,
) -> Result<TransverseFactor, SeparableError> {
    build_u_log(mu, alpha2, c2.ln())
}

/// [`build_u`] with `c2` given by its logarithm.
pub fn build_u_log(
    mu: Complex64,
    alpha2: f64,
    ln_c2: Complex64,
) -> Result<TransverseFactor, SeparableError> {
    if mu.norm() < 1e-14 {
        return Err(SeparableError::ZeroLambda);
    }
    let s = mu.sqrt();
    let e = (-2.0 * PI * s).exp();
    let w = Complex64::from_polar(1.0, 2.0 * PI * alpha2);
    // c1/c2 = (e^{−2πs} − w)/(w − e^{2πs}) = e^{−2πs}(e^{−2πs} − w)/(w e^{−2πs} − 1)
    let den = w * e - 1.0;
    if den.norm() <= 1e-12 * e.norm() {
        return Err(SeparableError::DegenerateDenominator {
            magnitude: den.norm() / e.norm(),
        });
    }
    let ln_ratio = -2.0 * PI * s + ((e - w) / den).ln();
    Ok(TransverseFactor {
        mu,
        sqrt_mu: s,
        ln_c1: ln_c2 + ln_ratio,
        ln_c2,
        alpha2,
    })
}

impl TransverseFactor {
    /// Growth preset `c2 = e^{2π√μ}`.
    pub fn growth_preset(mu: Complex64, alpha2: f64) -> Result<Self, SeparableError> {
        build_u_log(mu, alpha2, 2.0 * PI * mu.sqrt())
    }

    pub fn c1(&self) -> Complex64 {
        self.ln_c1.exp()
    }

    pub fn c2(&self) -> Complex64 {
        self.ln_c2.exp()
    }

    /// `p`-th derivative of `u` at `x`.
    pub fn eval_derivative(&self, x: f64, p: u32) -> Complex64 {
        let s = self.sqrt_mu;
        s.powu(p) * (self.ln_c1 + s * x).exp() + (-s).powu(p) * (self.ln_c2 - s * x).exp()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_derivative(x, 0)
    }

    /// `|u(2π) − e^{2πiα2} u(0)| / max(|u(2π)|, |u(0)|)`.
    pub fn quasi_periodicity_defect(&self) -> f64 {
        let a = self.eval(2.0 * PI);
        let b = self.eval(0.0);
        let w = Complex64::from_polar(1.0, 2.0 * PI * self.alpha2);
        (a - w * b).norm() / a.norm().max(b.norm())
    }

    /// Relative defect of the coefficient relation `c1 (w − e^{2π√μ}) − c2 (e^{−2π√μ} − w)`.
    pub fn relation_defect(&self) -> f64 {
        let w = Complex64::from_polar(1.0, 2.0 * PI * self.alpha2);
        let s = self.sqrt_mu;
        let lhs = log_sum(&[
            self.ln_c1 + w.ln(),
            self.ln_c1 + 2.0 * PI * s + Complex64::new(0.0, PI),
        ]);
        let rhs = log_sum(&[
            self.ln_c2 - 2.0 * PI * s,
            self.ln_c2 + w.ln() + Complex64::new(0.0, PI),
        ]);
        let scale = lhs.re.max(rhs.re);
        ((lhs - scale).exp() - (rhs - scale).exp()).norm()
    }
}

/// `E = (0, 0, v(x1) u(x2))`.
#[derive(Debug, Clone)]
pub struct SeparableSolution {
    pub lambda: Complex64,
    pub v: QpFunction,
    pub u: TransverseFactor,
    pub q: TrigPoly,
    pub k: f64,
}

pub fn build_separable(
    spectrum: &SLSpectrum,
    label: i32,
    u: &TransverseFactor,
    profile: &MediumProfile,
) -> Result<SeparableSolution, SeparableError> {
    let (lambda, v) = spectrum
        .entry(label)
        .ok_or(SeparableError::MissingBranch(label))?;
    if profile.axis() != Axis::X1 && profile.degree() > 0 {
        return Err(SeparableError::ProfileMismatch(
            "profile must vary in x1".into(),
        ));
    }
    let q = &spectrum.problem.q;
    if profile
        .slabs()
        .iter()
        .any(|s| s.q.sub(q).max_abs_coeff() > 1e-14 * (1.0 + q.max_abs_coeff()))
    {
        return Err(SeparableError::ProfileMismatch(
            "slab index differs from the spectrum's q".into(),
        ));
    }
    let expected = -lambda;
    if (u.mu - expected).norm() > 1e-12 * expected.norm().max(1.0) {
        return Err(SeparableError::LambdaMismatch {
            expected,
            got: u.mu,
        });
    }
    Ok(SeparableSolution {
        lambda,
        v: v.clone(),
        u: *u,
        q: q.clone(),
        k: spectrum.problem.k,
    })
}

impl SeparableSolution {
    pub fn e3(&self, x: [f64; 3]) -> Complex64 {
        self.v.eval(x[0]) * self.u.eval(x[1])
    }

    pub fn eval(&self, x: [f64; 3]) -> [Complex64; 3] {
        let z = Complex64::new(0.0, 0.0);
        [z, z, self.e3(x)]
    }

    /// `|curl curl E − k²qE| / (|v''u| + |vu''| + |k²qvu|)` at `x`; since
    /// `div E = 0`, `curl curl E = −ΔE`.
    pub fn residual(&self, x: [f64; 3]) -> f64 {
        let (v0, v2) = (self.v.eval(x[0]), self.v.eval_derivative(x[0], 2));
        let (u0, u2) = (self.u.eval(x[1]), self.u.eval_derivative(x[1], 2));
        let kq = self.k * self.k * self.q.eval(x[0]);
        let terms = [v2 * u0, v0 * u2, kq * v0 * u0];
        let r: Complex64 = -(terms[0] + terms[1]) - terms[2];
        r.norm() / terms.iter().map(|t| t.norm()).sum::<f64>()
    }

    /// `ν × E` on the plate: identically zero for a purely normal field.
    pub fn plate_trace(&self, x1: f64, x2: f64) -> [Complex64; 3] {
        let e = self.eval([x1, x2, 0.0]);
        crate::vec3::e3_cross(&e)
    }
}

/// Overlap integrals `A1 = ∫ v_n conj(v_m) (q1 − q2) dx1` and
/// `A2 = ∫ u_n conj(u_m) dx2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentKernels {
    pub a1: Complex64,
    pub a2: LogComplex,
}

/// Trapezoid points for `A1`: exact for the trig-polynomial integrand.
pub fn a1_grid(spec1: &SLSpectrum, spec2: &SLSpectrum, q_diff: &TrigPoly) -> usize {
    spec1.problem.truncation + spec2.problem.truncation + q_diff.degree() + 1
}

/// `q1 − q2` from a `q1`-spectrum and a `conj(q2)`-spectrum.
pub fn q_difference(spec1: &SLSpectrum, spec2: &SLSpectrum) -> TrigPoly {
    spec1.problem.q.sub(&spec2.problem.q.conj())
}

pub fn a1_trapezoid(vn: &QpFunction, vm: &QpFunction, q_diff: &TrigPoly, grid: usize) -> Complex64 {
    let xs = periodic_nodes(grid);
    let h = 2.0 * PI / grid as f64;
    xs.iter()
        .map(|&x| vn.eval(x) * vm.eval(x).conj() * q_diff.eval(x))
        .sum::<Complex64>()
        * h
}

/// `∫₀^{2π} u_n conj(u_m) dx2` as a sum of four exponential integrals.
pub fn a2_closed_form(un: &TransverseFactor, um: &TransverseFactor) -> LogComplex {
    let (sn, sm) = (un.sqrt_mu, um.sqrt_mu.conj());
    let (c1m, c2m) = (um.ln_c1.conj(), um.ln_c2.conj());
    let terms = [
        un.ln_c1 + c1m + ln_exp_integral(sn + sm),
        un.ln_c1 + c2m + ln_exp_integral(sn - sm),
        un.ln_c2 + c1m + ln_exp_integral(-sn + sm),
        un.ln_c2 + c2m + ln_exp_integral(-sn - sm),
    ];
    LogComplex {
        ln: log_sum(&terms),
    }
}

/// `A1` and `A2` for the pair `(n, m)`: `n` from the `q1` spectrum, `m` from the
/// `conj(q2)` spectrum.
pub fn moment_kernels(
    spec1: &SLSpectrum,
    n: i32,
    spec2: &SLSpectrum,
    m: i32,
    un: &TransverseFactor,
    um: &TransverseFactor,
) -> Result<MomentKernels, SeparableError> {
    let (_, vn) = spec1.entry(n).ok_or(SeparableError::MissingBranch(n))?;
    let (_, vm) = spec2.entry(m).ok_or(SeparableError::MissingBranch(m))?;
    let dq = q_difference(spec1, spec2);
    let a1 = if dq.is_zero() {
        Complex64::new(0.0, 0.0)
    } else {
        a1_trapezoid(vn, vm, &dq, a1_grid(spec1, spec2, &dq))
    };
    Ok(MomentKernels {
        a1,
        a2: a2_closed_form(un, um),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use crate::sturm::{solve_sl, SLProblem};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_mu_relation() {
        let u = build_u(c(1.0, 0.0), 0.0, c(1.0, 0.0)).unwrap();
        let e = (2.0 * PI).exp();
        let expect = ((-2.0 * PI).exp() - 1.0) / (1.0 - e);
        assert!((u.c1() - expect).norm() < 1e-14);
        assert!(u.quasi_periodicity_defect() < 1e-12);
    }

    #[test]
    fn ode_holds_pointwise() {
        let u = build_u(c(3.2, 0.7), 0.31, c(0.4, -1.0)).unwrap();
        for j in 0..20 {
            let x = 0.33 * j as f64;
            let r = u.eval_derivative(x, 2) - u.mu * u.eval(x);
            assert!(r.norm() <= 1e-12 * (u.mu * u.eval(x)).norm().max(1.0));
        }
        assert!(u.relation_defect() < 1e-12);
    }

    #[test]
    fn root_sign_swap_exchanges_coefficients() {
        // Using −√μ turns the relation into its mirror: c2/c1 follows the same formula.
        let mu = c(2.0, 0.5);
        let u = build_u(mu, 0.2, c(1.0, 0.0)).unwrap();
        let s = -u.sqrt_mu;
        let w = Complex64::from_polar(1.0, 2.0 * PI * 0.2);
        let ratio = ((-2.0 * PI * s).exp() - w) / (w - (2.0 * PI * s).exp());
        assert!((u.c2() / u.c1() - ratio).norm() < 1e-10 * ratio.norm());
    }

    #[test]
    fn zero_and_resonant_mu_are_rejected() {
        assert!(matches!(
            build_u(c(0.0, 0.0), 0.0, c(1.0, 0.0)),
            Err(SeparableError::ZeroLambda)
        ));
        // √μ = i α2 makes e^{2π√μ} = e^{2πiα2}
        let mu = c(-0.25 * 0.25, 0.0);
        assert!(matches!(
            build_u(mu, 0.25, c(1.0, 0.0)),
            Err(SeparableError::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn a2_matches_quadrature() {
        let un = build_u(c(5.3, 0.2), 0.15, c(0.7, 0.1)).unwrap();
        let um = build_u(c(4.1, -0.3), 0.15, c(-0.2, 0.9)).unwrap();
        let closed = a2_closed_form(&un, &um).value();
        let mut quad = c(0.0, 0.0);
        for p in 0..64 {
            let lo = 2.0 * PI * p as f64 / 64.0;
            for (x, w) in gauss_legendre(20, lo, lo + 2.0 * PI / 64.0) {
                quad += w * un.eval(x) * um.eval(x).conj();
            }
        }
        assert!((closed - quad).norm() <= 1e-10 * quad.norm());
    }

    #[test]
    fn constant_profile_a1_is_two_pi() {
        let q1 = TrigPoly::constant(c(2.0, 0.0));
        let p1 = SLProblem::new(q1, 1.0, 0.2, 8).unwrap();
        // conj(q2) = 2 − e^{ix}, i.e. q2 = 2 − e^{−ix} and q1 − q2 = e^{−ix}
        let q2c = TrigPoly::constant(c(2.0, 0.0));
        let p2 = SLProblem::new(q2c, 1.0, 0.2, 8).unwrap();
        let s1 = solve_sl(&p1).unwrap();
        let s2 = solve_sl(&p2).unwrap();
        let dq = TrigPoly::from_terms(&[(-1, c(1.0, 0.0))]);
        let (_, vn) = s1.entry(3).unwrap();
        let (_, vm) = s2.entry(2).unwrap();
        let a1 = a1_trapezoid(vn, vm, &dq, 40);
        assert!((a1 - c(2.0 * PI, 0.0)).norm() < 1e-12);
    }
}
