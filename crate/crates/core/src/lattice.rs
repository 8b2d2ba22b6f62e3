//! Floquet mode bookkeeping on the `2π × 2π` cell.
//!
//! Modes are indexed by `n = (n1, n2)` with the square truncation
//! `|n1|, |n2| ≤ N`. Storage order is `n1` fastest, so every fixed `n2`
//! occupies a contiguous block of `2N + 1` entries; the layer solver relies on
//! this to decouple media that vary in `x1` only.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("Wood anomaly at mode ({n1}, {n2}): |β_n| = {beta_abs:.3e} is within the tolerance {wood_tol:.3e}")]
    WoodAnomaly {
        n1: i32,
        n2: i32,
        beta_abs: f64,
        wood_tol: f64,
    },
    #[error("grid of {grid} points per direction is below the alias-free bound {required}")]
    GridTooCoarse { grid: usize, required: usize },
    #[error("sample count {got} does not match the {g1}x{g2} grid")]
    SampleCount { got: usize, g1: usize, g2: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Tangential wavevector `α = (α1, α2)` of the quasi-periodic family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quasimomentum {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl Quasimomentum {
    pub fn new(alpha1: f64, alpha2: f64) -> Self {
        Self { alpha1, alpha2 }
    }

    /// Tangential part of `k·d` with `d = (cosθ1 cosθ2, cosθ1 sinθ2, −sinθ1)`.
    pub fn from_angles(k: f64, theta1: f64, theta2: f64) -> Self {
        Self {
            alpha1: k * theta1.cos() * theta2.cos(),
            alpha2: k * theta1.cos() * theta2.sin(),
        }
    }

    pub fn swapped(self) -> Self {
        Self {
            alpha1: self.alpha2,
            alpha2: self.alpha1,
        }
    }

    pub fn norm_sqr(self) -> f64 {
        self.alpha1 * self.alpha1 + self.alpha2 * self.alpha2
    }
}

/// `β = √(k² − |α|²)` on the principal branch: real and positive below the
/// light line, `i√(|α|² − k²)` above it.
pub fn principal_beta(k: f64, alpha_sqr: f64) -> Complex64 {
    let s = k * k - alpha_sqr;
    if s > 0.0 {
        Complex64::new(s.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-s).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub n: (i32, i32),
    /// `α_n = (α1 + n1, α2 + n2, 0)`.
    pub alpha: [f64; 3],
    pub beta: Complex64,
    pub propagating: bool,
}

impl Mode {
    pub fn alpha_sqr(&self) -> f64 {
        self.alpha[0] * self.alpha[0] + self.alpha[1] * self.alpha[1]
    }
}

/// Truncated set of Floquet modes for a given wavenumber and quasimomentum.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    order: usize,
    k: f64,
    alpha: Quasimomentum,
    wood_tol: f64,
    modes: Vec<Mode>,
}

/// Default Wood-anomaly guard, `1e-8·k`.
pub fn default_wood_tol(k: f64) -> f64 {
    1e-8 * k
}

pub fn build_modeset(
    k: f64,
    alpha: Quasimomentum,
    order: usize,
    wood_tol: f64,
) -> Result<ModeSet, LatticeError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(LatticeError::InvalidParameter(format!(
            "wavenumber k must be positive, got {k}"
        )));
    }
    if wood_tol.is_nan() || wood_tol <= 0.0 {
        return Err(LatticeError::InvalidParameter(format!(
            "wood_tol must be positive, got {wood_tol}"
        )));
    }
    if !(alpha.alpha1.is_finite() && alpha.alpha2.is_finite()) {
        return Err(LatticeError::InvalidParameter(
            "quasimomentum must be finite".into(),
        ));
    }
    let n = order as i32;
    let mut modes = Vec::with_capacity((2 * order + 1).pow(2));
    for n2 in -n..=n {
        for n1 in -n..=n {
            let a1 = alpha.alpha1 + n1 as f64;
            let a2 = alpha.alpha2 + n2 as f64;
            let alpha_sqr = a1 * a1 + a2 * a2;
            let beta = principal_beta(k, alpha_sqr);
            if beta.norm() <= wood_tol {
                return Err(LatticeError::WoodAnomaly {
                    n1,
                    n2,
                    beta_abs: beta.norm(),
                    wood_tol,
                });
            }
            modes.push(Mode {
                n: (n1, n2),
                alpha: [a1, a2, 0.0],
                beta,
                propagating: alpha_sqr < k * k,
            });
        }
    }
    Ok(ModeSet {
        order,
        k,
        alpha,
        wood_tol,
        modes,
    })
}

impl ModeSet {
    /// Mode set with the default Wood tolerance.
    pub fn new(k: f64, alpha: Quasimomentum, order: usize) -> Result<Self, LatticeError> {
        build_modeset(k, alpha, order, default_wood_tol(k))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn alpha(&self) -> Quasimomentum {
        self.alpha
    }

    pub fn wood_tol(&self) -> f64 {
        self.wood_tol
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Number of modes sharing one `n2`.
    pub fn block_len(&self) -> usize {
        2 * self.order + 1
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode(&self, idx: usize) -> &Mode {
        &self.modes[idx]
    }

    pub fn index_of(&self, n1: i32, n2: i32) -> Option<usize> {
        let n = self.order as i32;
        if n1.abs() > n || n2.abs() > n {
            return None;
        }
        Some(((n2 + n) as usize) * self.block_len() + (n1 + n) as usize)
    }

    pub fn propagating(&self) -> impl Iterator<Item = (usize, &Mode)> {
        self.modes.iter().enumerate().filter(|(_, m)| m.propagating)
    }

    /// Same wavenumber and quasimomentum with a different truncation.
    pub fn with_order(&self, order: usize) -> Result<Self, LatticeError> {
        build_modeset(self.k, self.alpha, order, self.wood_tol)
    }

    /// Stable fingerprint of the parameters defining the set.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.order.hash(&mut h);
        self.k.to_bits().hash(&mut h);
        self.alpha.alpha1.to_bits().hash(&mut h);
        self.alpha.alpha2.to_bits().hash(&mut h);
        self.wood_tol.to_bits().hash(&mut h);
        h.finish()
    }
}

/// Fourier coefficients of a `2π`-biperiodic function, `f = Σ c_n e^{i n·x}`,
/// over the square truncation of order `N` (same storage order as [`ModeSet`]).
#[derive(Debug, Clone, PartialEq)]
pub struct CellFunction {
    order: usize,
    coeffs: Vec<Complex64>,
}

impl CellFunction {
    pub fn new(order: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(
            coeffs.len(),
            (2 * order + 1).pow(2),
            "coefficient count does not match order"
        );
        Self { order, coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        Self::new(
            order,
            vec![Complex64::new(0.0, 0.0); (2 * order + 1).pow(2)],
        )
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n1: i32, n2: i32) -> Complex64 {
        let n = self.order as i32;
        if n1.abs() > n || n2.abs() > n {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[((n2 + n) as usize) * (2 * self.order + 1) + (n1 + n) as usize]
    }

    pub fn set_coeff(&mut self, n1: i32, n2: i32, value: Complex64) {
        let n = self.order as i32;
        assert!(n1.abs() <= n && n2.abs() <= n, "mode outside truncation");
        self.coeffs[((n2 + n) as usize) * (2 * self.order + 1) + (n1 + n) as usize] = value;
    }

    /// `Σ |c_n|²`, equal to the cell mean of `|f|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn synthesize(&self, points: &[(f64, f64)]) -> Vec<Complex64> {
        let n = self.order as i32;
        points
            .iter()
            .map(|&(x1, x2)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for n2 in -n..=n {
                    let row = Complex64::from_polar(1.0, n2 as f64 * x2);
                    for n1 in -n..=n {
                        acc +=
                            self.coeff(n1, n2) * row * Complex64::from_polar(1.0, n1 as f64 * x1);
                    }
                }
                acc
            })
            .collect()
    }

    /// Values on the uniform `g1 × g2` grid, row-major with `x1` fastest.
    pub fn synthesize_grid(&self, g1: usize, g2: usize) -> Vec<Complex64> {
        synthesize_grid(self.order, &self.coeffs, g1, g2)
    }
}

/// Samples `f(2πj1/g1, 2πj2/g2)` stored at `j2·g1 + j1` → Fourier coefficients
/// of order `N`. Exact for trigonometric polynomials of degree `≤ N` when
/// `g ≥ 2N + 1` in both directions.
pub fn analyze(
    samples: &[Complex64],
    g1: usize,
    g2: usize,
    order: usize,
) -> Result<CellFunction, LatticeError> {
    let required = 2 * order + 1;
    if g1 < required || g2 < required {
        return Err(LatticeError::GridTooCoarse {
            grid: g1.min(g2),
            required,
        });
    }
    if samples.len() != g1 * g2 {
        return Err(LatticeError::SampleCount {
            got: samples.len(),
            g1,
            g2,
        });
    }
    Ok(CellFunction::new(
        order,
        analyze_grid(samples, g1, g2, order),
    ))
}

fn twiddles(order: usize, count: usize, sign: f64) -> Vec<Complex64> {
    // row n (from -N), column j
    let n = order as i32;
    let mut t = Vec::with_capacity((2 * order + 1) * count);
    for m in -n..=n {
        for j in 0..count {
            let phase = sign * 2.0 * PI * ((m as i64 * j as i64).rem_euclid(count as i64)) as f64
                / count as f64;
            t.push(Complex64::from_polar(1.0, phase));
        }
    }
    t
}

/// Separable inverse DFT of order-`N` coefficients onto a `g1 × g2` grid.
pub fn synthesize_grid(order: usize, coeffs: &[Complex64], g1: usize, g2: usize) -> Vec<Complex64> {
    let b = 2 * order + 1;
    debug_assert_eq!(coeffs.len(), b * b);
    let t1 = twiddles(order, g1, 1.0);
    let t2 = twiddles(order, g2, 1.0);
    let mut rows = vec![Complex64::new(0.0, 0.0); b * g1];
    for m2 in 0..b {
        let src = &coeffs[m2 * b..(m2 + 1) * b];
        let dst = &mut rows[m2 * g1..(m2 + 1) * g1];
        for (m1, c) in src.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let tw = &t1[m1 * g1..(m1 + 1) * g1];
            for (d, w) in dst.iter_mut().zip(tw) {
                *d += c * w;
            }
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); g1 * g2];
    for m2 in 0..b {
        let row = &rows[m2 * g1..(m2 + 1) * g1];
        let tw = &t2[m2 * g2..(m2 + 1) * g2];
        for (j2, w) in tw.iter().enumerate() {
            let dst = &mut out[j2 * g1..(j2 + 1) * g1];
            for (d, r) in dst.iter_mut().zip(row) {
                *d += r * w;
            }
        }
    }
    out
}

/// Separable forward DFT, the adjoint of [`synthesize_grid`] scaled by `1/(g1 g2)`.
pub fn analyze_grid(samples: &[Complex64], g1: usize, g2: usize, order: usize) -> Vec<Complex64> {
    let b = 2 * order + 1;
    let t1 = twiddles(order, g1, -1.0);
    let t2 = twiddles(order, g2, -1.0);
    // contract x2 first
    let mut partial = vec![Complex64::new(0.0, 0.0); b * g1];
    for m2 in 0..b {
        let tw = &t2[m2 * g2..(m2 + 1) * g2];
        let dst = &mut partial[m2 * g1..(m2 + 1) * g1];
        for (j2, w) in tw.iter().enumerate() {
            let row = &samples[j2 * g1..(j2 + 1) * g1];
            for (d, s) in dst.iter_mut().zip(row) {
                *d += s * w;
            }
        }
    }
    let scale = 1.0 / (g1 * g2) as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); b * b];
    for m2 in 0..b {
        let row = &partial[m2 * g1..(m2 + 1) * g1];
        for m1 in 0..b {
            let tw = &t1[m1 * g1..(m1 + 1) * g1];
            let s: Complex64 = row.iter().zip(tw).map(|(r, w)| r * w).sum();
            out[m2 * b + m1] = s * scale;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_incidence_zero_mode_propagates() {
        let ms = build_modeset(1.0, Quasimomentum::new(0.0, 0.0), 0, 1e-8).unwrap();
        let m = ms.mode(0);
        assert_eq!(m.beta, Complex64::new(1.0, 0.0));
        assert!(m.propagating);
    }

    #[test]
    fn evanescent_branch() {
        let ms = build_modeset(1.0, Quasimomentum::new(0.3, 0.0), 1, 1e-8).unwrap();
        let m = ms.mode(ms.index_of(1, 0).unwrap());
        assert!((m.alpha_sqr() - 1.69).abs() < 1e-15);
        assert!((m.beta - Complex64::new(0.0, 0.69f64.sqrt())).norm() < 1e-15);
        assert!(!m.propagating);
    }

    #[test]
    fn wood_anomaly_is_reported() {
        let err = build_modeset(1.0, Quasimomentum::new(0.0, 0.0), 1, 1e-8).unwrap_err();
        assert!(matches!(err, LatticeError::WoodAnomaly { .. }));
    }

    #[test]
    fn constant_and_single_exponential_analysis() {
        let g = 9;
        let ones = vec![Complex64::new(1.0, 0.0); g * g];
        let c = analyze(&ones, g, g, 2).unwrap();
        assert!((c.coeff(0, 0) - 1.0).norm() < 1e-15);
        assert!(c
            .coeffs()
            .iter()
            .enumerate()
            .all(|(i, v)| i == 12 || v.norm() < 1e-15));

        let xs = crate::quadrature::periodic_nodes(g);
        let mut samples = Vec::new();
        for _x2 in &xs {
            for x1 in &xs {
                samples.push(Complex64::from_polar(1.0, *x1));
            }
        }
        let c = analyze(&samples, g, g, 2).unwrap();
        assert!((c.coeff(1, 0) - 1.0).norm() < 1e-14);
        assert!((c.coeff(0, 0)).norm() < 1e-14);
    }

    #[test]
    fn coarse_grid_rejected() {
        let s = vec![Complex64::new(0.0, 0.0); 16];
        assert!(matches!(
            analyze(&s, 4, 4, 2),
            Err(LatticeError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn grid_and_point_synthesis_agree() {
        let mut f = CellFunction::zeros(2);
        f.set_coeff(1, -2, Complex64::new(0.3, 0.1));
        f.set_coeff(-2, 1, Complex64::new(-0.7, 0.4));
        let g = 7;
        let grid = f.synthesize_grid(g, g);
        let xs = crate::quadrature::periodic_nodes(g);
        let pts: Vec<_> = xs
            .iter()
            .flat_map(|x2| xs.iter().map(move |x1| (*x1, *x2)))
            .collect();
        let direct = f.synthesize(&pts);
        for (a, b) in grid.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
