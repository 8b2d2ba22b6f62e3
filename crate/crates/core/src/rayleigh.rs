//! Rayleigh sequences, tangential traces and the transparent boundary
//! operator `R` that encodes the outgoing radiation condition on `x3 = b`.
//!
//! Inner products on a horizontal plane are `⟨u, v⟩ = ∫_cell u·v̄ ds`, so the
//! mode sums carry the explicit cell-area factor `4π²`.

use std::io::Write;

use num_complex::Complex64;
use thiserror::Error;

use crate::greens::PlaneWaveIncidence;
use crate::lattice::ModeSet;
use crate::vec3::{self, CVec3};
use crate::CELL_AREA;

#[derive(Debug, Error)]
pub enum RayleighError {
    #[error("field has {got} modes but the mode set has {expected}")]
    TruncationMismatch { got: usize, expected: usize },
    #[error("divergence constraint violated at mode ({n1}, {n2}): relative defect {defect:.3e}")]
    DivergenceViolation { n1: i32, n2: i32, defect: f64 },
    #[error("tangential field has a nonzero e3 component at mode index {0}")]
    NotTangential(usize),
    #[error("efficiencies need an upgoing scattered field")]
    NotUpgoing,
    #[error("incident wave does not match the mode set quasimomentum")]
    IncidenceMismatch,
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Propagation direction of a Rayleigh expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `e^{i(α_n·x + β_n (x3 − h))}`: scattered fields.
    Upgoing,
    /// `e^{i(α_n·x − β_n (x3 − h))}`: incident fields.
    Downgoing,
}

/// Plane-wave expansion above the layer, referenced at height `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighField {
    pub coeffs: Vec<CVec3>,
    pub reference_height: f64,
    pub direction: Direction,
}

impl RayleighField {
    pub fn zeros(modeset: &ModeSet, reference_height: f64, direction: Direction) -> Self {
        Self {
            coeffs: vec![vec3::ZERO; modeset.len()],
            reference_height,
            direction,
        }
    }

    fn sign(&self) -> f64 {
        match self.direction {
            Direction::Upgoing => 1.0,
            Direction::Downgoing => -1.0,
        }
    }

    /// Upgoing field with divergence-free completion of tangential data:
    /// `E_n^{(3)} = −(α_n·E_n)/β_n`.
    pub fn upgoing_from_tangential(
        modeset: &ModeSet,
        tangential: &[CVec3],
        reference_height: f64,
    ) -> Self {
        let coeffs = modeset
            .modes()
            .iter()
            .zip(tangential)
            .map(|(m, e)| {
                let ad = m.alpha[0] * e[0] + m.alpha[1] * e[1];
                [e[0], e[1], -ad / m.beta]
            })
            .collect();
        Self {
            coeffs,
            reference_height,
            direction: Direction::Upgoing,
        }
    }

    /// Wavevector `κ_n = (α_n, ±β_n)` of mode `idx`.
    pub fn wavevector(&self, modeset: &ModeSet, idx: usize) -> CVec3 {
        let m = modeset.mode(idx);
        [m.alpha[0].into(), m.alpha[1].into(), m.beta * self.sign()]
    }

    /// Same field with coefficients referenced at another height.
    pub fn rereferenced(&self, modeset: &ModeSet, height: f64) -> Self {
        let dz = height - self.reference_height;
        let coeffs = modeset
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(m, c)| {
                let phase = (Complex64::i() * m.beta * self.sign() * dz).exp();
                vec3::scale(phase, c)
            })
            .collect();
        Self {
            coeffs,
            reference_height: height,
            direction: self.direction,
        }
    }

    pub fn eval(&self, modeset: &ModeSet, x: [f64; 3]) -> CVec3 {
        let s = self.sign();
        let mut acc = vec3::ZERO;
        for (m, c) in modeset.modes().iter().zip(&self.coeffs) {
            let phase = Complex64::i()
                * (Complex64::from(m.alpha[0] * x[0] + m.alpha[1] * x[1])
                    + m.beta * s * (x[2] - self.reference_height));
            acc = vec3::add(&acc, &vec3::scale(phase.exp(), c));
        }
        acc
    }

    /// `curl E` at `x`.
    pub fn eval_curl(&self, modeset: &ModeSet, x: [f64; 3]) -> CVec3 {
        let s = self.sign();
        let mut acc = vec3::ZERO;
        for (idx, (m, c)) in modeset.modes().iter().zip(&self.coeffs).enumerate() {
            let phase = Complex64::i()
                * (Complex64::from(m.alpha[0] * x[0] + m.alpha[1] * x[1])
                    + m.beta * s * (x[2] - self.reference_height));
            let kappa = self.wavevector(modeset, idx);
            let curl = vec3::scale(Complex64::i() * phase.exp(), &vec3::cross(&kappa, c));
            acc = vec3::add(&acc, &curl);
        }
        acc
    }

    /// Largest relative defect `|κ_n·E_n| / (|κ_n||E_n|)`; zero modes are skipped.
    pub fn divergence_defect(&self, modeset: &ModeSet) -> (f64, Option<(i32, i32)>) {
        let mut worst = (0.0, None);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let mag = vec3::norm(c);
            if mag == 0.0 {
                continue;
            }
            let kappa = self.wavevector(modeset, idx);
            let defect = vec3::dot(&kappa, c).norm() / (mag * vec3::norm(&kappa));
            if defect > worst.0 {
                worst = (defect, Some(modeset.mode(idx).n));
            }
        }
        worst
    }

    pub fn check_divergence(&self, modeset: &ModeSet, tol: f64) -> Result<(), RayleighError> {
        if self.coeffs.len() != modeset.len() {
            return Err(RayleighError::TruncationMismatch {
                got: self.coeffs.len(),
                expected: modeset.len(),
            });
        }
        match self.divergence_defect(modeset) {
            (d, Some((n1, n2))) if d > tol => {
                Err(RayleighError::DivergenceViolation { n1, n2, defect: d })
            }
            _ => Ok(()),
        }
    }

    /// Tangential trace `e3 × E` on the reference plane.
    pub fn tangential_trace(&self) -> TangentialField {
        TangentialField {
            height: self.reference_height,
            coeffs: self.coeffs.iter().map(vec3::e3_cross).collect(),
        }
    }

    /// Writes the Rayleigh sequence as CSV, one row per mode.
    pub fn write_csv<W: Write>(&self, modeset: &ModeSet, mut out: W) -> Result<(), RayleighError> {
        writeln!(
            out,
            "n1,n2,re_e1,im_e1,re_e2,im_e2,re_e3,im_e3,re_beta,im_beta,propagating"
        )?;
        for (m, c) in modeset.modes().iter().zip(&self.coeffs) {
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                m.n.0,
                m.n.1,
                c[0].re,
                c[0].im,
                c[1].re,
                c[1].im,
                c[2].re,
                c[2].im,
                m.beta.re,
                m.beta.im,
                u8::from(m.propagating)
            )?;
        }
        Ok(())
    }
}

/// Tangential vector field `Σ Ẽ_n e^{iα_n·x'}` on a horizontal plane, `e3·Ẽ_n = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentialField {
    pub height: f64,
    pub coeffs: Vec<CVec3>,
}

impl TangentialField {
    pub fn zeros(modeset: &ModeSet, height: f64) -> Self {
        Self {
            height,
            coeffs: vec![vec3::ZERO; modeset.len()],
        }
    }

    pub fn new(height: f64, coeffs: Vec<CVec3>) -> Result<Self, RayleighError> {
        if let Some(i) = coeffs.iter().position(|c| c[2] != Complex64::new(0.0, 0.0)) {
            return Err(RayleighError::NotTangential(i));
        }
        Ok(Self { height, coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            height: self.height,
            coeffs: self.coeffs.iter().map(|c| vec3::scale(s, c)).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            height: self.height,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| vec3::add(a, b))
                .collect(),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(vec3::norm).fold(0.0, f64::max)
    }

    /// `⟨self, other⟩ = 4π² Σ self_n · conj(other_n)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| vec3::dot_conj(a, b))
            .sum::<Complex64>()
            * CELL_AREA
    }

    /// `Σ (1+|α_n|²)^{-1/2} (|Ẽ_n|² + |Ẽ_n·α_n|²)`.
    pub fn h_minus_half_div_norm_sqr(&self, modeset: &ModeSet) -> f64 {
        modeset
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(m, c)| {
                let ad = c[0] * m.alpha[0] + c[1] * m.alpha[1];
                (vec3::norm_sqr(c) + ad.norm_sqr()) / (1.0 + m.alpha_sqr()).sqrt()
            })
            .sum()
    }

    /// Values on the plane at `(x1, x2)`, including the quasi-periodic phase.
    pub fn eval(&self, modeset: &ModeSet, x1: f64, x2: f64) -> CVec3 {
        let mut acc = vec3::ZERO;
        for (m, c) in modeset.modes().iter().zip(&self.coeffs) {
            let ph = Complex64::from_polar(1.0, m.alpha[0] * x1 + m.alpha[1] * x2);
            acc = vec3::add(&acc, &vec3::scale(ph, c));
        }
        acc
    }
}

fn check_len(f: &TangentialField, modeset: &ModeSet) -> Result<(), RayleighError> {
    if f.len() != modeset.len() {
        return Err(RayleighError::TruncationMismatch {
            got: f.len(),
            expected: modeset.len(),
        });
    }
    Ok(())
}

/// Transparent boundary operator: `(RẼ)_n = −(1/(iβ_n)) [k²Ẽ_n − (α_n·Ẽ_n) α_n]`.
pub fn apply_r(
    field: &TangentialField,
    modeset: &ModeSet,
) -> Result<TangentialField, RayleighError> {
    check_len(field, modeset)?;
    let k2 = modeset.k() * modeset.k();
    let coeffs = modeset
        .modes()
        .iter()
        .zip(&field.coeffs)
        .map(|(m, e)| {
            let ad = e[0] * m.alpha[0] + e[1] * m.alpha[1];
            let factor = -1.0 / (Complex64::i() * m.beta);
            [
                factor * (k2 * e[0] - ad * m.alpha[0]),
                factor * (k2 * e[1] - ad * m.alpha[1]),
                Complex64::new(0.0, 0.0),
            ]
        })
        .collect();
    Ok(TangentialField {
        height: field.height,
        coeffs,
    })
}

/// Real and imaginary parts of `⟨RẼ, Ẽ⟩` split by mode class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyForms {
    /// `4π² Σ_{n∉P} (k²|Ẽ_n|² − |α_n·Ẽ_n|²)/|β_n|`
    pub re_form: f64,
    /// `4π² Σ_{n∈P} (k²|Ẽ_n|² − |α_n·Ẽ_n|²)/β_n`, nonnegative.
    pub im_form: f64,
}

pub fn energy_forms(
    field: &TangentialField,
    modeset: &ModeSet,
) -> Result<EnergyForms, RayleighError> {
    check_len(field, modeset)?;
    let k2 = modeset.k() * modeset.k();
    let mut re_form = 0.0;
    let mut im_form = 0.0;
    for (m, e) in modeset.modes().iter().zip(&field.coeffs) {
        let ad = e[0] * m.alpha[0] + e[1] * m.alpha[1];
        let bracket = k2 * vec3::norm_sqr(e) - ad.norm_sqr();
        if m.propagating {
            im_form += bracket / m.beta.re;
        } else {
            re_form += bracket / m.beta.norm();
        }
    }
    Ok(EnergyForms {
        re_form: CELL_AREA * re_form,
        im_form: CELL_AREA * im_form,
    })
}

/// `⟨u, v⟩` by trapezoid quadrature of `u·v̄` on a `grid × grid` sampling of the
/// plane; exact once `grid > 2N`.
pub fn inner_product_quadrature(
    u: &TangentialField,
    v: &TangentialField,
    modeset: &ModeSet,
    grid: usize,
) -> Complex64 {
    let xs = crate::quadrature::periodic_nodes(grid);
    let mut acc = Complex64::new(0.0, 0.0);
    for &x2 in &xs {
        for &x1 in &xs {
            acc += vec3::dot_conj(&u.eval(modeset, x1, x2), &v.eval(modeset, x1, x2));
        }
    }
    acc * CELL_AREA / (grid * grid) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEfficiency {
    pub n: (i32, i32),
    pub efficiency: f64,
}

/// Reflection efficiencies `β_n|E_n|² / (β_inc |p|²)` of the propagating orders.
pub fn efficiencies(
    scattered: &RayleighField,
    incidence: &PlaneWaveIncidence,
    modeset: &ModeSet,
) -> Result<Vec<ModeEfficiency>, RayleighError> {
    if scattered.direction != Direction::Upgoing {
        return Err(RayleighError::NotUpgoing);
    }
    scattered.check_divergence(modeset, 1e-8)?;
    let beta_inc = -incidence.direction()[2] * incidence.k();
    let p2 = vec3::norm_sqr(incidence.polarization());
    let idx0 = modeset
        .index_of(0, 0)
        .expect("mode (0, 0) is always present");
    if (modeset.mode(idx0).beta.re - beta_inc).abs() > 1e-10 * incidence.k() {
        return Err(RayleighError::IncidenceMismatch);
    }
    Ok(modeset
        .propagating()
        .map(|(idx, m)| ModeEfficiency {
            n: m.n,
            efficiency: m.beta.re * vec3::norm_sqr(&scattered.coeffs[idx]) / (beta_inc * p2),
        })
        .collect())
}

pub fn write_efficiencies_csv<W: Write>(
    eff: &[ModeEfficiency],
    mut out: W,
) -> Result<(), RayleighError> {
    writeln!(out, "n1,n2,efficiency")?;
    for e in eff {
        writeln!(out, "{},{},{:.16e}", e.n.0, e.n.1, e.efficiency)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Quasimomentum;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn r_on_normal_mode() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.0, 0.0), 0).unwrap();
        let f = TangentialField::new(0.0, vec![[c(1.0), c(0.0), c(0.0)]]).unwrap();
        let r = apply_r(&f, &ms).unwrap();
        assert!((r.coeffs[0][0] - Complex64::i()).norm() < 1e-15);
        assert!(r.coeffs[0][1].norm() < 1e-15);
    }

    #[test]
    fn r_on_field_parallel_to_alpha() {
        let ms = ModeSet::new(1.3, Quasimomentum::new(0.25, -0.4), 2).unwrap();
        let mut f = TangentialField::zeros(&ms, 0.0);
        for (i, m) in ms.modes().iter().enumerate() {
            f.coeffs[i] = [c(m.alpha[0]), c(m.alpha[1]), c(0.0)];
        }
        let r = apply_r(&f, &ms).unwrap();
        for (i, m) in ms.modes().iter().enumerate() {
            let expect = vec3::scale(Complex64::i() * m.beta, &f.coeffs[i]);
            assert!(
                vec3::norm(&vec3::sub(&r.coeffs[i], &expect)) < 1e-12 * (1.0 + vec3::norm(&expect))
            );
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.1, 0.2), 2).unwrap();
        let f = TangentialField::zeros(&ms, 1.0);
        assert_eq!(apply_r(&f, &ms).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn single_propagating_mode_energy() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.0, 0.0), 0).unwrap();
        let f = TangentialField::new(0.0, vec![[c(1.0), c(0.0), c(0.0)]]).unwrap();
        let e = energy_forms(&f, &ms).unwrap();
        assert!((e.im_form - CELL_AREA).abs() < 1e-12);
        assert_eq!(e.re_form, 0.0);
    }

    #[test]
    fn evanescent_support_has_no_imaginary_form() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.2, 0.1), 2).unwrap();
        let mut f = TangentialField::zeros(&ms, 0.0);
        for (i, m) in ms.modes().iter().enumerate() {
            if !m.propagating {
                f.coeffs[i] = [Complex64::new(0.3, i as f64 * 0.01), c(-0.2), c(0.0)];
            }
        }
        assert_eq!(energy_forms(&f, &ms).unwrap().im_form, 0.0);
    }

    #[test]
    fn rejects_normal_component() {
        assert!(matches!(
            TangentialField::new(0.0, vec![[c(0.0), c(0.0), c(1.0)]]),
            Err(RayleighError::NotTangential(0))
        ));
    }

    #[test]
    fn truncation_mismatch() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.2, 0.1), 1).unwrap();
        let f = TangentialField::new(0.0, vec![vec3::ZERO; 3]).unwrap();
        assert!(matches!(
            apply_r(&f, &ms),
            Err(RayleighError::TruncationMismatch { .. })
        ));
    }

    #[test]
    fn zero_scattered_field_has_zero_efficiency() {
        let k = 1.0;
        let inc = PlaneWaveIncidence::s_polarized(k, 1.0, 0.3).unwrap();
        let ms = ModeSet::new(k, inc.quasimomentum(), 2).unwrap();
        let s = RayleighField::zeros(&ms, 1.0, Direction::Upgoing);
        let eff = efficiencies(&s, &inc, &ms).unwrap();
        assert!(!eff.is_empty());
        assert!(eff.iter().all(|e| e.efficiency == 0.0));
    }

    #[test]
    fn csv_has_one_row_per_mode() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.2, 0.1), 1).unwrap();
        let s = RayleighField::zeros(&ms, 1.0, Direction::Upgoing);
        let mut buf = Vec::new();
        s.write_csv(&ms, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + ms.len());
    }
}
