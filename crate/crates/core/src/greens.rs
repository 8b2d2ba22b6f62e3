//! α-quasi-periodic free-space Green's function and the dipole-density
//! incident fields built from it.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::{LatticeError, ModeSet, Quasimomentum};
use crate::rayleigh::{Direction, RayleighField};
use crate::vec3::{self, CVec3};
use crate::CELL_AREA;

/// Smallest vertical separation accepted by [`green_eval`].
pub const DEFAULT_DELTA_MIN: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum GreensError {
    #[error("points too close: |x3 - y3| = {separation:.3e} < delta_min = {delta_min:.3e}")]
    PointsTooClose { separation: f64, delta_min: f64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("invalid dipole density: {0}")]
    InvalidDensity(String),
    #[error("invalid plane-wave incidence: {0}")]
    InvalidIncidence(String),
}

/// `G(x, y)` truncated to the modes of `modeset`, with the default `δ_min`.
pub fn green_eval(x: [f64; 3], y: [f64; 3], modeset: &ModeSet) -> Result<Complex64, GreensError> {
    green_eval_with(x, y, modeset, DEFAULT_DELTA_MIN)
}

pub fn green_eval_with(
    x: [f64; 3],
    y: [f64; 3],
    modeset: &ModeSet,
    delta_min: f64,
) -> Result<Complex64, GreensError> {
    let d3 = (x[2] - y[2]).abs();
    if d3 < delta_min {
        return Err(GreensError::PointsTooClose {
            separation: d3,
            delta_min,
        });
    }
    let (dx1, dx2) = (x[0] - y[0], x[1] - y[1]);
    let sum: Complex64 = modeset
        .modes()
        .iter()
        .map(|m| {
            let arg = Complex64::i()
                * (Complex64::from(m.alpha[0] * dx1 + m.alpha[1] * dx2) + m.beta * d3);
            arg.exp() / (Complex64::i() * m.beta)
        })
        .sum();
    Ok(sum / (8.0 * PI * PI))
}

/// Size of the first omitted shell `|n|_∞ = N + 1`: `Σ e^{−|β_n| d}/|β_n| / 8π²`.
/// The series tail is dominated by this once the shell is evanescent.
pub fn tail_bound(modeset: &ModeSet, separation: f64) -> Result<f64, GreensError> {
    let outer = modeset.with_order(modeset.order() + 1)?;
    let n = (modeset.order() + 1) as i32;
    Ok(outer
        .modes()
        .iter()
        .filter(|m| m.n.0.abs() == n || m.n.1.abs() == n)
        .map(|m| (-m.beta.im * separation).exp() / m.beta.norm())
        .sum::<f64>()
        / (8.0 * PI * PI))
}

/// `|Δ_h G + k²G| / |G|` with the 7-point central-difference Laplacian.
pub fn helmholtz_residual(
    x: [f64; 3],
    y: [f64; 3],
    modeset: &ModeSet,
    h: f64,
) -> Result<f64, GreensError> {
    let sep = (x[2] - y[2]).abs();
    if sep < 2.0 * h || sep - h < DEFAULT_DELTA_MIN {
        return Err(GreensError::PointsTooClose {
            separation: sep,
            delta_min: DEFAULT_DELTA_MIN.max(2.0 * h),
        });
    }
    let g0 = green_eval(x, y, modeset)?;
    let mut lap = -6.0 * g0;
    for axis in 0..3 {
        for s in [-1.0, 1.0] {
            let mut p = x;
            p[axis] += s * h;
            lap += green_eval(p, y, modeset)?;
        }
    }
    lap /= h * h;
    let k2 = modeset.k() * modeset.k();
    Ok((lap + k2 * g0).norm() / g0.norm())
}

/// Tangential dipole density `g(y) = Σ g_n e^{iα_n·y'}` on the plane `y3 = a`.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleDensity {
    height: f64,
    coeffs: Vec<CVec3>,
}

impl DipoleDensity {
    pub fn new(height: f64, coeffs: Vec<CVec3>, modeset: &ModeSet) -> Result<Self, GreensError> {
        if coeffs.len() != modeset.len() {
            return Err(GreensError::InvalidDensity(format!(
                "{} coefficients for {} modes",
                coeffs.len(),
                modeset.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| c[2] != Complex64::new(0.0, 0.0)) {
            return Err(GreensError::InvalidDensity(format!(
                "e3 component set at mode index {i}"
            )));
        }
        if !height.is_finite() || coeffs.iter().flatten().any(|c| !c.is_finite()) {
            return Err(GreensError::InvalidDensity("non-finite entries".into()));
        }
        Ok(Self { height, coeffs })
    }

    /// Density with a single nonzero mode.
    pub fn single_mode(
        height: f64,
        modeset: &ModeSet,
        n: (i32, i32),
        g: [Complex64; 2],
    ) -> Result<Self, GreensError> {
        let idx = modeset.index_of(n.0, n.1).ok_or_else(|| {
            GreensError::InvalidDensity(format!("mode {n:?} outside the truncation"))
        })?;
        let mut coeffs = vec![vec3::ZERO; modeset.len()];
        coeffs[idx] = [g[0], g[1], Complex64::new(0.0, 0.0)];
        Self::new(height, coeffs, modeset)
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn coeffs(&self) -> &[CVec3] {
        &self.coeffs
    }

    pub fn eval(&self, modeset: &ModeSet, y1: f64, y2: f64) -> CVec3 {
        let mut acc = vec3::ZERO;
        for (m, c) in modeset.modes().iter().zip(&self.coeffs) {
            let ph = Complex64::from_polar(1.0, m.alpha[0] * y1 + m.alpha[1] * y2);
            acc = vec3::add(&acc, &vec3::scale(ph, c));
        }
        acc
    }
}

/// Closed modal form of `curl curl ∫_{Γ_a} G(x, y) g(y) ds(y)` below the source
/// plane: `c_n = (4π²/(8π² iβ_n)) e^{iβ_n a} [k² g_n − (κ_n·g_n) κ_n]`,
/// `κ_n = α_n − β_n e3`, as a downgoing field referenced at `x3 = 0`.
pub fn incident_from_density(
    g: &DipoleDensity,
    modeset: &ModeSet,
) -> Result<RayleighField, GreensError> {
    if g.coeffs.len() != modeset.len() {
        return Err(GreensError::InvalidDensity(
            "density and mode set truncations differ".into(),
        ));
    }
    let k2 = modeset.k() * modeset.k();
    let coeffs = modeset
        .modes()
        .iter()
        .zip(&g.coeffs)
        .map(|(m, gn)| {
            let kappa: CVec3 = [m.alpha[0].into(), m.alpha[1].into(), -m.beta];
            let kg = vec3::dot(&kappa, gn);
            let bracket = vec3::sub(&vec3::scale(k2.into(), gn), &vec3::scale(kg, &kappa));
            let factor = CELL_AREA / (8.0 * PI * PI) / (Complex64::i() * m.beta)
                * (Complex64::i() * m.beta * g.height).exp();
            vec3::scale(factor, &bracket)
        })
        .collect();
    Ok(RayleighField {
        coeffs,
        reference_height: 0.0,
        direction: Direction::Downgoing,
    })
}

/// Plane wave `p e^{ik x·d}` coming down onto the layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveIncidence {
    k: f64,
    direction: [f64; 3],
    polarization: CVec3,
}

impl PlaneWaveIncidence {
    pub fn new(k: f64, direction: [f64; 3], polarization: CVec3) -> Result<Self, GreensError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(GreensError::InvalidIncidence(format!(
                "wavenumber must be positive, got {k}"
            )));
        }
        let dn = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        if (dn - 1.0).abs() > 1e-12 {
            return Err(GreensError::InvalidIncidence(format!(
                "|d| = {dn}, expected 1"
            )));
        }
        if direction[2] >= 0.0 {
            return Err(GreensError::InvalidIncidence("d3 must be negative".into()));
        }
        let pn = vec3::norm(&polarization);
        if vec3::dot(&polarization, &vec3::real(direction)).norm() > 1e-12 * pn.max(1.0) {
            return Err(GreensError::InvalidIncidence(
                "polarization is not transverse to d".into(),
            ));
        }
        Ok(Self {
            k,
            direction,
            polarization,
        })
    }

    /// `d = (cosθ1 cosθ2, cosθ1 sinθ2, −sinθ1)`.
    pub fn direction_from_angles(theta1: f64, theta2: f64) -> [f64; 3] {
        [
            theta1.cos() * theta2.cos(),
            theta1.cos() * theta2.sin(),
            -theta1.sin(),
        ]
    }

    /// Unit polarization perpendicular to the plane of incidence.
    pub fn s_polarized(k: f64, theta1: f64, theta2: f64) -> Result<Self, GreensError> {
        let d = Self::direction_from_angles(theta1, theta2);
        let p = vec3::real([-theta2.sin(), theta2.cos(), 0.0]);
        Self::new(k, d, p)
    }

    /// Unit polarization in the plane of incidence, `s × d`.
    pub fn p_polarized(k: f64, theta1: f64, theta2: f64) -> Result<Self, GreensError> {
        let d = Self::direction_from_angles(theta1, theta2);
        let s = vec3::real([-theta2.sin(), theta2.cos(), 0.0]);
        let p = vec3::cross(&s, &vec3::real(d));
        Self::new(k, d, p)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    pub fn polarization(&self) -> &CVec3 {
        &self.polarization
    }

    pub fn quasimomentum(&self) -> Quasimomentum {
        Quasimomentum::new(self.k * self.direction[0], self.k * self.direction[1])
    }

    /// The incident wave as a single-mode downgoing expansion on `modeset`.
    pub fn to_rayleigh(&self, modeset: &ModeSet) -> Result<RayleighField, GreensError> {
        let qm = self.quasimomentum();
        let a = modeset.alpha();
        let tol = 1e-12 * self.k.max(1.0);
        if (qm.alpha1 - a.alpha1).abs() > tol
            || (qm.alpha2 - a.alpha2).abs() > tol
            || (modeset.k() - self.k).abs() > tol
        {
            return Err(GreensError::InvalidIncidence(
                "mode set does not match k and the incidence angles".into(),
            ));
        }
        let mut f = RayleighField::zeros(modeset, 0.0, Direction::Downgoing);
        let idx = modeset
            .index_of(0, 0)
            .expect("mode (0, 0) is always present");
        f.coeffs[idx] = self.polarization;
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quasi_periodic_shift() {
        let ms = ModeSet::new(1.3, Quasimomentum::new(0.27, -0.11), 6).unwrap();
        let x = [0.4, 1.1, 0.9];
        let y = [0.2, -0.5, 0.1];
        let g = green_eval(x, y, &ms).unwrap();
        let gs = green_eval([x[0] + 2.0 * PI, x[1], x[2]], y, &ms).unwrap();
        let factor = Complex64::from_polar(1.0, 2.0 * PI * 0.27);
        assert!((gs - factor * g).norm() <= 1e-10 * g.norm());
    }

    #[test]
    fn translation_invariance() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.1, 0.2), 5).unwrap();
        let g = green_eval([0.3, 0.4, 1.0], [0.0, 0.1, 0.2], &ms).unwrap();
        let h = green_eval([1.3, -0.6, 1.0], [1.0, -0.9, 0.2], &ms).unwrap();
        assert!((g - h).norm() <= 1e-12 * g.norm());
    }

    #[test]
    fn normal_incidence_unit_k_single_term() {
        // with α = 0 and k = 1 the modes (±1, 0), (0, ±1) sit on the light line
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.0, 0.0), 0).unwrap();
        let g = green_eval([0.0, 0.0, 1.0], [0.0; 3], &ms).unwrap();
        let expect = Complex64::i().exp() / Complex64::i() / (8.0 * PI * PI);
        assert!((g - expect).norm() < 1e-15);
        assert!(matches!(
            ms.with_order(1),
            Err(LatticeError::WoodAnomaly { .. })
        ));
    }

    #[test]
    fn truncation_agreement() {
        let ms = ModeSet::new(0.9, Quasimomentum::new(0.0, 0.0), 30).unwrap();
        let big = ms.with_order(60).unwrap();
        let x = [0.0, 0.0, 1.0];
        let y = [0.0, 0.0, 0.0];
        let a = green_eval(x, y, &ms).unwrap();
        let b = green_eval(x, y, &big).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
        assert!(tail_bound(&ms, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn too_close() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.1, 0.0), 3).unwrap();
        assert!(matches!(
            green_eval([0.0, 0.0, 0.005], [0.0; 3], &ms),
            Err(GreensError::PointsTooClose { .. })
        ));
    }

    #[test]
    fn helmholtz_probe() {
        let ms = ModeSet::new(1.2, Quasimomentum::new(0.3, 0.1), 12).unwrap();
        let r = helmholtz_residual([0.3, 0.7, 1.0], [0.0, 0.0, 0.0], &ms, 1e-3).unwrap();
        assert!(r < 1e-5, "residual {r}");
    }

    #[test]
    fn normal_density_gives_k2_g() {
        let k = 1.5;
        let ms = ModeSet::new(k, Quasimomentum::new(0.0, 0.0), 1).unwrap();
        let g = DipoleDensity::single_mode(
            2.0,
            &ms,
            (0, 0),
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        )
        .unwrap();
        let inc = incident_from_density(&g, &ms).unwrap();
        let idx = ms.index_of(0, 0).unwrap();
        let c = inc.coeffs[idx];
        let expect = 0.5 / (Complex64::i() * k) * (Complex64::i() * k * 2.0).exp() * k * k;
        assert!((c[0] - expect).norm() < 1e-14);
        assert!(c[1].norm() < 1e-14 && c[2].norm() < 1e-14);
    }

    #[test]
    fn incidence_validation() {
        assert!(
            PlaneWaveIncidence::new(1.0, [0.0, 0.0, 1.0], vec3::real([1.0, 0.0, 0.0])).is_err()
        );
        assert!(
            PlaneWaveIncidence::new(1.0, [0.0, 0.0, -1.0], vec3::real([0.0, 0.0, 1.0])).is_err()
        );
        let p = PlaneWaveIncidence::p_polarized(2.0, 0.7, 0.4).unwrap();
        assert!((vec3::norm(p.polarization()) - 1.0).abs() < 1e-14);
    }
}
