//! Full scattering problem: the layer coupled to the transparent boundary
//! condition `(curl E)_T − R(e3×E) = (curl E^i)_T − R(e3×E^i)` on `Γ_b`.

use num_complex::Complex64;

use super::layer::{LayerField, LayerSolver};
use super::medium::MediumProfile;
use super::{ForwardError, SINGULAR_MATCH_LIMIT};
use crate::greens::{incident_from_density, DipoleDensity, PlaneWaveIncidence};
use crate::lattice::ModeSet;
use crate::linalg::{self, Factored};
use crate::rayleigh::{Direction, RayleighField};
use crate::vec3::{self, CVec3};

/// Incident field driving the scattering problem.
#[derive(Debug, Clone)]
pub enum Incidence {
    PlaneWave(PlaneWaveIncidence),
    Density(DipoleDensity),
}

impl Incidence {
    /// Downgoing expansion of the incident field on `modeset`.
    pub fn expansion(&self, modeset: &ModeSet, b: f64) -> Result<RayleighField, ForwardError> {
        match self {
            Incidence::PlaneWave(p) => Ok(p.to_rayleigh(modeset)?),
            Incidence::Density(g) => {
                if g.height() <= b {
                    return Err(ForwardError::InvalidParameter(format!(
                        "density height a = {} must exceed the layer height b = {b}",
                        g.height()
                    )));
                }
                Ok(incident_from_density(g, modeset)?)
            }
        }
    }
}

/// Total field below `Γ_b` and the Rayleigh expansions above it.
#[derive(Clone)]
pub struct ScatteringSolution {
    pub layer: LayerField,
    /// Downgoing, referenced at `x3 = b`.
    pub incident: RayleighField,
    /// Upgoing, referenced at `x3 = b`.
    pub scattered: RayleighField,
    pub b: f64,
}

impl ScatteringSolution {
    /// Total field anywhere in `0 ≤ x3`.
    pub fn eval_total(&self, x: [f64; 3]) -> Result<CVec3, ForwardError> {
        if x[2] <= self.b {
            self.layer.eval(x)
        } else {
            let ms = self.layer.modeset();
            Ok(vec3::add(
                &self.incident.eval(ms, x),
                &self.scattered.eval(ms, x),
            ))
        }
    }
}

pub fn solve_scattering(
    profile: &MediumProfile,
    incidence: &Incidence,
    modeset: &ModeSet,
) -> Result<ScatteringSolution, ForwardError> {
    let solver = LayerSolver::new(profile, modeset)?;
    scatter_with(&solver, incidence)
}

/// Scattering solve reusing a factored layer operator.
pub fn scatter_with(
    solver: &LayerSolver,
    incidence: &Incidence,
) -> Result<ScatteringSolution, ForwardError> {
    let ms = solver.modeset();
    let b = solver.height();
    let incident = incidence.expansion(ms, b)?.rereferenced(ms, b);
    let nb = ms.block_len();
    let k = ms.k();
    let k2 = k * k;
    let ik = Complex64::new(0.0, k);
    let zero = Complex64::new(0.0, 0.0);
    let mut c_top = Vec::with_capacity(nb);
    for bi in 0..nb {
        let (a, bm) = solver.top_matrices(bi);
        // R as a 2×2 matrix per mode, acting on (v1, v2).
        let rm: Vec<[Complex64; 4]> = (0..nb)
            .map(|i| {
                let m = ms.mode(bi * nb + i);
                let f = -1.0 / (Complex64::i() * m.beta);
                let (x, y) = (m.alpha[0], m.alpha[1]);
                [
                    f * (k2 - x * x),
                    f * (-x * y),
                    f * (-y * x),
                    f * (k2 - y * y),
                ]
            })
            .collect();
        // J = e3× on tangential vectors: (v1, v2) ↦ (−v2, v1).
        let ja = linalg::from_fn(2 * nb, a.ncols(), |r, c| {
            if r < nb {
                -a[(r + nb, c)]
            } else {
                a[(r - nb, c)]
            }
        });
        let sys = linalg::from_fn(2 * nb, a.ncols(), |r, c| {
            let i = r % nb;
            let rj = &rm[i];
            let (r0, r1) = if r < nb {
                (rj[0], rj[1])
            } else {
                (rj[2], rj[3])
            };
            ik * bm[(r, c)] - (r0 * ja[(i, c)] + r1 * ja[(i + nb, c)])
        });
        let mut rhs = vec![zero; 2 * nb];
        for i in 0..nb {
            let idx = bi * nb + i;
            let ei = incident.coeffs[idx];
            let kappa = incident.wavevector(ms, idx);
            let curl = vec3::scale(Complex64::i(), &vec3::cross(&kappa, &ei));
            let jt = [-ei[1], ei[0]];
            let rj = &rm[i];
            rhs[i] = curl[0] - (rj[0] * jt[0] + rj[1] * jt[1]);
            rhs[nb + i] = curl[1] - (rj[2] * jt[0] + rj[3] * jt[1]);
        }
        let fact = Factored::new(&sys).map_err(|e| ForwardError::EigenFailure(e.to_string()))?;
        if fact.condition > SINGULAR_MATCH_LIMIT {
            return Err(ForwardError::SingularMatch {
                context: format!("radiation condition at x3 = b, block {bi}"),
                condition: fact.condition,
            });
        }
        c_top.push(fact.solve_vec(&rhs));
    }
    let layer = solver.field_from_top(c_top);
    let fc = layer.coefficients(b, 0)?;
    let tangential: Vec<CVec3> = (0..ms.len())
        .map(|i| {
            let ei = incident.coeffs[i];
            [fc.e[0][i] - ei[0], fc.e[1][i] - ei[1], zero]
        })
        .collect();
    let scattered = RayleighField::upgoing_from_tangential(ms, &tangential, b);
    debug_assert_eq!(scattered.direction, Direction::Upgoing);
    Ok(ScatteringSolution {
        layer,
        incident,
        scattered,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rayleigh::efficiencies;

    #[test]
    fn vacuum_layer_is_a_mirror() {
        let k = 1.0;
        let inc = PlaneWaveIncidence::p_polarized(k, 0.9, 0.4).unwrap();
        let ms = ModeSet::new(k, inc.quasimomentum(), 2).unwrap();
        let b = 0.7;
        let profile = MediumProfile::homogeneous(b, Complex64::new(1.0, 0.0)).unwrap();
        let sol = solve_scattering(&profile, &Incidence::PlaneWave(inc), &ms).unwrap();
        let idx = ms.index_of(0, 0).unwrap();
        let beta = ms.mode(idx).beta;
        let p = inc.polarization();
        let ph = (Complex64::i() * beta * b).exp();
        let expect = [-p[0] * ph, -p[1] * ph, p[2] * ph];
        for c in 0..3 {
            assert!((sol.scattered.coeffs[idx][c] - expect[c]).norm() < 1e-10);
        }
        let eff = efficiencies(&sol.scattered, &inc, &ms).unwrap();
        let total: f64 = eff.iter().map(|e| e.efficiency).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}
