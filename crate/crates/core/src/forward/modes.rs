//! Transverse eigen-decomposition of one `x3`-uniform slab.
//!
//! With `curl E = ikH` and `curl H = −ik q E`, the tangential components
//! `F = (E1, E2, H1, H2)` of one `n2`-block satisfy `dF/dx3 = i M F`,
//! `M = [[0, P], [Qm, 0]]`. Solutions of `γ² W = P·Qm W` give the modal fields
//! `Φ± = [W; ±V]` with `V = Qm W / γ` and `M Φ± = ±γ Φ±`.

use num_complex::Complex64;

use super::medium::{Axis, MediumProfile};
use super::ForwardError;
use crate::lattice::ModeSet;
use crate::linalg::{self, CMat, Factored};
use crate::trig::TrigPoly;

/// Bases with a condition number above this are rejected.
pub const BASIS_CONDITION_LIMIT: f64 = 1e12;
/// Relative eigen-residual allowed for each modal pair.
pub const EIGEN_RESIDUAL_LIMIT: f64 = 1e-10;

/// Truncated Toeplitz matrix `Q[i, j] = q_{i−j}` of a trig polynomial.
pub fn toeplitz(q: &TrigPoly, size: usize) -> CMat {
    linalg::from_fn(size, size, |i, j| q.coeff(i as i32 - j as i32))
}

/// Eigen-data of one `n2`-block of one slab.
#[derive(Debug, Clone)]
pub struct BlockModes {
    pub n2: i32,
    pub ky: f64,
    /// Exponents with `Im γ ≥ 0` (`Re γ > 0` when real).
    pub gamma: Vec<Complex64>,
    pub w: CMat,
    pub v: CMat,
    pub residual: f64,
    pub condition: f64,
}

/// Modal basis of a slab: per-block exponents and transverse eigenvectors.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    pub slab: usize,
    pub k: f64,
    pub kx: Vec<f64>,
    /// `Q⁻¹` for the `E3` recovery, shared by all blocks.
    pub q_inv: CMat,
    pub blocks: Vec<BlockModes>,
}

impl ModalBasis {
    pub fn max_residual(&self) -> f64 {
        self.blocks.iter().map(|b| b.residual).fold(0.0, f64::max)
    }

    pub fn max_condition(&self) -> f64 {
        self.blocks.iter().map(|b| b.condition).fold(0.0, f64::max)
    }

    /// All exponents `+γ` of the slab, block after block.
    pub fn exponents(&self) -> Vec<Complex64> {
        self.blocks
            .iter()
            .flat_map(|b| b.gamma.iter().copied())
            .collect()
    }
}

/// `P` and `Qm` of the first-order system for one block.
pub fn block_system(k: f64, kx: &[f64], ky: f64, q: &CMat, q_inv: &CMat) -> (CMat, CMat) {
    let n = kx.len();
    let z = Complex64::new(0.0, 0.0);
    let kxq = |i: usize, j: usize| kx[i] * q_inv[(i, j)];
    let delta = |i: usize, j: usize| if i == j { Complex64::new(1.0, 0.0) } else { z };
    let inv_k = 1.0 / k;
    let p = linalg::from_fn(2 * n, 2 * n, |r, c| {
        let (i, j) = (r % n, c % n);
        inv_k
            * match (r < n, c < n) {
                (true, true) => kxq(i, j) * ky,
                (true, false) => k * k * delta(i, j) - kxq(i, j) * kx[j],
                (false, true) => -k * k * delta(i, j) + ky * q_inv[(i, j)] * ky,
                (false, false) => -ky * q_inv[(i, j)] * kx[j],
            }
    });
    let qm = linalg::from_fn(2 * n, 2 * n, |r, c| {
        let (i, j) = (r % n, c % n);
        inv_k
            * match (r < n, c < n) {
                (true, true) => -kx[i] * ky * delta(i, j),
                (true, false) => kx[i] * kx[i] * delta(i, j) - k * k * q[(i, j)],
                (false, true) => k * k * q[(i, j)] - ky * ky * delta(i, j),
                (false, false) => ky * kx[i] * delta(i, j),
            }
    });
    (p, qm)
}

fn upper_root(lambda: Complex64) -> Complex64 {
    let s = lambda.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Eigen-decomposes every `n2`-block of slab `slab`.
pub fn solve_layer_modes(
    profile: &MediumProfile,
    slab: usize,
    modeset: &ModeSet,
) -> Result<ModalBasis, ForwardError> {
    let s = profile
        .slabs()
        .get(slab)
        .ok_or_else(|| ForwardError::InvalidParameter(format!("slab index {slab} out of range")))?;
    if profile.axis() != Axis::X1 && s.q.degree() > 0 {
        return Err(ForwardError::WrongAxis);
    }
    let k = modeset.k();
    let n = modeset.block_len();
    let order = modeset.order() as i32;
    let alpha = modeset.alpha();
    let kx: Vec<f64> = (-order..=order)
        .map(|n1| alpha.alpha1 + n1 as f64)
        .collect();
    let q = toeplitz(&s.q, n);
    let q_fact = Factored::new(&q).map_err(|e| ForwardError::EigenFailure(e.to_string()))?;
    if q_fact.condition > BASIS_CONDITION_LIMIT {
        return Err(ForwardError::IllConditionedBasis {
            slab,
            condition: q_fact.condition,
        });
    }
    let q_inv = q_fact.inverse();
    let mut blocks = Vec::with_capacity(n);
    for n2 in -order..=order {
        let ky = alpha.alpha2 + n2 as f64;
        let (p, qm) = block_system(k, &kx, ky, &q, &q_inv);
        let omega = &p * &qm;
        let (lambda, w) = linalg::eigen(&omega)
            .map_err(|e| ForwardError::EigenFailure(format!("slab {slab}, n2 = {n2}: {e}")))?;
        let gamma: Vec<Complex64> = lambda.iter().map(|&l| upper_root(l)).collect();
        let gmin = gamma.iter().map(|g| g.norm()).fold(f64::INFINITY, f64::min);
        if gmin <= 1e-8 * k {
            return Err(ForwardError::IllConditionedBasis {
                slab,
                condition: f64::INFINITY,
            });
        }
        let inv_gamma: Vec<Complex64> = gamma.iter().map(|g| 1.0 / g).collect();
        let v = linalg::scale_cols(&(&qm * &w), &inv_gamma);
        // ‖M Φ − γ Φ‖ reduces to ‖P V − γ W‖ since Qm W = γ V by construction.
        let pv = &p * &v;
        let defect = linalg::from_fn(2 * n, 2 * n, |i, j| pv[(i, j)] - gamma[j] * w[(i, j)]);
        let m_norm = linalg::norm_fro(&p).max(linalg::norm_fro(&qm));
        let phi_norm = (linalg::norm_fro(&w).powi(2) + linalg::norm_fro(&v).powi(2)).sqrt();
        let residual = linalg::norm_fro(&defect) / (m_norm * phi_norm);
        if residual > EIGEN_RESIDUAL_LIMIT {
            return Err(ForwardError::EigenFailure(format!(
                "slab {slab}, n2 = {n2}: eigen-residual {residual:.3e}"
            )));
        }
        let condition = Factored::new(&w)
            .map_err(|e| ForwardError::EigenFailure(e.to_string()))?
            .condition;
        if condition > BASIS_CONDITION_LIMIT {
            return Err(ForwardError::IllConditionedBasis { slab, condition });
        }
        log::debug!("slab {slab} block {n2}: residual {residual:.2e}, cond(W) {condition:.2e}");
        blocks.push(BlockModes {
            n2,
            ky,
            gamma,
            w,
            v,
            residual,
            condition,
        });
    }
    Ok(ModalBasis {
        slab,
        k,
        kx,
        q_inv,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Quasimomentum;

    /// Largest distance after pairing each expected value with its nearest unused match.
    fn multiset_distance(got: &[Complex64], expect: &[Complex64]) -> f64 {
        assert_eq!(got.len(), expect.len());
        let mut used = vec![false; got.len()];
        let mut worst: f64 = 0.0;
        for e in expect {
            let (j, d) = got
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, g)| (j, (g - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }

    #[test]
    fn constant_q_exponents() {
        let q0 = Complex64::new(2.0, 0.3);
        let ms = ModeSet::new(1.1, Quasimomentum::new(0.2, 0.35), 2).unwrap();
        let p = MediumProfile::homogeneous(1.0, q0).unwrap();
        let basis = solve_layer_modes(&p, 0, &ms).unwrap();
        for b in &basis.blocks {
            let mut expect = Vec::new();
            for kx in &basis.kx {
                let g = upper_root(1.1 * 1.1 * q0 - kx * kx - b.ky * b.ky);
                expect.push(g);
                expect.push(g);
            }
            assert!(multiset_distance(&b.gamma, &expect) < 1e-10);
        }
    }

    #[test]
    fn vacuum_exponents_match_beta() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.15, -0.3), 2).unwrap();
        let p = MediumProfile::homogeneous(1.0, Complex64::new(1.0, 0.0)).unwrap();
        let basis = solve_layer_modes(&p, 0, &ms).unwrap();
        let betas: Vec<Complex64> = ms.modes().iter().flat_map(|m| [m.beta, m.beta]).collect();
        assert!(multiset_distance(&basis.exponents(), &betas) < 1e-10);
    }
}
