//! Slab-stack recursion, the boundary value problem with data on `Γ_b` and
//! its Dirichlet-to-Neumann map.
//!
//! In slab `j` (`z0 < x3 < z1`) the tangential fields of one block are
//! `E_t = W(X(x3−z0) a + X(z1−x3) c)` and `H_t = V(X(x3−z0) a − X(z1−x3) c)`
//! with `X(s) = diag(e^{iγs})`. Both exponentials stay bounded, which keeps
//! the recursion stable for evanescent modes. Starting from the plate
//! (`a = −X c`) every interface match gives `a' = R' X' c'` and `c = K X' c'`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_complex::Complex64;

use super::medium::MediumProfile;
use super::modes::{solve_layer_modes, ModalBasis};
use super::{ForwardError, SINGULAR_MATCH_LIMIT};
use crate::lattice::ModeSet;
use crate::linalg::{self, CMat, Factored};
use crate::rayleigh::TangentialField;
use crate::vec3::{self, CVec3};

struct BlockStack {
    /// `a_j = R_j X_j c_j`.
    r: Vec<CMat>,
    /// `c_j = K_j X_{j+1} c_{j+1}` for all but the top slab.
    k: Vec<CMat>,
    /// Tangential `E` and `H` at `x3 = b` as functions of `c_top`.
    top_a: CMat,
    top_b: CMat,
    top: Factored,
}

struct Inner {
    modeset: ModeSet,
    profile: MediumProfile,
    bases: Vec<ModalBasis>,
    z: Vec<f64>,
    stacks: Vec<BlockStack>,
}

/// Factored layer operator for one `(profile, modeset)` pair; cheap to clone.
#[derive(Clone)]
pub struct LayerSolver {
    inner: Arc<Inner>,
}

fn phases(gamma: &[Complex64], s: f64) -> Vec<Complex64> {
    gamma
        .iter()
        .map(|g| (Complex64::i() * g * s).exp())
        .collect()
}

impl LayerSolver {
    pub fn new(profile: &MediumProfile, modeset: &ModeSet) -> Result<Self, ForwardError> {
        let bases: Vec<ModalBasis> = (0..profile.slabs().len())
            .map(|j| solve_layer_modes(profile, j, modeset))
            .collect::<Result<_, _>>()?;
        let z = profile.interfaces();
        let nb = modeset.block_len();
        let m = 2 * nb;
        let mut stacks = Vec::with_capacity(nb);
        for bi in 0..nb {
            let mut r = vec![linalg::scaled(
                &linalg::identity(m),
                Complex64::new(-1.0, 0.0),
            )];
            let mut kmats = Vec::new();
            let mut top = None;
            for (j, basis) in bases.iter().enumerate() {
                let blk = &basis.blocks[bi];
                let x = phases(&blk.gamma, profile.slabs()[j].thickness);
                let xrx = linalg::scale_rows(&x, &linalg::scale_cols(&r[j], &x));
                let eye = linalg::identity(m);
                let a = &blk.w * &(&xrx + &eye);
                let b = &blk.v * &(&xrx - &eye);
                if j + 1 == bases.len() {
                    top = Some((a, b));
                    break;
                }
                let next = &bases[j + 1].blocks[bi];
                let neg = |mat: &CMat| linalg::scaled(mat, Complex64::new(-1.0, 0.0));
                let sys = linalg::block2(&a, &neg(&next.w), &b, &neg(&next.v));
                let fact =
                    Factored::new(&sys).map_err(|e| ForwardError::EigenFailure(e.to_string()))?;
                if fact.condition > SINGULAR_MATCH_LIMIT {
                    return Err(ForwardError::SingularMatch {
                        context: format!("interface {} of block n2 = {}", j + 1, blk.n2),
                        condition: fact.condition,
                    });
                }
                let rhs = linalg::from_fn(2 * m, m, |i, c| {
                    if i < m {
                        next.w[(i, c)]
                    } else {
                        -next.v[(i - m, c)]
                    }
                });
                let sol = fact.solve(&rhs);
                kmats.push(linalg::sub(&sol, 0, 0, m, m));
                r.push(linalg::sub(&sol, m, 0, m, m));
            }
            let (top_a, top_b) = top.expect("profile has at least one slab");
            let fact =
                Factored::new(&top_a).map_err(|e| ForwardError::EigenFailure(e.to_string()))?;
            log::debug!("block {bi}: cond(A_top) = {:.3e}", fact.condition);
            if fact.condition > SINGULAR_MATCH_LIMIT {
                return Err(ForwardError::SingularMatch {
                    context: format!(
                        "trace match at x3 = b, block n2 = {}",
                        bases[0].blocks[bi].n2
                    ),
                    condition: fact.condition,
                });
            }
            stacks.push(BlockStack {
                r,
                k: kmats,
                top_a,
                top_b,
                top: fact,
            });
        }
        Ok(Self {
            inner: Arc::new(Inner {
                modeset: modeset.clone(),
                profile: profile.clone(),
                bases,
                z,
                stacks,
            }),
        })
    }

    pub fn modeset(&self) -> &ModeSet {
        &self.inner.modeset
    }

    pub fn profile(&self) -> &MediumProfile {
        &self.inner.profile
    }

    pub fn bases(&self) -> &[ModalBasis] {
        &self.inner.bases
    }

    /// Largest condition estimate of the trace-matching solves.
    pub fn max_condition(&self) -> f64 {
        self.inner
            .stacks
            .iter()
            .map(|s| s.top.condition)
            .fold(0.0, f64::max)
    }

    pub(crate) fn top_matrices(&self, block: usize) -> (&CMat, &CMat) {
        let s = &self.inner.stacks[block];
        (&s.top_a, &s.top_b)
    }

    /// Field from top-slab amplitudes `c_top` of every block.
    pub(crate) fn field_from_top(&self, c_top: Vec<Vec<Complex64>>) -> LayerField {
        let inner = &self.inner;
        let ns = inner.bases.len();
        let amps = c_top
            .into_iter()
            .enumerate()
            .map(|(bi, ctop)| {
                let stack = &inner.stacks[bi];
                let mut cs = vec![Vec::new(); ns];
                cs[ns - 1] = ctop;
                for j in (0..ns - 1).rev() {
                    let x = phases(
                        &inner.bases[j + 1].blocks[bi].gamma,
                        inner.profile.slabs()[j + 1].thickness,
                    );
                    let xc: Vec<Complex64> = x.iter().zip(&cs[j + 1]).map(|(a, b)| a * b).collect();
                    cs[j] = linalg::matvec(&stack.k[j], &xc);
                }
                (0..ns)
                    .map(|j| {
                        let x = phases(
                            &inner.bases[j].blocks[bi].gamma,
                            inner.profile.slabs()[j].thickness,
                        );
                        let xc: Vec<Complex64> = x.iter().zip(&cs[j]).map(|(a, b)| a * b).collect();
                        let a = linalg::matvec(&stack.r[j], &xc);
                        (a, cs[j].clone())
                    })
                    .collect()
            })
            .collect();
        LayerField {
            solver: self.clone(),
            amps,
        }
    }

    /// Solves with tangential trace `ν × E = f` on `Γ_b`.
    pub fn solve(&self, f: &TangentialField) -> Result<QpbvpSolution, ForwardError> {
        let ms = &self.inner.modeset;
        if f.len() != ms.len() {
            return Err(ForwardError::TruncationMismatch {
                got: f.len(),
                expected: ms.len(),
            });
        }
        let nb = ms.block_len();
        let c_top = (0..nb)
            .map(|bi| {
                // ν × E = (−E2, E1) = f
                let mut et = vec![Complex64::new(0.0, 0.0); 2 * nb];
                for i in 0..nb {
                    let fi = f.coeffs[bi * nb + i];
                    et[i] = fi[1];
                    et[nb + i] = -fi[0];
                }
                self.inner.stacks[bi].top.solve_vec(&et)
            })
            .collect();
        let field = self.field_from_top(c_top);
        let tf = field.curl_trace(self.height())?;
        Ok(QpbvpSolution { field, tf })
    }

    pub fn height(&self) -> f64 {
        *self.inner.z.last().expect("interfaces are never empty")
    }
}

/// Modal amplitudes of a solution inside the layer.
#[derive(Clone)]
pub struct LayerField {
    solver: LayerSolver,
    /// `amps[block][slab] = (a, c)`.
    amps: Vec<Vec<(Vec<Complex64>, Vec<Complex64>)>>,
}

/// Fourier coefficients (global mode order) of `E` and `H` and their
/// `x3`-derivatives at one height.
#[derive(Debug, Clone)]
pub struct FieldCoefficients {
    pub e: [Vec<Complex64>; 3],
    pub h: [Vec<Complex64>; 3],
}

impl LayerField {
    pub fn solver(&self) -> &LayerSolver {
        &self.solver
    }

    pub fn modeset(&self) -> &ModeSet {
        self.solver.modeset()
    }

    /// `∂^p/∂x3^p` of `E` and `H` coefficients at height `x3`, `p ≤ 3`.
    pub fn coefficients(&self, x3: f64, p: u32) -> Result<FieldCoefficients, ForwardError> {
        let inner = &self.solver.inner;
        let j = inner
            .profile
            .slab_at(x3)
            .ok_or(ForwardError::OutsideLayer(x3))?;
        let (z0, z1) = (inner.z[j], inner.z[j + 1]);
        let basis = &inner.bases[j];
        let k = basis.k;
        let nb = inner.modeset.block_len();
        let len = inner.modeset.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut e = [vec![zero; len], vec![zero; len], vec![zero; len]];
        let mut h = [vec![zero; len], vec![zero; len], vec![zero; len]];
        for (bi, blk) in basis.blocks.iter().enumerate() {
            let (a, c) = &self.amps[bi][j];
            let mut ue = Vec::with_capacity(2 * nb);
            let mut uh = Vec::with_capacity(2 * nb);
            for (i, g) in blk.gamma.iter().enumerate() {
                let ig = Complex64::i() * g;
                let up = ig.powu(p) * (ig * (x3 - z0)).exp() * a[i];
                let down = (-ig).powu(p) * (ig * (z1 - x3)).exp() * c[i];
                ue.push(up + down);
                uh.push(up - down);
            }
            let et = linalg::matvec(&blk.w, &ue);
            let ht = linalg::matvec(&blk.v, &uh);
            let ky = blk.ky;
            let curl_h3: Vec<Complex64> = (0..nb)
                .map(|i| basis.kx[i] * ht[nb + i] - ky * ht[i])
                .collect();
            let e3 = linalg::matvec(&basis.q_inv, &curl_h3);
            for i in 0..nb {
                let g = bi * nb + i;
                e[0][g] = et[i];
                e[1][g] = et[nb + i];
                e[2][g] = -e3[i] / k;
                h[0][g] = ht[i];
                h[1][g] = ht[nb + i];
                h[2][g] = (basis.kx[i] * et[nb + i] - ky * et[i]) / k;
            }
        }
        Ok(FieldCoefficients { e, h })
    }

    fn synth(&self, coeffs: &[Vec<Complex64>; 3], x: [f64; 3]) -> CVec3 {
        let mut out = vec3::ZERO;
        for (idx, m) in self.modeset().modes().iter().enumerate() {
            let ph = Complex64::from_polar(1.0, m.alpha[0] * x[0] + m.alpha[1] * x[1]);
            for c in 0..3 {
                out[c] += coeffs[c][idx] * ph;
            }
        }
        out
    }

    pub fn eval(&self, x: [f64; 3]) -> Result<CVec3, ForwardError> {
        let fc = self.coefficients(x[2], 0)?;
        Ok(self.synth(&fc.e, x))
    }

    /// `curl E = ikH` at `x`.
    pub fn eval_curl(&self, x: [f64; 3]) -> Result<CVec3, ForwardError> {
        let fc = self.coefficients(x[2], 0)?;
        let ik = Complex64::new(0.0, self.modeset().k());
        Ok(vec3::scale(ik, &self.synth(&fc.h, x)))
    }

    /// `ν × E` on the plane `x3`.
    pub fn tangential_trace(&self, x3: f64) -> Result<TangentialField, ForwardError> {
        let fc = self.coefficients(x3, 0)?;
        let coeffs = (0..self.modeset().len())
            .map(|i| vec3::e3_cross(&[fc.e[0][i], fc.e[1][i], fc.e[2][i]]))
            .collect();
        Ok(TangentialField { height: x3, coeffs })
    }

    /// `(curl E)_T = ν × (curl E × ν)` on the plane `x3`.
    pub fn curl_trace(&self, x3: f64) -> Result<TangentialField, ForwardError> {
        let fc = self.coefficients(x3, 0)?;
        let ik = Complex64::new(0.0, self.modeset().k());
        let coeffs = (0..self.modeset().len())
            .map(|i| [ik * fc.h[0][i], ik * fc.h[1][i], Complex64::new(0.0, 0.0)])
            .collect();
        Ok(TangentialField { height: x3, coeffs })
    }
}

/// Output of [`solve_qpbvp`].
#[derive(Clone)]
pub struct QpbvpSolution {
    pub field: LayerField,
    /// `T(f) = ν × (curl E × ν)` on `Γ_b`.
    pub tf: TangentialField,
}

pub fn solve_qpbvp(
    profile: &MediumProfile,
    f: &TangentialField,
    modeset: &ModeSet,
) -> Result<QpbvpSolution, ForwardError> {
    LayerSolver::new(profile, modeset)?.solve(f)
}

/// Matrix of `T` on the truncated tangential space, block-diagonal in `n2`.
///
/// Each block acts on `[f1 (n1 = −N..N); f2 (n1 = −N..N)]` of one `n2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnMap {
    pub blocks: Vec<CMat>,
    pub profile_hash: u64,
    pub modeset_hash: u64,
}

impl DtnMap {
    pub fn provenance(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.profile_hash.hash(&mut h);
        self.modeset_hash.hash(&mut h);
        h.finish()
    }

    /// Dense matrix with row/column index `2·mode + component`.
    pub fn matrix(&self) -> CMat {
        let nb = self.blocks.len();
        let len = nb * nb;
        let mut out = linalg::zeros(2 * len, 2 * len);
        for (bi, blk) in self.blocks.iter().enumerate() {
            for r in 0..2 * nb {
                for c in 0..2 * nb {
                    let gi = 2 * (bi * nb + r % nb) + r / nb;
                    let gj = 2 * (bi * nb + c % nb) + c / nb;
                    out[(gi, gj)] = blk[(r, c)];
                }
            }
        }
        out
    }

    pub fn apply(&self, f: &TangentialField) -> Result<TangentialField, ForwardError> {
        let nb = self.blocks.len();
        if f.len() != nb * nb {
            return Err(ForwardError::TruncationMismatch {
                got: f.len(),
                expected: nb * nb,
            });
        }
        let mut coeffs = vec![vec3::ZERO; f.len()];
        for (bi, blk) in self.blocks.iter().enumerate() {
            let v: Vec<Complex64> = (0..2 * nb)
                .map(|r| f.coeffs[bi * nb + r % nb][r / nb])
                .collect();
            let out = linalg::matvec(blk, &v);
            for r in 0..2 * nb {
                coeffs[bi * nb + r % nb][r / nb] = out[r];
            }
        }
        Ok(TangentialField {
            height: f.height,
            coeffs,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(linalg::is_finite)
    }

    /// Largest induced 1-norm over blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::norm_one).fold(0.0, f64::max)
    }
}

/// `T` block by block: `ik · B A⁻¹ · J` with `J f = (f2, −f1)`.
pub fn assemble_dtn(profile: &MediumProfile, modeset: &ModeSet) -> Result<DtnMap, ForwardError> {
    let solver = LayerSolver::new(profile, modeset)?;
    Ok(dtn_from_solver(&solver))
}

pub fn dtn_from_solver(solver: &LayerSolver) -> DtnMap {
    let ms = solver.modeset();
    let nb = ms.block_len();
    let ik = Complex64::new(0.0, ms.k());
    let j = linalg::from_fn(2 * nb, 2 * nb, |r, c| {
        if r < nb && c == r + nb {
            Complex64::new(1.0, 0.0)
        } else if r >= nb && c + nb == r {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let blocks = solver
        .inner
        .stacks
        .iter()
        .map(|s| linalg::scaled(&(&s.top_b * &s.top.solve(&j)), ik))
        .collect();
    DtnMap {
        blocks,
        profile_hash: solver.profile().fingerprint(),
        modeset_hash: ms.fingerprint(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Quasimomentum;
    use crate::trig::TrigPoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn profile() -> MediumProfile {
        MediumProfile::single(
            0.8,
            TrigPoly::from_terms(&[(0, c(2.0, 0.2)), (1, c(0.3, 0.0)), (-1, c(0.3, 0.05))]),
        )
        .unwrap()
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.2, 0.1), 2).unwrap();
        let sol = solve_qpbvp(&profile(), &TangentialField::zeros(&ms, 0.8), &ms).unwrap();
        assert_eq!(sol.tf.max_abs(), 0.0);
    }

    #[test]
    fn trace_is_reproduced_and_plate_is_clean() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.2, 0.1), 2).unwrap();
        let mut f = TangentialField::zeros(&ms, 0.8);
        for (i, v) in f.coeffs.iter_mut().enumerate() {
            *v = [
                c(0.1 * i as f64, 0.3),
                c(-0.2, 0.05 * i as f64),
                c(0.0, 0.0),
            ];
        }
        let sol = solve_qpbvp(&profile(), &f, &ms).unwrap();
        let back = sol.field.tangential_trace(0.8).unwrap();
        assert!(back.minus(&f).max_abs() < 1e-11 * f.max_abs());
        assert!(sol.field.tangential_trace(0.0).unwrap().max_abs() < 1e-11 * f.max_abs());
    }

    #[test]
    fn dtn_columns_match_direct_solves() {
        let ms = ModeSet::new(1.0, Quasimomentum::new(0.2, 0.1), 1).unwrap();
        let p = profile();
        let dtn = assemble_dtn(&p, &ms).unwrap();
        let mat = dtn.matrix();
        for idx in 0..ms.len() {
            for comp in 0..2 {
                let mut f = TangentialField::zeros(&ms, 0.8);
                f.coeffs[idx][comp] = c(1.0, 0.0);
                let tf = solve_qpbvp(&p, &f, &ms).unwrap().tf;
                for r in 0..ms.len() {
                    for rc in 0..2 {
                        let d = (mat[(2 * r + rc, 2 * idx + comp)] - tf.coeffs[r][rc]).norm();
                        assert!(d < 1e-10 * (1.0 + tf.max_abs()));
                    }
                }
            }
        }
    }
}
