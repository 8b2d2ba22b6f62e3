//! Collocation probe for `curl curl E − k² q E = 0` inside the layer.
//!
//! Derivatives in `x1, x2` are spectral, derivatives in `x3` come from the
//! modal exponentials. The product `qE` is formed on a physical grid fine
//! enough to be alias-free and projected back onto the mode set, so it does
//! not reuse the Toeplitz matrices of the solver. What is measured is the
//! in-band residual: the truncated solution cannot cancel the components of
//! `qE` that fall outside the mode set.

use num_complex::Complex64;

use super::layer::LayerField;
use super::ForwardError;
use crate::lattice::{analyze_grid, synthesize_grid};

/// Relative residual at each point: `|r(x)| / Σ_n |k² (qE)_n|`.
pub fn pde_residual(field: &LayerField, points: &[[f64; 3]]) -> Result<Vec<f64>, ForwardError> {
    let ms = field.modeset();
    let profile = field.solver().profile();
    let order = ms.order();
    let k2 = ms.k() * ms.k();
    let g1 = 2 * order + profile.degree() + 2;
    let g2 = 2 * order + 2;
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        let j = profile
            .slab_at(x[2])
            .ok_or(ForwardError::OutsideLayer(x[2]))?;
        let q = &profile.slabs()[j].q;
        let d0 = field.coefficients(x[2], 0)?.e;
        let d1 = field.coefficients(x[2], 1)?.e;
        let d2 = field.coefficients(x[2], 2)?.e;
        let mut cc = [Vec::new(), Vec::new(), Vec::new()];
        for (idx, m) in ms.modes().iter().enumerate() {
            let (ia1, ia2) = (
                Complex64::new(0.0, m.alpha[0]),
                Complex64::new(0.0, m.alpha[1]),
            );
            let div0 = ia1 * d0[0][idx] + ia2 * d0[1][idx] + d1[2][idx];
            let div1 = ia1 * d1[0][idx] + ia2 * d1[1][idx] + d2[2][idx];
            let grad_div = [ia1 * div0, ia2 * div0, div1];
            for c in 0..3 {
                let lap = -m.alpha_sqr() * d0[c][idx] + d2[c][idx];
                cc[c].push(grad_div[c] - lap);
            }
        }
        let qs = q.sample(g1);
        let mut residual = [Complex64::new(0.0, 0.0); 3];
        let mut scale = 0.0;
        for c in 0..3 {
            let mut samples = synthesize_grid(order, &d0[c], g1, g2);
            for (i, s) in samples.iter_mut().enumerate() {
                *s *= qs[i % g1];
            }
            let qe = analyze_grid(&samples, g1, g2, order);
            for (idx, m) in ms.modes().iter().enumerate() {
                let r = cc[c][idx] - k2 * qe[idx];
                let ph = Complex64::from_polar(1.0, m.alpha[0] * x[0] + m.alpha[1] * x[1]);
                residual[c] += r * ph;
                scale += k2 * qe[idx].norm();
            }
        }
        let num = residual.iter().map(|r| r.norm_sqr()).sum::<f64>().sqrt();
        out.push(if scale > 0.0 { num / scale } else { num });
    }
    Ok(out)
}
