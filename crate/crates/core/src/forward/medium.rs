//! Refractive-index profiles of the layer `0 < x3 < b` and their admissibility.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;

use super::ForwardError;
use crate::trig::TrigPoly;

/// Coordinate along which a one-directional profile varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
}

/// Sign constraint on `Im q`.
///
/// `Standard` is the physical absorbing condition `Im q ≥ 0`; `Adjoint` is its
/// mirror `Im q ≤ 0`, satisfied by `conj(q)` for any physical `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Admissibility {
    Standard,
    Adjoint,
}

/// A horizontal slab of constant height-profile: `q = q(x_axis)` for `z0 < x3 < z0 + thickness`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slab {
    pub thickness: f64,
    pub q: TrigPoly,
}

impl Slab {
    pub fn new(thickness: f64, q: TrigPoly) -> Self {
        Self { thickness, q }
    }
}

/// Stack of slabs from the plate `x3 = 0` up to `x3 = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumProfile {
    slabs: Vec<Slab>,
    axis: Axis,
    admissibility: Admissibility,
    gamma: f64,
    q_inf: f64,
    absorbing: bool,
}

fn check_grid(q: &TrigPoly) -> usize {
    (8 * q.degree() + 1).max(64)
}

impl MediumProfile {
    /// Checks `q = 1` above the layer, the sign of `Im q` and `Re q > 0` on a
    /// sampling grid; records `γ = min Re q` and `q_∞ = max |q|`.
    /// `exterior`, when given, is the index above `b` and must be 1.
    pub fn new(
        slabs: Vec<Slab>,
        axis: Axis,
        admissibility: Admissibility,
        exterior: Option<&TrigPoly>,
    ) -> Result<Self, ForwardError> {
        if slabs.is_empty() {
            return Err(ForwardError::InvalidProfile(
                "at least one slab is required".into(),
            ));
        }
        for (j, s) in slabs.iter().enumerate() {
            if !(s.thickness > 0.0 && s.thickness.is_finite()) {
                return Err(ForwardError::InvalidProfile(format!(
                    "slab {j} has non-positive thickness {}",
                    s.thickness
                )));
            }
            if s.q.terms().any(|(_, c)| !c.is_finite()) {
                return Err(ForwardError::InvalidProfile(format!(
                    "slab {j} has non-finite coefficients"
                )));
            }
        }
        if let Some(ext) = exterior {
            if ext
                .sub(&TrigPoly::constant(Complex64::new(1.0, 0.0)))
                .max_abs_coeff()
                > 0.0
            {
                return Err(ForwardError::Admissibility {
                    assumption: "A1",
                    detail: "q must equal 1 above the layer height b".into(),
                });
            }
        }
        let mut gamma = f64::INFINITY;
        let mut q_inf: f64 = 0.0;
        let mut absorbing = false;
        for (j, s) in slabs.iter().enumerate() {
            for v in s.q.sample(check_grid(&s.q)) {
                let im = match admissibility {
                    Admissibility::Standard => v.im,
                    Admissibility::Adjoint => -v.im,
                };
                if im < -1e-14 * v.norm().max(1.0) {
                    return Err(ForwardError::Admissibility {
                        assumption: "A2",
                        detail: format!("slab {j}: Im q = {:.3e} has the wrong sign", v.im),
                    });
                }
                absorbing |= im > 0.0;
                gamma = gamma.min(v.re);
                q_inf = q_inf.max(v.norm());
            }
        }
        if gamma <= 0.0 {
            return Err(ForwardError::Admissibility {
                assumption: "A3",
                detail: format!("Re q must stay positive, minimum sampled value is {gamma:.3e}"),
            });
        }
        Ok(Self {
            slabs,
            axis,
            admissibility,
            gamma,
            q_inf,
            absorbing,
        })
    }

    /// Single slab of height `b` varying in `x1`.
    pub fn single(b: f64, q: TrigPoly) -> Result<Self, ForwardError> {
        Self::new(
            vec![Slab::new(b, q)],
            Axis::X1,
            Admissibility::Standard,
            None,
        )
    }

    pub fn homogeneous(b: f64, q: Complex64) -> Result<Self, ForwardError> {
        Self::single(b, TrigPoly::constant(q))
    }

    /// Errors unless some sample has strictly positive absorption.
    pub fn require_absorbing(self) -> Result<Self, ForwardError> {
        if self.absorbing {
            Ok(self)
        } else {
            Err(ForwardError::Admissibility {
                assumption: "A2",
                detail: "an absorbing profile needs Im q > 0 somewhere".into(),
            })
        }
    }

    pub fn slabs(&self) -> &[Slab] {
        &self.slabs
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn admissibility(&self) -> Admissibility {
        self.admissibility
    }

    /// Layer height `b`.
    pub fn height(&self) -> f64 {
        self.slabs.iter().map(|s| s.thickness).sum()
    }

    /// Heights of the slab bottoms followed by `b`.
    pub fn interfaces(&self) -> Vec<f64> {
        let mut z = vec![0.0];
        for s in &self.slabs {
            z.push(z.last().copied().unwrap_or(0.0) + s.thickness);
        }
        z
    }

    /// Index of the slab containing height `x3` (interfaces belong to the lower slab).
    pub fn slab_at(&self, x3: f64) -> Option<usize> {
        let z = self.interfaces();
        if x3 < 0.0 || x3 > *z.last()? {
            return None;
        }
        (0..self.slabs.len()).find(|&j| x3 <= z[j + 1])
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn q_inf(&self) -> f64 {
        self.q_inf
    }

    pub fn is_absorbing(&self) -> bool {
        self.absorbing
    }

    pub fn is_one_directional(&self) -> bool {
        true
    }

    /// `q` at a point of the layer.
    pub fn q_at(&self, x: [f64; 3]) -> Option<Complex64> {
        let j = self.slab_at(x[2])?;
        let s = match self.axis {
            Axis::X1 => x[0],
            Axis::X2 => x[1],
        };
        Some(self.slabs[j].q.eval(s))
    }

    /// Pointwise conjugate profile; flips the admissibility class.
    pub fn conj(&self) -> Self {
        Self {
            slabs: self
                .slabs
                .iter()
                .map(|s| Slab::new(s.thickness, s.q.conj()))
                .collect(),
            axis: self.axis,
            admissibility: match self.admissibility {
                Admissibility::Standard => Admissibility::Adjoint,
                Admissibility::Adjoint => Admissibility::Standard,
            },
            gamma: self.gamma,
            q_inf: self.q_inf,
            absorbing: self.absorbing,
        }
    }

    /// Same profile labelled with the other variation axis.
    pub fn with_axis(&self, axis: Axis) -> Self {
        Self {
            axis,
            ..self.clone()
        }
    }

    /// Largest Fourier degree over all slabs.
    pub fn degree(&self) -> usize {
        self.slabs.iter().map(|s| s.q.degree()).max().unwrap_or(0)
    }

    /// Hash of every defining number, for provenance records.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.axis.hash(&mut h);
        self.admissibility.hash(&mut h);
        for s in &self.slabs {
            s.thickness.to_bits().hash(&mut h);
            for (j, c) in s.q.terms() {
                j.hash(&mut h);
                c.re.to_bits().hash(&mut h);
                c.im.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }
}

/// Splits cell-function terms `((j1, j2), c)` into a one-directional profile.
pub fn one_directional_from_terms(
    terms: &[((i32, i32), Complex64)],
) -> Result<(Axis, TrigPoly), ForwardError> {
    let varies1 = terms.iter().any(|((j1, _), c)| *j1 != 0 && c.norm() > 0.0);
    let varies2 = terms.iter().any(|((_, j2), c)| *j2 != 0 && c.norm() > 0.0);
    if varies1 && varies2 {
        return Err(ForwardError::NotOneDirectional);
    }
    let axis = if varies2 { Axis::X2 } else { Axis::X1 };
    let flat: Vec<(i32, Complex64)> = terms
        .iter()
        .map(|&((j1, j2), c)| (if varies2 { j2 } else { j1 }, c))
        .collect();
    Ok((axis, TrigPoly::from_terms(&flat)))
}
