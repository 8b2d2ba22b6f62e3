//! Forward solver for media `q = q(x1)` stacked in `x3`-uniform slabs on a
//! perfectly conducting plate: modal bases, the quasi-periodic boundary value
//! problem, its Dirichlet-to-Neumann map and the full scattering problem.

pub mod layer;
pub mod medium;
pub mod modes;
pub mod probe;
pub mod scatter;

use thiserror::Error;

use crate::greens::GreensError;
use crate::lattice::LatticeError;
use crate::rayleigh::RayleighError;

pub use layer::{assemble_dtn, solve_qpbvp, DtnMap, LayerField, LayerSolver, QpbvpSolution};
pub use medium::{one_directional_from_terms, Admissibility, Axis, MediumProfile, Slab};
pub use modes::{solve_layer_modes, ModalBasis};
pub use probe::pde_residual;
pub use scatter::{solve_scattering, Incidence, ScatteringSolution};

/// Linear solves with a condition estimate above this fail with `SingularMatch`.
pub const SINGULAR_MATCH_LIMIT: f64 = 1e12;

#[derive(Debug, Error)]
pub enum ForwardError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("assumption {assumption} violated: {detail}")]
    Admissibility {
        assumption: &'static str,
        detail: String,
    },
    #[error("profile depends on both x1 and x2")]
    NotOneDirectional,
    #[error("the layer solver needs q = q(x1); swap the coordinates first")]
    WrongAxis,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("eigen-decomposition failed: {0}")]
    EigenFailure(String),
    #[error("ill-conditioned modal basis in slab {slab} (condition {condition:.3e})")]
    IllConditionedBasis { slab: usize, condition: f64 },
    #[error("singular match in {context} (condition {condition:.3e})")]
    SingularMatch { context: String, condition: f64 },
    #[error("data has {got} modes but the mode set has {expected}")]
    TruncationMismatch { got: usize, expected: usize },
    #[error("height {0} lies outside the layer")]
    OutsideLayer(f64),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error(transparent)]
    Rayleigh(#[from] RayleighError),
}
