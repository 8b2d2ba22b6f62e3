//! Crate-level error wrapping the per-module errors.

use thiserror::Error;

use crate::cli::CliError;
use crate::forward::ForwardError;
use crate::greens::GreensError;
use crate::inverse::InverseError;
use crate::lattice::LatticeError;
use crate::rayleigh::RayleighError;
use crate::separable::SeparableError;
use crate::sturm::SturmError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice: {0}")]
    Lattice(#[from] LatticeError),
    #[error("greens: {0}")]
    Greens(#[from] GreensError),
    #[error("rayleigh_dtn: {0}")]
    Rayleigh(#[from] RayleighError),
    #[error("forward: {0}")]
    Forward(#[from] ForwardError),
    #[error("sturm: {0}")]
    Sturm(#[from] SturmError),
    #[error("separable: {0}")]
    Separable(#[from] SeparableError),
    #[error("inverse: {0}")]
    Inverse(#[from] InverseError),
    #[error("cli: {0}")]
    Cli(#[from] CliError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Name of the failure, e.g. `WoodAnomaly`, resolved through wrapped errors.
pub trait ErrorKind {
    fn kind(&self) -> &'static str;
}

impl ErrorKind for LatticeError {
    fn kind(&self) -> &'static str {
        match self {
            LatticeError::WoodAnomaly { .. } => "WoodAnomaly",
            LatticeError::GridTooCoarse { .. } => "GridTooCoarse",
            LatticeError::SampleCount { .. } => "SampleCount",
            LatticeError::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

impl ErrorKind for GreensError {
    fn kind(&self) -> &'static str {
        match self {
            GreensError::PointsTooClose { .. } => "PointsTooClose",
            GreensError::Lattice(e) => e.kind(),
            GreensError::InvalidDensity(_) => "InvalidDensity",
            GreensError::InvalidIncidence(_) => "InvalidIncidence",
        }
    }
}

impl ErrorKind for RayleighError {
    fn kind(&self) -> &'static str {
        match self {
            RayleighError::TruncationMismatch { .. } => "TruncationMismatch",
            RayleighError::DivergenceViolation { .. } => "DivergenceViolation",
            RayleighError::NotTangential(_) => "NotTangential",
            RayleighError::NotUpgoing => "NotUpgoing",
            RayleighError::IncidenceMismatch => "IncidenceMismatch",
            RayleighError::Io(_) => "Io",
        }
    }
}

impl ErrorKind for ForwardError {
    fn kind(&self) -> &'static str {
        match self {
            ForwardError::InvalidProfile(_) => "InvalidProfile",
            ForwardError::Admissibility { .. } => "Admissibility",
            ForwardError::NotOneDirectional => "NotOneDirectional",
            ForwardError::WrongAxis => "WrongAxis",
            ForwardError::InvalidParameter(_) => "InvalidParameter",
            ForwardError::EigenFailure(_) => "EigenFailure",
            ForwardError::IllConditionedBasis { .. } => "IllConditionedBasis",
            ForwardError::SingularMatch { .. } => "SingularMatch",
            ForwardError::TruncationMismatch { .. } => "TruncationMismatch",
            ForwardError::OutsideLayer(_) => "OutsideLayer",
            ForwardError::Lattice(e) => e.kind(),
            ForwardError::Greens(e) => e.kind(),
            ForwardError::Rayleigh(e) => e.kind(),
        }
    }
}

impl ErrorKind for SturmError {
    fn kind(&self) -> &'static str {
        match self {
            SturmError::InvalidProblem(_) => "InvalidProblem",
            SturmError::TruncationTooSmall { .. } => "TruncationTooSmall",
            SturmError::EigenFailure(_) => "EigenFailure",
            SturmError::ResidualTooLarge { .. } => "ResidualTooLarge",
            SturmError::NormalizationDegenerate { .. } => "NormalizationDegenerate",
            SturmError::FitInconclusive { .. } => "FitInconclusive",
            SturmError::TooFewBranches(_) => "TooFewBranches",
            SturmError::Io(_) => "Io",
        }
    }
}

impl ErrorKind for SeparableError {
    fn kind(&self) -> &'static str {
        match self {
            SeparableError::ZeroLambda => "ZeroLambda",
            SeparableError::DegenerateDenominator { .. } => "DegenerateDenominator",
            SeparableError::LambdaMismatch { .. } => "LambdaMismatch",
            SeparableError::MissingBranch(_) => "MissingBranch",
            SeparableError::ProfileMismatch(_) => "ProfileMismatch",
        }
    }
}

impl ErrorKind for InverseError {
    fn kind(&self) -> &'static str {
        match self {
            InverseError::Forward(e) => e.kind(),
            InverseError::Sturm(e) => e.kind(),
            InverseError::Separable(e) => e.kind(),
            InverseError::A2Floor { .. } => "A2Floor",
            InverseError::InsufficientDegree { .. } => "InsufficientDegree",
            InverseError::InvalidSchedule(_) => "InvalidSchedule",
            InverseError::WrongAxis => "WrongAxis",
            InverseError::NotOneDirectional => "NotOneDirectional",
            InverseError::Io(_) => "Io",
        }
    }
}

impl ErrorKind for Error {
    fn kind(&self) -> &'static str {
        match self {
            Error::Lattice(e) => e.kind(),
            Error::Greens(e) => e.kind(),
            Error::Rayleigh(e) => e.kind(),
            Error::Forward(e) => e.kind(),
            Error::Sturm(e) => e.kind(),
            Error::Separable(e) => e.kind(),
            Error::Inverse(e) => e.kind(),
            Error::Cli(e) => e.kind(),
        }
    }
}

impl Error {
    /// Module that raised the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Lattice(_) => "lattice",
            Error::Greens(_) => "greens",
            Error::Rayleigh(_) => "rayleigh_dtn",
            Error::Forward(_) => "forward",
            Error::Sturm(_) => "sturm",
            Error::Separable(_) => "separable",
            Error::Inverse(_) => "inverse",
            Error::Cli(_) => "cli",
        }
    }

    /// Numerical failures of an otherwise valid scenario (CLI exit code 2).
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self.kind(),
            "WoodAnomaly"
                | "EigenFailure"
                | "SingularMatch"
                | "IllConditionedBasis"
                | "ResidualTooLarge"
                | "NormalizationDegenerate"
                | "FitInconclusive"
                | "DegenerateDenominator"
                | "A2Floor"
        )
    }
}
