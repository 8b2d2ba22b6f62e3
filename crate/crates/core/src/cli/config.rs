//! Scenario files.
//!
//! One scenario per TOML file with flat sections:
//!
//! ```toml
//! [physics]
//! k = 1.2
//! theta1 = 0.3          # or alpha1/alpha2 directly
//! theta2 = 0.1
//! b = 1.0
//!
//! [profile]
//! axis = "x1"
//! [[profile.slabs]]
//! thickness = 1.0
//! q = [[0, 1.5, 0.1], [1, 0.15, 0.0], [-1, 0.15, 0.0]]
//!
//! [numerics]
//! order = 8
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Coefficient rows are `[n, re, im]` along the profile axis or
//! `[n1, n2, re, im]` for a full bi-periodic term list.

use serde::{Deserialize, Serialize};

use super::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub physics: Physics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    /// Second medium for `moments`, `reconstruct` and `gapcheck`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile2: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub green: Option<GreenSpec>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    /// Layer height.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Height of the incident dipole density.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default = "default_polarization")]
    pub polarization: Polarization,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    S,
    P,
}

fn default_polarization() -> Polarization {
    Polarization::S
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum AxisSpec {
    #[default]
    X1,
    X2,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(default)]
    pub axis: AxisSpec,
    /// `[re, im]` of the index above the layer; must be 1 when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exterior: Option<[f64; 2]>,
    pub slabs: Vec<SlabSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SlabSpec {
    /// Defaults to `physics.b` for a single slab.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
    pub q: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    /// Rows `[n1, n2, re_g1, im_g1, re_g2, im_g2]`.
    pub coeffs: Vec<[f64; 6]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GreenSpec {
    pub source: [f64; 3],
    pub points: Vec<[f64; 3]>,
    #[serde(default = "default_delta_min")]
    pub delta_min: f64,
}

fn default_delta_min() -> f64 {
    crate::greens::DEFAULT_DELTA_MIN
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    /// Square truncation `N` of the Fourier modes.
    #[serde(default = "defaults::order")]
    pub order: usize,
    /// Sturm-Liouville truncation `M`.
    #[serde(default = "defaults::truncation")]
    pub truncation: usize,
    #[serde(default = "defaults::schedule")]
    pub schedule: Vec<usize>,
    /// Defaults to `1e-8·k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wood_tol: Option<f64>,
    #[serde(default = "defaults::a2_floor")]
    pub a2_floor: f64,
    /// Highest moment index `|l|` for `moments`/`reconstruct`.
    #[serde(default = "defaults::degree")]
    pub degree: usize,
    #[serde(default = "defaults::normalization")]
    pub normalization: NormalizationSpec,
    /// Branch window for the `sturm` asymptotic fit; no fit when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_range: Option<[u32; 2]>,
    #[serde(default = "defaults::fit_tol")]
    pub fit_tol: f64,
    /// Randomised `(f, g)` pairs for `gapcheck`.
    #[serde(default = "defaults::cases")]
    pub cases: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationSpec {
    Value,
    L2,
}

mod defaults {
    use super::NormalizationSpec;

    pub fn order() -> usize {
        8
    }
    pub fn truncation() -> usize {
        128
    }
    pub fn schedule() -> Vec<usize> {
        vec![16, 24, 32, 48, 64]
    }
    pub fn a2_floor() -> f64 {
        1e-6
    }
    pub fn degree() -> usize {
        2
    }
    pub fn normalization() -> NormalizationSpec {
        NormalizationSpec::Value
    }
    pub fn fit_tol() -> f64 {
        1.0
    }
    pub fn cases() -> usize {
        20
    }
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            order: defaults::order(),
            truncation: defaults::truncation(),
            schedule: defaults::schedule(),
            wood_tol: None,
            a2_floor: defaults::a2_floor(),
            degree: defaults::degree(),
            normalization: defaults::normalization(),
            fit_range: None,
            fit_tol: defaults::fit_tol(),
            cases: defaults::cases(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default = "default_dir")]
    pub dir: String,
}

fn default_dir() -> String {
    ".".into()
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: default_dir() }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario is always serialisable")
    }
}
