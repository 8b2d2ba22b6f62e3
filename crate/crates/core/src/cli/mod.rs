//! Batch front-end: `gratescat <kind> <scenario.toml>`.
//!
//! Exit codes: 0 on success, 1 when the scenario does not parse or validate,
//! 2 when a solver fails on a valid scenario.

pub mod config;
mod pipelines;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use thiserror::Error;

pub use config::{
    AxisSpec, DensitySpec, GreenSpec, NormalizationSpec, Numerics, Output, Physics, Polarization,
    ProfileSpec, ScenarioFile, SlabSpec,
};

use crate::error::ErrorKind;
use crate::forward::{Admissibility, Axis, MediumProfile, Slab};
use crate::lattice::Quasimomentum;
use crate::trig::TrigPoly;
use crate::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("scenario kind `{kind}` needs a [{section}] section")]
    MissingSection {
        kind: &'static str,
        section: &'static str,
    },
}

impl ErrorKind for CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ConfigParse",
            CliError::Io { .. } => "Io",
            CliError::Invalid(_) => "InvalidScenario",
            CliError::MissingSection { .. } => "MissingSection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Mode table `(n, α_n, β_n)`.
    Modes,
    /// Quasi-periodic Green's function at listed points.
    Green,
    /// Scattering of a plane wave or dipole density.
    Forward,
    /// Dirichlet-to-Neumann matrix.
    Dtn,
    /// Sturm-Liouville spectrum, optionally with an asymptotic fit.
    Sturm,
    /// Moment table for a pair of profiles.
    Moments,
    /// Moments plus reconstruction of `q1 − q2`.
    Reconstruct,
    /// Randomised reciprocity-gap check for a pair of profiles.
    Gapcheck,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Modes => "modes",
            Kind::Green => "green",
            Kind::Forward => "forward",
            Kind::Dtn => "dtn",
            Kind::Sturm => "sturm",
            Kind::Moments => "moments",
            Kind::Reconstruct => "reconstruct",
            Kind::Gapcheck => "gapcheck",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gratescat",
    version,
    about = "Scattering by bi-periodic layers on a conducting plate"
)]
pub struct Args {
    pub kind: Kind,
    pub config: PathBuf,
    /// Overrides `[output] dir`.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Prints the fully resolved scenario before running.
    #[arg(long)]
    pub show_config: bool,
    /// Seed for randomised scenarios; overrides `[numerics] seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// An error tagged with the operation that raised it.
#[derive(Debug)]
pub struct Failure {
    pub operation: &'static str,
    pub error: Error,
}

impl Failure {
    pub fn new(operation: &'static str, error: impl Into<Error>) -> Self {
        Self {
            operation,
            error: error.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.error.is_solver_failure() {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}::{} failed with {}: {}",
            self.error.module(),
            self.operation,
            self.error.kind(),
            self.error
        )
    }
}

/// Validated scenario with every default made explicit.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: Kind,
    pub file: ScenarioFile,
    pub alpha: Quasimomentum,
    pub wood_tol: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub profile: Option<MediumProfile>,
    pub profile2: Option<MediumProfile>,
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::new("validate", CliError::Invalid(msg.into()))
}

fn coefficient_index(x: f64, what: &str) -> Result<i32, Failure> {
    if x.fract() != 0.0 || x.abs() > 1e6 {
        return Err(invalid(format!(
            "{what}: Fourier index {x} is not an integer"
        )));
    }
    Ok(x as i32)
}

fn slab_poly(rows: &[Vec<f64>], axis: Axis, slab: usize) -> Result<TrigPoly, Failure> {
    if rows.is_empty() {
        return Err(invalid(format!("slab {slab}: q has no coefficients")));
    }
    let what = format!("slab {slab}");
    match rows[0].len() {
        3 => {
            let mut terms = Vec::with_capacity(rows.len());
            for r in rows {
                if r.len() != 3 {
                    return Err(invalid(format!("{what}: mixed coefficient row lengths")));
                }
                terms.push((coefficient_index(r[0], &what)?, Complex64::new(r[1], r[2])));
            }
            Ok(TrigPoly::from_terms(&terms))
        }
        4 => {
            let mut terms = Vec::with_capacity(rows.len());
            for r in rows {
                if r.len() != 4 {
                    return Err(invalid(format!("{what}: mixed coefficient row lengths")));
                }
                let n = (
                    coefficient_index(r[0], &what)?,
                    coefficient_index(r[1], &what)?,
                );
                terms.push((n, Complex64::new(r[2], r[3])));
            }
            let (found, q) = crate::forward::one_directional_from_terms(&terms)
                .map_err(|e| Failure::new("build_profile", e))?;
            if q.degree() > 0 && found != axis {
                return Err(invalid(format!(
                    "{what}: coefficients vary along {found:?}, profile axis is {axis:?}"
                )));
            }
            Ok(q)
        }
        n => Err(invalid(format!(
            "{what}: coefficient rows need 3 or 4 entries, got {n}"
        ))),
    }
}

fn build_profile(spec: &ProfileSpec, b: Option<f64>, name: &str) -> Result<MediumProfile, Failure> {
    let axis = match spec.axis {
        AxisSpec::X1 => Axis::X1,
        AxisSpec::X2 => Axis::X2,
    };
    if spec.slabs.is_empty() {
        return Err(invalid(format!("[{name}] needs at least one slab")));
    }
    let mut slabs = Vec::with_capacity(spec.slabs.len());
    for (j, s) in spec.slabs.iter().enumerate() {
        let thickness = match (s.thickness, b) {
            (Some(t), _) => t,
            (None, Some(b)) if spec.slabs.len() == 1 => b,
            _ => return Err(invalid(format!("[{name}] slab {j} needs a thickness"))),
        };
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(invalid(format!(
                "[{name}] slab {j}: thickness must be positive, got {thickness}"
            )));
        }
        slabs.push(Slab::new(thickness, slab_poly(&s.q, axis, j)?));
    }
    let exterior = spec
        .exterior
        .map(|[re, im]| TrigPoly::constant(Complex64::new(re, im)));
    let profile = MediumProfile::new(slabs, axis, Admissibility::Standard, exterior.as_ref())
        .map_err(|e| Failure::new("build_profile", e))?;
    if let Some(b) = b {
        if (profile.height() - b).abs() > 1e-12 * b.max(1.0) {
            return Err(invalid(format!(
                "[{name}] slabs add up to {} but physics.b = {b}",
                profile.height()
            )));
        }
    }
    Ok(profile)
}

fn positive(value: f64, name: &str) -> Result<(), Failure> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {value}")))
    }
}

impl Scenario {
    /// Resolves defaults and checks the scenario invariants.
    pub fn resolve(
        kind: Kind,
        mut file: ScenarioFile,
        args_dir: Option<PathBuf>,
        args_seed: Option<u64>,
    ) -> Result<Self, Failure> {
        let ph = file.physics.clone();
        positive(ph.k, "physics.k")?;
        let has_angles = ph.theta1.is_some() || ph.theta2.is_some();
        let has_alpha = ph.alpha1.is_some() || ph.alpha2.is_some();
        let alpha = match (has_angles, has_alpha) {
            (true, true) => {
                return Err(invalid(
                    "give either theta1/theta2 or alpha1/alpha2, not both",
                ))
            }
            (true, false) => {
                Quasimomentum::from_angles(ph.k, ph.theta1.unwrap_or(0.0), ph.theta2.unwrap_or(0.0))
            }
            (false, _) => Quasimomentum::new(ph.alpha1.unwrap_or(0.0), ph.alpha2.unwrap_or(0.0)),
        };
        if has_angles {
            file.physics.theta1 = Some(ph.theta1.unwrap_or(0.0));
            file.physics.theta2 = Some(ph.theta2.unwrap_or(0.0));
        } else {
            file.physics.alpha1 = Some(alpha.alpha1);
            file.physics.alpha2 = Some(alpha.alpha2);
        }
        if let Some(b) = file.physics.b {
            positive(b, "physics.b")?;
        }
        if let Some(a) = file.physics.a {
            if !a.is_finite() {
                return Err(invalid("physics.a must be finite"));
            }
        }
        let num = file.numerics.clone();
        if num.order == 0 {
            return Err(invalid("numerics.order must be positive"));
        }
        if num.truncation == 0 {
            return Err(invalid("numerics.truncation must be positive"));
        }
        if num.schedule.contains(&0) {
            return Err(invalid("numerics.schedule entries must be positive"));
        }
        let wood_tol = num
            .wood_tol
            .unwrap_or(crate::lattice::default_wood_tol(file.physics.k));
        positive(wood_tol, "numerics.wood_tol")?;
        positive(num.a2_floor, "numerics.a2_floor")?;
        positive(num.fit_tol, "numerics.fit_tol")?;
        if num.cases == 0 {
            return Err(invalid("numerics.cases must be positive"));
        }
        if let Some([lo, hi]) = num.fit_range {
            if lo == 0 || hi <= lo {
                return Err(invalid(format!(
                    "numerics.fit_range [{lo}, {hi}] must satisfy 0 < lo < hi"
                )));
            }
        }
        file.numerics.wood_tol = Some(wood_tol);
        let seed = args_seed.or(num.seed).unwrap_or(0);
        file.numerics.seed = Some(seed);
        if let Some(dir) = &args_dir {
            file.output.dir = dir.display().to_string();
        }

        let b = file.physics.b;
        let profile = file
            .profile
            .as_ref()
            .map(|p| build_profile(p, b, "profile"))
            .transpose()?;
        let profile2 = file
            .profile2
            .as_ref()
            .map(|p| build_profile(p, b, "profile2"))
            .transpose()?;
        if file.physics.b.is_none() {
            if let Some(p) = &profile {
                file.physics.b = Some(p.height());
            }
        }
        for (spec, prof) in [
            (&mut file.profile, &profile),
            (&mut file.profile2, &profile2),
        ] {
            if let (Some(spec), Some(prof)) = (spec.as_mut(), prof.as_ref()) {
                for (s, slab) in spec.slabs.iter_mut().zip(prof.slabs()) {
                    s.thickness = Some(slab.thickness);
                }
            }
        }
        if let (Some(a), Some(b)) = (file.physics.a, file.physics.b) {
            if a <= b {
                return Err(invalid(format!(
                    "density height a = {a} must satisfy a > b (layer height b = {b})"
                )));
            }
        }

        let needs = |section: &'static str| {
            Failure::new(
                "validate",
                CliError::MissingSection {
                    kind: kind.name(),
                    section,
                },
            )
        };
        match kind {
            Kind::Forward | Kind::Dtn | Kind::Sturm if profile.is_none() => {
                return Err(needs("profile"))
            }
            Kind::Moments | Kind::Reconstruct | Kind::Gapcheck if profile.is_none() => {
                return Err(needs("profile"))
            }
            Kind::Moments | Kind::Reconstruct | Kind::Gapcheck if profile2.is_none() => {
                return Err(needs("profile2"))
            }
            Kind::Green if file.green.is_none() => return Err(needs("green")),
            _ => {}
        }
        if kind == Kind::Forward && file.physics.a.is_none() && !has_angles {
            return Err(invalid(
                "plane-wave forward scenarios need theta1/theta2 (or physics.a for a density)",
            ));
        }
        if kind == Kind::Gapcheck {
            let (h1, h2) = (
                profile.as_ref().map(|p| p.height()),
                profile2.as_ref().map(|p| p.height()),
            );
            if let (Some(h1), Some(h2)) = (h1, h2) {
                if (h1 - h2).abs() > 1e-12 * h1.max(1.0) {
                    return Err(invalid(format!(
                        "profiles have different heights {h1} and {h2}"
                    )));
                }
            }
        }
        let output_dir = PathBuf::from(&file.output.dir);
        Ok(Self {
            kind,
            file,
            alpha,
            wood_tol,
            seed,
            output_dir,
            profile,
            profile2,
        })
    }

    pub fn load(args: &Args) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(&args.config).map_err(|source| {
            Failure::new(
                "read_config",
                CliError::Io {
                    path: args.config.clone(),
                    source,
                },
            )
        })?;
        let file = ScenarioFile::parse(&text).map_err(|e| Failure::new("parse_config", e))?;
        Self::resolve(args.kind, file, args.output_dir.clone(), args.seed)
    }

    /// Resolved scenario as TOML, the `--show-config` echo.
    pub fn echo(&self) -> String {
        format!("# kind = \"{}\"\n{}", self.kind.name(), self.file.to_toml())
    }
}

/// Runs a parsed invocation and returns the written artifact paths.
pub fn run(args: &Args) -> Result<Vec<PathBuf>, Failure> {
    let scenario = Scenario::load(args)?;
    if args.show_config {
        print!("{}", scenario.echo());
    }
    pipelines::execute(&scenario)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&args) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
