use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CliError, Failure, Kind, NormalizationSpec, Polarization, Scenario};
use crate::forward::{assemble_dtn, solve_scattering, Axis, Incidence, MediumProfile};
use crate::greens::{green_eval_with, tail_bound, DipoleDensity, PlaneWaveIncidence};
use crate::inverse::{
    exact_moment, extract_moments, reciprocity_gap, reconstruct_difference, swap_direction,
    write_summary, InverseError, MomentOptions,
};
use crate::lattice::{build_modeset, ModeSet, Quasimomentum};
use crate::rayleigh::{efficiencies, write_efficiencies_csv, RayleighError, TangentialField};
use crate::sturm::{check_asymptotics, solve_sl_with, Normalization, SLProblem};
use crate::trig::TrigPoly;

struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: PathBuf) -> Result<Self, Failure> {
        std::fs::create_dir_all(&dir).map_err(|source| io_failure(&dir, source))?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|source| io_failure(&path, source))?;
        self.written.push(path);
        Ok(())
    }
}

fn io_failure(path: &std::path::Path, source: std::io::Error) -> Failure {
    Failure::new(
        "write_artifact",
        CliError::Io {
            path: path.to_path_buf(),
            source,
        },
    )
}

fn format_failure(e: std::io::Error) -> Failure {
    Failure::new(
        "format_table",
        CliError::Io {
            path: PathBuf::new(),
            source: e,
        },
    )
}

pub(super) fn execute(s: &Scenario) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Artifacts::new(s.output_dir.clone())?;
    match s.kind {
        Kind::Modes => modes(s, &mut out)?,
        Kind::Green => green(s, &mut out)?,
        Kind::Forward => forward(s, &mut out)?,
        Kind::Dtn => dtn(s, &mut out)?,
        Kind::Sturm => sturm(s, &mut out)?,
        Kind::Moments => moments(s, &mut out, false)?,
        Kind::Reconstruct => moments(s, &mut out, true)?,
        Kind::Gapcheck => gapcheck(s, &mut out)?,
    }
    Ok(out.written)
}

fn modeset(s: &Scenario, alpha: Quasimomentum) -> Result<ModeSet, Failure> {
    build_modeset(s.file.physics.k, alpha, s.file.numerics.order, s.wood_tol)
        .map_err(|e| Failure::new("build_modeset", e))
}

fn profile(s: &Scenario) -> &MediumProfile {
    s.profile.as_ref().expect("validated")
}

fn profile2(s: &Scenario) -> &MediumProfile {
    s.profile2.as_ref().expect("validated")
}

fn modes(s: &Scenario, out: &mut Artifacts) -> Result<(), Failure> {
    let ms = modeset(s, s.alpha)?;
    let mut buf = Vec::new();
    writeln!(buf, "n1,n2,alpha1,alpha2,re_beta,im_beta,propagating").map_err(format_failure)?;
    for m in ms.modes() {
        writeln!(
            buf,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            m.n.0,
            m.n.1,
            m.alpha[0],
            m.alpha[1],
            m.beta.re,
            m.beta.im,
            u8::from(m.propagating)
        )
        .map_err(format_failure)?;
    }
    out.write("modes.csv", &buf)
}

fn green(s: &Scenario, out: &mut Artifacts) -> Result<(), Failure> {
    let spec = s.file.green.as_ref().expect("validated");
    let ms = modeset(s, s.alpha)?;
    let mut buf = Vec::new();
    writeln!(buf, "x1,x2,x3,re_g,im_g,tail_bound").map_err(format_failure)?;
    for x in &spec.points {
        let g = green_eval_with(*x, spec.source, &ms, spec.delta_min)
            .map_err(|e| Failure::new("green_eval", e))?;
        let tail = tail_bound(&ms, (x[2] - spec.source[2]).abs())
            .map_err(|e| Failure::new("tail_bound", e))?;
        writeln!(
            buf,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            x[0], x[1], x[2], g.re, g.im, tail
        )
        .map_err(format_failure)?;
    }
    out.write("green.csv", &buf)
}

fn forward(s: &Scenario, out: &mut Artifacts) -> Result<(), Failure> {
    let ph = &s.file.physics;
    let prof = profile(s);
    let (incidence, plane) = match ph.a {
        Some(a) => {
            let ms = modeset(s, s.alpha)?;
            let density = match &s.file.density {
                Some(d) => {
                    let mut coeffs = vec![crate::vec3::ZERO; ms.len()];
                    for row in &d.coeffs {
                        let idx = ms
                            .index_of(row[0] as i32, row[1] as i32)
                            .filter(|_| row[0].fract() == 0.0 && row[1].fract() == 0.0)
                            .ok_or_else(|| {
                                super::invalid(format!(
                                    "density mode ({}, {}) is outside the truncation",
                                    row[0], row[1]
                                ))
                            })?;
                        coeffs[idx] = [
                            Complex64::new(row[2], row[3]),
                            Complex64::new(row[4], row[5]),
                            Complex64::new(0.0, 0.0),
                        ];
                    }
                    DipoleDensity::new(a, coeffs, &ms)
                }
                None => DipoleDensity::single_mode(
                    a,
                    &ms,
                    (0, 0),
                    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                ),
            }
            .map_err(|e| Failure::new("build_density", e))?;
            (Incidence::Density(density), None)
        }
        None => {
            let (t1, t2) = (ph.theta1.expect("validated"), ph.theta2.expect("validated"));
            let p = match ph.polarization {
                Polarization::S => PlaneWaveIncidence::s_polarized(ph.k, t1, t2),
                Polarization::P => PlaneWaveIncidence::p_polarized(ph.k, t1, t2),
            }
            .map_err(|e| Failure::new("plane_wave", e))?;
            (Incidence::PlaneWave(p), Some(p))
        }
    };
    let ms = modeset(s, s.alpha)?;
    let sol =
        solve_scattering(prof, &incidence, &ms).map_err(|e| Failure::new("solve_scattering", e))?;
    let mut buf = Vec::new();
    sol.scattered
        .write_csv(&ms, &mut buf)
        .map_err(|e| Failure::new("write_rayleigh", e))?;
    out.write("rayleigh.csv", &buf)?;
    let mut summary = Vec::new();
    writeln!(summary, "[forward]").map_err(format_failure)?;
    writeln!(summary, "modes = {}", ms.len()).map_err(format_failure)?;
    writeln!(summary, "layer_height = {:.16e}", sol.b).map_err(format_failure)?;
    let (div, _) = sol.scattered.divergence_defect(&ms);
    writeln!(summary, "divergence_defect = {div:.16e}").map_err(format_failure)?;
    if let Some(p) = plane {
        let eff = efficiencies(&sol.scattered, &p, &ms)
            .map_err(|e: RayleighError| Failure::new("efficiencies", e))?;
        let mut buf = Vec::new();
        write_efficiencies_csv(&eff, &mut buf)
            .map_err(|e| Failure::new("write_efficiencies", e))?;
        out.write("efficiencies.csv", &buf)?;
        let total: f64 = eff.iter().map(|e| e.efficiency).sum();
        writeln!(summary, "total_efficiency = {total:.16e}").map_err(format_failure)?;
        writeln!(summary, "absorbed = {:.16e}", 1.0 - total).map_err(format_failure)?;
    }
    out.write("summary.txt", &summary)
}

fn dtn(s: &Scenario, out: &mut Artifacts) -> Result<(), Failure> {
    let ms = modeset(s, s.alpha)?;
    let map = assemble_dtn(profile(s), &ms).map_err(|e| Failure::new("assemble_dtn", e))?;
    let m = map.matrix();
    let mut buf = Vec::new();
    writeln!(buf, "row_n1,row_n2,row_comp,col_n1,col_n2,col_comp,re,im").map_err(format_failure)?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (ri, ci) = (ms.mode(i / 2).n, ms.mode(j / 2).n);
            writeln!(
                buf,
                "{},{},{},{},{},{},{:.16e},{:.16e}",
                ri.0,
                ri.1,
                i % 2 + 1,
                ci.0,
                ci.1,
                j % 2 + 1,
                v.re,
                v.im
            )
            .map_err(format_failure)?;
        }
    }
    out.write("dtn.csv", &buf)?;
    let summary = format!(
        "[dtn]\nmodes = {}\nprovenance = {:016x}\nfrobenius_norm = {:.16e}\n",
        ms.len(),
        map.provenance(),
        map.norm()
    );
    out.write("summary.txt", summary.as_bytes())
}

/// Profile along `x1`, swapping coordinates for an `x2` profile.
fn along_x1(p: &MediumProfile, alpha: Quasimomentum) -> (MediumProfile, Quasimomentum) {
    if p.axis() == Axis::X2 {
        swap_direction(p, alpha)
    } else {
        (p.clone(), alpha)
    }
}

fn single_q(p: &MediumProfile) -> Result<TrigPoly, Failure> {
    let q = p.slabs()[0].q.clone();
    if p.slabs().iter().any(|s| s.q != q) {
        return Err(Failure::new(
            "sturm_profile",
            InverseError::NotOneDirectional,
        ));
    }
    Ok(q)
}

fn sturm(s: &Scenario, out: &mut Artifacts) -> Result<(), Failure> {
    let num = &s.file.numerics;
    let (p, alpha) = along_x1(profile(s), s.alpha);
    let q = single_q(&p)?;
    let problem = SLProblem::new(q, s.file.physics.k, alpha.alpha1, num.truncation)
        .map_err(|e| Failure::new("sl_problem", e))?;
    let norm = match num.normalization {
        NormalizationSpec::Value => Normalization::UnitValueAtOrigin,
        NormalizationSpec::L2 => Normalization::UnitL2,
    };
    let spec = solve_sl_with(&problem, norm).map_err(|e| Failure::new("solve_sl", e))?;
    let mut buf = Vec::new();
    spec.write_csv(&mut buf)
        .map_err(|e| Failure::new("write_spectrum", e))?;
    out.write("eigen.csv", &buf)?;
    if let Some([lo, hi]) = num.fit_range {
        let rep = check_asymptotics(&spec, &problem, lo, hi, num.fit_tol)
            .map_err(|e| Failure::new("check_asymptotics", e))?;
        let mut sm = Vec::new();
        let w = |e: std::io::Error| format_failure(e);
        writeln!(sm, "[asymptotics]").map_err(w)?;
        writeln!(sm, "shift_convention = {:?}", rep.shift_convention).map_err(w)?;
        writeln!(sm, "shift = {:.16e}", rep.shift).map_err(w)?;
        writeln!(
            sm,
            "mean_term = {:.16e} {:+.16e}i",
            rep.mean_term.re, rep.mean_term.im
        )
        .map_err(w)?;
        writeln!(
            sm,
            "expected_mean_term = {:.16e} {:+.16e}i",
            rep.expected_mean_term.re, rep.expected_mean_term.im
        )
        .map_err(w)?;
        let opt = |x: Option<f64>| x.map_or("none".to_string(), |v| format!("{v:.16e}"));
        writeln!(sm, "decay_exponent = {}", opt(rep.decay_exponent)).map_err(w)?;
        writeln!(
            sm,
            "eigenfunction_exponent = {}",
            opt(rep.eigenfunction_exponent)
        )
        .map_err(w)?;
        writeln!(sm, "max_remainder_alpha1 = {:.16e}", rep.max_remainder[0]).map_err(w)?;
        writeln!(
            sm,
            "max_remainder_alpha1_over_2pi = {:.16e}",
            rep.max_remainder[1]
        )
        .map_err(w)?;
        writeln!(sm, "n,remainder,eigenfunction_deviation").map_err(w)?;
        for (n, r, d) in &rep.samples {
            writeln!(sm, "{n},{r:.16e},{d:.16e}").map_err(w)?;
        }
        out.write("summary.txt", &sm)?;
    }
    Ok(())
}

fn moments(s: &Scenario, out: &mut Artifacts, reconstruct: bool) -> Result<(), Failure> {
    let num = &s.file.numerics;
    let (p1, alpha) = along_x1(profile(s), s.alpha);
    let (p2, _) = along_x1(profile2(s), s.alpha);
    let opts = MomentOptions {
        k: s.file.physics.k,
        alpha,
        truncation: num.truncation,
        schedule: num.schedule.clone(),
        a2_floor: num.a2_floor,
    };
    let table = extract_moments(&p1, &p2, num.degree, &opts)
        .map_err(|e| Failure::new("extract_moments", e))?;
    let mut buf = Vec::new();
    table
        .write_csv(&mut buf)
        .map_err(|e| Failure::new("write_moments", e))?;
    out.write("moments.csv", &buf)?;
    let result = if reconstruct {
        let r = reconstruct_difference(&table, num.degree)
            .map_err(|e| Failure::new("reconstruct_difference", e))?;
        let exact = single_q(&p1)?.sub(&single_q(&p2)?);
        let mut buf = Vec::new();
        writeln!(buf, "j,re_coeff,im_coeff,error_estimate,re_exact,im_exact")
            .map_err(format_failure)?;
        for ((j, c), err) in r.difference.terms().zip(&r.errors) {
            let e = exact.coeff(j);
            writeln!(
                buf,
                "{j},{:.16e},{:.16e},{err:.16e},{:.16e},{:.16e}",
                c.re, c.im, e.re, e.im
            )
            .map_err(format_failure)?;
        }
        out.write("reconstruction.csv", &buf)?;
        Some((r, exact))
    } else {
        None
    };
    let mut summary = Vec::new();
    write_summary(&table, result.as_ref().map(|r| &r.0), &mut summary)
        .map_err(|e| Failure::new("write_summary", e))?;
    if let Some((_, exact)) = &result {
        writeln!(summary, "[exact]").map_err(format_failure)?;
        for l in -(num.degree as i32)..=num.degree as i32 {
            let m = exact_moment(exact, l);
            writeln!(summary, "l = {l:3}  moment = {:.16e} {:+.16e}i", m.re, m.im)
                .map_err(format_failure)?;
        }
    }
    out.write("summary.txt", &summary)
}

fn random_trace(rng: &mut ChaCha8Rng, ms: &ModeSet, height: f64) -> TangentialField {
    let coeffs = ms
        .modes()
        .iter()
        .map(|m| {
            let w = (-0.5 * (m.n.0.abs() + m.n.1.abs()) as f64).exp();
            let mut draw =
                || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * w;
            [draw(), draw(), Complex64::new(0.0, 0.0)]
        })
        .collect();
    TangentialField::new(height, coeffs).expect("tangential by construction")
}

fn gapcheck(s: &Scenario, out: &mut Artifacts) -> Result<(), Failure> {
    let (p1, p2) = (profile(s), profile2(s));
    let ms = modeset(s, s.alpha)?;
    let b = p1.height();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut buf = Vec::new();
    writeln!(buf, "case,re_lhs,im_lhs,re_rhs,im_rhs,gap").map_err(format_failure)?;
    let mut worst: f64 = 0.0;
    for case in 0..s.file.numerics.cases {
        let f = random_trace(&mut rng, &ms, b);
        let g = random_trace(&mut rng, &ms, b);
        let rep =
            reciprocity_gap(p1, p2, &f, &g, &ms).map_err(|e| Failure::new("reciprocity_gap", e))?;
        worst = worst.max(rep.gap);
        writeln!(
            buf,
            "{case},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            rep.lhs.re, rep.lhs.im, rep.rhs.re, rep.rhs.im, rep.gap
        )
        .map_err(format_failure)?;
    }
    out.write("gap.csv", &buf)?;
    let summary = format!(
        "[gapcheck]\ncases = {}\nseed = {}\nmax_gap = {worst:.16e}\n",
        s.file.numerics.cases, s.seed
    );
    out.write("summary.txt", summary.as_bytes())
}
