//! Experiment orchestration for the command-line tool: configuration,
//! runners for each subcommand and deterministic CSV/JSON output.

mod config;
mod output;
mod selftest;

pub use config::{
    AveragingParams, CertificateParams, DiscRoute, ExperimentConfig, MeasureSpec, ObstructionParams, PoletskyParams,
    ScheduleParams, Variant,
};
pub use output::{fmt_f64, write_csv, write_json, Metadata};
pub use selftest::{run_selftest_checks, SelfTestCheck};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::averaging::{g_pushforward_measure, pushforward_power_moments, weak_gap, AveragingError, CircleMeasure};
use crate::currents::{battery_by_labels, convergence_experiment, vertical_experiment, ConvergenceRow, CurrentError};
use crate::disc::{build_outer_function, ArcUnion, DiscError, OuterFunction, OuterMethod};
use crate::hull::{find_certificate, hull_contains, verify_certificate, ExampleSet, HullError};
use crate::poletsky::{
    build_composite_disc, build_vertical_disc_at, select_radius_schedule_on_grid, verify_poletsky_on_grid,
    PoletskyError, PoletskyReport, RadiusSchedule,
};
use crate::winding::{obstruction_demo, TubeSpec, WindingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl HarnessError {
    /// 2 for verification failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Verification(_) => 2,
            _ => 1,
        }
    }
}

/// Files written by a run and the lines to print.
#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

fn context(cfg: &ExperimentConfig, stage: &str) -> String {
    format!(
        "{stage} [variant {:?}, p = ({}, {}), config {}]",
        cfg.variant,
        cfg.point.z,
        cfg.point.w,
        &cfg.hash()[..12]
    )
}

fn disc_err(cfg: &ExperimentConfig, stage: &str, e: DiscError) -> HarnessError {
    HarnessError::Config(format!("{}: {e}", context(cfg, stage)))
}

fn poletsky_err(cfg: &ExperimentConfig, stage: &str, e: PoletskyError) -> HarnessError {
    let msg = format!("{}: {e}", context(cfg, stage));
    match e {
        PoletskyError::ScheduleExhausted { .. } => HarnessError::Verification(msg),
        _ => HarnessError::Config(msg),
    }
}

fn current_err(cfg: &ExperimentConfig, stage: &str, e: CurrentError) -> HarnessError {
    match e {
        CurrentError::Poletsky(p) => poletsky_err(cfg, stage, p),
        other => HarnessError::Config(format!("{}: {other}", context(cfg, stage))),
    }
}

fn hull_err(cfg: &ExperimentConfig, stage: &str, e: HullError) -> HarnessError {
    let msg = format!("{}: {e}", context(cfg, stage));
    match e {
        HullError::CertificateNotFound { .. } | HullError::VerificationFailed { .. } => HarnessError::Verification(msg),
        _ => HarnessError::Config(msg),
    }
}

fn base_metadata(cfg: &ExperimentConfig) -> Metadata {
    Metadata::new(cfg.hash())
        .with("quadrature", &cfg.scaled_quadrature())
        .with("grid_scale", &cfg.grid_scale)
        .with("seed", &cfg.seed)
}

/// The outer function g selected by `g_method`.
pub fn build_g(cfg: &ExperimentConfig) -> Result<OuterFunction, HarnessError> {
    match cfg.g_method {
        OuterMethod::ClosedFormIplus => Ok(OuterFunction::closed_form_iplus()),
        OuterMethod::Fourier => {
            build_outer_function(&cfg.effective_arcs(), cfg.truncation_order).map_err(|e| disc_err(cfg, "outer function", e))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct GapSummary {
    label: String,
    nu: usize,
    limit: f64,
    gap: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ConvergeData<'a> {
    route: &'static str,
    rows: &'a [ConvergenceRow],
    schedule: Option<&'a RadiusSchedule>,
    final_gaps: Vec<GapSummary>,
}

/// Convergence table for ⟨T_ν, dd^c u⟩ → ⟨T, dd^c u⟩ and the Poletsky
/// conditions of every disc used.
pub fn run_converge(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, HarnessError> {
    let route = cfg.validate_converge()?;
    let battery = battery_by_labels(&cfg.battery).map_err(|e| current_err(cfg, "battery", e))?;
    let q = cfg.scaled_quadrature();
    let set = cfg.example_set();
    let p = cfg.point;
    let (boundary, interior) = cfg.poletsky_grids();
    let rho = cfg.poletsky.rho_u;
    let (rows, schedule, reports): (Vec<ConvergenceRow>, Option<RadiusSchedule>, Vec<(usize, PoletskyReport)>) =
        match route {
            DiscRoute::Composite => {
                let g = build_g(cfg)?.shared();
                let schedule = select_radius_schedule_on_grid(&g, cfg.nu_max(), cfg.schedule.eps, cfg.schedule_grid())
                    .map_err(|e| poletsky_err(cfg, "radius schedule", e))?;
                let rows = convergence_experiment(&p, &g, &schedule, &cfg.nus, &battery, &q)
                    .map_err(|e| current_err(cfg, "convergence", e))?;
                let mut reports = Vec::new();
                for &nu in &cfg.nus {
                    let r = schedule.radius(nu).expect("schedule covers the nu list");
                    let disc = build_composite_disc(p.z, g.clone(), nu as u32, r)
                        .map_err(|e| poletsky_err(cfg, "composite disc", e))?;
                    let rep = verify_poletsky_on_grid(&disc, &set, &p, rho, boundary, interior)
                        .map_err(|e| poletsky_err(cfg, "Poletsky check", e))?;
                    reports.push((nu, rep));
                }
                (rows, Some(schedule), reports)
            }
            DiscRoute::Vertical => {
                let arcs = cfg.effective_arcs();
                let rows = vertical_experiment(&arcs, &p, &cfg.nus, &battery, &q)
                    .map_err(|e| current_err(cfg, "convergence", e))?;
                let disc = build_vertical_disc_at(&arcs, &p).map_err(|e| poletsky_err(cfg, "vertical disc", e))?;
                let rep = verify_poletsky_on_grid(&disc, &set, &p, rho, boundary, interior)
                    .map_err(|e| poletsky_err(cfg, "Poletsky check", e))?;
                (rows, None, cfg.nus.iter().map(|&nu| (nu, rep.clone())).collect())
            }
        };

    let nu_last = *cfg.nus.last().unwrap();
    let final_gaps: Vec<GapSummary> = rows
        .iter()
        .filter(|r| r.nu == nu_last)
        .map(|r| GapSummary { label: r.label.clone(), nu: r.nu, limit: r.t, gap: r.gap })
        .collect();

    let meta = base_metadata(cfg)
        .with("schedule_grid", &cfg.schedule_grid())
        .with("poletsky_grids", &[boundary, interior])
        .with("rho_u", &rho);
    output::ensure_dir(out)?;
    let mut files = Vec::new();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.nu.to_string(), r.label.clone(), fmt_f64(r.t_nu), fmt_f64(r.t), fmt_f64(r.gap)])
        .collect();
    files.push(write_csv(out, "converge.csv", &meta, &["nu", "label", "Tnu", "T", "gap"], &table)?);
    let route_name = match route {
        DiscRoute::Composite => "composite",
        DiscRoute::Vertical => "vertical",
    };
    let data = ConvergeData { route: route_name, rows: &rows, schedule: schedule.as_ref(), final_gaps };
    files.push(write_json(out, "converge.json", &meta, &data)?);
    let table: Vec<Vec<String>> = reports
        .iter()
        .map(|(nu, r)| {
            vec![nu.to_string(), fmt_f64(r.r), fmt_f64(r.center_gap), fmt_f64(r.hull_excess), fmt_f64(r.bad_measure)]
        })
        .collect();
    files.push(write_csv(
        out,
        "poletsky.csv",
        &meta,
        &["nu", "r_nu", "center_gap", "hull_excess", "bad_measure"],
        &table,
    )?);
    let json_reports: Vec<&PoletskyReport> = reports.iter().map(|(_, r)| r).collect();
    files.push(write_json(out, "poletsky.json", &meta, &json_reports)?);

    let mut summary = vec![format!("route: {route_name}, {} rows", rows.len())];
    for s in &data.final_gaps {
        summary.push(format!("nu = {:>4}  {:<16} T = {:+.10}  gap = {:.3e}", s.nu, s.label, s.limit, s.gap));
    }
    if let Some((nu, r)) = reports.last() {
        summary.push(format!(
            "Poletsky at nu = {nu}: center gap {:.3e}, hull excess {:.3e}, bad measure {:.4}",
            r.center_gap, r.hull_excess, r.bad_measure
        ));
    }
    Ok(RunOutcome { files, summary })
}

/// Polynomial certificate that p lies outside the hull.
pub fn run_hull(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let set = cfg.example_set();
    let arcs = match set.arcs() {
        Some(a) => a,
        None => return Err(HarnessError::Config(format!("{}: the hull of K1 is not known", context(cfg, "hull")))),
    };
    let p = cfg.point;
    if hull_contains(&set, &p).map_err(|e| hull_err(cfg, "hull", e))? {
        return Err(HarnessError::Config(format!("{}: the target lies in the hull", context(cfg, "hull"))));
    }
    let cert =
        find_certificate(&arcs, &p, cfg.certificate.max_degree).map_err(|e| hull_err(cfg, "certificate search", e))?;
    let report =
        verify_certificate(&cert, &set, cfg.verify_samples()).map_err(|e| hull_err(cfg, "certificate check", e))?;
    #[derive(Serialize)]
    struct Data<'a> {
        set: &'a ExampleSet,
        certificate: &'a crate::hull::PolyCertificate,
        verification: &'a crate::hull::CertificateReport,
    }
    let meta = base_metadata(cfg)
        .with("max_degree", &cfg.certificate.max_degree)
        .with("verify_samples", &cfg.verify_samples());
    output::ensure_dir(out)?;
    let files =
        vec![write_json(out, "certificate.json", &meta, &Data { set: &set, certificate: &cert, verification: &report })?];
    let summary = vec![format!(
        "certificate of degree {}, margin |Q(p)| = {:.9}, max |Q| on {} samples of K = {:.12}",
        cert.degree, cert.margin, report.samples, report.worst_value
    )];
    Ok(RunOutcome { files, summary })
}

fn averaging_measure(cfg: &ExperimentConfig) -> Result<CircleMeasure, HarnessError> {
    let a = &cfg.averaging;
    let wrap = |e: AveragingError| match e {
        AveragingError::NonUnimodularBoundary { .. } => {
            HarnessError::Verification(format!("{}: {e}", context(cfg, "averaging measure")))
        }
        _ => HarnessError::Config(format!("{}: {e}", context(cfg, "averaging measure"))),
    };
    match &a.measure {
        MeasureSpec::Uniform => Ok(CircleMeasure::uniform(a.order)),
        MeasureSpec::Poisson { z0 } => CircleMeasure::poisson(*z0, a.order).map_err(wrap),
        MeasureSpec::Trig { coefficients } => {
            if coefficients.is_empty() {
                return Err(HarnessError::Config("trig measure needs at least a_0".into()));
            }
            Ok(CircleMeasure::trig_polynomial(coefficients, a.order))
        }
        MeasureSpec::GPushforward { z0, arc } => {
            let g = build_g(cfg)?;
            let seg = ArcUnion::new(&[(arc[0], arc[1])]).map_err(|e| disc_err(cfg, "averaging arc", e))?.arcs()[0];
            let mu = g_pushforward_measure(&g, *z0, &seg, cfg.averaging_grid()).map_err(wrap)?;
            Ok(mu)
        }
    }
}

/// Moments of (p_ν)_*μ for p_ν(ζ) = ζ^ν.
pub fn run_averaging(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let a = &cfg.averaging;
    if a.nus.is_empty() || a.nus.contains(&0) || a.nus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::Config("averaging.nus must be strictly increasing positive integers".into()));
    }
    if a.k_max == 0 {
        return Err(HarnessError::Config("averaging.k_max must be at least 1".into()));
    }
    let mu = averaging_measure(cfg)?;
    let wrap = |e: AveragingError| HarnessError::Config(format!("{}: {e}", context(cfg, "moments")));
    let mut rows = Vec::new();
    let mut gaps = BTreeMap::new();
    for &nu in &a.nus {
        rows.extend(pushforward_power_moments(&mu, nu, a.k_max).map_err(wrap)?);
        gaps.insert(nu, weak_gap(&mu, nu, a.k_max).map_err(wrap)?);
    }
    let meta = base_metadata(cfg)
        .with("measure", &a.measure)
        .with("order", &mu.order())
        .with("k_max", &a.k_max)
        .with("density_grid", &cfg.averaging_grid());
    output::ensure_dir(out)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.nu.to_string(), r.k.to_string(), fmt_f64(r.re), fmt_f64(r.im), fmt_f64(r.abs)])
        .collect();
    let mut files = vec![write_csv(out, "moments.csv", &meta, &["nu", "k", "re", "im", "abs"], &table)?];
    let gap_table: Vec<Vec<String>> = gaps.iter().map(|(nu, g)| vec![nu.to_string(), fmt_f64(*g)]).collect();
    files.push(write_csv(out, "gaps.csv", &meta, &["nu", "weak_gap"], &gap_table)?);
    #[derive(Serialize)]
    struct Data<'a> {
        mass: f64,
        moments: &'a [crate::averaging::MomentRow],
        weak_gap: &'a BTreeMap<usize, f64>,
    }
    files.push(write_json(out, "moments.json", &meta, &Data { mass: mu.mass(), moments: &rows, weak_gap: &gaps })?);
    let mut summary = vec![format!("measure mass {:.15}", mu.mass())];
    for (nu, g) in &gaps {
        let m1 = rows.iter().find(|r| r.nu == *nu && r.k == 1).map(|r| r.abs).unwrap_or(0.0);
        summary.push(format!("nu = {nu:>4}  |moment_1| = {m1:.6e}  weak gap = {g:.6e}"));
    }
    Ok(RunOutcome { files, summary })
}

/// Winding histogram of random curves in the δ-tube around K₁. Any nonzero
/// winding is a verification failure, reported after the artifact is written.
pub fn run_obstruction(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let o = &cfg.obstruction;
    let to_err = |e: WindingError| {
        let msg = format!("{}: {e}", context(cfg, "obstruction"));
        match e {
            WindingError::InvalidArgument(_) => HarnessError::Config(msg),
            _ => HarnessError::Verification(msg),
        }
    };
    if o.trials == 0 {
        return Err(HarnessError::Config("obstruction.trials must be at least 1".into()));
    }
    let spec = TubeSpec::new(ExampleSet::K1, o.delta).map_err(to_err)?;
    let report = obstruction_demo(&spec, o.z0, o.trials, cfg.seed).map_err(to_err)?;
    let meta = base_metadata(cfg).with("trials", &o.trials).with("delta", &o.delta);
    output::ensure_dir(out)?;
    let files = vec![write_json(out, "obstruction.json", &meta, &report)?];
    let summary = vec![format!("histogram {:?}, rejections {}", report.histogram, report.rejections)];
    let nonzero: usize = report.histogram.iter().filter(|(w, _)| **w != 0).map(|(_, n)| n).sum();
    if nonzero > 0 {
        return Err(HarnessError::Verification(format!(
            "{}: {nonzero} of {} curves have nonzero winding",
            context(cfg, "obstruction"),
            o.trials
        )));
    }
    Ok(RunOutcome { files, summary })
}

/// Invariant checks at modest sizes; any failing check is a verification
/// failure.
pub fn run_selftest(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, HarnessError> {
    let checks = run_selftest_checks(cfg.seed);
    let meta = base_metadata(cfg);
    output::ensure_dir(out)?;
    let files = vec![write_json(out, "selftest.json", &meta, &checks)?];
    let summary: Vec<String> = checks
        .iter()
        .map(|c| format!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect();
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(HarnessError::Verification(format!("{failed} self-test checks failed:\n{}", summary.join("\n"))));
    }
    Ok(RunOutcome { files, summary })
}

