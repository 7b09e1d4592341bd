use std::path::{Path, PathBuf};

use toa_core::classical::{classical_found_probability, classical_not_found_probability, ClassicalScenario, Seconds};
use toa_core::distributions::{DistributionKind, SampledDistribution, Sampler};
use toa_core::oracle::{self, OracleCheck};
use toa_core::tails::{qc_not_found_probability, qc_window_sensitivity, uniform_thresholds};
use toa_core::{compare_tails, tail_curve, ComparisonReport, TailCurve};

use crate::config::ScenarioConfig;
use crate::output::{self, ChartStyle, Curve, OutputError};

/// Number of thresholds `T` on `[0, t_max]` for tail curves.
pub const TAIL_THRESHOLDS: usize = 200;
/// Largest tolerated change of the QC tail when `T′` is doubled.
pub const WINDOW_SENSITIVITY_LIMIT: f64 = 1e-3;
pub const ORACLE_MAX_DEVIATION: f64 = 1e-8;
pub const ORACLE_NORM_DRIFT: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{kind} distribution failed")]
    Distribution {
        kind: DistributionKind,
        #[source]
        source: toa_core::Error,
    },
    #[error(transparent)]
    Core(#[from] toa_core::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

fn sampler(cfg: &ScenarioConfig) -> Sampler {
    Sampler {
        semiclassical: cfg.sc_model,
        ..Sampler::default()
    }
}

/// Samples every requested distribution, in canonical order.
pub fn sample_all(cfg: &ScenarioConfig) -> Result<Vec<SampledDistribution>, RunError> {
    let sampler = sampler(cfg);
    cfg.kinds
        .iter()
        .map(|&kind| {
            sampler
                .sample(kind, &cfg.packet, &cfg.detector, &cfg.window, &cfg.grid)
                .map_err(|source| RunError::Distribution { kind, source })
        })
        .collect()
}

pub fn tail_curves(cfg: &ScenarioConfig, dists: &[SampledDistribution]) -> Result<Vec<TailCurve>, RunError> {
    let thresholds = uniform_thresholds(cfg.grid.t_max(), TAIL_THRESHOLDS);
    Ok(dists
        .iter()
        .map(|d| tail_curve(d, &thresholds))
        .collect::<Result<Vec<_>, _>>()?)
}

fn densities_rows(cfg: &ScenarioConfig, dists: &[SampledDistribution]) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut header = vec!["t".to_string()];
    header.extend(dists.iter().map(|d| format!("pi_{}", d.kind().column())));
    let rows = cfg
        .grid
        .times()
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            let mut row = vec![t];
            row.extend(dists.iter().map(|d| d.density()[k]));
            row
        })
        .collect();
    (header, rows)
}

fn tails_rows(curves: &[TailCurve]) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut header = vec!["T".to_string()];
    header.extend(curves.iter().map(|c| format!("tail_{}", c.kind.column())));
    let thresholds = curves.first().map(|c| c.thresholds.clone()).unwrap_or_default();
    let rows = thresholds
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = vec![t];
            row.extend(curves.iter().map(|c| c.values[i]));
            row
        })
        .collect();
    (header, rows)
}

fn write_table(path: &Path, table: (Vec<String>, Vec<Vec<f64>>)) -> Result<(), OutputError> {
    let header: Vec<&str> = table.0.iter().map(String::as_str).collect();
    output::write_csv(path, &header, table.1)
}

fn comparison(cfg: &ScenarioConfig, curves: &[TailCurve]) -> Result<ComparisonReport, RunError> {
    if curves.len() == 1 {
        // a single curve trivially agrees with itself
        return Ok(compare_tails(&[curves[0].clone(), curves[0].clone()], cfg.tolerance)?);
    }
    Ok(compare_tails(curves, cfg.tolerance)?)
}

/// Artifacts and checks of a Fig. 1 run.
#[derive(Debug, Clone)]
pub struct Fig1Outcome {
    pub report: ComparisonReport,
    /// `max_T |tail_QC(T; T′) − tail_QC(T; 2T′)|`, when QC was requested.
    pub window_sensitivity: Option<f64>,
    /// QC probability of not finding the particle at the detector during `[0, t_max]`.
    pub qc_not_found: Option<f64>,
    pub artifacts: Vec<PathBuf>,
}

impl Fig1Outcome {
    /// Exit-status contract: every requested check passes.
    pub fn passed(&self) -> bool {
        self.report.agreement_flag
            && self.window_sensitivity.is_none_or(|s| s < WINDOW_SENSITIVITY_LIMIT)
    }
}

pub fn run_fig1(cfg: &ScenarioConfig) -> Result<Fig1Outcome, RunError> {
    let dists = sample_all(cfg)?;
    let curves = tail_curves(cfg, &dists)?;
    let report = comparison(cfg, &curves)?;

    let has_qc = cfg.kinds.contains(&DistributionKind::QuantumClock);
    let (window_sensitivity, qc_not_found) = if has_qc {
        let thresholds = uniform_thresholds(cfg.grid.t_max(), TAIL_THRESHOLDS);
        let s = qc_window_sensitivity(&sampler(cfg), &cfg.packet, &cfg.detector, &cfg.window, &cfg.grid, &thresholds)?;
        let nf = qc_not_found_probability(&cfg.packet, &cfg.detector, cfg.window.t_stop())?;
        (Some(s), Some(nf))
    } else {
        (None, None)
    };

    let dir = &cfg.output_dir;
    let densities = dir.join("densities.csv");
    let tails = dir.join("tails.csv");
    let json = dir.join("report.json");
    let svg = dir.join("fig1.svg");
    write_table(&densities, densities_rows(cfg, &dists))?;
    write_table(&tails, tails_rows(&curves))?;
    write_report(&json, &report)?;

    let chart: Vec<Curve> = curves
        .iter()
        .map(|c| Curve {
            label: c.kind.label().to_string(),
            points: c.thresholds.iter().copied().zip(c.values.iter().copied()).collect(),
        })
        .collect();
    let style = ChartStyle {
        title: format!(
            "Tail probability, x0 = {}, p0 = {}, sigma0 = {}, D = {}",
            cfg.packet.x0(),
            cfg.packet.p0(),
            cfg.packet.sigma0(),
            cfg.detector.position()
        ),
        x_label: "T [1/omega]".into(),
        y_label: "integral of Pi(t) from T to t_max".into(),
        ..ChartStyle::default()
    };
    output::write_file(&svg, output::render_svg(&chart, &style).as_bytes())?;

    Ok(Fig1Outcome {
        report,
        window_sensitivity,
        qc_not_found,
        artifacts: vec![densities, tails, json, svg],
    })
}

pub fn run_densities(cfg: &ScenarioConfig) -> Result<PathBuf, RunError> {
    let dists = sample_all(cfg)?;
    let path = cfg.output_dir.join("densities.csv");
    write_table(&path, densities_rows(cfg, &dists))?;
    Ok(path)
}

pub fn run_tails(cfg: &ScenarioConfig) -> Result<ComparisonReport, RunError> {
    let dists = sample_all(cfg)?;
    let curves = tail_curves(cfg, &dists)?;
    let report = comparison(cfg, &curves)?;
    write_table(&cfg.output_dir.join("tails.csv"), tails_rows(&curves))?;
    write_report(&cfg.output_dir.join("report.json"), &report)?;
    Ok(report)
}

fn write_report(path: &Path, report: &ComparisonReport) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    output::write_file(path, text.as_bytes())?;
    Ok(())
}

/// Rows `(T, p_found, p_not_found)` of the classical dwell-time table.
pub fn classical_table(tau: &Seconds, durations: &[Seconds]) -> Result<Vec<Vec<f64>>, RunError> {
    durations
        .iter()
        .map(|t| {
            let s = ClassicalScenario::covering(tau.clone(), t.clone())?;
            let found = classical_found_probability(&s)?;
            let not_found = classical_not_found_probability(&s)?;
            Ok(vec![t.to_f64(), to_f64(&found), to_f64(&not_found)])
        })
        .collect()
}

fn to_f64(q: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn run_classical(tau: &Seconds, durations: &[Seconds], out: &Path) -> Result<PathBuf, RunError> {
    let rows = classical_table(tau, durations)?;
    let path = out.join("classical.csv");
    output::write_csv(&path, &["T", "p_found", "p_not_found"], rows)?;
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub checks: Vec<OracleCheck>,
    pub artifacts: Vec<PathBuf>,
}

impl OracleOutcome {
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.max_deviation < ORACLE_MAX_DEVIATION && c.norm_drift < ORACLE_NORM_DRIFT)
    }
}

/// Runs the spectral-vs-closed-form suite; with `dump`, also writes the
/// configured packet propagated to its classical arrival time on the
/// default grid.
pub fn run_oracle_check(cfg: &ScenarioConfig, dump: bool) -> Result<OracleOutcome, RunError> {
    let checks = oracle::equivalence_suite()?;
    let path = cfg.output_dir.join("oracle.csv");
    output::write_csv(
        &path,
        &["x0", "p0", "sigma0", "t", "max_deviation", "norm_drift"],
        checks
            .iter()
            .map(|c| vec![c.x0, c.p0, c.sigma0, c.t, c.max_deviation, c.norm_drift]),
    )?;
    let mut artifacts = vec![path];
    if dump {
        let start = oracle::discretize(&cfg.packet, oracle::DEFAULT_X_MIN, oracle::DEFAULT_X_MAX, oracle::DEFAULT_POINTS)?;
        let travel = cfg.detector.position() - cfg.packet.x0();
        let t = if cfg.packet.p0() != 0.0 && travel / cfg.packet.p0() > 0.0 {
            travel / cfg.packet.p0()
        } else {
            0.0
        };
        let state = oracle::spectral_propagate(&start, t)?;
        let dump_path = cfg.output_dir.join("grid_state.csv");
        output::write_csv(
            &dump_path,
            &["x", "re_psi", "im_psi"],
            state.rows().map(|(x, re, im)| vec![x, re, im]),
        )?;
        artifacts.push(dump_path);
    }
    Ok(OracleOutcome { checks, artifacts })
}
