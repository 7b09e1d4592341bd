use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use toa_core::classical::Seconds;
use toa_lab::commands::{self, WINDOW_SENSITIVITY_LIMIT};
use toa_lab::config::{self, ConfigFile, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "toa-lab", version, about = "Time-of-arrival distributions for a free Gaussian packet")]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Densities, tail curves, comparison report and SVG chart; exits 0 iff the tails agree.
    Fig1(ScenarioArgs),
    /// Write densities.csv only.
    Densities(ScenarioArgs),
    /// Write tails.csv and report.json.
    Tails(ScenarioArgs),
    /// Classical dwell-time table.
    Classical(ClassicalArgs),
    /// Spectral propagation vs closed form over the packet × time matrix.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Flat JSON config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long)]
    sigma0: Option<f64>,
    /// Detector position D.
    #[arg(long)]
    detector: Option<f64>,
    #[arg(long = "det_width")]
    det_width: Option<f64>,
    #[arg(long = "t_max")]
    t_max: Option<f64>,
    /// QC normalisation window T′.
    #[arg(long = "t_prime")]
    t_prime: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Comma-separated subset of QC,K,F,SC.
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<String>>,
    /// phase-space (default) or point-source.
    #[arg(long = "sc_model")]
    sc_model: Option<String>,
    /// Output directory; TOA_LAB_OUT takes precedence.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ScenarioArgs {
    fn resolve(&self) -> anyhow::Result<ScenarioConfig> {
        let flags = ConfigFile {
            x0: self.x0,
            p0: self.p0,
            sigma0: self.sigma0,
            detector: self.detector,
            det_width: self.det_width,
            t_max: self.t_max,
            t_prime: self.t_prime,
            samples: self.samples,
            tolerance: self.tolerance,
            kinds: self.kinds.clone(),
            sc_model: self.sc_model.clone(),
            out: self.out.clone(),
        };
        let env_out = std::env::var_os(config::OUT_ENV).map(PathBuf::from);
        Ok(config::parse_config(self.config.as_deref(), &flags, env_out)?)
    }
}

#[derive(Debug, Args)]
struct ClassicalArgs {
    /// Dwell time at the detector, seconds.
    #[arg(long, default_value = "1")]
    tau: String,
    /// Observation durations, seconds.
    #[arg(long, value_delimiter = ',', default_value = "1,10,30")]
    durations: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Also dump the propagated grid state as x,re_psi,im_psi.
    #[arg(long)]
    dump: bool,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Fig1(args) => {
            let cfg = args.resolve()?;
            let outcome = commands::run_fig1(&cfg)?;
            let r = &outcome.report;
            println!(
                "global max deviation {:.6} ({} vs {}), tolerance {}: {}",
                r.global_max,
                r.pair[0],
                r.pair[1],
                r.tolerance,
                if r.agreement_flag { "agree" } else { "DISAGREE" }
            );
            if let Some(s) = outcome.window_sensitivity {
                println!(
                    "QC tail change for T' -> 2T': {s:.3e} (limit {WINDOW_SENSITIVITY_LIMIT:e})"
                );
            }
            if let Some(nf) = outcome.qc_not_found {
                println!("QC probability of not being found at the detector in [0, t_max]: {nf:.6}");
            }
            for a in &outcome.artifacts {
                println!("wrote {}", a.display());
            }
            Ok(outcome.passed())
        }
        Command::Densities(args) => {
            let path = commands::run_densities(&args.resolve()?)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Tails(args) => {
            let report = commands::run_tails(&args.resolve()?)?;
            println!("global max deviation {:.6}", report.global_max);
            Ok(true)
        }
        Command::Classical(args) => {
            let tau: Seconds = args.tau.parse().context("--tau")?;
            let durations = args
                .durations
                .iter()
                .map(|d| d.parse::<Seconds>())
                .collect::<Result<Vec<_>, _>>()
                .context("--durations")?;
            let out = std::env::var_os(config::OUT_ENV)
                .map(PathBuf::from)
                .or(args.out)
                .unwrap_or_else(|| PathBuf::from("out"));
            let path = commands::run_classical(&tau, &durations, &out)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::OracleCheck(args) => {
            let cfg = args.scenario.resolve()?;
            let outcome = commands::run_oracle_check(&cfg, args.dump)?;
            for c in &outcome.checks {
                println!(
                    "x0={:>6} p0={:>4} sigma0={:>4} t={:.4}: max |dpsi| = {:.2e}, norm drift = {:.2e}",
                    c.x0, c.p0, c.sigma0, c.t, c.max_deviation, c.norm_drift
                );
            }
            Ok(outcome.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
