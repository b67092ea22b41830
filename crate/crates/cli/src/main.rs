#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gravent::amplitudes::{amplitudes, AmplitudeOptions};
use gravent::config::{validate_config, ConfigFile};
use gravent::dp::{dp_density_matrix, dp_entanglement_condition};
use gravent::entanglement::{classify, negativity};
use gravent::scan::{contour, emit_contour, emit_rows, scan_grid, OutputFormat, ScanTemplate};
use gravent::validation::run_validation;
use gravent::{BranchPair, Error, ExperimentConfig, GravityModel};
use serde_json::json;

#[derive(Parser)]
#[command(name = "gravent", version, about = "Branch amplitudes and entanglement of two superposed masses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Qg,
    QgRel,
    Cg,
    QgVirtual,
    Dp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Amplitudes and negativity for one configuration
    Compute {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        config: PathBuf,
        /// Also report this branch pair on its own
        #[arg(long)]
        pair: Option<BranchPair>,
    },
    /// φ and ϑ over a log-spaced mass/time grid
    Scan {
        #[arg(long)]
        mass_min: f64,
        #[arg(long)]
        mass_max: f64,
        #[arg(long)]
        time_min: f64,
        #[arg(long)]
        time_max: f64,
        #[arg(long)]
        n_mass: usize,
        #[arg(long)]
        n_time: usize,
        #[arg(long, default_value_t = 10.0)]
        dsep_over_r: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Time at which ϑ reaches the given level, per mass
    Contour {
        #[arg(long, default_value_t = 0.1)]
        level: f64,
        #[arg(long)]
        mass_min: f64,
        #[arg(long)]
        mass_max: f64,
        #[arg(long)]
        n_mass: usize,
        #[arg(long, default_value_t = 10.0)]
        dsep_over_r: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Diósi–Penrose density matrix at time t
    DpEvolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Closed forms against quadrature
    Validate,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidRange(_) | Error::Json(_) | Error::Io { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    ConfigFile::from_json(&text)
        .and_then(ConfigFile::into_config)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn print_json(value: &serde_json::Value) {
    // a closed pipe downstream is not our failure
    let _ = writeln!(io::stdout().lock(), "{value:#}");
}

fn compute(model: Model, cfg: &ExperimentConfig, pair: Option<BranchPair>) -> Result<(), Failure> {
    let validity = validate_config(cfg);
    if let Model::Dp = model {
        let rho = dp_density_matrix(cfg, cfg.time)?;
        let pair_entry = pair.map(|p| json!({ "pair": p.to_string(), "rho": rho.get(p, p) }));
        print_json(&json!({
            "model": GravityModel::DPStochastic.to_string(),
            "density_matrix": rho,
            "negativity": negativity(&rho),
            "condition": dp_entanglement_condition(cfg, cfg.time),
            "pair": pair_entry,
            "validity": validity,
        }));
        return Ok(());
    }
    let model = match model {
        Model::Qg => GravityModel::QGNonRel,
        Model::QgRel => GravityModel::QGRelativisticPoint,
        Model::Cg => GravityModel::CGSemiClassical,
        Model::QgVirtual => GravityModel::QGVirtualMatter,
        Model::Dp => unreachable!(),
    };
    let set = amplitudes(cfg, model, &AmplitudeOptions::default())?;
    let report = classify(&set)?;
    let pair_entry = pair.map(|p| json!({ "pair": p.to_string(), "alpha": set.get(p) }));
    print_json(&json!({
        "model": model.to_string(),
        "amplitudes": set,
        "negativity": report.negativity,
        "separable": report.separable,
        "dominant_pair": report.dominant_pair.map(|p| p.to_string()),
        "pair": pair_entry,
        "validity": validity,
    }));
    Ok(())
}

fn template(dsep_over_r: f64) -> Result<ScanTemplate, Failure> {
    if !(dsep_over_r > 0.0) {
        return Err(Failure::Usage(format!("--dsep-over-r must be positive, got {dsep_over_r}")));
    }
    Ok(ScanTemplate::default().with_dsep_over_r(dsep_over_r))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute { model, config, pair } => compute(model, &load_config(&config)?, pair),
        Command::Scan {
            mass_min,
            mass_max,
            time_min,
            time_max,
            n_mass,
            n_time,
            dsep_over_r,
            out,
            format,
        } => {
            let rows = scan_grid((mass_min, mass_max), (time_min, time_max), n_mass, n_time, &template(dsep_over_r)?)?;
            emit_rows(&rows, format.into(), &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
        Command::Contour {
            level,
            mass_min,
            mass_max,
            n_mass,
            dsep_over_r,
            tol,
            out,
            format,
        } => {
            if !(level > 0.0) {
                return Err(Failure::Usage(format!("--level must be positive, got {level}")));
            }
            let c = contour(level, (mass_min, mass_max), n_mass, &template(dsep_over_r)?, tol)?;
            for d in &c.diagnostics {
                eprintln!("skipped: {d}");
            }
            emit_contour(&c.points, format.into(), &out)?;
            eprintln!("wrote {} points to {}", c.points.len(), out.display());
            Ok(())
        }
        Command::DpEvolve { config, t } => {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Failure::Usage(format!("--t must be a non-negative time, got {t}")));
            }
            let cfg = load_config(&config)?;
            let rho = dp_density_matrix(&cfg, t)?;
            print_json(&json!({
                "t_s": t,
                "density_matrix": rho,
                "negativity": negativity(&rho),
                "condition": dp_entanglement_condition(&cfg, t),
            }));
            Ok(())
        }
        Command::Validate => {
            let checks = run_validation();
            let mut failed = 0;
            for c in &checks {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(Failure::Numerical(format!("{failed} of {} checks failed", checks.len())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
