use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ehi::asymptotics::{check_spiridonov_identity, residual_ladder};
use ehi::minimizer::{minimize_blocks, minimize_exact, minimize_grid, block_legs};
use ehi::output::{
    canonical_json, identity_json, index_json, line_integral_json, minimization_json, report_json, validation_json,
};
use ehi::quadrature::{default_grid_n, elliptic_index, hyperbolic_builtin, FugacitySet, BUILTIN_LINE_INTEGRANDS};
use ehi::rains::{builtin_grid_csv, kappa, rains_grid_csv, vartheta};
use ehi::special::EllipticParams;
use ehi::theory::{parse_theory, trace_anomalies, validate_theory, TheorySpec};
use ehi::{catalog, Error};

#[derive(Parser, Debug)]
#[command(name = "ehi", version, about = "Elliptic hypergeometric integrals and their hyperbolic limit")]
struct Cli {
    /// cap on worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// write the result here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MinMode {
    Exact,
    Grid,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check anomaly cancellation and print the R-symmetry traces.
    Validate {
        /// theory file, or the name of a catalog entry
        #[arg(long)]
        spec: String,
    },
    /// Minimum of the holonomy potential and the dimension of its minimizing set.
    RainsMin {
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value_t = MinMode::Exact)]
        mode: MinMode,
        #[arg(long, default_value_t = 60)]
        resolution: usize,
    },
    /// The index by torus quadrature (rank at most 2).
    Index {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long)]
        beta: f64,
        /// points per torus direction; chosen from the integrand when omitted
        #[arg(long)]
        grid_n: Option<usize>,
        /// comma-separated U(1) chemical potentials
        #[arg(long, value_delimiter = ',')]
        u1: Vec<f64>,
    },
    /// Residuals of the leading small-β prediction along a decreasing β ladder.
    Asymptotics {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 0.35, 0.25])]
        beta_ladder: Vec<f64>,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// The rank-one beta integral evaluated both ways.
    Identity {
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 512)]
        grid_n: usize,
    },
    /// A built-in hyperbolic integral.
    Z3d {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 8.0)]
        cutoff: f64,
        #[arg(long, default_value_t = 2000)]
        panels: usize,
    },
    /// CSV grid of the potential (rank 1 or 2) or of a built-in function.
    PlotData {
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        spec: Option<String>,
        #[arg(long, value_parser = ["vartheta", "kappa"])]
        builtin: Option<String>,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// add the phase potential column
        #[arg(long)]
        with_q: bool,
    },
}

/// Exit status: 0 success, 1 failed check, 2 usage, 3 numerical failure.
#[derive(Debug)]
enum Failure {
    Check(String),
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DivergentParameter(_)
            | Error::PoleHit(_)
            | Error::QuadratureFailure(_)
            | Error::TruncationExceeded { .. }
            | Error::TailBoundViolated(_) => Failure::Numeric(e.to_string()),
            Error::ChargeWindowViolation { .. } | Error::FlavorAnomalyViolation { .. } => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn load_spec(spec: &str) -> Result<TheorySpec, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{spec}: {e}")))?;
        let mut t = parse_theory(&text)?;
        if t.name.is_empty() {
            t.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        }
        Ok(t)
    } else if catalog::source(spec).is_some() {
        Ok(catalog::load(spec)?)
    } else {
        Err(Failure::Usage(format!("{spec}: no such file or catalog entry")))
    }
}

fn emit(cli: &Cli, body: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn emit_json(cli: &Cli, v: &Value) -> Result<(), Failure> {
    emit(cli, &format!("{}\n", canonical_json(v)))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Command::Validate { spec } => {
            let t = load_spec(spec)?;
            let rep = validate_theory(&t);
            let traces = trace_anomalies(&t).ok();
            if cli.format == Format::Csv {
                return Err(Failure::Usage("validate has JSON output only".into()));
            }
            emit_json(cli, &validation_json(&t, &rep, traces))?;
            if !rep.passed() {
                return Err(Failure::Check(rep.messages().join("; ")));
            }
        }
        Command::RainsMin { spec, mode, resolution } => {
            let t = load_spec(spec)?;
            let res = match mode {
                MinMode::Exact => minimize_exact(&t)?,
                MinMode::Grid if block_legs(&t).is_some() => minimize_blocks(&t, *resolution)?,
                MinMode::Grid => minimize_grid(&t, *resolution)?,
            };
            let mut v = minimization_json(&res);
            v["theory"] = json!(t.name);
            emit_json(cli, &v)?;
        }
        Command::Index { spec, b, beta, grid_n, u1 } => {
            let t = load_spec(spec)?;
            let params = EllipticParams::new(*b, *beta)?;
            let n = grid_n.unwrap_or_else(|| default_grid_n(&t, &params));
            let fug = (!u1.is_empty()).then(|| FugacitySet { u1_potentials: u1.clone(), flavor_potentials: vec![] });
            let v = elliptic_index(&t, &params, n, fug.as_ref())?;
            emit_json(cli, &index_json(&t.name, &params, &v))?;
        }
        Command::Asymptotics { spec, b, beta_ladder, grid_n } => {
            let t = load_spec(spec)?;
            let rep = residual_ladder(&t, *b, beta_ladder, *grid_n)?;
            match cli.format {
                Format::Json => emit_json(cli, &report_json(&rep))?,
                Format::Csv => emit(cli, &rep.to_csv())?,
            }
        }
        Command::Identity { b, beta, grid_n } => {
            let t = catalog::load("su2_sqcd_nf3")?;
            let params = EllipticParams::new(*b, *beta)?;
            let c = check_spiridonov_identity(&t, &params, *grid_n)?;
            if cli.format == Format::Json && cli.out.is_some() {
                emit_json(cli, &identity_json(&c))?;
            } else {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                emit(cli, &format!("{verdict} identity b={b} beta={beta} relative_error={:e}\n", c.relative_error))?;
            }
            if !c.passed {
                return Err(Failure::Check(format!("relative error {:e}", c.relative_error)));
            }
        }
        Command::Z3d { name, b, cutoff, panels } => {
            if !BUILTIN_LINE_INTEGRANDS.contains(&name.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown integral {name:?}; choose one of {}",
                    BUILTIN_LINE_INTEGRANDS.join(", ")
                )));
            }
            let v = hyperbolic_builtin(name, *b, *cutoff, *panels)?;
            emit_json(cli, &line_integral_json(name, *b, &v))?;
        }
        Command::PlotData { spec, builtin, resolution, with_q } => {
            if *resolution < 16 {
                return Err(Failure::Usage(format!("resolution must be at least 16, got {resolution}")));
            }
            let csv = match (spec, builtin.as_deref()) {
                (_, Some("vartheta")) => builtin_grid_csv("vartheta", *resolution, |x| vartheta(&x))?,
                (_, Some(_)) => builtin_grid_csv("kappa", *resolution, |x| kappa(&x))?,
                (Some(s), None) => {
                    let t = load_spec(s)?;
                    if t.rank() > 2 {
                        return Err(Error::RankTooLarge { rank: t.rank(), limit: 2 }.into());
                    }
                    rains_grid_csv(&t, *resolution, *with_q)?
                }
                (None, None) => return Err(Failure::Usage("plot-data needs --spec or --builtin".into())),
            };
            emit(cli, &csv)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: could not set up {n} worker threads");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
