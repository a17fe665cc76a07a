mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use singular_nls::propagator::PropagatorMethod;
use singular_nls::wiener::{FourierCoeffs, Nonlinearity};
use singular_nls::{Error, PointInteraction};

use config::{DataShape, GridConfig, RunConfig, SolverKind, TimesConfig};
use report::{error_json, exit_code_for, Report, EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "singular-nls", version, about = "Point-interaction Schrödinger propagators, decay scans and NLS solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound states of a point interaction.
    Spectrum(SpectrumArgs),
    /// Evolve Gaussian or bound-state data under a point interaction.
    Propagate(PropagateArgs),
    /// Sup-norm decay over a time window with a log-log slope fit.
    DecayScan(DecayArgs),
    /// Picard solve on the line (weak-Lᵖ or atomic-measure solver).
    Evolve(EvolveArgs),
    /// Picard solve on the torus in ℓ¹.
    PeriodicEvolve(PeriodicArgs),
    /// Lorentz and weak-Lᵖ norms of grid data.
    LorentzNorm(LorentzArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output prefix: writes <prefix>.json and, where applicable, <prefix>.csv.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InteractionArgs {
    /// δ coupling σ.
    #[arg(long, allow_hyphen_values = true, group = "pi")]
    delta: Option<f64>,
    /// δ′ coupling β.
    #[arg(long, allow_hyphen_values = true, group = "pi")]
    delta_prime: Option<f64>,
    /// Two-δ coupling α (with --a).
    #[arg(long, allow_hyphen_values = true, group = "pi", requires = "a")]
    two_delta: Option<f64>,
    /// Two-δ half separation.
    #[arg(long)]
    a: Option<f64>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    spacing: Option<f64>,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long, value_enum)]
    data: Option<DataShape>,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<f64>,
}

#[derive(Args)]
struct TimeArgs {
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    n_times: Option<usize>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    pi: InteractionArgs,
}

#[derive(Args)]
struct PropagateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    pi: InteractionArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, short, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MethodArg {
    ClosedForm,
    KernelQuadrature,
    SpectralQuadrature,
}

impl From<MethodArg> for PropagatorMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ClosedForm => PropagatorMethod::ClosedForm,
            MethodArg::KernelQuadrature => PropagatorMethod::KernelQuadrature,
            MethodArg::SpectralQuadrature => PropagatorMethod::SpectralQuadrature,
        }
    }
}

#[derive(Args)]
struct DecayArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    pi: InteractionArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    times: TimeArgs,
    /// Remove the bound-state part before measuring.
    #[arg(long)]
    subtract: bool,
    #[arg(long)]
    slope_tol: Option<f64>,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    pi: InteractionArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    times: TimeArgs,
    #[arg(long, value_enum)]
    solver: Option<SolverKind>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_sign: Option<i8>,
    /// Target smallness quantity used to pick ε.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct PeriodicArgs {
    #[command(flatten)]
    common: Common,
    /// Initial coefficients as JSON triples `[[m, re, im], …]`.
    #[arg(long)]
    u0: Option<String>,
    /// Potential coefficients as JSON triples.
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    rho: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_sign: Option<i8>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Time panels on each side of 0.
    #[arg(long)]
    panels: Option<usize>,
    /// Use `|u|^{ρ-1}u` instead of `u^ρ`.
    #[arg(long)]
    gauge: bool,
    /// Compare against a Galerkin reference on `|m| ≤ N`.
    #[arg(long)]
    galerkin_modes: Option<i64>,
}

#[derive(Args)]
struct LorentzArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    pi: InteractionArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    p: Option<f64>,
    /// Second exponent; `inf` for the weak-type norm.
    #[arg(long)]
    q: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated criterion ids.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u8>>,
}

impl InteractionArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(sigma) = self.delta {
            cfg.interaction = Some(PointInteraction::Delta { sigma });
        } else if let Some(beta) = self.delta_prime {
            cfg.interaction = Some(PointInteraction::DeltaPrime { beta });
        } else if let (Some(alpha), Some(a)) = (self.two_delta, self.a) {
            cfg.interaction = Some(PointInteraction::TwoDelta { alpha, a });
        }
    }
}

impl GridArgs {
    fn apply(&self, cfg: &mut RunConfig, default: GridConfig) {
        if self.half_width.is_none() && self.spacing.is_none() {
            return;
        }
        let g = cfg.grid.get_or_insert(default);
        if let Some(v) = self.half_width {
            g.half_width = v;
        }
        if let Some(v) = self.spacing {
            g.spacing = v;
        }
    }
}

impl DataArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let d = &mut cfg.data;
        set(&mut d.shape, self.data);
        set(&mut d.center, self.center);
        set(&mut d.width, self.width);
        set(&mut d.amplitude, self.amplitude);
    }
}

impl TimeArgs {
    fn apply(&self, cfg: &mut RunConfig, default: TimesConfig) {
        if self.t_start.is_none() && self.t_end.is_none() && self.n_times.is_none() {
            return;
        }
        let t = cfg.times.get_or_insert(default);
        t.values = None;
        set(&mut t.start, self.t_start);
        set(&mut t.end, self.t_end);
        set(&mut t.count, self.n_times);
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn grid_default(half_width: f64, spacing: f64) -> GridConfig {
    GridConfig { half_width, spacing }
}

fn times_default(start: f64, end: f64, count: usize) -> TimesConfig {
    TimesConfig { start, end, count, values: None }
}

fn parse_coeffs(text: &str) -> singular_nls::Result<FourierCoeffs> {
    serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("coefficients: {e}")))
}

fn load(common: &Common) -> Result<RunConfig, (i32, String)> {
    match &common.config {
        None => Ok(RunConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| (EXIT_IO, format!("reading {}: {e}", path.display())))?;
            RunConfig::from_json(&text).map_err(|e| (EXIT_CONFIG, e.to_string()))
        }
    }
}

type Runner = fn(&mut RunConfig) -> singular_nls::Result<Report>;
type Prepared = (&'static str, RunConfig, Option<PathBuf>, Runner);

/// Merges flags into the loaded config and picks the command body.
fn prepare(command: Command) -> Result<Prepared, (i32, String)> {
    let bad = |e: Error| (EXIT_CONFIG, e.to_string());
    Ok(match command {
        Command::Spectrum(a) => {
            let mut cfg = load(&a.common)?;
            a.pi.apply(&mut cfg);
            ("spectrum", cfg, a.common.output, commands::spectrum as Runner)
        }
        Command::Propagate(a) => {
            let mut cfg = load(&a.common)?;
            a.pi.apply(&mut cfg);
            a.grid.apply(&mut cfg, grid_default(30.0, 0.02));
            a.data.apply(&mut cfg);
            set(&mut cfg.t, a.t);
            if let Some(m) = a.method {
                cfg.method = Some(m.into());
            }
            ("propagate", cfg, a.common.output, commands::propagate as Runner)
        }
        Command::DecayScan(a) => {
            let mut cfg = load(&a.common)?;
            a.pi.apply(&mut cfg);
            a.grid.apply(&mut cfg, grid_default(2400.0, 0.1));
            a.data.apply(&mut cfg);
            a.times.apply(&mut cfg, times_default(1.0, 100.0, 10));
            cfg.subtract_bound_states |= a.subtract;
            if a.slope_tol.is_some() {
                cfg.slope_tol = a.slope_tol;
            }
            ("decay-scan", cfg, a.common.output, commands::decay_scan_cmd as Runner)
        }
        Command::Evolve(a) => {
            let mut cfg = load(&a.common)?;
            a.pi.apply(&mut cfg);
            a.grid.apply(&mut cfg, grid_default(60.0, 0.05));
            a.data.apply(&mut cfg);
            a.times.apply(&mut cfg, times_default(0.05, 2.0, 8));
            let n = &mut cfg.nls;
            set(&mut n.solver, a.solver);
            set(&mut n.rho, a.rho);
            set(&mut n.lambda_sign, a.lambda_sign);
            set(&mut n.budget, a.budget);
            set(&mut n.max_iters, a.max_iters);
            set(&mut n.tol, a.tol);
            if a.eps.is_some() {
                n.eps = a.eps;
            }
            ("evolve", cfg, a.common.output, commands::evolve as Runner)
        }
        Command::PeriodicEvolve(a) => {
            let mut cfg = load(&a.common)?;
            let w = &mut cfg.wiener;
            if let Some(t) = &a.u0 {
                w.u0 = parse_coeffs(t).map_err(bad)?;
            }
            if let Some(t) = &a.mu {
                w.mu = parse_coeffs(t).map_err(bad)?;
            }
            set(&mut w.rho, a.rho);
            set(&mut w.lambda_sign, a.lambda_sign);
            set(&mut w.t_max, a.t_max);
            set(&mut w.panels, a.panels);
            if a.gauge {
                w.nonlinearity = Nonlinearity::Gauge;
            }
            if a.galerkin_modes.is_some() {
                w.galerkin_modes = a.galerkin_modes;
            }
            ("periodic-evolve", cfg, a.common.output, commands::periodic_evolve as Runner)
        }
        Command::LorentzNorm(a) => {
            let mut cfg = load(&a.common)?;
            a.pi.apply(&mut cfg);
            a.grid.apply(&mut cfg, grid_default(30.0, 0.01));
            a.data.apply(&mut cfg);
            set(&mut cfg.lorentz.p, a.p);
            if let Some(q) = &a.q {
                cfg.lorentz.q = match q.as_str() {
                    "inf" | "infinity" => None,
                    s => Some(s.parse().map_err(|_| (EXIT_CONFIG, format!("invalid q: {s}")))?),
                };
            }
            ("lorentz-norm", cfg, a.common.output, commands::lorentz as Runner)
        }
        Command::Verify(a) => {
            let mut cfg = load(&a.common)?;
            set(&mut cfg.seed, a.seed);
            if a.only.is_some() {
                cfg.only = a.only;
            }
            ("verify", cfg, a.common.output, commands::verify as Runner)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, mut cfg, output, run) = match prepare(cli.command) {
        Ok(p) => p,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code as u8);
        }
    };
    match run(&mut cfg) {
        Ok(report) => {
            if let Err(e) = report.emit(&cfg, output.as_deref()) {
                eprintln!("error: writing output: {e}");
                return ExitCode::from(EXIT_IO as u8);
            }
            ExitCode::from(if report.passed { EXIT_PASS } else { EXIT_NUMERICAL } as u8)
        }
        Err(e) => {
            let code = exit_code_for(&e);
            eprintln!("error: {e}");
            println!("{}", serde_json::to_string_pretty(&error_json(name, &e, Some(&cfg))).expect("serializes"));
            ExitCode::from(code as u8)
        }
    }
}
