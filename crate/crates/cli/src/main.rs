use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use horolab::random::TestFunctions;
use horolab::rep::build_rep;
use horolab::tensor::TensorRep;
use horolab::vector_field::{constant_cohomology_with, CascadeMode, MixingConvention, CONST_SLOT_NAMES};
use horolab_cli::config::{ComponentConfig, ExperimentConfig, Op};
use horolab_cli::report::{decay_csv, write_atomic, write_outputs};
use horolab_cli::sweep::{sweep, sweep_csv, DEFAULT_LEVELS};
use horolab_cli::{experiments, CliError};
use num_rational::Ratio;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "horolab", version, about = "Cohomology experiments for parabolic Z^2 actions on truncated SL(2,R) x SL(2,R) models")]
struct Cli {
    /// Suppress progress and summary lines on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one truncated factor and report its size and bracket residuals.
    BuildRep(RepArgs),
    /// Solve the scalar coboundary equation for a seeded right-hand side.
    Solve(FactorArgs),
    /// Round trip of the joint transfer problem.
    Transfer(PairArgs),
    /// Split a seeded non-closed pair.
    Split(PairArgs),
    /// Cascade a seeded vector-field pair.
    Cascade {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Split)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = ConventionArg::Adjoint)]
        convention: ConventionArg,
    },
    /// Exact cohomology of constant vector fields.
    ConstCohomology {
        #[arg(long, value_enum, default_value_t = ConventionArg::Adjoint)]
        convention: ConventionArg,
        /// Integer or fraction, e.g. 1 or 3/2.
        #[arg(long, default_value = "1")]
        t: String,
        #[arg(long, default_value = "1")]
        s: String,
        #[arg(long)]
        json: bool,
    },
    /// Decay table of invariant pairings against a seeded probe (CSV).
    Decay {
        #[command(flatten)]
        factor: FactorArgs,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
    },
    /// Ratio tables across truncation levels (CSV).
    Sweep {
        #[arg(long, value_enum)]
        op: SweepOp,
        #[command(flatten)]
        pair: PairArgs,
        /// Comma-separated truncation levels.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LEVELS)]
        levels: Vec<usize>,
    },
    /// Run a configured experiment and write reports.
    Run {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Replaces the configured components: `mu,theta,k[,t,s]` entries separated by `;`.
        #[arg(long)]
        components: Option<String>,
    },
}

#[derive(Args, Clone)]
struct RepArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.25)]
    mu: f64,
    #[arg(long, default_value_t = 16)]
    k: usize,
    #[arg(long)]
    pad: Option<usize>,
}

#[derive(Args, Clone)]
struct FactorArgs {
    #[command(flatten)]
    rep: RepArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = horolab::distributions::DEFAULT_KERNEL_TOL)]
    kernel_tol: f64,
    #[arg(long, value_delimiter = ',', default_values_t = horolab::cocycle::DEFAULT_ORDERS)]
    orders: Vec<f64>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct PairArgs {
    #[command(flatten)]
    factor: FactorArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 5.0)]
    theta: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    s: f64,
}

impl PairArgs {
    fn component(&self) -> ComponentConfig {
        ComponentConfig {
            mu: self.factor.rep.mu,
            theta: self.theta,
            t: self.factor.t,
            s: self.s,
            k: self.factor.rep.k,
            pad: self.factor.rep.pad,
        }
    }

    fn tensor(&self) -> Result<TensorRep, CliError> {
        let c = self.component();
        Ok(TensorRep::from_reps(
            Arc::new(build_rep(c.left())?),
            Arc::new(build_rep(c.right())?),
            c.t,
            c.s,
        ))
    }
}

impl RepArgs {
    fn params(&self) -> horolab::rep::RepParams {
        let p = horolab::rep::RepParams::new(self.mu, self.k);
        match self.pad {
            Some(pad) => p.with_pad(pad),
            None => p,
        }
    }
}

impl FactorArgs {
    fn params(&self) -> horolab::rep::RepParams {
        self.rep.params()
    }

    fn gen(&self) -> TestFunctions {
        TestFunctions::new(self.seed)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Split,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Adjoint,
    Display,
}

impl From<ConventionArg> for MixingConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Adjoint => MixingConvention::Adjoint,
            ConventionArg::Display => MixingConvention::Display,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepOp {
    Solve,
    Transfer,
    Split,
    Cascade,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Acceptance,
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&PathBuf>, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    emit(out, &bytes)
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>, CliError> {
    s.parse().map_err(|_| CliError::SchemaViolation(format!("not a rational number: {s}")))
}

fn parse_components(spec: &str) -> Result<Vec<ComponentConfig>, CliError> {
    spec.split(';')
        .filter(|e| !e.trim().is_empty())
        .map(|entry| {
            let bad = || CliError::SchemaViolation(format!("component `{entry}` is not mu,theta,k[,t,s]"));
            let parts: Vec<&str> = entry.split(',').map(str::trim).collect();
            if parts.len() != 3 && parts.len() != 5 {
                return Err(bad());
            }
            let num = |i: usize| parts[i].parse::<f64>().map_err(|_| bad());
            Ok(ComponentConfig {
                mu: num(0)?,
                theta: num(1)?,
                k: parts[2].parse().map_err(|_| bad())?,
                t: if parts.len() == 5 { num(3)? } else { 1.0 },
                s: if parts.len() == 5 { num(4)? } else { 1.0 },
                pad: None,
            })
        })
        .collect()
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let quiet = cli.quiet;
    match cli.command {
        Command::BuildRep(a) => emit_json(None, &experiments::rep_summary(a.params())?),
        Command::Solve(f) => {
            let rep = Arc::new(build_rep(f.params())?);
            let ds = experiments::distributions(&rep, f.t, f.kernel_tol)?;
            emit_json(f.out.as_ref(), &experiments::solve(&ds, &f.gen(), &f.orders)?)
        }
        Command::Transfer(p) => {
            let t = p.tensor()?;
            let f = &p.factor;
            let ds = experiments::distributions(t.left(), f.t, f.kernel_tol)?;
            emit_json(f.out.as_ref(), &experiments::transfer(&t, &ds, &f.gen(), &f.orders)?)
        }
        Command::Split(p) => {
            let t = p.tensor()?;
            let f = &p.factor;
            let ds = experiments::distributions(t.left(), f.t, f.kernel_tol)?;
            emit_json(f.out.as_ref(), &experiments::split(&t, &ds, &f.gen(), &f.orders)?)
        }
        Command::Cascade { pair, mode, convention } => {
            let t = pair.tensor()?;
            let f = &pair.factor;
            let ds = experiments::distributions(t.left(), f.t, f.kernel_tol)?;
            let mode = match mode {
                ModeArg::Split => CascadeMode::Split,
                ModeArg::Strict => CascadeMode::Strict,
            };
            let summary = experiments::cascade_run(&t, &ds, &f.gen(), &f.orders, mode, convention.into())?;
            emit_json(f.out.as_ref(), &summary)
        }
        Command::ConstCohomology { convention, t, s, json } => {
            let c = constant_cohomology_with(convention.into(), parse_ratio(&t)?, parse_ratio(&s)?);
            if json {
                return emit_json(None, &c);
            }
            println!("dim {}", c.dim);
            println!("cocycle dim {}", c.cocycle_dim);
            println!("coboundary dim {}", c.coboundary_dim);
            println!("quotient basis:");
            for (v, label) in c.quotient_basis.iter().zip(&c.quotient_labels) {
                let coords: Vec<String> = CONST_SLOT_NAMES
                    .iter()
                    .zip(v.0.iter())
                    .filter(|(_, x)| **x != 0.0)
                    .map(|(n, x)| format!("{x} {n}"))
                    .collect();
                println!("  {}: {}", label.as_deref().unwrap_or("-"), coords.join(" + "));
            }
            Ok(())
        }
        Command::Decay { factor, r } => {
            let rep = Arc::new(build_rep(factor.params())?);
            let ds = experiments::distributions(&rep, factor.t, factor.kernel_tol)?;
            let report = experiments::decay(&ds, &factor.gen(), r)?;
            if !quiet {
                eprintln!(
                    "slope {}, monotone {}",
                    report.slope.map_or("none".into(), |s| format!("{s:.3}")),
                    report.monotone
                );
            }
            emit(factor.out.as_ref(), &decay_csv(&report)?)
        }
        Command::Sweep { op, pair, levels } => {
            let op = match op {
                SweepOp::Solve => Op::Solve,
                SweepOp::Transfer => Op::Transfer,
                SweepOp::Split => Op::Split,
                SweepOp::Cascade => Op::Cascade,
            };
            let f = &pair.factor;
            let rows = sweep(op, &pair.component(), &levels, &f.gen(), f.kernel_tol, &f.orders)?;
            emit(f.out.as_ref(), &sweep_csv(&rows)?)
        }
        Command::Run {
            config,
            preset,
            out,
            seed,
            components,
        } => {
            let mut cfg = match (config, preset) {
                (Some(path), _) => ExperimentConfig::load(&path)?,
                (None, Some(Preset::Acceptance)) => ExperimentConfig::acceptance(),
                (None, None) => unreachable!("clap requires one of them"),
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(spec) = components {
                cfg.components = parse_components(&spec)?;
            }
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            let (report, timing) = horolab_cli::run(&cfg)?;
            write_outputs(&cfg.output_dir, &report, &timing)?;
            if !quiet {
                for a in &report.assertions {
                    let at = a.component.map_or(String::new(), |i| format!(" [component {i}]"));
                    eprintln!(
                        "{} {}{at}: {:.3e} (bound {:.1e})",
                        if a.pass { "PASS" } else { "FAIL" },
                        a.name,
                        a.value,
                        a.bound
                    );
                }
                eprintln!(
                    "{} of {} assertions passed; reports in {}",
                    report.assertions.len() - report.failed(),
                    report.assertions.len(),
                    cfg.output_dir.display()
                );
            }
            if report.passed {
                Ok(())
            } else {
                Err(CliError::AssertionFailed { failed: report.failed() })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
