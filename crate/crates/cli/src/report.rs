use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use horolab::cocycle::{RatioRow, TRANSFER_TOL};
use horolab::distributions::DecayReport;
use horolab::random::TestFunctions;
use horolab::tensor::TensorRep;
use horolab::vector_field::{adjoint_identities_check, constant_cohomology, AdjointReport, CascadeMode, ConstCohomology, MixingConvention};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ComponentConfig, ExperimentConfig, Op};
use crate::error::CliError;
use crate::experiments::{self, CascadeSummary, KernelSummary, RepSummary, SolveSummary, SplitSummary, TransferSummary};

pub const RECONSTRUCTION_TOL: f64 = 1e-12;
pub const ROUND_TRIP_TOL: f64 = 1e-6;
pub const BRACKET_TOL: f64 = 1e-9;
pub const ADJOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub component: Option<usize>,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Assertion {
    fn at_most(name: &str, component: Option<usize>, value: f64, bound: f64) -> Self {
        Assertion {
            name: name.to_string(),
            component,
            value,
            bound,
            pass: value <= bound,
        }
    }

    fn holds(name: &str, component: Option<usize>, ok: bool) -> Self {
        Assertion {
            name: name.to_string(),
            component,
            value: f64::from(u8::from(ok)),
            bound: 1.0,
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub index: usize,
    pub config: ComponentConfig,
    pub left: RepSummary,
    pub right: RepSummary,
    pub kernel: KernelSummary,
    pub solve: Option<SolveSummary>,
    pub transfer: Option<TransferSummary>,
    pub split: Option<SplitSummary>,
    pub cascade: Option<CascadeSummary>,
    pub decay: Option<DecayReport>,
}

/// Everything a run produces except wall-clock times, which live in
/// `TimingReport` so that this report is byte-for-byte reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub adjoint: AdjointReport,
    pub const_cohomology: Option<ConstCohomology>,
    pub components: Vec<ComponentReport>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

impl RunReport {
    pub fn failed(&self) -> usize {
        self.assertions.iter().filter(|a| !a.pass).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub total_seconds: f64,
    pub component_seconds: Vec<f64>,
}

fn run_component(cfg: &ExperimentConfig, index: usize, c: &ComponentConfig) -> Result<(ComponentReport, Vec<Assertion>), horolab::LabError> {
    let t = TensorRep::from_reps(
        Arc::new(horolab::rep::build_rep(c.left())?),
        Arc::new(horolab::rep::build_rep(c.right())?),
        c.t,
        c.s,
    );
    let ds = experiments::distributions(t.left(), c.t, cfg.tolerances.kernel_tol)?;
    let gen = TestFunctions::new(cfg.seed).with_envelope(cfg.envelope);
    let orders = &cfg.sobolev_orders;
    let has = |op: Op| cfg.ops.contains(&op);
    let i = Some(index);
    let solve_tol = cfg.tolerances.solve_tol;

    let left = experiments::summarize(t.left());
    let right = experiments::summarize(t.right());
    let kernel = experiments::kernel_summary(&ds)?;
    let mut asserts = vec![
        Assertion::at_most("brackets", i, left.bracket_residual.max(right.bracket_residual), BRACKET_TOL),
        Assertion::at_most("kernel.biorthogonality", i, kernel.biorthogonality_defect, solve_tol),
    ];

    let solve = has(Op::Solve).then(|| experiments::solve(&ds, &gen, orders)).transpose()?;
    if let Some(s) = &solve {
        asserts.push(Assertion::at_most("solve.residual", i, s.residual, solve_tol));
    }
    let transfer = has(Op::Transfer).then(|| experiments::transfer(&t, &ds, &gen, orders)).transpose()?;
    if let Some(s) = &transfer {
        asserts.push(Assertion::at_most("transfer.residual", i, s.residual1.max(s.residual2), TRANSFER_TOL));
    }
    let split = has(Op::Split).then(|| experiments::split(&t, &ds, &gen, orders)).transpose()?;
    if let Some(s) = &split {
        asserts.push(Assertion::at_most("split.identity_defect", i, s.identity_defect, solve_tol));
        asserts.push(Assertion::at_most("split.consistency_defect", i, s.consistency_defect, solve_tol));
        asserts.push(Assertion::holds("split.ratios_finite", i, finite(&s.ratios)));
    }
    let cascade = has(Op::Cascade)
        .then(|| experiments::cascade_run(&t, &ds, &gen, orders, CascadeMode::Split, MixingConvention::Adjoint))
        .transpose()?;
    if let Some(s) = &cascade {
        asserts.push(Assertion::at_most("cascade.reconstruction", i, s.reconstruction, RECONSTRUCTION_TOL));
        asserts.push(Assertion::at_most("cascade.round_trip", i, s.round_trip, ROUND_TRIP_TOL));
    }
    let decay = has(Op::Decay).then(|| experiments::decay(&ds, &gen, 0.0)).transpose()?;
    if let Some(d) = &decay {
        asserts.push(Assertion::holds("decay.monotone", i, d.monotone));
    }
    Ok((
        ComponentReport {
            index,
            config: c.clone(),
            left,
            right,
            kernel,
            solve,
            transfer,
            split,
            cascade,
            decay,
        },
        asserts,
    ))
}

fn finite(rows: &[RatioRow]) -> bool {
    rows.iter().all(|r| r.log10_ratio.is_some())
}

pub fn run(cfg: &ExperimentConfig) -> Result<(RunReport, TimingReport), CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let results: Vec<_> = cfg
        .components
        .par_iter()
        .enumerate()
        .map(|(index, c)| {
            let t0 = Instant::now();
            run_component(cfg, index, c)
                .map(|r| (r, t0.elapsed().as_secs_f64()))
                .map_err(|source| CliError::Component { index, source })
        })
        .collect();

    let adjoint = adjoint_identities_check();
    let mut assertions = vec![Assertion::at_most("adjoint_identities", None, adjoint.max(), ADJOINT_TOL)];
    let const_cohomology = cfg.const_cohomology.then(constant_cohomology);
    if let Some(c) = &const_cohomology {
        assertions.push(Assertion::holds("const_cohomology.dim", None, c.dim == 4 && c.exact_complex));
    }
    let mut components = Vec::with_capacity(results.len());
    let mut component_seconds = Vec::with_capacity(results.len());
    for r in results {
        let ((report, asserts), secs) = r?;
        components.push(report);
        assertions.extend(asserts);
        component_seconds.push(secs);
    }
    let passed = assertions.iter().all(|a| a.pass);
    Ok((
        RunReport {
            config: cfg.clone(),
            adjoint,
            const_cohomology,
            components,
            assertions,
            passed,
        },
        TimingReport {
            total_seconds: start.elapsed().as_secs_f64(),
            component_seconds,
        },
    ))
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct RatioCsvRow<'a> {
    component: usize,
    op: &'a str,
    quantity: &'a str,
    r: f64,
    num_order: f64,
    den_order: f64,
    log10_num: Option<f64>,
    log10_den: Option<f64>,
    log10_ratio: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct DecayCsvRow {
    pub n: i64,
    pub pairing: f64,
    pub envelope: f64,
    pub ratio: f64,
}

pub fn decay_csv(report: &DecayReport) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        w.serialize(DecayCsvRow {
            n: row.n,
            pairing: row.pairing,
            envelope: row.envelope,
            ratio: row.ratio,
        })?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn ratios_csv(report: &RunReport) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    let mut any = false;
    for c in &report.components {
        let tables: [(&str, Option<&Vec<RatioRow>>); 4] = [
            ("solve", c.solve.as_ref().map(|s| &s.ratios)),
            ("transfer", c.transfer.as_ref().map(|s| &s.ratios)),
            ("split", c.split.as_ref().map(|s| &s.ratios)),
            ("cascade", c.cascade.as_ref().map(|s| &s.report.ratios)),
        ];
        for (op, rows) in tables {
            for row in rows.into_iter().flatten() {
                any = true;
                w.serialize(ratio_row(c.index, op, row))?;
            }
        }
        if let Some(s) = &c.cascade {
            for stage in &s.report.stages {
                let op = format!("cascade_stage_{}_{}", stage.factor, stage.stage);
                for row in &stage.ratios {
                    any = true;
                    w.serialize(ratio_row(c.index, &op, row))?;
                }
            }
        }
    }
    if !any {
        w.write_record(["component", "op", "quantity", "r", "num_order", "den_order", "log10_num", "log10_den", "log10_ratio"])?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn ratio_row<'a>(component: usize, op: &'a str, row: &'a RatioRow) -> RatioCsvRow<'a> {
    RatioCsvRow {
        component,
        op,
        quantity: &row.quantity,
        r: row.r,
        num_order: row.num_order,
        den_order: row.den_order,
        log10_num: row.log10_num,
        log10_den: row.log10_den,
        log10_ratio: row.log10_ratio,
    }
}

/// Writes `report.json`, `timing.json`, `ratios.csv` and one
/// `decay_<component>.csv` per component with a decay table.
pub fn write_outputs(dir: &Path, report: &RunReport, timing: &TimingReport) -> Result<(), CliError> {
    write_atomic(&dir.join("report.json"), &serde_json::to_vec_pretty(report)?)?;
    write_atomic(&dir.join("timing.json"), &serde_json::to_vec_pretty(timing)?)?;
    write_atomic(&dir.join("ratios.csv"), &ratios_csv(report)?)?;
    for c in &report.components {
        if let Some(d) = &c.decay {
            write_atomic(&dir.join(format!("decay_{}.csv", c.index)), &decay_csv(d)?)?;
        }
    }
    Ok(())
}
