//! Ratio tables against the truncation level.

use std::sync::Arc;

use horolab::cocycle::RatioRow;
use horolab::random::TestFunctions;
use horolab::rep::build_rep;
use horolab::tensor::TensorRep;
use serde::{Deserialize, Serialize};

use crate::config::{ComponentConfig, Op};
use crate::error::CliError;
use crate::experiments;

pub const DEFAULT_LEVELS: [usize; 4] = [8, 16, 32, 64];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub op: Op,
    pub k: usize,
    pub quantity: String,
    pub r: f64,
    pub num_order: f64,
    pub den_order: f64,
    pub log10_ratio: Option<f64>,
    /// Change of `log10_ratio` from the previous level.
    pub change_log10: Option<f64>,
    /// `|change_log10| < 1`, the ratio moved by less than a factor 10.
    pub stable: Option<bool>,
}

fn ratios(op: Op, c: &ComponentConfig, gen: &TestFunctions, kernel_tol: f64, orders: &[f64]) -> Result<Vec<RatioRow>, CliError> {
    let t = TensorRep::from_reps(Arc::new(build_rep(c.left())?), Arc::new(build_rep(c.right())?), c.t, c.s);
    let ds = experiments::distributions(t.left(), c.t, kernel_tol)?;
    Ok(match op {
        Op::Solve => experiments::solve(&ds, gen, orders)?.ratios,
        Op::Transfer => experiments::transfer(&t, &ds, gen, orders)?.ratios,
        Op::Split => experiments::split(&t, &ds, gen, orders)?.ratios,
        Op::Cascade => {
            experiments::cascade_run(
                &t,
                &ds,
                gen,
                orders,
                horolab::vector_field::CascadeMode::Split,
                horolab::vector_field::MixingConvention::Adjoint,
            )?
            .report
            .ratios
        }
        Op::Decay => {
            return Err(CliError::SchemaViolation("sweep supports solve, transfer, split and cascade".into()));
        }
    })
}

pub fn sweep(
    op: Op,
    base: &ComponentConfig,
    levels: &[usize],
    gen: &TestFunctions,
    kernel_tol: f64,
    orders: &[f64],
) -> Result<Vec<SweepRow>, CliError> {
    let mut out = Vec::new();
    let mut previous: Option<Vec<RatioRow>> = None;
    for &k in levels {
        let c = ComponentConfig { k, pad: None, ..base.clone() };
        let rows = ratios(op, &c, gen, kernel_tol, orders)?;
        for (i, row) in rows.iter().enumerate() {
            let change = previous
                .as_ref()
                .and_then(|p| p.get(i))
                .and_then(|p| Some(row.log10_ratio? - p.log10_ratio?));
            out.push(SweepRow {
                op,
                k,
                quantity: row.quantity.clone(),
                r: row.r,
                num_order: row.num_order,
                den_order: row.den_order,
                log10_ratio: row.log10_ratio,
                change_log10: change,
                stable: change.map(|d| d.abs() < 1.0),
            });
        }
        previous = Some(rows);
    }
    Ok(out)
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}
