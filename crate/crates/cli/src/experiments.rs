//! One function per experiment, each returning a serialisable summary.

use std::sync::Arc;

use horolab::cocycle::{solve_coboundary_with_orders, solve_transfer_with_orders, split_with_orders, RatioRow};
use horolab::distributions::{annihilator_project, decay_report, invariant_distributions, DecayReport, DistributionSet};
use horolab::random::TestFunctions;
use horolab::rep::{bracket_report, build_rep, horocycle_map, RepParams, Space, TruncatedRep};
use horolab::tensor::{Factor, TensorRep};
use horolab::vector_field::{bbl_apply, cascade, CascadeMode, CascadeReport, MixingConvention, VfSection};
use horolab::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepSummary {
    pub mu: f64,
    pub series: String,
    pub k: usize,
    pub pad: usize,
    pub dim: usize,
    pub window_dim: usize,
    pub lowest_index: i64,
    pub bracket_residual: f64,
}

pub fn rep_summary(params: RepParams) -> Result<RepSummary> {
    let rep = build_rep(params)?;
    Ok(summarize(&rep))
}

pub fn summarize(rep: &TruncatedRep) -> RepSummary {
    RepSummary {
        mu: rep.mu(),
        series: format!("{:?}", rep.series()),
        k: rep.params().trunc,
        pad: rep.params().pad,
        dim: rep.dim(),
        window_dim: rep.window_dim(),
        lowest_index: rep.indices()[0],
        bracket_residual: bracket_report(rep).max(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSummary {
    pub count: usize,
    pub labelled: usize,
    pub smallest_kept_singular_value: Option<f64>,
    pub invariance_residual: f64,
    pub biorthogonality_defect: f64,
}

pub fn distributions(rep: &Arc<TruncatedRep>, t: f64, tol: f64) -> Result<DistributionSet> {
    invariant_distributions(rep, t, tol)?.with_duals()
}

pub fn kernel_summary(ds: &DistributionSet) -> Result<KernelSummary> {
    Ok(KernelSummary {
        count: ds.len(),
        labelled: ds.labelled_count(),
        smallest_kept_singular_value: ds
            .singular_values()
            .iter()
            .copied()
            .filter(|&s| s >= ds.tol())
            .reduce(f64::min),
        invariance_residual: ds.invariance_residual(),
        biorthogonality_defect: ds.biorthogonality_defect()?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub f_norm: f64,
    /// `||(M - I) P - f|| / ||f||`.
    pub residual: f64,
    pub ratios: Vec<RatioRow>,
}

/// Coboundary solve for `f`, the annihilator projection of `(M - I) g` with `g` seeded.
pub fn solve(ds: &DistributionSet, gen: &TestFunctions, orders: &[f64]) -> Result<SolveSummary> {
    let rep = ds.rep();
    let g = gen.vector(rep, Space::Window, 0);
    let b = horocycle_map(rep, ds.t()).minus_identity_on_window();
    let f = annihilator_project(ds, &(&b * &g))?;
    let sol = solve_coboundary_with_orders(rep, &f, ds.t(), ds, orders)?;
    let f_norm = f.norm();
    Ok(SolveSummary {
        f_norm,
        residual: if f_norm > 0.0 { sol.residual / f_norm } else { sol.residual },
        ratios: sol.ratios,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSummary {
    pub residual1: f64,
    pub residual2: f64,
    /// `||P - P0|| / ||P0||`.
    pub primitive_error: f64,
    pub ratios: Vec<RatioRow>,
}

/// Transfer round trip from `f = L1 P0`, `g = L2 P0` with `P0` seeded.
pub fn transfer(t: &TensorRep, ds: &DistributionSet, gen: &TestFunctions, orders: &[f64]) -> Result<TransferSummary> {
    let p0 = gen.field(t, Space::Window, Space::Window, 0);
    let f = t.l1(&p0)?;
    let g = t.l2(&p0)?;
    let sol = solve_transfer_with_orders(t, &f, &g, ds, orders)?;
    Ok(TransferSummary {
        residual1: sol.residual1 / f.norm(),
        residual2: sol.residual2 / g.norm(),
        primitive_error: (&sol.p - &p0).norm() / p0.norm(),
        ratios: sol.ratio_table,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub phi_norm: f64,
    pub identity_defect: f64,
    pub consistency_defect: f64,
    pub ratios: Vec<RatioRow>,
}

/// Splitting of a seeded, generally non-closed pair `(f, g)`.
pub fn split(t: &TensorRep, ds: &DistributionSet, gen: &TestFunctions, orders: &[f64]) -> Result<SplitSummary> {
    let f = gen.field(t, Space::Padded, Space::Window, 0);
    let g = gen.field(t, Space::Window, Space::Padded, 1);
    let s = split_with_orders(t, &f, &g, ds, orders)?;
    Ok(SplitSummary {
        phi_norm: s.phi_norm,
        identity_defect: s.identity_defect,
        consistency_defect: s.consistency_defect,
        ratios: s.report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeSummary {
    /// Reconstruction error relative to the input size.
    pub reconstruction: f64,
    /// `||H - H0|| / ||H0||` for the closed input built from `H0`.
    pub round_trip: f64,
    pub report: CascadeReport,
}

/// Cascade of a seeded pair `(F, Y)`, plus the round trip from a seeded `H0`.
pub fn cascade_run(
    t: &TensorRep,
    ds: &DistributionSet,
    gen: &TestFunctions,
    orders: &[f64],
    mode: CascadeMode,
    conv: MixingConvention,
) -> Result<CascadeSummary> {
    let f = VfSection::from_fn(|i| gen.field(t, Space::Padded, Space::Window, i as u64));
    let y = VfSection::from_fn(|i| gen.field(t, Space::Window, Space::Padded, 6 + i as u64));
    let out = cascade(t, &f, &y, ds, CascadeMode::Split, conv, orders)?;
    let reconstruction = (out.report.reconstruction_f / f.norm()).max(out.report.reconstruction_y / y.norm());

    let h0 = VfSection::from_fn(|i| gen.field(t, Space::Window, Space::Window, 12 + i as u64));
    let f0 = bbl_apply(t, Factor::Left, &h0, conv)?;
    let y0 = bbl_apply(t, Factor::Right, &h0, conv)?;
    let back = cascade(t, &f0, &y0, ds, mode, conv, orders)?;
    Ok(CascadeSummary {
        reconstruction,
        round_trip: back.h.sub(&h0)?.norm() / h0.norm(),
        report: out.report,
    })
}

/// Decay table of a seeded probe on the left factor.
pub fn decay(ds: &DistributionSet, gen: &TestFunctions, r: f64) -> Result<DecayReport> {
    let probe = gen.vector(ds.rep(), Space::Padded, 0);
    decay_report(ds, &probe, r)
}
