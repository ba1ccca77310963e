//! Coboundary, transfer and splitting solvers for the first factor.
//!
//! The left factor carries the distributional obstructions. A right-hand side
//! `f` has padded rows and window columns; solutions `P` live on
//! window x window. The block `B = (M_1 - I)[:, window]` is injective, so
//! solutions are unique and the min-norm least-squares solve recovers them.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSet;
use crate::error::{LabError, Result};
use crate::linalg::{CMat, CVec, C64};
use crate::rep::{horocycle_map, Space, TruncatedRep};
use crate::tensor::TensorRep;

/// Relative bound on invariant pairings and on the coboundary residual.
pub const SOLVE_TOL: f64 = 1e-8;

/// Relative bound on the second transfer residual.
pub const TRANSFER_TOL: f64 = 1e-7;

pub const DEFAULT_ORDERS: [f64; 3] = [0.0, 1.0, 2.0];

/// One Sobolev ratio `||num||_{num_order} / ||den||_{den_order}`, kept in log10
/// form because high orders overflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub quantity: String,
    pub r: f64,
    pub num_order: f64,
    pub den_order: f64,
    pub log10_num: Option<f64>,
    pub log10_den: Option<f64>,
    pub log10_ratio: Option<f64>,
}

impl RatioRow {
    pub fn from_logs(quantity: &str, r: f64, num_order: f64, den_order: f64, ln_num: f64, ln_den: f64) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        let l10 = std::f64::consts::LOG10_E;
        RatioRow {
            quantity: quantity.to_string(),
            r,
            num_order,
            den_order,
            log10_num: finite(ln_num * l10),
            log10_den: finite(ln_den * l10),
            log10_ratio: finite((ln_num - ln_den) * l10),
        }
    }

    pub fn ratio(&self) -> Option<f64> {
        self.log10_ratio.map(|x| 10f64.powf(x))
    }
}

/// Min-norm solver for `(M - I) P = f` on one factor.
pub struct CoboundarySolver<'a> {
    ds: &'a DistributionSet,
    b: CMat,
    svd: SVD<C64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl<'a> CoboundarySolver<'a> {
    pub fn new(ds: &'a DistributionSet) -> Self {
        let b = horocycle_map(ds.rep(), ds.t()).minus_identity_on_window();
        let svd = b.clone().svd(true, true);
        CoboundarySolver { ds, b, svd }
    }

    pub fn rep(&self) -> &TruncatedRep {
        self.ds.rep()
    }

    /// `(M - I)[:, window]`.
    pub fn operator(&self) -> &CMat {
        &self.b
    }

    /// Least-squares solve of every column, singular values below the
    /// distribution tolerance discarded.
    pub fn solve_columns(&self, f: &CMat) -> Result<CMat> {
        if f.nrows() != self.b.nrows() {
            return Err(LabError::DimensionMismatch {
                context: "coboundary right-hand side",
                expected: self.b.nrows(),
                found: f.nrows(),
            });
        }
        Ok(self
            .svd
            .solve(f, self.ds.tol())
            .expect("both singular vector sets computed"))
    }

    /// Largest invariant pairing over columns, with its column.
    pub fn worst_pairing(&self, f: &CMat) -> Result<(usize, usize, f64)> {
        let p = self.ds.pair_columns(f)?;
        let mut worst = (0, 0, 0.0);
        for j in 0..p.ncols() {
            for i in 0..p.nrows() {
                let v = p[(i, j)].norm();
                if v > worst.2 {
                    worst = (i, j, v);
                }
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoboundarySolution {
    /// Window coefficients.
    pub p: CVec,
    pub residual: f64,
    pub ratios: Vec<RatioRow>,
}

/// Solves `(M_T - I) P = f` for `f` in the annihilator of `ds`.
pub fn solve_coboundary(rep: &TruncatedRep, f: &CVec, t: f64, ds: &DistributionSet) -> Result<CoboundarySolution> {
    solve_coboundary_with_orders(rep, f, t, ds, &DEFAULT_ORDERS)
}

pub fn solve_coboundary_with_orders(
    rep: &TruncatedRep,
    f: &CVec,
    t: f64,
    ds: &DistributionSet,
    orders: &[f64],
) -> Result<CoboundarySolution> {
    ds.check_matches(rep, t)?;
    let f = match rep.space_of(f.len())? {
        Space::Padded => f.clone(),
        Space::Window => crate::linalg::embed(f, rep.dim(), rep.window().start),
    };
    let fnorm = f.norm();
    let solver = CoboundarySolver::new(ds);
    let fm = CMat::from_column_slice(f.len(), 1, f.as_slice());
    let bound = SOLVE_TOL * fnorm;
    let (index, _, pairing) = solver.worst_pairing(&fm)?;
    if pairing > bound {
        return Err(LabError::AnnihilatorViolation { index, pairing, bound });
    }
    let p = solver.solve_columns(&fm)?.column(0).into_owned();
    let residual = (solver.operator() * &p - &f).norm();
    if residual > bound {
        return Err(LabError::IllConditioned { residual, bound });
    }
    let ratios = orders
        .iter()
        .map(|&r| {
            let num = rep.log_sobolev_norm(&p, r)?;
            let den = rep.log_sobolev_norm(&f, 3.0 * r + 4.0)?;
            Ok(RatioRow::from_logs("P/f", r, r, 3.0 * r + 4.0, num, den))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoboundarySolution { p, residual, ratios })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferSolution {
    /// Window x window coefficients.
    pub p: CMat,
    pub residual1: f64,
    pub residual2: f64,
    pub ratio_table: Vec<RatioRow>,
}

fn check_shape(t: &TensorRep, c: &CMat, left: Space, right: Space, context: &'static str) -> Result<()> {
    let (a, b) = t.shape(left, right);
    if c.shape() != (a, b) {
        return Err(LabError::DimensionMismatch {
            context,
            expected: a * b,
            found: c.len(),
        });
    }
    Ok(())
}

/// Common primitive `P` with `L_1 P = f` and `L_2 P = g`, for `f` with padded
/// rows and window columns and `g` with window rows and padded columns.
pub fn solve_transfer(t: &TensorRep, f: &CMat, g: &CMat, ds_left: &DistributionSet) -> Result<TransferSolution> {
    solve_transfer_with_orders(t, f, g, ds_left, &DEFAULT_ORDERS)
}

pub fn solve_transfer_with_orders(
    t: &TensorRep,
    f: &CMat,
    g: &CMat,
    ds_left: &DistributionSet,
    orders: &[f64],
) -> Result<TransferSolution> {
    ds_left.check_matches(t.left(), t.t())?;
    check_shape(t, f, Space::Padded, Space::Window, "transfer f")?;
    check_shape(t, g, Space::Window, Space::Padded, "transfer g")?;
    let scale = f.norm().max(g.norm());
    let bound = SOLVE_TOL * scale;
    let defect = (t.l1(g)? - t.l2(f)?).norm();
    if defect > bound {
        return Err(LabError::CompatibilityViolation { defect, bound });
    }
    let solver = CoboundarySolver::new(ds_left);
    let (_, column, pairing) = solver.worst_pairing(f)?;
    if pairing > bound {
        return Err(LabError::ColumnObstruction { column, pairing, bound });
    }
    let p = solver.solve_columns(f)?;
    let residual1 = (t.l1(&p)? - f).norm();
    let residual2 = (t.l2(&p)? - g).norm();
    let limit = TRANSFER_TOL * g.norm();
    if residual1 > bound {
        return Err(LabError::IllConditioned { residual: residual1, bound });
    }
    if residual2 > limit {
        return Err(LabError::IllConditioned { residual: residual2, bound: limit });
    }
    let ratio_table = orders
        .iter()
        .map(|&r| {
            let num = t.log_sobolev_norm(&p, r)?;
            let den = t.log_sobolev_norm(f, 3.0 * r + 6.0)?;
            Ok(RatioRow::from_logs("P/f", r, r, 3.0 * r + 6.0, num, den))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransferSolution {
        p,
        residual1,
        residual2,
        ratio_table,
    })
}

/// `R f = sum_n gamma_n (x) D_n(f columns)`; `f` must have padded rows.
pub fn splitting_r(t: &TensorRep, f: &CMat, ds_left: &DistributionSet) -> Result<CMat> {
    ds_left.check_matches(t.left(), t.t())?;
    let gamma = ds_left.duals().ok_or(LabError::MissingDuals)?;
    Ok(gamma * ds_left.pair_columns(f)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub p: CMat,
    /// `f - L_1 P`, padded rows.
    pub f_res: CMat,
    /// `g - L_2 P`, padded columns.
    pub g_res: CMat,
    pub phi_norm: f64,
    /// `||f_res - R f|| / ||f||`.
    pub identity_defect: f64,
    /// `||L_1 (L_2 P - g) - R_perp phi|| / ||phi||`.
    pub consistency_defect: f64,
    pub report: Vec<RatioRow>,
}

/// Splits a possibly non-closed pair `(f, g)` into a coboundary `(L_1 P, L_2 P)`
/// and residuals controlled by the defect `phi = L_2 f - L_1 g`.
pub fn split(t: &TensorRep, f: &CMat, g: &CMat, ds_left: &DistributionSet) -> Result<SplitResult> {
    split_with_orders(t, f, g, ds_left, &DEFAULT_ORDERS)
}

pub fn split_with_orders(
    t: &TensorRep,
    f: &CMat,
    g: &CMat,
    ds_left: &DistributionSet,
    orders: &[f64],
) -> Result<SplitResult> {
    check_shape(t, f, Space::Padded, Space::Window, "split f")?;
    check_shape(t, g, Space::Window, Space::Padded, "split g")?;
    let phi = t.l2(f)? - t.l1(g)?;
    let rf = splitting_r(t, f, ds_left)?;
    let rperp = f - &rf;
    let solver = CoboundarySolver::new(ds_left);
    let fnorm = f.norm();
    let (index, _, pairing) = solver.worst_pairing(&rperp)?;
    let bound = SOLVE_TOL * fnorm;
    if pairing > bound {
        return Err(LabError::AnnihilatorViolation { index, pairing, bound });
    }
    let p = solver.solve_columns(&rperp)?;
    let lp = t.l1(&p)?;
    let residual = (&lp - &rperp).norm();
    if residual > bound {
        return Err(LabError::IllConditioned { residual, bound });
    }
    let f_res = f - lp;
    let g_res = g - t.l2(&p)?;

    let phi_norm = phi.norm();
    let rel = |x: f64, d: f64| if d > 0.0 { x / d } else { x };
    let identity_defect = rel((&f_res - &rf).norm(), fnorm);
    let rperp_phi = &phi - splitting_r(t, &phi, ds_left)?;
    let lhs = t.l1(&(-&g_res))?;
    let consistency_defect = rel((lhs - rperp_phi).norm(), phi_norm);

    let mut report = Vec::new();
    for &r in orders {
        let s = 3.0 * r + 10.0;
        let lphi = t.log_sobolev_norm(&phi, s)?;
        report.push(RatioRow::from_logs("f_res/phi", r, r, s, t.log_sobolev_norm(&f_res, r)?, lphi));
        report.push(RatioRow::from_logs("g_res/phi", r, r, s, t.log_sobolev_norm(&g_res, r)?, lphi));
        let lp = t.log_sobolev_norm(&p, r)?;
        for s in [9.0 * r + 25.0, 9.0 * r + 28.0] {
            report.push(RatioRow::from_logs("P/f", r, r, s, lp, t.log_sobolev_norm(f, s)?));
        }
    }
    Ok(SplitResult {
        p,
        f_res,
        g_res,
        phi_norm,
        identity_defect,
        consistency_defect,
        report,
    })
}

/// Cocycle defect `||L_2 beta1 - L_1 beta2||`.
pub fn delta2_check(t: &TensorRep, beta1: &CMat, beta2: &CMat) -> Result<f64> {
    let a = t.embed(&t.l2(beta1)?, Space::Padded, Space::Padded)?;
    let b = t.embed(&t.l1(beta2)?, Space::Padded, Space::Padded)?;
    Ok((a - b).norm())
}
