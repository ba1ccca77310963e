//! Invariant distributions of a time-`T` horocycle map on one factor.
//!
//! A distribution is stored as a coefficient vector `d` on the padded basis and
//! acts on coefficient vectors by the bilinear pairing `D(f) = sum_k d_k f_k`.
//! Test functions live on the unpadded window, so invariance means
//! `d^T (M - I)[:, window] = 0`. The invariant set is the left null space of
//! that tall block, found by singular-value thresholding.
//!
//! The basis is arranged in two groups. Labelled members come first: for
//! `lambda_n = 2 pi n / T` the tempered solution of `d^T (U - i lambda_n) = 0`
//! on interior rows is projected into the invariant set and tagged with `n`.
//! The remaining directions complete the basis and are sorted by their
//! window dual norm of order `SCORE_ORDER`, largest first.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{conj, embed, fit_slope, orthonormal_complement, CMat, CVec, C64};
use crate::rep::{check_order, horocycle_map, Series, Space, TruncatedRep};

pub const DEFAULT_KERNEL_TOL: f64 = 1e-8;

/// Order of the window dual norm used to rank unlabelled distributions.
pub const SCORE_ORDER: f64 = 8.0;

/// Labelled candidates whose component orthogonal to earlier ones falls
/// below this fraction are dropped as duplicates.
const LABEL_INDEPENDENCE: f64 = 0.1;

/// Smallest resolvable pairing, as a multiple of the probe norm.
pub const DECAY_NOISE_FLOOR: f64 = 1e-13;

/// First level included in the decay slope and monotonicity checks.
pub const DECAY_FIRST_LEVEL: i64 = 3;

#[derive(Debug, Clone)]
pub struct DistributionSet {
    rep: Arc<TruncatedRep>,
    t: f64,
    tol: f64,
    vectors: CMat,
    labels: Vec<Option<i64>>,
    label_defects: Vec<f64>,
    scores: Vec<f64>,
    singular_values: Vec<f64>,
    duals: Option<CMat>,
}

pub fn invariant_distributions(rep: &Arc<TruncatedRep>, t: f64, tol: f64) -> Result<DistributionSet> {
    if !(tol > 1e-14 && tol < 1e-4) {
        return Err(LabError::InvalidTolerance { tol });
    }
    let b = horocycle_map(rep, t).minus_identity_on_window();
    let svd = b.svd(true, false);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    if let Some(&bad) = sv.iter().find(|&&s| s >= 0.1 * tol && s <= 10.0 * tol) {
        return Err(LabError::DegenerateTruncation {
            singular_value: bad,
            tol,
        });
    }
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] >= tol).collect();
    let range = u.select_columns(&keep);
    // d^T B = 0 for d the conjugate of a vector orthogonal to range(B).
    let kernel = conj(&orthonormal_complement(&range));

    let mut labelled: Vec<CVec> = Vec::new();
    let mut labels = Vec::new();
    let mut defects = Vec::new();
    if t != 0.0 {
        for n in label_sequence(rep, t) {
            let lambda = 2.0 * PI * n as f64 / t;
            for cand in eigendistributions(rep, lambda) {
                let y = cand.map(|x| C64::new(x, 0.0));
                let proj = &kernel * (kernel.adjoint() * &y);
                let defect = (&y - &proj).norm() / y.norm();
                let mut rest = proj.clone();
                for prev in &labelled {
                    let c = prev.dotc(&rest);
                    rest -= prev * c;
                }
                let pn = proj.norm();
                if pn == 0.0 || rest.norm() < LABEL_INDEPENDENCE * pn {
                    continue;
                }
                labelled.push(proj / C64::new(pn, 0.0));
                labels.push(Some(n));
                defects.push(defect);
            }
        }
    }

    // Keep labelled vectors as they are; orthonormalize only for the completion.
    let n_lab = labelled.len();
    let completion = if n_lab == 0 {
        kernel.clone()
    } else {
        let y = CMat::from_columns(&labelled);
        let coords = kernel.adjoint() * &y;
        let q = coords.qr().q();
        &kernel * orthonormal_complement(&q)
    };
    let completion = sort_by_window_dual_norm(rep, completion);

    let m = n_lab + completion.ncols();
    let n = rep.dim();
    let mut vectors = CMat::zeros(n, m);
    for (j, v) in labelled.iter().enumerate() {
        vectors.set_column(j, v);
    }
    if completion.ncols() > 0 {
        vectors.columns_mut(n_lab, completion.ncols()).copy_from(&completion);
    }
    labels.resize(m, None);
    let scores = (0..m).map(|j| window_dual_norm(rep, &vectors.column(j).into_owned())).collect();

    Ok(DistributionSet {
        rep: rep.clone(),
        t,
        tol,
        vectors,
        labels,
        label_defects: defects,
        scores,
        singular_values: sv,
        duals: None,
    })
}

/// Frequencies `n` whose eigenvalue `2 pi n / T` lies inside the window.
fn label_sequence(rep: &TruncatedRep, t: f64) -> Vec<i64> {
    let levels = (t.abs() * rep.params().trunc as f64 / PI).floor() as i64;
    let discrete = matches!(rep.series(), Series::Discrete { .. });
    let mut out = vec![0];
    for level in 1..=levels {
        for n in [level, -level] {
            if discrete && n as f64 / t < 0.0 {
                continue;
            }
            out.push(n);
        }
    }
    out
}

/// Real solutions of `(S - lambda) d = 0` on interior rows, where `S = -iU`.
///
/// `(S - lambda) d` may be nonzero only on the free boundary rows, so `d`
/// lies in the span of the resolvent applied to those rows. The resolvent is
/// expanded in the eigenbasis of `S`; the eigenvalue nearest `lambda` is
/// split off so that the construction stays finite when `lambda` hits the
/// spectrum. For two free rows the tempered member (least mass on the side
/// where the eigenfunction cannot oscillate) is returned unless `lambda = 0`,
/// where both are kept.
pub fn eigendistributions(rep: &TruncatedRep, lambda: f64) -> Vec<DVector<f64>> {
    let (q, vals) = rep.flow_eigen();
    let n = rep.dim();
    let last = n - 1;
    let star = (0..vals.len())
        .min_by(|&i, &j| {
            (vals[i] - lambda).abs().total_cmp(&(vals[j] - lambda).abs())
        })
        .unwrap();
    let eps = (vals[star] - lambda).abs();
    let sign = if vals[star] >= lambda { 1.0 } else { -1.0 };
    let combine = |coef: &dyn Fn(usize) -> f64| {
        let mut v = DVector::zeros(n);
        for j in 0..vals.len() {
            let c = coef(j);
            if c != 0.0 {
                v.axpy(c, &q.column(j), 1.0);
            }
        }
        v
    };
    let unit = |v: DVector<f64>| {
        let nv = v.norm();
        v / nv
    };

    if let Series::Discrete { .. } = rep.series() {
        let b = |j: usize| q[(last, j)];
        let d = combine(&|j| {
            if j == star {
                b(j) * sign
            } else {
                b(j) * eps / (vals[j] - lambda)
            }
        });
        return vec![unit(d)];
    }

    let a = |j: usize| q[(0, j)];
    let b = |j: usize| q[(last, j)];
    let (as_, bs) = (a(star), b(star));
    let sing = combine(&|j| {
        if j == star {
            (as_ * as_ + bs * bs) * sign
        } else {
            (a(j) * as_ + b(j) * bs) * eps / (vals[j] - lambda)
        }
    });
    let reg = combine(&|j| {
        if j == star {
            0.0
        } else {
            (bs * a(j) - as_ * b(j)) / (vals[j] - lambda)
        }
    });
    let pair = DMatrix::from_columns(&[unit(sing), unit(reg)]);
    let basis = pair.qr().q();
    if lambda == 0.0 {
        return vec![basis.column(0).into_owned(), basis.column(1).into_owned()];
    }
    // Mass on the forbidden side as a 2x2 quadratic form; keep its minimizer.
    let idx = rep.indices();
    let forbidden: Vec<usize> = (0..n)
        .filter(|&p| if lambda > 0.0 { idx[p] < 0 } else { idx[p] > 0 })
        .collect();
    let mut form = DMatrix::<f64>::zeros(2, 2);
    for &p in &forbidden {
        for i in 0..2 {
            for j in 0..2 {
                form[(i, j)] += basis[(p, i)] * basis[(p, j)];
            }
        }
    }
    let eig = SymmetricEigen::new(form);
    let k = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
    let coef = eig.eigenvectors.column(k);
    vec![unit(&basis * coef)]
}

fn window_dual_norm(rep: &TruncatedRep, d: &CVec) -> f64 {
    let w = rep.window();
    rep.window_indices()
        .iter()
        .zip(w)
        .map(|(&k, p)| d[p].norm_sqr() * rep.weight(k).powf(-SCORE_ORDER))
        .sum::<f64>()
        .sqrt()
}

/// Rotates an orthonormal block so that its window dual norms are
/// decreasing and its columns are mutually orthogonal in that norm.
fn sort_by_window_dual_norm(rep: &TruncatedRep, z: CMat) -> CMat {
    let q = z.ncols();
    if q == 0 {
        return z;
    }
    let w = rep.window();
    let mut a = z.rows(w.start, w.len()).into_owned();
    for (i, &k) in rep.window_indices().iter().enumerate() {
        let s = rep.weight(k).powf(-SCORE_ORDER / 2.0);
        a.row_mut(i).scale_mut(s);
    }
    let gram = a.adjoint() * &a;
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let v = eig.eigenvectors.select_columns(&order);
    z * v
}

impl DistributionSet {
    /// Wraps explicit distribution vectors (columns, padded basis).
    pub fn from_vectors(rep: &Arc<TruncatedRep>, t: f64, tol: f64, vectors: CMat) -> Result<Self> {
        if vectors.nrows() != rep.dim() {
            return Err(LabError::DimensionMismatch {
                context: "distribution vectors",
                expected: rep.dim(),
                found: vectors.nrows(),
            });
        }
        let m = vectors.ncols();
        let scores = (0..m).map(|j| window_dual_norm(rep, &vectors.column(j).into_owned())).collect();
        Ok(DistributionSet {
            rep: rep.clone(),
            t,
            tol,
            vectors,
            labels: vec![None; m],
            label_defects: Vec::new(),
            scores,
            singular_values: Vec::new(),
            duals: None,
        })
    }

    /// Computes the duals in place.
    pub fn with_duals(self) -> Result<Self> {
        dual_basis(self)
    }

    pub fn rep(&self) -> &Arc<TruncatedRep> {
        &self.rep
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distribution vectors as columns on the padded basis.
    pub fn vectors(&self) -> &CMat {
        &self.vectors
    }

    pub fn labels(&self) -> &[Option<i64>] {
        &self.labels
    }

    pub fn labelled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    /// Distance of each labelled eigen-solution from the invariant set,
    /// relative to its norm, before projection.
    pub fn label_defects(&self) -> &[f64] {
        &self.label_defects
    }

    /// Window dual norms of order `SCORE_ORDER`.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Singular values of `(M - I)` on window test functions.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn duals(&self) -> Option<&CMat> {
        self.duals.as_ref()
    }

    fn require_duals(&self) -> Result<&CMat> {
        self.duals.as_ref().ok_or(LabError::MissingDuals)
    }

    /// Checks that this set belongs to `rep` at time `t`.
    pub fn check_matches(&self, rep: &TruncatedRep, t: f64) -> Result<()> {
        if self.rep.params() != rep.params() || self.t != t {
            return Err(LabError::DistributionMismatch);
        }
        Ok(())
    }

    fn padded(&self, f: &CVec) -> Result<CVec> {
        match self.rep.space_of(f.len())? {
            Space::Padded => Ok(f.clone()),
            Space::Window => Ok(embed(f, self.rep.dim(), self.rep.window().start)),
        }
    }

    /// All pairings `D_n(f)`; `f` may be a window or padded vector.
    pub fn pair(&self, f: &CVec) -> Result<CVec> {
        let f = self.padded(f)?;
        Ok(self.vectors.transpose() * f)
    }

    /// Pairings with every column of a matrix with padded rows.
    pub fn pair_columns(&self, f: &CMat) -> Result<CMat> {
        if f.nrows() != self.rep.dim() {
            return Err(LabError::DimensionMismatch {
                context: "pairing rows",
                expected: self.rep.dim(),
                found: f.nrows(),
            });
        }
        Ok(self.vectors.transpose() * f)
    }

    /// `max_n ||D_n (M - I)|| / ||D_n||` over window test functions.
    pub fn invariance_residual(&self) -> f64 {
        let b = horocycle_map(&self.rep, self.t).minus_identity_on_window();
        let r = self.vectors.transpose() * b;
        (0..self.len())
            .map(|j| r.row(j).norm() / self.vectors.column(j).norm())
            .fold(0.0, f64::max)
    }

    /// `max |D_n(gamma_m) - delta_nm|`.
    pub fn biorthogonality_defect(&self) -> Result<f64> {
        let g = self.require_duals()?;
        let m = self.vectors.transpose() * g;
        let id = CMat::identity(self.len(), self.len());
        Ok(crate::linalg::max_abs(&(m - id)))
    }

    /// Sobolev norms of the duals of labelled distributions, by label.
    pub fn dual_growth(&self, r: f64) -> Result<Vec<(i64, f64)>> {
        let g = self.require_duals()?;
        let mut out = Vec::new();
        for (j, l) in self.labels.iter().enumerate() {
            if let Some(n) = l {
                out.push((*n, self.rep.sobolev_norm(&g.column(j).into_owned(), r)?));
            }
        }
        Ok(out)
    }
}

/// Minimum-norm biorthogonal duals `Gamma = conj(D) (D^T conj(D))^{-1}`.
pub fn dual_basis(mut ds: DistributionSet) -> Result<DistributionSet> {
    if ds.is_empty() {
        return Err(LabError::RankDeficient { rcond: 0.0 });
    }
    let dbar = conj(&ds.vectors);
    let gram = ds.vectors.transpose() * &dbar;
    let eig = SymmetricEigen::new(gram.clone());
    let hi = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let rcond = if hi > 0.0 { lo / hi } else { 0.0 };
    if !(rcond > 1e-12) {
        return Err(LabError::RankDeficient { rcond });
    }
    let chol = gram.cholesky().ok_or(LabError::RankDeficient { rcond })?;
    // Gamma^H = G^{-1} D^T since G is Hermitian.
    let duals = (chol.solve(&dbar.adjoint())).adjoint();
    ds.duals = Some(duals);
    Ok(ds)
}

/// `f - sum_n D_n(f) gamma_n` on the padded basis.
pub fn annihilator_project(ds: &DistributionSet, f: &CVec) -> Result<CVec> {
    let g = ds.require_duals()?;
    let f = ds.padded(f)?;
    let p = ds.vectors.transpose() * &f;
    Ok(f - g * p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    /// Frequency level `|n|`.
    pub n: i64,
    /// l2 combination of `|D_n(probe)|` over the labels at this level.
    pub pairing: f64,
    /// `||probe||_{3r+8} * max(n, 1)^{-(r+2)}`.
    pub envelope: f64,
    pub ratio: f64,
    pub below_floor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub r: f64,
    pub rows: Vec<DecayRow>,
    /// Log-log slope of the pairing against `n` over levels `>= DECAY_FIRST_LEVEL`
    /// above the noise floor.
    pub slope: Option<f64>,
    /// Pairings non-increasing over the same levels.
    pub monotone: bool,
    /// Unlabelled distributions are not part of the table.
    pub unlabelled: usize,
}

pub fn decay_report(ds: &DistributionSet, probe: &CVec, r: f64) -> Result<DecayReport> {
    check_order(r)?;
    let pairings = ds.pair(probe)?;
    let probe_norm = ds.rep.sobolev_norm(probe, 0.0)?;
    let high = ds.rep.sobolev_norm(probe, 3.0 * r + 8.0)?;
    // A labelled vector sits `defect` away from its projection, so pairings
    // below `defect * ||probe||` are not resolved.
    let mut levels: std::collections::BTreeMap<i64, (f64, f64)> = Default::default();
    for (j, l) in ds.labels.iter().enumerate() {
        if let Some(n) = l {
            let e = levels.entry(n.abs()).or_insert((0.0, DECAY_NOISE_FLOOR));
            e.0 += pairings[j].norm_sqr();
            e.1 = e.1.max(ds.label_defects.get(j).copied().unwrap_or(0.0));
        }
    }
    let rows: Vec<DecayRow> = levels
        .into_iter()
        .map(|(n, (sq, defect))| {
            let pairing = sq.sqrt();
            let envelope = high * (n.max(1) as f64).powf(-(r + 2.0));
            DecayRow {
                n,
                pairing,
                envelope,
                ratio: if envelope > 0.0 { pairing / envelope } else { 0.0 },
                below_floor: pairing <= defect * probe_norm,
            }
        })
        .collect();
    let tail: Vec<&DecayRow> = rows
        .iter()
        .filter(|row| row.n >= DECAY_FIRST_LEVEL && !row.below_floor)
        .collect();
    let xs: Vec<f64> = tail.iter().map(|row| (row.n as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|row| row.pairing.ln()).collect();
    let monotone = tail.windows(2).all(|w| w[1].pairing <= w[0].pairing);
    Ok(DecayReport {
        r,
        rows,
        slope: fit_slope(&xs, &ys),
        monotone,
        unlabelled: ds.labels.iter().filter(|l| l.is_none()).count(),
    })
}
