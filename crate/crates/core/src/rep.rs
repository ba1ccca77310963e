//! Truncated weight-basis models of irreducible unitary representations of SL(2,R).
//!
//! Basis vectors `e_k` are eigenvectors of the compact generator `W = U - V`
//! with `W e_k = i * WEIGHT_STEP * k * e_k`. The ladder operators
//! `E± = X ± (i/2)(U + V)` shift `k` by one; their coefficients are fixed by the
//! commutator `[E+, E-] = -iW` and the Casimir value `mu`.

use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{log_weighted_norm, CMat, CVec, C64, ONE};

/// Eigenvalue increment of `-iW` per basis index.
pub const WEIGHT_STEP: f64 = 2.0;

/// Default padding is this multiple of the truncation.
pub const DEFAULT_PAD_FACTOR: usize = 3;

pub const MIN_TRUNCATION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepParams {
    pub mu: f64,
    pub trunc: usize,
    pub pad: usize,
}

impl RepParams {
    pub fn new(mu: f64, trunc: usize) -> Self {
        RepParams {
            mu,
            trunc,
            pad: DEFAULT_PAD_FACTOR * trunc,
        }
    }

    pub fn with_pad(self, pad: usize) -> Self {
        RepParams { pad, ..self }
    }

    pub fn validate(&self) -> Result<Series> {
        if self.trunc < MIN_TRUNCATION {
            return Err(LabError::TruncationTooSmall { trunc: self.trunc });
        }
        Series::classify(self.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Series {
    Principal,
    Complementary,
    /// Lowest weight representation with index set `k >= lowest`.
    Discrete { lowest: i64 },
}

impl Series {
    pub fn classify(mu: f64) -> Result<Series> {
        if !mu.is_finite() || mu.abs() < 1e-12 {
            return Err(LabError::InvalidCasimir { mu });
        }
        if mu >= 0.25 {
            return Ok(Series::Principal);
        }
        if mu > 0.0 {
            return Ok(Series::Complementary);
        }
        let n = 0.5 * (1.0 + (1.0 - 4.0 * mu).sqrt());
        let rounded = n.round();
        if (n - rounded).abs() > 1e-9 * rounded.max(1.0) || rounded < 2.0 {
            return Err(LabError::InvalidCasimir { mu });
        }
        Ok(Series::Discrete {
            lowest: rounded as i64,
        })
    }
}

/// Which slice of the basis a coefficient vector lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// Unpadded indices `[-K, K]` (or `[n, K]`).
    Window,
    /// The full padded basis.
    Padded,
}

/// Generator matrices on the padded basis.
#[derive(Debug, Clone)]
pub struct Generators {
    pub u: CMat,
    pub x: CMat,
    pub v: CMat,
    pub w: CMat,
}

#[derive(Debug, Clone)]
pub struct TruncatedRep {
    params: RepParams,
    series: Series,
    nu: C64,
    indices: Vec<i64>,
    window: Range<usize>,
    ladder: Vec<f64>,
    gens: Generators,
    interior: Vec<bool>,
    flow_vectors: DMatrix<f64>,
    flow_values: DVector<f64>,
}

pub fn build_rep(params: RepParams) -> Result<TruncatedRep> {
    let series = params.validate()?;
    let mu = params.mu;
    let k = params.trunc as i64;
    let pad = params.pad as i64;
    let (indices, window): (Vec<i64>, Range<usize>) = match series {
        Series::Discrete { lowest } => {
            let top = k.max(lowest);
            let idx: Vec<i64> = (lowest..=top + pad).collect();
            (idx, 0..(top - lowest + 1) as usize)
        }
        _ => {
            let idx: Vec<i64> = (-k - pad..=k + pad).collect();
            (idx, pad as usize..(pad + 2 * k + 1) as usize)
        }
    };
    let n = indices.len();
    let anchor = match series {
        Series::Discrete { lowest } => lowest,
        _ => 0,
    };
    let ladder = ladder_coefficients(mu, &indices, anchor)?;

    let mut e_plus = CMat::zeros(n, n);
    for p in 0..n - 1 {
        e_plus[(p + 1, p)] = C64::new(ladder[p], 0.0);
    }
    let e_minus = -e_plus.transpose();
    let w = CMat::from_diagonal(&CVec::from_iterator(
        n,
        indices.iter().map(|&k| C64::new(0.0, WEIGHT_STEP * k as f64)),
    ));
    let x = (&e_plus + &e_minus) * C64::new(0.5, 0.0);
    let h = (&e_plus - &e_minus) * C64::new(0.0, -1.0);
    let u = (&h + &w) * C64::new(0.5, 0.0);
    let v = (&h - &w) * C64::new(0.5, 0.0);

    let lower_exact = matches!(series, Series::Discrete { .. });
    let interior = (0..n).map(|p| p + 1 < n && (p > 0 || lower_exact)).collect();

    // -iU is real symmetric, so exp(tU) = Q diag(exp(i t lambda)) Q^T.
    let s = DMatrix::from_fn(n, n, |i, j| (u[(i, j)] * C64::new(0.0, -1.0)).re);
    let eig = SymmetricEigen::new(s);

    Ok(TruncatedRep {
        params,
        series,
        nu: C64::new(1.0 - 4.0 * mu, 0.0).sqrt(),
        indices,
        window,
        ladder,
        gens: Generators { u, x, v, w },
        interior,
        flow_vectors: eig.eigenvectors,
        flow_values: eig.eigenvalues,
    })
}

/// `a_k` with `E+ e_k = a_k e_{k+1}`. The Casimir relation at the anchor index
/// fixes `a_{anchor-1}^2 = mu + anchor^2 - anchor`; the commutator then gives
/// `a_k^2 - a_{k-1}^2 = WEIGHT_STEP * k` in both directions.
fn ladder_coefficients(mu: f64, indices: &[i64], anchor: i64) -> Result<Vec<f64>> {
    let lo = indices[0];
    let hi = *indices.last().unwrap();
    let mut sq = std::collections::BTreeMap::new();
    let base = mu + (anchor * anchor - anchor) as f64;
    sq.insert(anchor - 1, base);
    let mut acc = base;
    for k in anchor..=hi {
        acc += WEIGHT_STEP * k as f64;
        sq.insert(k, acc);
    }
    acc = base;
    for k in (lo..anchor - 1).rev() {
        acc -= WEIGHT_STEP * (k + 1) as f64;
        sq.insert(k, acc);
    }
    indices
        .iter()
        .map(|k| {
            let a2 = sq[k];
            if a2 < -1e-12 * (1.0 + mu.abs()) {
                Err(LabError::InvalidCasimir { mu })
            } else {
                Ok(a2.max(0.0).sqrt())
            }
        })
        .collect()
}

impl TruncatedRep {
    pub fn params(&self) -> &RepParams {
        &self.params
    }

    pub fn mu(&self) -> f64 {
        self.params.mu
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }

    /// Padded index set.
    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    /// Position range of the unpadded window inside the padded basis.
    pub fn window(&self) -> Range<usize> {
        self.window.clone()
    }

    pub fn window_indices(&self) -> &[i64] {
        &self.indices[self.window.clone()]
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn window_dim(&self) -> usize {
        self.window.len()
    }

    pub fn space_dim(&self, space: Space) -> usize {
        match space {
            Space::Window => self.window_dim(),
            Space::Padded => self.dim(),
        }
    }

    pub fn space_indices(&self, space: Space) -> &[i64] {
        match space {
            Space::Window => self.window_indices(),
            Space::Padded => &self.indices,
        }
    }

    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    /// Eigenvectors (columns) and eigenvalues of the real symmetric matrix `-iU`.
    pub fn flow_eigen(&self) -> (&DMatrix<f64>, &DVector<f64>) {
        (&self.flow_vectors, &self.flow_values)
    }

    /// Laplacian eigenvalue `1 + mu + 2k^2` on `e_k`.
    pub fn weight(&self, k: i64) -> f64 {
        1.0 + self.params.mu + 0.5 * WEIGHT_STEP * WEIGHT_STEP * (k * k) as f64
    }

    pub fn weights(&self, space: Space) -> Vec<f64> {
        self.space_indices(space)
            .iter()
            .map(|&k| self.weight(k))
            .collect()
    }

    pub fn sobolev_weight(&self, space: Space, r: f64) -> Result<Vec<f64>> {
        check_order(r)?;
        Ok(self
            .weights(space)
            .into_iter()
            .map(|w| w.powf(r))
            .collect())
    }

    /// Space matching a coefficient vector of length `len`.
    pub fn space_of(&self, len: usize) -> Result<Space> {
        if len == self.dim() {
            Ok(Space::Padded)
        } else if len == self.window_dim() {
            Ok(Space::Window)
        } else {
            Err(LabError::DimensionMismatch {
                context: "coefficient vector",
                expected: self.dim(),
                found: len,
            })
        }
    }

    /// Natural logarithm of the Sobolev norm; `-inf` for the zero vector.
    pub fn log_sobolev_norm(&self, coeffs: &CVec, r: f64) -> Result<f64> {
        check_order(r)?;
        let space = self.space_of(coeffs.len())?;
        let idx = self.space_indices(space);
        Ok(log_weighted_norm(
            coeffs
                .iter()
                .zip(idx)
                .map(|(c, &k)| (c.norm(), self.weight(k).ln())),
            r,
        ))
    }

    pub fn sobolev_norm(&self, coeffs: &CVec, r: f64) -> Result<f64> {
        Ok(self.log_sobolev_norm(coeffs, r)?.exp())
    }
}

pub fn sobolev_norm(rep: &TruncatedRep, coeffs: &CVec, r: f64) -> Result<f64> {
    rep.sobolev_norm(coeffs, r)
}

pub(crate) fn check_order(r: f64) -> Result<()> {
    if r < 0.0 || !r.is_finite() {
        Err(LabError::NegativeOrderUnsupported { order: r })
    } else {
        Ok(())
    }
}

/// The time-`t` horocycle map `exp(tU)` on the padded basis.
#[derive(Debug, Clone)]
pub struct HorocycleMap {
    t: f64,
    window: Range<usize>,
    full: CMat,
}

pub fn horocycle_map(rep: &TruncatedRep, t: f64) -> HorocycleMap {
    let (q, lambda) = rep.flow_eigen();
    let n = rep.dim();
    let qc = q.map(|x| C64::new(x, 0.0));
    let mut scaled = qc.clone();
    for (j, &l) in lambda.iter().enumerate() {
        let phase = C64::from_polar(1.0, t * l);
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    HorocycleMap {
        t,
        window: rep.window(),
        full: scaled * qc.transpose(),
    }
}

impl HorocycleMap {
    pub fn t(&self) -> f64 {
        self.t
    }

    /// The unitary matrix on the padded basis.
    pub fn full(&self) -> &CMat {
        &self.full
    }

    /// Square restriction to the unpadded window.
    pub fn window_block(&self) -> CMat {
        let w = self.window.clone();
        self.full
            .view((w.start, w.start), (w.len(), w.len()))
            .into_owned()
    }

    /// Images of the window basis vectors, as padded columns.
    pub fn on_window(&self) -> CMat {
        self.full
            .columns(self.window.start, self.window.len())
            .into_owned()
    }

    /// `(M - I)` applied to window vectors, with padded output.
    pub fn minus_identity_on_window(&self) -> CMat {
        let mut b = self.on_window();
        for (j, p) in self.window.clone().enumerate() {
            b[(p, j)] -= ONE;
        }
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    /// `max ||([X,U] - U) e_k||` over interior `k`.
    pub xu: f64,
    /// `max ||([X,V] + V) e_k||`.
    pub xv: f64,
    /// `max ||([U,V] - 2X) e_k||`.
    pub uv: f64,
    /// `max ||(Casimir - mu) e_k||`.
    pub casimir: f64,
}

impl BracketReport {
    pub fn max(&self) -> f64 {
        self.xu.max(self.xv).max(self.uv).max(self.casimir)
    }
}

pub fn bracket_report(rep: &TruncatedRep) -> BracketReport {
    bracket_residuals(rep.generators(), rep.mu(), rep.interior_mask())
}

/// Interior residuals of the sl(2,R) relations for arbitrary generator matrices.
pub fn bracket_residuals(g: &Generators, mu: f64, interior: &[bool]) -> BracketReport {
    let comm = |a: &CMat, b: &CMat| a * b - b * a;
    let two = C64::new(2.0, 0.0);
    let half = C64::new(0.5, 0.0);
    let xu = comm(&g.x, &g.u) - &g.u;
    let xv = comm(&g.x, &g.v) + &g.v;
    let uv = comm(&g.u, &g.v) - &g.x * two;
    let n = g.u.nrows();
    let casimir = -(&g.x * &g.x) - (&g.u * &g.v + &g.v * &g.u) * half
        - CMat::from_diagonal_element(n, n, C64::new(mu, 0.0));
    let worst = |m: &CMat| {
        interior
            .iter()
            .enumerate()
            .filter(|(_, &keep)| keep)
            .map(|(j, _)| m.column(j).norm())
            .fold(0.0, f64::max)
    };
    BracketReport {
        xu: worst(&xu),
        xv: worst(&xv),
        uv: worst(&uv),
        casimir: worst(&casimir),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn rep(mu: f64, k: usize, pad: usize) -> TruncatedRep {
        build_rep(RepParams::new(mu, k).with_pad(pad)).unwrap()
    }

    /// Scaling and squaring with a Taylor core.
    fn expm_oracle(a: &CMat) -> CMat {
        let norm = a.iter().map(|z| z.norm()).sum::<f64>();
        let mut s = 0;
        while norm / 2f64.powi(s) > 0.25 {
            s += 1;
        }
        let b = a / C64::new(2f64.powi(s), 0.0);
        let n = a.nrows();
        let mut term = CMat::identity(n, n);
        let mut sum = term.clone();
        for j in 1..30 {
            term = &term * &b / C64::new(j as f64, 0.0);
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn discrete_series_index_set_starts_at_lowest_weight() {
        let r = rep(-2.0, 8, 8);
        assert_eq!(r.series(), Series::Discrete { lowest: 2 });
        assert_eq!(r.indices()[0], 2);
        assert_eq!(*r.indices().last().unwrap(), 16);
        assert_eq!(r.window_indices(), &(2..=8).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn nu_vanishes_at_quarter() {
        let r = rep(0.25, 8, 8);
        assert_eq!(r.nu(), C64::new(0.0, 0.0));
        assert_eq!(r.series(), Series::Principal);
        let r = rep(5.0, 8, 8);
        assert!((r.nu() - C64::new(0.0, 19f64.sqrt())).norm() < 1e-14);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert_eq!(
            build_rep(RepParams::new(0.0, 8)).unwrap_err(),
            LabError::InvalidCasimir { mu: 0.0 }
        );
        assert!(matches!(
            build_rep(RepParams::new(-1.0, 8)),
            Err(LabError::InvalidCasimir { .. })
        ));
        assert_eq!(
            build_rep(RepParams::new(0.25, 3)).unwrap_err(),
            LabError::TruncationTooSmall { trunc: 3 }
        );
    }

    #[test]
    fn sobolev_examples() {
        let r = rep(0.25, 8, 8);
        let mut c = CVec::zeros(r.dim());
        let p = r.indices().iter().position(|&k| k == 2).unwrap();
        c[p] = ONE;
        assert!((r.sobolev_norm(&c, 1.0).unwrap() - 9.25f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.sobolev_norm(&CVec::zeros(r.dim()), 3.0).unwrap(), 0.0);
        let r5 = rep(5.0, 8, 8);
        let mut e0 = CVec::zeros(r5.window_dim());
        e0[8] = ONE;
        assert_eq!(r5.sobolev_norm(&e0, 0.0).unwrap(), 1.0);
        assert!(matches!(
            r5.sobolev_norm(&e0, -1.0),
            Err(LabError::NegativeOrderUnsupported { .. })
        ));
        assert!(matches!(
            r5.sobolev_norm(&CVec::zeros(3), 1.0),
            Err(LabError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn weight_generator_is_diagonal_and_monotone() {
        let r = rep(0.25, 8, 4);
        let w = &r.generators().w;
        for i in 0..r.dim() {
            for j in 0..r.dim() {
                if i != j {
                    assert_eq!(w[(i, j)], ZERO);
                }
            }
            assert_eq!(w[(i, i)].re, 0.0);
            if i > 0 {
                assert!(w[(i, i)].im > w[(i - 1, i - 1)].im);
            }
        }
    }

    #[test]
    fn brackets_hold_on_interior() {
        for mu in [0.25, 5.0, -2.0, 0.1, -6.0] {
            let r = rep(mu, 12, 12);
            let b = bracket_report(&r);
            assert!(b.max() < 1e-9, "mu={mu}: {b:?}");
        }
        let b = bracket_report(&rep(5.0, 8, 8));
        assert!(b.casimir < 1e-9);
    }

    #[test]
    fn zeroed_x_is_detected() {
        let r = rep(0.25, 8, 8);
        let mut g = r.generators().clone();
        g.x.fill(ZERO);
        let b = bracket_residuals(&g, r.mu(), r.interior_mask());
        let unorm = (0..r.dim())
            .filter(|&j| r.interior_mask()[j])
            .map(|j| r.generators().u.column(j).norm())
            .fold(0.0, f64::max);
        assert!((b.xu - unorm).abs() < 1e-9 * unorm);
    }

    #[test]
    fn horocycle_map_matches_taylor_oracle() {
        let r = rep(0.25, 16, 16);
        let m = horocycle_map(&r, 1.0);
        let oracle = expm_oracle(&r.generators().u);
        let p0 = r.indices().iter().position(|&k| k == 0).unwrap();
        let diff = (m.full().column(p0) - oracle.column(p0)).norm();
        assert!(diff < 1e-10, "{diff}");
        let all = crate::linalg::max_abs(&(m.full() - &oracle));
        assert!(all < 1e-10, "{all}");
    }

    #[test]
    fn time_zero_is_identity() {
        let r = rep(-2.0, 8, 8);
        let m = horocycle_map(&r, 0.0);
        let n = r.dim();
        assert!(crate::linalg::max_abs(&(m.full() - CMat::identity(n, n))) < 1e-13);
        assert_eq!(m.window_block().nrows(), r.window_dim());
    }

    #[test]
    fn group_law_on_padded_basis() {
        let r = rep(5.0, 8, 24);
        let a = horocycle_map(&r, 1.0);
        let b = horocycle_map(&r, -1.0);
        let c = horocycle_map(&r, 0.7);
        let d = horocycle_map(&r, 1.7);
        let n = r.dim();
        let w = r.window();
        let prod = a.full() * b.full() - CMat::identity(n, n);
        let block = prod.view((w.start, w.start), (w.len(), w.len()));
        assert!(block.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-8);
        assert!(crate::linalg::max_abs(&(a.full() * c.full() - d.full())) < 1e-8);
    }
}
