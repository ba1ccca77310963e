//! Small dense linear algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `ln sqrt(sum_i |c_i|^2 w_i^r)` given `ln w_i`, evaluated without overflow.
/// Returns `-inf` for a zero vector.
pub fn log_weighted_norm<I>(terms: I, r: f64) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let logs: Vec<f64> = terms
        .into_iter()
        .filter(|&(abs, _)| abs > 0.0)
        .map(|(abs, lnw)| 2.0 * abs.ln() + r * lnw)
        .collect();
    let Some(peak) = logs.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    let sum: f64 = logs.iter().map(|l| (l - peak).exp()).sum();
    0.5 * (peak + sum.ln())
}

/// Orthonormal basis of the orthogonal complement of the column span of `q`,
/// which must have orthonormal columns.
pub fn orthonormal_complement(q: &CMat) -> CMat {
    let (n, r) = q.shape();
    if r == 0 {
        return CMat::identity(n, n);
    }
    let mut square = CMat::zeros(n, n);
    square.columns_mut(0, r).copy_from(q);
    let full = square.qr().q();
    full.columns(r, n - r).into_owned()
}

/// Complex conjugate of every entry.
pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Embeds window coefficients into the padded basis at `offset`.
pub fn embed(v: &CVec, len: usize, offset: usize) -> CVec {
    let mut out = CVec::zeros(len);
    out.rows_mut(offset, v.len()).copy_from(v);
    out
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}
