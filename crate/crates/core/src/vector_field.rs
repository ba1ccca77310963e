//! Vector fields on the product, written in the coordinates
//! `h U + g X + f V` on each factor.
//!
//! A section carries six coefficient tensors in the slot order
//! `(h1, g1, f1, h3, g3, f3)`: the first three are the `(U, X, V)` coefficients
//! along the left factor, the last three along the right factor. The
//! generator `(e^{TU})_*` acts on a constant field by `Ad(e^{-TU})`, which in the
//! ordered basis `(U, X, V)` is an upper unipotent mixing matrix; on general
//! sections it is that mixing composed with the pullback of the coefficients.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cocycle::{solve_transfer, split, RatioRow, SplitResult, TransferSolution};
use crate::distributions::DistributionSet;
use crate::error::{LabError, Result};
use crate::linalg::{CMat, C64};
use crate::rep::Space;
use crate::tensor::{Factor, TensorRep};

pub const SLOT_NAMES: [&str; 6] = ["h1", "g1", "f1", "h3", "g3", "f3"];

/// `Ad(e^{-TU})` on `(U, X, V)` coefficients: `[[1, T, -T^2], [0, 1, -2T], [0, 0, 1]]`.
pub fn pushforward_matrix(t: f64) -> Matrix3<f64> {
    Matrix3::new(1.0, t, -t * t, 0.0, 1.0, -2.0 * t, 0.0, 0.0, 1.0)
}

/// Coefficient mixing used by the block coboundary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MixingConvention {
    /// The adjoint action, `pushforward_matrix`.
    #[default]
    Adjoint,
    /// `[[1, -2T, -T], [0, 1, T], [0, 0, 1]]`, the alternative reading whose
    /// unit-time value is `[[1, -2, -1], [0, 1, 1], [0, 0, 1]]`. It is linear in
    /// `T` and has no group law.
    Display,
}

impl MixingConvention {
    /// Strictly upper entries `(a, b, c)` of `[[1, a, b], [0, 1, c], [0, 0, 1]]`.
    fn entries<T>(&self, t: T) -> (T, T, T)
    where
        T: Clone + std::ops::Mul<Output = T> + std::ops::Neg<Output = T> + std::ops::Add<Output = T>,
    {
        let two = |x: T| x.clone() + x;
        match self {
            MixingConvention::Adjoint => (t.clone(), -(t.clone() * t.clone()), -two(t)),
            MixingConvention::Display => (-two(t.clone()), -t.clone(), t),
        }
    }

    pub fn matrix(&self, t: f64) -> Matrix3<f64> {
        let (a, b, c) = self.entries(t);
        Matrix3::new(1.0, a, b, 0.0, 1.0, c, 0.0, 0.0, 1.0)
    }
}

/// The sl(2,R) basis `(U, X, V)` as 2x2 matrices.
pub fn sl2_basis() -> [Matrix2<f64>; 3] {
    [
        Matrix2::new(0.0, 1.0, 0.0, 0.0),
        Matrix2::new(0.5, 0.0, 0.0, -0.5),
        Matrix2::new(0.0, 0.0, 1.0, 0.0),
    ]
}

/// Coordinates of a traceless 2x2 matrix in `(U, X, V)`.
pub fn sl2_coords(m: &Matrix2<f64>) -> Vector3<f64> {
    Vector3::new(m[(0, 1)], m[(0, 0)] - m[(1, 1)], m[(1, 0)])
}

/// Matrix of `ad_{-U}` on `(U, X, V)`, computed from 2x2 commutators.
pub fn ad_minus_u() -> Matrix3<f64> {
    let [u, x, v] = sl2_basis();
    let neg_u = -u;
    let mut ad = Matrix3::zeros();
    for (j, e) in [u, x, v].iter().enumerate() {
        ad.set_column(j, &sl2_coords(&(neg_u * e - e * neg_u)));
    }
    ad
}

/// `exp(ad)` for a nilpotent 3x3 matrix, by its terminating series.
pub fn exp_nilpotent(ad: &Matrix3<f64>) -> Matrix3<f64> {
    Matrix3::identity() + ad + ad * ad * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjointReport {
    /// Deviations of the Lie-series images of `(X, V, U)` from
    /// `(X + U, V - 2X - U, U)`.
    pub series: [f64; 3],
    /// The same through 2x2 conjugation `e^{-U} Y e^{U}`.
    pub conjugation: [f64; 3],
    /// Largest disagreement between the two routes.
    pub routes: f64,
    /// `|ad_{-U}(X) - U|`.
    pub ad_x: f64,
}

impl AdjointReport {
    pub fn max(&self) -> f64 {
        self.series
            .iter()
            .chain(self.conjugation.iter())
            .fold(self.routes.max(self.ad_x), |a, &b| a.max(b))
    }
}

pub fn adjoint_identities_check() -> AdjointReport {
    let [u, x, v] = sl2_basis();
    let expected = [x + u, v - x * 2.0 - u, u];
    let ad = ad_minus_u();
    let e = exp_nilpotent(&ad);
    let inputs = [x, v, u];
    let mut series = [0.0; 3];
    let mut conjugation = [0.0; 3];
    let mut routes: f64 = 0.0;
    let em = Matrix2::identity() - u;
    let ep = Matrix2::identity() + u;
    for i in 0..3 {
        let coords = e * sl2_coords(&inputs[i]);
        let via_series = u * coords[0] + x * coords[1] + v * coords[2];
        let via_conj = em * inputs[i] * ep;
        series[i] = (via_series - expected[i]).abs().max();
        conjugation[i] = (via_conj - expected[i]).abs().max();
        routes = routes.max((via_series - via_conj).abs().max());
    }
    let ad_x = (sl2_coords(&(-u * x + x * u)) - sl2_coords(&u)).abs().max();
    AdjointReport {
        series,
        conjugation,
        routes,
        ad_x,
    }
}

/// Six coefficient tensors in slot order `(h1, g1, f1, h3, g3, f3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VfSection {
    pub slots: [CMat; 6],
}

impl VfSection {
    pub fn zeros(t: &TensorRep, left: Space, right: Space) -> Self {
        VfSection {
            slots: std::array::from_fn(|_| t.zeros(left, right)),
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize) -> CMat) -> Self {
        VfSection {
            slots: std::array::from_fn(|i| f(i)),
        }
    }

    pub fn norm(&self) -> f64 {
        self.slots.iter().map(|s| s.norm_squared()).sum::<f64>().sqrt()
    }

    /// Tensor Sobolev norm of the six slots combined in l2, as a logarithm.
    pub fn log_sobolev_norm(&self, t: &TensorRep, r: f64) -> Result<f64> {
        let logs = self
            .slots
            .iter()
            .map(|s| t.log_sobolev_norm(s, r))
            .collect::<Result<Vec<_>>>()?;
        let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return Ok(peak);
        }
        let sum: f64 = logs.iter().map(|l| (2.0 * (l - peak)).exp()).sum();
        Ok(peak + 0.5 * sum.ln())
    }

    pub fn sub(&self, other: &VfSection) -> Result<VfSection> {
        let mut out = self.clone();
        for i in 0..6 {
            if out.slots[i].shape() != other.slots[i].shape() {
                return Err(LabError::DimensionMismatch {
                    context: "section slot",
                    expected: out.slots[i].len(),
                    found: other.slots[i].len(),
                });
            }
            out.slots[i] -= &other.slots[i];
        }
        Ok(out)
    }

    pub fn add(&self, other: &VfSection) -> Result<VfSection> {
        let neg = VfSection::from_fn(|i| -&other.slots[i]);
        self.sub(&neg)
    }

    pub fn embed(&self, t: &TensorRep, left: Space, right: Space) -> Result<VfSection> {
        let slots = self
            .slots
            .iter()
            .map(|s| t.embed(s, left, right))
            .collect::<Result<Vec<_>>>()?;
        Ok(VfSection {
            slots: slots.try_into().expect("six slots"),
        })
    }
}

/// `(e^{T U_which})_* H - H` on a section.
pub fn bbl_apply(t: &TensorRep, which: Factor, h: &VfSection, conv: MixingConvention) -> Result<VfSection> {
    let (mixed, plain) = match which {
        Factor::Left => (0..3, 3..6),
        Factor::Right => (3..6, 0..3),
    };
    let time = match which {
        Factor::Left => t.t(),
        Factor::Right => t.s(),
    };
    let a = conv.matrix(time);
    let mut out: Vec<Option<CMat>> = vec![None; 6];
    for i in plain {
        out[i] = Some(t.l(which, &h.slots[i])?);
    }
    let base = mixed.start;
    for i in 0..3 {
        let mut l = t.l(which, &h.slots[base + i])?;
        for j in (i + 1)..3 {
            let c = a[(i, j)];
            if c != 0.0 {
                l += t.pull(which, &h.slots[base + j])? * C64::new(c, 0.0);
            }
        }
        out[base + i] = Some(l);
    }
    Ok(VfSection {
        slots: std::array::from_fn(|i| out[i].take().expect("filled")),
    })
}

/// Explicit block matrix of `bbl_apply` on the row-major vectorization of the
/// six slots, each in `(left, right)` spaces.
pub fn bbl_op(t: &TensorRep, which: Factor, left: Space, right: Space, conv: MixingConvention) -> CMat {
    let l = t.l_op(which, left, right);
    let (pl, pr) = match which {
        Factor::Left => (Space::Padded, right),
        Factor::Right => (left, Space::Padded),
    };
    let (rows, cols) = t.shape(left, right);
    let (_, out_cols) = t.shape(pl, pr);
    let mut pulled = CMat::zeros(l.nrows(), rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut unit = t.zeros(left, right);
            unit[(i, j)] = C64::new(1.0, 0.0);
            let image = t.pull(which, &unit).expect("consistent spaces");
            for a in 0..image.nrows() {
                for b in 0..out_cols {
                    pulled[(a * out_cols + b, i * cols + j)] = image[(a, b)];
                }
            }
        }
    }
    let (nr, nc) = l.shape();
    let mut out = CMat::zeros(6 * nr, 6 * nc);
    let time = match which {
        Factor::Left => t.t(),
        Factor::Right => t.s(),
    };
    let a = conv.matrix(time);
    let mixed = match which {
        Factor::Left => 0,
        Factor::Right => 3,
    };
    for i in 0..6 {
        out.view_mut((i * nr, i * nc), (nr, nc)).copy_from(&l);
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            if a[(i, j)] != 0.0 {
                out.view_mut(((mixed + i) * nr, (mixed + j) * nc), (nr, nc))
                    .copy_from(&(&pulled * C64::new(a[(i, j)], 0.0)));
            }
        }
    }
    out
}

/// `||L2 beta1 - L1 beta2||` for sections.
pub fn delta_v2_check(t: &TensorRep, beta1: &VfSection, beta2: &VfSection, conv: MixingConvention) -> Result<f64> {
    let a = bbl_apply(t, Factor::Right, beta1, conv)?.embed(t, Space::Padded, Space::Padded)?;
    let b = bbl_apply(t, Factor::Left, beta2, conv)?.embed(t, Space::Padded, Space::Padded)?;
    Ok(a.sub(&b)?.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CascadeMode {
    /// Each stage uses the splitting solver; never obstructs.
    #[default]
    Split,
    /// Each stage must be an exact cocycle pair and uses the transfer solver.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub factor: u8,
    pub stage: u8,
    pub coordinate: String,
    pub phi_norm: f64,
    pub residual_f: f64,
    pub residual_g: f64,
    pub ratios: Vec<RatioRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub stages: Vec<StageReport>,
    /// `||L2 F - L1 Y||`.
    pub phi_norm: f64,
    /// `||F - (L1 H + F~)||`, zero up to rounding by construction.
    pub reconstruction_f: f64,
    pub reconstruction_y: f64,
    pub ratios: Vec<RatioRow>,
}

#[derive(Debug, Clone)]
pub struct CascadeResult {
    pub h: VfSection,
    pub f_tilde: VfSection,
    pub y_tilde: VfSection,
    pub report: CascadeReport,
}

/// Order of `||Phi||` in the cascade estimate for target order `r`.
pub fn cascade_order(r: f64) -> f64 {
    27.0 * r + 130.0
}

enum StageOutcome {
    Split(SplitResult),
    Exact(TransferSolution),
}

impl StageOutcome {
    fn p(&self) -> &CMat {
        match self {
            StageOutcome::Split(s) => &s.p,
            StageOutcome::Exact(s) => &s.p,
        }
    }
}

/// Splits `(F, Y)` into `(L1 H, L2 H)` plus residuals, one factor and one
/// coordinate at a time. `F` slots have padded rows and window columns, `Y`
/// slots window rows and padded columns.
pub fn cascade_split(t: &TensorRep, f: &VfSection, y: &VfSection, ds_left: &DistributionSet) -> Result<CascadeResult> {
    cascade(t, f, y, ds_left, CascadeMode::Split, MixingConvention::Adjoint, &crate::cocycle::DEFAULT_ORDERS)
}

pub fn cascade(
    t: &TensorRep,
    f: &VfSection,
    y: &VfSection,
    ds_left: &DistributionSet,
    mode: CascadeMode,
    conv: MixingConvention,
    orders: &[f64],
) -> Result<CascadeResult> {
    let run = |factor: u8, stage: u8, a: &CMat, b: &CMat| -> Result<(StageOutcome, StageReport)> {
        let coordinate = SLOT_NAMES[(factor as usize - 1) * 3 + (3 - stage as usize)];
        let wrap = |e: LabError| LabError::StageObstruction {
            factor,
            stage,
            coordinate,
            source: Box::new(e),
        };
        let phi_norm = (t.l2(a).map_err(wrap)? - t.l1(b).map_err(wrap)?).norm();
        let (outcome, residual_f, residual_g, ratios) = match mode {
            CascadeMode::Split => {
                let s = split(t, a, b, ds_left).map_err(wrap)?;
                let (rf, rg) = (s.f_res.norm(), s.g_res.norm());
                let ratios = s.report.clone();
                (StageOutcome::Split(s), rf, rg, ratios)
            }
            CascadeMode::Strict => {
                let s = solve_transfer(t, a, b, ds_left).map_err(wrap)?;
                let (rf, rg) = (s.residual1, s.residual2);
                let ratios = s.ratio_table.clone();
                (StageOutcome::Exact(s), rf, rg, ratios)
            }
        };
        Ok((
            outcome,
            StageReport {
                factor,
                stage,
                coordinate: coordinate.to_string(),
                phi_norm,
                residual_f,
                residual_g,
                ratios,
            },
        ))
    };
    let cplx = |x: f64| C64::new(x, 0.0);
    let mut stages = Vec::new();

    // Left factor: L1 mixes, L2 is diagonal.
    let (a1, b1, c1) = conv.entries(t.t());
    let (s1, r1) = run(1, 1, &f.slots[2], &y.slots[2])?;
    let p = s1.p().clone();
    stages.push(r1);
    let g_rhs = &f.slots[1] - t.pull1(&p)? * cplx(c1);
    let (s2, r2) = run(1, 2, &g_rhs, &y.slots[1])?;
    let q = s2.p().clone();
    stages.push(r2);
    let h_rhs = &f.slots[0] - t.pull1(&q)? * cplx(a1) - t.pull1(&p)? * cplx(b1);
    let (s3, r3) = run(1, 3, &h_rhs, &y.slots[0])?;
    let r = s3.p().clone();
    stages.push(r3);

    // Right factor: L2 mixes, L1 is diagonal.
    let (a2, b2, c2) = conv.entries(t.s());
    let (s4, r4) = run(2, 1, &f.slots[5], &y.slots[5])?;
    let cc = s4.p().clone();
    stages.push(r4);
    let g4 = &y.slots[4] - t.pull2(&cc)? * cplx(c2);
    let (s5, r5) = run(2, 2, &f.slots[4], &g4)?;
    let bb = s5.p().clone();
    stages.push(r5);
    let h4 = &y.slots[3] - t.pull2(&bb)? * cplx(a2) - t.pull2(&cc)? * cplx(b2);
    let (s6, r6) = run(2, 3, &f.slots[3], &h4)?;
    let aa = s6.p().clone();
    stages.push(r6);

    let h = VfSection {
        slots: [r, q, p, aa, bb, cc],
    };
    let lf = bbl_apply(t, Factor::Left, &h, conv)?;
    let ly = bbl_apply(t, Factor::Right, &h, conv)?;
    let f_tilde = f.sub(&lf)?;
    let y_tilde = y.sub(&ly)?;
    let reconstruction_f = f.sub(&lf.add(&f_tilde)?)?.norm();
    let reconstruction_y = y.sub(&ly.add(&y_tilde)?)?.norm();

    let phi = bbl_apply(t, Factor::Right, f, conv)?
        .embed(t, Space::Padded, Space::Padded)?
        .sub(&bbl_apply(t, Factor::Left, y, conv)?.embed(t, Space::Padded, Space::Padded)?)?;
    let mut ratios = Vec::new();
    for &r in orders {
        let s = cascade_order(r);
        let lphi = phi.log_sobolev_norm(t, s)?;
        ratios.push(RatioRow::from_logs("F~/Phi", r, r, s, f_tilde.log_sobolev_norm(t, r)?, lphi));
        ratios.push(RatioRow::from_logs("Y~/Phi", r, r, s, y_tilde.log_sobolev_norm(t, r)?, lphi));
        ratios.push(RatioRow::from_logs("H/F", r, r, s, h.log_sobolev_norm(t, r)?, f.log_sobolev_norm(t, s)?));
    }
    Ok(CascadeResult {
        h,
        f_tilde,
        y_tilde,
        report: CascadeReport {
            stages,
            phi_norm: phi.norm(),
            reconstruction_f,
            reconstruction_y,
            ratios,
        },
    })
}

type Q = Ratio<i64>;

fn q(n: i64) -> Q {
    Ratio::from_integer(n)
}

/// Reduced row echelon form; returns pivot columns.
fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c];
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row) {
                    *x -= factor * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

fn nullspace(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![q(0); cols];
            v[fc] = q(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][fc];
            }
            v
        })
        .collect()
}

/// Canonical basis of the span of `vectors` (rows of their RREF).
fn canonical_span(vectors: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut a = vectors.to_vec();
    let pivots = rref(&mut a);
    a.truncate(pivots.len());
    a
}

fn exact_mixing(conv: MixingConvention, t: Q) -> [[Q; 3]; 3] {
    let (a, b, c) = conv.entries(t);
    let (o, z) = (Q::one(), Q::zero());
    [[o, a, b], [z, o, c], [z, z, o]]
}

pub const CONST_SLOT_NAMES: [&str; 12] = [
    "F:U1", "F:X1", "F:V1", "F:U2", "F:X2", "F:V2", "Y:U1", "Y:X1", "Y:V1", "Y:U2", "Y:X2", "Y:V2",
];

/// Twelve constant coefficients `(F, Y)`, each in `(U1, X1, V1, U2, X2, V2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstVf(pub [f64; 12]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstCohomology {
    pub convention: MixingConvention,
    pub t: String,
    pub s: String,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub dim: usize,
    /// Coboundaries are cocycles, checked exactly.
    pub exact_complex: bool,
    pub cocycle_basis: Vec<ConstVf>,
    pub coboundary_basis: Vec<ConstVf>,
    pub quotient_basis: Vec<ConstVf>,
    /// Slot name of each quotient vector when it is a coordinate direction.
    pub quotient_labels: Vec<Option<String>>,
}

/// Constant-coefficient cohomology at unit times with the adjoint convention.
pub fn constant_cohomology() -> ConstCohomology {
    constant_cohomology_with(MixingConvention::Adjoint, q(1), q(1))
}

/// Exact computation over the rationals. On constants every pullback is the
/// identity, so only the nilpotent part of the mixing survives.
pub fn constant_cohomology_with(conv: MixingConvention, t: Q, s: Q) -> ConstCohomology {
    let a1 = exact_mixing(conv, t);
    let a2 = exact_mixing(conv, s);
    let nil = |a: &[[Q; 3]; 3], i: usize, j: usize| if i == j { a[i][j] - q(1) } else { a[i][j] };

    // Phi = L2 F - L1 Y: first factor -(A1 - I) Y1, second factor (A2 - I) F2.
    let mut cocycle_map = vec![vec![q(0); 12]; 6];
    for i in 0..3 {
        for j in 0..3 {
            cocycle_map[i][6 + j] = -nil(&a1, i, j);
            cocycle_map[3 + i][3 + j] = nil(&a2, i, j);
        }
    }
    // H = (s1, s2) -> F = ((A1 - I) s1, 0), Y = (0, (A2 - I) s2).
    let mut coboundary_map = vec![vec![q(0); 6]; 12];
    for i in 0..3 {
        for j in 0..3 {
            coboundary_map[i][j] = nil(&a1, i, j);
            coboundary_map[9 + i][3 + j] = nil(&a2, i, j);
        }
    }

    let cocycles = nullspace(&cocycle_map, 12);
    let image_cols: Vec<Vec<Q>> = (0..6).map(|j| (0..12).map(|i| coboundary_map[i][j]).collect()).collect();
    let coboundaries = canonical_span(&image_cols);

    let exact_complex = coboundaries.iter().all(|v| {
        cocycle_map
            .iter()
            .all(|row| row.iter().zip(v).fold(q(0), |acc, (a, b)| acc + a * b).is_zero())
    });

    // Cocycles orthogonal to every coboundary.
    let gram: Vec<Vec<Q>> = coboundaries
        .iter()
        .map(|b| {
            cocycles
                .iter()
                .map(|z| b.iter().zip(z).fold(q(0), |acc, (x, y)| acc + x * y))
                .collect()
        })
        .collect();
    let coeffs = if gram.is_empty() {
        (0..cocycles.len())
            .map(|i| (0..cocycles.len()).map(|j| q((i == j) as i64)).collect())
            .collect()
    } else {
        nullspace(&gram, cocycles.len())
    };
    let complement: Vec<Vec<Q>> = coeffs
        .iter()
        .map(|c| {
            (0..12)
                .map(|k| c.iter().zip(&cocycles).fold(q(0), |acc, (a, z)| acc + a * z[k]))
                .collect()
        })
        .collect();
    let quotient = canonical_span(&complement);

    let to_f64 = |v: &Vec<Q>| {
        ConstVf(std::array::from_fn(|i| *v[i].numer() as f64 / *v[i].denom() as f64))
    };
    let label = |v: &Vec<Q>| {
        let nz: Vec<usize> = (0..12).filter(|&i| !v[i].is_zero()).collect();
        (nz.len() == 1).then(|| CONST_SLOT_NAMES[nz[0]].to_string())
    };
    let cocycle_basis = canonical_span(&cocycles);
    ConstCohomology {
        convention: conv,
        t: t.to_string(),
        s: s.to_string(),
        cocycle_dim: cocycle_basis.len(),
        coboundary_dim: coboundaries.len(),
        dim: cocycle_basis.len() - coboundaries.len(),
        exact_complex,
        cocycle_basis: cocycle_basis.iter().map(to_f64).collect(),
        coboundary_basis: coboundaries.iter().map(to_f64).collect(),
        quotient_labels: quotient.iter().map(label).collect(),
        quotient_basis: quotient.iter().map(to_f64).collect(),
    }
}
