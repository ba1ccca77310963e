//! Tensor products of two truncated models and the commuting pair of
//! horocycle maps acting on them.
//!
//! Tensor coefficients are stored as a matrix `c[(j, k)]` whose rows index the
//! left factor and whose columns index the right factor. Either side may live
//! on the unpadded window or on the padded basis; the side is read off from the
//! matrix shape. The explicit Kronecker form uses row-major vectorization
//! `j * ncols + k`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{log_weighted_norm, CMat, C64};
use crate::rep::{build_rep, check_order, horocycle_map, HorocycleMap, RepParams, Space, TruncatedRep};

/// Which generator of the Z^2 action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    Left,
    Right,
}

/// Base weight of the tensor Sobolev norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SobolevForm {
    /// `(1 + mu + 2j^2) + (1 + theta + 2k^2)`.
    #[default]
    Sum,
    /// `(1 + mu + 2j^2) * (1 + theta + 2k^2)`.
    Product,
}

#[derive(Debug, Clone)]
pub struct TensorRep {
    left: Arc<TruncatedRep>,
    right: Arc<TruncatedRep>,
    t: f64,
    s: f64,
    m1: HorocycleMap,
    m2: HorocycleMap,
}

pub fn build_tensor(left: RepParams, right: RepParams, t: f64, s: f64) -> Result<TensorRep> {
    let l = Arc::new(build_rep(left)?);
    let r = Arc::new(build_rep(right)?);
    Ok(TensorRep::from_reps(l, r, t, s))
}

impl TensorRep {
    pub fn from_reps(left: Arc<TruncatedRep>, right: Arc<TruncatedRep>, t: f64, s: f64) -> Self {
        let m1 = horocycle_map(&left, t);
        let m2 = horocycle_map(&right, s);
        TensorRep {
            left,
            right,
            t,
            s,
            m1,
            m2,
        }
    }

    pub fn left(&self) -> &Arc<TruncatedRep> {
        &self.left
    }

    pub fn right(&self) -> &Arc<TruncatedRep> {
        &self.right
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn m1(&self) -> &HorocycleMap {
        &self.m1
    }

    pub fn m2(&self) -> &HorocycleMap {
        &self.m2
    }

    pub fn rep(&self, which: Factor) -> &Arc<TruncatedRep> {
        match which {
            Factor::Left => &self.left,
            Factor::Right => &self.right,
        }
    }

    /// Dimension of the padded tensor coefficient space.
    pub fn dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }

    pub fn shape(&self, left: Space, right: Space) -> (usize, usize) {
        (self.left.space_dim(left), self.right.space_dim(right))
    }

    pub fn zeros(&self, left: Space, right: Space) -> CMat {
        let (a, b) = self.shape(left, right);
        CMat::zeros(a, b)
    }

    /// Spaces of a coefficient matrix, read off from its shape.
    pub fn spaces_of(&self, c: &CMat) -> Result<(Space, Space)> {
        let side = |rep: &TruncatedRep, len: usize| {
            rep.space_of(len).map_err(|_| LabError::DimensionMismatch {
                context: "tensor coefficient matrix",
                expected: rep.dim(),
                found: len,
            })
        };
        Ok((side(&self.left, c.nrows())?, side(&self.right, c.ncols())?))
    }

    fn map_block(map: &HorocycleMap, space: Space) -> CMat {
        match space {
            Space::Window => map.on_window(),
            Space::Padded => map.full().clone(),
        }
    }

    /// Pullback by `u_1`: the left horocycle map on the row index, padded output.
    pub fn pull1(&self, c: &CMat) -> Result<CMat> {
        let (l, _) = self.spaces_of(c)?;
        Ok(Self::map_block(&self.m1, l) * c)
    }

    /// Pullback by `u_2`: the right horocycle map on the column index, padded output.
    pub fn pull2(&self, c: &CMat) -> Result<CMat> {
        let (_, r) = self.spaces_of(c)?;
        Ok(c * Self::map_block(&self.m2, r).transpose())
    }

    pub fn pull(&self, which: Factor, c: &CMat) -> Result<CMat> {
        match which {
            Factor::Left => self.pull1(c),
            Factor::Right => self.pull2(c),
        }
    }

    /// `L_1 c = c o u_1 - c`; rows come out padded.
    pub fn l1(&self, c: &CMat) -> Result<CMat> {
        let mut out = self.pull1(c)?;
        let (l, _) = self.spaces_of(c)?;
        let off = offset(&self.left, l);
        for i in 0..c.nrows() {
            for j in 0..c.ncols() {
                out[(i + off, j)] -= c[(i, j)];
            }
        }
        Ok(out)
    }

    /// `L_2 c = c o u_2 - c`; columns come out padded.
    pub fn l2(&self, c: &CMat) -> Result<CMat> {
        let mut out = self.pull2(c)?;
        let (_, r) = self.spaces_of(c)?;
        let off = offset(&self.right, r);
        for i in 0..c.nrows() {
            for j in 0..c.ncols() {
                out[(i, j + off)] -= c[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn l(&self, which: Factor, c: &CMat) -> Result<CMat> {
        match which {
            Factor::Left => self.l1(c),
            Factor::Right => self.l2(c),
        }
    }

    /// Re-embeds `c` into the target spaces; window-to-padded zero-extends,
    /// padded-to-window truncates.
    pub fn embed(&self, c: &CMat, left: Space, right: Space) -> Result<CMat> {
        let (l, r) = self.spaces_of(c)?;
        let mut out = self.zeros(left, right);
        let lo = offset(&self.left, l) as isize - offset(&self.left, left) as isize;
        let ro = offset(&self.right, r) as isize - offset(&self.right, right) as isize;
        for i in 0..c.nrows() {
            let ti = i as isize + lo;
            if ti < 0 || ti as usize >= out.nrows() {
                continue;
            }
            for j in 0..c.ncols() {
                let tj = j as isize + ro;
                if tj < 0 || tj as usize >= out.ncols() {
                    continue;
                }
                out[(ti as usize, tj as usize)] = c[(i, j)];
            }
        }
        Ok(out)
    }

    /// Explicit matrix of `L_which` on the row-major vectorization of
    /// coefficients in `(left, right)` spaces.
    pub fn l_op(&self, which: Factor, left: Space, right: Space) -> CMat {
        let block = |rep: &TruncatedRep, map: &HorocycleMap, space: Space| {
            let mut b = Self::map_block(map, space);
            let off = offset(rep, space);
            for j in 0..b.ncols() {
                b[(j + off, j)] -= C64::new(1.0, 0.0);
            }
            b
        };
        let id = |n: usize| CMat::identity(n, n);
        match which {
            Factor::Left => block(&self.left, &self.m1, left).kronecker(&id(self.right.space_dim(right))),
            Factor::Right => id(self.left.space_dim(left)).kronecker(&block(&self.right, &self.m2, right)),
        }
    }

    fn log_weight(&self, form: SobolevForm, j: i64, k: i64) -> f64 {
        let a = self.left.weight(j);
        let b = self.right.weight(k);
        match form {
            SobolevForm::Sum => (a + b).ln(),
            SobolevForm::Product => a.ln() + b.ln(),
        }
    }

    pub fn log_sobolev_norm_with(&self, c: &CMat, r: f64, form: SobolevForm) -> Result<f64> {
        check_order(r)?;
        let (l, rs) = self.spaces_of(c)?;
        let li = self.left.space_indices(l);
        let ri = self.right.space_indices(rs);
        let terms = (0..c.nrows()).flat_map(|i| {
            (0..c.ncols()).map(move |j| (i, j))
        });
        Ok(log_weighted_norm(
            terms.map(|(i, j)| (c[(i, j)].norm(), self.log_weight(form, li[i], ri[j]))),
            r,
        ))
    }

    pub fn log_sobolev_norm(&self, c: &CMat, r: f64) -> Result<f64> {
        self.log_sobolev_norm_with(c, r, SobolevForm::Sum)
    }

    pub fn sobolev_norm(&self, c: &CMat, r: f64) -> Result<f64> {
        Ok(self.log_sobolev_norm(c, r)?.exp())
    }
}

pub fn tensor_sobolev_norm(t: &TensorRep, c: &CMat, r: f64) -> Result<f64> {
    t.sobolev_norm(c, r)
}

fn offset(rep: &TruncatedRep, space: Space) -> usize {
    match space {
        Space::Window => rep.window().start,
        Space::Padded => 0,
    }
}

/// Weighted l2 aggregate `sqrt(sum_i w_i n_i^2)`.
pub fn glue(norms: &[f64], weights: &[f64]) -> Result<f64> {
    if norms.len() != weights.len() {
        return Err(LabError::LengthMismatch {
            norms: norms.len(),
            weights: weights.len(),
        });
    }
    Ok(norms
        .iter()
        .zip(weights)
        .map(|(n, w)| w * n * n)
        .sum::<f64>()
        .sqrt())
}

/// A finite list of weighted components standing in for a direct integral.
#[derive(Debug, Clone)]
pub struct ComponentList {
    components: Vec<(TensorRep, f64)>,
    gap: f64,
}

impl ComponentList {
    pub fn new(components: Vec<(TensorRep, f64)>, gap: f64) -> Result<Self> {
        let sum: f64 = components.iter().map(|(_, w)| w).sum();
        if components.is_empty()
            || components.iter().any(|(_, w)| !(*w > 0.0))
            || (sum - 1.0).abs() > 1e-12
        {
            return Err(LabError::InvalidWeights { sum });
        }
        for (t, _) in &components {
            for mu in [t.left().mu(), t.right().mu()] {
                if mu > 0.0 && mu < gap {
                    return Err(LabError::GapViolation { mu, gap });
                }
            }
        }
        Ok(ComponentList { components, gap })
    }

    /// Three equally weighted components `(0.25, 0.25)`, `(5, 5)`, `(-2, 5)`.
    pub fn preset(trunc: usize, t: f64, s: f64) -> Result<Self> {
        let pairs = [(0.25, 0.25), (5.0, 5.0), (-2.0, 5.0)];
        let comps = pairs
            .iter()
            .map(|&(mu, theta)| {
                build_tensor(RepParams::new(mu, trunc), RepParams::new(theta, trunc), t, s)
                    .map(|tr| (tr, 1.0 / 3.0))
            })
            .collect::<Result<Vec<_>>>()?;
        let sum: f64 = comps.iter().map(|(_, w)| w).sum();
        let comps = comps.into_iter().map(|(tr, w)| (tr, w / sum)).collect();
        ComponentList::new(comps, 0.25)
    }

    pub fn components(&self) -> &[(TensorRep, f64)] {
        &self.components
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|(_, w)| *w).collect()
    }
}
