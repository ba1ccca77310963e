//! Seeded smooth test functions.
//!
//! Each coefficient is drawn from its own generator keyed by
//! `(seed, stream, j, k)`, so refining the truncation only appends tail
//! coefficients and leaves the existing ones unchanged.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{CMat, CVec, C64};
use crate::rep::{Space, TruncatedRep};
use crate::tensor::TensorRep;

/// Decay profile applied to the Gaussian coefficients, in terms of
/// `rho = 1 + j^2 + k^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    /// `exp(-rate * sqrt(rho))`.
    Exponential { rate: f64 },
    /// `rho^(-power)`.
    Polynomial { power: f64 },
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope::Exponential { rate: 1.0 }
    }
}

impl Envelope {
    pub fn value(&self, j: i64, k: i64) -> f64 {
        let rho = 1.0 + (j * j + k * k) as f64;
        match *self {
            Envelope::Exponential { rate } => (-rate * rho.sqrt()).exp(),
            Envelope::Polynomial { power } => rho.powf(-power),
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Standard complex Gaussian keyed by its coordinates.
pub fn keyed_gaussian(seed: u64, stream: u64, j: i64, k: i64) -> C64 {
    let mut h = splitmix(seed);
    for part in [stream, j as u64, k as u64] {
        h = splitmix(h ^ part);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    let re: f64 = StandardNormal.sample(&mut rng);
    let im: f64 = StandardNormal.sample(&mut rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctions {
    pub seed: u64,
    pub envelope: Envelope,
}

impl TestFunctions {
    pub fn new(seed: u64) -> Self {
        TestFunctions {
            seed,
            envelope: Envelope::default(),
        }
    }

    pub fn with_envelope(self, envelope: Envelope) -> Self {
        TestFunctions { envelope, ..self }
    }

    pub fn vector(&self, rep: &TruncatedRep, space: Space, stream: u64) -> CVec {
        let idx = rep.space_indices(space);
        CVec::from_iterator(
            idx.len(),
            idx.iter()
                .map(|&j| keyed_gaussian(self.seed, stream, j, 0) * self.envelope.value(j, 0)),
        )
    }

    pub fn field(&self, t: &TensorRep, left: Space, right: Space, stream: u64) -> CMat {
        let li = t.left().space_indices(left);
        let ri = t.right().space_indices(right);
        CMat::from_fn(li.len(), ri.len(), |a, b| {
            let (j, k) = (li[a], ri[b]);
            keyed_gaussian(self.seed, stream, j, k) * self.envelope.value(j, k)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{build_rep, RepParams};

    #[test]
    fn coefficients_are_keyed_by_index() {
        let a = build_rep(RepParams::new(0.25, 8)).unwrap();
        let b = build_rep(RepParams::new(0.25, 16)).unwrap();
        let gen = TestFunctions::new(11);
        let va = gen.vector(&a, Space::Window, 0);
        let vb = gen.vector(&b, Space::Window, 0);
        for (p, &k) in a.window_indices().iter().enumerate() {
            let q = b.window_indices().iter().position(|&x| x == k).unwrap();
            assert_eq!(va[p], vb[q]);
        }
        assert_ne!(gen.vector(&a, Space::Window, 1), va);
        assert_ne!(TestFunctions::new(12).vector(&a, Space::Window, 0), va);
    }

    #[test]
    fn envelopes_decay() {
        let e = Envelope::Exponential { rate: 1.0 };
        assert!((e.value(0, 0) - (-1.0f64).exp()).abs() < 1e-15);
        let p = Envelope::Polynomial { power: 4.0 };
        assert!((p.value(1, 1) - 3f64.powi(-4)).abs() < 1e-15);
        assert!(e.value(5, 0) < e.value(4, 0));
    }
}
