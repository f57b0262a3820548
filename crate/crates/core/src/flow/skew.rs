//! Reduction to skew subtori: when the oscillators are grouped into blocks
//! of equal angles, the flow restricts to the block representatives.

use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, sin};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::ode::VectorField;
use crate::{Error, Result, Subset};

/// Disjoint blocks covering `{0..m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    m: usize,
    blocks: Vec<Subset>,
}

impl Partition {
    pub fn new(m: usize, blocks: Vec<Subset>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::InvalidArgument("a partition needs at least two blocks".into()));
        }
        let mut seen = Subset::EMPTY;
        for b in &blocks {
            if b.is_empty() || b.bits() & seen.bits() != 0 {
                return Err(Error::InvalidArgument("blocks must be non-empty and disjoint".into()));
            }
            seen = Subset::from_bits(seen.bits() | b.bits());
        }
        if seen != Subset::prefix(m) {
            return Err(Error::InvalidArgument(alloc::format!("blocks must cover all {m} oscillators")));
        }
        Ok(Partition { m, blocks })
    }

    /// Partition from consecutive block sizes, e.g. `[1, 1, 5]`.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let mut start = 0;
        let mut blocks = Vec::new();
        for &n in sizes {
            blocks.push(Subset::from_bits(Subset::prefix(start + n).bits() & !Subset::prefix(start).bits()));
            start += n;
        }
        Partition::new(start, blocks)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Ambient point with every member of block k at `alpha[k]`.
    pub fn embed(&self, alpha: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (b, &a) in self.blocks.iter().zip(alpha) {
            for i in b.iter() {
                out[i] = a;
            }
        }
        out
    }

    /// Block representatives (the first member of each block).
    pub fn restrict(&self, theta: &[f64]) -> Vec<f64> {
        self.blocks.iter().map(|b| theta[b.iter().next().expect("non-empty")]).collect()
    }
}

/// The induced field on the block representatives,
/// `α̇_k = Σ_l n_l sin(α_l − α_k)`, and its quotient version with the last
/// block pinned at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewField {
    sizes: Vec<f64>,
}

impl SkewField {
    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn blocks(&self) -> usize {
        self.sizes.len()
    }

    /// Field on 𝕋^r.
    pub fn ambient(&self, alpha: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let ak = alpha[k];
            *o = alpha.iter().zip(&self.sizes).map(|(&al, &n)| n * sin(al - ak)).sum();
        }
    }

    /// Field on 𝕋^{r−1}: representatives relative to the last block.
    pub fn quotient(&self, x: &[f64], out: &mut [f64]) {
        let mut full = x.to_vec();
        full.push(0.0);
        let mut amb = vec![0.0; full.len()];
        self.ambient(&full, &mut amb);
        let last = amb[amb.len() - 1];
        for (o, &a) in out.iter_mut().zip(&amb) {
            *o = a - last;
        }
    }

    /// Jacobian of [`SkewField::quotient`].
    pub fn quotient_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let r = self.sizes.len();
        let mut full = x.to_vec();
        full.push(0.0);
        // d/dα_j of A_k = Σ_l n_l sin(α_l − α_k), for k, j over all blocks.
        let da = |k: usize, j: usize| -> f64 {
            if j == k {
                -(0..r).filter(|&l| l != k).map(|l| self.sizes[l] * cos(full[l] - full[k])).sum::<f64>()
            } else {
                self.sizes[j] * cos(full[j] - full[k])
            }
        };
        DMatrix::from_fn(r - 1, r - 1, |k, j| da(k, j) - da(r - 1, j))
    }

    pub fn as_quotient_field(&self) -> QuotientSkew<'_> {
        QuotientSkew(self)
    }
}

/// [`SkewField::quotient`] as a [`VectorField`].
pub struct QuotientSkew<'a>(&'a SkewField);

impl VectorField for QuotientSkew<'_> {
    fn dim(&self) -> usize {
        self.0.sizes.len() - 1
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        self.0.quotient(x, out)
    }
}

impl VectorField for SkewField {
    fn dim(&self) -> usize {
        self.sizes.len()
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        self.ambient(x, out)
    }
}

pub fn skew_reduce(partition: &Partition, params: &ModelParams) -> Result<SkewField> {
    if !params.is_standard() || params.m != partition.m {
        return Err(Error::InvalidArgument("skew reduction needs the standard model on the same m".into()));
    }
    Ok(SkewField { sizes: partition.sizes().into_iter().map(|n| n as f64).collect() })
}
