//! The cell complex of `V^max`, the set where the centroid vanishes.
//!
//! A cell is named by a [`Sentence`]: the oscillators grouped into words of
//! equal angle, listed counterclockwise from oscillator 0. Its dimension is
//! `#words − 3`. Homology is computed from the integer boundary matrices and
//! can be compared with the closed form in [`betti_formula`].

mod complex;
mod realize;
mod sentence;
mod snf;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use complex::{enumerate_cells, euler_characteristic, CellEntry, ChainComplex, SparseMatrix};
pub use realize::{normal_frame, realize_cell, vmax_membership, NormalFrame, ORDER_MARGIN};
pub use sentence::{valid_sentences, Sentence};
pub use snf::elementary_divisors;

use crate::Result;

/// Non-unit elementary divisors of `∂_{k+1}`, i.e. the torsion of `H_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Torsion {
    pub dim: usize,
    pub divisors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub m: usize,
    pub betti: Vec<usize>,
    /// Rank of `∂_k` at index `k − 1`.
    pub ranks: Vec<usize>,
    pub torsion: Vec<Torsion>,
}

impl BettiTable {
    pub fn euler_characteristic(&self) -> i64 {
        self.betti.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }
}

/// Integer homology of the complex. Verifies `∂∂ = 0` first.
pub fn homology_snf(c: &ChainComplex) -> Result<BettiTable> {
    c.check_boundary_squared()?;
    let counts = c.counts();
    let top = c.top_dimension();
    let mut ranks = Vec::with_capacity(top);
    let mut torsion = Vec::new();
    for k in 1..=top {
        let divisors = elementary_divisors(c.boundary(k).unwrap());
        ranks.push(divisors.len());
        let odd: Vec<String> = divisors.iter().filter(|d| **d != 1u32.into()).map(|d| alloc::format!("{d}")).collect();
        if !odd.is_empty() {
            torsion.push(Torsion { dim: k - 1, divisors: odd });
        }
    }
    let rank = |k: usize| if k == 0 || k > top { 0 } else { ranks[k - 1] };
    let betti = (0..=top).map(|k| counts[k] - rank(k) - rank(k + 1)).collect();
    Ok(BettiTable { m: c.m, betti, ranks, torsion })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Closed-form Betti numbers of `V^max`, with `d = ⌊(m − 1)/2⌋`.
pub fn betti_formula(m: usize, k: usize) -> u128 {
    let d = (m - 1) / 2;
    if k + 2 >= m {
        0
    } else if k + d + 1 >= m {
        binomial(m - 1, k + 2)
    } else if k + d + 2 == m {
        binomial(m - 1, k) + binomial(m - 1, k + 2)
    } else {
        binomial(m - 1, k)
    }
}
