use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// A set of oscillator indices, stored as a bit mask. Indices are 0-based
/// and must be below 64.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Panics if an index is 64 or larger.
    pub fn from_indices(indices: &[usize]) -> Self {
        let mut bits = 0u64;
        for &i in indices {
            assert!(i < 64, "subset index {i} out of range");
            bits |= 1 << i;
        }
        Subset(bits)
    }

    /// Convenience for 1-based index lists as written in the literature.
    pub fn from_one_based(indices: &[usize]) -> Option<Self> {
        let mut bits = 0u64;
        for &i in indices {
            if i == 0 || i > 64 {
                return None;
            }
            bits |= 1 << (i - 1);
        }
        Some(Subset(bits))
    }

    /// `{0, .., n-1}`.
    pub fn prefix(n: usize) -> Self {
        if n >= 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn insert(self, i: usize) -> Self {
        Subset(self.0 | (1 << i))
    }

    pub fn remove(self, i: usize) -> Self {
        Subset(self.0 & !(1 << i))
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn complement(self, m: usize) -> Self {
        Subset(!self.0 & Subset::prefix(m).0)
    }

    /// Largest index plus one, or 0 for the empty set.
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `{0..m}` with exactly `k` elements, in increasing
    /// order of their bit masks.
    pub fn all_of_size(m: usize, k: usize) -> impl Iterator<Item = Subset> {
        assert!(m < 64);
        (0u64..(1u64 << m))
            .filter(move |b| b.count_ones() as usize == k)
            .map(Subset)
    }
}

impl From<Subset> for Vec<usize> {
    fn from(s: Subset) -> Self {
        s.to_vec()
    }
}

impl TryFrom<Vec<usize>> for Subset {
    type Error = &'static str;
    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        if v.iter().any(|&i| i >= 64) {
            return Err("subset index out of range");
        }
        Ok(Subset::from_indices(&v))
    }
}

/// Prints 1-based indices, `{1,2}`.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset{self}")
    }
}
