use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::sentence::{valid_sentences, Sentence};
use crate::{Error, Result};

/// Integer matrix stored by columns; each column is sorted by row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, columns: alloc::vec![Vec::new(); cols] }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.columns[col].binary_search_by_key(&row, |e| e.0).map_or(0, |i| self.columns[col][i].1)
    }

    /// `self · other`, or `None` on `i64` overflow.
    pub fn mul(&self, other: &SparseMatrix) -> Option<SparseMatrix> {
        assert_eq!(self.cols, other.rows);
        let mut columns = Vec::with_capacity(other.cols);
        for col in &other.columns {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(k, b) in col {
                for &(i, a) in &self.columns[k] {
                    let e = acc.entry(i).or_insert(0);
                    *e = e.checked_add(a.checked_mul(b)?)?;
                }
            }
            columns.push(acc.into_iter().filter(|e| e.1 != 0).collect());
        }
        Some(SparseMatrix { rows: self.rows, cols: other.cols, columns })
    }
}

/// The cellular chain complex of `V^max` for `m` oscillators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    pub m: usize,
    /// Canonical valid sentences, indexed by dimension.
    pub cells_by_dim: Vec<Vec<Sentence>>,
    /// `boundary_matrices[k − 1]` is `∂_k : C_k → C_{k−1}`.
    pub boundary_matrices: Vec<SparseMatrix>,
}

/// One cell and its signed border, for export.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellEntry {
    pub label: String,
    pub dimension: usize,
    pub border: Vec<(i64, String)>,
}

/// Every valid canonical sentence grouped by dimension, with the boundary
/// matrices from [`Sentence::border`].
pub fn enumerate_cells(m: usize) -> Result<ChainComplex> {
    if m < 3 {
        return Err(Error::TooFewOscillators { min: 3, got: m });
    }
    if m > 26 {
        return Err(Error::InvalidArgument("sentences use one letter per oscillator; m <= 26".into()));
    }
    let top = m.saturating_sub(3);
    let mut cells_by_dim: Vec<Vec<Sentence>> = alloc::vec![Vec::new(); top + 1];
    for s in valid_sentences(m) {
        cells_by_dim[s.dimension()].push(s);
    }
    for cells in &mut cells_by_dim {
        cells.sort();
    }
    let mut boundary_matrices = Vec::with_capacity(top);
    for k in 1..=top {
        let index: BTreeMap<&Sentence, usize> = cells_by_dim[k - 1].iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut mat = SparseMatrix::zero(cells_by_dim[k - 1].len(), cells_by_dim[k].len());
        for (j, s) in cells_by_dim[k].iter().enumerate() {
            let mut col: Vec<(usize, i64)> = s
                .border()?
                .into_iter()
                .map(|(sign, face)| {
                    let i = *index.get(&face).ok_or_else(|| Error::InvalidSentence(alloc::format!("face {face} of {s} is not a cell")))?;
                    Ok((i, sign))
                })
                .collect::<Result<_>>()?;
            col.sort_unstable();
            mat.columns[j] = col;
        }
        boundary_matrices.push(mat);
    }
    Ok(ChainComplex { m, cells_by_dim, boundary_matrices })
}

impl ChainComplex {
    /// Top cell dimension.
    pub fn top_dimension(&self) -> usize {
        self.cells_by_dim.len() - 1
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells_by_dim.iter().map(Vec::len).collect()
    }

    /// `∂_k`, for `1 <= k <= top`.
    pub fn boundary(&self, k: usize) -> Option<&SparseMatrix> {
        k.checked_sub(1).and_then(|i| self.boundary_matrices.get(i))
    }

    /// Checks `∂_{k−1} ∘ ∂_k = 0` for every `k`.
    pub fn check_boundary_squared(&self) -> Result<()> {
        for k in 2..=self.top_dimension() {
            let prod = self.boundary(k - 1).unwrap().mul(self.boundary(k).unwrap());
            if prod.map_or(true, |p| p.nnz() != 0) {
                return Err(Error::BoundaryNotZero { dim: k });
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts().iter().enumerate().map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    pub fn entries(&self) -> Vec<CellEntry> {
        let mut out = Vec::new();
        for (k, cells) in self.cells_by_dim.iter().enumerate() {
            for (j, s) in cells.iter().enumerate() {
                let border = match self.boundary(k) {
                    Some(b) => b.columns[j].iter().map(|&(i, c)| (c, alloc::format!("{}", self.cells_by_dim[k - 1][i]))).collect(),
                    None => Vec::new(),
                };
                out.push(CellEntry { label: alloc::format!("{s}"), dimension: k, border });
            }
        }
        out
    }
}

pub fn euler_characteristic(c: &ChainComplex) -> i64 {
    c.euler_characteristic()
}
