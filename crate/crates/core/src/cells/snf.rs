//! Ranks and elementary divisors of integer matrices.
//!
//! Boundary matrices of the cell complex are large, sparse, and have unit
//! entries, so most of the work is unit-pivot elimination in `i64`. Whatever
//! remains after no unit pivot is left (or after an overflow) goes through a
//! dense Smith normal form over arbitrary-precision integers.

use alloc::collections::BinaryHeap;
use core::cmp::Reverse;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::complex::SparseMatrix;

/// Nonzero elementary divisors `d_1 | d_2 | …`; the rank is their count.
pub fn elementary_divisors(a: &SparseMatrix) -> Vec<BigUint> {
    let mut w = Work::new(a);
    let units = w.eliminate();
    let mut out: Vec<BigUint> = (0..units).map(|_| BigUint::one()).collect();
    out.extend(dense_snf(w.remainder()));
    out
}

struct Work {
    cols: Vec<Vec<(usize, i64)>>,
    /// Column indices present in each row, unordered.
    rows: Vec<Vec<usize>>,
}

type Heap = BinaryHeap<Reverse<(usize, usize)>>;

impl Work {
    fn new(a: &SparseMatrix) -> Self {
        let mut rows = alloc::vec![Vec::new(); a.rows];
        for (c, col) in a.columns.iter().enumerate() {
            for &(r, _) in col {
                rows[r].push(c);
            }
        }
        Work { cols: a.columns.clone(), rows }
    }

    fn value(&self, r: usize, c: usize) -> i64 {
        let col = &self.cols[c];
        col[col.binary_search_by_key(&r, |e| e.0).unwrap()].1
    }

    /// Best unit pivot in column `c` as `(cost, row, value)`.
    fn in_column(&self, c: usize) -> Option<(usize, usize, i64)> {
        let lc = self.cols[c].len() - 1;
        self.cols[c].iter().filter(|e| e.1.abs() == 1).map(|&(r, u)| (lc * (self.rows[r].len() - 1), r, u)).min()
    }

    /// Best unit pivot in row `r` as `(cost, column, value)`.
    fn in_row(&self, r: usize) -> Option<(usize, usize, i64)> {
        let lr = self.rows[r].len() - 1;
        self.rows[r]
            .iter()
            .map(|&c| (c, self.value(r, c)))
            .filter(|e| e.1.abs() == 1)
            .map(|(c, u)| (lr * (self.cols[c].len() - 1), c, u))
            .min()
    }

    /// Pops stale entries and returns the shortest live line.
    fn top(heap: &mut Heap, len: impl Fn(usize) -> usize) -> Option<usize> {
        while let Some(&Reverse((l, i))) = heap.peek() {
            if l != 0 && len(i) == l {
                return Some(i);
            }
            heap.pop();
        }
        None
    }

    /// Unit pivoting with a Markowitz-style choice between the shortest
    /// row and the shortest column, so fill-in stays small. Returns the
    /// number of pivots.
    fn eliminate(&mut self) -> usize {
        let mut cheap: Heap = (0..self.cols.len()).map(|c| Reverse((self.cols[c].len(), c))).collect();
        let mut rheap: Heap = (0..self.rows.len()).map(|r| Reverse((self.rows[r].len(), r))).collect();
        let mut pivots = 0;
        let (mut stuck_c, mut stuck_r) = (Vec::new(), Vec::new());
        loop {
            loop {
                let c = Self::top(&mut cheap, |c| self.cols[c].len());
                let r = Self::top(&mut rheap, |r| self.rows[r].len());
                let from_c = c.and_then(|c| self.in_column(c).map(|(cost, r, u)| (cost, r, c, u)));
                let from_r = r.and_then(|r| self.in_row(r).map(|(cost, c, u)| (cost, r, c, u)));
                if from_c.is_none() {
                    if let Some(c) = c {
                        cheap.pop();
                        stuck_c.push(c);
                    }
                }
                if from_r.is_none() {
                    if let Some(r) = r {
                        rheap.pop();
                        stuck_r.push(r);
                    }
                }
                let best = match (from_c, from_r) {
                    (Some(a), Some(b)) => a.min(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) if c.is_none() && r.is_none() => break,
                    (None, None) => continue,
                };
                let (_, r, c, u) = best;
                let Some((cols, rows)) = self.pivot(r, c, u) else { return pivots };
                pivots += 1;
                cheap.extend(cols.into_iter().map(|k| Reverse((self.cols[k].len(), k))));
                rheap.extend(rows.into_iter().map(|i| Reverse((self.rows[i].len(), i))));
            }
            // Lines without a unit entry may have gained one since.
            let retry_c: Vec<usize> = stuck_c.drain(..).filter(|&c| self.cols[c].iter().any(|e| e.1.abs() == 1)).collect();
            let retry_r: Vec<usize> = stuck_r.drain(..).filter(|&r| !self.rows[r].is_empty()).collect();
            if retry_c.is_empty() {
                return pivots;
            }
            cheap.extend(retry_c.into_iter().map(|c| Reverse((self.cols[c].len(), c))));
            rheap.extend(retry_r.into_iter().map(|r| Reverse((self.rows[r].len(), r))));
        }
    }

    /// Clears row `r` with column operations, then drops row `r` and column
    /// `c`. Returns the modified columns and the rows whose length changed,
    /// or `None` (leaving the matrix untouched) on overflow.
    fn pivot(&mut self, r: usize, c: usize, u: i64) -> Option<(Vec<usize>, Vec<usize>)> {
        let others: Vec<usize> = self.rows[r].iter().copied().filter(|&k| k != c).collect();
        let mut updated = Vec::with_capacity(others.len());
        for &k in &others {
            // col_k -= (a / u) col_c, and 1/u = u for a unit.
            let col = axpy(&self.cols[k], &self.cols[c], self.value(r, k).checked_mul(u)?)?;
            updated.push((k, col));
        }
        let mut changed = Vec::new();
        for (k, col) in updated {
            let old = core::mem::replace(&mut self.cols[k], col);
            let new = &self.cols[k];
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < new.len() {
                if j == new.len() || (i < old.len() && old[i].0 < new[j].0) {
                    remove(&mut self.rows[old[i].0], k);
                    changed.push(old[i].0);
                    i += 1;
                } else if i == old.len() || new[j].0 < old[i].0 {
                    self.rows[new[j].0].push(k);
                    changed.push(new[j].0);
                    j += 1;
                } else {
                    i += 1;
                    j += 1;
                }
            }
        }
        for &(i, _) in &self.cols[c] {
            remove(&mut self.rows[i], c);
            changed.push(i);
        }
        self.cols[c].clear();
        changed.sort_unstable();
        changed.dedup();
        Some((others, changed))
    }

    fn remainder(&self) -> Vec<Vec<BigInt>> {
        let live: Vec<usize> = (0..self.cols.len()).filter(|&c| !self.cols[c].is_empty()).collect();
        let rows: Vec<usize> = (0..self.rows.len()).filter(|&r| !self.rows[r].is_empty()).collect();
        let mut dense = alloc::vec![alloc::vec![BigInt::zero(); live.len()]; rows.len()];
        for (j, &c) in live.iter().enumerate() {
            for &(r, v) in &self.cols[c] {
                let i = rows.binary_search(&r).unwrap();
                dense[i][j] = BigInt::from(v);
            }
        }
        dense
    }
}

fn remove(v: &mut Vec<usize>, x: usize) {
    let i = v.iter().position(|&y| y == x).unwrap();
    v.swap_remove(i);
}

/// `x − q y` on sorted sparse columns.
fn axpy(x: &[(usize, i64)], y: &[(usize, i64)], q: i64) -> Option<Vec<(usize, i64)>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j == y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i == x.len() || (j < y.len() && y[j].0 < x[i].0);
        let (row, v) = if take_x {
            i += 1;
            (x[i - 1].0, x[i - 1].1)
        } else if take_y {
            j += 1;
            (y[j - 1].0, q.checked_mul(y[j - 1].1)?.checked_neg()?)
        } else {
            i += 1;
            j += 1;
            (x[i - 1].0, x[i - 1].1.checked_sub(q.checked_mul(y[j - 1].1)?)?)
        };
        if v != 0 {
            out.push((row, v));
        }
    }
    Some(out)
}

/// Diagonal of the Smith normal form of a dense matrix (nonzero part).
pub(crate) fn dense_snf(mut a: Vec<Vec<BigInt>>) -> Vec<BigUint> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_entry(&a, t) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..cols {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    dirty |= !a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for i in t..rows {
                        let d = &q * &a[i][t];
                        a[i][j] -= d;
                    }
                    dirty |= !a[t][j].is_zero();
                }
            }
            if dirty {
                let (pi, pj) = min_entry_cross(&a, t);
                a.swap(t, pi);
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                continue;
            }
            // Enforce d_t | every remaining entry.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs().to_biguint().unwrap());
        t += 1;
    }
    out
}

fn min_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if !v.is_zero() && best.map_or(true, |(bi, bj)| v.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` or column `t`, including the pivot.
fn min_entry_cross(a: &[Vec<BigInt>], t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let keep = |i: usize, j: usize, best: &mut (usize, usize)| {
        let v = &a[i][j];
        if !v.is_zero() && (a[best.0][best.1].is_zero() || v.abs() < a[best.0][best.1].abs()) {
            *best = (i, j);
        }
    };
    for i in t..a.len() {
        keep(i, t, &mut best);
    }
    for j in t..a[t].len() {
        keep(t, j, &mut best);
    }
    best
}
