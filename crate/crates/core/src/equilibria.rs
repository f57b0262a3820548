//! Critical diagonals of V and their exemplars `(π on I, 0 elsewhere)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use libm::sqrt;
use serde::{Deserialize, Serialize};

use crate::model::{self, PhasePoint};
use crate::quotient::{self, QuotientPoint};
use crate::{Error, Result, Subset};

/// Largest m accepted by the subset enumeration.
pub const MAX_ENUMERATION_M: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    Sink,
    Saddle,
    SingularMax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub value: f64,
    /// Unit length.
    pub vector: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRecord {
    pub m: usize,
    /// Positions holding angle π in the exemplar.
    pub subset: Subset,
    /// `|I|`; for sinks and saddles this is the Morse index.
    pub index: usize,
    pub potential: f64,
    /// Eigenpairs of the Hessian of −V at the exemplar.
    pub eigenpairs: Vec<Eigenpair>,
    pub kind: EquilibriumKind,
}

impl EquilibriumRecord {
    pub fn exemplar(&self) -> PhasePoint {
        exemplar(self.m, self.subset)
    }

    pub fn quotient_point(&self) -> QuotientPoint {
        quotient::project(&self.exemplar())
    }
}

/// The point with angle π on `subset` and 0 elsewhere. Angles are exactly
/// 0 and π.
pub fn exemplar(m: usize, subset: Subset) -> PhasePoint {
    let v: Vec<f64> = (0..m).map(|i| if subset.contains(i) { PI } else { 0.0 }).collect();
    PhasePoint::new(v).expect("m >= 2")
}

/// Rotates a 0/π singular exemplar into the `±π/2` convention used for the
/// blow-up: the π-block becomes −π/2 and the 0-block +π/2.
pub fn to_half_pi_convention(p: &PhasePoint) -> PhasePoint {
    model::diagonal_rotate(p, FRAC_PI_2)
}

/// `2u(m − u)`, the potential of an index-u saddle.
pub fn saddle_potential(u: usize, m: usize) -> Result<f64> {
    if 2 * u >= m {
        return Err(Error::InvalidArgument(alloc::format!("index {u} must be below m/2 = {}", m as f64 / 2.0)));
    }
    Ok(2.0 * (u * (m - u)) as f64)
}

/// Normalized Helmert-style vectors `(1, −1, 0..)`, `(1, 1, −2, 0..)`, … over
/// `len` consecutive slots starting at `offset`.
fn helmert(m: usize, offset: usize, len: usize) -> impl Iterator<Item = Vec<f64>> {
    (1..len).map(move |k| {
        let mut v = vec![0.0; m];
        let scale = 1.0 / sqrt((k * (k + 1)) as f64);
        for x in &mut v[offset..offset + k] {
            *x = scale;
        }
        v[offset + k] = -(k as f64) * scale;
        v
    })
}

/// Eigenstructure at `(π × d, 0 × z)` for `d <= z`: `𝟏 ↦ 0`, the dz-vector
/// `↦ m` (absent when `d = 0`), `d − 1` vectors `↦ z − d` and `z − 1`
/// vectors `↦ d − z`.
fn block_eigenpairs(d: usize, z: usize) -> Vec<Eigenpair> {
    let m = d + z;
    let mut out = Vec::with_capacity(m);
    out.push(Eigenpair { value: 0.0, vector: vec![1.0 / sqrt(m as f64); m] });
    if d > 0 {
        let (df, zf) = (d as f64, z as f64);
        let n = sqrt(df * zf * zf + zf * df * df);
        let v = (0..m).map(|i| if i < d { zf / n } else { -df / n }).collect();
        out.push(Eigenpair { value: m as f64, vector: v });
    }
    let gap = z as f64 - d as f64;
    out.extend(helmert(m, 0, d).map(|v| Eigenpair { value: gap, vector: v }));
    out.extend(helmert(m, d, z).map(|v| Eigenpair { value: -gap, vector: v }));
    out
}

/// Eigenpairs at the exemplar `(π, …, π, 0, …, 0)` with `d` π's and `z`
/// zeros. Requires `d < z`.
pub fn analytic_eigenpairs(d: usize, z: usize) -> Result<Vec<Eigenpair>> {
    if d >= z || d + z < 2 {
        return Err(Error::InvalidArgument(alloc::format!("need 0 <= d < z and d + z >= 2, got d = {d}, z = {z}")));
    }
    Ok(block_eigenpairs(d, z))
}

fn record(m: usize, subset: Subset, kind: EquilibriumKind) -> EquilibriumRecord {
    let d = subset.len();
    let block = block_eigenpairs(d, m - d);
    // Block slot s maps to oscillator order[s]: the π positions first.
    let order: Vec<usize> = subset.iter().chain(subset.complement(m).iter()).collect();
    let eigenpairs = block
        .into_iter()
        .map(|e| {
            let mut v = vec![0.0; m];
            for (s, &i) in order.iter().enumerate() {
                v[i] = e.vector[s];
            }
            Eigenpair { value: e.value, vector: v }
        })
        .collect();
    let potential = 2.0 * (d * (m - d)) as f64;
    EquilibriumRecord { m, subset, index: d, potential, eigenpairs, kind }
}

/// All critical diagonals, ordered by index then subset: the non-maximal
/// ones (`|I| < m/2`), followed for even m by the singular points of V^max
/// (`|I| = m/2` with the last oscillator at 0, one per diagonal).
pub fn enumerate_equilibria(m: usize) -> Result<Vec<EquilibriumRecord>> {
    if m < 2 {
        return Err(Error::TooFewOscillators { min: 2, got: m });
    }
    if m > MAX_ENUMERATION_M {
        return Err(Error::InvalidArgument(alloc::format!("m = {m} exceeds the enumeration limit {MAX_ENUMERATION_M}")));
    }
    let mut out = Vec::new();
    for u in 0..m.div_ceil(2) {
        let kind = if u == 0 { EquilibriumKind::Sink } else { EquilibriumKind::Saddle };
        out.extend(Subset::all_of_size(m, u).map(|s| record(m, s, kind)));
    }
    if m % 2 == 0 {
        out.extend(
            Subset::all_of_size(m, m / 2)
                .filter(|s| !s.contains(m - 1))
                .map(|s| record(m, s, EquilibriumKind::SingularMax)),
        );
    }
    Ok(out)
}
