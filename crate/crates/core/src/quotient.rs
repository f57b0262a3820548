//! The quotient `Q = 𝕋^m / D` by the diagonal action, in the cube-face chart
//! `θ_m = 0`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use libm::{cos, sin, sqrt};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::model::{self, wrap_angle, wrap_signed, ModelParams, PhasePoint};
use crate::{Error, Result};

/// A diagonal class `[Θ]`, stored as `θ_i − θ_m` for `i < m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct QuotientPoint {
    coords: Vec<f64>,
}

impl QuotientPoint {
    /// `coords` has `m − 1 >= 1` entries.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::TooFewOscillators { min: 2, got: 1 });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coordinates must be finite".into()));
        }
        Ok(Self::from_lift(&coords))
    }

    pub(crate) fn from_lift(x: &[f64]) -> Self {
        QuotientPoint { coords: x.iter().map(|&c| wrap_angle(c)).collect() }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Number of oscillators.
    pub fn m(&self) -> usize {
        self.coords.len() + 1
    }
}

impl TryFrom<Vec<f64>> for QuotientPoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        QuotientPoint::new(v)
    }
}

impl From<QuotientPoint> for Vec<f64> {
    fn from(q: QuotientPoint) -> Self {
        q.coords
    }
}

/// Metric of Q pulled back to the cube-face chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientMetric {
    pub m: usize,
}

impl QuotientMetric {
    pub fn new(m: usize) -> Self {
        QuotientMetric { m }
    }

    /// `g = I − (1/m) u uᵀ`.
    pub fn g(&self) -> DMatrix<f64> {
        let n = self.m - 1;
        DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / self.m as f64)
    }

    /// `g⁻¹ = I + u uᵀ`.
    pub fn g_inv(&self) -> DMatrix<f64> {
        let n = self.m - 1;
        DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 1.0 })
    }

    /// Apply `g⁻¹` to a covector without forming the matrix.
    pub fn raise(&self, covector: &[f64]) -> Vec<f64> {
        let s: f64 = covector.iter().sum();
        covector.iter().map(|&c| c + s).collect()
    }
}

pub fn project(p: &PhasePoint) -> QuotientPoint {
    let a = p.angles();
    let last = a[a.len() - 1];
    QuotientPoint { coords: a[..a.len() - 1].iter().map(|&t| wrap_angle(t - last)).collect() }
}

/// The representative with `θ_m = 0`.
pub fn lift(q: &QuotientPoint) -> PhasePoint {
    let mut v = q.coords.clone();
    v.push(0.0);
    PhasePoint::from_lift(&v)
}

/// The representative on the counterdiagonal `Σ θ_j ≡ 0 (mod 2π)`:
/// `(θ_1 − θ̄, …, θ_{m−1} − θ̄, −θ̄)` with `θ̄ = (1/m) Σ θ_j`.
pub fn counterdiagonal_embed(q: &QuotientPoint) -> PhasePoint {
    let m = q.m() as f64;
    let mean = q.coords.iter().sum::<f64>() / m;
    let mut v: Vec<f64> = q.coords.iter().map(|&c| c - mean).collect();
    v.push(-mean);
    PhasePoint::from_lift(&v)
}

/// `V_Q = V ∘ lift`.
pub fn quotient_potential(q: &QuotientPoint) -> f64 {
    model::potential_raw(&lifted(&q.coords))
}

fn lifted(x: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(x.len() + 1);
    v.extend_from_slice(x);
    v.push(0.0);
    v
}

/// `−(∇V_Q)_i = Σ_k sin(θ_k − θ_i) − sin θ_i − Σ_k sin θ_k`, sums over `k < m`.
pub(crate) fn quotient_field_raw(x: &[f64], out: &mut [f64]) {
    let total: f64 = x.iter().map(|&t| sin(t)).sum();
    for (i, o) in out.iter_mut().enumerate() {
        let ti = x[i];
        // Same summation order as `total`, so a zero coordinate yields an
        // exactly zero component.
        let pair: f64 = x.iter().map(|&tk| sin(tk - ti)).sum();
        *o = pair - sin(ti) - total;
    }
}

/// Quotient field of the generalized model: `K_i − K_m` at the lift.
pub(crate) fn quotient_general_raw(x: &[f64], params: &ModelParams, out: &mut [f64]) {
    let th = lifted(x);
    let mut k = vec![0.0; th.len()];
    model::general_field_raw(&th, params, &mut k);
    let last = k[k.len() - 1];
    for (o, &ki) in out.iter_mut().zip(&k) {
        *o = ki - last;
    }
}

pub(crate) fn quotient_jacobian_raw(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let s: f64 = (0..n).filter(|&k| k != i).map(|k| cos(x[k] - x[i])).sum();
            -s - 2.0 * cos(x[i])
        } else {
            cos(x[j] - x[i]) - cos(x[j])
        }
    })
}

/// The negative quotient gradient in cube-face coordinates (standard model).
pub fn quotient_field(q: &QuotientPoint) -> Vec<f64> {
    let mut out = vec![0.0; q.coords.len()];
    quotient_field_raw(&q.coords, &mut out);
    out
}

/// Jacobian of [`quotient_field`].
pub fn quotient_jacobian(q: &QuotientPoint) -> DMatrix<f64> {
    quotient_jacobian_raw(&q.coords)
}

/// Quotient field for arbitrary parameters.
pub fn quotient_field_with(q: &QuotientPoint, params: &ModelParams) -> Result<Vec<f64>> {
    params.validate()?;
    if params.m != q.m() {
        return Err(Error::DimensionMismatch { expected: params.m, got: q.m() });
    }
    let mut out = vec![0.0; q.coords.len()];
    if params.is_standard() {
        quotient_field_raw(&q.coords, &mut out);
    } else {
        quotient_general_raw(&q.coords, params, &mut out);
    }
    Ok(out)
}

/// Distance between diagonal classes: the minimum over representatives of
/// the flat distance on 𝕋^m. Equivalently, the Euclidean distance between the
/// nearest counterdiagonal representatives.
pub fn quotient_distance(a: &QuotientPoint, b: &QuotientPoint) -> f64 {
    let mut delta: Vec<f64> = a.coords.iter().zip(&b.coords).map(|(&x, &y)| wrap_signed(x - y)).collect();
    delta.push(0.0);
    sqrt(min_over_shift(&delta))
}

/// Same as [`quotient_distance`] for ambient points.
pub fn diagonal_distance(a: &PhasePoint, b: &PhasePoint) -> f64 {
    let delta: Vec<f64> = a.angles().iter().zip(b.angles()).map(|(&x, &y)| wrap_signed(x - y)).collect();
    sqrt(min_over_shift(&delta))
}

/// `min_α Σ_i dist(δ_i − α)²` with circle distance. The objective is
/// piecewise quadratic with breaks at `δ_i + π`; on each arc the wrap pattern
/// is fixed and the minimizer is a clamped mean.
fn min_over_shift(delta: &[f64]) -> f64 {
    let f = |alpha: f64| delta.iter().map(|&d| { let r = wrap_signed(d - alpha); r * r }).sum::<f64>();
    let mut breaks: Vec<f64> = delta.iter().map(|&d| wrap_angle(d + PI)).collect();
    breaks.sort_by(f64::total_cmp);
    let n = breaks.len();
    let mut best = f(0.0);
    for k in 0..n {
        let lo = breaks[k];
        let hi = if k + 1 < n { breaks[k + 1] } else { breaks[0] + TAU };
        let mid = 0.5 * (lo + hi);
        let mean = delta.iter().map(|&d| wrap_signed(d - mid)).sum::<f64>() / n as f64;
        let alpha = (mid + mean).clamp(lo, hi);
        best = best.min(f(alpha));
    }
    best
}
