//! Potential, vector field, centroid and Hessian on the m-torus.
//!
//! The potential is `V = ½ Σ_{l,k} (1 − cos(θ_l − θ_k))` and the standard
//! field is `K = −∇V`, i.e. `K_j = Σ_k sin(θ_k − θ_j)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use libm::{cos, floor, sin, sqrt};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default tolerance for angular predicates, in radians.
pub const ANGLE_TOL: f64 = 1e-9;

/// Reduce an angle to `[0, 2π)`. Idempotent.
pub fn wrap_angle(x: f64) -> f64 {
    if (0.0..TAU).contains(&x) {
        return x;
    }
    let y = x - TAU * floor(x / TAU);
    if (0.0..TAU).contains(&y) {
        y
    } else {
        0.0
    }
}

/// Reduce an angle to `(−π, π]`.
pub fn wrap_signed(x: f64) -> f64 {
    let y = wrap_angle(x);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_signed(a - b).abs()
}

/// A point Θ of the m-torus with every angle in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PhasePoint {
    angles: Vec<f64>,
}

impl PhasePoint {
    /// Normalizes the angles. Requires `m >= 2` and finite input.
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(Error::TooFewOscillators { min: 2, got: angles.len() });
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        Ok(Self::from_lift(&angles))
    }

    /// Normalizes an unwrapped state vector. The caller guarantees length >= 2.
    pub(crate) fn from_lift(x: &[f64]) -> Self {
        PhasePoint { angles: x.iter().map(|&a| wrap_angle(a)).collect() }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn m(&self) -> usize {
        self.angles.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.angles
    }

    /// Largest coordinatewise circle distance to `other`.
    pub fn torus_distance(&self, other: &PhasePoint) -> f64 {
        self.angles
            .iter()
            .zip(&other.angles)
            .map(|(&a, &b)| angle_distance(a, b))
            .fold(0.0, f64::max)
    }

    /// Equality modulo 2π with tolerance.
    pub fn approx_eq(&self, other: &PhasePoint, tol: f64) -> bool {
        self.m() == other.m() && self.torus_distance(other) <= tol
    }
}

impl TryFrom<Vec<f64>> for PhasePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        PhasePoint::new(v)
    }
}

impl From<PhasePoint> for Vec<f64> {
    fn from(p: PhasePoint) -> Self {
        p.angles
    }
}

/// Natural frequencies and coupling matrix of the generalized model
/// `θ̇_j = ω_j + Σ_k a_jk sin(θ_k − θ_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: usize,
    pub omega: Vec<f64>,
    /// Row-major `m × m`.
    pub coupling: Vec<f64>,
}

impl ModelParams {
    /// `ω = 0`, `a_jk = 1`.
    pub fn standard(m: usize) -> Self {
        ModelParams { m, omega: vec![0.0; m], coupling: vec![1.0; m * m] }
    }

    pub fn with_omega(mut self, omega: Vec<f64>) -> Result<Self> {
        if omega.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: omega.len() });
        }
        self.omega = omega;
        Ok(self)
    }

    /// `coupling` is row-major with `m * m` entries.
    pub fn with_coupling(mut self, coupling: Vec<f64>) -> Result<Self> {
        if coupling.len() != self.m * self.m {
            return Err(Error::DimensionMismatch { expected: self.m * self.m, got: coupling.len() });
        }
        self.coupling = coupling;
        Ok(self)
    }

    pub fn a(&self, j: usize, k: usize) -> f64 {
        self.coupling[j * self.m + k]
    }

    pub fn is_standard(&self) -> bool {
        self.omega.iter().all(|&w| w == 0.0) && self.coupling.iter().all(|&a| a == 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: self.omega.len() });
        }
        if self.coupling.len() != self.m * self.m {
            return Err(Error::DimensionMismatch { expected: self.m * self.m, got: self.coupling.len() });
        }
        Ok(())
    }
}

/// Complex mean `Z = (1/m) Σ e^{iθ_k}` and its modulus `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub re: f64,
    pub im: f64,
    pub r: f64,
}

// ---- slice kernels used by the integrators -------------------------------

/// `(Σ cos θ_k, Σ sin θ_k)`.
pub(crate) fn cos_sin_sums(theta: &[f64]) -> (f64, f64) {
    theta.iter().fold((0.0, 0.0), |(c, s), &t| (c + cos(t), s + sin(t)))
}

pub(crate) fn potential_raw(theta: &[f64]) -> f64 {
    let mut v = 0.0;
    for (l, &a) in theta.iter().enumerate() {
        for &b in &theta[l + 1..] {
            v += 1.0 - cos(a - b);
        }
    }
    v
}

/// `w = m²/2 − V = ½ |Σ e^{iθ}|²`, computed without cancellation.
pub(crate) fn gap_raw(theta: &[f64]) -> f64 {
    let (c, s) = cos_sin_sums(theta);
    0.5 * (c * c + s * s)
}

pub(crate) fn modulus_raw(theta: &[f64]) -> f64 {
    let (c, s) = cos_sin_sums(theta);
    sqrt(c * c + s * s) / theta.len() as f64
}

/// Standard field. The k-loop runs in the same order for every j, so equal
/// angles get bit-identical components.
pub(crate) fn field_raw(theta: &[f64], out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate() {
        let tj = theta[j];
        *o = theta.iter().map(|&tk| sin(tk - tj)).sum();
    }
}

pub(crate) fn general_field_raw(theta: &[f64], params: &ModelParams, out: &mut [f64]) {
    let m = theta.len();
    for j in 0..m {
        let tj = theta[j];
        let row = &params.coupling[j * m..(j + 1) * m];
        out[j] = params.omega[j] + theta.iter().zip(row).map(|(&tk, &a)| a * sin(tk - tj)).sum::<f64>();
    }
}

// ---- public operations ----------------------------------------------------

/// `V(Θ) = ½ Σ_{l,k} (1 − cos(θ_l − θ_k))`, in `[0, m²/2]`.
pub fn potential(p: &PhasePoint) -> f64 {
    potential_raw(&p.angles)
}

/// `ω_j + Σ_k a_jk sin(θ_k − θ_j)`.
pub fn vector_field(p: &PhasePoint, params: &ModelParams) -> Result<Vec<f64>> {
    params.validate()?;
    if params.m != p.m() {
        return Err(Error::DimensionMismatch { expected: params.m, got: p.m() });
    }
    let mut out = vec![0.0; p.m()];
    if params.is_standard() {
        field_raw(&p.angles, &mut out);
    } else {
        general_field_raw(&p.angles, params, &mut out);
    }
    Ok(out)
}

pub fn centroid(p: &PhasePoint) -> Centroid {
    let m = p.m() as f64;
    let (c, s) = cos_sin_sums(&p.angles);
    let (re, im) = (c / m, s / m);
    Centroid { re, im, r: sqrt(re * re + im * im).min(1.0) }
}

/// Hessian of −V from the pairwise formula
/// `H_ij = cos(θ_i − θ_j) − δ_ij Σ_k cos(θ_k − θ_i)`.
pub fn hessian(p: &PhasePoint) -> DMatrix<f64> {
    let t = &p.angles;
    let m = t.len();
    let mut h = DMatrix::zeros(m, m);
    for i in 0..m {
        let mut diag = 0.0;
        for j in 0..m {
            let c = cos(t[i] - t[j]);
            diag += c;
            h[(i, j)] = c;
        }
        h[(i, i)] -= diag;
    }
    h
}

/// Hessian of −V from the frame form
/// `H = Cos Cosᵀ + Sin Sinᵀ − S diag(Sin) − C diag(Cos)`.
pub fn hessian_frame_form(p: &PhasePoint) -> DMatrix<f64> {
    let m = p.m();
    let cv = DMatrix::from_iterator(m, 1, p.angles.iter().map(|&t| cos(t)));
    let sv = DMatrix::from_iterator(m, 1, p.angles.iter().map(|&t| sin(t)));
    let (c, s) = (cv.sum(), sv.sum());
    let mut h = &cv * cv.transpose() + &sv * sv.transpose();
    for i in 0..m {
        h[(i, i)] -= s * sv[i] + c * cv[i];
    }
    h
}

/// True iff every pairwise difference is within `tol` of a multiple of π.
pub fn is_antipodal(p: &PhasePoint, tol: f64) -> bool {
    let near = |d: f64| {
        let r = wrap_angle(d);
        r.min((r - PI).abs()).min(TAU - r) <= tol
    };
    p.angles.iter().enumerate().all(|(i, &a)| p.angles[i + 1..].iter().all(|&b| near(a - b)))
}

/// `Θ + α𝟏` modulo 2π.
pub fn diagonal_rotate(p: &PhasePoint, alpha: f64) -> PhasePoint {
    PhasePoint { angles: p.angles.iter().map(|&a| wrap_angle(a + alpha)).collect() }
}

/// `M(Θ) = Σ (1 − cos θ_k)`, the potential of the product source–sink flow.
pub fn perfect_morse_potential(theta: &[f64]) -> f64 {
    theta.iter().map(|&t| 1.0 - cos(t)).sum()
}

/// `−∇M = (−sin θ_k)_k`.
pub fn perfect_morse_field(theta: &[f64], out: &mut [f64]) {
    for (o, &t) in out.iter_mut().zip(theta) {
        *o = -sin(t);
    }
}
