//! The straight-line homotopy `F_s = (1 − s) F_0 + s F_1` on 𝕋^d between the
//! product source–sink field `F_0 = −∇M` and the Kuramoto quotient field
//! restricted to a d-dimensional template, `F_1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use libm::{cos, sin};
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::model::{self, angle_distance};
use crate::ode::{self, Control, OdeOptions, VectorField};
use crate::{Error, Result, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyField {
    pub d: usize,
    pub m: usize,
    pub s: f64,
}

impl HomotopyField {
    pub fn new(d: usize, m: usize, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) || d == 0 || 2 * d >= m {
            return Err(Error::InvalidArgument(alloc::format!("need 0 <= s <= 1 and 1 <= d < m/2; got d = {d}, m = {m}, s = {s}")));
        }
        Ok(HomotopyField { d, m, s })
    }

    /// `F_1,i = Σ_k sin(θ_k − θ_i) − (m − d) sin θ_i − Σ_k sin θ_k`.
    pub fn f1(&self, x: &[f64], out: &mut [f64]) {
        let total: f64 = x.iter().map(|&t| sin(t)).sum();
        let c = (self.m - self.d) as f64;
        for (i, o) in out.iter_mut().enumerate() {
            let ti = x[i];
            *o = x.iter().map(|&tk| sin(tk - ti)).sum::<f64>() - c * sin(ti) - total;
        }
    }

    pub fn f0(&self, x: &[f64], out: &mut [f64]) {
        model::perfect_morse_field(x, out)
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.d;
        let c = (self.m - self.d) as f64;
        let j1 = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                -(0..d).filter(|&k| k != i).map(|k| cos(x[k] - x[i])).sum::<f64>() - (c + 1.0) * cos(x[i])
            } else {
                cos(x[j] - x[i]) - cos(x[j])
            }
        });
        let j0 = DMatrix::from_fn(d, d, |i, j| if i == j { -cos(x[i]) } else { 0.0 });
        j0 * (1.0 - self.s) + j1 * self.s
    }

    /// `Λ = W + (m − d + (1 − s)/s) M` with `W` the pair sum over the d
    /// coordinates; for `s = 0` this degenerates to `M`.
    pub fn lyapunov(&self, x: &[f64]) -> f64 {
        let mm = model::perfect_morse_potential(x);
        if self.s == 0.0 {
            return mm;
        }
        let c = (self.m - self.d) as f64 + (1.0 - self.s) / self.s;
        model::potential_raw(x) + c * mm
    }
}

impl VectorField for HomotopyField {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let mut a = vec![0.0; self.d];
        self.f0(x, &mut a);
        self.f1(x, out);
        for (o, a) in out.iter_mut().zip(&a) {
            *o = (1.0 - self.s) * a + self.s * *o;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyOptions {
    /// Seeds per axis; the seed grid has `grid^d` points.
    pub grid: usize,
    pub newton_tol: f64,
    pub newton_iter: usize,
    pub orbits: usize,
    pub orbit_time: f64,
    /// Orbits closer than this (field norm) to a zero no longer count for
    /// the strict-decrease check.
    pub settled: f64,
    pub ode: OdeOptions,
}

impl Default for HomotopyOptions {
    fn default() -> Self {
        HomotopyOptions {
            grid: 20,
            newton_tol: 1e-13,
            newton_iter: 100,
            orbits: 50,
            orbit_time: 20.0,
            settled: 1e-6,
            ode: OdeOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenspaceCheck {
    pub subset: Subset,
    pub dimension: usize,
    /// Largest principal-angle sine against `span{e_i : i ∈ I}`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyReport {
    pub field: HomotopyField,
    pub seeds: usize,
    pub converged: usize,
    pub failed: usize,
    /// Distinct zeros, wrapped to `[0, 2π)`.
    pub zeros: Vec<Vec<f64>>,
    /// Largest distance from a zero to the nearest point of `{0, π}^d`.
    pub max_zero_offset: f64,
    pub lyapunov_steps: usize,
    pub lyapunov_violations: usize,
    pub eigenspaces: Vec<EigenspaceCheck>,
}

fn offset_from_lattice(x: &[f64]) -> f64 {
    x.iter().map(|&t| angle_distance(t, 0.0).min(angle_distance(t, PI))).fold(0.0, f64::max)
}

/// Gathers the numerical evidence that `F_s` is conjugate to `F_0`: where
/// its zeros are, whether Λ decreases along orbits, and the unstable
/// subspaces at the points `p_I`.
pub fn homotopy_analysis<R: Rng + ?Sized>(h: &HomotopyField, opts: &HomotopyOptions, rng: &mut R) -> Result<HomotopyReport> {
    let d = h.d;
    let f = |x: &[f64]| {
        let mut o = vec![0.0; d];
        h.eval(x, &mut o);
        o
    };

    let seeds = opts.grid.pow(d as u32);
    let (mut converged, mut failed) = (0, 0);
    let mut zeros: Vec<Vec<f64>> = Vec::new();
    for n in 0..seeds {
        let mut rem = n;
        let seed: Vec<f64> = (0..d)
            .map(|_| {
                let k = rem % opts.grid;
                rem /= opts.grid;
                TAU * (k as f64 + 0.5) / opts.grid as f64
            })
            .collect();
        match linalg::newton(f, |x| h.jacobian(x), &seed, opts.newton_tol, opts.newton_iter) {
            Some(z) => {
                converged += 1;
                let z: Vec<f64> = z.iter().map(|&t| model::wrap_angle(t)).collect();
                let known = zeros.iter().any(|y| y.iter().zip(&z).all(|(&a, &b)| angle_distance(a, b) < 1e-6));
                if !known {
                    zeros.push(z);
                }
            }
            None => failed += 1,
        }
    }
    let max_zero_offset = zeros.iter().map(|z| offset_from_lattice(z)).fold(0.0, f64::max);

    let (mut steps, mut violations) = (0, 0);
    let mut fbuf = vec![0.0; d];
    for _ in 0..opts.orbits {
        let x0: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * TAU).collect();
        let mut prev: Option<(f64, bool)> = None;
        ode::solve(h, &x0, opts.orbit_time, &opts.ode, |_, x| {
            let lam = h.lyapunov(x);
            h.eval(x, &mut fbuf);
            let moving = linalg::norm(&fbuf) > opts.settled;
            if let Some((p, was_moving)) = prev {
                if was_moving {
                    steps += 1;
                    if !(lam < p) {
                        violations += 1;
                    }
                }
            }
            prev = Some((lam, moving));
            Control::Continue
        })?;
    }

    let mut eigenspaces = Vec::new();
    for bits in 0..(1u64 << d) {
        let subset = Subset::from_bits(bits);
        let p: Vec<f64> = (0..d).map(|i| if subset.contains(i) { PI } else { 0.0 }).collect();
        let space = linalg::positive_invariant_subspace(&h.jacobian(&p))?;
        let target = DMatrix::from_fn(d, subset.len(), |r, c| if subset.iter().nth(c) == Some(r) { 1.0 } else { 0.0 });
        let gap = linalg::principal_angle_gap(&space, &target);
        eigenspaces.push(EigenspaceCheck { subset, dimension: space.ncols(), gap });
    }

    Ok(HomotopyReport {
        field: *h,
        seeds,
        converged,
        failed,
        zeros,
        max_zero_offset,
        lyapunov_steps: steps,
        lyapunov_violations: violations,
        eigenspaces,
    })
}
