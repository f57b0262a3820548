//! Adaptive Dormand–Prince 5(4) integrator for autonomous systems.

use alloc::vec;
use alloc::vec::Vec;

use libm::{pow, sqrt};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An autonomous vector field on ℝⁿ.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]);
}

/// Wraps a closure as a [`VectorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> VectorField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}

/// Time-reversed field.
pub struct Reversed<'a, F: ?Sized>(pub &'a F);

impl<F: VectorField + ?Sized> VectorField for Reversed<'_, F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        self.0.eval(x, out);
        for o in out.iter_mut() {
            *o = -*o;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { atol: 1e-10, rtol: 1e-8, max_steps: 2_000_000, h_init: 1e-3, h_min: 1e-14, h_max: 1.0 }
    }
}

/// Observer verdict after each accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndReason {
    /// Reached `t_end`.
    Finished,
    /// The observer asked to stop.
    Stopped,
    /// Step budget exhausted.
    MaxSteps,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub t: f64,
    pub x: Vec<f64>,
    pub reason: EndReason,
    pub steps: usize,
}

// Nodes c_i are not needed: the systems are autonomous.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Scratch space for one Dormand–Prince step.
struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Stages { k: core::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n] }
    }

    /// Fills `k[1..7]` and writes the fifth-order solution into `out`. Assumes
    /// `k[0] = f(x)`. Returns the scaled error norm.
    fn step<F: VectorField + ?Sized>(&mut self, f: &F, x: &[f64], h: f64, out: &mut [f64], opts: &OdeOptions) -> f64 {
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, row) in rows.iter().enumerate() {
            for i in 0..x.len() {
                let mut acc = 0.0;
                for (j, a) in row.iter().enumerate() {
                    acc += a * self.k[j][i];
                }
                self.tmp[i] = x[i] + h * acc;
            }
            let (_, rest) = self.k.split_at_mut(s + 1);
            f.eval(&self.tmp, &mut rest[0]);
        }
        for i in 0..x.len() {
            let mut acc = 0.0;
            for (j, b) in B.iter().enumerate() {
                acc += b * self.k[j][i];
            }
            out[i] = x[i] + h * acc;
        }
        f.eval(out, &mut self.k[6]);
        let mut err = 0.0;
        for i in 0..x.len() {
            let mut e = 0.0;
            for (j, c) in E.iter().enumerate() {
                e += c * self.k[j][i];
            }
            let sc = opts.atol + opts.rtol * x[i].abs().max(out[i].abs());
            let q = h * e / sc;
            err += q * q;
        }
        sqrt(err / x.len().max(1) as f64)
    }
}

/// Integrates `ẋ = f(x)` from `t = 0` to `t_end`. The observer sees the
/// initial state and every accepted step.
pub fn solve<F, O>(f: &F, x0: &[f64], t_end: f64, opts: &OdeOptions, mut observer: O) -> Result<Solution>
where
    F: VectorField + ?Sized,
    O: FnMut(f64, &[f64]) -> Control,
{
    let n = f.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    let mut x = x0.to_vec();
    let mut t = 0.0;
    if observer(t, &x) == Control::Stop {
        return Ok(Solution { t, x, reason: EndReason::Stopped, steps: 0 });
    }
    let mut st = Stages::new(n);
    let mut next = vec![0.0; n];
    f.eval(&x, &mut st.k[0]);
    let mut h = opts.h_init.min(opts.h_max).min(t_end);
    let mut steps = 0;
    while t < t_end {
        if steps >= opts.max_steps {
            return Ok(Solution { t, x, reason: EndReason::MaxSteps, steps });
        }
        let last = t + h >= t_end;
        let h_try = if last { t_end - t } else { h };
        let err = st.step(f, &x, h_try, &mut next, opts);
        if !err.is_finite() {
            h *= 0.25;
            if h < opts.h_min {
                return Err(Error::StepFailure { t });
            }
            continue;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * pow(err, -0.2)).clamp(0.2, 5.0) };
        if err <= 1.0 {
            t = if last { t_end } else { t + h_try };
            core::mem::swap(&mut x, &mut next);
            let (first, rest) = st.k.split_at_mut(6);
            core::mem::swap(&mut first[0], &mut rest[0]);
            steps += 1;
            if observer(t, &x) == Control::Stop {
                return Ok(Solution { t, x, reason: EndReason::Stopped, steps });
            }
            h = (h_try * factor).min(opts.h_max);
        } else {
            h = h_try * factor.min(1.0);
            if h < opts.h_min {
                return Err(Error::StepFailure { t });
            }
        }
    }
    Ok(Solution { t, x, reason: EndReason::Finished, steps })
}

/// One fifth-order step of size `h` without error control, for refining
/// event locations inside an accepted step.
pub fn single_step<F: VectorField + ?Sized>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    let mut st = Stages::new(x.len());
    f.eval(x, &mut st.k[0]);
    let mut out = vec![0.0; x.len()];
    st.step(f, x, h, &mut out, &OdeOptions::default());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::exp;

    #[test]
    fn exponential_decay() {
        let f = FnField::new(1, |x: &[f64], o: &mut [f64]| o[0] = -x[0]);
        let sol = solve(&f, &[1.0], 3.0, &OdeOptions::default(), |_, _| Control::Continue).unwrap();
        assert_eq!(sol.reason, EndReason::Finished);
        assert!((sol.x[0] - exp(-3.0)).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let f = FnField::new(2, |x: &[f64], o: &mut [f64]| {
            o[0] = x[1];
            o[1] = -x[0];
        });
        let t = 2.0 * core::f64::consts::PI;
        let sol = solve(&f, &[1.0, 0.0], t, &OdeOptions::default(), |_, _| Control::Continue).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-7 && sol.x[1].abs() < 1e-7);
    }
}
