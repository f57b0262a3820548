//! Retraction onto V^max along the auxiliary field
//! `W = (w / ‖∇V‖²) ∇V`, `w = m²/2 − V`, under which `w` decays as `e^{−t}`.

use alloc::vec;
use alloc::vec::Vec;

use libm::log;
use serde::{Deserialize, Serialize};

use crate::model::{self, PhasePoint};
use crate::ode::{self, Control, FnField, OdeOptions};
use crate::quotient::{self, QuotientPoint};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetractionOptions {
    pub ode: OdeOptions,
    /// Stop once the centroid modulus would fall below this value.
    pub target_r: f64,
    /// Abort when `Y = w/‖∇V‖²` exceeds this value.
    pub y_max: f64,
    /// Minimum time between diagnostic samples; 0 records every step.
    pub sample_interval: f64,
}

impl Default for RetractionOptions {
    fn default() -> Self {
        RetractionOptions { ode: OdeOptions::default(), target_r: 1e-11, y_max: 1e8, sample_interval: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WSample {
    pub t: f64,
    pub w: f64,
    pub y: f64,
    /// Ambient angles (unwrapped lift).
    pub state: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WDiagnostics {
    pub samples: Vec<WSample>,
}

/// `(w, ‖∇V‖²)` at an ambient state.
pub(crate) fn gap_and_grad(theta: &[f64], grad: &mut [f64]) -> (f64, f64) {
    model::field_raw(theta, grad);
    let g2 = grad.iter().map(|g| g * g).sum();
    (model::gap_raw(theta), g2)
}

/// The auxiliary field on 𝕋^m. It vanishes where `∇V` does.
pub fn auxiliary_field(m: usize) -> FnField<impl Fn(&[f64], &mut [f64])> {
    FnField::new(m, |x: &[f64], out: &mut [f64]| {
        let (w, g2) = gap_and_grad(x, out);
        // out holds K = −∇V.
        let scale = if g2 > 0.0 { -w / g2 } else { 0.0 };
        for o in out.iter_mut() {
            *o *= scale;
        }
    })
}

/// Follows W from a high-potential start to its limit on V^max.
///
/// Requires `V(start) ≥ m²/2 − epsilon`. Aborts with
/// [`Error::SingularApproach`] if `Y` blows up, which happens when the orbit
/// heads for a singular point of V^max.
pub fn alpha_limit_retraction(start: &QuotientPoint, epsilon: f64, opts: &RetractionOptions) -> Result<(PhasePoint, WDiagnostics)> {
    let p0 = quotient::lift(start);
    retract_ambient(p0.angles(), epsilon, opts)
}

pub(crate) fn retract_ambient(theta0: &[f64], epsilon: f64, opts: &RetractionOptions) -> Result<(PhasePoint, WDiagnostics)> {
    let m = theta0.len();
    let mut grad = vec![0.0; m];
    let (w0, g20) = gap_and_grad(theta0, &mut grad);
    if w0 > epsilon {
        return Err(Error::BelowHighRegion { gap: w0, epsilon });
    }
    let mut diag = WDiagnostics::default();
    let w_target = 0.5 * (m * m) as f64 * opts.target_r * opts.target_r;
    if w0 <= w_target || g20 == 0.0 {
        diag.samples.push(WSample { t: 0.0, w: w0, y: f64::INFINITY, state: theta0.to_vec() });
        return Ok((PhasePoint::from_lift(theta0), diag));
    }
    let t_end = log(w0 / w_target);
    let field = auxiliary_field(m);
    let mut last = f64::NEG_INFINITY;
    let mut blowup = None;
    let sol = ode::solve(&field, theta0, t_end, &opts.ode, |t, x| {
        let (w, g2) = gap_and_grad(x, &mut grad);
        let y = w / g2;
        if !(y <= opts.y_max) {
            blowup = Some(y);
            return Control::Stop;
        }
        if t - last >= opts.sample_interval || t == 0.0 {
            diag.samples.push(WSample { t, w, y, state: x.to_vec() });
            last = t;
        }
        Control::Continue
    })?;
    if let Some(y) = blowup {
        return Err(Error::SingularApproach { y });
    }
    if diag.samples.last().map(|s| s.t) != Some(sol.t) {
        let (w, g2) = gap_and_grad(&sol.x, &mut grad);
        diag.samples.push(WSample { t: sol.t, w, y: w / g2, state: sol.x.clone() });
    }
    Ok((PhasePoint::from_lift(&sol.x), diag))
}
