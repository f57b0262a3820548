//! Integration of the Kuramoto flow on 𝕋^m and on the quotient Q, with
//! limit detection.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::equilibria::EquilibriumRecord;
use crate::model::{self, ModelParams, PhasePoint};
use crate::ode::{self, Control, EndReason, FnField, OdeOptions, Reversed, VectorField};
use crate::quotient::{self, QuotientPoint};
use crate::{Error, Result};

pub mod auxiliary;
pub mod heteroclinic;
pub mod homotopy;
mod limits;
pub mod perturbed;
pub mod skew;

pub use auxiliary::{alpha_limit_retraction, RetractionOptions, WDiagnostics, WSample};
pub use heteroclinic::{find_heteroclinic, Branch, HeteroclinicOptions, HeteroclinicReport};
pub use homotopy::{homotopy_analysis, HomotopyField, HomotopyOptions, HomotopyReport};
pub use limits::{omega_limit, Matcher};
pub use perturbed::{locate_fixed_points, LocatedFixedPoint};
pub use skew::{skew_reduce, Partition, SkewField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Ambient,
    Quotient,
}

/// Initial condition, either on 𝕋^m or on Q.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    Ambient(PhasePoint),
    Quotient(QuotientPoint),
}

impl Start {
    pub fn m(&self) -> usize {
        match self {
            Start::Ambient(p) => p.m(),
            Start::Quotient(q) => q.m(),
        }
    }

    pub fn space(&self) -> Space {
        match self {
            Start::Ambient(_) => Space::Ambient,
            Start::Quotient(_) => Space::Quotient,
        }
    }

    fn state(&self) -> Vec<f64> {
        match self {
            Start::Ambient(p) => p.angles().to_vec(),
            Start::Quotient(q) => q.coords().to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub ode: OdeOptions,
    /// Minimum time between recorded samples; 0 records every step.
    pub sample_interval: f64,
    /// Stop once the state has settled at a known equilibrium (standard
    /// model only).
    pub detect_convergence: bool,
    pub field_tol: f64,
    pub snap_radius: f64,
    /// The convergence condition must hold over this much time.
    pub window: f64,
    /// Backward runs stop once `V ≥ m²/2 − ε` with `ε = fraction · m²/2`.
    pub high_fraction: f64,
    /// Time budget for [`omega_limit`].
    pub max_time: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            ode: OdeOptions::default(),
            sample_interval: 0.0,
            detect_convergence: true,
            field_tol: 1e-8,
            snap_radius: 1e-4,
            window: 0.5,
            high_fraction: 0.01,
            max_time: 1000.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    /// Angles in `[0, 2π)`, ambient or cube-face depending on the trace.
    pub state: Vec<f64>,
    pub potential: f64,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitPoint {
    Equilibrium(EquilibriumRecord),
    VMax(PhasePoint),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Terminal {
    Converged(LimitPoint),
    MaxTime,
    /// Backward run reached the high-potential cap.
    HighPotential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub space: Space,
    pub m: usize,
    pub samples: Vec<Sample>,
    pub terminal: Terminal,
}

impl OrbitTrace {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("traces are never empty")
    }

    /// Sample state as an ambient point (lifting quotient states).
    pub fn phase_point(&self, sample: &Sample) -> PhasePoint {
        match self.space {
            Space::Ambient => PhasePoint::from_lift(&sample.state),
            Space::Quotient => quotient::lift(&QuotientPoint::from_lift(&sample.state)),
        }
    }
}

fn ambient_of(space: Space, x: &[f64]) -> Vec<f64> {
    match space {
        Space::Ambient => x.to_vec(),
        Space::Quotient => {
            let mut v = x.to_vec();
            v.push(0.0);
            v
        }
    }
}

/// Builds the field for a space and parameter set.
pub(crate) fn kuramoto_field(space: Space, params: &ModelParams) -> FnField<impl Fn(&[f64], &mut [f64]) + '_> {
    let standard = params.is_standard();
    let dim = match space {
        Space::Ambient => params.m,
        Space::Quotient => params.m - 1,
    };
    FnField::new(dim, move |x: &[f64], out: &mut [f64]| match (space, standard) {
        (Space::Ambient, true) => model::field_raw(x, out),
        (Space::Ambient, false) => model::general_field_raw(x, params, out),
        (Space::Quotient, true) => quotient::quotient_field_raw(x, out),
        (Space::Quotient, false) => quotient::quotient_general_raw(x, params, out),
    })
}

/// Real-axis stability limit of Dormand–Prince 5(4), slightly rounded down.
const DP_STABILITY: f64 = 3.0;

/// Caps the step so that `h·ρ(J)` stays inside the stability region, with
/// `ρ(J) ≤ 2 max_j Σ_k |a_jk|` by Gershgorin. Without the cap the controller
/// grows the step near an attracting equilibrium until the state oscillates
/// at tolerance level, which for angles near 2π is `rtol · 2π`.
pub(crate) fn stable_ode(ode: &OdeOptions, params: &ModelParams) -> OdeOptions {
    let m = params.m;
    let row = (0..m).map(|j| (0..m).map(|k| params.a(j, k).abs()).sum::<f64>()).fold(0.0, f64::max);
    let rho = 2.0 * row;
    OdeOptions { h_max: if rho > 0.0 { ode.h_max.min(DP_STABILITY / rho) } else { ode.h_max }, ..*ode }
}

/// Integrates the Kuramoto flow (standard or generalized) for up to
/// `t_span` time units.
///
/// Forward runs with `opts.detect_convergence` stop at a known equilibrium.
/// Backward runs stop when the potential gap drops below the high-potential
/// cap.
pub fn integrate(start: &Start, t_span: f64, direction: Direction, params: &ModelParams, opts: &FlowOptions) -> Result<OrbitTrace> {
    run(start, t_span, direction, params, opts, true)
}

pub(crate) fn run(
    start: &Start,
    t_span: f64,
    direction: Direction,
    params: &ModelParams,
    opts: &FlowOptions,
    record: bool,
) -> Result<OrbitTrace> {
    if !(t_span > 0.0) {
        return Err(Error::InvalidArgument("t_span must be positive".into()));
    }
    params.validate()?;
    let m = start.m();
    if params.m != m {
        return Err(Error::DimensionMismatch { expected: params.m, got: m });
    }
    let space = start.space();
    let field = kuramoto_field(space, params);
    let matcher = (opts.detect_convergence && params.is_standard()).then(|| Matcher::new(m)).transpose()?;
    let cap = 0.5 * (m * m) as f64 * opts.high_fraction;

    let mut samples = Vec::new();
    let mut terminal = Terminal::MaxTime;
    let mut pending: Option<(f64, Option<usize>)> = None;
    let mut fbuf = vec![0.0; field.dim()];
    let mut last_sample = f64::NEG_INFINITY;

    let mut observe = |t: f64, x: &[f64]| -> Control {
        let amb = ambient_of(space, x);
        if record && (t - last_sample >= opts.sample_interval || t == 0.0) {
            samples.push(Sample {
                t,
                state: x.iter().map(|&a| model::wrap_angle(a)).collect(),
                potential: model::potential_raw(&amb),
                r: model::modulus_raw(&amb),
            });
            last_sample = t;
        }
        if direction == Direction::Backward && model::gap_raw(&amb) <= cap {
            terminal = Terminal::HighPotential;
            return Control::Stop;
        }
        if let Some(mt) = &matcher {
            field.eval(x, &mut fbuf);
            let settled = crate::linalg::norm(&fbuf) < opts.field_tol;
            let hit = if settled { mt.nearest(&amb, opts.snap_radius) } else { None };
            match (hit, pending) {
                (Some(key), Some((t0, k0))) if key == k0 => {
                    if t - t0 >= opts.window {
                        terminal = Terminal::Converged(mt.limit_point(key, &amb));
                        return Control::Stop;
                    }
                }
                (Some(key), _) => pending = Some((t, key)),
                (None, _) => pending = None,
            }
        }
        Control::Continue
    };

    let x0 = start.state();
    let ode_opts = stable_ode(&opts.ode, params);
    let sol = match direction {
        Direction::Forward => ode::solve(&field, &x0, t_span, &ode_opts, &mut observe)?,
        Direction::Backward => ode::solve(&Reversed(&field), &x0, t_span, &ode_opts, &mut observe)?,
    };
    if samples.last().map(|s| s.t) != Some(sol.t) {
        let amb = ambient_of(space, &sol.x);
        samples.push(Sample {
            t: sol.t,
            state: sol.x.iter().map(|&a| model::wrap_angle(a)).collect(),
            potential: model::potential_raw(&amb),
            r: model::modulus_raw(&amb),
        });
    }
    if sol.reason == EndReason::MaxSteps {
        terminal = Terminal::MaxTime;
    }
    Ok(OrbitTrace { space, m, samples, terminal })
}

/// Integrates an arbitrary field and returns every accepted step.
pub fn integrate_field<F: VectorField + ?Sized>(field: &F, x0: &[f64], t_span: f64, opts: &OdeOptions) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut out = Vec::new();
    ode::solve(field, x0, t_span, opts, |t, x| {
        out.push((t, x.to_vec()));
        Control::Continue
    })?;
    Ok(out)
}

/// The product source–sink field `θ̇_k = −sin θ_k` on 𝕋^d.
pub fn perfect_morse(d: usize) -> FnField<impl Fn(&[f64], &mut [f64])> {
    FnField::new(d, model::perfect_morse_field)
}
