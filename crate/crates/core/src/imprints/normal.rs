use alloc::vec::Vec;
use core::f64::consts::TAU;

use libm::{cos, sin};
use serde::{Deserialize, Serialize};

use crate::cells::{normal_frame, vmax_membership};
use crate::equilibria::{enumerate_equilibria, EquilibriumKind};
use crate::flow::auxiliary::{retract_ambient, RetractionOptions};
use crate::flow::{kuramoto_field, stable_ode, Space};
use crate::linalg;
use crate::model::{self, ModelParams, PhasePoint};
use crate::ode::{self, Control, OdeOptions};
use crate::quotient::diagonal_distance;
use crate::{Error, Result, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalCircleOptions {
    pub radius: f64,
    pub n: usize,
    /// Potential level where forward orbits are recorded; `None` means
    /// `m − 2`.
    pub crossing_level: Option<f64>,
    pub max_time: f64,
    /// Gramian determinant below which the normal frame counts as
    /// degenerate.
    pub frame_tol: f64,
    pub ode: OdeOptions,
    pub retraction: RetractionOptions,
}

impl Default for NormalCircleOptions {
    fn default() -> Self {
        NormalCircleOptions {
            radius: 0.01,
            n: 360,
            crossing_level: None,
            max_time: 500.0,
            frame_tol: 1e-6,
            ode: OdeOptions::default(),
            retraction: RetractionOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleRow {
    pub phi: f64,
    pub start: PhasePoint,
    /// First point of the forward orbit at the crossing level, if reached.
    pub crossing: Option<PhasePoint>,
    pub crossing_time: Option<f64>,
    /// Diagonal distance from the crossing to each index-1 saddle.
    pub saddle_distances: Vec<f64>,
    /// α-limit of the start along W.
    pub alpha_limit: PhasePoint,
    /// Diagonal distance from the α-limit to the base point.
    pub alpha_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalCircleTable {
    pub base: PhasePoint,
    pub radius: f64,
    pub crossing_level: f64,
    /// Index-1 saddles, in the column order of `saddle_distances`.
    pub saddles: Vec<Subset>,
    pub rows: Vec<CircleRow>,
}

/// Follows the orbits through a small circle normal to V^max at `base`.
///
/// Each start point goes forward to the level `V = crossing_level`, where
/// its distances to the index-1 saddles are recorded, and backward along W
/// to its α-limit on V^max.
pub fn normal_circle_experiment(base: &PhasePoint, opts: &NormalCircleOptions) -> Result<NormalCircleTable> {
    let m = base.m();
    if !vmax_membership(base, 1e-8) {
        return Err(Error::InvalidArgument("the base point must lie on V^max".into()));
    }
    if !(opts.radius > 0.0) || opts.n == 0 {
        return Err(Error::InvalidArgument("need radius > 0 and n > 0".into()));
    }
    let frame = normal_frame(base, opts.frame_tol);
    if !frame.independent {
        return Err(Error::DegenerateFrame { det: frame.gram_det() });
    }
    let (n1, n2) = linalg::orthonormal_pair(&frame.cos, &frame.sin, 1e-12).ok_or(Error::DegenerateFrame { det: frame.gram_det() })?;
    let level = opts.crossing_level.unwrap_or(m as f64 - 2.0);
    let saddles: Vec<_> = enumerate_equilibria(m)?.into_iter().filter(|r| r.kind == EquilibriumKind::Saddle && r.index == 1).collect();
    let params = ModelParams::standard(m);
    let field = kuramoto_field(Space::Ambient, &params);
    let ode_opts = stable_ode(&opts.ode, &params);

    let mut rows = Vec::with_capacity(opts.n);
    for k in 0..opts.n {
        let phi = TAU * k as f64 / opts.n as f64;
        let (c, s) = (cos(phi), sin(phi));
        let x0: Vec<f64> = base.angles().iter().zip(n1.iter().zip(&n2)).map(|(&b, (&u, &v))| b + opts.radius * (c * u + s * v)).collect();

        let mut prev = (0.0, x0.clone());
        let mut hit: Option<(f64, Vec<f64>)> = None;
        ode::solve(&field, &x0, opts.max_time, &ode_opts, |t, x| {
            if t > 0.0 && model::potential_raw(x) <= level {
                let (t0, ref xp) = prev;
                // Bisect inside the accepted step.
                let (mut lo, mut hi) = (0.0, t - t0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if model::potential_raw(&ode::single_step(&field, xp, mid)) > level {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hit = Some((t0 + hi, ode::single_step(&field, xp, hi)));
                return Control::Stop;
            }
            prev = (t, x.to_vec());
            Control::Continue
        })?;
        let crossing = hit.as_ref().map(|(_, x)| PhasePoint::from_lift(x));
        let saddle_distances = match &crossing {
            Some(p) => saddles.iter().map(|r| diagonal_distance(p, &r.exemplar())).collect(),
            None => Vec::new(),
        };
        let (alpha_limit, _) = retract_ambient(&x0, f64::INFINITY, &opts.retraction)?;
        rows.push(CircleRow {
            phi,
            start: PhasePoint::from_lift(&x0),
            crossing_time: hit.map(|(t, _)| t),
            crossing,
            saddle_distances,
            alpha_distance: diagonal_distance(&alpha_limit, base),
            alpha_limit,
        });
    }
    Ok(NormalCircleTable { base: base.clone(), radius: opts.radius, crossing_level: level, saddles: saddles.iter().map(|r| r.subset).collect(), rows })
}
