//! Saddle connections `p_I → p_J` inside the template `Q^I`, `|I| = |J| + 1`.
//!
//! Inside Q^I the stable manifold of p_J is one-dimensional and p_I is the
//! only critical point above it, so the connection is traced by following
//! the two stable branches of p_J backward until they settle at p_I. The
//! backward run is robust because p_I attracts in reverse time within Q^I,
//! whereas a forward launch from p_I would have to hit a codimension-|J|
//! target. Traces are returned in forward time.

use alloc::vec::Vec;

use libm::sqrt;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{run, Direction, FlowOptions, LimitPoint, OrbitTrace, Sample, Space, Start, Terminal};
use crate::equilibria::{exemplar, EquilibriumKind, EquilibriumRecord, enumerate_equilibria};
use crate::linalg;
use crate::model::{self, wrap_signed, ModelParams, PhasePoint};
use crate::quotient;
use crate::{Error, Result, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeteroclinicOptions {
    pub flow: FlowOptions,
    /// Offset from p_J along the unit stable eigenvector.
    pub delta: f64,
    pub max_time: f64,
}

impl Default for HeteroclinicOptions {
    fn default() -> Self {
        HeteroclinicOptions { flow: FlowOptions::default(), delta: 1e-5, max_time: 500.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// Sign of the stable eigenvector used at p_J.
    pub sign: i8,
    /// Ambient trace in forward time, from near p_I to near p_J.
    pub trace: OrbitTrace,
    /// Diagonal distance from the first sample to p_I.
    pub alpha_distance: f64,
    /// Diagonal distance from the last sample to p_J.
    pub omega_distance: f64,
    /// Largest spread among the angles outside I over all samples.
    pub template_spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeteroclinicReport {
    pub source: EquilibriumRecord,
    pub target: EquilibriumRecord,
    /// Unit stable direction of p_J inside Q^I (ambient coordinates).
    pub stable_direction: Vec<f64>,
    pub branches: Vec<Branch>,
}

fn find_record(records: &[EquilibriumRecord], s: Subset) -> Result<EquilibriumRecord> {
    records
        .iter()
        .find(|r| r.subset == s && r.kind != EquilibriumKind::SingularMax)
        .cloned()
        .ok_or_else(|| Error::InvalidArgument(alloc::format!("{s} is not a non-maximal exemplar")))
}

/// Orthonormal basis of the tangent space of Q^I in ambient coordinates:
/// `e_i` for `i ∈ I` and the normalized indicator of the complement.
fn template_basis(m: usize, i: Subset) -> DMatrix<f64> {
    let comp = i.complement(m);
    let cols: Vec<usize> = i.iter().collect();
    let c = 1.0 / sqrt(comp.len() as f64);
    DMatrix::from_fn(m, cols.len() + 1, |r, k| {
        if k < cols.len() {
            if r == cols[k] { 1.0 } else { 0.0 }
        } else if comp.contains(r) {
            c
        } else {
            0.0
        }
    })
}

/// Spread of the angles outside `i` (they coincide on Q^I).
pub(crate) fn template_spread(theta: &[f64], i: Subset) -> f64 {
    let comp: Vec<usize> = i.complement(theta.len()).iter().collect();
    let base = theta[comp[0]];
    comp.iter().map(|&k| wrap_signed(theta[k] - base).abs()).fold(0.0, f64::max)
}

/// Finds both saddle connections from `p_I` to `p_J` (0-based subsets).
pub fn find_heteroclinic(i: Subset, j: Subset, m: usize, opts: &HeteroclinicOptions) -> Result<HeteroclinicReport> {
    if !j.is_subset_of(i) || i.len() != j.len() + 1 || 2 * i.len() >= m || i.span() > m {
        return Err(Error::InvalidArgument(alloc::format!("need J ⊂ I, |I| = |J| + 1 and |I| < m/2; got I = {i}, J = {j}, m = {m}")));
    }
    let records = enumerate_equilibria(m)?;
    let source = find_record(&records, i)?;
    let target = find_record(&records, j)?;

    let basis = template_basis(m, i);
    let pj = exemplar(m, j);
    let h = model::hessian(&pj);
    let restricted = basis.transpose() * &h * &basis;
    let (values, vectors) = linalg::symmetric_eigen(&restricted);
    if !(values[0] < -1e-9) || values.get(1).is_some_and(|&v| v < -1e-9) {
        return Err(Error::NoSolution);
    }
    let dir = &basis * vectors.column(0);
    let dir: Vec<f64> = dir.iter().copied().collect();

    let params = ModelParams::standard(m);
    let flow = FlowOptions { detect_convergence: true, high_fraction: 0.0, ..opts.flow };
    let mut branches = Vec::new();
    for sign in [1i8, -1] {
        let start: Vec<f64> = pj.angles().iter().zip(&dir).map(|(&a, &v)| a + f64::from(sign) * opts.delta * v).collect();
        let start = PhasePoint::from_lift(&start);
        let back = run(&Start::Ambient(start), opts.max_time, Direction::Backward, &params, &flow, true)?;
        let reached = match &back.terminal {
            Terminal::Converged(LimitPoint::Equilibrium(r)) => r.subset == i,
            _ => false,
        };
        if !reached {
            return Err(Error::NoConvergence { t: back.last().t });
        }
        let t_end = back.last().t;
        let samples: Vec<Sample> = back
            .samples
            .iter()
            .rev()
            .map(|s| Sample { t: t_end - s.t, ..s.clone() })
            .collect();
        let spread = samples.iter().map(|s| template_spread(&s.state, i)).fold(0.0, f64::max);
        let first = PhasePoint::from_lift(&samples[0].state);
        let last = PhasePoint::from_lift(&samples[samples.len() - 1].state);
        branches.push(Branch {
            sign,
            alpha_distance: quotient::diagonal_distance(&first, &source.exemplar()),
            omega_distance: quotient::diagonal_distance(&last, &pj),
            template_spread: spread,
            trace: OrbitTrace {
                space: Space::Ambient,
                m,
                samples,
                terminal: Terminal::Converged(LimitPoint::Equilibrium(target.clone())),
            },
        });
    }
    Ok(HeteroclinicReport { source, target, stable_direction: dir, branches })
}
