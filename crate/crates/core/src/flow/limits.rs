use alloc::vec::Vec;

use super::{run, Direction, FlowOptions, LimitPoint, Start, Terminal};
use crate::equilibria::{enumerate_equilibria, EquilibriumRecord};
use crate::model::{self, ModelParams, PhasePoint};
use crate::quotient::{self, QuotientPoint};
use crate::{Error, Result};

/// Classifies states against the enumerated equilibria and V^max.
#[derive(Clone, Debug)]
pub struct Matcher {
    records: Vec<EquilibriumRecord>,
    exemplars: Vec<PhasePoint>,
}

/// States with centroid modulus below this count as points of V^max.
const VMAX_R: f64 = 1e-6;

impl Matcher {
    pub fn new(m: usize) -> Result<Self> {
        let records = enumerate_equilibria(m)?;
        let exemplars = records.iter().map(|r| r.exemplar()).collect();
        Ok(Matcher { records, exemplars })
    }

    pub fn records(&self) -> &[EquilibriumRecord] {
        &self.records
    }

    /// Key of the nearest equilibrium within `radius` (diagonal-invariant
    /// distance): `Some(Some(i))` for a record, `Some(None)` for V^max.
    pub fn nearest(&self, theta: &[f64], radius: f64) -> Option<Option<usize>> {
        if model::modulus_raw(theta) < VMAX_R {
            return Some(None);
        }
        let p = PhasePoint::from_lift(theta);
        self.exemplars
            .iter()
            .enumerate()
            .map(|(i, e)| (i, quotient::diagonal_distance(&p, e)))
            .filter(|&(_, d)| d < radius)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| Some(i))
    }

    pub(crate) fn limit_point(&self, key: Option<usize>, theta: &[f64]) -> LimitPoint {
        match key {
            Some(i) => LimitPoint::Equilibrium(self.records[i].clone()),
            None => LimitPoint::VMax(PhasePoint::from_lift(theta)),
        }
    }
}

/// Integrates forward until the orbit settles at a known equilibrium or on
/// V^max. Running out of time is an error, never a silent snap.
pub fn omega_limit(start: &QuotientPoint, params: &ModelParams, opts: &FlowOptions) -> Result<LimitPoint> {
    if !params.is_standard() {
        return Err(Error::InvalidArgument("omega_limit classifies against the standard model only".into()));
    }
    let opts = FlowOptions { detect_convergence: true, ..*opts };
    let trace = run(&Start::Quotient(start.clone()), opts.max_time, Direction::Forward, params, &opts, false)?;
    match trace.terminal {
        Terminal::Converged(limit) => Ok(limit),
        _ => Err(Error::NoConvergence { t: trace.last().t }),
    }
}
