//! Where the stable manifolds of the saddles meet V^max.
//!
//! The imprint of a saddle `p_I` is the closure of the α-limits of its
//! stable manifold. It is the slice of V^max on which all angles in `I`
//! coincide: a sphere when `m = 2|I| + 1`, a sphere with antipodal pinches
//! when `m = 2|I| + 2`, all of V^max when `|I| = 1`.

mod blowup;
mod normal;
mod winding;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use libm::{cos, sin};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::equilibria::{exemplar, EquilibriumKind, enumerate_equilibria};
use crate::flow::auxiliary::{retract_ambient, RetractionOptions};
use crate::flow::{run, Direction, FlowOptions, Start, Terminal};
use crate::linalg;
use crate::model::{self, angle_distance, ModelParams, PhasePoint};
use crate::{Error, Result, Subset};

pub use blowup::{blowup_check, BlowupOptions, BlowupReport, TangentSample};
pub use normal::{normal_circle_experiment, CircleRow, NormalCircleOptions, NormalCircleTable};
pub use winding::{template_circle, winding_number};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ImprintKind {
    /// A `dim`-sphere (m odd, `|I| = (m − 1)/2`).
    Sphere { dim: usize },
    /// A `dim`-sphere with `pinches` pairs of points identified (m even,
    /// `|I| = m/2 − 1`).
    PinchedSphere { dim: usize, pinches: usize },
    /// `|I| = 1`.
    AllOfVmax,
    /// Any other saddle: the slice `θ_i = θ_j` for `i, j ∈ I`.
    Slice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImprintSpec {
    pub m: usize,
    /// 0-based indices of the saddle `p_I`.
    pub subset: Subset,
    pub expected_kind: ImprintKind,
}

impl ImprintSpec {
    pub fn new(m: usize, subset: Subset) -> Result<Self> {
        let k = subset.len();
        if k == 0 || 2 * k >= m || subset.span() > m {
            return Err(Error::InvalidArgument(alloc::format!("imprints need 1 <= |I| < m/2 within m = {m}; got {subset}")));
        }
        let expected_kind = if m % 2 == 0 && 2 * k + 2 == m {
            ImprintKind::PinchedSphere { dim: k, pinches: k + 2 }
        } else if k == 1 {
            ImprintKind::AllOfVmax
        } else if 2 * k + 1 == m {
            ImprintKind::Sphere { dim: k - 1 }
        } else {
            ImprintKind::Slice
        };
        Ok(ImprintSpec { m, subset, expected_kind })
    }
}

/// All angles in `I` agree within `tol` and the centroid modulus is below
/// `tol`.
pub fn imprint_membership(spec: &ImprintSpec, p: &PhasePoint, tol: f64) -> bool {
    let a = p.angles();
    let mut idx = spec.subset.iter();
    let Some(first) = idx.next() else { return false };
    idx.all(|i| angle_distance(a[i], a[first]) <= tol) && model::centroid(p).r < tol
}

/// Random points of the imprint: random seeds projected onto the equal-angle
/// slice of V^max by minimum-norm Gauss–Newton. Seeds that fail are
/// replaced.
pub fn imprint_sample<R: Rng + ?Sized>(spec: &ImprintSpec, n: usize, rng: &mut R) -> Result<Vec<PhasePoint>> {
    let m = spec.m;
    // Unknowns: the shared angle of I, then one angle per index outside I.
    let free: Vec<usize> = spec.subset.complement(m).iter().collect();
    let k = spec.subset.len() as f64;
    let assemble = |x: &[f64]| {
        let mut theta = vec![x[0]; m];
        for (&j, &v) in free.iter().zip(&x[1..]) {
            theta[j] = v;
        }
        theta
    };
    let f = |x: &[f64]| {
        let (c, s) = model::cos_sin_sums(&assemble(x));
        vec![c, s]
    };
    let jac = |x: &[f64]| {
        DMatrix::from_fn(2, x.len(), |r, j| {
            let w = if j == 0 { k } else { 1.0 };
            if r == 0 { -w * sin(x[j]) } else { w * cos(x[j]) }
        })
    };
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        if tries > 100 * n + 100 {
            return Err(Error::NoSolution);
        }
        let seed: Vec<f64> = (0..=free.len()).map(|_| rng.random::<f64>() * TAU).collect();
        if let Some(x) = linalg::gauss_newton(f, jac, &seed, 1e-13, 60) {
            let p = PhasePoint::new(assemble(&x))?;
            if imprint_membership(spec, &p, 1e-10) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Singular points of V^max that lie in the imprint (m even): the
/// half-and-half configurations with `I` on one side, one per unordered
/// split. Their number is `C(m − |I|, m/2 − |I|)`.
pub fn pinch_points(spec: &ImprintSpec) -> Vec<PhasePoint> {
    let m = spec.m;
    if m % 2 == 1 {
        return Vec::new();
    }
    let first = spec.subset.iter().next().expect("non-empty");
    Subset::all_of_size(m, m / 2)
        .filter(|j| spec.subset.is_subset_of(*j) && j.contains(first))
        .map(|j| exemplar(m, j))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaLimitOptions {
    /// Distance from the saddle along a unit stable direction.
    pub delta: f64,
    /// Backward Kuramoto run until the potential gap falls below
    /// `flow.high_fraction · m²/2`, then retraction along W.
    pub flow: FlowOptions,
    pub max_time: f64,
    pub retraction: RetractionOptions,
}

impl Default for AlphaLimitOptions {
    fn default() -> Self {
        AlphaLimitOptions {
            delta: 1e-5,
            flow: FlowOptions { detect_convergence: false, ..FlowOptions::default() },
            max_time: 500.0,
            retraction: RetractionOptions::default(),
        }
    }
}

/// α-limits of `n` random points on the stable manifold of `p_I` near the
/// saddle, i.e. samples of the imprint obtained dynamically.
pub fn stable_manifold_alpha_limits<R: Rng + ?Sized>(
    spec: &ImprintSpec,
    n: usize,
    opts: &AlphaLimitOptions,
    rng: &mut R,
) -> Result<Vec<PhasePoint>> {
    let m = spec.m;
    let record = enumerate_equilibria(m)?
        .into_iter()
        .find(|r| r.subset == spec.subset && r.kind != EquilibriumKind::SingularMax)
        .ok_or(Error::NoSolution)?;
    let stable: Vec<&Vec<f64>> = record.eigenpairs.iter().filter(|e| e.value < -1e-9).map(|e| &e.vector).collect();
    if stable.is_empty() {
        return Err(Error::NoSolution);
    }
    let base = record.exemplar();
    let params = ModelParams::standard(m);
    let epsilon = 0.5 * (m * m) as f64 * opts.flow.high_fraction;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        // Uniform direction on the unit sphere of the stable eigenspace.
        let coef: Vec<f64> = (0..stable.len()).map(|_| rng.sample(StandardNormal)).collect();
        let norm = linalg::norm(&coef);
        let mut theta = base.angles().to_vec();
        for (c, v) in coef.iter().zip(&stable) {
            for (t, x) in theta.iter_mut().zip(v.iter()) {
                *t += opts.delta * c / norm * x;
            }
        }
        let start = Start::Ambient(PhasePoint::from_lift(&theta));
        let back = run(&start, opts.max_time, Direction::Backward, &params, &opts.flow, false)?;
        if back.terminal != Terminal::HighPotential {
            return Err(Error::NoConvergence { t: back.last().t });
        }
        let (p, _) = retract_ambient(&back.last().state, epsilon * 1.000_001, &opts.retraction)?;
        out.push(p);
    }
    Ok(out)
}
