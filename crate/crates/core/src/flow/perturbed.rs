//! Persistence of hyperbolic equilibria under small changes of the natural
//! frequencies and coupling matrix.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::equilibria::{enumerate_equilibria, EquilibriumKind};
use crate::linalg;
use crate::model::ModelParams;
use crate::quotient::{self, QuotientPoint};
use crate::{Error, Result, Subset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocatedFixedPoint {
    /// The unperturbed exemplar used as the Newton seed.
    pub seed: Subset,
    pub point: QuotientPoint,
    /// Eigenvalues of the quotient Jacobian with positive real part.
    pub unstable_dim: usize,
    /// Quotient distance from the seed.
    pub shift: f64,
    pub residual: f64,
}

/// Newton search for a zero of the generalized quotient field near every
/// non-maximal exemplar. The points of V^max are a normally hyperbolic
/// manifold rather than isolated zeros and are not searched for.
pub fn locate_fixed_points(params: &ModelParams, tol: f64) -> Result<Vec<LocatedFixedPoint>> {
    params.validate()?;
    let m = params.m;
    let f = |x: &[f64]| {
        let mut o = vec![0.0; m - 1];
        quotient::quotient_general_raw(x, params, &mut o);
        o
    };
    let jac = |x: &[f64]| linalg::jacobian_fd(f, x, 1e-6);
    let mut out = Vec::new();
    for rec in enumerate_equilibria(m)?.into_iter().filter(|r| r.kind != EquilibriumKind::SingularMax) {
        let seed = rec.quotient_point();
        let z = linalg::newton(f, jac, seed.coords(), tol, 50).ok_or(Error::NoSolution)?;
        let point = QuotientPoint::from_lift(&z);
        let unstable_dim = jac(&z).complex_eigenvalues().iter().filter(|c| c.re > 0.0).count();
        out.push(LocatedFixedPoint {
            seed: rec.subset,
            shift: quotient::quotient_distance(&point, &seed),
            residual: linalg::norm(&f(&z)),
            point,
            unstable_dim,
        });
    }
    Ok(out)
}
