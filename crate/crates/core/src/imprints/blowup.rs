use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use libm::{cos, sin};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::model::{self, PhasePoint};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupOptions {
    /// Largest arc parameter; the secants use `t0, t0/2, t0/4`. Smaller
    /// values lose accuracy: the quadratic balance `Σa² = Σb²` is read off
    /// a residual of size `t²`.
    pub t0: f64,
    pub tol: f64,
}

impl Default for BlowupOptions {
    fn default() -> Self {
        BlowupOptions { t0: 1e-2, tol: 1e-14 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentSample {
    /// The ray direction the curve was built from.
    pub ray: Vec<f64>,
    /// Unit tangent at the singularity, orthogonal to the diagonal.
    pub tangent: Vec<f64>,
    pub sum_a: f64,
    pub sum_b: f64,
    pub norm2_a: f64,
    pub norm2_b: f64,
    /// Residual of writing each sorted half as a nonnegative combination of
    /// the cone generators (m = 6 only).
    pub cone_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub m: usize,
    /// `(−π/2, …, −π/2, π/2, …, π/2)`.
    pub singularity: PhasePoint,
    pub samples: Vec<TangentSample>,
    /// Largest `|Σa|`, `|Σb|`.
    pub max_sum: f64,
    /// Largest deviation of `Σa²`, `Σb²` from ½.
    pub max_norm_error: f64,
    pub max_cone_residual: Option<f64>,
}

/// Tangent directions of V^max at its canonical singular point.
///
/// Each sample is a curve `t ↦ π(p + t r)`, the minimum-norm projection of a
/// random ray onto V^max. Its one-sided tangent comes from secants at three
/// geometrically shrinking `t`, combined by Richardson extrapolation.
pub fn blowup_check<R: Rng + ?Sized>(m: usize, n: usize, opts: &BlowupOptions, rng: &mut R) -> Result<BlowupReport> {
    if m < 4 || m % 2 == 1 {
        return Err(Error::InvalidArgument(alloc::format!("the singular blowup needs an even m >= 4; got {m}")));
    }
    let d = m / 2;
    let p: Vec<f64> = (0..m).map(|i| if i < d { -FRAC_PI_2 } else { FRAC_PI_2 }).collect();
    let f = |x: &[f64]| {
        let (c, s) = model::cos_sin_sums(x);
        vec![c, s]
    };
    let jac = |x: &[f64]| DMatrix::from_fn(2, x.len(), |r, j| if r == 0 { -sin(x[j]) } else { cos(x[j]) });

    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let mut ray: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        center(&mut ray);
        let nr = linalg::norm(&ray);
        ray.iter_mut().for_each(|x| *x /= nr);

        let secant = |t: f64| -> Result<Vec<f64>> {
            let x0: Vec<f64> = p.iter().zip(&ray).map(|(a, r)| a + t * r).collect();
            let x = linalg::gauss_newton(f, jac, &x0, opts.tol, 200).ok_or_else(|| Error::Tangent(alloc::format!("projection failed at t = {t}")))?;
            let mut s: Vec<f64> = x.iter().zip(&p).map(|(a, b)| (a - b) / t).collect();
            center(&mut s);
            Ok(s)
        };
        let (s1, s2, s4) = (secant(opts.t0)?, secant(opts.t0 / 2.0)?, secant(opts.t0 / 4.0)?);
        // Two rounds of Richardson for an expansion in powers of t.
        let mut tangent: Vec<f64> = (0..m).map(|i| (8.0 * s4[i] - 6.0 * s2[i] + s1[i]) / 3.0).collect();
        let nt = linalg::norm(&tangent);
        if !(nt > 1e-8) {
            return Err(Error::Tangent("degenerate secants".into()));
        }
        tangent.iter_mut().for_each(|x| *x /= nt);
        let (a, b) = tangent.split_at(d);
        let cone_residual = (m == 6).then(|| cone_residual(a).max(cone_residual(b)));
        samples.push(TangentSample {
            sum_a: a.iter().sum(),
            sum_b: b.iter().sum(),
            norm2_a: linalg::dot(a, a),
            norm2_b: linalg::dot(b, b),
            cone_residual,
            tangent: tangent.clone(),
            ray,
        });
    }
    let max_sum = samples.iter().map(|s| s.sum_a.abs().max(s.sum_b.abs())).fold(0.0, f64::max);
    let max_norm_error = samples.iter().map(|s| (s.norm2_a - 0.5).abs().max((s.norm2_b - 0.5).abs())).fold(0.0, f64::max);
    let max_cone_residual = (m == 6).then(|| samples.iter().filter_map(|s| s.cone_residual).fold(0.0, f64::max));
    Ok(BlowupReport { m, singularity: PhasePoint::new(p)?, samples, max_sum, max_norm_error, max_cone_residual })
}

fn center(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

/// Column `j` of the cone matrix for one half of size `d`: `−(d − j)` in
/// rows `0..=j`, `j + 1` below (0-based). The cone is the set of
/// nondecreasing zero-sum vectors, with coefficients `(a_{j+1} − a_j)/d`.
pub fn cone_generator(d: usize, j: usize) -> Vec<f64> {
    (0..d).map(|i| if i <= j { -((d - 1 - j) as f64) } else { (j + 1) as f64 }).collect()
}

/// Distance from the sorted half to its reconstruction from the cone
/// generators with clamped nonnegative coefficients.
fn cone_residual(half: &[f64]) -> f64 {
    let d = half.len();
    let mut a = half.to_vec();
    a.sort_by(f64::total_cmp);
    let mut rec = vec![0.0; d];
    for j in 0..d - 1 {
        let lambda = ((a[j + 1] - a[j]) / d as f64).max(0.0);
        for (r, g) in rec.iter_mut().zip(cone_generator(d, j)) {
            *r += lambda * g;
        }
    }
    let diff: Vec<f64> = a.iter().zip(&rec).map(|(x, y)| x - y).collect();
    linalg::norm(&diff)
}
