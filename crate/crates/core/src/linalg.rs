//! Small dense linear-algebra helpers on top of nalgebra.

use alloc::vec::Vec;

use libm::sqrt;
use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending, vectors
/// as matching columns.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), order.len(), |r, c| e.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Central-difference Jacobian of `f: ℝⁿ → ℝᵏ`.
pub fn jacobian_fd<F>(f: F, x: &[f64], h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let k = f(x).len();
    let mut jac = DMatrix::zeros(k, x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        xp[j] = x[j] + h;
        let fp = f(&xp);
        xp[j] = x[j] - h;
        let fm = f(&xp);
        xp[j] = x[j];
        for i in 0..k {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Orthonormal basis of the column space of `a`, dropping directions whose
/// singular value is below `tol` times the largest.
pub fn column_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > tol * smax).collect();
    DMatrix::from_fn(a.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Largest principal angle sine between two subspaces given by orthonormal
/// bases of equal dimension: `‖(I − B Bᵀ) A‖₂`.
pub fn principal_angle_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let resid = a - b * (b.transpose() * a);
    resid.clone().svd(false, false).singular_values.max()
}

/// Invariant subspace of the eigenvalues with positive real part, via the
/// Newton iteration for the matrix sign function. Fails if some eigenvalue
/// lies on (or numerically near) the imaginary axis.
pub fn positive_invariant_subspace(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut s = a.clone();
    for _ in 0..100 {
        let inv = s.clone().try_inverse().ok_or(Error::NoSolution)?;
        let next = (&s + inv) * 0.5;
        let delta = (&next - &s).norm();
        s = next;
        if delta <= 1e-14 * s.norm() {
            let proj = (DMatrix::identity(n, n) + &s) * 0.5;
            return Ok(column_space(&proj, 1e-6));
        }
    }
    Err(Error::NoSolution)
}

/// Minimum-norm solution of `J dx = r` (least squares when inconsistent).
pub fn min_norm_solve(j: &DMatrix<f64>, r: &DVector<f64>) -> DVector<f64> {
    let svd = j.clone().svd(true, true);
    let smax = svd.singular_values.max();
    svd.solve(r, 1e-13 * smax.max(1e-300)).unwrap_or_else(|_| DVector::zeros(j.ncols()))
}

pub fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt on two vectors. Returns `None` if they are dependent to `tol`.
pub fn orthonormal_pair(a: &[f64], b: &[f64], tol: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let na = norm(a);
    if na <= tol {
        return None;
    }
    let e1: Vec<f64> = a.iter().map(|x| x / na).collect();
    let p = dot(&e1, b);
    let r: Vec<f64> = b.iter().zip(&e1).map(|(y, e)| y - p * e).collect();
    let nr = norm(&r);
    if nr <= tol {
        return None;
    }
    Some((e1, r.iter().map(|x| x / nr).collect()))
}

/// Damped Newton iteration for a square system. Returns the root once
/// `‖f‖ < tol`, or `None` if the iteration stalls.
pub fn newton<F, J>(f: F, jac: J, x0: &[f64], tol: f64, max_iter: usize) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> DMatrix<f64>,
{
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut nf = norm(&fx);
    for _ in 0..max_iter {
        if nf < tol {
            return Some(x);
        }
        let step = jac(&x).lu().solve(&DVector::from_column_slice(&fx))?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a - lambda * d).collect();
            let ft = f(&trial);
            let nt = norm(&ft);
            if nt < nf || lambda < 1e-6 {
                x = trial;
                fx = ft;
                nf = nt;
                break;
            }
            lambda *= 0.5;
        }
    }
    (nf < tol).then_some(x)
}

/// Gauss–Newton with minimum-norm steps for underdetermined systems
/// `f(x) = 0`. Each step moves as little as possible, so the result is a
/// nearby point of the solution set.
pub fn gauss_newton<F, J>(f: F, jac: J, x0: &[f64], tol: f64, max_iter: usize) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> DMatrix<f64>,
{
    let mut x = x0.to_vec();
    for _ in 0..max_iter {
        let fx = f(&x);
        if norm(&fx) < tol {
            return Some(x);
        }
        let step = min_norm_solve(&jac(&x), &DVector::from_column_slice(&fx));
        for (a, d) in x.iter_mut().zip(step.iter()) {
            *a -= d;
        }
    }
    (norm(&f(&x)) < tol).then_some(x)
}
