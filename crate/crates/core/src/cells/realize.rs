use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use libm::{cos, sin};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::sentence::Sentence;
use crate::linalg;
use crate::model::{self, PhasePoint};
use crate::{Error, Result};

/// Margin required between consecutive word angles.
pub const ORDER_MARGIN: f64 = 1e-6;

/// A point in the open cell of `s`, with oscillator 0 at angle 0.
///
/// Word angles in cyclic order with weights equal to the word sizes and zero
/// weighted sum are the edge directions of a convex polygon with those side
/// lengths. The polygon is inscribed in a circle (radius found by bisection)
/// and its edge directions are then polished by Gauss–Newton on the centroid.
pub fn realize_cell(s: &Sentence) -> Result<PhasePoint> {
    if !s.is_valid() {
        return Err(Error::InvalidSentence(alloc::format!("{s} is not valid")));
    }
    let words = s.words();
    let sizes: Vec<f64> = words.iter().map(|v| v.len() as f64).collect();
    let seed = if sizes.len() == 2 { alloc::vec![PI] } else { inscribed_directions(&sizes) };
    let f = |phi: &[f64]| {
        let (mut c, mut sn) = (sizes[0], 0.0);
        for (n, &p) in sizes[1..].iter().zip(phi) {
            c += n * cos(p);
            sn += n * sin(p);
        }
        alloc::vec![c, sn]
    };
    let jac = |phi: &[f64]| {
        DMatrix::from_fn(2, phi.len(), |r, j| if r == 0 { -sizes[j + 1] * sin(phi[j]) } else { sizes[j + 1] * cos(phi[j]) })
    };
    let phi = linalg::gauss_newton(f, jac, &seed, 1e-14, 50).unwrap_or(seed);
    let mut last = 0.0;
    let ordered = phi.iter().all(|&p| {
        let ok = p - last > ORDER_MARGIN;
        last = p;
        ok
    }) && TAU - last > ORDER_MARGIN;
    let residual = f(&phi);
    if !ordered || libm::hypot(residual[0], residual[1]) > 1e-10 {
        return Err(Error::NoSolution);
    }
    let mut theta = alloc::vec![0.0; s.m()];
    for (word, p) in words.iter().zip(core::iter::once(0.0).chain(phi.iter().copied())) {
        for &sym in word {
            theta[sym as usize] = p;
        }
    }
    PhasePoint::new(theta)
}

/// Edge directions, relative to the first edge, of the cyclic polygon with
/// the given side lengths. Needs at least three sides, each shorter than
/// half the perimeter.
fn inscribed_directions(sides: &[f64]) -> Vec<f64> {
    let (big, wmax) = sides.iter().copied().enumerate().fold((0, 0.0), |acc, (i, w)| if w > acc.1 { (i, w) } else { acc });
    let half = |w: f64, r: f64| 2.0 * libm::asin((w / (2.0 * r)).min(1.0));
    let others = |r: f64| sides.iter().enumerate().filter(|&(i, _)| i != big).map(|(_, &w)| half(w, r)).sum::<f64>();
    let r0 = wmax / 2.0;
    // The center lies inside the polygon iff the arcs still cover the
    // circle when the longest side is a diameter.
    let inside = others(r0) + PI >= TAU;
    let g = |r: f64| if inside { others(r) + half(wmax, r) - TAU } else { others(r) - half(wmax, r) };
    let (mut lo, mut hi) = (r0, sides.iter().sum::<f64>());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // g decreases in r when the center is inside and increases otherwise.
        if (g(mid) > 0.0) == inside {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let mut central: Vec<f64> = sides.iter().map(|&w| half(w, r)).collect();
    central[big] = TAU - others(r);
    let mut alpha = 0.0;
    let mut dirs = Vec::with_capacity(sides.len());
    for &c in &central {
        dirs.push(alpha + 0.5 * c);
        alpha += c;
    }
    dirs[1..].iter().map(|d| d - dirs[0]).collect()
}

pub fn vmax_membership(p: &PhasePoint, tol: f64) -> bool {
    model::centroid(p).r < tol
}

/// The normal frame `(cos θ_i)_i, (sin θ_i)_i` of `V^max` and its Gramian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFrame {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub gram: [[f64; 2]; 2],
    pub independent: bool,
}

impl NormalFrame {
    pub fn gram_det(&self) -> f64 {
        self.gram[0][0] * self.gram[1][1] - self.gram[0][1] * self.gram[1][0]
    }
}

/// Independence means a Gramian determinant above `tol`; it fails exactly
/// near the singular points.
pub fn normal_frame(p: &PhasePoint, tol: f64) -> NormalFrame {
    let cos: Vec<f64> = p.angles().iter().map(|&t| libm::cos(t)).collect();
    let sin: Vec<f64> = p.angles().iter().map(|&t| libm::sin(t)).collect();
    let cc = linalg::dot(&cos, &cos);
    let cs = linalg::dot(&cos, &sin);
    let ss = linalg::dot(&sin, &sin);
    let gram = [[cc, cs], [cs, ss]];
    let det = cc * ss - cs * cs;
    NormalFrame { cos, sin, gram, independent: det > tol }
}
