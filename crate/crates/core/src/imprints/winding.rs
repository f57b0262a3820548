use alloc::vec::Vec;
use core::f64::consts::TAU;

use libm::{atan2, cos, floor, ceil, sin, sqrt};

use crate::equilibria::exemplar;
use crate::model::wrap_signed;
use crate::quotient::{self, QuotientPoint};
use crate::{Error, Result, Subset};

/// Winding number of a closed polyline in Q around the codimension-2
/// subtorus where the three angles in `s` coincide.
///
/// With `s = {s1, s2, s3}` the plane coordinates are
/// `(θ_{s1} − θ_{s3}, θ_{s2} − θ_{s3})`. The curve is lifted to the plane by
/// unwrapping and the winding numbers around every lattice point `2π ℤ²` near
/// the lift are summed. A lift that does not close up has no well-defined
/// winding and is rejected, as is a curve passing within `tol` of the
/// subtorus.
pub fn winding_number(curve: &[QuotientPoint], s: Subset, tol: f64) -> Result<i64> {
    if s.len() != 3 {
        return Err(Error::InvalidArgument("the subtorus is given by exactly three indices".into()));
    }
    let Some(m) = curve.first().map(QuotientPoint::m) else {
        return Err(Error::InvalidArgument("empty curve".into()));
    };
    if s.span() > m || curve.iter().any(|q| q.m() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: s.span().max(curve.iter().map(QuotientPoint::m).max().unwrap_or(m)) });
    }
    let idx: Vec<usize> = s.iter().collect();
    let plane = |q: &QuotientPoint| {
        let p = quotient::lift(q);
        let a = p.angles();
        (a[idx[0]] - a[idx[2]], a[idx[1]] - a[idx[2]])
    };
    let mut lift: Vec<(f64, f64)> = Vec::with_capacity(curve.len() + 1);
    let (mut x, mut y) = plane(&curve[0]);
    x = wrap_signed(x);
    y = wrap_signed(y);
    lift.push((x, y));
    for q in curve[1..].iter().chain(core::iter::once(&curve[0])) {
        let (u, v) = plane(q);
        x += wrap_signed(u - x);
        y += wrap_signed(v - y);
        lift.push((x, y));
    }
    let (x0, y0) = lift[0];
    let (xe, ye) = lift[lift.len() - 1];
    if (xe - x0).abs() > 1.0 || (ye - y0).abs() > 1.0 {
        return Err(Error::OpenLift);
    }
    // Close exactly on the first point.
    let last = lift.len() - 1;
    lift[last] = lift[0];

    let (mut xmin, mut xmax, mut ymin, mut ymax) = (x0, x0, y0, y0);
    for &(x, y) in &lift {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let range = |lo: f64, hi: f64| (floor(lo / TAU) as i64 - 1)..=(ceil(hi / TAU) as i64 + 1);
    let mut total = 0i64;
    for a in range(xmin, xmax) {
        for b in range(ymin, ymax) {
            let (cx, cy) = (TAU * a as f64, TAU * b as f64);
            let mut angle = 0.0;
            for w in lift.windows(2) {
                let (p, q) = ((w[0].0 - cx, w[0].1 - cy), (w[1].0 - cx, w[1].1 - cy));
                if segment_distance(p, q) < tol {
                    return Err(Error::TouchesTemplate { tol });
                }
                angle += wrap_signed(atan2(q.1, q.0) - atan2(p.1, p.0));
            }
            total += libm::round(angle / TAU) as i64;
        }
    }
    Ok(total)
}

/// Distance from the origin to the segment `pq`.
fn segment_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let d = (q.0 - p.0, q.1 - p.1);
    let len2 = d.0 * d.0 + d.1 * d.1;
    let t = if len2 > 0.0 { (-(p.0 * d.0 + p.1 * d.1) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (x, y) = (p.0 + t * d.0, p.1 + t * d.1);
    sqrt(x * x + y * y)
}

/// A circle of radius `delta` (n vertices) around the saddle `p_I`,
/// `I = complement of s`, in the plane normal to the subtorus where the
/// angles in `s` coincide. Positively oriented in the winding coordinates.
pub fn template_circle(m: usize, s: Subset, delta: f64, n: usize) -> Result<Vec<QuotientPoint>> {
    if s.len() != 3 || s.span() > m || 2 * (m - 3) >= m {
        return Err(Error::InvalidArgument(alloc::format!("need |s| = 3 and |I| = m − 3 < m/2; got s = {s}, m = {m}")));
    }
    let idx: Vec<usize> = s.iter().collect();
    let center = exemplar(m, s.complement(m));
    let (r2, r6) = (sqrt(2.0), sqrt(6.0));
    let mut u = alloc::vec![0.0; m];
    let mut v = alloc::vec![0.0; m];
    u[idx[0]] = 1.0 / r2;
    u[idx[1]] = -1.0 / r2;
    v[idx[0]] = 1.0 / r6;
    v[idx[1]] = 1.0 / r6;
    v[idx[2]] = -2.0 / r6;
    Ok((0..n)
        .map(|k| {
            let phi = TAU * k as f64 / n as f64;
            let theta: Vec<f64> = center.angles().iter().enumerate().map(|(i, &c)| c + delta * (cos(phi) * u[i] + sin(phi) * v[i])).collect();
            quotient::project(&crate::model::PhasePoint::new(theta).expect("finite"))
        })
        .collect())
}
