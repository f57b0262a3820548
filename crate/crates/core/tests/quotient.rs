use std::f64::consts::{PI, TAU};

use kuramoto_core::equilibria::{enumerate_equilibria, exemplar};
use kuramoto_core::flow::{integrate, Direction, FlowOptions, Start};
use kuramoto_core::model::{diagonal_rotate, ModelParams, PhasePoint};
use kuramoto_core::quotient::{
    counterdiagonal_embed, lift, project, quotient_distance, quotient_field, quotient_potential, QuotientMetric, QuotientPoint,
};
use kuramoto_core::Subset;
use proptest::prelude::*;

fn qp(v: &[f64]) -> QuotientPoint {
    QuotientPoint::new(v.to_vec()).unwrap()
}

fn coords(m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    m.prop_flat_map(|m| prop::collection::vec(0.0..TAU, m - 1))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) < tol
}

/// `g⁻¹ (−∂V_Q)` with the partials taken by central differences.
fn field_oracle(x: &[f64]) -> Vec<f64> {
    let h = 1e-5;
    let grad: Vec<f64> = (0..x.len())
        .map(|i| {
            let (mut p, mut q) = (x.to_vec(), x.to_vec());
            p[i] += h;
            q[i] -= h;
            (quotient_potential(&qp(&p)) - quotient_potential(&qp(&q))) / (2.0 * h)
        })
        .collect();
    let s: f64 = grad.iter().sum();
    grad.iter().map(|g| -(g + s)).collect()
}

#[test]
fn projection_examples() {
    assert!(close(project(&PhasePoint::new(vec![PI, 0.0]).unwrap()).coords()[0], PI, 1e-15));
    let c = 2.5;
    let q = project(&PhasePoint::new(vec![1.0 + c, 2.0 + c, c]).unwrap());
    assert!(close(q.coords()[0], 1.0, 1e-12) && close(q.coords()[1], 2.0, 1e-12));
    let p = lift(&qp(&[PI]));
    assert_eq!(p.angles(), &[PI, 0.0]);
}

#[test]
fn lifting_a_rotated_class() {
    let roots = PhasePoint::new((0..5).map(|k| TAU * k as f64 / 5.0).collect()).unwrap();
    let rotated = diagonal_rotate(&roots, -8.0 * PI / 5.0);
    assert!(quotient_distance(&project(&lift(&project(&rotated))), &project(&roots)) < 1e-12);
}

#[test]
fn counterdiagonal_example() {
    let p = counterdiagonal_embed(&qp(&[PI]));
    assert!(close(p.angles()[0], PI / 2.0, 1e-15) && close(p.angles()[1], -PI / 2.0, 1e-15));
}

#[test]
fn two_oscillators() {
    for t in [0.3, 1.7, 4.0] {
        let f = quotient_field(&qp(&[t]));
        assert!((f[0] + 2.0 * t.sin()).abs() < 1e-14);
    }
}

#[test]
fn exemplars_are_zeros() {
    for m in 2..=7 {
        for r in enumerate_equilibria(m).unwrap() {
            let f = quotient_field(&r.quotient_point());
            assert!(f.iter().all(|x| x.abs() < 1e-14), "{:?}", r.subset);
        }
    }
    // Components on the 0-block vanish exactly.
    let f = quotient_field(&project(&exemplar(5, Subset::from_indices(&[0]))));
    assert!(f[1..].iter().all(|&x| x == 0.0));
}

#[test]
fn metric_identities() {
    for m in 2..=9 {
        let g = QuotientMetric::new(m);
        let prod = g.g() * g.g_inv();
        assert!((prod - nalgebra::DMatrix::identity(m - 1, m - 1)).amax() < 1e-12);
        let u = nalgebra::DVector::from_element(m - 1, 1.0);
        let q = (u.transpose() * g.g() * &u)[(0, 0)];
        assert!((q - (m - 1) as f64 / m as f64).abs() < 1e-12);
    }
}

#[test]
fn chart_consistency() {
    // The projected ambient orbit and the quotient orbit agree.
    let m = 5;
    let params = ModelParams::standard(m);
    let opts = FlowOptions { detect_convergence: false, ..Default::default() };
    let p = PhasePoint::new(vec![0.4, 2.2, 3.1, 5.0, 1.1]).unwrap();
    let a = integrate(&Start::Ambient(p.clone()), 0.5, Direction::Forward, &params, &opts).unwrap();
    let q = integrate(&Start::Quotient(project(&p)), 0.5, Direction::Forward, &params, &opts).unwrap();
    let pa = project(&a.phase_point(a.last()));
    let pq = project(&q.phase_point(q.last()));
    assert!(quotient_distance(&pa, &pq) < 1e-8);
}

#[test]
fn criticality_correspondence() {
    // Zeros exactly at the antipodal classes and on V^max.
    let vmax = PhasePoint::new(vec![0.0, 1.0, 2.0, 1.0 + PI, 2.0 + PI, PI]).unwrap();
    assert!(quotient_field(&project(&vmax)).iter().all(|x| x.abs() < 1e-13));
    let generic = qp(&[0.3, 1.4, 2.0, 5.1, 0.9]);
    assert!(quotient_field(&generic).iter().any(|x| x.abs() > 1e-3));
}

proptest! {
    #[test]
    fn projection_is_diagonal_invariant(t in prop::collection::vec(0.0..TAU, 2..8), alpha in -7.0f64..7.0) {
        let p = PhasePoint::new(t).unwrap();
        let (a, b) = (project(&p), project(&diagonal_rotate(&p, alpha)));
        prop_assert!(a.coords().iter().zip(b.coords()).all(|(&x, &y)| close(x, y, 1e-12)));
    }

    #[test]
    fn section_property(x in coords(2..=8)) {
        let q = qp(&x);
        let back = project(&lift(&q));
        prop_assert!(back.coords().iter().zip(q.coords()).all(|(&a, &b)| close(a, b, 1e-14)));
        let c = counterdiagonal_embed(&q);
        prop_assert!(close(c.angles().iter().sum::<f64>(), 0.0, 1e-10));
        prop_assert!(quotient_distance(&project(&c), &q) < 1e-12);
    }

    #[test]
    fn field_matches_metric_gradient(x in coords(2..=8)) {
        let f = quotient_field(&qp(&x));
        let o = field_oracle(&x);
        let diff: f64 = f.iter().zip(&o).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = o.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        prop_assert!(diff / scale < 1e-6);
    }
}
