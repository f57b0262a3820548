use std::f64::consts::{PI, TAU};

use kuramoto_core::cells::{realize_cell, vmax_membership};
use kuramoto_core::imprints::{
    blowup_check, imprint_membership, imprint_sample, normal_circle_experiment, pinch_points, stable_manifold_alpha_limits,
    template_circle, winding_number, AlphaLimitOptions, BlowupOptions, ImprintKind, ImprintSpec, NormalCircleOptions,
};
use kuramoto_core::model::PhasePoint;
use kuramoto_core::quotient::{project, QuotientPoint};
use kuramoto_core::{Error, Subset};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(m: usize, idx: &[usize]) -> ImprintSpec {
    ImprintSpec::new(m, Subset::from_indices(idx)).unwrap()
}

fn omega(m: usize) -> PhasePoint {
    PhasePoint::new((0..m).map(|k| TAU * k as f64 / m as f64).collect()).unwrap()
}

#[test]
fn kinds() {
    assert_eq!(spec(5, &[0, 1]).expected_kind, ImprintKind::Sphere { dim: 1 });
    assert_eq!(spec(5, &[0]).expected_kind, ImprintKind::AllOfVmax);
    assert_eq!(spec(4, &[0]).expected_kind, ImprintKind::PinchedSphere { dim: 1, pinches: 3 });
    assert_eq!(spec(6, &[0, 1]).expected_kind, ImprintKind::PinchedSphere { dim: 2, pinches: 4 });
    assert_eq!(spec(7, &[0, 1, 2]).expected_kind, ImprintKind::Sphere { dim: 2 });
    assert_eq!(spec(7, &[0, 1]).expected_kind, ImprintKind::Slice);
    assert!(ImprintSpec::new(4, Subset::from_indices(&[0, 1])).is_err());
    assert!(ImprintSpec::new(5, Subset::EMPTY).is_err());
}

#[test]
fn membership_examples() {
    let sp = spec(5, &[0, 1]);
    // Two equal angles at 0 balanced by three others.
    let p = realize_cell(&"0a-b-c-d".parse().unwrap()).unwrap();
    assert!(imprint_membership(&sp, &p, 1e-9));
    assert!(!imprint_membership(&sp, &omega(5), 1e-9));
    assert!(imprint_membership(&spec(5, &[0]), &omega(5), 1e-9));
}

#[test]
fn samples_trace_a_circle() {
    let sp = spec(5, &[0, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pts = imprint_sample(&sp, 200, &mut rng).unwrap();
    assert!(pts.iter().all(|p| imprint_membership(&sp, p, 1e-8)));
    // The samples form one connected curve in the quotient: link points
    // closer than 0.5 and check that every sample is reached.
    let mut seen = vec![false; pts.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..pts.len() {
            if !seen[j] && kuramoto_core::quotient::diagonal_distance(&pts[i], &pts[j]) < 0.5 {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    assert!(seen.iter().all(|&b| b));
}

#[test]
fn pinched_circle_at_four() {
    let sp = spec(4, &[0]);
    let pinch = pinch_points(&sp);
    assert_eq!(pinch.len(), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pts = imprint_sample(&sp, 300, &mut rng).unwrap();
    for q in &pinch {
        assert!(vmax_membership(q, 1e-12));
        let nearest = pts.iter().map(|p| kuramoto_core::quotient::diagonal_distance(p, q)).fold(f64::INFINITY, f64::min);
        assert!(nearest < 0.3);
    }
    assert_eq!(pinch_points(&spec(6, &[0, 1])).len(), 4);
    assert!(pinch_points(&spec(5, &[0])).is_empty());
}

#[test]
fn alpha_limits_lie_in_the_imprint() {
    let sp = spec(5, &[0, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let limits = stable_manifold_alpha_limits(&sp, 20, &AlphaLimitOptions::default(), &mut rng).unwrap();
    assert!(limits.iter().all(|p| imprint_membership(&sp, p, 1e-6)));
    // Containment in the larger imprint.
    let outer = spec(5, &[0]);
    assert!(limits.iter().all(|p| imprint_membership(&outer, p, 1e-6)));
}

#[test]
fn normal_circle_returns_to_its_base() {
    let base = omega(5);
    let opts = NormalCircleOptions { n: 16, ..Default::default() };
    let table = normal_circle_experiment(&base, &opts).unwrap();
    assert_eq!(table.saddles.len(), 5);
    assert_eq!(table.crossing_level, 3.0);
    for row in &table.rows {
        assert!(row.alpha_distance < 2.0 * opts.radius);
        assert!(row.crossing.is_some());
        assert_eq!(row.saddle_distances.len(), 5);
    }
}

#[test]
fn normal_circle_profile_is_smooth_and_periodic() {
    let table = normal_circle_experiment(&omega(5), &NormalCircleOptions { n: 36, ..Default::default() }).unwrap();
    let d: Vec<f64> = table.rows.iter().map(|r| r.saddle_distances[0]).collect();
    let n = d.len();
    for i in 0..n {
        let jump = (d[(i + 1) % n] - d[i]).abs();
        assert!(jump < 0.5, "jump {jump} at row {i}");
    }
}

#[test]
fn crossings_converge_as_the_radius_shrinks() {
    let run = |radius| {
        let t = normal_circle_experiment(&omega(5), &NormalCircleOptions { n: 6, radius, ..Default::default() }).unwrap();
        t.rows.into_iter().map(|r| r.crossing.unwrap()).collect::<Vec<_>>()
    };
    let (a, b, c) = (run(1e-2), run(5e-3), run(2.5e-3));
    for i in 0..a.len() {
        let d1 = kuramoto_core::quotient::diagonal_distance(&a[i], &b[i]);
        let d2 = kuramoto_core::quotient::diagonal_distance(&b[i], &c[i]);
        assert!(d2 < d1, "row {i}: {d1} then {d2}");
    }
}

#[test]
fn degenerate_frame_is_rejected() {
    let sing = PhasePoint::new(vec![0.0, 0.0, PI, PI]).unwrap();
    assert!(matches!(normal_circle_experiment(&sing, &NormalCircleOptions::default()), Err(Error::DegenerateFrame { .. })));
    assert!(normal_circle_experiment(&PhasePoint::new(vec![0.0, 0.1, 0.2]).unwrap(), &NormalCircleOptions::default()).is_err());
}

#[test]
fn winding_around_the_template() {
    let s = Subset::from_indices(&[2, 3, 4]);
    let circle = template_circle(5, s, 1e-3, 64).unwrap();
    assert_eq!(winding_number(&circle, s, 1e-9).unwrap(), 1);
    let reversed: Vec<QuotientPoint> = circle.iter().rev().cloned().collect();
    assert_eq!(winding_number(&reversed, s, 1e-9).unwrap(), -1);
    // A small loop that keeps θ_2 away from θ_3 and θ_4.
    let far = template_circle(5, s, 1e-3, 64)
        .unwrap()
        .into_iter()
        .map(|q| {
            let mut v: Vec<f64> = q.coords().to_vec();
            v[2] += 1.0;
            QuotientPoint::new(v).unwrap()
        })
        .collect::<Vec<_>>();
    assert_eq!(winding_number(&far, s, 1e-9).unwrap(), 0);
    // A bigger circle in the same class.
    assert_eq!(winding_number(&template_circle(5, s, 0.3, 64).unwrap(), s, 1e-9).unwrap(), 1);
}

#[test]
fn winding_errors() {
    let s = Subset::from_indices(&[2, 3, 4]);
    let through = vec![project(&omega(5)), project(&PhasePoint::new(vec![1.0, 2.0, 0.0, 0.0, 0.0]).unwrap())];
    assert!(matches!(winding_number(&through, s, 1e-9), Err(Error::TouchesTemplate { .. })));
    let open: Vec<QuotientPoint> =
        (0..32).map(|k| QuotientPoint::new(vec![1.0, 2.0, TAU * k as f64 / 32.0, 0.5]).unwrap()).collect();
    assert!(matches!(winding_number(&open, Subset::from_indices(&[0, 2, 4]), 1e-9), Err(Error::OpenLift)));
    assert!(winding_number(&[], s, 1e-9).is_err());
}

#[test]
fn blowup_at_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rep = blowup_check(4, 20, &BlowupOptions::default(), &mut rng).unwrap();
    for smp in &rep.samples {
        let t = &smp.tangent;
        let fits = [[0.5, -0.5, 0.5, -0.5], [0.5, -0.5, -0.5, 0.5]]
            .iter()
            .any(|v| t.iter().zip(v).all(|(a, b)| (a - b).abs() < 1e-4) || t.iter().zip(v).all(|(a, b)| (a + b).abs() < 1e-4));
        assert!(fits, "{t:?}");
    }
}

#[test]
fn blowup_at_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rep = blowup_check(6, 30, &BlowupOptions::default(), &mut rng).unwrap();
    assert!(rep.max_sum < 1e-6 && rep.max_norm_error < 1e-6);
    assert!(rep.max_cone_residual.unwrap() < 1e-6);
    for smp in &rep.samples {
        let dot: f64 = smp.tangent.iter().zip([-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-6);
    }
    assert!(blowup_check(5, 1, &BlowupOptions::default(), &mut rng).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winding_survives_refinement(n in 8usize..80, delta in 1e-3f64..0.5) {
        let s = Subset::from_indices(&[2, 3, 4]);
        let coarse = template_circle(5, s, delta, n).unwrap();
        let fine = template_circle(5, s, delta, 2 * n).unwrap();
        prop_assert_eq!(winding_number(&coarse, s, 1e-12).unwrap(), winding_number(&fine, s, 1e-12).unwrap());
    }

    #[test]
    fn sampled_points_are_members(seed in any::<u64>(), which in 0usize..3) {
        let sp = [spec(5, &[0, 1]), spec(6, &[1, 3]), spec(7, &[0, 2, 4])][which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in imprint_sample(&sp, 5, &mut rng).unwrap() {
            prop_assert!(imprint_membership(&sp, &p, 1e-8));
        }
    }
}
