use kuramoto_core::equilibria::{
    analytic_eigenpairs, enumerate_equilibria, saddle_potential, to_half_pi_convention, EquilibriumKind,
};
use kuramoto_core::model::{centroid, hessian, potential};
use kuramoto_core::Error;
use nalgebra::DVector;

fn choose(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn census() {
    for m in 2..=10usize {
        let all = enumerate_equilibria(m).unwrap();
        let regular = all.iter().filter(|r| r.kind != EquilibriumKind::SingularMax).count() as u64;
        let singular = all.iter().filter(|r| r.kind == EquilibriumKind::SingularMax).count() as u64;
        let mu = m as u64;
        if m % 2 == 1 {
            assert_eq!(regular, 1 << (m - 1));
            assert_eq!(singular, 0);
        } else {
            assert_eq!(regular, (1 << (m - 1)) - choose(mu, mu / 2) / 2);
            assert_eq!(singular, choose(mu, mu / 2) / 2);
        }
        for u in 0..m.div_ceil(2) {
            let n = all.iter().filter(|r| r.kind != EquilibriumKind::SingularMax && r.index == u).count() as u64;
            assert_eq!(n, choose(mu, u as u64), "m = {m}, u = {u}");
        }
    }
    let five = enumerate_equilibria(5).unwrap();
    assert_eq!(five.len(), 16);
    let six = enumerate_equilibria(6).unwrap();
    assert_eq!(six.iter().filter(|r| r.kind == EquilibriumKind::SingularMax).count(), 10);
}

#[test]
fn too_small() {
    assert_eq!(enumerate_equilibria(1).unwrap_err(), Error::TooFewOscillators { min: 2, got: 1 });
}

#[test]
fn eigenpairs_match_hessian() {
    for m in 2..=8 {
        for r in enumerate_equilibria(m).unwrap() {
            let h = hessian(&r.exemplar());
            assert_eq!(r.eigenpairs.len(), m);
            for e in &r.eigenpairs {
                let v = DVector::from_column_slice(&e.vector);
                assert!((&h * &v - e.value * &v).norm() < 1e-10);
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
            for (a, ea) in r.eigenpairs.iter().enumerate() {
                for eb in &r.eigenpairs[a + 1..] {
                    let dot: f64 = ea.vector.iter().zip(&eb.vector).map(|(x, y)| x * y).sum();
                    assert!(dot.abs() < 1e-12);
                }
            }
            // The spectrum from the library's Hessian is the analytic one.
            let numeric = sorted(h.symmetric_eigen().eigenvalues.iter().copied().collect());
            let analytic = sorted(r.eigenpairs.iter().map(|e| e.value).collect());
            for (a, b) in numeric.iter().zip(&analytic) {
                assert!((a - b).abs() < 1e-10);
            }
            if r.kind != EquilibriumKind::SingularMax {
                assert_eq!(r.eigenpairs.iter().filter(|e| e.value > 1e-9).count(), r.index);
            }
        }
    }
}

#[test]
fn analytic_spectra() {
    let values = |d, z| sorted(analytic_eigenpairs(d, z).unwrap().iter().map(|e| e.value).collect());
    assert_eq!(values(2, 3), [-1.0, -1.0, 0.0, 1.0, 5.0]);
    assert_eq!(values(1, 4), [-3.0, -3.0, -3.0, 0.0, 5.0]);
    // The sink keeps 𝟏 and the m − 1 contracting directions only.
    assert_eq!(values(0, 4), [-4.0, -4.0, -4.0, 0.0]);
    assert!(analytic_eigenpairs(3, 3).is_err());
    assert!(analytic_eigenpairs(3, 2).is_err());
}

#[test]
fn potentials() {
    assert_eq!(saddle_potential(1, 3).unwrap(), 4.0);
    assert_eq!(saddle_potential(0, 9).unwrap(), 0.0);
    let v = saddle_potential(2, 5).unwrap();
    assert_eq!(v, 12.0);
    assert!(v < 12.5);
    assert!(saddle_potential(3, 5).is_err());
    for m in 2..=10 {
        for r in enumerate_equilibria(m).unwrap() {
            let u = r.subset.len();
            let exact = (2 * u * (m - u)) as f64;
            assert_eq!(r.potential, exact);
            assert!((potential(&r.exemplar()) - exact).abs() < 1e-12);
            if r.kind == EquilibriumKind::SingularMax {
                assert!(centroid(&r.exemplar()).r < 1e-14);
                assert_eq!(exact, (m * m) as f64 / 2.0);
            } else {
                assert!(2 * u < m);
                let expect = 1.0 - 2.0 * u as f64 / m as f64;
                assert!((centroid(&r.exemplar()).r - expect).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn half_pi_convention() {
    let rec = enumerate_equilibria(4).unwrap().into_iter().find(|r| r.kind == EquilibriumKind::SingularMax).unwrap();
    let p = to_half_pi_convention(&rec.exemplar());
    assert!(p.angles().iter().all(|&a| (a - std::f64::consts::FRAC_PI_2).abs() < 1e-15 || (a - 1.5 * std::f64::consts::PI).abs() < 1e-15));
}
