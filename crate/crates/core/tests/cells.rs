use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::f64::consts::{PI, TAU};

use kuramoto_core::cells::{
    betti_formula, enumerate_cells, homology_snf, normal_frame, realize_cell, valid_sentences, vmax_membership, Sentence,
    ORDER_MARGIN,
};
use kuramoto_core::equilibria::{enumerate_equilibria, EquilibriumKind};
use kuramoto_core::model::PhasePoint;
use proptest::prelude::*;

fn s(label: &str) -> Sentence {
    label.parse().unwrap()
}

fn label(words: &[Vec<u8>]) -> String {
    words
        .iter()
        .map(|w| w.iter().map(|&c| if c == 0 { '0' } else { (b'a' + c - 1) as char }).collect::<String>())
        .collect::<Vec<_>>()
        .join("-")
}

/// Every ordered set partition of `0..m`, canonicalized and filtered by the
/// validity rule, built from permutations and cut points.
fn brute_force_cells(m: usize) -> BTreeMap<String, usize> {
    fn permutations(v: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
        if k == v.len() {
            out.push(v.clone());
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permutations(v, k + 1, out);
            v.swap(k, i);
        }
    }
    let mut perms = Vec::new();
    permutations(&mut (0..m as u8).collect(), 0, &mut perms);
    let mut out = BTreeMap::new();
    for p in perms {
        for cuts in 0u32..(1 << (m - 1)) {
            let mut words: Vec<Vec<u8>> = vec![vec![p[0]]];
            for i in 1..m {
                if cuts & (1 << (i - 1)) != 0 {
                    words.push(Vec::new());
                }
                words.last_mut().unwrap().push(p[i]);
            }
            for w in &mut words {
                w.sort();
            }
            let lead = words.iter().position(|w| w[0] == 0).unwrap();
            words.rotate_left(lead);
            let n = words.len();
            let ok = words.iter().all(|w| 2 * w.len() <= m) && (words.iter().all(|w| 2 * w.len() < m) || n == 2);
            if ok && n >= 2 {
                let dim = if n == 2 { 0 } else { n - 3 };
                out.insert(label(&words), dim);
            }
        }
    }
    out
}

fn border_labels(label: &str) -> Vec<(i64, String)> {
    s(label).border().unwrap().into_iter().map(|(c, f)| (c, f.to_string())).collect()
}

#[test]
fn enumeration_matches_brute_force() {
    for m in 3..=7 {
        let c = enumerate_cells(m).unwrap();
        let ours: BTreeMap<String, usize> = c.entries().into_iter().map(|e| (e.label, e.dimension)).collect();
        assert_eq!(ours, brute_force_cells(m), "m = {m}");
        assert_eq!(valid_sentences(m).len(), ours.len());
    }
}

#[test]
fn cell_counts() {
    assert_eq!(enumerate_cells(3).unwrap().counts(), [2]);
    assert_eq!(enumerate_cells(4).unwrap().counts(), [3, 6]);
    assert_eq!(enumerate_cells(5).unwrap().counts(), [30, 60, 24]);
    assert_eq!(enumerate_cells(6).unwrap().counts(), [40, 270, 360, 120]);
    let four: BTreeSet<String> = enumerate_cells(4).unwrap().entries().into_iter().filter(|e| e.dimension == 0).map(|e| e.label).collect();
    assert_eq!(four, ["0a-bc", "0b-ac", "0c-ab"].map(String::from).into());
    assert!(enumerate_cells(2).is_err());
}

#[test]
fn euler_characteristics() {
    assert_eq!(enumerate_cells(3).unwrap().euler_characteristic(), 2);
    assert_eq!(enumerate_cells(4).unwrap().euler_characteristic(), -3);
    assert_eq!(enumerate_cells(5).unwrap().euler_characteristic(), -6);
    assert_eq!(kuramoto_core::cells::euler_characteristic(&enumerate_cells(6).unwrap()), 10);
}

#[test]
fn displayed_borders() {
    assert_eq!(border_labels("0-a-b-c"), [(1, "0a-bc".into()), (-1, "0c-ab".into())]);
    assert_eq!(
        border_labels("0-a-b-c-d"),
        [(1, "0a-b-c-d".into()), (-1, "0-ab-c-d".into()), (1, "0-a-bc-d".into()), (-1, "0-a-b-cd".into()), (1, "0d-a-b-c".into())]
    );
    assert_eq!(border_labels("0-ab-c-d-e"), [(1, "0-ab-cd-e".into()), (-1, "0-ab-c-de".into()), (1, "0e-ab-c-d".into())]);
    assert!(s("0a-bc").border().is_err());
}

#[test]
fn boundary_squares_to_zero() {
    for m in 3..=7 {
        enumerate_cells(m).unwrap().check_boundary_squared().unwrap();
    }
}

#[test]
fn homology_matches_the_closed_form() {
    let expect: [&[usize]; 4] = [&[1, 4], &[1, 8, 1], &[1, 5, 15, 1], &[1, 6, 30, 6, 1]];
    for (m, want) in (4..=7).zip(expect) {
        let c = enumerate_cells(m).unwrap();
        let h = homology_snf(&c).unwrap();
        assert_eq!(h.betti, want);
        assert!(h.torsion.is_empty());
        assert_eq!(h.euler_characteristic(), c.euler_characteristic());
        for (k, &b) in h.betti.iter().enumerate() {
            assert_eq!(b as u128, betti_formula(m, k));
        }
    }
    // Two isolated points.
    assert_eq!(homology_snf(&enumerate_cells(3).unwrap()).unwrap().betti, [2]);
    assert_eq!(betti_formula(3, 0), 2);
}

#[test]
fn closed_form_values() {
    assert_eq!(betti_formula(6, 2), 15);
    assert_eq!(betti_formula(9, 3), 112);
    for m in 3..=12 {
        for k in m - 2..m + 3 {
            assert_eq!(betti_formula(m, k), 0);
        }
    }
}

/// Top cells that share a face, with the face's two signs. Returns
/// `None` if some face does not lie in exactly two top cells.
fn coherently_orientable(m: usize) -> Option<bool> {
    let c = enumerate_cells(m).unwrap();
    let top = c.top_dimension();
    let cells: Vec<_> = c.entries().into_iter().filter(|e| e.dimension == top).collect();
    let mut faces: HashMap<String, Vec<(usize, i64)>> = HashMap::new();
    for (i, e) in cells.iter().enumerate() {
        for (sign, f) in &e.border {
            faces.entry(f.clone()).or_default().push((i, *sign));
        }
    }
    if faces.values().any(|v| v.len() != 2) || faces.len() != c.counts()[top - 1] {
        return None;
    }
    // Flip cell orientations so shared faces cancel: a 2-colouring problem.
    let mut adj = vec![Vec::new(); cells.len()];
    for v in faces.values() {
        let ((a, sa), (b, sb)) = (v[0], v[1]);
        // Cancel iff eps_a sa + eps_b sb = 0, i.e. eps_a eps_b = −sa sb.
        adj[a].push((b, -sa * sb));
        adj[b].push((a, -sa * sb));
    }
    let mut eps = vec![0i64; cells.len()];
    for start in 0..cells.len() {
        if eps[start] != 0 {
            continue;
        }
        eps[start] = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for &(b, rel) in &adj[a] {
                if eps[b] == 0 {
                    eps[b] = eps[a] * rel;
                    queue.push_back(b);
                } else if eps[b] != eps[a] * rel {
                    return Some(false);
                }
            }
        }
    }
    Some(true)
}

#[test]
fn top_cells_meet_in_pairs() {
    for m in 5..=7 {
        assert_eq!(coherently_orientable(m), Some(true), "m = {m}");
    }
    // At m = 4 the faces are the three singular points, each on four edges.
    assert_eq!(coherently_orientable(4), None);
    let c = enumerate_cells(4).unwrap();
    let d1 = c.boundary(1).unwrap();
    for r in 0..3 {
        let row: Vec<i64> = (0..6).map(|j| d1.get(r, j)).filter(|&x| x != 0).collect();
        assert_eq!(row.len(), 4);
        assert_eq!(row.iter().sum::<i64>(), 0);
    }
}

fn check_realization(cell: &Sentence) {
    let p = realize_cell(cell).unwrap();
    let a = p.angles();
    assert!(vmax_membership(&p, 1e-10), "{cell}");
    assert_eq!(a[0], 0.0);
    let mut prev = -1.0;
    for word in cell.oscillator_words() {
        let idx: Vec<usize> = word.collect();
        let angle = a[idx[0]];
        assert!(idx.iter().all(|&i| a[i] == angle));
        if prev >= 0.0 {
            assert!(angle - prev > ORDER_MARGIN, "{cell}");
        }
        prev = angle;
    }
    assert!(TAU - prev > ORDER_MARGIN || cell.words().len() == 1);
}

#[test]
fn every_cell_is_realized() {
    for m in 3..=7 {
        for e in enumerate_cells(m).unwrap().entries() {
            check_realization(&s(&e.label));
        }
    }
}

#[test]
fn realization_examples() {
    let roots = realize_cell(&s("0-a-b-c-d")).unwrap();
    for (k, &a) in roots.angles().iter().enumerate() {
        assert!((a - TAU * k as f64 / 5.0).abs() < 1e-12);
    }
    let three = realize_cell(&s("0-a-b")).unwrap();
    assert!((three.angles()[1] - TAU / 3.0).abs() < 1e-12 && (three.angles()[2] - 2.0 * TAU / 3.0).abs() < 1e-12);
    let rigid = realize_cell(&s("0a-bc")).unwrap();
    assert_eq!(rigid.angles()[0], rigid.angles()[1]);
    assert!((rigid.angles()[2] - PI).abs() < 1e-12 && rigid.angles()[2] == rigid.angles()[3]);
    // The one-parameter family (0, α, π, π + α).
    let line = realize_cell(&s("0-a-b-c")).unwrap();
    let t = line.angles();
    assert!((t[2] - PI).abs() < 1e-12 && (t[3] - PI - t[1]).abs() < 1e-12);
    assert!(realize_cell(&s("0ab-c")).is_err());
}

#[test]
fn membership_and_frames() {
    let omega = PhasePoint::new((0..5).map(|k| TAU * k as f64 / 5.0).collect()).unwrap();
    assert!(vmax_membership(&omega, 1e-12));
    let f = normal_frame(&omega, 1e-6);
    assert!(f.independent);
    assert!((f.gram[0][0] - 2.5).abs() < 1e-12 && (f.gram[1][1] - 2.5).abs() < 1e-12 && f.gram[0][1].abs() < 1e-12);
    for v in [&f.cos, &f.sin] {
        assert!(v.iter().sum::<f64>().abs() < 1e-12);
    }
    let sing = PhasePoint::new(vec![0.0, 0.0, PI, PI]).unwrap();
    assert!(vmax_membership(&sing, 1e-12));
    let f = normal_frame(&sing, 1e-6);
    assert!(!f.independent && f.sin.iter().all(|x| x.abs() < 1e-15));
    for m in 3..=8 {
        for r in enumerate_equilibria(m).unwrap().iter().filter(|r| r.kind != EquilibriumKind::SingularMax) {
            assert!(!vmax_membership(&r.exemplar(), 1e-6));
        }
    }
}

#[test]
fn labels_round_trip() {
    let x = s("⟨0c-ab⟩");
    assert_eq!(x.to_string(), "0c-ab");
    assert_eq!(s("ab-0c"), x);
    assert_eq!(serde_json::to_string(&x).unwrap(), "\"0c-ab\"");
    assert!("0-a-a".parse::<Sentence>().is_err());
    assert!("0-a-!".parse::<Sentence>().is_err());
}

/// A random sentence on `m` symbols, valid or not.
fn sentences() -> impl Strategy<Value = Sentence> {
    (4usize..=9)
        .prop_flat_map(|m| (Just(m), Just((0..m as u8).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), m - 1)))
        .prop_map(|(_, perm, cuts)| {
            let mut words = vec![vec![perm[0]]];
            for (i, &c) in cuts.iter().enumerate() {
                if c {
                    words.push(Vec::new());
                }
                words.last_mut().unwrap().push(perm[i + 1]);
            }
            Sentence::new(words).unwrap()
        })
}

proptest! {
    #[test]
    fn border_of_border_vanishes(x in sentences()) {
        prop_assume!(x.is_valid() && x.dimension() >= 2);
        let mut total: BTreeMap<Sentence, i64> = BTreeMap::new();
        for (c, f) in x.border().unwrap() {
            prop_assert!(c == 1 || c == -1);
            prop_assert!(f.is_valid());
            prop_assert_eq!(f.dimension() + 1, x.dimension());
            for (d, g) in f.border().unwrap() {
                *total.entry(g).or_default() += c * d;
            }
        }
        prop_assert!(total.values().all(|&v| v == 0), "{:?}", total);
    }

    #[test]
    fn canonical_form_is_stable(x in sentences()) {
        let again: Sentence = x.to_string().parse().unwrap();
        prop_assert_eq!(&again, &x);
        prop_assert_eq!(x.words()[0][0], 0);
        prop_assert!(x.words().iter().all(|w| w.windows(2).all(|p| p[0] < p[1])));
    }

    #[test]
    fn realized_points_lie_in_their_cell(x in sentences()) {
        prop_assume!(x.is_valid() && x.m() <= 8);
        check_realization(&x);
    }
}
