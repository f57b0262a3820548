use std::f64::consts::{PI, TAU};

use kuramoto_core::cells::{betti_formula, enumerate_cells, homology_snf};
use kuramoto_core::equilibria::{enumerate_equilibria, EquilibriumKind, EquilibriumRecord};
use kuramoto_core::flow::{
    find_heteroclinic, integrate, Direction, FlowOptions, HeteroclinicOptions, LimitPoint, OrbitTrace, Start, Terminal,
};
use kuramoto_core::imprints::{normal_circle_experiment, template_circle, winding_number, NormalCircleOptions};
use kuramoto_core::model::{ModelParams, PhasePoint};
use kuramoto_core::ode::OdeOptions;
use kuramoto_core::Subset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{BaseKind, CellsConfig, EquilibriaConfig, ImprintConfig, SimulateConfig, StartConfig};
use crate::error::{classify, CliError, CliResult};
use crate::output::{num, to_json, Report};

fn kind_name(k: EquilibriumKind) -> &'static str {
    match k {
        EquilibriumKind::Sink => "sink",
        EquilibriumKind::Saddle => "saddle",
        EquilibriumKind::SingularMax => "singular-max",
    }
}

fn subset(one_based: &[usize]) -> Subset {
    Subset::from_indices(&one_based.iter().map(|i| i - 1).collect::<Vec<_>>())
}

#[derive(Serialize)]
struct EquilibriumRow {
    subset: String,
    kind: &'static str,
    index: usize,
    potential: f64,
    eigenvalues: Vec<f64>,
}

pub fn equilibria(c: &EquilibriaConfig) -> CliResult<Report> {
    let records = enumerate_equilibria(c.m).map_err(|e| classify(e, CliError::Core))?;
    let rows: Vec<EquilibriumRow> = records
        .iter()
        .map(|r| {
            let mut eigenvalues: Vec<f64> = r.eigenpairs.iter().map(|e| e.value).collect();
            eigenvalues.sort_by(f64::total_cmp);
            EquilibriumRow { subset: r.subset.to_string(), kind: kind_name(r.kind), index: r.index, potential: r.potential, eigenvalues }
        })
        .collect();
    let singular = records.iter().filter(|r| r.kind == EquilibriumKind::SingularMax).count();
    let regular = records.len() - singular;
    let by_index: Vec<usize> = (0..c.m.div_ceil(2))
        .map(|u| records.iter().filter(|r| r.kind != EquilibriumKind::SingularMax && r.index == u).count())
        .collect();
    let summary = json!({ "total": records.len(), "non_maximal": regular, "singular": singular, "count_by_index": by_index });
    Ok(Report {
        columns: ["subset", "kind", "index", "potential", "eigenvalues"].map(String::from).to_vec(),
        rows: rows
            .iter()
            .map(|r| {
                let ev: Vec<String> = r.eigenvalues.iter().map(|&v| num(v)).collect();
                vec![r.subset.clone(), r.kind.into(), r.index.to_string(), num(r.potential), ev.join(";")]
            })
            .collect(),
        trailer: vec![format!(
            "summary total={} non_maximal={regular} singular={singular} count_by_index={}",
            records.len(),
            by_index.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
        )],
        json: json!({ "rows": to_json(&rows)?, "summary": summary }),
    })
}

#[derive(Serialize)]
pub struct SimulationSummary {
    /// `sink`, `saddle`, `vmax`, `max-time` or `high-potential`.
    pub terminal: String,
    pub limit_subset: Option<String>,
    pub limit_index: Option<usize>,
    pub start: Vec<f64>,
    pub t_end: f64,
    pub final_state: Vec<f64>,
    pub final_potential: f64,
}

fn classify_terminal(t: &Terminal) -> (String, Option<&EquilibriumRecord>) {
    match t {
        Terminal::Converged(LimitPoint::Equilibrium(r)) => (kind_name(r.kind).into(), Some(r)),
        Terminal::Converged(LimitPoint::VMax(_)) => ("vmax".into(), None),
        Terminal::MaxTime => ("max-time".into(), None),
        Terminal::HighPotential => ("high-potential".into(), None),
    }
}

fn trace_rows(trace: &OrbitTrace, prefix: &[String]) -> Vec<Vec<String>> {
    trace
        .samples
        .iter()
        .map(|s| {
            let mut row = prefix.to_vec();
            row.push(num(s.t));
            row.extend(s.state.iter().map(|&x| num(x)));
            row.push(num(s.potential));
            row.push(num(s.r));
            row
        })
        .collect()
}

fn trace_columns(m: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=m).map(|i| format!("theta_{i}")));
    cols.push("potential".into());
    cols.push("r".into());
    cols
}

/// A unit vector in the unstable eigenspace of `record`, uniform on its
/// sphere.
fn unstable_direction(record: &EquilibriumRecord, rng: &mut ChaCha8Rng) -> CliResult<Vec<f64>> {
    let basis: Vec<&Vec<f64>> = record.eigenpairs.iter().filter(|e| e.value > 1e-9).map(|e| &e.vector).collect();
    if basis.is_empty() {
        return Err(CliError::Config(format!("{} has no unstable direction", record.subset)));
    }
    let coeffs = loop {
        let c: Vec<f64> = (0..basis.len()).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
        let n2: f64 = c.iter().map(|x| x * x).sum();
        if n2 <= 1.0 && n2 > 1e-6 {
            break c;
        }
    };
    let mut v = vec![0.0; record.m];
    for (c, b) in coeffs.iter().zip(&basis) {
        for (vi, bi) in v.iter_mut().zip(b.iter()) {
            *vi += c * bi;
        }
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(v.into_iter().map(|x| x / n).collect())
}

fn find_record(m: usize, one_based: &[usize]) -> CliResult<EquilibriumRecord> {
    let s = subset(one_based);
    enumerate_equilibria(m)
        .map_err(|e| classify(e, CliError::Core))?
        .into_iter()
        .find(|r| r.subset == s && r.kind != EquilibriumKind::SingularMax)
        .ok_or_else(|| CliError::Config(format!("{s} is not a sink or saddle exemplar for m = {m} (use fewer than m/2 indices)")))
}

pub fn simulate(c: &SimulateConfig, seed: u64) -> CliResult<(Report, serde_json::Value)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ModelParams::standard(c.m);
    if let Some(w) = &c.omega {
        params = params.with_omega(w.clone()).map_err(|e| classify(e, CliError::Core))?;
    }
    if let Some(a) = &c.coupling {
        params = params.with_coupling(a.clone()).map_err(|e| classify(e, CliError::Core))?;
    }
    let flow = FlowOptions {
        ode: OdeOptions { atol: c.atol, rtol: c.rtol, ..Default::default() },
        sample_interval: c.sample_interval,
        max_time: c.t_max,
        ..Default::default()
    };
    if let StartConfig::Heteroclinic { from, to } = &c.start {
        if !params.is_standard() {
            return Err(CliError::Config("saddle connections are traced for the standard model only".into()));
        }
        return heteroclinic(c.m, from, to, flow, c.t_max);
    }
    let start: Vec<f64> = match &c.start {
        StartConfig::Random => (0..c.m).map(|_| rng.random::<f64>() * TAU).collect(),
        StartConfig::Angles { angles } => angles.clone(),
        StartConfig::Equilibrium { subset, offset } => {
            let rec = find_record(c.m, subset)?;
            let dir = unstable_direction(&rec, &mut rng)?;
            rec.exemplar().angles().iter().zip(&dir).map(|(a, d)| a + offset * d).collect()
        }
        StartConfig::Heteroclinic { .. } => unreachable!(),
    };
    let p = PhasePoint::new(start.clone()).map_err(|e| classify(e, CliError::Core))?;
    let dir = if c.backward { Direction::Backward } else { Direction::Forward };
    let trace = integrate(&Start::Ambient(p), c.t_max, dir, &params, &flow).map_err(|e| classify(e, CliError::Integration))?;
    let (terminal, rec) = classify_terminal(&trace.terminal);
    let last = trace.last();
    let summary = SimulationSummary {
        terminal,
        limit_subset: rec.map(|r| r.subset.to_string()),
        limit_index: rec.map(|r| r.index),
        start,
        t_end: last.t,
        final_state: last.state.clone(),
        final_potential: last.potential,
    };
    let summary = to_json(&summary)?;
    let report = Report {
        columns: trace_columns(c.m),
        rows: trace_rows(&trace, &[]),
        trailer: vec![format!("summary={summary}")],
        json: json!({ "summary": summary, "trace": to_json(&trace)? }),
    };
    Ok((report, summary))
}

fn heteroclinic(m: usize, from: &[usize], to: &[usize], flow: FlowOptions, t_max: f64) -> CliResult<(Report, serde_json::Value)> {
    let opts = HeteroclinicOptions { flow, max_time: t_max, ..Default::default() };
    let rep = find_heteroclinic(subset(from), subset(to), m, &opts).map_err(|e| classify(e, CliError::Integration))?;
    let mut columns = vec!["branch".to_string()];
    columns.extend(trace_columns(m));
    let mut rows = Vec::new();
    for b in &rep.branches {
        rows.extend(trace_rows(&b.trace, &[b.sign.to_string()]));
    }
    let branches: Vec<_> = rep
        .branches
        .iter()
        .map(|b| {
            json!({
                "sign": b.sign,
                "alpha_distance": b.alpha_distance,
                "omega_distance": b.omega_distance,
                "template_spread": b.template_spread,
                "t_end": b.trace.last().t,
            })
        })
        .collect();
    let summary = json!({
        "terminal": kind_name(rep.target.kind),
        "limit_subset": rep.target.subset.to_string(),
        "limit_index": rep.target.index,
        "source_subset": rep.source.subset.to_string(),
        "branches": branches,
    });
    let report = Report {
        columns,
        rows,
        trailer: vec![format!("summary={summary}")],
        json: json!({ "summary": summary, "branches": to_json(&rep.branches)? }),
    };
    Ok((report, summary))
}

pub fn cells(c: &CellsConfig) -> CliResult<Report> {
    let complex = enumerate_cells(c.m).map_err(|e| classify(e, CliError::Core))?;
    complex.check_boundary_squared().map_err(|e| classify(e, CliError::Boundary))?;
    let h = homology_snf(&complex).map_err(|e| classify(e, CliError::Core))?;
    let counts = complex.counts();
    let formula: Vec<u128> = (0..counts.len()).map(|k| betti_formula(c.m, k)).collect();
    let matches = h.betti.iter().zip(&formula).all(|(&a, &b)| a as u128 == b);
    let chi = complex.euler_characteristic();
    let torsion_of = |k: usize| h.torsion.iter().find(|t| t.dim == k).map(|t| t.divisors.join(";")).unwrap_or_default();
    let rows: Vec<Vec<String>> = (0..counts.len())
        .map(|k| vec![k.to_string(), counts[k].to_string(), h.betti[k].to_string(), formula[k].to_string(), torsion_of(k)])
        .collect();
    Ok(Report {
        columns: ["dim", "cells", "betti_snf", "betti_formula", "torsion"].map(String::from).to_vec(),
        rows,
        trailer: vec![format!("summary euler_characteristic={chi} boundary_squared_zero=true match={matches}")],
        json: json!({
            "m": c.m,
            "counts": counts,
            "euler_characteristic": chi,
            "boundary_squared_zero": true,
            "betti_snf": h.betti,
            "betti_formula": formula.iter().map(|&b| b as u64).collect::<Vec<_>>(),
            "torsion": to_json(&h.torsion)?,
            "match": matches,
        }),
    })
}

fn base_point(m: usize, base: Option<BaseKind>, angles: &Option<Vec<f64>>) -> CliResult<PhasePoint> {
    let v = match (angles, base) {
        (Some(a), _) => a.clone(),
        (None, Some(BaseKind::Singular)) => (0..m).map(|i| if i < m / 2 { 0.0 } else { PI }).collect(),
        (None, _) => (0..m).map(|k| TAU * k as f64 / m as f64).collect(),
    };
    PhasePoint::new(v).map_err(|e| classify(e, CliError::Core))
}

pub fn imprint(c: &ImprintConfig) -> CliResult<Report> {
    match c {
        ImprintConfig::Winding { m, subset: idx, delta, n } => {
            let s = subset(idx);
            let curve = template_circle(*m, s, *delta, *n).map_err(|e| classify(e, CliError::Core))?;
            let w = winding_number(&curve, s, 1e-9).map_err(|e| classify(e, CliError::Core))?;
            Ok(Report {
                columns: ["m", "I", "delta", "n", "winding"].map(String::from).to_vec(),
                rows: vec![vec![m.to_string(), s.to_string(), num(*delta), n.to_string(), w.to_string()]],
                trailer: vec![],
                json: json!({ "m": m, "I": s.to_string(), "delta": delta, "n": n, "winding": w }),
            })
        }
        ImprintConfig::NormalCircle { m, base, base_angles, radius, n, crossing_level } => {
            let p = base_point(*m, *base, base_angles)?;
            let opts = NormalCircleOptions { radius: *radius, n: *n, crossing_level: *crossing_level, ..Default::default() };
            let table = normal_circle_experiment(&p, &opts).map_err(|e| classify(e, CliError::Integration))?;
            let mut columns: Vec<String> = ["k", "phi", "crossing_time", "alpha_distance"].map(String::from).to_vec();
            columns.extend((1..=*m).map(|i| format!("crossing_{i}")));
            columns.extend(table.saddles.iter().map(|s| format!("dist_{}", s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join("_"))));
            let rows = table
                .rows
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let mut row = vec![k.to_string(), num(r.phi), r.crossing_time.map(num).unwrap_or_default(), num(r.alpha_distance)];
                    match &r.crossing {
                        Some(x) => row.extend(x.angles().iter().map(|&a| num(a))),
                        None => row.extend(std::iter::repeat_n(String::new(), *m)),
                    }
                    row.extend(r.saddle_distances.iter().map(|&d| num(d)));
                    row
                })
                .collect();
            let reached = table.rows.iter().filter(|r| r.crossing.is_some()).count();
            let max_alpha = table.rows.iter().map(|r| r.alpha_distance).fold(0.0, f64::max);
            Ok(Report {
                columns,
                rows,
                trailer: vec![format!(
                    "summary crossing_level={} reached={reached}/{} max_alpha_distance={}",
                    num(table.crossing_level),
                    table.rows.len(),
                    num(max_alpha)
                )],
                json: to_json(&table)?,
            })
        }
    }
}
