mod common;

use std::collections::HashSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use altflow::alt::{
    alt_edge_potential, alt_electrical_flow, alt_ohm_violation, check_alt_kirchhoff, AltFlow, AltNeighbourhoods,
};
use altflow::generators::{
    counterexample, example, g2_alt_resistance, g2_tree_resistance, g2_x, graph_g1, graph_g2, hierarchical_1d,
    welded_circuit, welded_tree, welded_tree_resistance, HierarchicalSpec, Instance,
};
use altflow::network::{energy, ArcState, Flow, C64};
use altflow::oracle::{
    alg1_find_target, alg1_params, alg2_find_path, alg2_params, classical_embedding_baseline, AlgParams, Mode,
    OracleGraph, QuantumModel,
};
use altflow::solver::{electrical_flow, vertex_potential};
use altflow::walk::{
    alt_potential_state, effective_spectral_gap_check, flow_state, psi_s_plus, trace_distance_pure, WalkOperator,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const EXACT_TOL: f64 = 1e-9;
const FORMULA_TOL: f64 = 1e-8;
const KKT_TOL: f64 = 1e-8;
const SIGMAS: f64 = 3.0;
const TOY_SHOTS: u32 = 100_000;
const PE_STEPS: [u64; 4] = [10, 100, 1_000, 10_000];
const GAP_EPS: [f64; 3] = [0.01, 0.1, 0.5];
const DELTA: f64 = 0.1;
const ALG1_SEEDS: u64 = 100;
const ALG1_MIN_RATE: f64 = 0.85;
const ALG2_SEEDS: u64 = 50;
const ALG2_MIN_RATE: f64 = 0.85;
const SEPARATION_QUANTUM_TRIALS: u64 = 50;
const SEPARATION_BASELINE_TRIALS: u64 = 200;
const SEPARATION_QUANTUM_MIN: f64 = 0.8;
const SEPARATION_BASELINE_MAX: f64 = 0.05;
const KKT_NETWORKS: usize = 20;

type Outcome = Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let el = start.elapsed();
    (el < limit, format!("{:.2}s of {}s", el.as_secs_f64(), limit.as_secs()))
}

fn c1_worked_example() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    let ex = example(false).map_err(err)?;
    let (net, s, t) = (&ex.net, ex.s, ex.t);
    let v = |l: &str| net.vertex(l).unwrap();
    let f = electrical_flow(net, s, t).map_err(err)?;
    let w_theta: Vec<f64> = f.values().iter().zip(net.weights()).map(|(x, w)| x / w.sqrt()).collect();
    let d = max_diff(&w_theta, &[1.0, 2.0 / 3.0, 4.0 / 3.0, 2.0 / 3.0]);
    ok &= d <= EXACT_TOL;
    notes.push(format!("Wθ err {d:.1e}"));
    let r = energy(net, &f).map_err(err)?;
    ok &= close(r, 11.0 / 3.0, EXACT_TOL);
    notes.push(format!("R {r:.12}"));
    let p = vertex_potential(net, s, t).map_err(err)?;
    let got: Vec<f64> = ["s", "x", "y", "t"].iter().map(|l| p.values[v(l)]).collect();
    let d = max_diff(&got, &[11.0 / 3.0, 8.0 / 3.0, 4.0 / 3.0, 0.0]);
    ok &= d <= EXACT_TOL;
    notes.push(format!("p err {d:.1e}"));

    let alt = example(true).map_err(err)?;
    let fa = alt_electrical_flow(net, &alt.psi, s, t).map_err(err)?.feasible().map_err(err)?;
    let w_theta: Vec<f64> = fa.values().iter().zip(net.weights()).map(|(x, w)| x / w.sqrt()).collect();
    let d = max_diff(&w_theta, &[1.0; 4]);
    ok &= d <= EXACT_TOL;
    notes.push(format!("Wθ_alt err {d:.1e}"));
    let ra = energy(net, &fa).map_err(err)?;
    ok &= close(ra, 4.0, EXACT_TOL);
    notes.push(format!("R_alt {ra:.12}"));
    let pot = alt_edge_potential(net, &alt.psi, s, t).map_err(err)?;
    let coeffs: Vec<f64> = pot.coeffs.iter().map(|z| z.re).collect();
    let imag = pot.coeffs.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
    let d = max_diff(&coeffs, &[4.0, 3.0, -(3f64.sqrt()) / 3.0, 2.0, 0.0]).max(imag);
    ok &= d <= EXACT_TOL;
    notes.push(format!("coefficients err {d:.1e}"));
    let expected = [
        (("s", "x"), 4.0),
        (("x", "s"), 3.0),
        (("x", "y"), 4.0),
        (("y", "x"), 2.0),
        (("x", "t"), 2.0),
        (("t", "x"), 0.0),
        (("y", "t"), 2.0),
        (("t", "y"), 0.0),
    ];
    let d = expected
        .iter()
        .map(|((a, b), want)| (pot.edge.get(net, v(a), v(b)).unwrap() - want).abs())
        .fold(0.0, f64::max);
    ok &= d <= EXACT_TOL;
    notes.push(format!("edge potentials err {d:.1e}"));
    let (fast, time) = within(start, Duration::from_secs(1));
    notes.push(time);
    Ok((ok && fast, notes.join(", ")))
}

fn c2_infeasibility() -> Outcome {
    let cx = counterexample().map_err(err)?;
    let (net, s, t) = (&cx.net, cx.s, cx.t);
    let verdict = alt_electrical_flow(net, &cx.psi, s, t).map_err(err)?;
    let infeasible = matches!(verdict, AltFlow::Infeasible { .. });
    let v = |l: &str| net.vertex(l).unwrap();
    let mut values = vec![0.0; net.n_edges()];
    for (a, b) in [("s", "x"), ("x", "t")] {
        let e = net.edge_between(v(a), v(b)).unwrap();
        values[e] = if net.arc(e).0 == v(a) { 1.0 } else { -1.0 };
    }
    let unique = Flow::new(values);
    let violation = check_alt_kirchhoff(net, &cx.psi, &unique, s, t).map_err(err)?;
    let target = (1.0f64 / 6.0).sqrt();
    let matches = close(violation, target, EXACT_TOL);
    Ok((
        infeasible && matches,
        format!(
            "infeasible verdict {infeasible}; violation of the unique unit flow {violation:.12} vs √(1/6) = {target:.12} (√(3/20) = {:.12})",
            (3.0f64 / 20.0).sqrt()
        ),
    ))
}

fn c3_g1() -> Outcome {
    let g1 = graph_g1().map_err(err)?;
    let (net, s, t) = (&g1.net, g1.s, g1.t);
    let f = alt_electrical_flow(net, &g1.psi, s, t).map_err(err)?.feasible().map_err(err)?;
    let v2 = net.vertex("v2").map_err(err)?;
    let x = f.get(net, s, v2).map_err(err)?;
    let r = energy(net, &f).map_err(err)?;
    let mut ok = close(x, 5.0 / 9.0, EXACT_TOL) && close(r, 47.0 / 9.0, EXACT_TOL);
    let e = net.edge_between(s, v2).unwrap();
    let mut row = vec![0.0; net.n_edges()];
    row[e] = if net.arc(e).0 == s { 1.0 } else { -1.0 };
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let xg = i as f64 / 19.0;
        let k = common::kkt_alt_flow_with(net, &g1.psi, s, t, &[(row.clone(), xg)]);
        if k.residual > KKT_TOL {
            return Ok((false, format!("grid point x={xg} is not an alternative unit flow (residual {:.1e})", k.residual)));
        }
        let fl = Flow::new(k.theta);
        let y = 1.0 - xg;
        worst = worst.max((energy(net, &fl).map_err(err)? - (5.0 * y * y + 4.0 * xg * xg + 3.0)).abs());
    }
    ok &= worst <= EXACT_TOL;
    Ok((ok, format!("x {x:.12}, R_alt {r:.12}, energy functional err {worst:.1e} over 20 points")))
}

fn c4_g2() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for h in [1, 3] {
        let inst = graph_g2(h, 17).map_err(err)?;
        let (net, s, t) = (&inst.net, inst.s, inst.t);
        let f = alt_electrical_flow(net, &inst.psi, s, t).map_err(err)?.feasible().map_err(err)?;
        let r = g2_tree_resistance(h).map_err(err)?;
        let x = f.get(net, s, net.vertex("v2").map_err(err)?).map_err(err)?;
        let ra = energy(net, &f).map_err(err)?;
        let good = close(x, g2_x(r), FORMULA_TOL) && close(ra, g2_alt_resistance(r), FORMULA_TOL);
        ok &= good;
        notes.push(format!("n={h}: R={r}, x {x:.10} vs {:.10}, R_alt {ra:.10} vs {:.10}", g2_x(r), g2_alt_resistance(r)));
    }
    Ok((ok, notes.join("; ")))
}

fn coincidence(inst: &Instance, closed_form: f64) -> Result<(bool, String), String> {
    let (net, s, t) = (&inst.net, inst.s, inst.t);
    let f = electrical_flow(net, s, t).map_err(err)?;
    let viol = check_alt_kirchhoff(net, &inst.psi, &f, s, t).map_err(err)?;
    let fa = alt_electrical_flow(net, &inst.psi, s, t).map_err(err)?.feasible().map_err(err)?;
    let d = max_diff(f.values(), fa.values());
    let r = energy(net, &f).map_err(err)?;
    let ok = viol <= EXACT_TOL && d <= EXACT_TOL && close(r, closed_form, EXACT_TOL);
    Ok((ok, format!("violation {viol:.1e}, |θ−θ_alt| {d:.1e}, R {r:.10} vs {closed_form:.10}")))
}

fn c5_hierarchical() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for h in [2, 3, 4] {
        let inst = welded_tree(h, 23).map_err(err)?;
        let (good, note) = coincidence(&inst, welded_tree_resistance(h).map_err(err)?)?;
        ok &= good;
        notes.push(format!("h={h}: {note}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let spec = loop {
        let half: Vec<usize> = (0..3).map(|_| [2usize, 4][rng.random_range(0..2)]).collect();
        let mut sizes = vec![1];
        sizes.extend(&half);
        sizes.extend(half.iter().rev());
        sizes.push(1);
        let edges: Vec<usize> = sizes.windows(2).map(|w| w[0].max(w[1]) * [1, 2][rng.random_range(0..2)]).collect();
        if let Ok(spec) = HierarchicalSpec::new(sizes, edges) {
            break spec;
        }
    };
    let inst = hierarchical_1d(&spec, 5).map_err(err)?;
    let (good, note) = coincidence(&inst, spec.closed_form_resistance())?;
    ok &= good;
    notes.push(format!("random spec sizes {:?} edges {:?}: {note}", spec.sizes, spec.edges));
    let (fast, time) = within(start, Duration::from_secs(10));
    notes.push(time);
    Ok((ok && fast, notes.join("; ")))
}

fn phi_for(inst: &Instance) -> Result<(ArcState, f64, f64), String> {
    let (net, s, t) = (&inst.net, inst.s, inst.t);
    let f = alt_electrical_flow(net, &inst.psi, s, t).map_err(err)?.feasible().map_err(err)?;
    let r = energy(net, &f).map_err(err)?;
    let ws = net.vertex_weight(s);
    let pot = alt_edge_potential(net, &inst.psi, s, t).map_err(err)?;
    let p = alt_potential_state(net, &pot.edge, s, r).map_err(err)?;
    Ok((-p.unscale((r * ws).sqrt()), r, ws))
}

fn c6_spectral() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let instances = [example(true).map_err(err)?, graph_g1().map_err(err)?, welded_tree(2, 8).map_err(err)?];
    for inst in &instances {
        let (net, s, t) = (&inst.net, inst.s, inst.t);
        let walk = WalkOperator::for_network(net, Some(&inst.psi), s, t).map_err(err)?;
        let f = alt_electrical_flow(net, &inst.psi, s, t).map_err(err)?.feasible().map_err(err)?;
        let theta = flow_state(net, &f).map_err(err)?;
        let eig = (walk.apply(&theta) - &theta).norm();
        let (phi, r, ws) = phi_for(inst)?;
        let rebuilt = theta.unscale((r * ws).sqrt()) + (&phi - walk.pa() * &phi);
        let dec = (psi_s_plus(net, s).map_err(err)? - rebuilt).norm();
        let good = eig <= EXACT_TOL && dec <= EXACT_TOL;
        ok &= good;
        notes.push(format!("{}: eigen residual {eig:.1e}, decomposition {dec:.1e}", inst.family));
        if inst.family == "g1" {
            continue;
        }
        let mut worst: f64 = 0.0;
        let mut probes = vec![phi.clone()];
        for _ in 0..5 {
            let v = ArcState::from_fn(walk.dim(), |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            probes.push(walk.pb() * v);
        }
        for probe in &probes {
            for eps in GAP_EPS {
                let g = effective_spectral_gap_check(&walk, probe, eps).map_err(err)?;
                ok &= g.holds;
                worst = worst.max(g.lhs / g.rhs.max(f64::MIN_POSITIVE));
            }
        }
        notes.push(format!("{}: gap ratio lhs/rhs ≤ {worst:.3}", inst.family));
    }
    Ok((ok, notes.join("; ")))
}

fn circuit_zero_probability(u: &DMatrix<C64>, psi: &ArcState, steps: usize) -> Vec<f64> {
    let mut powers = Vec::with_capacity(steps);
    let mut cur = psi.clone();
    for _ in 0..steps {
        powers.push(cur.clone());
        cur = u * &cur;
    }
    let norm = 1.0 / steps as f64;
    (0..steps)
        .map(|k| {
            let mut out = ArcState::zeros(psi.len());
            for (t, v) in powers.iter().enumerate() {
                out += v * C64::from_polar(norm, -2.0 * PI * (k * t) as f64 / steps as f64);
            }
            out.norm_squared()
        })
        .collect()
}

fn c7_phase_estimation() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let inst = example(true).map_err(err)?;
    let (phi, r, ws) = phi_for(&inst)?;
    let p = 1.0 / (r * ws);
    let walk = WalkOperator::for_network(&inst.net, Some(&inst.psi), inst.s, inst.t).map_err(err)?;
    let f = alt_electrical_flow(&inst.net, &inst.psi, inst.s, inst.t).map_err(err)?.feasible().map_err(err)?;
    let theta = flow_state(&inst.net, &f).map_err(err)?;
    let psi = psi_s_plus(&inst.net, inst.s).map_err(err)?;
    for steps in PE_STEPS {
        let (pz, post) = walk.pe_zero(&psi, steps).map_err(err)?;
        let slack = 17.0 * PI * PI * phi.norm() / (16.0 * steps as f64);
        let td = trace_distance_pure(&post, &theta);
        let td_bound = (slack / p).sqrt();
        let good = pz >= p - EXACT_TOL && pz <= p + slack && td <= td_bound;
        ok &= good;
        notes.push(format!("T={steps}: p′−p {:.2e} ≤ {slack:.2e}, trace distance {td:.2e} ≤ {td_bound:.2e}", pz - p));
    }
    let c = |x: f64| C64::new(x, 0.0);
    let alpha: f64 = 0.3;
    let pa = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let (co, si) = (alpha.cos(), alpha.sin());
    let pb = DMatrix::from_row_slice(2, 2, &[c(co * co), c(co * si), c(co * si), c(si * si)]);
    let toy = WalkOperator::new(pa, pb).map_err(err)?;
    let state = ArcState::from_vec(vec![c(0.6), C64::new(0.0, 0.8)]);
    let steps = 16usize;
    let (model, _) = toy.pe_zero(&state, steps as u64).map_err(err)?;
    let dist = circuit_zero_probability(toy.matrix(), &state, steps);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut zeros = 0u32;
    for _ in 0..TOY_SHOTS {
        let mut x = rng.random::<f64>();
        let mut k = 0;
        while k + 1 < dist.len() && x >= dist[k] {
            x -= dist[k];
            k += 1;
        }
        zeros += (k == 0) as u32;
    }
    let freq = zeros as f64 / TOY_SHOTS as f64;
    let sigma = (model * (1.0 - model) / TOY_SHOTS as f64).sqrt();
    let good = (freq - model).abs() <= SIGMAS * sigma;
    ok &= good;
    notes.push(format!("toy: model {model:.5}, circuit Monte-Carlo {freq:.5} ({:.2}σ)", (freq - model).abs() / sigma));
    Ok((ok, notes.join("; ")))
}

fn run_alg1(h: usize, seed: u64) -> Result<bool, String> {
    let inst = welded_tree(h, seed).map_err(err)?;
    let params = alg1_params(&inst, DELTA, Mode::Analytic).map_err(err)?;
    let model = QuantumModel::new(&inst, &params).map_err(err)?;
    let o = OracleGraph::for_instance(&inst, seed).map_err(err)?;
    let r = alg1_find_target(&o, &model, &params, seed ^ 0x5eed);
    Ok(r.success && r.target.as_deref().is_some_and(|n| o.is_target(n)))
}

fn c8_alg1() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for h in [2, 3] {
        let wins = (0..ALG1_SEEDS)
            .into_par_iter()
            .map(|seed| run_alg1(h, seed))
            .collect::<Result<Vec<bool>, String>>()?
            .into_iter()
            .filter(|&w| w)
            .count();
        let rate = wins as f64 / ALG1_SEEDS as f64;
        ok &= rate >= ALG1_MIN_RATE;
        notes.push(format!("h={h}: {wins}/{ALG1_SEEDS}"));
    }
    let (fast, time) = within(start, Duration::from_secs(120));
    notes.push(time);
    Ok((ok && fast, notes.join("; ")))
}

fn run_alg2(inst: &Instance, model: &QuantumModel, params: &AlgParams, seed: u64) -> Result<(bool, u64), String> {
    let o = OracleGraph::for_instance(inst, seed).map_err(err)?;
    let r = alg2_find_path(&o, model, params, seed ^ 0xa172).map_err(err)?;
    let ok = match &r.path {
        Some(path) if r.success => {
            let sampled: HashSet<(&str, &str)> =
                r.sampled.iter().flat_map(|(a, b)| [(a.as_str(), b.as_str()), (b.as_str(), a.as_str())]).collect();
            path.windows(2).all(|w| sampled.contains(&(w[0].as_str(), w[1].as_str())))
        }
        _ => false,
    };
    Ok((ok, r.symbolic_queries + r.oracle_queries))
}

fn c9_alg2() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [1, 2] {
        let wins = (0..ALG2_SEEDS)
            .into_par_iter()
            .map(|seed| {
                let inst = welded_circuit(n, seed).map_err(err)?;
                let params = alg2_params(&inst, DELTA, Mode::Analytic).map_err(err)?;
                let model = QuantumModel::new(&inst, &params).map_err(err)?;
                run_alg2(&inst, &model, &params, seed).map(|r| r.0)
            })
            .collect::<Result<Vec<bool>, String>>()?
            .into_iter()
            .filter(|&w| w)
            .count();
        let rate = wins as f64 / ALG2_SEEDS as f64;
        ok &= rate >= ALG2_MIN_RATE;
        notes.push(format!("n={n}: {wins}/{ALG2_SEEDS} valid paths inside S"));
    }
    let (fast, time) = within(start, Duration::from_secs(300));
    notes.push(time);
    Ok((ok && fast, notes.join("; ")))
}

fn baseline_rate(inst: &Instance, middle: usize, budget: u64) -> Result<f64, String> {
    let wins = (0..SEPARATION_BASELINE_TRIALS)
        .into_par_iter()
        .map(|seed| {
            let o = OracleGraph::for_instance(inst, 10_000 + seed).map_err(err)?;
            classical_embedding_baseline(&o, &inst.trees, middle, budget, seed).map(|r| r.won()).map_err(err)
        })
        .collect::<Result<Vec<bool>, String>>()?
        .into_iter()
        .filter(|&w| w)
        .count();
    Ok(wins as f64 / SEPARATION_BASELINE_TRIALS as f64)
}

fn c10_separation() -> Outcome {
    let inst = welded_circuit(3, 1).map_err(err)?;
    let params = alg2_params(&inst, DELTA, Mode::Analytic).map_err(err)?;
    let model = QuantumModel::new(&inst, &params).map_err(err)?;
    let runs = (0..SEPARATION_QUANTUM_TRIALS)
        .into_par_iter()
        .map(|seed| run_alg2(&inst, &model, &params, seed))
        .collect::<Result<Vec<_>, String>>()?;
    let quantum = runs.iter().filter(|r| r.0).count() as f64 / runs.len() as f64;
    let budget = (runs.iter().map(|r| r.1 as f64).sum::<f64>() / runs.len() as f64).round() as u64;
    let middle = altflow::cli::middle_vertex(&inst).map_err(err)?;
    let matched = baseline_rate(&inst, middle, budget)?;
    let vertices = inst.net.n_vertices() as u64;
    let at_v = baseline_rate(&inst, middle, vertices)?;
    let at_16 = baseline_rate(&inst, middle, 16)?;
    let ok = quantum > SEPARATION_QUANTUM_MIN && matched < SEPARATION_BASELINE_MAX;
    Ok((
        ok,
        format!(
            "quantum success {quantum:.2} at mean {budget} queries; baseline success {matched:.2} at that budget, {at_v:.2} at |V|={vertices}, {at_16:.2} at 16 queries"
        ),
    ))
}

fn c11_kkt() -> Outcome {
    let mut worst_alt: f64 = 0.0;
    let mut worst_plain: f64 = 0.0;
    let (mut feasible, mut infeasible, mut tried) = (0, 0, 0u64);
    let mut ok = true;
    let mut seed = 0u64;
    while tried < KKT_NETWORKS as u64 {
        seed += 1;
        let mut rng = common::seeded(seed);
        let n = 3 + (seed % 4) as usize;
        let net = common::random_network(&mut rng, n, 8);
        let (s, t) = (0, n - 1);
        let psi = common::random_alt(&mut rng, &net, s, t);
        if !(0..n).any(|u| psi.has_extra(u)) {
            continue;
        }
        tried += 1;
        let kkt = common::kkt_alt_flow(&net, &psi, s, t);
        match alt_electrical_flow(&net, &psi, s, t).map_err(err)? {
            AltFlow::Feasible(f) => {
                feasible += 1;
                ok &= kkt.residual <= KKT_TOL;
                worst_alt = worst_alt.max(max_diff(f.values(), &kkt.theta));
                let pot = alt_edge_potential(&net, &psi, s, t).map_err(err)?;
                ok &= alt_ohm_violation(&net, &f, &pot.edge) <= KKT_TOL;
            }
            AltFlow::Infeasible { .. } => {
                infeasible += 1;
                ok &= kkt.residual > KKT_TOL;
            }
        }
        let stars = AltNeighbourhoods::stars(&net);
        let plain = electrical_flow(&net, s, t).map_err(err)?;
        let via_alt = alt_electrical_flow(&net, &stars, s, t).map_err(err)?.feasible().map_err(err)?;
        let kkt_plain = common::kkt_alt_flow(&net, &stars, s, t);
        worst_plain = worst_plain
            .max(max_diff(plain.values(), &kkt_plain.theta))
            .max(max_diff(via_alt.values(), &kkt_plain.theta))
            .max(max_diff(plain.values(), &common::laplacian_flow(&net, s, t)));
    }
    ok &= worst_alt <= KKT_TOL && worst_plain <= KKT_TOL;
    Ok((
        ok,
        format!(
            "{tried} networks ({feasible} feasible, {infeasible} infeasible); alt vs KKT {worst_alt:.1e}; no-alternative subcase {worst_plain:.1e}"
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("worked example", c1_worked_example),
        ("infeasibility", c2_infeasibility),
        ("G1", c3_g1),
        ("G2 formulas", c4_g2),
        ("hierarchical coincidence", c5_hierarchical),
        ("spectral properties", c6_spectral),
        ("phase estimation model", c7_phase_estimation),
        ("algorithm 1", c8_alg1),
        ("algorithm 2", c9_alg2),
        ("separation", c10_separation),
        ("KKT equivalence", c11_kkt),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += (!pass) as usize;
        println!(
            "{} criterion {} ({name}): {detail} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
