use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alt::alt_edge_potential;
use crate::error::{Error, Result};
use crate::generators::Instance;
use crate::network::{energy, ArcState, Network};
use crate::solver::{electrical_flow, vertex_potential};
use crate::walk::{alt_potential_state, potential_state, psi_s_plus, WalkOperator};

/// Largest T accepted in faithful mode, where every step is a matrix-vector
/// product.
pub const FAITHFUL_MAX_STEPS: u64 = 2_000_000;

/// Adjacency-list oracle over random ℓ-bit vertex names. The start vertex is
/// named 0^ℓ.
#[derive(Debug)]
pub struct OracleGraph {
    net: Network,
    names: Vec<String>,
    index: HashMap<String, usize>,
    order: Vec<Vec<usize>>,
    ell: usize,
    start: usize,
    target: usize,
    queries: AtomicU64,
}

/// ℓ for a family: 3n for the circuit, 2h for welded trees, raised to
/// ⌈log₂|V|⌉ + 2 when that is larger.
pub fn default_name_length(inst: &Instance) -> usize {
    let n = inst.net.n_vertices();
    let floor = (usize::BITS - (n.max(1) - 1).leading_zeros()) as usize + 2;
    let family = match inst.family.as_str() {
        "circuit" => inst.params.get("n").map(|&n| 3 * n as usize),
        "welded-tree" => inst.params.get("h").map(|&h| 2 * h as usize),
        _ => None,
    };
    family.unwrap_or(0).max(floor)
}

impl OracleGraph {
    pub fn new(net: &Network, start: usize, target: usize, ell: usize, seed: u64) -> Result<Self> {
        let n = net.n_vertices();
        if start >= n || target >= n {
            return Err(Error::Oracle("terminal out of range".into()));
        }
        if ell == 0 || (ell < 64 && (1u64 << ell) <= n as u64) {
            return Err(Error::Oracle(format!("2^{ell} names cannot label {n} vertices")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zero = "0".repeat(ell);
        let mut taken: HashSet<String> = HashSet::from([zero.clone()]);
        let mut names = vec![String::new(); n];
        names[start] = zero;
        for (u, slot) in names.iter_mut().enumerate() {
            if u == start {
                continue;
            }
            loop {
                let cand: String = (0..ell).map(|_| if rng.random::<bool>() { '1' } else { '0' }).collect();
                if taken.insert(cand.clone()) {
                    *slot = cand;
                    break;
                }
            }
        }
        let index = names.iter().enumerate().map(|(u, s)| (s.clone(), u)).collect();
        let order = (0..n)
            .map(|u| {
                let mut nb: Vec<usize> = net.incident(u).iter().map(|&(v, _)| v).collect();
                nb.shuffle(&mut rng);
                nb
            })
            .collect();
        Ok(OracleGraph { net: net.clone(), names, index, order, ell, start, target, queries: AtomicU64::new(0) })
    }

    pub fn for_instance(inst: &Instance, seed: u64) -> Result<Self> {
        OracleGraph::new(&inst.net, inst.s, inst.t, default_name_length(inst), seed)
    }

    pub fn name_length(&self) -> usize {
        self.ell
    }

    pub fn start_name(&self) -> &str {
        &self.names[self.start]
    }

    /// Neighbour names of `name`, or `None` (⊥) for an unused string. Every
    /// well-formed call is counted.
    pub fn query(&self, name: &str) -> Result<Option<Vec<String>>> {
        if name.len() != self.ell || !name.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Oracle(format!("expected a {}-bit string, got {name:?}", self.ell)));
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.index.get(name).map(|&u| self.order[u].iter().map(|&v| self.names[v].clone()).collect()))
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// The zero-query check "is this vertex t".
    pub fn is_target(&self, name: &str) -> bool {
        self.index.get(name) == Some(&self.target)
    }

    /// True when `names` is an s-t walk along edges of the graph.
    pub fn is_valid_path(&self, names: &[String]) -> bool {
        let ids: Option<Vec<usize>> = names.iter().map(|n| self.index.get(n).copied()).collect();
        match ids {
            Some(ids) if !ids.is_empty() => {
                ids[0] == self.start
                    && *ids.last().unwrap() == self.target
                    && ids.windows(2).all(|w| self.net.edge_between(w[0], w[1]).is_some())
            }
            _ => false,
        }
    }

    /// True when every edge of the vertex path `path` appears in `edges`.
    pub fn covers_path(&self, path: &[usize], edges: &[(String, String)]) -> bool {
        let set: HashSet<(&str, &str)> =
            edges.iter().flat_map(|(a, b)| [(a.as_str(), b.as_str()), (b.as_str(), a.as_str())]).collect();
        path.windows(2).all(|w| set.contains(&(self.names[w[0]].as_str(), self.names[w[1]].as_str())))
    }

    fn name(&self, u: usize) -> &str {
        &self.names[u]
    }

    fn vertex_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Faithful,
}

/// Phase estimation on ψ_s^+ conditioned on outcome 0, computed once and
/// reused by every attempt.
#[derive(Clone, Debug)]
pub struct ZeroOutcome {
    pub p_zero: f64,
    pub post: ArcState,
}

pub fn zero_outcome(walk: &WalkOperator, start: &ArcState, steps: u64, mode: Mode) -> Result<ZeroOutcome> {
    match mode {
        Mode::Analytic => {
            let (p_zero, post) = walk.pe_zero(start, steps)?;
            Ok(ZeroOutcome { p_zero, post })
        }
        Mode::Faithful => {
            if steps > FAITHFUL_MAX_STEPS {
                return Err(Error::InvalidArgument(format!(
                    "faithful mode supports at most {FAITHFUL_MAX_STEPS} steps, got {steps}"
                )));
            }
            let avg = walk.averaged_evolution(start, steps)?;
            let p_zero = avg.norm_squared();
            let post = if p_zero > 0.0 { avg.unscale(p_zero.sqrt()) } else { avg };
            Ok(ZeroOutcome { p_zero, post })
        }
    }
}

fn sample_slot(state: &ArcState, rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    let mut r = rng.random::<f64>() * total;
    for (k, z) in state.iter().enumerate() {
        r -= z.norm_sqr();
        if r < 0.0 {
            return k;
        }
    }
    state.len() - 1
}

/// Probability that measuring `state` yields an arc touching `t`.
pub fn target_edge_probability(net: &Network, state: &ArcState, t: usize) -> f64 {
    let m = net.n_edges();
    (0..m)
        .filter(|&e| {
            let (a, b) = net.arc(e);
            a == t || b == t
        })
        .map(|e| state[e].norm_sqr() + state[m + e].norm_sqr())
        .sum()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgParams {
    pub delta: f64,
    pub t1: u64,
    pub t2: u64,
    pub eps: f64,
    pub pe_steps: u64,
    pub queries_per_step: u64,
    pub mode: Mode,
}

impl AlgParams {
    /// Oracle calls charged for one phase-estimation run: T walk steps plus
    /// one query to prepare the start state.
    pub fn queries_per_run(&self) -> u64 {
        self.pe_steps.saturating_mul(self.queries_per_step).saturating_add(1)
    }
}

fn pe_steps(eps: f64, resistance: f64, ws: f64, p_norm: f64) -> u64 {
    let precision = eps * eps / ((resistance * ws).sqrt() * p_norm);
    (1.0 / precision).ceil().max(1.0) as u64
}

/// The Algorithm 1 constants: T₁ = ⌈4RD⌉, T₂ = ⌈4RDw_n ln(1/δ)⌉,
/// ε = 1/(2RDw_n), T = ⌈√(Rw_s)‖p‖/ε²⌉.
pub fn alg1_params(inst: &Instance, delta: f64, mode: Mode) -> Result<AlgParams> {
    check_delta(delta)?;
    let net = &inst.net;
    let (s, t) = (inst.s, inst.t);
    let f = electrical_flow(net, s, t)?;
    let r = energy(net, &f)?;
    let d = (0..net.n_vertices()).filter(|&u| u != s && u != t).map(|u| net.degree(u)).max().unwrap_or(1) as f64;
    let wn = net.incident(t).iter().map(|&(_, e)| net.weight(e)).fold(0.0, f64::max);
    let ws = net.vertex_weight(s);
    let p = potential_state(net, &vertex_potential(net, s, t)?, s, r)?;
    let eps = 1.0 / (2.0 * r * d * wn);
    Ok(AlgParams {
        delta,
        t1: (4.0 * r * d).ceil() as u64,
        t2: (4.0 * r * d * wn * (1.0 / delta).ln()).ceil().max(1.0) as u64,
        eps,
        pe_steps: pe_steps(eps, r, ws, p.norm().max(f64::MIN_POSITIVE)),
        queries_per_step: 2,
        mode,
    })
}

/// The Algorithm 2 constants: T₁ = ⌈4R^alt⌉, T₂ = ⌈4R^alt ln(|P|/δ)⌉ with
/// |P| = 4n, ε = 1/(4n²), T = ⌈√(R^alt w_s)‖p^alt‖/ε²⌉.
pub fn alg2_params(inst: &Instance, delta: f64, mode: Mode) -> Result<AlgParams> {
    check_delta(delta)?;
    let net = &inst.net;
    let (s, t) = (inst.s, inst.t);
    let f = crate::alt::alt_electrical_flow(net, &inst.psi, s, t)?.feasible()?;
    let r = energy(net, &f)?;
    let layers = inst.params.get("layers").or(inst.params.get("n")).copied().unwrap_or(1).max(1) as f64;
    let path_len = inst.path.as_ref().map(|p| p.len().saturating_sub(1)).unwrap_or(4 * layers as usize) as f64;
    let pot = alt_edge_potential(net, &inst.psi, s, t)?;
    let p = alt_potential_state(net, &pot.edge, s, r)?;
    let eps = 1.0 / (4.0 * layers * layers);
    Ok(AlgParams {
        delta,
        t1: (4.0 * r).ceil() as u64,
        t2: (4.0 * r * (path_len / delta).ln()).ceil().max(1.0) as u64,
        eps,
        pe_steps: pe_steps(eps, r, net.vertex_weight(s), p.norm().max(f64::MIN_POSITIVE)),
        queries_per_step: 2,
        mode,
    })
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("δ must lie in (0,1), got {delta}")))
    }
}

/// The walk U_{AB^alt}, ψ_s^+ and the zero-outcome model for an instance.
#[derive(Clone, Debug)]
pub struct QuantumModel {
    pub walk: WalkOperator,
    pub start: ArcState,
    pub outcome: ZeroOutcome,
}

impl QuantumModel {
    pub fn new(inst: &Instance, params: &AlgParams) -> Result<Self> {
        let walk = WalkOperator::for_network(&inst.net, Some(&inst.psi), inst.s, inst.t)?;
        let start = psi_s_plus(&inst.net, inst.s)?;
        let outcome = zero_outcome(&walk, &start, params.pe_steps, params.mode)?;
        Ok(QuantumModel { walk, start, outcome })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Alg1Result {
    pub success: bool,
    pub target: Option<String>,
    pub pe_runs: u64,
    pub samples: u64,
    pub symbolic_queries: u64,
    pub oracle_queries: u64,
}

/// Up to T₂ rounds of: up to T₁ phase-estimation attempts, then one
/// measurement of the post-selected state and the target check.
pub fn alg1_find_target(o: &OracleGraph, model: &QuantumModel, params: &AlgParams, seed: u64) -> Alg1Result {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let before = o.query_count();
    let mut pe_runs = 0u64;
    let mut samples = 0u64;
    let mut target = None;
    'outer: for _ in 0..params.t2 {
        if !attempt_zero(model.outcome.p_zero, params.t1, &mut pe_runs, &mut rng) {
            continue;
        }
        samples += 1;
        let (u, v) = o.net.slot_arc(sample_slot(&model.outcome.post, &mut rng));
        for w in [u, v] {
            if o.is_target(o.name(w)) {
                target = Some(o.name(w).to_string());
                break 'outer;
            }
        }
    }
    Alg1Result {
        success: target.is_some(),
        target,
        pe_runs,
        samples,
        symbolic_queries: pe_runs.saturating_mul(params.queries_per_run()),
        oracle_queries: o.query_count() - before,
    }
}

fn attempt_zero(p_zero: f64, t1: u64, runs: &mut u64, rng: &mut ChaCha8Rng) -> bool {
    for _ in 0..t1 {
        *runs += 1;
        if rng.random::<f64>() < p_zero {
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Alg2Result {
    pub success: bool,
    pub path: Option<Vec<String>>,
    pub sampled: Vec<(String, String)>,
    pub pe_runs: u64,
    pub samples: u64,
    pub symbolic_queries: u64,
    pub oracle_queries: u64,
}

/// Samples edges of the approximate alternative flow state into S, finds t
/// among the sampled names by its degree and searches S for an s-t path.
pub fn alg2_find_path(o: &OracleGraph, model: &QuantumModel, params: &AlgParams, seed: u64) -> Result<Alg2Result> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let before = o.query_count();
    let mut pe_runs = 0u64;
    let mut sampled = Vec::new();
    for _ in 0..params.t2 {
        if !attempt_zero(model.outcome.p_zero, params.t1, &mut pe_runs, &mut rng) {
            continue;
        }
        let (u, v) = o.net.slot_arc(sample_slot(&model.outcome.post, &mut rng));
        sampled.push((o.name(u).to_string(), o.name(v).to_string()));
    }
    let s_name = o.start_name().to_string();
    let names: BTreeSet<&str> = sampled.iter().flat_map(|(a, b)| [a.as_str(), b.as_str()]).collect();
    let mut t_name = None;
    for name in names {
        if name == s_name {
            continue;
        }
        if let Some(nb) = o.query(name)? {
            if nb.len() == 1 {
                t_name = Some(name.to_string());
                break;
            }
        }
    }
    let path = t_name.and_then(|t| bfs_path(&sampled, &s_name, &t));
    let samples = sampled.len() as u64;
    Ok(Alg2Result {
        success: path.as_ref().is_some_and(|p| o.is_valid_path(p)),
        path,
        sampled,
        pe_runs,
        samples,
        symbolic_queries: pe_runs.saturating_mul(params.queries_per_run()),
        oracle_queries: o.query_count() - before,
    })
}

/// Shortest path in the sampled subgraph, neighbours explored in
/// lexicographic order.
pub fn bfs_path(edges: &[(String, String)], s: &str, t: &str) -> Option<Vec<String>> {
    let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (a, b) in edges {
        if a != b {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
    }
    if s == t {
        return Some(vec![s.to_string()]);
    }
    let mut prev: HashMap<&str, &str> = HashMap::new();
    let mut queue = VecDeque::from([s]);
    let mut seen = HashSet::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in adj.get(u).into_iter().flatten() {
            if seen.insert(v) {
                prev.insert(v, u);
                if v == t {
                    let mut path = vec![t.to_string()];
                    let mut cur = t;
                    while let Some(&p) = prev.get(cur) {
                        path.push(p.to_string());
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleKind {
    /// Closed inside one welded tree through at most one of its roots.
    SingleRoot,
    /// Passes through both roots of some welded tree.
    TwoRoot,
    /// Any cycle in a graph without welded-tree bookkeeping.
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "cycle")]
pub enum BaselineOutcome {
    FoundMiddle,
    FoundCycle(CycleKind),
    Exhausted,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaselineResult {
    pub outcome: BaselineOutcome,
    pub queries: u64,
    pub embedded: usize,
}

impl BaselineResult {
    pub fn won(&self) -> bool {
        self.outcome != BaselineOutcome::Exhausted
    }
}

struct Node {
    name: String,
    parent: Option<usize>,
}

/// Game A: grows a random embedding of a rooted binary tree from s, one
/// oracle query per expanded node, until it maps a node onto `middle`,
/// closes a cycle, or runs out of budget. Nodes mapped to s or `middle` are
/// never expanded.
pub fn classical_embedding_baseline(
    o: &OracleGraph,
    trees: &[(usize, usize)],
    middle: usize,
    budget: u64,
    seed: u64,
) -> Result<BaselineResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let before = o.query_count();
    let s_name = o.start_name().to_string();
    let middle_name = o.name(middle).to_string();
    let mut nodes = vec![Node { name: s_name.clone(), parent: None }];
    let mut visited: HashMap<String, usize> = HashMap::from([(s_name.clone(), 0)]);
    let mut frontier = vec![0usize];
    let finish = |outcome, nodes: &Vec<Node>| BaselineResult { outcome, queries: o.query_count() - before, embedded: nodes.len() };
    if s_name == middle_name {
        return Ok(finish(BaselineOutcome::FoundMiddle, &nodes));
    }
    while !frontier.is_empty() && o.query_count() - before < budget {
        let pick = rng.random_range(0..frontier.len());
        let i = frontier.swap_remove(pick);
        let parent_name = nodes[i].parent.map(|p| nodes[p].name.clone());
        let nb = o.query(&nodes[i].name)?.ok_or_else(|| Error::Oracle("embedded vertex has no name".into()))?;
        let mut children: Vec<String> = nb.into_iter().filter(|v| Some(v) != parent_name.as_ref()).collect();
        children.shuffle(&mut rng);
        for c in children {
            if let Some(&j) = visited.get(&c) {
                let kind = classify_cycle(o, &nodes, i, j, trees);
                return Ok(finish(BaselineOutcome::FoundCycle(kind), &nodes));
            }
            nodes.push(Node { name: c.clone(), parent: Some(i) });
            let k = nodes.len() - 1;
            visited.insert(c.clone(), k);
            if c == middle_name {
                return Ok(finish(BaselineOutcome::FoundMiddle, &nodes));
            }
            if c != s_name {
                frontier.push(k);
            }
        }
    }
    Ok(finish(BaselineOutcome::Exhausted, &nodes))
}

fn ancestors(nodes: &[Node], mut i: usize) -> Vec<usize> {
    let mut out = vec![i];
    while let Some(p) = nodes[i].parent {
        out.push(p);
        i = p;
    }
    out
}

fn classify_cycle(o: &OracleGraph, nodes: &[Node], a: usize, b: usize, trees: &[(usize, usize)]) -> CycleKind {
    if trees.is_empty() {
        return CycleKind::Other;
    }
    let pa = ancestors(nodes, a);
    let pb = ancestors(nodes, b);
    let in_b: HashSet<usize> = pb.iter().copied().collect();
    let lca = *pa.iter().find(|x| in_b.contains(x)).expect("common root");
    let mut on_cycle: HashSet<usize> = HashSet::new();
    for path in [&pa, &pb] {
        for &x in path.iter() {
            if let Some(v) = o.vertex_of(&nodes[x].name) {
                on_cycle.insert(v);
            }
            if x == lca {
                break;
            }
        }
    }
    if trees.iter().any(|(r1, r2)| on_cycle.contains(r1) && on_cycle.contains(r2)) {
        CycleKind::TwoRoot
    } else {
        CycleKind::SingleRoot
    }
}
