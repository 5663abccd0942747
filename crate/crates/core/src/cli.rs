use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::alt::{alt_edge_potential_with, alt_electrical_flow_with, alt_ohm_violation, check_alt_kirchhoff, AltFlow};
use crate::error::{Error, Result};
use crate::generators::{self, circuit_junction, HierarchicalSpec, Instance};
use crate::io::{self, FlowReport, SCHEMA};
use crate::network::{energy, unit_flow_violation};
use crate::oracle::{
    alg1_find_target, alg1_params, alg2_find_path, alg2_params, classical_embedding_baseline, default_name_length,
    AlgParams, BaselineOutcome, Mode, OracleGraph, QuantumModel,
};
use crate::solver::{electrical_flow_with, ohm_violation, vertex_potential_with};
use crate::walk::{flow_state, psi_s_plus, trace_distance_pure, WalkOperator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "altflow", version, about = "Electrical and alternative electrical flows, quantum walk models and path-finding experiments")]
pub struct Cli {
    #[command(flatten)]
    pub tol: Tolerances,
    /// Worker threads for batch trials (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative SVD cut-off for pseudoinverses.
    #[arg(long, global = true, env = "ALTFLOW_SVD_REL_TOL", default_value_t = crate::linalg::DEFAULT_SVD_REL_TOL)]
    pub svd_rel_tol: f64,
    /// Residual above which an alternative flow is reported infeasible.
    #[arg(long, global = true, env = "ALTFLOW_FEASIBILITY_TOL", default_value_t = crate::alt::DEFAULT_FEASIBILITY_TOL)]
    pub feasibility_tol: f64,
    /// Eigenphases closer than this are grouped.
    #[arg(long, global = true, env = "ALTFLOW_EIG_PHASE_TOL", default_value_t = crate::walk::DEFAULT_EIG_PHASE_TOL)]
    pub eig_phase_tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance and write its JSON.
    Gen(GenArgs),
    /// Electrical flow, resistance and vertex potentials.
    Flow(SolveArgs),
    /// Alternative electrical flow, resistance and edge potentials.
    Altflow(SolveArgs),
    /// Eigenphases of the walk with multiplicities and overlaps with ψ_s^+ (CSV).
    WalkSpectrum(SpectrumArgs),
    /// Zero-outcome phase estimation on ψ_s^+.
    Pe(PeArgs),
    /// Batch runs of the target-finding algorithm.
    RunAlg1(RunArgs),
    /// Batch runs of the path-finding algorithm.
    RunAlg2(RunArgs),
    /// Batch runs of the classical random-embedding baseline.
    RunBaseline(BaselineArgs),
    /// Regression checks on the small worked examples.
    Verify,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Example,
    ExampleAlt,
    Counterexample,
    G1,
    G2,
    Circuit,
    WeldedTree,
    Hierarchical,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    pub family: Family,
    /// Tree depth for g2, number of layers for circuit.
    #[arg(long)]
    pub n: Option<usize>,
    /// Welded tree height.
    #[arg(long)]
    pub h: Option<usize>,
    /// Comma-separated layer sizes for hierarchical.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Comma-separated edge counts for hierarchical.
    #[arg(long, value_delimiter = ',')]
    pub edges: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Instance JSON.
    pub input: PathBuf,
    /// Source label, overriding the file.
    #[arg(long)]
    pub s: Option<String>,
    /// Sink label, overriding the file.
    #[arg(long)]
    pub t: Option<String>,
}

impl InputArgs {
    fn load(&self) -> Result<Instance> {
        io::read_instance(&self.input, self.s.as_deref(), self.t.as_deref())
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Use the star-state walk instead of the alternative one.
    #[arg(long)]
    pub classical: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Phase estimation step counts T.
    #[arg(long, value_delimiter = ',', default_values_t = [10u64, 100, 1000, 10000])]
    pub steps: Vec<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    pub mode: ModeArg,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Analytic,
    Faithful,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Analytic => Mode::Analytic,
            ModeArg::Faithful => Mode::Faithful,
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    pub mode: ModeArg,
    /// Per-trial rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Oracle queries allowed per trial.
    #[arg(long)]
    pub budget: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(code) => code,
        Err(Error::Infeasible(r)) => {
            eprintln!("infeasible: no alternative electrical flow (residual {r:e})");
            EXIT_INFEASIBLE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let tol = cli.tol;
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Flow(a) => cmd_flow(a, tol),
        Command::Altflow(a) => cmd_altflow(a, tol),
        Command::WalkSpectrum(a) => cmd_spectrum(a, tol),
        Command::Pe(a) => cmd_pe(a, tol),
        Command::RunAlg1(a) => cmd_run(a, Algorithm::Alg1),
        Command::RunAlg2(a) => cmd_run(a, Algorithm::Alg2),
        Command::RunBaseline(a) => cmd_baseline(a),
        Command::Verify => cmd_verify(),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut h = std::io::stdout().lock();
            h.write_all(text.as_bytes())?;
            h.flush()?;
        }
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn need(v: Option<usize>, flag: &str) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for this family")))
}

pub fn generate(a: &GenArgs) -> Result<Instance> {
    match a.family {
        Family::Example => generators::example(false),
        Family::ExampleAlt => generators::example(true),
        Family::Counterexample => generators::counterexample(),
        Family::G1 => generators::graph_g1(),
        Family::G2 => generators::graph_g2(need(a.n.or(a.h), "n")?, a.seed),
        Family::Circuit => generators::welded_circuit(need(a.n, "n")?, a.seed),
        Family::WeldedTree => generators::welded_tree(need(a.h, "h")?, a.seed),
        Family::Hierarchical => {
            generators::hierarchical_1d(&HierarchicalSpec::new(a.sizes.clone(), a.edges.clone())?, a.seed)
        }
    }
}

fn cmd_gen(a: &GenArgs) -> Result<i32> {
    let inst = generate(a)?;
    emit(&a.out, &json(&io::instance_to_json(&inst))?)?;
    Ok(EXIT_OK)
}

fn cmd_flow(a: &SolveArgs, tol: Tolerances) -> Result<i32> {
    let inst = a.input.load()?;
    let (net, s, t) = (&inst.net, inst.s, inst.t);
    let f = electrical_flow_with(net, s, t, tol.svd_rel_tol)?;
    let p = vertex_potential_with(net, s, t, tol.svd_rel_tol)?;
    let report = FlowReport {
        schema: SCHEMA,
        kind: "electrical".into(),
        s: net.label(s).into(),
        t: net.label(t).into(),
        resistance: energy(net, &f)?,
        flow: io::flow_values(net, &f),
        potential: Some(io::vertex_potential_map(net, &p)),
        edge_potential: None,
        coefficients: None,
        residuals: BTreeMap::from([
            ("unit_flow".to_string(), unit_flow_violation(net, &f, s, t)?),
            ("ohm".to_string(), ohm_violation(net, &f, &p)),
        ]),
    };
    write_report(a, &report)
}

fn cmd_altflow(a: &SolveArgs, tol: Tolerances) -> Result<i32> {
    let inst = a.input.load()?;
    let (net, psi, s, t) = (&inst.net, &inst.psi, inst.s, inst.t);
    let f = match alt_electrical_flow_with(net, psi, s, t, tol.svd_rel_tol, tol.feasibility_tol)? {
        AltFlow::Feasible(f) => f,
        AltFlow::Infeasible { residual } => return Err(Error::Infeasible(residual)),
    };
    let pot = alt_edge_potential_with(net, psi, s, t, tol.svd_rel_tol, tol.feasibility_tol)?;
    let report = FlowReport {
        schema: SCHEMA,
        kind: "alternative".into(),
        s: net.label(s).into(),
        t: net.label(t).into(),
        resistance: energy(net, &f)?,
        flow: io::flow_values(net, &f),
        potential: None,
        edge_potential: Some(io::edge_potential_values(net, &pot.edge)),
        coefficients: Some(io::coefficients(net, &pot)),
        residuals: BTreeMap::from([
            ("unit_flow".to_string(), unit_flow_violation(net, &f, s, t)?),
            ("alt_kirchhoff".to_string(), check_alt_kirchhoff(net, psi, &f, s, t)?),
            ("alt_ohm".to_string(), alt_ohm_violation(net, &f, &pot.edge)),
        ]),
    };
    write_report(a, &report)
}

fn write_report(a: &SolveArgs, r: &FlowReport) -> Result<i32> {
    let text = match a.format {
        Format::Json => json(r)?,
        Format::Csv => io::flow_report_csv(r)?,
    };
    emit(&a.out, &text)?;
    Ok(EXIT_OK)
}

fn walk_for(inst: &Instance, classical: bool, tol: Tolerances) -> Result<WalkOperator> {
    let psi = if classical { None } else { Some(&inst.psi) };
    WalkOperator::for_network_with_tol(&inst.net, psi, inst.s, inst.t, tol.eig_phase_tol)
}

#[derive(Serialize)]
struct SpectrumRow {
    phase: f64,
    multiplicity: usize,
    overlap: f64,
}

fn cmd_spectrum(a: &SpectrumArgs, tol: Tolerances) -> Result<i32> {
    let inst = a.input.load()?;
    let walk = walk_for(&inst, a.classical, tol)?;
    let start = psi_s_plus(&inst.net, inst.s)?;
    let rows: Vec<SpectrumRow> = walk
        .spectrum(&start)
        .into_iter()
        .map(|(phase, multiplicity, overlap)| SpectrumRow { phase, multiplicity, overlap })
        .collect();
    emit(&a.out, &io::rows_csv(&rows)?)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PeRow {
    steps: u64,
    p_zero: f64,
    /// 1/(R^alt w_s), the weight of ψ_s^+ on the zero-phase space.
    p_ideal: f64,
    trace_distance_to_flow_state: f64,
}

#[derive(Serialize)]
struct PeReport {
    schema: u32,
    mode: Mode,
    resistance: f64,
    rows: Vec<PeRow>,
}

fn cmd_pe(a: &PeArgs, tol: Tolerances) -> Result<i32> {
    let inst = a.input.load()?;
    let (net, s, t) = (&inst.net, inst.s, inst.t);
    let f = alt_electrical_flow_with(net, &inst.psi, s, t, tol.svd_rel_tol, tol.feasibility_tol)?.feasible()?;
    let r = energy(net, &f)?;
    let theta = flow_state(net, &f)?;
    let walk = walk_for(&inst, false, tol)?;
    let start = psi_s_plus(net, s)?;
    let mode = Mode::from(a.mode);
    let rows = a
        .steps
        .iter()
        .map(|&steps| {
            let z = crate::oracle::zero_outcome(&walk, &start, steps, mode)?;
            Ok(PeRow {
                steps,
                p_zero: z.p_zero,
                p_ideal: 1.0 / (r * net.vertex_weight(s)),
                trace_distance_to_flow_state: trace_distance_pure(&z.post, &theta),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(&a.out, &json(&PeReport { schema: SCHEMA, mode, resistance: r, rows })?)?;
    Ok(EXIT_OK)
}

#[derive(Clone, Copy, Debug)]
enum Algorithm {
    Alg1,
    Alg2,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    pub success: bool,
    pub pe_runs: u64,
    pub samples: u64,
    pub symbolic_queries: u64,
    pub oracle_queries: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub schema: u32,
    pub algorithm: String,
    pub family: String,
    pub params: AlgParams,
    pub p_zero: f64,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub mean_symbolic_queries: f64,
    pub mean_oracle_queries: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
}

fn trial_seeds(seed: u64, i: u64) -> (u64, u64) {
    let base = seed.wrapping_add(i).wrapping_mul(2);
    (base, base.wrapping_add(1))
}

fn cmd_run(a: &RunArgs, alg: Algorithm) -> Result<i32> {
    let inst = a.input.load()?;
    let mode = Mode::from(a.mode);
    let params = match alg {
        Algorithm::Alg1 => alg1_params(&inst, a.delta, mode)?,
        Algorithm::Alg2 => alg2_params(&inst, a.delta, mode)?,
    };
    let model = QuantumModel::new(&inst, &params)?;
    let ell = default_name_length(&inst);
    let results = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let (name_seed, alg_seed) = trial_seeds(a.seed, i);
            let o = OracleGraph::new(&inst.net, inst.s, inst.t, ell, name_seed)?;
            let row = |success, pe_runs, samples, symbolic_queries, oracle_queries| TrialRow {
                trial: i,
                seed: name_seed,
                success,
                pe_runs,
                samples,
                symbolic_queries,
                oracle_queries,
            };
            Ok(match alg {
                Algorithm::Alg1 => {
                    let r = alg1_find_target(&o, &model, &params, alg_seed);
                    (row(r.success, r.pe_runs, r.samples, r.symbolic_queries, r.oracle_queries), None)
                }
                Algorithm::Alg2 => {
                    let r = alg2_find_path(&o, &model, &params, alg_seed)?;
                    let path = r.success.then(|| r.path.clone()).flatten();
                    (row(r.success, r.pe_runs, r.samples, r.symbolic_queries, r.oracle_queries), path)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<TrialRow> = results.iter().map(|(r, _)| r.clone()).collect();
    let successes = rows.iter().filter(|r| r.success).count() as u64;
    let n = a.trials.max(1) as f64;
    let summary = RunSummary {
        schema: SCHEMA,
        algorithm: match alg {
            Algorithm::Alg1 => "alg1".into(),
            Algorithm::Alg2 => "alg2".into(),
        },
        family: inst.family.clone(),
        params,
        p_zero: model.outcome.p_zero,
        seed: a.seed,
        trials: a.trials,
        successes,
        success_rate: successes as f64 / n,
        mean_symbolic_queries: rows.iter().map(|r| r.symbolic_queries as f64).sum::<f64>() / n,
        mean_oracle_queries: rows.iter().map(|r| r.oracle_queries as f64).sum::<f64>() / n,
        path: results.into_iter().find_map(|(_, p)| p),
    };
    if let Some(p) = &a.csv {
        std::fs::write(p, io::rows_csv(&rows)?)?;
    }
    emit(&a.out, &json(&summary)?)?;
    Ok(if successes > 0 { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Clone, Debug, Serialize)]
pub struct BaselineRow {
    pub trial: u64,
    pub seed: u64,
    pub outcome: String,
    pub queries: u64,
    pub embedded: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaselineSummary {
    pub schema: u32,
    pub algorithm: String,
    pub family: String,
    pub budget: u64,
    pub seed: u64,
    pub trials: u64,
    pub found_middle: u64,
    pub found_cycle: u64,
    pub exhausted: u64,
    pub success_rate: f64,
    pub mean_queries: f64,
}

/// Game A target: the junction opening the middle layer of a circuit.
pub fn middle_vertex(inst: &Instance) -> Result<usize> {
    let layers = inst.params.get("n").or(inst.params.get("layers")).copied().unwrap_or(1) as usize;
    circuit_junction(inst, layers.div_ceil(2).max(1))
        .ok_or_else(|| Error::InvalidArgument("instance has no canonical path to locate the middle junction".into()))
}

fn cmd_baseline(a: &BaselineArgs) -> Result<i32> {
    let inst = a.input.load()?;
    let middle = middle_vertex(&inst)?;
    let ell = default_name_length(&inst);
    let rows = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let (name_seed, alg_seed) = trial_seeds(a.seed, i);
            let o = OracleGraph::new(&inst.net, inst.s, inst.t, ell, name_seed)?;
            let r = classical_embedding_baseline(&o, &inst.trees, middle, a.budget, alg_seed)?;
            let outcome = match r.outcome {
                BaselineOutcome::FoundMiddle => "found-middle".to_string(),
                BaselineOutcome::FoundCycle(k) => format!("found-cycle-{}", serde_json::to_value(k)?.as_str().unwrap_or("")),
                BaselineOutcome::Exhausted => "exhausted".to_string(),
            };
            Ok(BaselineRow { trial: i, seed: name_seed, outcome, queries: r.queries, embedded: r.embedded })
        })
        .collect::<Result<Vec<_>>>()?;
    let count = |p: &str| rows.iter().filter(|r| r.outcome.starts_with(p)).count() as u64;
    let n = a.trials.max(1) as f64;
    let (middle_hits, cycles, exhausted) = (count("found-middle"), count("found-cycle"), count("exhausted"));
    let summary = BaselineSummary {
        schema: SCHEMA,
        algorithm: "baseline".into(),
        family: inst.family.clone(),
        budget: a.budget,
        seed: a.seed,
        trials: a.trials,
        found_middle: middle_hits,
        found_cycle: cycles,
        exhausted,
        success_rate: (middle_hits + cycles) as f64 / n,
        mean_queries: rows.iter().map(|r| r.queries as f64).sum::<f64>() / n,
    };
    if let Some(p) = &a.csv {
        std::fs::write(p, io::rows_csv(&rows)?)?;
    }
    emit(&a.out, &json(&summary)?)?;
    Ok(if middle_hits + cycles > 0 { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, got: f64, want: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        passed: (got - want).abs() <= tol,
        detail: format!("got {got:.12}, expected {want:.12}"),
    }
}

/// The worked-example, counterexample and G₁ values.
pub fn regression_suite() -> Result<Vec<Check>> {
    const TOL: f64 = 1e-9;
    let mut out = Vec::new();
    let ex = generators::example(false)?;
    out.push(check("example R", crate::solver::effective_resistance(&ex.net, ex.s, ex.t)?, 11.0 / 3.0, TOL));
    let p = crate::solver::vertex_potential(&ex.net, ex.s, ex.t)?;
    out.push(check("example p_s", p.values[ex.s], 11.0 / 3.0, TOL));

    let alt = generators::example(true)?;
    let f = crate::alt::alt_electrical_flow(&alt.net, &alt.psi, alt.s, alt.t)?.feasible()?;
    out.push(check("example R_alt", energy(&alt.net, &f)?, 4.0, TOL));
    let pot = crate::alt::alt_edge_potential(&alt.net, &alt.psi, alt.s, alt.t)?;
    out.push(check("example Alt-Ohm residual", alt_ohm_violation(&alt.net, &f, &pot.edge), 0.0, TOL));

    let cx = generators::counterexample()?;
    let infeasible = matches!(
        crate::alt::alt_electrical_flow(&cx.net, &cx.psi, cx.s, cx.t)?,
        AltFlow::Infeasible { .. }
    );
    out.push(Check { name: "counterexample infeasible".into(), passed: infeasible, detail: String::new() });

    let g1 = generators::graph_g1()?;
    let f = crate::alt::alt_electrical_flow(&g1.net, &g1.psi, g1.s, g1.t)?.feasible()?;
    out.push(check("G1 R_alt", energy(&g1.net, &f)?, 47.0 / 9.0, TOL));
    let (s, v2) = (g1.s, g1.net.vertex("v2")?);
    out.push(check("G1 x", f.get(&g1.net, s, v2)?, 5.0 / 9.0, TOL));
    Ok(out)
}

fn cmd_verify() -> Result<i32> {
    let checks = regression_suite()?;
    let mut h = std::io::stdout().lock();
    for c in &checks {
        writeln!(h, "{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_FAILURE })
}
