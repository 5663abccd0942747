use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::alt::AltNeighbourhoods;
use crate::error::{Error, Result};
use crate::linalg::projector_defect;
use crate::network::{energy, ArcState, EdgePotential, Flow, Network, VertexPotential, C64};
use crate::solver::check_terminals;

pub const DEFAULT_EIG_PHASE_TOL: f64 = 1e-9;
pub const PROJECTOR_TOL: f64 = 1e-9;
pub const UNITARY_TOL: f64 = 1e-9;
const EIGEN_TOL: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-7;
const MIX: f64 = 0.6180339887;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// SWAP exchanging |u,v⟩ and |v,u⟩.
pub fn swap_matrix(net: &Network) -> DMatrix<C64> {
    let m = net.n_edges();
    let mut out = DMatrix::from_element(2 * m, 2 * m, zero());
    for e in 0..m {
        out[(e, m + e)] = one();
        out[(m + e, e)] = one();
    }
    out
}

pub fn apply_swap(net: &Network, psi: &ArcState) -> ArcState {
    let m = net.n_edges();
    ArcState::from_fn(2 * m, |i, _| if i < m { psi[m + i] } else { psi[i - m] })
}

/// Π_A = (I − SWAP)/2.
pub fn projector_antisymmetric(net: &Network) -> DMatrix<C64> {
    let n = net.arc_dim();
    (DMatrix::identity(n, n) - swap_matrix(net)) * C64::new(0.5, 0.0)
}

fn span_projector(dim: usize, states: &[ArcState]) -> DMatrix<C64> {
    let mut p = DMatrix::from_element(dim, dim, zero());
    for q in states {
        p += q * q.adjoint();
    }
    p
}

/// Projector onto span{ψ_u : u ∉ {s,t}}.
pub fn projector_star_space(net: &Network, s: usize, t: usize) -> Result<DMatrix<C64>> {
    check_terminals(net, s, t)?;
    let states = (0..net.n_vertices())
        .filter(|&u| u != s && u != t)
        .map(|u| net.star_state(u))
        .collect::<Result<Vec<_>>>()?;
    Ok(span_projector(net.arc_dim(), &states))
}

/// Projector onto span{ψ_{u,i} : u ∉ {s,t}}; supports of different vertices
/// are disjoint so per-vertex orthonormal bases combine directly.
pub fn projector_alt_star_space(net: &Network, psi: &AltNeighbourhoods, s: usize, t: usize) -> Result<DMatrix<C64>> {
    check_terminals(net, s, t)?;
    psi.validate(net)?;
    let orth = psi.orthonormalized()?;
    let states: Vec<ArcState> = (0..net.n_vertices())
        .filter(|&u| u != s && u != t)
        .flat_map(|u| orth.get(u).to_vec())
        .collect();
    Ok(span_projector(net.arc_dim(), &states))
}

/// Eigenvectors sharing one eigenphase.
#[derive(Clone, Debug)]
pub struct PhaseGroup {
    pub phase: f64,
    pub indices: Vec<usize>,
}

/// U = (2Π_A − I)(2Π_B − I) with its eigendecomposition.
#[derive(Clone, Debug)]
pub struct WalkOperator {
    pa: DMatrix<C64>,
    pb: DMatrix<C64>,
    u: DMatrix<C64>,
    vectors: DMatrix<C64>,
    phases: Vec<f64>,
    groups: Vec<PhaseGroup>,
    phase_tol: f64,
}

impl WalkOperator {
    pub fn new(pa: DMatrix<C64>, pb: DMatrix<C64>) -> Result<Self> {
        Self::with_tol(pa, pb, DEFAULT_EIG_PHASE_TOL)
    }

    pub fn with_tol(pa: DMatrix<C64>, pb: DMatrix<C64>, phase_tol: f64) -> Result<Self> {
        if pa.shape() != pb.shape() || !pa.is_square() {
            return Err(Error::Dimension(format!("projector shapes {:?} and {:?}", pa.shape(), pb.shape())));
        }
        for (name, p) in [("Π_A", &pa), ("Π_B", &pb)] {
            let d = projector_defect(p);
            if d > PROJECTOR_TOL {
                return Err(Error::NotProjector(format!("{name} defect {d:e}")));
            }
        }
        let n = pa.nrows();
        let id = DMatrix::<C64>::identity(n, n);
        let two = C64::new(2.0, 0.0);
        let u = (&pa * two - &id) * (&pb * two - &id);
        let defect = crate::linalg::max_abs_diff(&(u.adjoint() * &u), &id);
        if defect > UNITARY_TOL {
            return Err(Error::NotProjector(format!("walk operator is not unitary (defect {defect:e})")));
        }
        let (vectors, phases) = unitary_eigen(&u);
        let diag = DMatrix::from_fn(n, n, |r, c| if r == c { C64::from_polar(1.0, phases[c]) } else { zero() });
        let eig_defect = crate::linalg::max_abs_diff(&(&u * &vectors), &(&vectors * diag))
            .max(crate::linalg::max_abs_diff(&(vectors.adjoint() * &vectors), &id));
        if eig_defect > EIGEN_TOL {
            return Err(Error::Precondition(format!("eigendecomposition of the walk failed (defect {eig_defect:e})")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
        let vectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        let phases: Vec<f64> = order.iter().map(|&k| phases[k]).collect();
        let mut groups: Vec<PhaseGroup> = Vec::new();
        for (k, &ph) in phases.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if (ph - phases[*g.indices.last().unwrap()]).abs() <= phase_tol => g.indices.push(k),
                _ => groups.push(PhaseGroup { phase: ph, indices: vec![k] }),
            }
        }
        for g in &mut groups {
            g.phase = g.indices.iter().map(|&k| phases[k]).sum::<f64>() / g.indices.len() as f64;
        }
        Ok(WalkOperator { pa, pb, u, vectors, phases, groups, phase_tol })
    }

    /// The walk U_{AB} for the star space, or U_{AB^alt} when `psi` is given.
    pub fn for_network(net: &Network, psi: Option<&AltNeighbourhoods>, s: usize, t: usize) -> Result<Self> {
        Self::for_network_with_tol(net, psi, s, t, DEFAULT_EIG_PHASE_TOL)
    }

    pub fn for_network_with_tol(
        net: &Network,
        psi: Option<&AltNeighbourhoods>,
        s: usize,
        t: usize,
        phase_tol: f64,
    ) -> Result<Self> {
        let pa = projector_antisymmetric(net);
        let pb = match psi {
            Some(psi) => projector_alt_star_space(net, psi, s, t)?,
            None => projector_star_space(net, s, t)?,
        };
        Self::with_tol(pa, pb, phase_tol)
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.u
    }

    pub fn pa(&self) -> &DMatrix<C64> {
        &self.pa
    }

    pub fn pb(&self) -> &DMatrix<C64> {
        &self.pb
    }

    /// Eigenvectors as columns, sorted by phase.
    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    /// Eigenphases in (−π, π], ascending.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn groups(&self) -> &[PhaseGroup] {
        &self.groups
    }

    pub fn phase_tol(&self) -> f64 {
        self.phase_tol
    }

    pub fn apply(&self, psi: &ArcState) -> ArcState {
        &self.u * psi
    }

    pub fn is_zero_phase(&self, phase: f64) -> bool {
        phase.abs() < self.phase_tol
    }

    /// Eigenprojector Π_j of a phase group.
    pub fn eigenprojector(&self, group: &PhaseGroup) -> DMatrix<C64> {
        let n = self.dim();
        let mut p = DMatrix::from_element(n, n, zero());
        for &k in &group.indices {
            let v = self.vectors.column(k);
            p += &v * v.adjoint();
        }
        p
    }

    /// Λ_ε ψ, the component on eigenphases with |θ| ≤ ε.
    pub fn project_band(&self, psi: &ArcState, eps: f64) -> ArcState {
        let mut out = ArcState::zeros(self.dim());
        for (k, &ph) in self.phases.iter().enumerate() {
            if ph.abs() <= eps || self.is_zero_phase(ph) {
                let v = self.vectors.column(k);
                out += &v * v.dotc(psi);
            }
        }
        out
    }

    /// (phase, multiplicity, ‖Π_j ψ‖²) for every phase group.
    pub fn spectrum(&self, psi: &ArcState) -> Vec<(f64, usize, f64)> {
        let coeffs = self.vectors.adjoint() * psi;
        self.groups
            .iter()
            .map(|g| (g.phase, g.indices.len(), g.indices.iter().map(|&k| coeffs[k].norm_sqr()).sum()))
            .collect()
    }

    /// Exact phase estimation with T steps conditioned on the outcome 0:
    /// returns p′ and the normalised post-measurement state.
    pub fn pe_zero(&self, psi: &ArcState, steps: u64) -> Result<(f64, ArcState)> {
        if steps == 0 {
            return Err(Error::InvalidArgument("phase estimation needs T ≥ 1".into()));
        }
        if psi.len() != self.dim() {
            return Err(Error::Dimension(format!("state of length {} for a walk of dimension {}", psi.len(), self.dim())));
        }
        let coeffs = self.vectors.adjoint() * psi;
        let mut post = ArcState::zeros(self.dim());
        for (k, &ph) in self.phases.iter().enumerate() {
            let c = self.pe_amplitude(ph, steps);
            if c.norm() > 0.0 {
                post += self.vectors.column(k) * (c * coeffs[k]);
            }
        }
        let p = post.norm_squared();
        if p > 0.0 {
            post.unscale_mut(p.sqrt());
        }
        Ok((p, post))
    }

    /// c(θ) = (1/T) Σ_{t<T} e^{itθ}.
    pub fn pe_amplitude(&self, phase: f64, steps: u64) -> C64 {
        if self.is_zero_phase(phase) {
            return one();
        }
        let tf = steps as f64;
        let num = C64::from_polar(1.0, tf * phase) - one();
        let den = (C64::from_polar(1.0, phase) - one()) * tf;
        num / den
    }

    /// (1/T) Σ_{t<T} U^t ψ evaluated by repeated application; costs T − 1
    /// walk steps.
    pub fn averaged_evolution(&self, psi: &ArcState, steps: u64) -> Result<ArcState> {
        if steps == 0 {
            return Err(Error::InvalidArgument("phase estimation needs T ≥ 1".into()));
        }
        let mut cur = psi.clone();
        let mut acc = psi.clone();
        for _ in 1..steps {
            cur = &self.u * &cur;
            acc += &cur;
        }
        Ok(acc.unscale(steps as f64))
    }
}

/// Eigendecomposition of a unitary through the Hermitian pencil
/// K = (U+U†)/2 + c(U−U†)/(2i), resolving K-degenerate clusters with
/// S = (U−U†)/(2i).
fn unitary_eigen(u: &DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>) {
    let n = u.nrows();
    let ua = u.adjoint();
    let herm = (u + &ua) * C64::new(0.5, 0.0);
    let skew = (u - &ua) * C64::new(0.0, -0.5);
    let mut k = &herm + &skew * C64::new(MIX, 0.0);
    symmetrize(&mut k);
    let eig = k.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = DMatrix::from_element(n, n, zero());
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < CLUSTER_TOL {
            end += 1;
        }
        let vc = DMatrix::from_fn(n, end - start, |r, c| eig.eigenvectors[(r, order[start + c])]);
        if end - start == 1 {
            vectors.set_column(start, &vc.column(0));
        } else {
            let mut small = vc.adjoint() * &skew * &vc;
            symmetrize(&mut small);
            let inner = small.symmetric_eigen();
            let rotated = &vc * inner.eigenvectors;
            for c in 0..end - start {
                vectors.set_column(start + c, &rotated.column(c));
            }
        }
        start = end;
    }
    let phases = (0..n)
        .map(|c| {
            let v = vectors.column(c);
            let ph = v.dotc(&(u * v)).arg();
            if ph <= -PI + 1e-12 {
                PI
            } else {
                ph
            }
        })
        .collect();
    (vectors, phases)
}

fn symmetrize(m: &mut DMatrix<C64>) {
    let a = m.adjoint();
    *m += a;
    m.scale_mut(0.5);
}

/// |θ⟩ = (1/√(2E(θ))) Σ_{E→} (θ_{u,v}/√w_{u,v})(|u,v⟩ + |v,u⟩).
pub fn flow_state(net: &Network, f: &Flow) -> Result<ArcState> {
    let en = energy(net, f)?;
    if en <= 0.0 {
        return Err(Error::InvalidArgument("flow state of a zero flow".into()));
    }
    let m = net.n_edges();
    let scale = 1.0 / (2.0 * en).sqrt();
    let mut out = ArcState::zeros(2 * m);
    for e in 0..m {
        let a = C64::new(scale * f.on_edge(e) / net.weight(e).sqrt(), 0.0);
        out[e] = a;
        out[m + e] = a;
    }
    Ok(out)
}

/// |p⟩ = √(2/R) Σ_{u≠s} p_u √w_u |ψ_u⟩.
pub fn potential_state(net: &Network, p: &VertexPotential, s: usize, resistance: f64) -> Result<ArcState> {
    if p.values.len() != net.n_vertices() {
        return Err(Error::Dimension(format!("{} potentials for {} vertices", p.values.len(), net.n_vertices())));
    }
    let mut out = ArcState::zeros(net.arc_dim());
    for u in (0..net.n_vertices()).filter(|&u| u != s) {
        out += net.star_state(u)? * C64::new(p.values[u] * net.vertex_weight(u).sqrt(), 0.0);
    }
    Ok(out * C64::new((2.0 / resistance).sqrt(), 0.0))
}

/// |p^alt⟩ = √(2/R^alt) Σ_{u≠s} Σ_v (−1)^{Δ_{u,v}} p_{u,v} √w_{u,v} |u,v⟩.
pub fn alt_potential_state(net: &Network, p: &EdgePotential, s: usize, resistance: f64) -> Result<ArcState> {
    if p.values.len() != net.arc_dim() {
        return Err(Error::Dimension(format!("{} edge potentials for {} arcs", p.values.len(), net.arc_dim())));
    }
    let scale = (2.0 / resistance).sqrt();
    let mut out = ArcState::zeros(net.arc_dim());
    for u in (0..net.n_vertices()).filter(|&u| u != s) {
        for &(_, e) in net.incident(u) {
            let slot = net.slot(e, u);
            let sign = if net.arc(e).0 == u { 1.0 } else { -1.0 };
            out[slot] = C64::new(scale * sign * p.values[slot] * net.weight(e).sqrt(), 0.0);
        }
    }
    Ok(out)
}

/// ψ_s^+ = (I + SWAP)ψ_s/√2.
pub fn psi_s_plus(net: &Network, s: usize) -> Result<ArcState> {
    let star = net.star_state(s)?;
    Ok((&star + apply_swap(net, &star)).unscale(2f64.sqrt()))
}

#[derive(Clone, Debug)]
pub struct GapCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// ‖Λ_ε(I − Π_A)φ‖ ≤ (ε/2)‖φ‖ for φ with Π_B φ = φ.
pub fn effective_spectral_gap_check(walk: &WalkOperator, phi: &ArcState, eps: f64) -> Result<GapCheck> {
    let norm = phi.norm();
    let leak = (walk.pb() * phi - phi).norm();
    if leak > PROJECTOR_TOL * norm.max(1.0) {
        return Err(Error::Precondition(format!("φ is not in the image of Π_B (residual {leak:e})")));
    }
    let x = phi - walk.pa() * phi;
    let lhs = walk.project_band(&x, eps).norm();
    let rhs = 0.5 * eps * norm;
    Ok(GapCheck { holds: lhs <= rhs + PROJECTOR_TOL, lhs, rhs })
}

/// √(1 − |⟨a|b⟩|²) for unit states.
pub fn trace_distance_pure(a: &ArcState, b: &ArcState) -> f64 {
    (1.0 - a.dotc(b).norm_sqr()).max(0.0).sqrt()
}

pub fn normalized(v: &DVector<C64>) -> DVector<C64> {
    v.unscale(v.norm())
}
