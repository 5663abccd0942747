use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{pseudoinverse, DEFAULT_SVD_REL_TOL};
use crate::network::{ArcState, EdgePotential, Flow, Network, C64};
use crate::solver::check_terminals;
use crate::walk::flow_state;

pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-8;
const DEPENDENCE_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-9;

/// Per-vertex alternative neighbourhoods Ψ⋆(u); the first state of every list
/// is the star state ψ_u.
#[derive(Clone, Debug, PartialEq)]
pub struct AltNeighbourhoods {
    states: Vec<Vec<ArcState>>,
}

impl AltNeighbourhoods {
    /// Ψ⋆(u) = {ψ_u} everywhere.
    pub fn stars(net: &Network) -> Self {
        let states = (0..net.n_vertices()).map(|u| vec![net.star_state(u).expect("vertex exists")]).collect();
        AltNeighbourhoods { states }
    }

    /// Replaces Ψ⋆(u) by {ψ_u} ∪ `extra`.
    pub fn set_extra(&mut self, net: &Network, u: usize, extra: Vec<ArcState>) -> Result<()> {
        let mut list = vec![net.star_state(u)?];
        list.extend(extra);
        self.set(net, u, list)
    }

    /// Replaces Ψ⋆(u) by `list`, whose first element must be ψ_u.
    pub fn set(&mut self, net: &Network, u: usize, list: Vec<ArcState>) -> Result<()> {
        validate_list(net, u, &list)?;
        self.states[u] = list;
        Ok(())
    }

    pub fn get(&self, u: usize) -> &[ArcState] {
        &self.states[u]
    }

    /// a_u, the number of states held for u.
    pub fn size(&self, u: usize) -> usize {
        self.states[u].len()
    }

    pub fn n_vertices(&self) -> usize {
        self.states.len()
    }

    /// True when some vertex carries more than its star state.
    pub fn has_extra(&self, u: usize) -> bool {
        self.states[u].len() > 1
    }

    pub fn validate(&self, net: &Network) -> Result<()> {
        if self.states.len() != net.n_vertices() {
            return Err(Error::Dimension(format!(
                "{} neighbourhoods for {} vertices",
                self.states.len(),
                net.n_vertices()
            )));
        }
        for (u, list) in self.states.iter().enumerate() {
            validate_list(net, u, list)?;
        }
        Ok(())
    }

    /// Gram–Schmidt applied per vertex.
    pub fn orthonormalized(&self) -> Result<Self> {
        let states = self.states.iter().map(|l| orthonormalize(l)).collect::<Result<Vec<_>>>()?;
        Ok(AltNeighbourhoods { states })
    }

    /// V^alt in column order: (s,0), interior (u,i) ascending, (t,0).
    pub fn alt_vertices(&self, s: usize, t: usize) -> Vec<(usize, usize)> {
        let mut out = vec![(s, 0)];
        for u in 0..self.states.len() {
            if u != s && u != t {
                out.extend((0..self.states[u].len()).map(|i| (u, i)));
            }
        }
        out.push((t, 0));
        out
    }
}

fn validate_list(net: &Network, u: usize, list: &[ArcState]) -> Result<()> {
    let bad = |reason: String| Error::InvalidNeighbourhood { vertex: net.label(u).to_string(), reason };
    let d = net.degree(u);
    if list.is_empty() {
        return Err(bad("empty neighbourhood".into()));
    }
    if list.len() > 1 && list.len() >= d {
        return Err(bad(format!("{} states for degree {d}", list.len())));
    }
    let star = net.star_state(u)?;
    let mut slots = vec![false; net.arc_dim()];
    for &(_, e) in net.incident(u) {
        slots[net.slot(e, u)] = true;
    }
    for (i, psi) in list.iter().enumerate() {
        if psi.len() != net.arc_dim() {
            return Err(bad(format!("state {i} has dimension {}", psi.len())));
        }
        if (psi.norm() - 1.0).abs() > UNIT_TOL {
            return Err(bad(format!("state {i} has norm {}", psi.norm())));
        }
        if psi.iter().enumerate().any(|(k, z)| !slots[k] && z.norm() > 1e-12) {
            return Err(bad(format!("state {i} has support outside the arcs leaving the vertex")));
        }
    }
    if (&list[0] - &star).norm() > UNIT_TOL {
        return Err(bad("first state must be the star state".into()));
    }
    Ok(())
}

/// Gram–Schmidt keeping the first state verbatim and dropping states whose
/// residual norm falls below 1e-10.
pub fn orthonormalize(psis: &[ArcState]) -> Result<Vec<ArcState>> {
    let first = psis.first().ok_or_else(|| Error::InvalidArgument("no states to orthonormalize".into()))?;
    if first.norm() < DEPENDENCE_TOL {
        return Err(Error::InvalidArgument("first state is zero".into()));
    }
    let mut out: Vec<ArcState> = vec![first.clone()];
    for psi in &psis[1..] {
        let mut r = psi.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        let n = r.norm();
        if n >= DEPENDENCE_TOL {
            out.push(r.unscale(n));
        }
    }
    Ok(out)
}

/// Fourier states (1/√D) Σ_i ω_D^{ij} |u,v_i⟩ for the requested j, neighbours
/// in ascending vertex id.
pub fn fourier_neighbourhood(net: &Network, u: usize, which: &[usize]) -> Result<Vec<ArcState>> {
    let nb = net.neighbourhood(u)?;
    let d = nb.len();
    if d == 0 {
        return Err(Error::InvalidArgument(format!("{} has no neighbours", net.label(u))));
    }
    let scale = 1.0 / (d as f64).sqrt();
    which
        .iter()
        .map(|&j| {
            if j >= d {
                return Err(Error::InvalidArgument(format!("Fourier index {j} out of range for degree {d}")));
            }
            let mut psi = ArcState::zeros(net.arc_dim());
            for (i, &v) in nb.iter().enumerate() {
                let phase = 2.0 * PI * ((i * j) % d) as f64 / d as f64;
                psi[net.slot_of(u, v)?] = C64::from_polar(scale, phase);
            }
            Ok(psi)
        })
        .collect()
}

/// The orthonormalized Fourier neighbourhood {ψ_u, ψ̂¹, …, ψ̂^{D−1}}.
pub fn fourier_alt(net: &Network, u: usize) -> Result<Vec<ArcState>> {
    let d = net.degree(u);
    let mut list = vec![net.star_state(u)?];
    list.extend(fourier_neighbourhood(net, u, &(1..d).collect::<Vec<_>>())?);
    orthonormalize(&list)
}

/// √2·Re and √2·Im of a state, the real pair spanning the same space as a
/// conjugate pair ψ̂^j, ψ̂^{D−j}.
pub fn realify(psi: &ArcState) -> (ArcState, ArcState) {
    let s2 = 2f64.sqrt();
    (psi.map(|z| C64::new(s2 * z.re, 0.0)), psi.map(|z| C64::new(s2 * z.im, 0.0)))
}

/// Alternative incidence matrix, columns over V^alt.
#[derive(Clone, Debug)]
pub struct AltIncidenceMatrix {
    pub matrix: DMatrix<C64>,
    pub columns: Vec<(usize, usize)>,
}

/// Column (u,i) holds √w_u⟨u,v|ψ_{u,i}⟩ on every row whose arc touches u.
/// Neighbourhoods are orthonormalized first.
pub fn alt_incidence_matrix(net: &Network, psi: &AltNeighbourhoods, s: usize, t: usize) -> Result<AltIncidenceMatrix> {
    check_terminals(net, s, t)?;
    psi.validate(net)?;
    let orth = psi.orthonormalized()?;
    if orth.has_extra(s) || orth.has_extra(t) {
        return Err(Error::Precondition("s and t may not carry additional alternative states".into()));
    }
    let columns = orth.alt_vertices(s, t);
    let mut b = DMatrix::zeros(net.n_edges(), columns.len());
    for (c, &(u, i)) in columns.iter().enumerate() {
        let state = &orth.get(u)[i];
        let sw = net.vertex_weight(u).sqrt();
        for &(_, e) in net.incident(u) {
            b[(e, c)] = state[net.slot(e, u)] * sw;
        }
    }
    Ok(AltIncidenceMatrix { matrix: b, columns })
}

#[derive(Clone, Debug)]
pub enum AltFlow {
    Feasible(Flow),
    Infeasible { residual: f64 },
}

impl AltFlow {
    pub fn feasible(self) -> Result<Flow> {
        match self {
            AltFlow::Feasible(f) => Ok(f),
            AltFlow::Infeasible { residual } => Err(Error::Infeasible(residual)),
        }
    }
}

/// The real system B_alt^† Wθ = e_s − e_t split into real and imaginary parts.
fn real_constraints(b: &DMatrix<C64>) -> DMatrix<f64> {
    let (m, k) = b.shape();
    let mut out = DMatrix::zeros(2 * k, m);
    for c in 0..k {
        for r in 0..m {
            out[(c, r)] = b[(r, c)].re;
            out[(k + c, r)] = -b[(r, c)].im;
        }
    }
    out
}

/// Wθ^alt = B_alt^{T+}(e_s − e_t), verified by its residual.
pub fn alt_electrical_flow_with(
    net: &Network,
    psi: &AltNeighbourhoods,
    s: usize,
    t: usize,
    rel_tol: f64,
    feasibility_tol: f64,
) -> Result<AltFlow> {
    let inc = alt_incidence_matrix(net, psi, s, t)?;
    let k = inc.columns.len();
    let a = real_constraints(&inc.matrix);
    let mut rhs = DVector::zeros(2 * k);
    rhs[0] = 1.0;
    rhs[k - 1] = -1.0;
    let w_theta = pseudoinverse(&a, rel_tol) * &rhs;
    let residual = (&a * &w_theta - &rhs).norm();
    if residual > feasibility_tol {
        return Ok(AltFlow::Infeasible { residual });
    }
    Ok(AltFlow::Feasible(Flow::new(
        w_theta.iter().zip(net.weights()).map(|(x, w)| x * w.sqrt()).collect(),
    )))
}

pub fn alt_electrical_flow(net: &Network, psi: &AltNeighbourhoods, s: usize, t: usize) -> Result<AltFlow> {
    alt_electrical_flow_with(net, psi, s, t, DEFAULT_SVD_REL_TOL, DEFAULT_FEASIBILITY_TOL)
}

#[derive(Clone, Debug)]
pub struct AltPotential {
    pub edge: EdgePotential,
    /// Coefficients over V^alt in column order; (t,0) is fixed to 0.
    pub coeffs: Vec<C64>,
    pub columns: Vec<(usize, usize)>,
}

/// Minimum-norm coefficients c with Re(B̄_alt c) = Wθ^alt, and the induced
/// edge potentials.
pub fn alt_edge_potential_with(
    net: &Network,
    psi: &AltNeighbourhoods,
    s: usize,
    t: usize,
    rel_tol: f64,
    feasibility_tol: f64,
) -> Result<AltPotential> {
    let flow = alt_electrical_flow_with(net, psi, s, t, rel_tol, feasibility_tol)?.feasible()?;
    let inc = alt_incidence_matrix(net, psi, s, t)?;
    let orth = psi.orthonormalized()?;
    let k = inc.columns.len();
    let w_theta = DVector::from_iterator(
        net.n_edges(),
        flow.values().iter().zip(net.weights()).map(|(x, w)| x / w.sqrt()),
    );
    // Only Re(B̄_alt c) = Wθ is required of complex coefficients c = a + ib,
    // so solve [Re B̄_alt, −Im B̄_alt](a; b) = Wθ.
    let b_bar = inc.matrix.columns(0, k - 1).into_owned();
    let ab = pseudoinverse(&real_constraints(&b_bar).transpose(), rel_tol) * w_theta;
    let mut coeffs: Vec<C64> = (0..k - 1).map(|j| C64::new(ab[j], ab[k - 1 + j])).collect();
    coeffs.push(C64::new(0.0, 0.0));

    let mut values = vec![0.0; net.arc_dim()];
    for (c, &(u, i)) in inc.columns.iter().enumerate() {
        let state = &orth.get(u)[i];
        let sw = net.vertex_weight(u).sqrt();
        for &(_, e) in net.incident(u) {
            let slot = net.slot(e, u);
            let sign = if net.arc(e).0 == u { 1.0 } else { -1.0 };
            values[slot] += sign * (coeffs[c] * state[slot] * sw).re / net.weight(e).sqrt();
        }
    }
    Ok(AltPotential { edge: EdgePotential { values }, coeffs, columns: inc.columns })
}

pub fn alt_edge_potential(net: &Network, psi: &AltNeighbourhoods, s: usize, t: usize) -> Result<AltPotential> {
    alt_edge_potential_with(net, psi, s, t, DEFAULT_SVD_REL_TOL, DEFAULT_FEASIBILITY_TOL)
}

/// max over interior u and every held state ψ_{u,i} of |⟨ψ_{u,i}|θ⟩|.
pub fn check_alt_kirchhoff(net: &Network, psi: &AltNeighbourhoods, f: &Flow, s: usize, t: usize) -> Result<f64> {
    let theta = flow_state(net, f)?;
    let mut worst: f64 = 0.0;
    for u in 0..net.n_vertices() {
        if u == s || u == t {
            continue;
        }
        for state in psi.get(u) {
            worst = worst.max(state.dotc(&theta).norm());
        }
    }
    Ok(worst)
}

/// max over edges of |p_{u,v} − p_{v,u} − θ_{u,v}/w_{u,v}|.
pub fn alt_ohm_violation(net: &Network, f: &Flow, p: &EdgePotential) -> f64 {
    let m = net.n_edges();
    (0..m)
        .map(|e| (p.values[e] - p.values[m + e] - f.on_edge(e) / net.weight(e)).abs())
        .fold(0.0, f64::max)
}
