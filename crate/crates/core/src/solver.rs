use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{pseudoinverse, DEFAULT_SVD_REL_TOL};
use crate::network::{energy, Flow, Network, VertexPotential};

/// Incidence matrix with columns ordered s, interior vertices (ascending id), t.
#[derive(Clone, Debug)]
pub struct IncidenceMatrix {
    pub matrix: DMatrix<f64>,
    /// Vertex id of each column.
    pub columns: Vec<usize>,
}

impl IncidenceMatrix {
    /// Diagonal of W, `1/√w` per arc.
    pub fn w_diag(net: &Network) -> DVector<f64> {
        DVector::from_iterator(net.n_edges(), net.weights().iter().map(|w| 1.0 / w.sqrt()))
    }
}

pub(crate) fn check_terminals(net: &Network, s: usize, t: usize) -> Result<()> {
    let n = net.n_vertices();
    if s >= n {
        return Err(Error::UnknownVertex(s.to_string()));
    }
    if t >= n {
        return Err(Error::UnknownVertex(t.to_string()));
    }
    if s == t {
        return Err(Error::InvalidArgument("s and t must differ".into()));
    }
    Ok(())
}

/// Vertex order s, interior ascending, t.
pub fn column_order(net: &Network, s: usize, t: usize) -> Vec<usize> {
    let mut cols = Vec::with_capacity(net.n_vertices());
    cols.push(s);
    cols.extend((0..net.n_vertices()).filter(|&u| u != s && u != t));
    cols.push(t);
    cols
}

pub fn incidence_matrix(net: &Network, s: usize, t: usize) -> Result<IncidenceMatrix> {
    check_terminals(net, s, t)?;
    let columns = column_order(net, s, t);
    let mut pos = vec![0; net.n_vertices()];
    for (c, &u) in columns.iter().enumerate() {
        pos[u] = c;
    }
    let mut b = DMatrix::zeros(net.n_edges(), net.n_vertices());
    for (e, &(u, v)) in net.arcs().iter().enumerate() {
        let sw = net.weight(e).sqrt();
        b[(e, pos[u])] = sw;
        b[(e, pos[v])] = -sw;
    }
    Ok(IncidenceMatrix { matrix: b, columns })
}

/// Weighted Laplacian BᵀB in natural vertex order.
pub fn weighted_laplacian(net: &Network) -> DMatrix<f64> {
    let n = net.n_vertices();
    let mut l = DMatrix::zeros(n, n);
    for (e, &(u, v)) in net.arcs().iter().enumerate() {
        let w = net.weight(e);
        l[(u, u)] += w;
        l[(v, v)] += w;
        l[(u, v)] -= w;
        l[(v, u)] -= w;
    }
    l
}

/// Wθ = B^{T+}(e_s − e_t).
pub fn electrical_flow_with(net: &Network, s: usize, t: usize, rel_tol: f64) -> Result<Flow> {
    let inc = incidence_matrix(net, s, t)?;
    let n = net.n_vertices();
    let mut rhs = DVector::zeros(n);
    rhs[0] = 1.0;
    rhs[n - 1] = -1.0;
    let w_theta = pseudoinverse(&inc.matrix.transpose(), rel_tol) * rhs;
    Ok(Flow::new(w_theta.iter().zip(net.weights()).map(|(x, w)| x * w.sqrt()).collect()))
}

pub fn electrical_flow(net: &Network, s: usize, t: usize) -> Result<Flow> {
    electrical_flow_with(net, s, t, DEFAULT_SVD_REL_TOL)
}

/// R_{s,t} = ‖Wθ‖² of the electrical flow.
pub fn effective_resistance(net: &Network, s: usize, t: usize) -> Result<f64> {
    let f = electrical_flow(net, s, t)?;
    energy(net, &f)
}

/// p̄ = B̄⁺Wθ with t's column removed, so p_t = 0 and p_s = R_{s,t}.
pub fn vertex_potential_with(net: &Network, s: usize, t: usize, rel_tol: f64) -> Result<VertexPotential> {
    let inc = incidence_matrix(net, s, t)?;
    let f = electrical_flow_with(net, s, t, rel_tol)?;
    let n = net.n_vertices();
    let w_theta = DVector::from_iterator(
        net.n_edges(),
        f.values().iter().zip(net.weights()).map(|(x, w)| x / w.sqrt()),
    );
    let b_bar = inc.matrix.columns(0, n - 1).into_owned();
    let p_bar = pseudoinverse(&b_bar, rel_tol) * w_theta;
    let mut values = vec![0.0; n];
    for (c, &u) in inc.columns.iter().enumerate().take(n - 1) {
        values[u] = p_bar[c];
    }
    Ok(VertexPotential { values })
}

pub fn vertex_potential(net: &Network, s: usize, t: usize) -> Result<VertexPotential> {
    vertex_potential_with(net, s, t, DEFAULT_SVD_REL_TOL)
}

/// max over edges of |p_u − p_v − θ_{u,v}/w_{u,v}|.
pub fn ohm_violation(net: &Network, f: &Flow, p: &VertexPotential) -> f64 {
    net.arcs()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| (p.values[u] - p.values[v] - f.on_edge(e) / net.weight(e)).abs())
        .fold(0.0, f64::max)
}
