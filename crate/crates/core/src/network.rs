use std::collections::HashMap;

use nalgebra::{Complex, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Complex amplitudes over the doubled arc space. Index `i < |E|` is the arc
/// `(u, v)` as stored in the network, index `|E| + i` is its reversal `(v, u)`.
pub type ArcState = DVector<C64>;

pub const MIN_WEIGHT: f64 = 1e-300;

/// Connected weighted graph with one stored orientation per undirected edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    labels: Vec<String>,
    arcs: Vec<(usize, usize)>,
    weights: Vec<f64>,
    // per vertex: (neighbour, edge index), sorted by neighbour id
    adj: Vec<Vec<(usize, usize)>>,
    index: HashMap<String, usize>,
}

impl Network {
    pub fn new(labels: Vec<String>, arcs: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidNetwork("no vertices".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate vertex label {l}")));
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashMap::with_capacity(arcs.len());
        let mut pairs = Vec::with_capacity(arcs.len());
        let mut weights = Vec::with_capacity(arcs.len());
        for (e, &(u, v, w)) in arcs.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidNetwork(format!("arc {e} references a missing vertex")));
            }
            if u == v {
                return Err(Error::InvalidNetwork(format!("self-loop at {}", labels[u])));
            }
            if !(w.is_finite() && w > MIN_WEIGHT) {
                return Err(Error::InvalidNetwork(format!(
                    "weight of ({},{}) must be positive, got {w}",
                    labels[u], labels[v]
                )));
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key, e).is_some() {
                return Err(Error::InvalidNetwork(format!(
                    "parallel edge between {} and {}",
                    labels[u], labels[v]
                )));
            }
            adj[u].push((v, e));
            adj[v].push((u, e));
            pairs.push((u, v));
            weights.push(w);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let net = Network { labels, arcs: pairs, weights, adj, index };
        if !net.is_connected() {
            return Err(Error::InvalidNetwork("graph is not connected".into()));
        }
        Ok(net)
    }

    /// Convenience constructor from labelled arcs; vertices appear in first-seen order.
    pub fn from_labelled(arcs: &[(&str, &str, f64)]) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut idx: HashMap<&str, usize> = HashMap::new();
        let mut out = Vec::with_capacity(arcs.len());
        for &(a, b, w) in arcs {
            let mut ends = [0; 2];
            for (slot, x) in ends.iter_mut().zip([a, b]) {
                *slot = *idx.entry(x).or_insert_with(|| {
                    labels.push(x.to_string());
                    labels.len() - 1
                });
            }
            out.push((ends[0], ends[1], w));
        }
        Network::new(labels, out)
    }

    fn is_connected(&self) -> bool {
        let n = self.labels.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn n_edges(&self) -> usize {
        self.arcs.len()
    }

    /// Dimension of the doubled arc space, `2|E|`.
    pub fn arc_dim(&self) -> usize {
        2 * self.arcs.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn vertex(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn arc(&self, e: usize) -> (usize, usize) {
        self.arcs[e]
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    fn check(&self, u: usize) -> Result<()> {
        if u < self.labels.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(u.to_string()))
        }
    }

    /// Γ(u) in ascending vertex id.
    pub fn neighbourhood(&self, u: usize) -> Result<Vec<usize>> {
        self.check(u)?;
        Ok(self.adj[u].iter().map(|&(v, _)| v).collect())
    }

    /// Γ⁺(u): heads of stored arcs leaving u.
    pub fn out_neighbourhood(&self, u: usize) -> Result<Vec<usize>> {
        self.check(u)?;
        Ok(self.adj[u].iter().filter(|&&(_, e)| self.arcs[e].0 == u).map(|&(v, _)| v).collect())
    }

    /// Γ⁻(u): tails of stored arcs entering u.
    pub fn in_neighbourhood(&self, u: usize) -> Result<Vec<usize>> {
        self.check(u)?;
        Ok(self.adj[u].iter().filter(|&&(_, e)| self.arcs[e].1 == u).map(|&(v, _)| v).collect())
    }

    /// (neighbour, edge index) pairs of u, ascending by neighbour.
    pub fn incident(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adj.get(u)?.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| self.adj[u][i].1)
    }

    /// Δ_{u,v}: 0 when (u,v) is the stored orientation, 1 when (v,u) is.
    pub fn delta(&self, u: usize, v: usize) -> Result<u8> {
        self.check(u)?;
        self.check(v)?;
        let e = self.edge_between(u, v).ok_or_else(|| {
            Error::InvalidArgument(format!("{} and {} are not adjacent", self.labels[u], self.labels[v]))
        })?;
        Ok(if self.arcs[e].0 == u { 0 } else { 1 })
    }

    /// w_u = Σ_{v∈Γ(u)} w_{u,v}.
    pub fn vertex_weight(&self, u: usize) -> f64 {
        self.adj[u].iter().map(|&(_, e)| self.weights[e]).sum()
    }

    /// Position of |u,v⟩ for edge `e` read from endpoint `u`.
    pub fn slot(&self, e: usize, u: usize) -> usize {
        if self.arcs[e].0 == u {
            e
        } else {
            self.arcs.len() + e
        }
    }

    /// Position of |u,v⟩ in the doubled arc space.
    pub fn slot_of(&self, u: usize, v: usize) -> Result<usize> {
        let e = self.edge_between(u, v).ok_or_else(|| {
            Error::InvalidArgument(format!("{} and {} are not adjacent", self.labels[u], self.labels[v]))
        })?;
        Ok(self.slot(e, u))
    }

    /// (tail, head) of the arc-space basis element at `slot`.
    pub fn slot_arc(&self, slot: usize) -> (usize, usize) {
        let m = self.arcs.len();
        if slot < m {
            self.arcs[slot]
        } else {
            let (u, v) = self.arcs[slot - m];
            (v, u)
        }
    }

    /// The same network with edge `e` stored in the opposite orientation.
    pub fn with_flipped(&self, e: usize) -> Network {
        let mut out = self.clone();
        let (u, v) = out.arcs[e];
        out.arcs[e] = (v, u);
        out
    }

    /// Star state ψ_u = w_u^{-1/2} Σ_v (-1)^{Δ_{u,v}} √w_{u,v} |u,v⟩.
    pub fn star_state(&self, u: usize) -> Result<ArcState> {
        self.check(u)?;
        let mut psi = ArcState::zeros(self.arc_dim());
        let norm = self.vertex_weight(u).sqrt();
        for &(_, e) in &self.adj[u] {
            let sign = if self.arcs[e].0 == u { 1.0 } else { -1.0 };
            psi[self.slot(e, u)] = C64::new(sign * self.weights[e].sqrt() / norm, 0.0);
        }
        Ok(psi)
    }
}

/// Real antisymmetric function on arcs, stored on the stored orientations only.
#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    values: Vec<f64>,
}

impl Flow {
    pub fn new(values: Vec<f64>) -> Self {
        Flow { values }
    }

    pub fn zero(net: &Network) -> Self {
        Flow { values: vec![0.0; net.n_edges()] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn on_edge(&self, e: usize) -> f64 {
        self.values[e]
    }

    /// θ_{u,v}, negated when (u,v) is against the stored orientation.
    pub fn get(&self, net: &Network, u: usize, v: usize) -> Result<f64> {
        let e = net.edge_between(u, v).ok_or_else(|| {
            Error::InvalidArgument(format!("{} and {} are not adjacent", net.label(u), net.label(v)))
        })?;
        Ok(if net.arc(e).0 == u { self.values[e] } else { -self.values[e] })
    }

    fn check(&self, net: &Network) -> Result<()> {
        if self.values.len() == net.n_edges() {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "flow has {} entries for {} edges",
                self.values.len(),
                net.n_edges()
            )))
        }
    }
}

/// E(θ) = Σ θ_{u,v}² / w_{u,v}.
pub fn energy(net: &Network, f: &Flow) -> Result<f64> {
    f.check(net)?;
    Ok(f.values.iter().zip(net.weights()).map(|(t, w)| t * t / w).sum())
}

/// θ_u = Σ_{v∈Γ(u)} θ_{u,v}.
pub fn divergence(net: &Network, f: &Flow, u: usize) -> Result<f64> {
    f.check(net)?;
    net.check(u)?;
    Ok(net
        .incident(u)
        .iter()
        .map(|&(_, e)| if net.arc(e).0 == u { f.values[e] } else { -f.values[e] })
        .sum())
}

/// Largest deviation from a unit s-t flow's divergence pattern.
pub fn unit_flow_violation(net: &Network, f: &Flow, s: usize, t: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for u in 0..net.n_vertices() {
        let target = if u == s {
            1.0
        } else if u == t {
            -1.0
        } else {
            0.0
        };
        worst = worst.max((divergence(net, f, u)? - target).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexPotential {
    pub values: Vec<f64>,
}

/// Potential on ordered pairs, indexed by arc-space slot: `values[slot_of(u, v)] = p_{u,v}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgePotential {
    pub values: Vec<f64>,
}

impl EdgePotential {
    pub fn get(&self, net: &Network, u: usize, v: usize) -> Result<f64> {
        Ok(self.values[net.slot_of(u, v)?])
    }
}
