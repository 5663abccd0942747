#![allow(dead_code)]

use altflow::alt::AltNeighbourhoods;
use altflow::network::{ArcState, Network, C64};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected network on `n` vertices with at most `max_edges` edges: a
/// random spanning tree plus random chords, random orientations and weights.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, max_edges: usize) -> Network {
    let mut arcs: Vec<(usize, usize, f64)> = Vec::new();
    let has = |a: usize, b: usize, arcs: &Vec<(usize, usize, f64)>| {
        arcs.iter().any(|&(u, v, _)| (u, v) == (a, b) || (u, v) == (b, a))
    };
    let weight = |rng: &mut ChaCha8Rng| [0.25, 0.5, 1.0, 2.0, 3.0][rng.random_range(0..5)];
    for v in 1..n {
        let u = rng.random_range(0..v);
        let w = weight(rng);
        arcs.push(if rng.random() { (u, v, w) } else { (v, u, w) });
    }
    for _ in 0..4 * max_edges {
        if arcs.len() >= max_edges {
            break;
        }
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b && !has(a, b, &arcs) {
            let w = weight(rng);
            arcs.push((a, b, w));
        }
    }
    Network::new((0..n).map(|i| format!("v{i}")).collect(), arcs).unwrap()
}

/// Unit complex state supported on the arcs leaving `u`.
pub fn random_local_state(rng: &mut ChaCha8Rng, net: &Network, u: usize) -> ArcState {
    let mut psi = ArcState::zeros(net.arc_dim());
    for &(_, e) in net.incident(u) {
        psi[net.slot(e, u)] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let norm = psi.norm();
    psi.unscale(norm)
}

/// Adds up to d_u − 2 random states at some interior vertices of degree ≥ 3.
pub fn random_alt(rng: &mut ChaCha8Rng, net: &Network, s: usize, t: usize) -> AltNeighbourhoods {
    let mut psi = AltNeighbourhoods::stars(net);
    for u in 0..net.n_vertices() {
        let d = net.degree(u);
        if u == s || u == t || d < 3 || rng.random_bool(0.5) {
            continue;
        }
        let k = rng.random_range(1..=d - 2);
        let extra = (0..k).map(|_| random_local_state(rng, net, u)).collect();
        psi.set_extra(net, u, extra).unwrap();
    }
    psi
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Result of the brute-force constrained minimisation.
pub struct Kkt {
    pub theta: Vec<f64>,
    pub residual: f64,
}

/// min Σ θ²/w over unit s-t flows orthogonal to every held state at the
/// interior vertices, solved from the KKT conditions of the constraint
/// system Cθ = b. Constraints are written
/// directly on edge values: ⟨ψ|θ⟩ ∝ Σ_e θ_e/√w_e (ψ̄[e] + ψ̄[m+e]).
pub fn kkt_alt_flow(net: &Network, psi: &AltNeighbourhoods, s: usize, t: usize) -> Kkt {
    kkt_alt_flow_with(net, psi, s, t, &[])
}

/// As [`kkt_alt_flow`] with additional linear equalities `row · θ = value`.
pub fn kkt_alt_flow_with(
    net: &Network,
    psi: &AltNeighbourhoods,
    s: usize,
    t: usize,
    extra: &[(Vec<f64>, f64)],
) -> Kkt {
    let m = net.n_edges();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    let mut div = vec![0.0; m];
    for (e, &(u, v)) in net.arcs().iter().enumerate() {
        if u == s {
            div[e] = 1.0;
        } else if v == s {
            div[e] = -1.0;
        }
    }
    rows.push(div);
    b.push(1.0);
    for u in 0..net.n_vertices() {
        if u == s || u == t {
            continue;
        }
        for state in psi.get(u) {
            let mut re = vec![0.0; m];
            let mut im = vec![0.0; m];
            for e in 0..m {
                let z = (state[e] + state[m + e]).conj() / net.weight(e).sqrt();
                re[e] = z.re;
                im[e] = z.im;
            }
            rows.push(re);
            b.push(0.0);
            rows.push(im);
            b.push(0.0);
        }
    }
    for (row, value) in extra {
        rows.push(row.clone());
        b.push(*value);
    }
    // Stationarity gives θ = W Cᵀμ; feasibility then needs (C W Cᵀ)μ = b.
    let k = rows.len();
    let c = DMatrix::from_fn(k, m, |r, e| rows[r][e]);
    let w = DMatrix::from_fn(m, m, |i, j| if i == j { net.weight(i) } else { 0.0 });
    let gram = &c * &w * c.transpose();
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let rhs = DVector::from_vec(b.clone());
    let mut mu = DVector::<f64>::zeros(k);
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam.abs() > 1e-11 * top {
            let v = eig.eigenvectors.column(j);
            mu += v * (v.dot(&rhs) / lam);
        }
    }
    let sol = &w * c.transpose() * mu;
    let theta: Vec<f64> = sol.iter().copied().collect();
    let residual = rows
        .iter()
        .zip(&b)
        .map(|(row, &bi)| (row.iter().zip(&theta).map(|(a, x)| a * x).sum::<f64>() - bi).abs())
        .fold(0.0, f64::max);
    Kkt { theta, residual }
}

/// θ from the grounded Laplacian: L̃p = e_s with p_t = 0, θ_e = w_e(p_u − p_v).
pub fn laplacian_flow(net: &Network, s: usize, t: usize) -> Vec<f64> {
    let n = net.n_vertices();
    let keep: Vec<usize> = (0..n).filter(|&u| u != t).collect();
    let pos = |u: usize| keep.iter().position(|&x| x == u);
    let mut l = DMatrix::<f64>::zeros(n - 1, n - 1);
    for (e, &(u, v)) in net.arcs().iter().enumerate() {
        let w = net.weight(e);
        for (a, b) in [(u, v), (v, u)] {
            if let Some(i) = pos(a) {
                l[(i, i)] += w;
                if let Some(j) = pos(b) {
                    l[(i, j)] -= w;
                }
            }
        }
    }
    let mut rhs = DVector::<f64>::zeros(n - 1);
    rhs[pos(s).unwrap()] = 1.0;
    let p = l.lu().solve(&rhs).unwrap();
    let pot = |u: usize| pos(u).map(|i| p[i]).unwrap_or(0.0);
    net.arcs().iter().enumerate().map(|(e, &(u, v))| net.weight(e) * (pot(u) - pot(v))).collect()
}
