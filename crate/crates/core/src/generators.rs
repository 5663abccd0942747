use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alt::{fourier_alt, AltNeighbourhoods};
use crate::error::{Error, Result};
use crate::network::{ArcState, Network, C64};

const MAX_PAIRING_ATTEMPTS: usize = 10_000;

/// A generated network with its alternative neighbourhoods and terminals.
#[derive(Clone, Debug)]
pub struct Instance {
    pub family: String,
    pub params: BTreeMap<String, u64>,
    pub seed: Option<u64>,
    pub net: Network,
    pub psi: AltNeighbourhoods,
    pub s: usize,
    pub t: usize,
    /// Vertices carrying Fourier neighbourhoods (heterogeneous class).
    pub fourier: Vec<bool>,
    /// Canonical s-t path, where the family has one.
    pub path: Option<Vec<usize>>,
    /// (start root, end root) of every welded tree in the graph.
    pub trees: Vec<(usize, usize)>,
}

/// Sizes s_0..s_n and edge counts e_1..e_n of a line supergraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchicalSpec {
    pub sizes: Vec<usize>,
    pub edges: Vec<usize>,
}

impl HierarchicalSpec {
    pub fn new(sizes: Vec<usize>, edges: Vec<usize>) -> Result<Self> {
        let spec = HierarchicalSpec { sizes, edges };
        spec.validate()?;
        Ok(spec)
    }

    /// The welded tree of depth h as a line of 2h+1 edge layers.
    pub fn welded_tree(h: usize) -> Result<Self> {
        if h < 1 {
            return Err(Error::Generator("welded tree depth must be at least 1".into()));
        }
        if h > 20 {
            return Err(Error::Generator(format!("welded tree depth {h} is too large")));
        }
        let n = 2 * h + 1;
        let sizes = (0..=n).map(|k| if k <= h { 1 << k } else { 1 << (n - k) }).collect();
        let edges = (1..=n)
            .map(|k| match k.cmp(&(h + 1)) {
                std::cmp::Ordering::Less => 1 << k,
                std::cmp::Ordering::Equal => 1 << (h + 1),
                std::cmp::Ordering::Greater => 1 << (2 * h + 2 - k),
            })
            .collect();
        HierarchicalSpec::new(sizes, edges)
    }

    /// Number of edge layers n.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn n_vertices(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// The common interior degree D.
    pub fn degree(&self) -> usize {
        if self.sizes.len() <= 2 {
            return self.edges[0];
        }
        (self.edges[0] + self.edges[1]) / self.sizes[1]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.edges.len();
        let bad = |m: String| Err(Error::Generator(m));
        if n == 0 || self.sizes.len() != n + 1 {
            return bad(format!("{} sizes for {} edge layers", self.sizes.len(), n));
        }
        if self.sizes[0] != 1 || self.sizes[n] != 1 {
            return bad("end layers must be single vertices".into());
        }
        if self.sizes.iter().chain(&self.edges).any(|&x| x == 0) {
            return bad("sizes and edge counts must be positive".into());
        }
        for k in 1..=n {
            let (l, r, e) = (self.sizes[k - 1], self.sizes[k], self.edges[k - 1]);
            if e % l != 0 || e % r != 0 {
                return bad(format!("layer {k}: {e} edges do not split evenly over {l} and {r} vertices"));
            }
            if e / l > r || e / r > l {
                return bad(format!("layer {k}: {e} edges force parallel edges"));
            }
        }
        let mut degree = None;
        for k in 1..n {
            let d = self.edges[k - 1] / self.sizes[k] + self.edges[k] / self.sizes[k];
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => return bad(format!("layer {k} has degree {d}, expected {d0}")),
                _ => {}
            }
        }
        Ok(())
    }

    /// w_k = Π_{i≤⌊k/2⌋} (e_{2i−1}/e_{2i})² for k = 1..n.
    pub fn weights(&self) -> Vec<f64> {
        line_weights(&self.edges)
    }

    /// Σ_k 1/(e_k w_k).
    pub fn closed_form_resistance(&self) -> f64 {
        self.edges.iter().zip(self.weights()).map(|(&e, w)| 1.0 / (e as f64 * w)).sum()
    }
}

fn line_weights(edges: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(edges.len());
    let mut w = 1.0;
    for k in 1..=edges.len() {
        if k % 2 == 0 {
            let r = edges[k - 2] as f64 / edges[k - 1] as f64;
            w *= r * r;
        }
        out.push(w);
    }
    out
}

/// Edge layer k points away from s iff k mod 4 ∈ {1, 2}.
pub fn layer_forward(k: usize) -> bool {
    matches!(k % 4, 1 | 2)
}

/// Pairs `left_deg` stubs per left vertex with `right_deg` stubs per right
/// vertex uniformly at random, rejecting pairings with parallel edges.
fn random_biregular(
    left: &[usize],
    right: &[usize],
    edges: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize)>> {
    let ld = edges / left.len();
    let rd = edges / right.len();
    let lstubs: Vec<usize> = left.iter().flat_map(|&u| std::iter::repeat_n(u, ld)).collect();
    let mut rstubs: Vec<usize> = right.iter().flat_map(|&v| std::iter::repeat_n(v, rd)).collect();
    for _ in 0..MAX_PAIRING_ATTEMPTS {
        rstubs.shuffle(rng);
        let mut seen = HashSet::with_capacity(edges);
        if lstubs.iter().zip(&rstubs).all(|(&a, &b)| seen.insert((a, b))) {
            return Ok(lstubs.iter().cloned().zip(rstubs.iter().cloned()).collect());
        }
    }
    Err(Error::Generator(format!(
        "no simple pairing of {} and {} vertices with {edges} edges found",
        left.len(),
        right.len()
    )))
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Builder {
    labels: Vec<String>,
    arcs: Vec<(usize, usize, f64)>,
    fourier: Vec<bool>,
}

impl Builder {
    fn new() -> Self {
        Builder { labels: Vec::new(), arcs: Vec::new(), fourier: Vec::new() }
    }

    fn vertex(&mut self, label: String, fourier: bool) -> usize {
        self.labels.push(label);
        self.fourier.push(fourier);
        self.labels.len() - 1
    }

    fn arc(&mut self, u: usize, v: usize, w: f64) {
        self.arcs.push((u, v, w));
    }

    /// Adds the oriented edge between `a` (closer to the line start) and `b`.
    fn line_arc(&mut self, a: usize, b: usize, w: f64, forward: bool) {
        if forward {
            self.arc(a, b, w)
        } else {
            self.arc(b, a, w)
        }
    }

    /// Lays out a line supergraph starting from the existing vertex `first`.
    /// Layer k of the line uses weight `weight(k)` and orientation
    /// `forward(k)`; vertex layer j is marked Fourier iff `fourier(j)`.
    /// Returns the vertex ids of every layer.
    #[allow(clippy::too_many_arguments)]
    fn line(
        &mut self,
        spec: &HierarchicalSpec,
        first: usize,
        last: Option<usize>,
        prefix: &str,
        weight: impl Fn(usize) -> f64,
        forward: impl Fn(usize) -> bool,
        fourier: impl Fn(usize) -> bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Vec<usize>>> {
        let n = spec.len();
        let mut layers = vec![vec![first]];
        for j in 1..n {
            let ids = (0..spec.sizes[j]).map(|i| self.vertex(format!("{prefix}{j}.{i}"), fourier(j))).collect();
            layers.push(ids);
        }
        let end = match last {
            Some(v) => v,
            None => self.vertex(format!("{prefix}{n}.0"), fourier(n)),
        };
        layers.push(vec![end]);
        for k in 1..=n {
            let pairs = random_biregular(&layers[k - 1], &layers[k], spec.edges[k - 1], rng)?;
            for (a, b) in pairs {
                self.line_arc(a, b, weight(k), forward(k));
            }
        }
        Ok(layers)
    }

    fn finish(self) -> Result<(Network, Vec<bool>)> {
        Ok((Network::new(self.labels, self.arcs)?, self.fourier))
    }
}

fn attach_fourier(net: &Network, fourier: &[bool], s: usize, t: usize) -> Result<AltNeighbourhoods> {
    let mut psi = AltNeighbourhoods::stars(net);
    for u in 0..net.n_vertices() {
        if fourier[u] && u != s && u != t {
            psi.set(net, u, fourier_alt(net, u)?)?;
        }
    }
    Ok(psi)
}

/// Random balanced hierarchical graph on a line; Fourier neighbourhoods on
/// odd vertex layers other than t.
pub fn hierarchical_1d(spec: &HierarchicalSpec, seed: u64) -> Result<Instance> {
    spec.validate()?;
    let n = spec.len();
    let weights = spec.weights();
    let mut rng = rng_for(seed);
    let mut b = Builder::new();
    let s = b.vertex("s".into(), false);
    let layers = b.line(spec, s, None, "L", |k| weights[k - 1], layer_forward, |j| j % 2 == 1 && j < n, &mut rng)?;
    let t = layers[n][0];
    b.labels[t] = "t".into();
    let (net, fourier) = b.finish()?;
    let psi = attach_fourier(&net, &fourier, s, t)?;
    let mut params = BTreeMap::new();
    params.insert("n".into(), n as u64);
    params.insert("degree".into(), spec.degree() as u64);
    Ok(Instance {
        family: "hierarchical".into(),
        params,
        seed: Some(seed),
        net,
        psi,
        s,
        t,
        fourier,
        path: None,
        trees: Vec::new(),
    })
}

/// Two binary trees of depth h welded at their leaves.
pub fn welded_tree(h: usize, seed: u64) -> Result<Instance> {
    let spec = HierarchicalSpec::welded_tree(h)?;
    let mut inst = hierarchical_1d(&spec, seed)?;
    inst.family = "welded-tree".into();
    inst.params = BTreeMap::from([("h".to_string(), h as u64)]);
    inst.trees = vec![(inst.s, inst.t)];
    Ok(inst)
}

/// R of an isolated welded tree of depth h.
pub fn welded_tree_resistance(h: usize) -> Result<f64> {
    Ok(HierarchicalSpec::welded_tree(h)?.closed_form_resistance())
}

/// Weight of the last edge layer of a welded tree of depth h.
pub fn welded_tree_last_weight(h: usize) -> Result<f64> {
    Ok(*HierarchicalSpec::welded_tree(h)?.weights().last().expect("non-empty"))
}

fn unit_state(net: &Network, u: usize, amps: &[(usize, f64)]) -> Result<ArcState> {
    let mut psi = ArcState::zeros(net.arc_dim());
    for &(v, a) in amps {
        psi[net.slot_of(u, v)?] = C64::new(a, 0.0);
    }
    Ok(psi)
}

/// G₁ with the three additional alternative states on v₂, v₃, v₈.
pub fn graph_g1() -> Result<Instance> {
    let q = 0.25;
    let net = Network::from_labelled(&[
        ("s", "v2", 1.0),
        ("s", "v1", 1.0),
        ("v2", "v5", q),
        ("v2", "v4", q),
        ("v4", "v6", q),
        ("v1", "v3", 1.0),
        ("v3", "v7", q),
        ("v3", "v6", q),
        ("v7", "v5", q),
        ("v8", "v5", q),
        ("v8", "v6", q),
        ("t", "v8", 1.0),
    ])?;
    let v = |l: &str| net.vertex(l);
    let k = (2.0f64 / 3.0).sqrt();
    let mut psi = AltNeighbourhoods::stars(&net);
    let extra = [
        ("v2", [("v4", -1.0), ("s", 0.5), ("v5", 0.5)]),
        ("v3", [("v1", 0.5), ("v6", -1.0), ("v7", 0.5)]),
        ("v8", [("t", 0.5), ("v5", -1.0), ("v6", 0.5)]),
    ];
    let mut fourier = vec![false; net.n_vertices()];
    for (u, amps) in extra {
        let u = v(u)?;
        let amps = amps.iter().map(|&(w, a)| Ok((v(w)?, k * a))).collect::<Result<Vec<_>>>()?;
        psi.set_extra(&net, u, vec![unit_state(&net, u, &amps)?])?;
        fourier[u] = true;
    }
    let (s, t) = (v("s")?, v("t")?);
    let path = Some(vec![s, v("v2")?, v("v4")?, v("v6")?, v("v8")?, t]);
    Ok(Instance {
        family: "g1".into(),
        params: BTreeMap::new(),
        seed: None,
        net,
        psi,
        s,
        t,
        fourier,
        path,
        trees: Vec::new(),
    })
}

/// Edge-count line of a welded tree embedded between two unit edges.
fn embedded_line(h: usize) -> Result<(HierarchicalSpec, Vec<f64>)> {
    let tree = HierarchicalSpec::welded_tree(h)?;
    let mut e = vec![1];
    e.extend(&tree.edges);
    e.push(1);
    Ok((tree, line_weights(&e)))
}

/// R of the welded tree W₁ as weighted inside G₂: Σ_k 1/(e_k ŵ_{k+1}).
pub fn g2_tree_resistance(h: usize) -> Result<f64> {
    let (tree, w) = embedded_line(h)?;
    Ok(tree.edges.iter().enumerate().map(|(k, &e)| 1.0 / (e as f64 * w[k + 1])).sum())
}

/// x = (5+2R)/(9+3R).
pub fn g2_x(r: f64) -> f64 {
    (5.0 + 2.0 * r) / (9.0 + 3.0 * r)
}

/// R^alt = (4+R)x + 3.
pub fn g2_alt_resistance(r: f64) -> f64 {
    (4.0 + r) * g2_x(r) + 3.0
}

/// R^alt of the welded tree circuit with n layers and trees of depth n.
pub fn circuit_alt_resistance(n: usize) -> Result<f64> {
    Ok(n as f64 * g2_alt_resistance(g2_tree_resistance(n)?))
}

/// Vertex ids of one G₂ layer.
#[derive(Clone, Debug)]
pub struct G2Layer {
    pub s: usize,
    pub v: [usize; 5],
    pub w: [usize; 6],
    pub t: usize,
}

fn add_g2_layer(b: &mut Builder, s: usize, h: usize, prefix: &str, rng: &mut ChaCha8Rng) -> Result<G2Layer> {
    let (tree, wline) = embedded_line(h)?;
    let n = tree.len();
    let q = 0.25;
    let vx = |b: &mut Builder, name: &str, f: bool| b.vertex(format!("{prefix}{name}"), f);
    let v1 = vx(b, "v1", true);
    let v2 = vx(b, "v2", true);
    let v3 = vx(b, "v3", false);
    let v4 = vx(b, "v4", false);
    let v5 = vx(b, "v5", true);
    let w1 = vx(b, "w1", true);
    let w2 = vx(b, "w2", false);
    let w3 = vx(b, "w3", false);
    let w4 = vx(b, "w4", true);
    let w5 = vx(b, "w5", false);
    let w6 = vx(b, "w6", true);
    let t = b.vertex(format!("{prefix}t"), false);
    let fourier_layer = |j: usize| j % 2 == 0 && j != n;
    let trees = [(w1, w2, 1.0, true, "W1."), (w4, w3, q, false, "W2."), (w6, w5, q, false, "W3.")];
    for (start, end, scale, same, tag) in trees {
        b.line(
            &tree,
            start,
            Some(end),
            &format!("{prefix}{tag}"),
            |k| scale * wline[k],
            |k| layer_forward(k + 1) == same,
            fourier_layer,
            rng,
        )?;
    }
    b.arc(s, v2, 1.0);
    b.arc(s, w1, 1.0);
    b.arc(v2, v4, q);
    b.arc(v2, w3, q);
    b.arc(v5, v4, q);
    b.arc(w2, v1, 1.0);
    b.arc(w4, v3, q);
    b.arc(v1, w5, q);
    b.arc(v1, v3, q);
    b.arc(v5, v3, q);
    b.arc(t, v5, 1.0);
    b.arc(w6, v4, q);
    Ok(G2Layer { s, v: [v1, v2, v3, v4, v5], w: [w1, w2, w3, w4, w5, w6], t })
}

/// G₂: G₁'s skeleton with three welded trees of depth h spliced in.
pub fn graph_g2(h: usize, seed: u64) -> Result<Instance> {
    let mut inst = welded_circuit_layers(1, h, seed)?;
    inst.family = "g2".into();
    inst.params = BTreeMap::from([("h".to_string(), h as u64)]);
    Ok(inst)
}

/// n chained G₂ layers with trees of depth n.
pub fn welded_circuit(n: usize, seed: u64) -> Result<Instance> {
    let mut inst = welded_circuit_layers(n, n, seed)?;
    inst.family = "circuit".into();
    inst.params = BTreeMap::from([("n".to_string(), n as u64)]);
    Ok(inst)
}

/// `layers` chained G₂ gadgets, each with trees of depth `h`; layer i's t is
/// layer i+1's s.
pub fn welded_circuit_layers(layers: usize, h: usize, seed: u64) -> Result<Instance> {
    if layers < 1 {
        return Err(Error::Generator("at least one layer is required".into()));
    }
    if h < 1 {
        return Err(Error::Generator("welded tree depth must be at least 1".into()));
    }
    let mut rng = rng_for(seed);
    let mut b = Builder::new();
    let s = b.vertex("s".into(), false);
    let mut start = s;
    let mut path = vec![s];
    let mut trees = Vec::new();
    for i in 1..=layers {
        let prefix = if layers == 1 { String::new() } else { format!("p{i}.") };
        let g = add_g2_layer(&mut b, start, h, &prefix, &mut rng)?;
        path.extend([g.v[1], g.v[3], g.v[4], g.t]);
        let w = g.w;
        trees.extend([(w[0], w[1]), (w[3], w[2]), (w[5], w[4])]);
        start = g.t;
    }
    b.labels[start] = "t".into();
    let t = start;
    let (net, fourier) = b.finish()?;
    let psi = attach_fourier(&net, &fourier, s, t)?;
    Ok(Instance {
        family: "circuit".into(),
        params: BTreeMap::from([("layers".to_string(), layers as u64), ("h".to_string(), h as u64)]),
        seed: Some(seed),
        net,
        psi,
        s,
        t,
        fourier,
        path: Some(path),
        trees,
    })
}

/// Junction vertex at the start of layer `i` (1-based) of a circuit.
pub fn circuit_junction(inst: &Instance, i: usize) -> Option<usize> {
    inst.path.as_ref()?.get(4 * (i - 1)).copied()
}

/// The four-vertex worked example; with `alt` the extra state at x.
pub fn example(alt: bool) -> Result<Instance> {
    build_example(alt, true)
}

/// The worked example with edge y–t removed.
pub fn counterexample() -> Result<Instance> {
    build_example(true, false)
}

fn build_example(alt: bool, with_yt: bool) -> Result<Instance> {
    let mut arcs = vec![("s", "x", 1.0), ("x", "y", 0.25), ("x", "t", 0.25)];
    if with_yt {
        arcs.push(("y", "t", 0.25));
    }
    let net = Network::from_labelled(&arcs)?;
    let (s, x, y, t) = (net.vertex("s")?, net.vertex("x")?, net.vertex("y")?, net.vertex("t")?);
    let mut psi = AltNeighbourhoods::stars(&net);
    let mut fourier = vec![false; net.n_vertices()];
    if alt {
        let k = (2.0f64 / 3.0).sqrt();
        psi.set_extra(&net, x, vec![unit_state(&net, x, &[(s, 0.5 * k), (y, -k), (t, 0.5 * k)])?])?;
        fourier[x] = true;
    }
    let family = match (alt, with_yt) {
        (_, false) => "counterexample",
        (true, true) => "example-alt",
        (false, true) => "example",
    };
    Ok(Instance {
        family: family.into(),
        params: BTreeMap::new(),
        seed: None,
        net,
        psi,
        s,
        t,
        fourier,
        path: Some(vec![s, x, t]),
        trees: Vec::new(),
    })
}
