use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alt::{AltNeighbourhoods, AltPotential};
use crate::error::{Error, Result};
use crate::generators::Instance;
use crate::network::{ArcState, EdgePotential, Flow, Network, VertexPotential, C64};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkJson {
    pub vertices: Vec<String>,
    pub arcs: Vec<(String, String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub arc: (String, String),
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub s: String,
    pub t: String,
    #[serde(default)]
    pub fourier: Vec<String>,
    #[serde(default)]
    pub path: Option<Vec<String>>,
    #[serde(default)]
    pub trees: Vec<(String, String)>,
}

/// A network file: vertices and arcs, the states each vertex holds beyond
/// its star state, and optional instance metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub schema: u32,
    #[serde(flatten)]
    pub network: NetworkJson,
    #[serde(default)]
    pub alt: BTreeMap<String, Vec<Vec<Amplitude>>>,
    #[serde(default)]
    pub meta: Option<Metadata>,
}

pub fn network_to_json(net: &Network) -> NetworkJson {
    NetworkJson {
        vertices: net.labels().to_vec(),
        arcs: net
            .arcs()
            .iter()
            .zip(net.weights())
            .map(|(&(u, v), &w)| (net.label(u).to_string(), net.label(v).to_string(), w))
            .collect(),
    }
}

pub fn network_from_json(j: &NetworkJson) -> Result<Network> {
    let mut index = BTreeMap::new();
    for (i, l) in j.vertices.iter().enumerate() {
        if index.insert(l.as_str(), i).is_some() {
            return Err(Error::InvalidNetwork(format!("duplicate vertex {l:?}")));
        }
    }
    let look = |l: &str| index.get(l).copied().ok_or_else(|| Error::UnknownVertex(l.to_string()));
    let arcs = j.arcs.iter().map(|(u, v, w)| Ok((look(u)?, look(v)?, *w))).collect::<Result<Vec<_>>>()?;
    Network::new(j.vertices.clone(), arcs)
}

pub fn state_to_json(net: &Network, psi: &ArcState) -> Vec<Amplitude> {
    psi.iter()
        .enumerate()
        .filter(|(_, z)| z.norm() != 0.0)
        .map(|(k, z)| {
            let (u, v) = net.slot_arc(k);
            Amplitude { arc: (net.label(u).to_string(), net.label(v).to_string()), re: z.re, im: z.im }
        })
        .collect()
}

pub fn state_from_json(net: &Network, amps: &[Amplitude]) -> Result<ArcState> {
    let mut psi = ArcState::zeros(net.arc_dim());
    for a in amps {
        let slot = net.slot_of(net.vertex(&a.arc.0)?, net.vertex(&a.arc.1)?)?;
        psi[slot] += C64::new(a.re, a.im);
    }
    Ok(psi)
}

pub fn alt_to_json(net: &Network, psi: &AltNeighbourhoods) -> BTreeMap<String, Vec<Vec<Amplitude>>> {
    (0..net.n_vertices())
        .filter(|&u| psi.has_extra(u))
        .map(|u| (net.label(u).to_string(), psi.get(u)[1..].iter().map(|p| state_to_json(net, p)).collect()))
        .collect()
}

pub fn alt_from_json(net: &Network, j: &BTreeMap<String, Vec<Vec<Amplitude>>>) -> Result<AltNeighbourhoods> {
    let mut psi = AltNeighbourhoods::stars(net);
    for (label, states) in j {
        let u = net.vertex(label)?;
        let extra = states.iter().map(|a| state_from_json(net, a)).collect::<Result<Vec<_>>>()?;
        psi.set_extra(net, u, extra)?;
    }
    Ok(psi)
}

pub fn instance_to_json(inst: &Instance) -> InstanceJson {
    let net = &inst.net;
    let l = |u: usize| net.label(u).to_string();
    InstanceJson {
        schema: SCHEMA,
        network: network_to_json(net),
        alt: alt_to_json(net, &inst.psi),
        meta: Some(Metadata {
            family: inst.family.clone(),
            params: inst.params.clone(),
            seed: inst.seed,
            s: l(inst.s),
            t: l(inst.t),
            fourier: (0..net.n_vertices()).filter(|&u| inst.fourier[u]).map(l).collect(),
            path: inst.path.as_ref().map(|p| p.iter().map(|&u| l(u)).collect()),
            trees: inst.trees.iter().map(|&(a, b)| (l(a), l(b))).collect(),
        }),
    }
}

/// Rebuilds an instance. Terminals come from the metadata unless given;
/// without either the call fails.
pub fn instance_from_json(j: &InstanceJson, s: Option<&str>, t: Option<&str>) -> Result<Instance> {
    if j.schema != SCHEMA {
        return Err(Error::InvalidArgument(format!("unsupported schema {}", j.schema)));
    }
    let net = network_from_json(&j.network)?;
    let psi = alt_from_json(&net, &j.alt)?;
    let meta = j.meta.clone().unwrap_or_default();
    let pick = |given: Option<&str>, stored: &str, which: &str| -> Result<usize> {
        match given.or((!stored.is_empty()).then_some(stored)) {
            Some(l) => net.vertex(l),
            None => Err(Error::InvalidArgument(format!("no {which} terminal given"))),
        }
    };
    let s = pick(s, &meta.s, "s")?;
    let t = pick(t, &meta.t, "t")?;
    let mut fourier = vec![false; net.n_vertices()];
    for l in &meta.fourier {
        fourier[net.vertex(l)?] = true;
    }
    let path = match &meta.path {
        Some(p) => Some(p.iter().map(|l| net.vertex(l)).collect::<Result<Vec<_>>>()?),
        None => None,
    };
    let trees = meta.trees.iter().map(|(a, b)| Ok((net.vertex(a)?, net.vertex(b)?))).collect::<Result<Vec<_>>>()?;
    Ok(Instance {
        family: if meta.family.is_empty() { "file".into() } else { meta.family },
        params: meta.params,
        seed: meta.seed,
        net,
        psi,
        s,
        t,
        fourier,
        path,
        trees,
    })
}

pub fn read_instance(path: &Path, s: Option<&str>, t: Option<&str>) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    instance_from_json(&serde_json::from_str(&text)?, s, t)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcValue {
    pub arc: (String, String),
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeValue {
    pub arc: (String, String),
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub vertex: String,
    pub index: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub schema: u32,
    pub kind: String,
    pub s: String,
    pub t: String,
    pub resistance: f64,
    pub flow: Vec<ArcValue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub potential: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edge_potential: Option<Vec<EdgeValue>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coefficients: Option<Vec<Coefficient>>,
    pub residuals: BTreeMap<String, f64>,
}

pub fn flow_values(net: &Network, f: &Flow) -> Vec<ArcValue> {
    net.arcs()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| ArcValue {
            arc: (net.label(u).to_string(), net.label(v).to_string()),
            theta: f.on_edge(e),
        })
        .collect()
}

pub fn vertex_potential_map(net: &Network, p: &VertexPotential) -> BTreeMap<String, f64> {
    p.values.iter().enumerate().map(|(u, &x)| (net.label(u).to_string(), x)).collect()
}

/// Both endpoints' values of every edge, stored orientation first.
pub fn edge_potential_values(net: &Network, p: &EdgePotential) -> Vec<EdgeValue> {
    let m = net.n_edges();
    (0..2 * m)
        .map(|k| {
            let (u, v) = net.slot_arc(k);
            EdgeValue { arc: (net.label(u).to_string(), net.label(v).to_string()), p: p.values[k] }
        })
        .collect()
}

pub fn coefficients(net: &Network, pot: &AltPotential) -> Vec<Coefficient> {
    pot.columns
        .iter()
        .zip(&pot.coeffs)
        .map(|(&(u, i), z)| Coefficient { vertex: net.label(u).to_string(), index: i, re: z.re, im: z.im })
        .collect()
}

/// CSV mirror of a flow report: one row per arc with θ, followed by
/// potentials when present.
pub fn flow_report_csv(r: &FlowReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "u", "v", "value"]).map_err(csv_err)?;
    for a in &r.flow {
        w.write_record(["theta", &a.arc.0, &a.arc.1, &a.theta.to_string()]).map_err(csv_err)?;
    }
    for (u, p) in r.potential.iter().flatten() {
        w.write_record(["p", u, "", &p.to_string()]).map_err(csv_err)?;
    }
    for e in r.edge_potential.iter().flatten() {
        w.write_record(["p_edge", &e.arc.0, &e.arc.1, &e.p.to_string()]).map_err(csv_err)?;
    }
    finish_csv(w)
}

/// Serialises rows of any serde struct as CSV with a header.
pub fn rows_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
