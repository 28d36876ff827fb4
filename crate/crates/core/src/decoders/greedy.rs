use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use super::{DecodeError, DecodeOutcome, ErasurePattern};
use crate::codegen::{local_group, GaugeBasis, LocalRole, StabilizerCode};
use crate::tiling::{Leg, TilingGraph};

/// Largest `q` for which two-tensor rules are tabulated.
pub const MAX_GREEDY_Q: usize = 10;

fn pauli_at(mask: u64, leg: usize) -> u64 {
    (mask >> (2 * leg)) & 3
}

fn swap_xz(p: u64) -> u64 {
    ((p & 1) << 1) | (p >> 1)
}

/// Recovery table of a cluster of tensors with `m` open legs: entry `a` is
/// the set of open legs whose full Pauli algebra can be reconstructed when
/// the legs in `a` are accessible. A leg counts as reconstructed when two
/// different non-identity Paulis on it are equivalent to operators on `a`.
fn recovery_table(group: &[u64], m: usize) -> Vec<u32> {
    let size = 1usize << m;
    // seen[b]: 3 bits per leg, the non-identity values taken on that leg by
    // group elements supported inside b.
    let mut seen = vec![0u64; size];
    for &g in group {
        let mut support = 0usize;
        let mut vals = 0u64;
        for l in 0..m {
            let p = pauli_at(g, l);
            if p != 0 {
                support |= 1 << l;
                vals |= 1 << (3 * l + p as usize - 1);
            }
        }
        seen[support] |= vals;
    }
    for i in 0..m {
        for b in 0..size {
            if b >> i & 1 == 1 {
                seen[b] |= seen[b ^ 1 << i];
            }
        }
    }
    (0..size)
        .map(|a| {
            let mut out = a as u32;
            for l in 0..m {
                if a >> l & 1 == 0 && (seen[a | 1 << l] >> (3 * l) & 7).count_ones() >= 2 {
                    out |= 1 << l;
                }
            }
            out
        })
        .collect()
}

/// Restricts group elements to `legs` (in that order), packing 2 bits per leg.
fn restrict(g: u64, legs: &[usize]) -> u64 {
    legs.iter()
        .enumerate()
        .fold(0, |m, (i, &l)| m | pauli_at(g, l) << (2 * i))
}

/// Group of two clusters glued along one edge (with a Hadamard): products
/// of elements that agree on the shared edge, restricted to the remaining
/// legs. Legs of `a` other than `la` come first, then those of `b`.
fn join(a: &[u64], ma: usize, la: usize, b: &[u64], mb: usize, lb: usize) -> (Vec<u64>, usize) {
    let ext_a: Vec<usize> = (0..ma).filter(|&j| j != la).collect();
    let ext_b: Vec<usize> = (0..mb).filter(|&j| j != lb).collect();
    let mut by_leg: [Vec<u64>; 4] = Default::default();
    for &e in b {
        by_leg[swap_xz(pauli_at(e, lb)) as usize].push(restrict(e, &ext_b));
    }
    let shift = 2 * ext_a.len();
    let mut joint = Vec::new();
    for &e in a {
        let ra = restrict(e, &ext_a);
        for &f in &by_leg[pauli_at(e, la) as usize] {
            joint.push(ra | f << shift);
        }
    }
    joint.sort_unstable();
    joint.dedup();
    (joint, ext_a.len() + ext_b.len())
}

#[derive(Debug, Clone)]
struct Cluster {
    legs: Vec<u32>,
    table: Arc<Vec<u32>>,
}

/// Reconstruction result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyState {
    /// Vertices whose planar legs (and logical leg, when ungauged) are all
    /// reconstructed.
    pub wedge: BTreeSet<usize>,
    /// Accessible legs per vertex: planar legs `0..q`, then the logical leg
    /// for ungauged vertices.
    pub accessible: Vec<Vec<bool>>,
}

/// Greedy erasure reconstruction on the tensor network.
///
/// Legs are either fully accessible or not. Starting from the non-erased
/// boundary, every single tensor and every pair of neighbouring tensors is
/// used as a recovery step: open legs of the cluster that can be rebuilt
/// from its accessible open legs become accessible. Gauged tensors carry
/// their fixed gauge operator; logical legs of ungauged tensors are legs to
/// be reconstructed like any other. The steps are tabulated once per
/// cluster shape and applied with a worklist until nothing changes. The
/// target succeeds when it lies in the resulting wedge.
#[derive(Debug, Clone)]
pub struct GreedyDecoder {
    n: usize,
    num_legs: usize,
    clusters: Vec<Cluster>,
    /// Clusters touching each leg.
    watchers: Vec<Vec<u32>>,
    vertex_legs: Vec<Vec<u32>>,
    gauged: Vec<bool>,
}

impl GreedyDecoder {
    pub fn new(code: &StabilizerCode, g: &TilingGraph) -> Result<Self, DecodeError> {
        if code.n != g.n_physical() {
            return Err(DecodeError::GraphMismatch(format!(
                "code has {} qubits, graph {}",
                code.n,
                g.n_physical()
            )));
        }
        if let Some(t) = code.tiling {
            if (t.p, t.q, t.layers) != (g.p, g.q, g.num_layers()) {
                return Err(DecodeError::GraphMismatch("tiling parameters differ".into()));
            }
        }
        let q = g.q;
        if q > MAX_GREEDY_Q {
            return Err(DecodeError::GraphMismatch(format!(
                "greedy reconstruction supports q <= {MAX_GREEDY_Q}"
            )));
        }
        let k = g.k_bulk();
        let mut fixed: HashMap<usize, GaugeBasis> = HashMap::new();
        for gp in &code.gauge_pairs {
            fixed.insert(gp.bulk, gp.fixed);
        }
        let role = |v: usize| fixed.get(&v).map_or(LocalRole::Ungauged, |&b| LocalRole::Gauged(b));
        let open = |v: usize| if fixed.contains_key(&v) { q } else { q + 1 };

        // Leg ids: boundary qubits first, then contracted edges, then
        // logical legs.
        let n = code.n;
        let mut next = n;
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut vertex_legs: Vec<Vec<u32>> = Vec::with_capacity(k);
        for v in &g.vertices {
            let mut ids = Vec::with_capacity(q + 1);
            for (l, leg) in v.legs[..q].iter().enumerate() {
                ids.push(match *leg {
                    Leg::Boundary { qubit } => qubit,
                    Leg::Contracted { vertex, leg } => {
                        let key = if v.id < vertex { (v.id, l) } else { (vertex, leg) };
                        *edge_ids.entry(key).or_insert_with(|| {
                            next += 1;
                            next - 1
                        })
                    }
                    Leg::Logical { .. } => unreachable!("planar legs are never logical"),
                } as u32);
            }
            vertex_legs.push(ids);
        }
        for (v, ids) in vertex_legs.iter_mut().enumerate() {
            if !fixed.contains_key(&v) {
                ids.push(next as u32);
                next += 1;
            }
        }

        let mut groups: HashMap<LocalRole, Vec<u64>> = HashMap::new();
        let mut group = |r: LocalRole| groups.entry(r).or_insert_with(|| local_group(q, r)).clone();
        let mut singles: HashMap<LocalRole, Arc<Vec<u32>>> = HashMap::new();
        let mut pairs: HashMap<(LocalRole, usize, LocalRole, usize), Arc<Vec<u32>>> = HashMap::new();
        let mut clusters = Vec::new();

        for v in 0..k {
            let r = role(v);
            let gr = group(r);
            let table = singles
                .entry(r)
                .or_insert_with(|| Arc::new(recovery_table(&gr, open(v))))
                .clone();
            clusters.push(Cluster {
                legs: vertex_legs[v].clone(),
                table,
            });
        }
        let neighbours = |v: usize| -> Vec<(usize, usize, usize)> {
            g.vertices[v].legs[..q]
                .iter()
                .enumerate()
                .filter_map(|(lv, leg)| match *leg {
                    Leg::Contracted { vertex, leg } => Some((lv, vertex, leg)),
                    _ => None,
                })
                .collect()
        };
        for v in 0..k {
            for (lv, u, lu) in neighbours(v) {
                if u < v {
                    continue;
                }
                let (rv, ru) = (role(v), role(u));
                let table = pairs
                    .entry((rv, lv, ru, lu))
                    .or_insert_with(|| {
                        let (joint, m) = join(&group(rv), open(v), lv, &group(ru), open(u), lu);
                        Arc::new(recovery_table(&joint, m))
                    })
                    .clone();
                let mut legs: Vec<u32> = (0..open(v)).filter(|&j| j != lv).map(|j| vertex_legs[v][j]).collect();
                legs.extend((0..open(u)).filter(|&j| j != lu).map(|j| vertex_legs[u][j]));
                clusters.push(Cluster { legs, table });
            }
        }
        let mut watchers = vec![Vec::new(); next];
        for (c, cl) in clusters.iter().enumerate() {
            for &l in &cl.legs {
                watchers[l as usize].push(c as u32);
            }
        }
        Ok(Self {
            n,
            num_legs: next,
            clusters,
            watchers,
            vertex_legs,
            gauged: (0..k).map(|v| fixed.contains_key(&v)).collect(),
        })
    }

    /// Runs the reconstruction to its fixpoint.
    pub fn reconstruct(&self, e: &ErasurePattern) -> Result<GreedyState, DecodeError> {
        let acc = self.propagate(e)?;
        let accessible: Vec<Vec<bool>> = self
            .vertex_legs
            .iter()
            .map(|ids| ids.iter().map(|&l| acc[l as usize]).collect())
            .collect();
        let wedge = accessible
            .iter()
            .enumerate()
            .filter(|(_, legs)| legs.iter().all(|&a| a))
            .map(|(v, _)| v)
            .collect();
        Ok(GreedyState { wedge, accessible })
    }

    pub fn decode(&self, e: &ErasurePattern, target: usize) -> Result<DecodeOutcome, DecodeError> {
        if target >= self.gauged.len() || self.gauged[target] {
            return Err(DecodeError::UnknownTarget(target));
        }
        let acc = self.propagate(e)?;
        Ok(if self.vertex_legs[target].iter().all(|&l| acc[l as usize]) {
            DecodeOutcome::ok()
        } else {
            DecodeOutcome::failed(format!("bulk qubit {target} is outside the greedy wedge"))
        })
    }

    fn propagate(&self, e: &ErasurePattern) -> Result<Vec<bool>, DecodeError> {
        if e.n != self.n {
            return Err(DecodeError::LengthMismatch { got: e.n, n: self.n });
        }
        let mut acc = vec![false; self.num_legs];
        for (q, a) in acc.iter_mut().enumerate().take(self.n) {
            *a = !e.contains(q);
        }
        let mut queued = vec![true; self.clusters.len()];
        let mut queue: VecDeque<u32> = (0..self.clusters.len() as u32).collect();
        while let Some(c) = queue.pop_front() {
            queued[c as usize] = false;
            let cl = &self.clusters[c as usize];
            let mask = cl
                .legs
                .iter()
                .enumerate()
                .fold(0usize, |m, (i, &l)| m | (acc[l as usize] as usize) << i);
            let gained = cl.table[mask] as usize & !mask;
            if gained == 0 {
                continue;
            }
            for (i, &l) in cl.legs.iter().enumerate() {
                if gained >> i & 1 == 1 {
                    acc[l as usize] = true;
                    for &w in &self.watchers[l as usize] {
                        if !queued[w as usize] {
                            queued[w as usize] = true;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// One-shot form of [`GreedyDecoder`].
pub fn greedy_decode(
    code: &StabilizerCode,
    g: &TilingGraph,
    e: &ErasurePattern,
    target: usize,
) -> Result<DecodeOutcome, DecodeError> {
    GreedyDecoder::new(code, g)?.decode(e, target)
}
