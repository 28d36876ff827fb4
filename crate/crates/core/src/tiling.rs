//! Layered {p,q} tilings grown by vertex inflation.
//!
//! Layer 0 is a single seed vertex whose `q` legs all point outward. Every
//! outgoing leg of layer `L` spawns a *spoke* vertex in layer `L+1` (one
//! inward leg, two ring legs, `q-3` outgoing legs). Between consecutive
//! spokes, *corner* vertices (two ring legs, `q-2` outgoing legs) close the
//! faces: `p-3` corners between two spokes of the same parent, `p-4` between
//! spokes of ring-adjacent parents. For {5,4} spokes are the α vertices,
//! corners the β vertices and the seed is δ, and the words reproduce
//! α ↦ αβ, β ↦ αββαβ, δ ↦ (αββ)⁴.
//!
//! Planar legs are stored in counter-clockwise order:
//! seed `[out_0 .. out_{q-1}]`, spoke `[inward, prev, outs.., next]`,
//! corner `[prev, outs.., next]`. Leg `q` of every vertex is its logical leg.
//! Vertices are numbered layer by layer in ring order; the bulk qubit of a
//! vertex has the vertex's index. Boundary qubits are the open legs of the
//! last layer, numbered in ring order.

use serde::{Deserialize, Serialize};

/// Largest qubit count [`build_tiling`] accepts.
pub const DEFAULT_QUBIT_CAP: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TilingError {
    #[error("{{{p},{q}}} is not hyperbolic (need p > 2q/(q-2))")]
    NotHyperbolic { p: usize, q: usize },
    #[error("q = {0} must be even and at least 4")]
    InvalidQ(usize),
    #[error("p = {0} is unsupported (need p >= 4)")]
    InvalidP(usize),
    #[error("{layers} layers would need {qubits} qubits, above the cap of {cap}")]
    TooLarge {
        layers: usize,
        qubits: u128,
        cap: usize,
    },
}

/// Role of a vertex in the inflation. With `q = 4` these have 1, 2 and 4
/// outgoing legs; in general `q-3`, `q-2` and `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexType {
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "delta")]
    Delta,
}

impl VertexType {
    pub fn outgoing(self, q: usize) -> usize {
        match self {
            VertexType::Alpha => q - 3,
            VertexType::Beta => q - 2,
            VertexType::Delta => q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Leg {
    Contracted { vertex: usize, leg: usize },
    Boundary { qubit: usize },
    Logical { bulk: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub layer: usize,
    pub vtype: VertexType,
    /// `q` planar legs followed by the logical leg.
    pub legs: Vec<Leg>,
}

impl Vertex {
    /// Indices of the legs pointing to the next layer.
    pub fn outgoing_legs(&self, q: usize) -> std::ops::Range<usize> {
        match self.vtype {
            VertexType::Delta => 0..q,
            VertexType::Alpha => 2..q - 1,
            VertexType::Beta => 1..q - 1,
        }
    }

    /// Index of the leg toward the previous ring neighbour, if any.
    pub fn prev_leg(&self) -> Option<usize> {
        match self.vtype {
            VertexType::Delta => None,
            VertexType::Alpha => Some(1),
            VertexType::Beta => Some(0),
        }
    }

    pub fn next_leg(&self, q: usize) -> Option<usize> {
        match self.vtype {
            VertexType::Delta => None,
            _ => Some(q - 1),
        }
    }

    pub fn inward_leg(&self) -> Option<usize> {
        (self.vtype == VertexType::Alpha).then_some(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingGraph {
    pub p: usize,
    pub q: usize,
    /// Vertex ids of every layer in ring order.
    pub layers: Vec<Vec<usize>>,
    pub vertices: Vec<Vertex>,
    /// `(vertex, leg)` of every boundary qubit.
    pub boundary: Vec<(usize, usize)>,
}

/// Per-layer counts `(n_α, n_β, n_δ)`.
pub type LayerCounts = [u128; 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCounts {
    pub n_physical: usize,
    pub k_bulk: usize,
    pub per_layer: Vec<LayerCounts>,
}

fn check_params(p: usize, q: usize) -> Result<(), TilingError> {
    if q < 4 || q % 2 == 1 {
        return Err(TilingError::InvalidQ(q));
    }
    // 1/p + 1/q < 1/2
    if 2 * (p + q) >= p * q {
        return Err(TilingError::NotHyperbolic { p, q });
    }
    if p < 4 {
        return Err(TilingError::InvalidP(p));
    }
    Ok(())
}

/// Counts per layer from the substitution matrix, without building the graph.
pub fn layer_counts_recursion(p: usize, q: usize, layers: usize) -> Vec<LayerCounts> {
    let m = substitution_matrix(p, q);
    let mut eta = vec![[0u128, 0, 1]];
    for _ in 0..layers {
        let prev = eta.last().unwrap();
        let mut next = [0u128; 3];
        for (i, row) in m.iter().enumerate() {
            next[i] = (0..3).map(|j| row[j] * prev[j]).sum();
        }
        eta.push(next);
    }
    eta
}

/// Substitution matrix acting on `(n_α, n_β, n_δ)`.
pub fn substitution_matrix(p: usize, q: usize) -> [[u128; 3]; 3] {
    let (p, q) = (p as u128, q as u128);
    // A parent with t outgoing legs has word S (C^{p-3} S)^{t-1} C^{p-4}.
    let corners = |t: u128| (t - 1) * (p - 3) + (p - 4);
    [
        [q - 3, q - 2, q],
        [corners(q - 3), corners(q - 2), q * (p - 3)],
        [0, 0, 0],
    ]
}

fn physical_from_counts(q: usize, eta: &LayerCounts) -> u128 {
    let q = q as u128;
    eta[0] * (q - 3) + eta[1] * (q - 2) + eta[2] * q
}

pub fn build_tiling(p: usize, q: usize, layers: usize) -> Result<TilingGraph, TilingError> {
    build_tiling_with_cap(p, q, layers, DEFAULT_QUBIT_CAP)
}

pub fn build_tiling_with_cap(
    p: usize,
    q: usize,
    layers: usize,
    cap: usize,
) -> Result<TilingGraph, TilingError> {
    check_params(p, q)?;
    let eta = layer_counts_recursion(p, q, layers);
    let n = physical_from_counts(q, eta.last().unwrap());
    let k: u128 = eta.iter().map(|e| e.iter().sum::<u128>()).sum();
    if n > cap as u128 || k > cap as u128 {
        return Err(TilingError::TooLarge {
            layers,
            qubits: n,
            cap,
        });
    }

    let mut vertices = vec![Vertex {
        id: 0,
        layer: 0,
        vtype: VertexType::Delta,
        legs: placeholder_legs(q, 0),
    }];
    let mut layer_ids = vec![vec![0usize]];

    for layer in 1..=layers {
        let parents = layer_ids[layer - 1].clone();
        let seed_parent = layer == 1;
        let mut ring: Vec<usize> = Vec::new();
        for &parent in &parents {
            let outs: Vec<usize> = vertices[parent].outgoing_legs(q).collect();
            for (i, &leg) in outs.iter().enumerate() {
                let id = vertices.len();
                let mut legs = placeholder_legs(q, id);
                legs[0] = Leg::Contracted { vertex: parent, leg };
                vertices[parent].legs[leg] = Leg::Contracted { vertex: id, leg: 0 };
                vertices.push(Vertex {
                    id,
                    layer,
                    vtype: VertexType::Alpha,
                    legs,
                });
                ring.push(id);
                let gap = if seed_parent || i + 1 < outs.len() { p - 3 } else { p - 4 };
                for _ in 0..gap {
                    let id = vertices.len();
                    vertices.push(Vertex {
                        id,
                        layer,
                        vtype: VertexType::Beta,
                        legs: placeholder_legs(q, id),
                    });
                    ring.push(id);
                }
            }
        }
        for i in 0..ring.len() {
            let a = ring[i];
            let b = ring[(i + 1) % ring.len()];
            let a_next = vertices[a].next_leg(q).unwrap();
            let b_prev = vertices[b].prev_leg().unwrap();
            vertices[a].legs[a_next] = Leg::Contracted { vertex: b, leg: b_prev };
            vertices[b].legs[b_prev] = Leg::Contracted { vertex: a, leg: a_next };
        }
        layer_ids.push(ring);
    }

    let mut boundary = Vec::with_capacity(n as usize);
    for &v in layer_ids.last().unwrap() {
        for leg in vertices[v].outgoing_legs(q) {
            vertices[v].legs[leg] = Leg::Boundary {
                qubit: boundary.len(),
            };
            boundary.push((v, leg));
        }
    }

    Ok(TilingGraph {
        p,
        q,
        layers: layer_ids,
        vertices,
        boundary,
    })
}

fn placeholder_legs(q: usize, id: usize) -> Vec<Leg> {
    let mut legs = vec![Leg::Logical { bulk: usize::MAX }; q];
    legs.push(Leg::Logical { bulk: id });
    legs
}

impl TilingGraph {
    pub fn num_layers(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn n_physical(&self) -> usize {
        self.boundary.len()
    }

    pub fn k_bulk(&self) -> usize {
        self.vertices.len()
    }

    /// Contracted edges as `((u, leg_u), (v, leg_v))` with `u < v`, ordered
    /// by the larger endpoint's layer, then by `v`.
    pub fn edges(&self) -> Vec<((usize, usize), (usize, usize))> {
        let mut out = Vec::new();
        for v in &self.vertices {
            for (leg, l) in v.legs.iter().enumerate() {
                if let Leg::Contracted { vertex, leg: peer } = *l {
                    if vertex < v.id {
                        out.push(((vertex, peer), (v.id, leg)));
                    }
                }
            }
        }
        out
    }

    /// Lengths of all closed faces, found by walking the rotation system.
    /// Faces that reach a boundary leg are open and skipped.
    pub fn closed_faces(&self) -> Vec<usize> {
        let q = self.q;
        let mut visited = vec![false; self.vertices.len() * q];
        let mut faces = Vec::new();
        for start in 0..self.vertices.len() * q {
            if visited[start] {
                continue;
            }
            let mut dart = start;
            let mut len = 0;
            let mut open = false;
            loop {
                visited[dart] = true;
                let (v, leg) = (dart / q, dart % q);
                match self.vertices[v].legs[leg] {
                    Leg::Contracted { vertex, leg: peer } => {
                        len += 1;
                        dart = vertex * q + (peer + q - 1) % q;
                    }
                    _ => {
                        open = true;
                        break;
                    }
                }
                if dart == start || visited[dart] {
                    open |= dart != start;
                    break;
                }
            }
            if !open {
                faces.push(len);
            }
        }
        faces
    }

    /// Checks leg symmetry, typing and that every closed face is a p-gon.
    pub fn validate(&self) -> Result<(), String> {
        let q = self.q;
        for v in &self.vertices {
            if v.legs.len() != q + 1 {
                return Err(format!("vertex {} has {} legs", v.id, v.legs.len()));
            }
            if v.legs[q] != (Leg::Logical { bulk: v.id }) {
                return Err(format!("vertex {} logical leg mislabelled", v.id));
            }
            for (leg, l) in v.legs[..q].iter().enumerate() {
                match *l {
                    Leg::Contracted { vertex, leg: peer } => {
                        let back = self.vertices[vertex].legs[peer];
                        if back != (Leg::Contracted { vertex: v.id, leg }) {
                            return Err(format!("leg ({}, {leg}) not involutive", v.id));
                        }
                        if self.vertices[vertex].layer.abs_diff(v.layer) > 1 {
                            return Err(format!("edge ({}, {vertex}) skips a layer", v.id));
                        }
                    }
                    Leg::Boundary { qubit } => {
                        if self.boundary.get(qubit) != Some(&(v.id, leg)) {
                            return Err(format!("boundary qubit {qubit} mismatch"));
                        }
                    }
                    Leg::Logical { .. } => {
                        return Err(format!("planar leg ({}, {leg}) left open", v.id));
                    }
                }
            }
        }
        if let Some(bad) = self.closed_faces().into_iter().find(|&f| f != self.p) {
            return Err(format!("closed face of length {bad}"));
        }
        Ok(())
    }
}

pub fn vertex_counts(g: &TilingGraph) -> VertexCounts {
    let per_layer = g
        .layers
        .iter()
        .map(|ids| {
            let mut c = [0u128; 3];
            for &v in ids {
                let slot = match g.vertices[v].vtype {
                    VertexType::Alpha => 0,
                    VertexType::Beta => 1,
                    VertexType::Delta => 2,
                };
                c[slot] += 1;
            }
            c
        })
        .collect();
    VertexCounts {
        n_physical: g.n_physical(),
        k_bulk: g.k_bulk(),
        per_layer,
    }
}
