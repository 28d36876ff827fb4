use std::collections::HashMap;

use super::{seed_code, CodegenError, GaugeBasis, StabilizerCode};
use crate::analytics::LogicalOp;
use crate::symplectic::{Pauli, PauliString};
use crate::tiling::{build_tiling, Leg, TilingGraph};

/// Which operators a single vertex tensor contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalRole {
    /// Seed stabilizers, plus `X̄ ⊗ X` and `Z̄ ⊗ Z` on the logical leg.
    Ungauged,
    /// Seed stabilizers only (logical leg identity).
    Stabilizers,
    /// Seed stabilizers and the fixed gauge operator (logical leg identity).
    Gauged(GaugeBasis),
}

/// 2 bits per leg: bit `2l` is X, bit `2l+1` is Z on leg `l`.
pub(crate) fn leg_pauli(mask: u64, leg: usize) -> u8 {
    ((mask >> (2 * leg)) & 3) as u8
}

pub(crate) fn swap_xz(p: u8) -> u8 {
    ((p & 1) << 1) | (p >> 1)
}

fn mask_of(p: &PauliString) -> u64 {
    (0..p.n()).fold(0, |m, l| {
        let (x, z) = p.get(l).bits();
        m | (x as u64) << (2 * l) | (z as u64) << (2 * l + 1)
    })
}

/// All elements of the local group of a vertex as masks over `q + 1` legs
/// (leg `q` is the logical leg), ordered by the binary counter over the
/// generators.
pub fn local_group(q: usize, role: LocalRole) -> Vec<u64> {
    let seed = seed_code(q).expect("even q");
    let mut gens: Vec<u64> = seed.generators.iter().map(mask_of).collect();
    let (x, z) = (mask_of(&seed.logical_x), mask_of(&seed.logical_z));
    match role {
        LocalRole::Stabilizers => {}
        LocalRole::Ungauged => {
            gens.push(x | 1 << (2 * q));
            gens.push(z | 2 << (2 * q));
        }
        LocalRole::Gauged(GaugeBasis::X) => gens.push(x),
        LocalRole::Gauged(GaugeBasis::Z) => gens.push(z),
        LocalRole::Gauged(GaugeBasis::Y) => gens.push(x ^ z),
    }
    (0u64..1 << gens.len())
        .map(|c| {
            gens.iter()
                .enumerate()
                .filter(|(i, _)| c >> i & 1 == 1)
                .fold(0, |m, (_, g)| m ^ g)
        })
        .collect()
}

/// Boundary representative of `op` on bulk qubit `bulk`, found by pushing
/// the operator outward one layer at a time. Within a layer the choice of
/// local operators minimizes the weight handed to the next layer (a cyclic
/// dynamic program over the ring). Gauge operators of gauged vertices may be
/// used freely.
pub fn push_logical(
    code: &StabilizerCode,
    bulk: usize,
    op: LogicalOp,
) -> Result<PauliString, CodegenError> {
    let t = code.tiling.ok_or(CodegenError::MissingTiling)?;
    let g = build_tiling(t.p, t.q, t.layers)?;
    if bulk >= g.k_bulk() {
        return Err(CodegenError::UnknownBulk(bulk));
    }
    if code.n != g.n_physical() {
        return Err(CodegenError::Invariant("code does not match its tiling".into()));
    }
    let gauged: HashMap<usize, GaugeBasis> =
        code.gauge_pairs.iter().map(|p| (p.bulk, p.fixed)).collect();
    let out = push_on_graph(&g, &gauged, bulk, op);

    let rep = if let Some(l) = code.logical(bulk) {
        match op {
            LogicalOp::X => &l.x,
            LogicalOp::Z => &l.z,
        }
    } else if let Some(gp) = code.gauge_pair(bulk) {
        match op {
            LogicalOp::X => &gp.x,
            LogicalOp::Z => &gp.z,
        }
    } else {
        return Err(CodegenError::UnknownBulk(bulk));
    };
    let mut diff = out.clone();
    diff.mul_assign_unsigned(rep);
    if !code.stabilizers.spans(&diff) {
        return Err(CodegenError::Invariant(format!(
            "pushed operator of bulk qubit {bulk} is not equivalent to its logical"
        )));
    }
    Ok(out)
}

pub(crate) fn push_on_graph(
    g: &TilingGraph,
    gauged: &HashMap<usize, GaugeBasis>,
    bulk: usize,
    op: LogicalOp,
) -> PauliString {
    let q = g.q;
    let stab = local_group(q, LocalRole::Stabilizers);
    let groups: HashMap<Option<GaugeBasis>, Vec<u64>> = [
        (None, stab.clone()),
        (Some(GaugeBasis::X), local_group(q, LocalRole::Gauged(GaugeBasis::X))),
        (Some(GaugeBasis::Y), local_group(q, LocalRole::Gauged(GaugeBasis::Y))),
        (Some(GaugeBasis::Z), local_group(q, LocalRole::Gauged(GaugeBasis::Z))),
    ]
    .into_iter()
    .collect();
    let seed = seed_code(q).unwrap();
    let op_mask = match op {
        LogicalOp::X => mask_of(&seed.logical_x),
        LogicalOp::Z => mask_of(&seed.logical_z),
    };
    let candidates = |v: usize| -> Vec<u64> {
        let base = &groups[&gauged.get(&v).copied()];
        if v == bulk {
            base.iter().map(|m| m ^ op_mask).collect()
        } else {
            base.clone()
        }
    };

    let mut chosen: Vec<u64> = vec![0; g.k_bulk()];
    let start_layer = g.vertices[bulk].layer;
    for layer in start_layer..=g.num_layers() {
        let ring = &g.layers[layer];
        let outgoing_cost = |v: usize, m: u64| {
            g.vertices[v]
                .outgoing_legs(q)
                .filter(|&l| leg_pauli(m, l) != 0)
                .count()
        };
        // Pauli required on the inward leg of every vertex of this layer.
        let inward = |v: usize| -> Option<u8> {
            let vert = &g.vertices[v];
            let leg = vert.inward_leg()?;
            match vert.legs[leg] {
                Leg::Contracted { vertex, leg: pl } if layer > start_layer => {
                    Some(swap_xz(leg_pauli(chosen[vertex], pl)))
                }
                _ => Some(0),
            }
        };
        if layer == 0 {
            let v = ring[0];
            chosen[v] = *candidates(v)
                .iter()
                .min_by_key(|&&m| outgoing_cost(v, m))
                .unwrap();
            continue;
        }
        let options: Vec<Vec<u64>> = ring
            .iter()
            .map(|&v| {
                let want = inward(v);
                candidates(v)
                    .into_iter()
                    .filter(|&m| want.is_none_or(|w| leg_pauli(m, 0) == w))
                    .collect()
            })
            .collect();
        let picks = ring_dp(g, ring, &options, &outgoing_cost);
        for (i, &v) in ring.iter().enumerate() {
            chosen[v] = options[i][picks[i]];
        }
    }

    let mut out = PauliString::identity(g.n_physical());
    for (qubit, &(v, leg)) in g.boundary.iter().enumerate() {
        let p = leg_pauli(chosen[v], leg);
        out.set(qubit, Pauli::from_bits(p & 1 == 1, p & 2 == 2));
    }
    out
}

/// Minimum total cost assignment around a ring where vertex `i+1`'s previous
/// leg must carry the Hadamard image of vertex `i`'s next leg.
fn ring_dp(
    g: &TilingGraph,
    ring: &[usize],
    options: &[Vec<u64>],
    cost: &dyn Fn(usize, u64) -> usize,
) -> Vec<usize> {
    let q = g.q;
    let len = ring.len();
    let prev_of = |i: usize, m: u64| leg_pauli(m, g.vertices[ring[i]].prev_leg().unwrap());
    let next_of = |i: usize, m: u64| leg_pauli(m, g.vertices[ring[i]].next_leg(q).unwrap());
    let mut best: Option<(usize, Vec<usize>)> = None;
    for closing in 0u8..4 {
        // table[i][s] = (cost, option index, previous state)
        let mut table: Vec<[Option<(usize, usize, u8)>; 4]> = vec![[None; 4]; len];
        for i in 0..len {
            for (k, &m) in options[i].iter().enumerate() {
                let p = prev_of(i, m);
                let base = if i == 0 {
                    (p == swap_xz(closing)).then_some((0usize, 0u8))
                } else {
                    let s = swap_xz(p);
                    table[i - 1][s as usize].map(|(c, _, _)| (c, s))
                };
                let Some((c0, s_prev)) = base else { continue };
                let c = c0 + cost(ring[i], m);
                let s = next_of(i, m) as usize;
                if table[i][s].is_none_or(|(old, _, _)| c < old) {
                    table[i][s] = Some((c, k, s_prev));
                }
            }
        }
        if let Some((c, _, _)) = table[len - 1][closing as usize] {
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                let mut picks = vec![0; len];
                let mut s = closing;
                for i in (0..len).rev() {
                    let (_, k, sp) = table[i][s as usize].unwrap();
                    picks[i] = k;
                    s = sp;
                }
                best = Some((c, picks));
            }
        }
    }
    best.expect("identity assignment is always feasible").1
}
