use serde::{Deserialize, Serialize};

use super::{CodegenError, GaugePair, LogicalPair, StabilizerCode};
use crate::symplectic::bits;
use crate::symplectic::{PauliString, SymplecticMatrix, XorBasis};

/// Gate on a contracted edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeGate {
    Hadamard,
    Identity,
}

/// Tensor product of codes, qubits concatenated in order. Bulk ids are kept.
pub(crate) fn tensor_all(codes: &[StabilizerCode]) -> StabilizerCode {
    let n: usize = codes.iter().map(|c| c.n).sum();
    let mut offset = 0;
    let mut stabs = Vec::new();
    let mut logical_pairs = Vec::new();
    let mut gauge_pairs = Vec::new();
    for c in codes {
        let embed = |p: &PauliString| embed(p, n, offset);
        stabs.extend(c.stabilizers.rows().iter().map(embed));
        logical_pairs.extend(c.logical_pairs.iter().map(|l| LogicalPair {
            bulk: l.bulk,
            x: embed(&l.x),
            z: embed(&l.z),
        }));
        gauge_pairs.extend(c.gauge_pairs.iter().map(|g| GaugePair {
            bulk: g.bulk,
            x: embed(&g.x),
            z: embed(&g.z),
            fixed: g.fixed,
        }));
        offset += c.n;
    }
    StabilizerCode {
        n,
        stabilizers: SymplecticMatrix::new(n, stabs).unwrap(),
        logical_pairs,
        gauge_pairs,
        gauge: None,
        tiling: None,
    }
}

fn embed(p: &PauliString, n: usize, offset: usize) -> PauliString {
    let mut out = PauliString::identity(n);
    for q in p.support() {
        out.set(offset + q, p.get(q));
    }
    out.with_sign(p.is_negative())
}

/// Relabels qubits so that new qubit `i` is old qubit `perm[i]`.
pub(crate) fn permute(code: &StabilizerCode, perm: &[usize]) -> StabilizerCode {
    let map = |p: &PauliString| p.restrict(perm);
    StabilizerCode {
        n: perm.len(),
        stabilizers: SymplecticMatrix::new(
            perm.len(),
            code.stabilizers.rows().iter().map(map).collect(),
        )
        .unwrap(),
        logical_pairs: code
            .logical_pairs
            .iter()
            .map(|l| LogicalPair {
                bulk: l.bulk,
                x: map(&l.x),
                z: map(&l.z),
            })
            .collect(),
        gauge_pairs: code
            .gauge_pairs
            .iter()
            .map(|g| GaugePair {
                bulk: g.bulk,
                x: map(&g.x),
                z: map(&g.z),
                fixed: g.fixed,
            })
            .collect(),
        gauge: code.gauge,
        tiling: code.tiling,
    }
}

/// Contracts `leg_a` of `a` with `leg_b` of `b` through `gate`. The result
/// has `a`'s remaining qubits followed by `b`'s; `b`'s bulk ids are shifted
/// past the largest id of `a`.
pub fn conjoin(
    a: &StabilizerCode,
    leg_a: usize,
    b: &StabilizerCode,
    leg_b: usize,
    gate: EdgeGate,
) -> Result<StabilizerCode, CodegenError> {
    for (leg, n) in [(leg_a, a.n), (leg_b, b.n)] {
        if leg >= n {
            return Err(CodegenError::LegOutOfRange { leg, n });
        }
    }
    let shift = a
        .logical_pairs
        .iter()
        .map(|l| l.bulk)
        .chain(a.gauge_pairs.iter().map(|g| g.bulk))
        .max()
        .map_or(0, |m| m + 1);
    let mut b = b.clone();
    b.logical_pairs.iter_mut().for_each(|l| l.bulk += shift);
    b.gauge_pairs.iter_mut().for_each(|g| g.bulk += shift);
    let joint = tensor_all(&[a.clone(), b]);
    contract(&joint, &[(leg_a, a.n + leg_b, gate)])
}

/// Contracts qubit pairs of one code. Surviving qubits keep their relative
/// order. The stabilizers of the result are the elements of the full group
/// (stabilizers and all pair operators) that restrict to the contracted
/// Bell-type pairs' stabilizers, cut down to the surviving qubits.
/// Signs are not tracked; every output operator has sign `+1`.
pub fn contract(
    code: &StabilizerCode,
    pairs: &[(usize, usize, EdgeGate)],
) -> Result<StabilizerCode, CodegenError> {
    let n = code.n;
    let mut used = vec![false; n];
    for &(a, b, _) in pairs {
        for leg in [a, b] {
            if leg >= n {
                return Err(CodegenError::LegOutOfRange { leg, n });
            }
            if std::mem::replace(&mut used[leg], true) {
                return Err(CodegenError::LegReused(leg));
            }
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&q| !used[q]).collect();
    let m = rest.len();
    let mut rest_index = vec![usize::MAX; n];
    for (i, &q) in rest.iter().enumerate() {
        rest_index[q] = i;
    }

    let n_log = code.logical_pairs.len();
    let n_gauge = code.gauge_pairs.len();
    // Tags: logical X/Z, then gauge conjugates (all must survive), then the
    // fixed gauge operators (which may coincide with stabilizers).
    let protected = 2 * n_log + n_gauge;
    let n_tags = protected + n_gauge;
    let mut tagged: Vec<(&PauliString, Option<usize>)> = code
        .stabilizers
        .rows()
        .iter()
        .map(|s| (s, None))
        .collect();
    for (i, l) in code.logical_pairs.iter().enumerate() {
        tagged.push((&l.x, Some(2 * i)));
        tagged.push((&l.z, Some(2 * i + 1)));
    }
    let gauge_ops: Vec<(PauliString, PauliString)> = code
        .gauge_pairs
        .iter()
        .map(|g| (g.conjugate_operator(), g.fixed_operator()))
        .collect();
    for (j, (conj, fixed)) in gauge_ops.iter().enumerate() {
        tagged.push((conj, Some(2 * n_log + j)));
        tagged.push((fixed, Some(protected + j)));
    }

    // Stage 1: [constraints | rest x | rest z | tags]; kernel of the
    // constraint block.
    let n_con = 2 * pairs.len();
    let rest_off = n_con;
    let tag_off = n_con + 2 * m;
    let width = tag_off + n_tags;
    let mut basis = XorBasis::new(width);
    for (p, tag) in &tagged {
        let mut v = vec![0u64; bits::words_for(width)];
        for (e, &(a, b, gate)) in pairs.iter().enumerate() {
            let (xa, za) = p.get(a).bits();
            let (xb, zb) = p.get(b).bits();
            let (c0, c1) = match gate {
                EdgeGate::Hadamard => (xa ^ zb, za ^ xb),
                EdgeGate::Identity => (xa ^ xb, za ^ zb),
            };
            bits::assign(&mut v, 2 * e, c0);
            bits::assign(&mut v, 2 * e + 1, c1);
        }
        for q in bits::ones(p.x_words()) {
            if !used[q] {
                bits::set(&mut v, rest_off + rest_index[q]);
            }
        }
        for q in bits::ones(p.z_words()) {
            if !used[q] {
                bits::set(&mut v, rest_off + m + rest_index[q]);
            }
        }
        if let Some(t) = tag {
            bits::set(&mut v, tag_off + t);
        }
        basis.insert(v);
    }
    let kernel: Vec<(Vec<u64>, Vec<u64>)> = basis_rows(&basis)
        .filter(|r| bits::first_one(r).is_some_and(|p| p >= n_con))
        .map(|r| (extract(r, rest_off, 2 * m), extract(r, tag_off, n_tags)))
        .collect();

    // Stage 2: a kernel element trivial on the surviving qubits must not
    // carry a protected tag.
    let mut check = XorBasis::new(2 * m + n_tags);
    for (r, t) in &kernel {
        check.insert(concat(r, 2 * m, t, n_tags));
    }
    for row in basis_rows(&check) {
        let p = bits::first_one(row).unwrap();
        if p >= 2 * m && p < 2 * m + protected {
            return Err(CodegenError::LogicalDestroyed(bulk_of_tag(code, p - 2 * m)));
        }
    }

    // Stage 3: [tags | rest]; tag pivots give pushed pair operators, the
    // remaining rows the stabilizers.
    let mut split = XorBasis::new(n_tags + 2 * m);
    for (r, t) in &kernel {
        split.insert(concat(t, n_tags, r, 2 * m));
    }
    let mut by_tag: Vec<Option<Vec<u64>>> = vec![None; n_tags];
    let mut stabs = Vec::new();
    for row in basis_rows(&split) {
        let p = bits::first_one(row).unwrap();
        if p < n_tags {
            by_tag[p] = Some(row.clone());
        } else {
            stabs.push(to_pauli(&extract(row, n_tags, 2 * m), m));
        }
    }
    for t in (0..n_tags).rev() {
        let Some(pivot) = by_tag[t].clone() else {
            return Err(CodegenError::LogicalDestroyed(bulk_of_tag(code, t)));
        };
        for s in 0..t {
            if let Some(row) = by_tag[s].as_mut() {
                if bits::get(row, t) {
                    bits::xor_into(row, &pivot);
                }
            }
        }
    }
    let op = |t: usize| to_pauli(&extract(by_tag[t].as_ref().unwrap(), n_tags, 2 * m), m);

    let logical_pairs = code
        .logical_pairs
        .iter()
        .enumerate()
        .map(|(i, l)| LogicalPair {
            bulk: l.bulk,
            x: op(2 * i),
            z: op(2 * i + 1),
        })
        .collect();
    let gauge_pairs = code
        .gauge_pairs
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let conj = op(2 * n_log + j);
            let fixed = op(protected + j);
            let (x, z) = match g.fixed {
                super::GaugeBasis::X => (fixed, conj),
                super::GaugeBasis::Z => (conj, fixed),
                // Ȳ ∝ X̄ Z̄, so Z̄ ∝ X̄ Ȳ.
                super::GaugeBasis::Y => {
                    let mut z = fixed.clone();
                    z.mul_assign_unsigned(&conj);
                    (conj, z)
                }
            };
            GaugePair {
                bulk: g.bulk,
                x,
                z,
                fixed: g.fixed,
            }
        })
        .collect();
    Ok(StabilizerCode {
        n: m,
        stabilizers: SymplecticMatrix::new(m, stabs)?,
        logical_pairs,
        gauge_pairs,
        gauge: code.gauge,
        tiling: code.tiling,
    })
}

fn bulk_of_tag(code: &StabilizerCode, t: usize) -> usize {
    let n_log = code.logical_pairs.len();
    let n_gauge = code.gauge_pairs.len();
    if t < 2 * n_log {
        code.logical_pairs[t / 2].bulk
    } else if t < 2 * n_log + n_gauge {
        code.gauge_pairs[t - 2 * n_log].bulk
    } else {
        code.gauge_pairs[t - 2 * n_log - n_gauge].bulk
    }
}

fn basis_rows(b: &XorBasis) -> impl Iterator<Item = &Vec<u64>> {
    b.rows().iter()
}

fn extract(v: &[u64], offset: usize, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; bits::words_for(len)];
    for i in 0..len {
        if bits::get(v, offset + i) {
            bits::set(&mut out, i);
        }
    }
    out
}

fn concat(a: &[u64], a_len: usize, b: &[u64], b_len: usize) -> Vec<u64> {
    let mut out = vec![0u64; bits::words_for(a_len + b_len)];
    for i in bits::ones(a) {
        bits::set(&mut out, i);
    }
    for i in bits::ones(b) {
        bits::set(&mut out, a_len + i);
    }
    out
}

/// `[x (m bits) | z (m bits)]` to a Pauli string.
fn to_pauli(v: &[u64], m: usize) -> PauliString {
    let mut x = vec![0u64; bits::words_for(m)];
    let mut z = vec![0u64; bits::words_for(m)];
    for i in bits::ones(v) {
        if i < m {
            bits::set(&mut x, i);
        } else {
            bits::set(&mut z, i - m);
        }
    }
    PauliString::from_words(m, x, z)
}

#[cfg(test)]
mod tests {
    use super::super::seed_code;
    use super::*;

    #[test]
    fn conjoined_seeds() {
        let s = seed_code(4).unwrap().to_code(0);
        let c = conjoin(&s, 3, &s, 0, EdgeGate::Hadamard).unwrap();
        assert_eq!(c.n, 6);
        assert_eq!(c.k(), 2);
        c.validate().unwrap();
        assert_eq!(c.bulk_qubit_map(), [0, 1]);
    }

    #[test]
    fn identity_edge_arity() {
        let s = seed_code(4).unwrap().to_code(0);
        let c = conjoin(&s, 0, &s, 0, EdgeGate::Identity).unwrap();
        assert_eq!(c.n, 6);
        c.validate().unwrap();
    }

    #[test]
    fn leg_errors() {
        let s = seed_code(4).unwrap().to_code(0);
        assert_eq!(
            conjoin(&s, 4, &s, 0, EdgeGate::Hadamard).unwrap_err(),
            CodegenError::LegOutOfRange { leg: 4, n: 4 }
        );
        assert_eq!(
            contract(&s, &[(0, 1, EdgeGate::Identity), (1, 2, EdgeGate::Identity)]).unwrap_err(),
            CodegenError::LegReused(1)
        );
    }

    #[test]
    fn self_contraction_can_destroy_the_logical() {
        // Z̄ = IIZZ becomes trivial once legs 2 and 3 are joined by a Bell pair.
        let s = seed_code(4).unwrap().to_code(0);
        let err = contract(&s, &[(2, 3, EdgeGate::Identity)]).unwrap_err();
        assert_eq!(err, CodegenError::LogicalDestroyed(0));
    }
}
