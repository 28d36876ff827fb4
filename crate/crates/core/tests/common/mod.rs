//! Brute-force oracles on small codes.
//!
//! Operators on at most 32 qubits are packed into one word, with X bits
//! low and Z bits from bit 32.
#![allow(dead_code)]

use evenbly_core::codegen::{build_evenbly_code, GaugeBasis, GaugeSpec, Layout, StabilizerCode};
use evenbly_core::decoders::{ErasureDecoder, ErasurePattern, PauliDecoder};
use evenbly_core::symplectic::{Pauli, PauliString};
use evenbly_core::tiling::build_tiling;
use rand::Rng;

pub const LOW: u64 = 0xFFFF_FFFF;

pub fn pack(p: &PauliString) -> u64 {
    assert!(p.n() <= 32);
    p.x_words()[0] | p.z_words()[0] << 32
}

pub fn unpack(v: u64, n: usize) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set(q, Pauli::from_bits(v >> q & 1 == 1, v >> (32 + q) & 1 == 1));
    }
    p
}

pub fn single(q: usize, p: u64) -> u64 {
    (p & 1) << q | (p >> 1) << (32 + q)
}

pub fn anticommute(a: u64, b: u64) -> bool {
    (((a & LOW) & (b >> 32)) ^ ((a >> 32) & (b & LOW))).count_ones() & 1 == 1
}

pub fn support(v: u64) -> u32 {
    ((v | v >> 32) & LOW) as u32
}

pub fn weight(v: u64) -> u32 {
    support(v).count_ones()
}

/// Independent rows spanning the same space, sorted descending so that
/// `reduce` clears leading bits in order.
pub fn basis(rows: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for r in rows {
        let r = reduce(&out, r);
        if r != 0 {
            out.push(r);
            out.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    out
}

pub fn reduce(basis: &[u64], mut v: u64) -> u64 {
    for &b in basis {
        v = v.min(v ^ b);
    }
    v
}

/// Every element of the span, in Gray-code order.
pub fn span(gens: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(1 << gens.len());
    let mut v = 0u64;
    out.push(v);
    for i in 1u64..1 << gens.len() {
        v ^= gens[i.trailing_zeros() as usize];
        out.push(v);
    }
    out
}

/// All operators on `n` qubits commuting with every row of `stabs`,
/// from the null space of the symplectic form.
pub fn normalizer(n: usize, stabs: &[u64]) -> Vec<u64> {
    let cols: Vec<u32> = (0..n as u32).chain(32..32 + n as u32).collect();
    let mut rows: Vec<u64> = stabs.iter().map(|&s| s >> 32 | (s & LOW) << 32).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for &c in &cols {
        let Some(i) = (r..rows.len()).find(|&i| rows[i] >> c & 1 == 1) else { continue };
        rows.swap(r, i);
        for j in 0..rows.len() {
            if j != r && rows[j] >> c & 1 == 1 {
                rows[j] ^= rows[r];
            }
        }
        pivots.push(c);
        r += 1;
    }
    cols.iter()
        .filter(|c| !pivots.contains(c))
        .map(|&f| {
            let mut v = 1u64 << f;
            for (i, &p) in pivots.iter().enumerate() {
                if rows[i] >> f & 1 == 1 {
                    v |= 1 << p;
                }
            }
            v
        })
        .collect()
}

pub fn stabilizers(code: &StabilizerCode) -> Vec<u64> {
    code.stabilizers.rows().iter().map(pack).collect()
}

pub fn targets_of(code: &StabilizerCode, targets: &[usize]) -> Vec<u64> {
    targets
        .iter()
        .flat_map(|&t| {
            let l = code.logical(t).unwrap();
            [pack(&l.x), pack(&l.z)]
        })
        .collect()
}

/// `bad[mask]` says some normalizer element supported inside `mask` acts
/// on a target.
pub fn erasure_oracle(code: &StabilizerCode, targets: &[usize]) -> Vec<bool> {
    let n = code.n;
    let t = targets_of(code, targets);
    let mut bad = vec![false; 1 << n];
    for v in span(&normalizer(n, &stabilizers(code))) {
        if t.iter().any(|&l| anticommute(v, l)) {
            bad[support(v) as usize] = true;
        }
    }
    for b in 0..n {
        for m in 0..bad.len() {
            if m >> b & 1 == 1 && bad[m ^ 1 << b] {
                bad[m] = true;
            }
        }
    }
    bad
}

pub fn zero_rate(layers: usize, basis: GaugeBasis) -> StabilizerCode {
    let g = build_tiling(5, 4, layers).unwrap();
    build_evenbly_code(&g, &GaugeSpec::new(Layout::ZeroRate, basis)).unwrap()
}

pub fn constant_rate() -> StabilizerCode {
    let g = build_tiling(5, 4, 1).unwrap();
    build_evenbly_code(&g, &GaugeSpec::new("constant-rate".parse().unwrap(), GaugeBasis::Z)).unwrap()
}

pub fn pattern(n: usize, mask: u32) -> ErasurePattern {
    ErasurePattern::new(n, (0..n).filter(|&q| mask >> q & 1 == 1))
}

/// Mix of uniform masks and masks of a uniformly drawn size.
pub fn random_mask(rng: &mut impl Rng, n: usize) -> u32 {
    if rng.random() {
        rng.random::<u32>() & ((1u64 << n) - 1) as u32
    } else {
        let w = rng.random_range(0..=n);
        rand::seq::index::sample(rng, n, w).iter().fold(0u32, |m, q| m | 1 << q)
    }
}

/// Masks on which the decoder and the oracle disagree, and how many masks
/// were recovered.
pub fn erasure_mismatches(
    code: &StabilizerCode,
    targets: &[usize],
    masks: impl IntoIterator<Item = u32>,
) -> (Vec<u32>, usize) {
    let bad = erasure_oracle(code, targets);
    let dec = ErasureDecoder::new(code, targets).unwrap();
    let mut wrong = Vec::new();
    let mut recovered = 0;
    for mask in masks {
        let ok = dec.decode(&pattern(code.n, mask)).unwrap().success;
        if ok == bad[mask as usize] {
            wrong.push(mask);
        }
        recovered += ok as usize;
    }
    (wrong, recovered)
}

/// Minimum weight of each logical class of `error`, where class `c` applies
/// target logical `j` when bit `j` of `c` is set. Class 0 is the error's own.
pub fn class_minima(elems: &[u64], classes: &[u64], error: u64) -> Vec<u32> {
    (0..1usize << classes.len())
        .map(|c| {
            let shift = (0..classes.len())
                .filter(|j| c >> j & 1 == 1)
                .fold(error, |v, j| v ^ classes[j]);
            elems.iter().map(|&s| weight(s ^ shift)).min().unwrap()
        })
        .collect()
}

pub fn low_weight_errors(n: usize) -> Vec<u64> {
    let mut out = vec![0];
    for a in 0..n {
        for pa in 1..4 {
            out.push(single(a, pa));
            for b in a + 1..n {
                for pb in 1..4 {
                    out.push(single(a, pa) | single(b, pb));
                }
            }
        }
    }
    out
}

/// Random error of weight at most `max_weight`.
pub fn random_error(rng: &mut impl Rng, n: usize, max_weight: usize) -> u64 {
    let w = rng.random_range(0..=max_weight);
    rand::seq::index::sample(rng, n, w)
        .iter()
        .fold(0, |e, q| e | single(q, rng.random_range(1..4)))
}

pub struct PauliCase {
    pub name: String,
    pub code: StabilizerCode,
    pub targets: Vec<usize>,
}

impl PauliCase {
    pub fn new(name: impl Into<String>, code: StabilizerCode) -> Self {
        Self { name: name.into(), code, targets: vec![0] }
    }

    /// Stabilizers together with the non-target logical pairs.
    pub fn free(&self) -> Vec<u64> {
        let mut free = stabilizers(&self.code);
        for l in &self.code.logical_pairs {
            if !self.targets.contains(&l.bulk) {
                free.push(pack(&l.x));
                free.push(pack(&l.z));
            }
        }
        free
    }

    /// Compares the decoder with exhaustive search on every error and
    /// returns a description of each disagreement.
    pub fn mismatches(&self, errors: impl IntoIterator<Item = u64>) -> Vec<String> {
        let n = self.code.n;
        let dec = PauliDecoder::new(&self.code, &self.targets).unwrap();
        let elems = span(&basis(self.free()));
        let classes = targets_of(&self.code, &self.targets);
        let stabs = stabilizers(&self.code);
        let mut out = Vec::new();
        for error in errors {
            let minima = class_minima(&elems, &classes, error);
            let best = *minima.iter().min().unwrap();
            let tie = minima.iter().filter(|&&w| w == best).count() > 1;
            let e = unpack(error, n);
            let got = dec.decode(&e).unwrap();
            let mut sorted = dec.class_minima(&e).unwrap().weights;
            sorted.sort_unstable();
            let mut expected: Vec<usize> = minima.iter().map(|&w| w as usize).collect();
            expected.sort_unstable();
            let mut problems = Vec::new();
            if got.tie != tie {
                problems.push("tie flag");
            }
            if !tie && got.success != (minima[0] == best) {
                problems.push("success");
            }
            if sorted != expected {
                problems.push("class minima");
            }
            if let Some(c) = &got.correction {
                if c.weight() != best as usize {
                    problems.push("correction weight");
                }
                let residual = pack(c) ^ error;
                if stabs.iter().any(|&s| anticommute(s, residual)) {
                    problems.push("correction syndrome");
                }
            }
            if !problems.is_empty() {
                out.push(format!("{}: error {e}, oracle minima {minima:?}: {}", self.name, problems.join(", ")));
            }
        }
        out
    }
}
