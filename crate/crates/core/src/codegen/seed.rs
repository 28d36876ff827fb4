use serde::{Deserialize, Serialize};

use super::{CodegenError, LogicalPair, StabilizerCode};
use crate::symplectic::{Pauli, PauliString, SymplecticMatrix};

/// The `[[q,1,2]]` CSS code placed on every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedCode {
    pub q: usize,
    /// `X^q` followed by `Z_i Z_{i+2}` for `i = 0..q-3`.
    pub generators: Vec<PauliString>,
    /// `X` on the odd legs.
    pub logical_x: PauliString,
    /// `Z` on the last two legs.
    pub logical_z: PauliString,
}

pub fn seed_code(q: usize) -> Result<SeedCode, CodegenError> {
    if q < 4 || q % 2 == 1 {
        return Err(CodegenError::InvalidQ(q));
    }
    let mut generators = vec![PauliString::from_sparse(q, (0..q).map(|i| (i, Pauli::X)))];
    for i in 0..q - 2 {
        generators.push(PauliString::from_sparse(q, [(i, Pauli::Z), (i + 2, Pauli::Z)]));
    }
    Ok(SeedCode {
        q,
        generators,
        logical_x: PauliString::from_sparse(q, (1..q).step_by(2).map(|i| (i, Pauli::X))),
        logical_z: PauliString::from_sparse(q, [(q - 2, Pauli::Z), (q - 1, Pauli::Z)]),
    })
}

impl SeedCode {
    /// The same code conjugated by a Hadamard on every leg.
    pub fn hadamard_exchanged(&self) -> SeedCode {
        SeedCode {
            q: self.q,
            generators: self.generators.iter().map(|g| g.hadamard_all()).collect(),
            logical_x: self.logical_z.hadamard_all(),
            logical_z: self.logical_x.hadamard_all(),
        }
    }

    /// The seed as a one-logical code whose bulk qubit is `bulk`.
    pub fn to_code(&self, bulk: usize) -> StabilizerCode {
        StabilizerCode {
            n: self.q,
            stabilizers: SymplecticMatrix::new(self.q, self.generators.clone()).unwrap(),
            logical_pairs: vec![LogicalPair {
                bulk,
                x: self.logical_x.clone(),
                z: self.logical_z.clone(),
            }],
            gauge_pairs: Vec::new(),
            gauge: None,
            tiling: None,
        }
    }

    /// Smallest weight of a nontrivial logical, by enumeration of all
    /// `4^q` Pauli strings.
    pub fn brute_force_distance(&self) -> usize {
        let q = self.q;
        let mut best = usize::MAX;
        for code in 1u64..(1 << (2 * q)) {
            let p = PauliString::from_sparse(
                q,
                (0..q).map(|i| (i, Pauli::from_bits(code >> (2 * i) & 1 == 1, code >> (2 * i + 1) & 1 == 1))),
            );
            let w = p.weight();
            if w >= best {
                continue;
            }
            let in_normalizer = self.generators.iter().all(|g| g.commutes_with(&p));
            let nontrivial = !p.commutes_with(&self.logical_x) || !p.commutes_with(&self.logical_z);
            if in_normalizer && nontrivial {
                best = w;
            }
        }
        best
    }
}
