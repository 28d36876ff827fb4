use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bits;
use super::SymplecticError;

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Conjugation by a Hadamard gate: X <-> Z, Y -> Y (up to sign).
    pub fn hadamard(self) -> Self {
        match self {
            Pauli::X => Pauli::Z,
            Pauli::Z => Pauli::X,
            p => p,
        }
    }

    fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli operator `sign * P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}` stored as
/// bit-packed X and Z masks. A qubit with both bits set carries the
/// Hermitian `Y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let words = bits::words_for(n);
        Self {
            n,
            x: vec![0; words],
            z: vec![0; words],
            negative: false,
        }
    }

    /// Builds an operator from `(qubit, Pauli)` pairs; later entries overwrite earlier ones.
    pub fn from_sparse(n: usize, entries: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut p = Self::identity(n);
        for (q, op) in entries {
            p.set(q, op);
        }
        p
    }

    pub fn single(n: usize, qubit: usize, op: Pauli) -> Self {
        Self::from_sparse(n, [(qubit, op)])
    }

    pub(crate) fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>) -> Self {
        debug_assert_eq!(x.len(), bits::words_for(n));
        debug_assert_eq!(z.len(), bits::words_for(n));
        Self {
            n,
            x,
            z,
            negative: false,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// +1 or -1.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn negate(&mut self) {
        self.negative = !self.negative;
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        assert!(qubit < self.n, "qubit {qubit} out of range for n = {}", self.n);
        Pauli::from_bits(bits::get(&self.x, qubit), bits::get(&self.z, qubit))
    }

    pub fn set(&mut self, qubit: usize, op: Pauli) {
        assert!(qubit < self.n, "qubit {qubit} out of range for n = {}", self.n);
        let (x, z) = op.bits();
        bits::assign(&mut self.x, qubit, x);
        bits::assign(&mut self.z, qubit, z);
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Qubits on which the operator acts non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mask: Vec<u64> = self.x.iter().zip(&self.z).map(|(x, z)| x | z).collect();
        bits::ones(&mask).collect()
    }

    /// Support as a bit mask over qubits.
    pub fn support_mask(&self) -> Vec<u64> {
        self.x.iter().zip(&self.z).map(|(x, z)| x | z).collect()
    }

    /// Composition `self ∘ other` with the phase tracked.
    ///
    /// Fails on length mismatch, or when the product carries a phase of ±i
    /// (which happens exactly when the factors anticommute).
    pub fn compose(&self, other: &PauliString) -> Result<PauliString, SymplecticError> {
        let (mut product, exponent) = self.compose_with_phase(other)?;
        match exponent {
            0 => {}
            2 => product.negate(),
            _ => return Err(SymplecticError::ImaginaryPhase),
        }
        Ok(product)
    }

    /// Product of the two operators together with the extra power of `i`
    /// (mod 4) the product picks up. The returned string carries the
    /// combined sign of the inputs but not that extra phase.
    pub fn compose_with_phase(
        &self,
        other: &PauliString,
    ) -> Result<(PauliString, u8), SymplecticError> {
        self.check_len(other)?;
        // Y = iXZ, so P = i^{x z} X^x Z^z on every qubit; moving Z^{z1} past
        // X^{x2} costs (-1)^{z1 x2}.
        let mut exp: u64 = 0;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            exp += (x1 & z1).count_ones() as u64;
            exp += (x2 & z2).count_ones() as u64;
            exp += 2 * (z1 & x2).count_ones() as u64;
            exp += 3 * (x3 & z3).count_ones() as u64;
            x.push(x3);
            z.push(z3);
        }
        let product = PauliString {
            n: self.n,
            x,
            z,
            negative: self.negative ^ other.negative,
        };
        Ok((product, (exp % 4) as u8))
    }

    /// Phase-free product: XOR of the binary symplectic vectors. The sign of
    /// `self` is kept unchanged.
    pub fn mul_assign_unsigned(&mut self, other: &PauliString) {
        assert_eq!(self.n, other.n, "length mismatch");
        bits::xor_into(&mut self.x, &other.x);
        bits::xor_into(&mut self.z, &other.z);
    }

    /// 0 iff the operators commute.
    pub fn symplectic_product(&self, other: &PauliString) -> Result<u8, SymplecticError> {
        self.check_len(other)?;
        Ok(self.anticommutes_unchecked(other) as u8)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n, "length mismatch");
        !self.anticommutes_unchecked(other)
    }

    fn anticommutes_unchecked(&self, other: &PauliString) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        parity == 1
    }

    /// Hadamard on every qubit. The sign flips once per `Y` factor.
    pub fn hadamard_all(&self) -> PauliString {
        let ys: u32 = self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum();
        PauliString {
            n: self.n,
            x: self.z.clone(),
            z: self.x.clone(),
            negative: self.negative ^ (ys % 2 == 1),
        }
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let n = self.n + other.n;
        let mut out = PauliString::identity(n);
        for q in 0..self.n {
            out.set(q, self.get(q));
        }
        for q in 0..other.n {
            out.set(self.n + q, other.get(q));
        }
        out.negative = self.negative ^ other.negative;
        out
    }

    /// The operator restricted to `qubits` (in the given order).
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set(i, self.get(q));
        }
        out.negative = self.negative;
        out
    }

    fn check_len(&self, other: &PauliString) -> Result<(), SymplecticError> {
        if self.n != other.n {
            return Err(SymplecticError::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        for q in 0..self.n {
            write!(f, "{}", self.get(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = SymplecticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (negative, body) = if let Some(rest) = s.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('−') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (false, rest)
        } else {
            (false, s)
        };
        let chars: Vec<char> = body.chars().collect();
        let mut p = PauliString::identity(chars.len());
        for (q, c) in chars.into_iter().enumerate() {
            let op = match c {
                'I' | 'i' | '_' => Pauli::I,
                'X' | 'x' => Pauli::X,
                'Y' | 'y' => Pauli::Y,
                'Z' | 'z' => Pauli::Z,
                other => return Err(SymplecticError::Parse(format!("invalid Pauli character {other:?}"))),
            };
            p.set(q, op);
        }
        p.negative = negative;
        Ok(p)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
