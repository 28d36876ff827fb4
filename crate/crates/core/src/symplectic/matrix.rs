use serde::{Deserialize, Serialize};

use super::bits;
use super::{PauliString, SymplecticError};

/// Ordered list of equal-length Pauli strings viewed as rows of a binary
/// symplectic matrix `[X | Z]`. Column `c < n` is the X bit of qubit `c`,
/// column `n + c` its Z bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticMatrix {
    n: usize,
    rows: Vec<PauliString>,
}

impl SymplecticMatrix {
    pub fn new(n: usize, rows: Vec<PauliString>) -> Result<Self, SymplecticError> {
        if let Some(bad) = rows.iter().find(|r| r.n() != n) {
            return Err(SymplecticError::LengthMismatch {
                left: n,
                right: bad.n(),
            });
        }
        Ok(Self { n, rows })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, rows: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: PauliString) -> Result<(), SymplecticError> {
        if row.n() != self.n {
            return Err(SymplecticError::LengthMismatch {
                left: self.n,
                right: row.n(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn into_rows(self) -> Vec<PauliString> {
        self.rows
    }

    /// Natural column order `x_0..x_{n-1}, z_0..z_{n-1}`.
    pub fn natural_order(n: usize) -> Vec<usize> {
        (0..2 * n).collect()
    }

    /// Qubit-major order `x_0, z_0, x_1, z_1, ...`.
    pub fn interleaved_order(n: usize) -> Vec<usize> {
        (0..n).flat_map(|q| [q, n + q]).collect()
    }

    pub fn rank(&self) -> usize {
        let mut basis = XorBasis::new(2 * self.n);
        self.rows
            .iter()
            .filter(|r| basis.insert(symplectic_vector(r)).is_none())
            .count()
    }

    /// Whether `p` (ignoring sign) lies in the row space.
    pub fn spans(&self, p: &PauliString) -> bool {
        let mut basis = XorBasis::new(2 * self.n);
        for r in &self.rows {
            basis.insert(symplectic_vector(r));
        }
        basis.reduce(symplectic_vector(p)).iter().all(|&w| w == 0)
    }

    /// Equality of row spaces over GF(2).
    pub fn same_row_space(&self, other: &SymplecticMatrix) -> bool {
        self.n == other.n
            && self.rank() == other.rank()
            && other.rows.iter().all(|r| self.spans(r))
    }
}

/// Packs a Pauli string as `[x bits | z bits]` over `2n` columns.
pub(crate) fn symplectic_vector(p: &PauliString) -> Vec<u64> {
    let n = p.n();
    let mut v = vec![0u64; bits::words_for(2 * n)];
    for q in bits::ones(p.x_words()) {
        bits::set(&mut v, q);
    }
    for q in bits::ones(p.z_words()) {
        bits::set(&mut v, n + q);
    }
    v
}

/// Reduced row-echelon form over GF(2) with columns visited in `column_order`
/// (a permutation of `0..2n`). Zero rows are dropped, so the number of rows
/// returned is the rank. Row operations are phase-free products, and every
/// returned row carries sign `+1`. The pivot list holds original column
/// indices, one per returned row.
pub fn rref(
    m: &SymplecticMatrix,
    column_order: &[usize],
) -> Result<(SymplecticMatrix, Vec<usize>), SymplecticError> {
    let n = m.n;
    let cols = 2 * n;
    let mut seen = vec![false; cols];
    if column_order.len() != cols
        || column_order.iter().any(|&c| c >= cols || std::mem::replace(&mut seen[c], true))
    {
        return Err(SymplecticError::InvalidColumnOrder);
    }
    let words = bits::words_for(cols);
    // Permuted rows: bit j holds original column column_order[j].
    let mut rows: Vec<Vec<u64>> = m
        .rows
        .iter()
        .map(|r| {
            let v = symplectic_vector(r);
            let mut out = vec![0u64; words];
            for (j, &c) in column_order.iter().enumerate() {
                if bits::get(&v, c) {
                    bits::set(&mut out, j);
                }
            }
            out
        })
        .collect();

    let mut pivots = Vec::new();
    let mut rank = 0;
    for j in 0..cols {
        let Some(r) = (rank..rows.len()).find(|&r| bits::get(&rows[r], j)) else {
            continue;
        };
        rows.swap(rank, r);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && bits::get(row, j) {
                bits::xor_into(row, &pivot);
            }
        }
        pivots.push(column_order[j]);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);

    let out_rows = rows
        .into_iter()
        .map(|row| {
            let mut p = PauliString::identity(n);
            let (mut x, mut z) = (p.x_words().to_vec(), p.z_words().to_vec());
            for j in bits::ones(&row) {
                let c = column_order[j];
                if c < n {
                    bits::set(&mut x, c);
                } else {
                    bits::set(&mut z, c - n);
                }
            }
            p = PauliString::from_words(n, x, z);
            p
        })
        .collect();
    Ok((SymplecticMatrix { n, rows: out_rows }, pivots))
}

/// Incremental GF(2) basis in which every stored vector's pivot is its lowest
/// set bit. Reduction of a vector clears all pivot positions.
#[derive(Debug, Clone)]
pub struct XorBasis {
    pivot_row: Vec<Option<u32>>,
    rows: Vec<Vec<u64>>,
}

impl XorBasis {
    pub fn new(bits_len: usize) -> Self {
        Self {
            pivot_row: vec![None; bits_len],
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Stored rows; their lowest set bits are distinct.
    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn clear(&mut self) {
        for row in &self.rows {
            if let Some(p) = bits::first_one(row) {
                self.pivot_row[p] = None;
            }
        }
        self.rows.clear();
    }

    /// Reduces `v` against the basis and returns the remainder.
    pub fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        self.reduce_in_place(&mut v);
        v
    }

    pub fn reduce_in_place(&self, v: &mut [u64]) {
        let mut start = 0;
        loop {
            let next = v[start / 64..]
                .iter()
                .enumerate()
                .find_map(|(k, &w)| {
                    let w = if k == 0 { w & (!0u64 << (start % 64)) } else { w };
                    (w != 0).then(|| (start / 64 + k) * 64 + w.trailing_zeros() as usize)
                });
            let Some(bit) = next else { return };
            if let Some(r) = self.pivot_row[bit] {
                bits::xor_into(v, &self.rows[r as usize]);
            }
            start = bit + 1;
            if start >= v.len() * 64 {
                return;
            }
        }
    }

    /// Inserts `v`; returns `Some(remainder)` (all zero) if it was dependent.
    pub fn insert(&mut self, v: Vec<u64>) -> Option<Vec<u64>> {
        let v = self.reduce(v);
        match bits::first_one(&v) {
            None => Some(v),
            Some(p) => {
                self.pivot_row[p] = Some(self.rows.len() as u32);
                self.rows.push(v);
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> SymplecticMatrix {
        let rows: Vec<PauliString> = rows.iter().map(|r| r.parse().unwrap()).collect();
        SymplecticMatrix::new(rows[0].n(), rows).unwrap()
    }

    #[test]
    fn rref_examples() {
        let a = m(&["XXXX", "ZIZI", "IZIZ"]);
        let (r, piv) = rref(&a, &SymplecticMatrix::natural_order(4)).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(piv.len(), 3);
        assert_eq!(a.rank(), 3);

        let zero = m(&["IIII"]);
        let (r, piv) = rref(&zero, &SymplecticMatrix::natural_order(4)).unwrap();
        assert!(r.is_empty() && piv.is_empty());

        let dup = m(&["XXXX", "XXXX"]);
        assert_eq!(rref(&dup, &SymplecticMatrix::natural_order(4)).unwrap().0.len(), 1);
    }

    #[test]
    fn pivot_columns_are_cleared_in_other_rows() {
        let a = m(&["XXZI", "XZIY", "ZZZZ", "YIIX"]);
        let order = SymplecticMatrix::interleaved_order(4);
        let (r, piv) = rref(&a, &order).unwrap();
        for (i, &c) in piv.iter().enumerate() {
            for (k, row) in r.rows().iter().enumerate() {
                let v = symplectic_vector(row);
                assert_eq!(bits::get(&v, c), i == k);
            }
        }
        assert!(r.same_row_space(&a));
    }

    #[test]
    fn bad_column_order_is_rejected() {
        let a = m(&["XX"]);
        assert_eq!(rref(&a, &[0, 0, 1, 2]).unwrap_err(), SymplecticError::InvalidColumnOrder);
        assert_eq!(rref(&a, &[0, 1]).unwrap_err(), SymplecticError::InvalidColumnOrder);
    }

    #[test]
    fn xor_basis_detects_dependence() {
        let mut b = XorBasis::new(128);
        let mut v1 = vec![0u64; 2];
        bits::set(&mut v1, 3);
        bits::set(&mut v1, 100);
        let mut v2 = vec![0u64; 2];
        bits::set(&mut v2, 100);
        assert!(b.insert(v1.clone()).is_none());
        assert!(b.insert(v2.clone()).is_none());
        let mut v3 = v1.clone();
        bits::xor_into(&mut v3, &v2);
        assert!(b.insert(v3).is_some());
        assert_eq!(b.rank(), 2);
    }
}
