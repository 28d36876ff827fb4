use super::trellis::{deinterleave, interleave};
use super::{check_targets, dont_care_group, ClassMinima, CosetTrellis, DecodeError, DecodeOutcome};
use crate::codegen::StabilizerCode;
use crate::symplectic::{bits, min_weight_coset_element, PauliString, SymplecticMatrix, XorBasis};

/// Default limit on trellis state bits.
pub const DEFAULT_TRELLIS_WIDTH: usize = 24;

/// Corrections are reconstructed only up to this many state bits; above it
/// the class decision is still exact but no explicit correction is kept.
const BACKTRACK_WIDTH: usize = 20;

fn swap_adjacent(v: &[u64]) -> Vec<u64> {
    const EVEN: u64 = 0x5555_5555_5555_5555;
    v.iter().map(|&w| ((w & EVEN) << 1) | ((w >> 1) & EVEN)).collect()
}

fn parity(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum::<u32>() & 1 == 1
}

/// Minimum-weight decoding of Pauli errors with respect to chosen bulk
/// qubits.
///
/// The syndrome fixes a pure error `E`; candidate corrections are
/// `E · f · L` with `f` in the group generated by the stabilizers and the
/// non-target logical pairs, and `L` a product of target logicals. The
/// decoder returns the lowest-weight class (lowest class index on ties).
/// Classes are minimized exactly with a trellis, falling back to
/// branch-and-bound when the trellis would be too wide.
#[derive(Debug, Clone)]
pub struct PauliDecoder {
    n: usize,
    syndrome_rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    transform: Vec<Vec<u64>>,
    free: Vec<PauliString>,
    classes: Vec<PauliString>,
    trellis: CosetTrellis,
    width_cap: usize,
}

impl PauliDecoder {
    pub fn new(code: &StabilizerCode, targets: &[usize]) -> Result<Self, DecodeError> {
        Self::with_width(code, targets, DEFAULT_TRELLIS_WIDTH)
    }

    pub fn with_width(
        code: &StabilizerCode,
        targets: &[usize],
        width_cap: usize,
    ) -> Result<Self, DecodeError> {
        check_targets(code, targets)?;
        let n = code.n;
        let nbits = 2 * n.max(1);

        let mut basis = XorBasis::new(nbits);
        let mut stabs = Vec::new();
        for s in code.stabilizers.rows() {
            let v = interleave(s);
            if basis.insert(v.clone()).is_none() {
                stabs.push(v);
            }
        }
        let syndrome_rows: Vec<Vec<u64>> = stabs.iter().map(|v| swap_adjacent(v)).collect();

        // Gauss-Jordan on [A' | I] where A' holds the swapped stabilizers
        // followed by every logical operator, so pure errors commute with
        // all logicals.
        let mut a: Vec<Vec<u64>> = syndrome_rows.clone();
        for l in &code.logical_pairs {
            a.push(swap_adjacent(&interleave(&l.x)));
            a.push(swap_adjacent(&interleave(&l.z)));
        }
        let m = a.len();
        let mut aug: Vec<Vec<u64>> = (0..m)
            .map(|r| {
                let mut v = vec![0u64; m.div_ceil(64).max(1)];
                bits::set(&mut v, r);
                v
            })
            .collect();
        let mut pivots: Vec<usize> = Vec::with_capacity(m);
        for r in 0..m {
            for k in 0..r {
                if bits::get(&a[r], pivots[k]) {
                    let (src, srca) = (a[k].clone(), aug[k].clone());
                    bits::xor_into(&mut a[r], &src);
                    bits::xor_into(&mut aug[r], &srca);
                }
            }
            let p = bits::first_one(&a[r])
                .ok_or_else(|| DecodeError::GraphMismatch("stabilizers and logicals are dependent".into()))?;
            pivots.push(p);
            for k in 0..r {
                if bits::get(&a[k], p) {
                    let (src, srca) = (a[r].clone(), aug[r].clone());
                    bits::xor_into(&mut a[k], &src);
                    bits::xor_into(&mut aug[k], &srca);
                }
            }
        }

        let free = dont_care_group(code, targets);
        let mut classes = Vec::new();
        for &t in targets {
            let l = code.logical(t).unwrap();
            classes.push(l.x.clone());
            classes.push(l.z.clone());
        }
        let trellis = CosetTrellis::new(n, &free, &classes)?;
        Ok(Self {
            n,
            syndrome_rows,
            pivots,
            transform: aug,
            free,
            classes,
            trellis,
            width_cap,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trellis_width(&self) -> usize {
        self.trellis.width()
    }

    pub fn syndrome(&self, error: &PauliString) -> Vec<bool> {
        let e = interleave(error);
        self.syndrome_rows.iter().map(|s| parity(&e, s)).collect()
    }

    /// An operator with the same syndrome as `error` that commutes with
    /// every logical operator of the code.
    pub fn pure_error(&self, error: &PauliString) -> PauliString {
        let syn = self.syndrome(error);
        let mut sigma = vec![0u64; self.transform.first().map_or(1, Vec::len)];
        for (j, &b) in syn.iter().enumerate() {
            if b {
                bits::set(&mut sigma, j);
            }
        }
        let mut v = vec![0u64; bits::words_for(2 * self.n).max(1)];
        for (r, &p) in self.pivots.iter().enumerate() {
            if parity(&self.transform[r], &sigma) {
                bits::set(&mut v, p);
            }
        }
        deinterleave(&v, self.n)
    }

    /// Lowest weight reachable in each logical class of the error's coset.
    pub fn class_minima(&self, error: &PauliString) -> Result<ClassMinima, DecodeError> {
        Ok(self.solve(error, false)?.0)
    }

    pub fn decode(&self, error: &PauliString) -> Result<DecodeOutcome, DecodeError> {
        let (minima, correction) = self.solve(error, true)?;
        let (best, tie) = minima.best();
        let bad = self.wrong_generator(error, best);
        Ok(DecodeOutcome {
            success: bad.is_none(),
            correction,
            detail: bad.map(|j| format!("correction applies a logical error (class generator {j})")),
            tie,
        })
    }

    /// Success flag and tie flag only, without building a correction.
    pub fn decide(&self, error: &PauliString) -> Result<(bool, bool), DecodeError> {
        let (best, tie) = self.solve(error, false)?.0.best();
        Ok((self.wrong_generator(error, best).is_none(), tie))
    }

    /// First target logical that anticommutes with `correction · error`,
    /// where the correction lies in class `class` of the pure error's coset.
    fn wrong_generator(&self, error: &PauliString, class: usize) -> Option<usize> {
        let mut residual = self.pure_error(error);
        residual.mul_assign_unsigned(error);
        for (j, l) in self.classes.iter().enumerate() {
            if class >> j & 1 == 1 {
                residual.mul_assign_unsigned(l);
            }
        }
        self.classes.iter().position(|l| !residual.commutes_with(l))
    }

    fn solve(
        &self,
        error: &PauliString,
        want_correction: bool,
    ) -> Result<(ClassMinima, Option<PauliString>), DecodeError> {
        if error.n() != self.n {
            return Err(DecodeError::LengthMismatch { got: error.n(), n: self.n });
        }
        let e = self.pure_error(error);
        let width = self.trellis.width();
        if width <= self.width_cap {
            if want_correction && width <= BACKTRACK_WIDTH {
                let (m, c) = self.trellis.decode(&e);
                return Ok((m, Some(c)));
            }
            return Ok((self.trellis.minima(&e), None));
        }
        let gens = SymplecticMatrix::new(self.n, self.free.clone())?;
        let mut weights = Vec::with_capacity(1 << self.classes.len());
        let mut best: Option<(usize, PauliString)> = None;
        for c in 0usize..1 << self.classes.len() {
            let mut start = e.clone();
            for (j, l) in self.classes.iter().enumerate() {
                if c >> j & 1 == 1 {
                    start.mul_assign_unsigned(l);
                }
            }
            let found = min_weight_coset_element(&start, &gens).map_err(|_| {
                DecodeError::TrellisTooWide {
                    width,
                    cap: self.width_cap,
                }
            })?;
            let w = found.weight();
            if best.as_ref().is_none_or(|(b, _)| w < *b) {
                best = Some((w, found));
            }
            weights.push(w);
        }
        Ok((ClassMinima { weights }, best.map(|(_, p)| p)))
    }
}

/// One-shot form of [`PauliDecoder`].
pub fn pauli_decode(
    code: &StabilizerCode,
    targets: &[usize],
    error: &PauliString,
) -> Result<DecodeOutcome, DecodeError> {
    PauliDecoder::new(code, targets)?.decode(error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::seed_code;

    #[test]
    fn pure_error_matches_syndrome_and_commutes_with_logicals() {
        let code = seed_code(4).unwrap().to_code(0);
        let dec = PauliDecoder::new(&code, &[0]).unwrap();
        for s in ["XIII", "IZII", "YYIZ", "IIIY"] {
            let err: PauliString = s.parse().unwrap();
            let pe = dec.pure_error(&err);
            assert_eq!(dec.syndrome(&pe), dec.syndrome(&err));
            let l = code.logical(0).unwrap();
            assert!(pe.commutes_with(&l.x) && pe.commutes_with(&l.z));
        }
    }

    #[test]
    fn seed_corrects_nothing_beyond_detection() {
        // Distance 2: a single-qubit error is detected but may be
        // misidentified; the identity is always decoded correctly.
        let code = seed_code(4).unwrap().to_code(0);
        let dec = PauliDecoder::new(&code, &[0]).unwrap();
        let out = dec.decode(&PauliString::identity(4)).unwrap();
        assert!(out.success && !out.tie);
        let out = dec.decode(&"XIII".parse().unwrap()).unwrap();
        assert!(out.tie);
    }

    #[test]
    fn branch_and_bound_agrees_with_trellis() {
        let code = seed_code(4).unwrap().to_code(0);
        let a = PauliDecoder::new(&code, &[0]).unwrap();
        let b = PauliDecoder::with_width(&code, &[0], 0).unwrap();
        for s in ["XIII", "IZYI", "YYYY", "XZII"] {
            let err: PauliString = s.parse().unwrap();
            assert_eq!(a.class_minima(&err).unwrap(), b.class_minima(&err).unwrap());
        }
    }
}
