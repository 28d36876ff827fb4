use super::{check_targets, DecodeError, DecodeOutcome, ErasurePattern};
use crate::codegen::StabilizerCode;
use crate::symplectic::{bits, PauliString, XorBasis};

/// Optimal erasure decision by Gaussian elimination.
///
/// A target logical survives an erasure exactly when multiplying it by
/// stabilizers can clear it from every erased qubit; equivalently, no
/// operator inside the erasure that commutes with the stabilizers acts on
/// the target. Other logical qubits are not free here, since dressing the
/// target with them would not reveal the target's own state. Elimination
/// runs on the erased columns only: each target row must lie in the span of
/// the stabilizer rows restricted to those columns.
#[derive(Debug, Clone)]
pub struct ErasureDecoder {
    n: usize,
    stabilizers: Vec<(Vec<u64>, Vec<u64>)>,
    targets: Vec<(String, Vec<u64>, Vec<u64>)>,
}

impl ErasureDecoder {
    pub fn new(code: &StabilizerCode, targets: &[usize]) -> Result<Self, DecodeError> {
        check_targets(code, targets)?;
        let words = |p: &PauliString| (p.x_words().to_vec(), p.z_words().to_vec());
        let stabilizers = code.stabilizers.rows().iter().map(words).collect();
        let mut t = Vec::new();
        for &b in targets {
            let l = code.logical(b).unwrap();
            let (x, z) = (words(&l.x), words(&l.z));
            t.push((format!("X of bulk qubit {b}"), x.0, x.1));
            t.push((format!("Z of bulk qubit {b}"), z.0, z.1));
        }
        Ok(Self {
            n: code.n,
            stabilizers,
            targets: t,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn decode(&self, e: &ErasurePattern) -> Result<DecodeOutcome, DecodeError> {
        if e.n != self.n {
            return Err(DecodeError::LengthMismatch { got: e.n, n: self.n });
        }
        let erased: Vec<usize> = e.erased.iter().copied().collect();
        Ok(match self.first_failure(&erased) {
            None => DecodeOutcome::ok(),
            Some(i) => DecodeOutcome::failed(format!("{} is supported on the erasure", self.targets[i].0)),
        })
    }

    pub fn is_decodable(&self, erased: &[usize]) -> bool {
        self.first_failure(erased).is_none()
    }

    fn first_failure(&self, erased: &[usize]) -> Option<usize> {
        let width = 2 * erased.len();
        let restrict = |x: &[u64], z: &[u64]| {
            let mut v = vec![0u64; bits::words_for(width).max(1)];
            for (i, &q) in erased.iter().enumerate() {
                if bits::get(x, q) {
                    bits::set(&mut v, 2 * i);
                }
                if bits::get(z, q) {
                    bits::set(&mut v, 2 * i + 1);
                }
            }
            v
        };
        let mut basis = XorBasis::new(width.max(1));
        for (x, z) in &self.stabilizers {
            let v = restrict(x, z);
            if !bits::is_zero(&v) {
                basis.insert(v);
                if basis.rank() == width {
                    break;
                }
            }
        }
        self.targets.iter().position(|(_, x, z)| {
            let v = basis.reduce(restrict(x, z));
            !bits::is_zero(&v)
        })
    }
}

/// One-shot form of [`ErasureDecoder`].
pub fn erasure_decodable(
    code: &StabilizerCode,
    e: &ErasurePattern,
    targets: &[usize],
) -> Result<DecodeOutcome, DecodeError> {
    ErasureDecoder::new(code, targets)?.decode(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::seed_code;

    #[test]
    fn seed_single_and_double_erasures() {
        let code = seed_code(4).unwrap().to_code(0);
        let dec = ErasureDecoder::new(&code, &[0]).unwrap();
        for q in 0..4 {
            assert!(dec.decode(&ErasurePattern::new(4, [q])).unwrap().success);
        }
        for a in 0..4 {
            for b in a + 1..4 {
                assert!(!dec.decode(&ErasurePattern::new(4, [a, b])).unwrap().success);
            }
        }
        assert!(dec.decode(&ErasurePattern::none(4)).unwrap().success);
        assert!(!dec.decode(&ErasurePattern::all(4)).unwrap().success);
    }

    #[test]
    fn unknown_target() {
        let code = seed_code(4).unwrap().to_code(0);
        assert_eq!(ErasureDecoder::new(&code, &[3]).unwrap_err(), DecodeError::UnknownTarget(3));
    }

    #[test]
    fn parse_patterns() {
        assert_eq!(ErasurePattern::parse(4, "0110").unwrap(), ErasurePattern::new(4, [1, 2]));
        assert_eq!(ErasurePattern::parse(5, "0, 3").unwrap(), ErasurePattern::new(5, [0, 3]));
        assert!(ErasurePattern::parse(4, "7").is_err());
    }
}
