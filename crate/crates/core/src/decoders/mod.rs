//! Greedy reconstruction, Gaussian-elimination erasure decoding and
//! minimum-weight Pauli decoding.

mod erasure;
mod greedy;
mod pauli;
mod trellis;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::codegen::{CodegenError, StabilizerCode};
use crate::symplectic::{PauliString, SymplecticError};

pub use erasure::{erasure_decodable, ErasureDecoder};
pub use greedy::{greedy_decode, GreedyDecoder, GreedyState, MAX_GREEDY_Q};
pub use pauli::{pauli_decode, PauliDecoder, DEFAULT_TRELLIS_WIDTH};
pub use trellis::{ClassMinima, CosetTrellis};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error("bulk qubit {0} is not an ungauged logical qubit of the code")]
    UnknownTarget(usize),
    #[error("erasure or error acts on {got} qubits, the code has {n}")]
    LengthMismatch { got: usize, n: usize },
    #[error("trellis needs {width} state bits, above the limit of {cap}")]
    TrellisTooWide { width: usize, cap: usize },
    #[error("graph does not match the code: {0}")]
    GraphMismatch(String),
}

/// Erased physical qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasurePattern {
    pub n: usize,
    pub erased: BTreeSet<usize>,
}

impl ErasurePattern {
    pub fn new(n: usize, erased: impl IntoIterator<Item = usize>) -> Self {
        let erased: BTreeSet<usize> = erased.into_iter().collect();
        assert!(erased.iter().all(|&q| q < n), "erased qubit out of range");
        Self { n, erased }
    }

    pub fn none(n: usize) -> Self {
        Self::new(n, [])
    }

    pub fn all(n: usize) -> Self {
        Self::new(n, 0..n)
    }

    pub fn contains(&self, q: usize) -> bool {
        self.erased.contains(&q)
    }

    /// Parses a comma-separated list of qubit indices, or a string of
    /// `0`/`1` flags with one character per qubit.
    pub fn parse(n: usize, s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.len() == n && s.chars().all(|c| c == '0' || c == '1') {
            return Ok(Self::new(n, s.chars().enumerate().filter(|(_, c)| *c == '1').map(|(i, _)| i)));
        }
        let mut out = BTreeSet::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let q: usize = part.parse().map_err(|_| format!("bad qubit index {part:?}"))?;
            if q >= n {
                return Err(format!("qubit {q} out of range for n = {n}"));
            }
            out.insert(q);
        }
        Ok(Self { n, erased: out })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<PauliString>,
    /// What failed, when something did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Several logical classes reached the minimum weight.
    #[serde(default)]
    pub tie: bool,
}

impl DecodeOutcome {
    pub(crate) fn ok() -> Self {
        Self {
            success: true,
            correction: None,
            detail: None,
            tie: false,
        }
    }

    pub(crate) fn failed(detail: String) -> Self {
        Self {
            success: false,
            correction: None,
            detail: Some(detail),
            tie: false,
        }
    }
}

/// Decoder choice for sweeps and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Greedy,
    Gaussian,
    Integer,
}

impl std::str::FromStr for DecoderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "greedy" => Ok(Self::Greedy),
            "gaussian" | "erasure" => Ok(Self::Gaussian),
            "integer" | "pauli" | "mwd" => Ok(Self::Integer),
            _ => Err(format!("unknown decoder {s:?}")),
        }
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Greedy => "greedy",
            Self::Gaussian => "gaussian",
            Self::Integer => "integer",
        })
    }
}

/// Stabilizers plus both operators of every ungauged pair not in `targets`.
pub(crate) fn dont_care_group(code: &StabilizerCode, targets: &[usize]) -> Vec<PauliString> {
    let mut rows: Vec<PauliString> = code.stabilizers.rows().to_vec();
    for l in &code.logical_pairs {
        if !targets.contains(&l.bulk) {
            rows.push(l.x.clone());
            rows.push(l.z.clone());
        }
    }
    rows
}

pub(crate) fn check_targets(code: &StabilizerCode, targets: &[usize]) -> Result<(), DecodeError> {
    for &t in targets {
        if code.logical(t).is_none() {
            return Err(DecodeError::UnknownTarget(t));
        }
    }
    Ok(())
}
