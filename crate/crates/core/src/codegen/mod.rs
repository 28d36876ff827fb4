//! Evenbly code construction: seed codes on vertices, Hadamard edges,
//! stabilizer-level contraction and gauge fixing.

mod contract;
mod layout;
mod push;
mod seed;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::symplectic::{PauliString, SymplecticError, SymplecticMatrix};
use crate::tiling::{build_tiling, TilingError, TilingGraph};

pub use contract::{conjoin, contract, EdgeGate};
pub use layout::{constant_rate_selection, kept_qubits};
pub use push::{local_group, push_logical, LocalRole};
pub use seed::{seed_code, SeedCode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodegenError {
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("q = {0} must be even and at least 4")]
    InvalidQ(usize),
    #[error("leg {leg} is out of range for a code on {n} qubits")]
    LegOutOfRange { leg: usize, n: usize },
    #[error("leg {0} is contracted twice")]
    LegReused(usize),
    #[error("contraction destroys the logical pair of bulk qubit {0}")]
    LogicalDestroyed(usize),
    #[error("gauge operator of bulk qubit {0} anticommutes with the stabilizers")]
    AnticommutingGauge(usize),
    #[error("bulk qubit {0} is not an ungauged logical qubit")]
    NotUngauged(usize),
    #[error("bulk qubit {0} does not exist")]
    UnknownBulk(usize),
    #[error("invalid gauge spec: {0}")]
    InvalidSpec(String),
    #[error("code has no tiling reference")]
    MissingTiling,
    #[error("code invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GaugeBasis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for GaugeBasis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "X" => Ok(GaugeBasis::X),
            "Y" => Ok(GaugeBasis::Y),
            "Z" => Ok(GaugeBasis::Z),
            _ => Err(format!("unknown gauge basis {s:?}")),
        }
    }
}

impl std::fmt::Display for GaugeBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GaugeBasis::X => "X",
            GaugeBasis::Y => "Y",
            GaugeBasis::Z => "Z",
        })
    }
}

/// Which β vertices a constant-rate layout keeps ungauged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantRateRule {
    /// Every fourth β vertex of each layer (rate 1/8 for {5,4}).
    HalfFilled,
    /// Every second β vertex of each layer (rate 1/4 for {5,4}).
    EverySecondBeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    MaxRate,
    ZeroRate,
    ConstantRate(ConstantRateRule),
}

impl std::str::FromStr for Layout {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "max-rate" => Ok(Layout::MaxRate),
            "zero-rate" => Ok(Layout::ZeroRate),
            "constant-rate" | "constant-rate-half-filled" => {
                Ok(Layout::ConstantRate(ConstantRateRule::HalfFilled))
            }
            "constant-rate-every-second-beta" => {
                Ok(Layout::ConstantRate(ConstantRateRule::EverySecondBeta))
            }
            _ => Err(format!("unknown layout {s:?}")),
        }
    }
}

impl std::fmt::Display for Layout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Layout::MaxRate => "max-rate",
            Layout::ZeroRate => "zero-rate",
            Layout::ConstantRate(ConstantRateRule::HalfFilled) => "constant-rate",
            Layout::ConstantRate(ConstantRateRule::EverySecondBeta) => {
                "constant-rate-every-second-beta"
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaugeSpec {
    pub layout: Layout,
    pub basis: GaugeBasis,
    #[serde(default)]
    pub extra_gauged_layers: usize,
}

impl GaugeSpec {
    pub fn new(layout: Layout, basis: GaugeBasis) -> Self {
        Self {
            layout,
            basis,
            extra_gauged_layers: 0,
        }
    }

    pub fn max_rate() -> Self {
        Self::new(Layout::MaxRate, GaugeBasis::Z)
    }

    pub fn validate(&self) -> Result<(), CodegenError> {
        if self.extra_gauged_layers > 0 && self.layout == Layout::MaxRate {
            return Err(CodegenError::InvalidSpec(
                "extra gauged layers need a zero-rate or constant-rate layout".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalPair {
    /// Bulk qubit index, equal to the tiling vertex id.
    pub bulk: usize,
    pub x: PauliString,
    pub z: PauliString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugePair {
    pub bulk: usize,
    pub x: PauliString,
    pub z: PauliString,
    /// Basis whose logical operator was added to the stabilizers.
    pub fixed: GaugeBasis,
}

impl GaugePair {
    /// The operator that was made a stabilizer.
    pub fn fixed_operator(&self) -> PauliString {
        logical_in_basis(&self.x, &self.z, self.fixed)
    }

    /// The partner that is not a stabilizer.
    pub fn conjugate_operator(&self) -> PauliString {
        match self.fixed {
            GaugeBasis::X => self.z.clone(),
            GaugeBasis::Y | GaugeBasis::Z => self.x.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingRef {
    pub p: usize,
    pub q: usize,
    /// Layers of the graph the code was built on, including extra gauged ones.
    pub layers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerCode {
    pub n: usize,
    pub stabilizers: SymplecticMatrix,
    pub logical_pairs: Vec<LogicalPair>,
    pub gauge_pairs: Vec<GaugePair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiling: Option<TilingRef>,
}

/// `X̄`, `Z̄` or `Ȳ = i X̄ Z̄` from a logical pair.
pub fn logical_in_basis(x: &PauliString, z: &PauliString, basis: GaugeBasis) -> PauliString {
    match basis {
        GaugeBasis::X => x.clone(),
        GaugeBasis::Z => z.clone(),
        GaugeBasis::Y => {
            let (mut y, e) = x.compose_with_phase(z).expect("equal lengths");
            // i · i^e must be real for an anticommuting pair.
            if (e + 1) % 4 == 2 {
                y.negate();
            }
            y
        }
    }
}

impl StabilizerCode {
    pub fn k(&self) -> usize {
        self.logical_pairs.len()
    }

    pub fn logical(&self, bulk: usize) -> Option<&LogicalPair> {
        self.logical_pairs.iter().find(|l| l.bulk == bulk)
    }

    pub fn gauge_pair(&self, bulk: usize) -> Option<&GaugePair> {
        self.gauge_pairs.iter().find(|l| l.bulk == bulk)
    }

    /// Bulk index → tiling vertex id for every ungauged logical pair.
    pub fn bulk_qubit_map(&self) -> Vec<usize> {
        self.logical_pairs.iter().map(|l| l.bulk).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("code serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Checks commutation relations and the count `rank + pairs == n`.
    pub fn validate(&self) -> Result<(), CodegenError> {
        let inv = |m: String| Err(CodegenError::Invariant(m));
        let stabs = self.stabilizers.rows();
        if self.stabilizers.n() != self.n {
            return inv("stabilizer length differs from n".into());
        }
        for (i, a) in stabs.iter().enumerate() {
            for b in &stabs[i + 1..] {
                if !a.commutes_with(b) {
                    return inv(format!("stabilizers {a} and {b} anticommute"));
                }
            }
        }
        let pairs: Vec<(usize, &PauliString, &PauliString)> = self
            .logical_pairs
            .iter()
            .map(|l| (l.bulk, &l.x, &l.z))
            .chain(self.gauge_pairs.iter().map(|g| (g.bulk, &g.x, &g.z)))
            .collect();
        for &(bulk, x, z) in &pairs {
            if x.commutes_with(z) {
                return inv(format!("pair of bulk qubit {bulk} commutes"));
            }
        }
        for &(bulk, x, z) in pairs.iter().take(self.logical_pairs.len()) {
            if stabs.iter().any(|s| !s.commutes_with(x) || !s.commutes_with(z)) {
                return inv(format!("logical of bulk qubit {bulk} anticommutes with S"));
            }
        }
        for g in &self.gauge_pairs {
            let f = g.fixed_operator();
            if stabs.iter().any(|s| !s.commutes_with(&f)) {
                return inv(format!("fixed gauge of bulk qubit {} anticommutes", g.bulk));
            }
            if !self.stabilizers.spans(&f) {
                return inv(format!("fixed gauge of bulk qubit {} not in S", g.bulk));
            }
        }
        for (i, &(b1, x1, z1)) in pairs.iter().enumerate() {
            for &(b2, x2, z2) in &pairs[i + 1..] {
                if ![(x1, x2), (x1, z2), (z1, x2), (z1, z2)]
                    .iter()
                    .all(|(a, b)| a.commutes_with(b))
                {
                    return inv(format!("pairs of bulk qubits {b1} and {b2} overlap"));
                }
            }
        }
        let rank = self.stabilizers.rank();
        if rank + self.logical_pairs.len() != self.n {
            return inv(format!(
                "rank {rank} + {} logical pairs != n = {}",
                self.logical_pairs.len(),
                self.n
            ));
        }
        Ok(())
    }
}

/// Seeds on every vertex, Hadamards on every edge, then gauge fixing.
///
/// With `extra_gauged_layers = e` the code is built on `L + e` layers and
/// only vertices of the first `L` layers may stay ungauged.
pub fn build_evenbly_code(g: &TilingGraph, spec: &GaugeSpec) -> Result<StabilizerCode, CodegenError> {
    spec.validate()?;
    let keep = kept_qubits(g, spec.layout);
    let extended;
    let graph = if spec.extra_gauged_layers > 0 {
        extended = build_tiling(g.p, g.q, g.num_layers() + spec.extra_gauged_layers)?;
        &extended
    } else {
        g
    };
    let mut code = ungauged_code(graph)?;
    let gauged: BTreeSet<usize> = (0..graph.k_bulk()).filter(|v| !keep.contains(v)).collect();
    code = gauge_fix(&code, &gauged, spec.basis)?;
    code.gauge = Some(*spec);
    code.validate()?;
    Ok(code)
}

/// The max-rate code of a tiling with no gauge fixing applied.
pub fn ungauged_code(g: &TilingGraph) -> Result<StabilizerCode, CodegenError> {
    let seed = seed_code(g.q)?;
    let q = g.q;
    let mut code = seed.to_code(0);
    if g.k_bulk() > 1 {
        let parts: Vec<StabilizerCode> = (0..g.k_bulk()).map(|v| seed.to_code(v)).collect();
        code = contract::tensor_all(&parts);
    }
    // Physical qubit of vertex v, leg l is v*q + l before contraction.
    let pairs: Vec<(usize, usize, EdgeGate)> = g
        .edges()
        .into_iter()
        .map(|((u, lu), (v, lv))| (u * q + lu, v * q + lv, EdgeGate::Hadamard))
        .collect();
    let mut out = contract(&code, &pairs)?;
    // contract keeps the surviving qubits in increasing order, which is not
    // the boundary numbering; permute.
    let mut surviving: Vec<usize> = g.boundary.iter().map(|&(v, l)| v * q + l).collect();
    let mut sorted = surviving.clone();
    sorted.sort_unstable();
    let position = |x: usize| sorted.binary_search(&x).unwrap();
    let perm: Vec<usize> = surviving.drain(..).map(position).collect();
    out = contract::permute(&out, &perm);
    out.tiling = Some(TilingRef {
        p: g.p,
        q: g.q,
        layers: g.num_layers(),
    });
    out.validate()?;
    Ok(out)
}

/// Adds the chosen logical of every selected bulk qubit to the stabilizers.
pub fn gauge_fix(
    code: &StabilizerCode,
    qubits: &BTreeSet<usize>,
    basis: GaugeBasis,
) -> Result<StabilizerCode, CodegenError> {
    let mut out = code.clone();
    for &b in qubits {
        if code.logical(b).is_none() {
            return Err(CodegenError::NotUngauged(b));
        }
    }
    let mut new_stabs: Vec<PauliString> = Vec::new();
    let mut remaining = Vec::new();
    for pair in out.logical_pairs.drain(..) {
        if qubits.contains(&pair.bulk) {
            let op = logical_in_basis(&pair.x, &pair.z, basis);
            if code.stabilizers.rows().iter().any(|s| !s.commutes_with(&op)) {
                return Err(CodegenError::AnticommutingGauge(pair.bulk));
            }
            new_stabs.push(op);
            out.gauge_pairs.push(GaugePair {
                bulk: pair.bulk,
                x: pair.x,
                z: pair.z,
                fixed: basis,
            });
        } else {
            remaining.push(pair);
        }
    }
    out.logical_pairs = remaining;
    for op in new_stabs {
        out.stabilizers.push(op)?;
    }
    Ok(out)
}
