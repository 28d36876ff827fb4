//! Noise channels, Monte Carlo recovery curves and threshold extraction.
//!
//! Recovery is estimated per error weight `w` and then mixed over the
//! binomial weight distribution for every physical rate on a grid. Each
//! trial draws from its own RNG stream keyed by (seed, layers, weight,
//! trial), so results do not depend on how trials are scheduled.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete};

use crate::codegen::{build_evenbly_code, CodegenError, GaugeBasis, GaugeSpec, Layout, StabilizerCode};
use crate::decoders::{
    DecodeError, DecoderKind, ErasureDecoder, ErasurePattern, GreedyDecoder, PauliDecoder,
};
use crate::symplectic::{Pauli, PauliString};
use crate::tiling::{build_tiling, TilingError, TilingGraph};

/// Binomial weight below which a weight may be skipped when truncation is on.
pub const TRUNCATION_MASS: f64 = 1e-9;

/// Bootstrap resamples used by [`estimate_threshold`].
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum ChannelError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<ChannelError>,
    },
}

impl ChannelError {
    fn context(self, context: impl Into<String>) -> Self {
        ChannelError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    Erasure,
    Depolarizing,
    PureX,
    PureY,
    PureZ,
}

impl NoiseKind {
    pub fn is_pauli(self) -> bool {
        self != NoiseKind::Erasure
    }

    fn fixed_pauli(self) -> Option<Pauli> {
        match self {
            NoiseKind::PureX => Some(Pauli::X),
            NoiseKind::PureY => Some(Pauli::Y),
            NoiseKind::PureZ => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl FromStr for NoiseKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "erasure" => Ok(Self::Erasure),
            "depolarizing" | "depolarising" => Ok(Self::Depolarizing),
            "pure-x" | "x" => Ok(Self::PureX),
            "pure-y" | "y" => Ok(Self::PureY),
            "pure-z" | "z" => Ok(Self::PureZ),
            _ => Err(format!("unknown noise kind {s:?}")),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Erasure => "erasure",
            Self::Depolarizing => "depolarizing",
            Self::PureX => "pure-x",
            Self::PureY => "pure-y",
            Self::PureZ => "pure-z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ChannelError::Config(format!("rate {p} outside [0, 1]")));
        }
        Ok(Self { kind, p })
    }
}

/// Trials per weight, indexed by layer count. Layers past the end reuse the
/// last entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialsTable(pub Vec<u64>);

impl TrialsTable {
    /// 10⁵ trials for L = 0, 1; 10⁴ for L = 2; 10³ from L = 3 on.
    pub fn reference() -> Self {
        Self(vec![100_000, 100_000, 10_000, 1_000, 1_000])
    }

    /// Every entry multiplied by `factor`, keeping at least one trial.
    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|&t| ((t as f64 * factor).round() as u64).max(1)).collect())
    }

    pub fn for_layers(&self, layers: usize) -> u64 {
        self.0.get(layers).or(self.0.last()).copied().unwrap_or(1)
    }
}

/// The decoder run in each trial, prepared once per code.
#[derive(Debug, Clone)]
pub enum TrialDecoder {
    /// Greedy reconstruction, cross-checked against the Gaussian decoder on
    /// every sample.
    Greedy {
        greedy: GreedyDecoder,
        check: ErasureDecoder,
        targets: Vec<usize>,
    },
    Gaussian(ErasureDecoder),
    Integer(PauliDecoder),
}

/// Outcome of one sampled error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialResult {
    pub success: bool,
    pub tie: bool,
    /// Greedy succeeded where the Gaussian decoder failed.
    pub greedy_violation: bool,
}

impl TrialDecoder {
    /// `graph` is needed for greedy decoding only.
    pub fn new(
        code: &StabilizerCode,
        graph: Option<&TilingGraph>,
        kind: DecoderKind,
        targets: &[usize],
    ) -> Result<Self, ChannelError> {
        Ok(match kind {
            DecoderKind::Greedy => {
                let g = graph.ok_or_else(|| ChannelError::Config("greedy decoding needs the tiling".into()))?;
                TrialDecoder::Greedy {
                    greedy: GreedyDecoder::new(code, g)?,
                    check: ErasureDecoder::new(code, targets)?,
                    targets: targets.to_vec(),
                }
            }
            DecoderKind::Gaussian => TrialDecoder::Gaussian(ErasureDecoder::new(code, targets)?),
            DecoderKind::Integer => TrialDecoder::Integer(PauliDecoder::new(code, targets)?),
        })
    }

    pub fn kind(&self) -> DecoderKind {
        match self {
            TrialDecoder::Greedy { .. } => DecoderKind::Greedy,
            TrialDecoder::Gaussian(_) => DecoderKind::Gaussian,
            TrialDecoder::Integer(_) => DecoderKind::Integer,
        }
    }

    pub fn accepts(&self, noise: NoiseKind) -> bool {
        matches!(self, TrialDecoder::Integer(_)) == noise.is_pauli()
    }

    /// Decides a single error on `support` (Paulis drawn from `rng` for
    /// Pauli channels).
    pub fn trial(
        &self,
        noise: NoiseKind,
        n: usize,
        support: &[usize],
        rng: &mut impl Rng,
    ) -> Result<TrialResult, ChannelError> {
        match self {
            TrialDecoder::Greedy { greedy, check, targets } => {
                let e = ErasurePattern::new(n, support.iter().copied());
                let mut success = true;
                for &t in targets {
                    success &= greedy.decode(&e, t)?.success;
                }
                let gaussian = check.decode(&e)?.success;
                Ok(TrialResult {
                    success,
                    tie: false,
                    greedy_violation: success && !gaussian,
                })
            }
            TrialDecoder::Gaussian(d) => Ok(TrialResult {
                success: d.decode(&ErasurePattern::new(n, support.iter().copied()))?.success,
                ..Default::default()
            }),
            TrialDecoder::Integer(d) => {
                let mut err = PauliString::identity(n);
                for &q in support {
                    let p = noise.fixed_pauli().unwrap_or_else(|| {
                        let v = rng.random_range(1u8..4);
                        Pauli::from_bits(v & 1 == 1, v & 2 == 2)
                    });
                    err.set(q, p);
                }
                let (success, tie) = d.decide(&err)?;
                Ok(TrialResult {
                    success,
                    tie,
                    greedy_violation: false,
                })
            }
        }
    }
}

/// Success counts at one error weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightStat {
    pub w: usize,
    /// Zero when the weight was skipped and its value bounded by a neighbour.
    pub trials: u64,
    pub successes: u64,
    #[serde(default)]
    pub ties: u64,
    #[serde(default)]
    pub greedy_violations: u64,
    /// Value used for skipped weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Only one error of this weight exists, so every trial gave the same
    /// outcome and the estimate has no sampling error.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
}

impl WeightStat {
    pub fn p_rec(&self) -> f64 {
        match self.bound {
            Some(b) => b,
            None if self.trials == 0 => 0.0,
            None => self.successes as f64 / self.trials as f64,
        }
    }

    /// Binomial standard error of [`Self::p_rec`] in the Agresti–Coull
    /// form, which stays positive when every trial succeeded or failed.
    pub fn std_err(&self) -> f64 {
        if self.trials == 0 || self.exact {
            return 0.0;
        }
        let t = self.trials as f64 + 4.0;
        let p = (self.successes as f64 + 2.0) / t;
        (p * (1.0 - p) / t).sqrt()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the RNG stream for one trial.
pub fn trial_seed(seed: u64, layers: usize, w: usize, trial: u64) -> u64 {
    [layers as u64, w as u64, trial]
        .iter()
        .fold(splitmix64(seed), |h, &x| splitmix64(h ^ splitmix64(x)))
}

/// Runs `trials` decodes of uniformly random weight-`w` errors. Trials run
/// in parallel on the current rayon pool; counts are integers, so the
/// result does not depend on the number of threads.
pub fn sample_per_weight(
    decoder: &TrialDecoder,
    noise: NoiseKind,
    n: usize,
    w: usize,
    trials: u64,
    seed: u64,
    layers: usize,
) -> Result<WeightStat, ChannelError> {
    if w > n {
        return Err(ChannelError::Config(format!("weight {w} exceeds n = {n}")));
    }
    if !decoder.accepts(noise) {
        return Err(ChannelError::Config(format!(
            "the {} decoder does not handle {noise} noise",
            decoder.kind()
        )));
    }
    let results: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, layers, w, t));
            let support = sample(&mut rng, n, w).into_vec();
            decoder.trial(noise, n, &support, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let count = |f: fn(&TrialResult) -> bool| results.iter().filter(|r| f(r)).count() as u64;
    Ok(WeightStat {
        w,
        trials,
        successes: count(|r| r.success),
        ties: count(|r| r.tie),
        greedy_violations: count(|r| r.greedy_violation),
        bound: None,
        exact: w == 0 || (w == n && noise != NoiseKind::Depolarizing),
    })
}

/// Direct sampling at a fixed physical rate, as a cross-check of the
/// per-weight estimate. Returns the success fraction and its standard error.
pub fn sample_direct(
    decoder: &TrialDecoder,
    noise: NoiseModel,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64), ChannelError> {
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, usize::MAX, usize::MAX, t));
            let support: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < noise.p).collect();
            decoder.trial(noise.kind, n, &support, &mut rng).map(|r| r.success as u64)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    let p = hits as f64 / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}

fn binomial_pmf(n: usize, w: usize, p: f64) -> f64 {
    Binomial::new(p, n as u64).map_or(0.0, |b| b.pmf(w as u64))
}

/// Mixes per-weight recovery over the binomial weight distribution at rate
/// `p`. `per_weight` must cover every weight `0..=n` in order. Returns the
/// recovery probability and its standard error.
pub fn recombine(per_weight: &[WeightStat], p: f64) -> (f64, f64) {
    let n = per_weight.len().saturating_sub(1);
    let mut mean = 0.0;
    let mut var = 0.0;
    for s in per_weight {
        let b = binomial_pmf(n, s.w, p);
        mean += b * s.p_rec();
        var += b * b * s.std_err().powi(2);
    }
    (mean.clamp(0.0, 1.0), var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p_phys: f64,
    pub p_rec: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub decoder: DecoderKind,
    pub kind: NoiseKind,
    pub tiling_p: usize,
    pub tiling_q: usize,
    pub layers: usize,
    pub n: usize,
    pub k: usize,
    pub gauge: GaugeBasis,
    pub layout: Layout,
    pub extra_gauged_layers: usize,
    pub targets: Vec<usize>,
    pub seed: u64,
    pub trials_per_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryCurve {
    pub meta: CurveMeta,
    pub points: Vec<CurvePoint>,
    pub per_weight: Vec<WeightStat>,
}

impl RecoveryCurve {
    pub fn greedy_violations(&self) -> u64 {
        self.per_weight.iter().map(|s| s.greedy_violations).sum()
    }
}

/// Everything that determines a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub tiling_p: usize,
    pub tiling_q: usize,
    pub layers: Vec<usize>,
    pub layout: Layout,
    pub gauge: GaugeBasis,
    #[serde(default)]
    pub extra_gauged_layers: usize,
    pub decoder: DecoderKind,
    pub kind: NoiseKind,
    pub p_grid: Vec<f64>,
    pub trials: TrialsTable,
    pub seed: u64,
    #[serde(default = "default_targets")]
    pub targets: Vec<usize>,
    /// Skip weights whose binomial mass stays below [`TRUNCATION_MASS`]
    /// across the whole grid.
    #[serde(default)]
    pub truncate: bool,
}

fn default_targets() -> Vec<usize> {
    vec![0]
}

/// `count` evenly spaced rates from `lo` to `hi` inclusive, rounded to 12
/// decimals so grids print cleanly.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
                (x * 1e12).round() / 1e12
            })
            .collect(),
    }
}

impl SweepConfig {
    /// Zero-rate {5,4} erasure sweep over `layers` with the Gaussian decoder
    /// on a 0.01-spaced grid up to 0.6.
    pub fn erasure(layers: Vec<usize>, gauge: GaugeBasis) -> Self {
        Self {
            tiling_p: 5,
            tiling_q: 4,
            layers,
            layout: Layout::ZeroRate,
            gauge,
            extra_gauged_layers: 0,
            decoder: DecoderKind::Gaussian,
            kind: NoiseKind::Erasure,
            p_grid: linear_grid(0.0, 0.6, 61),
            trials: TrialsTable::reference().scaled(0.1),
            seed: 1,
            targets: default_targets(),
            truncate: false,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |m: String| Err(ChannelError::Config(m));
        if self.layers.is_empty() {
            return bad("no layer counts given".into());
        }
        if self.p_grid.is_empty() || self.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("rate grid must be non-empty and inside [0, 1]".into());
        }
        if self.p_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("rate grid must be strictly increasing".into());
        }
        if self.trials.0.is_empty() || self.trials.0.contains(&0) {
            return bad("trial counts must be positive".into());
        }
        if self.targets.is_empty() {
            return bad("at least one target bulk qubit is needed".into());
        }
        let pauli_decoder = self.decoder == DecoderKind::Integer;
        if pauli_decoder != self.kind.is_pauli() {
            return bad(format!("the {} decoder does not handle {} noise", self.decoder, self.kind));
        }
        GaugeSpec {
            layout: self.layout,
            basis: self.gauge,
            extra_gauged_layers: self.extra_gauged_layers,
        }
        .validate()?;
        Ok(())
    }

    fn spec(&self) -> GaugeSpec {
        GaugeSpec {
            layout: self.layout,
            basis: self.gauge,
            extra_gauged_layers: self.extra_gauged_layers,
        }
    }
}

/// Builds the code of one sweep entry and runs the per-weight sampling.
pub fn sweep_curve(cfg: &SweepConfig, layers: usize) -> Result<RecoveryCurve, ChannelError> {
    let g = build_tiling(cfg.tiling_p, cfg.tiling_q, layers)?;
    let code = build_evenbly_code(&g, &cfg.spec())?;
    let full = if cfg.extra_gauged_layers > 0 {
        Some(build_tiling(cfg.tiling_p, cfg.tiling_q, layers + cfg.extra_gauged_layers)?)
    } else {
        None
    };
    let graph = full.as_ref().unwrap_or(&g);
    let decoder = TrialDecoder::new(&code, Some(graph), cfg.decoder, &cfg.targets)?;
    let n = code.n;
    let trials = cfg.trials.for_layers(layers);

    let mut per_weight: Vec<WeightStat> = Vec::with_capacity(n + 1);
    for w in 0..=n {
        let negligible = cfg.truncate
            && cfg.p_grid.iter().all(|&p| binomial_pmf(n, w, p) < TRUNCATION_MASS);
        per_weight.push(if negligible {
            WeightStat {
                w,
                trials: 0,
                successes: 0,
                ties: 0,
                greedy_violations: 0,
                bound: Some(f64::NAN),
                exact: false,
            }
        } else {
            sample_per_weight(&decoder, cfg.kind, n, w, trials, cfg.seed, layers)?
        });
    }
    fill_skipped(&mut per_weight);

    let points = cfg
        .p_grid
        .iter()
        .map(|&p| {
            let (p_rec, std_err) = recombine(&per_weight, p);
            CurvePoint { p_phys: p, p_rec, std_err }
        })
        .collect();
    Ok(RecoveryCurve {
        meta: CurveMeta {
            decoder: cfg.decoder,
            kind: cfg.kind,
            tiling_p: cfg.tiling_p,
            tiling_q: cfg.tiling_q,
            layers,
            n,
            k: code.k(),
            gauge: cfg.gauge,
            layout: cfg.layout,
            extra_gauged_layers: cfg.extra_gauged_layers,
            targets: cfg.targets.clone(),
            seed: cfg.seed,
            trials_per_weight: trials,
        },
        points,
        per_weight,
    })
}

/// Skipped weights take the value of the nearest sampled weight.
fn fill_skipped(per_weight: &mut [WeightStat]) {
    let sampled: Vec<usize> = (0..per_weight.len()).filter(|&i| per_weight[i].bound.is_none()).collect();
    if sampled.is_empty() {
        for s in per_weight.iter_mut() {
            s.bound = Some(if s.w == 0 { 1.0 } else { 0.0 });
        }
        return;
    }
    for i in 0..per_weight.len() {
        if per_weight[i].bound.is_some() {
            let j = *sampled.iter().min_by_key(|&&j| j.abs_diff(i)).unwrap();
            per_weight[i].bound = Some(per_weight[j].p_rec());
        }
    }
}

/// One recovery curve per layer count.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<RecoveryCurve>, ChannelError> {
    cfg.validate()?;
    cfg.layers
        .iter()
        .map(|&l| sweep_curve(cfg, l).map_err(|e| e.context(format!("sweep at L = {l}"))))
        .collect()
}

/// [`sweep`] on a dedicated pool of `threads` workers.
pub fn sweep_with_threads(cfg: &SweepConfig, threads: usize) -> Result<Vec<RecoveryCurve>, ChannelError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ChannelError::Config(e.to_string()))?;
    pool.install(|| sweep(cfg))
}

/// One CSV line of a recovery curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub decoder: DecoderKind,
    pub kind: NoiseKind,
    pub gauge: GaugeBasis,
    pub layout: String,
    #[serde(rename = "L")]
    pub layers: usize,
    pub n: usize,
    pub k: usize,
    pub p_phys: f64,
    pub p_rec: f64,
    pub std_err: f64,
    pub trials: u64,
}

pub fn write_csv<W: Write>(curves: &[RecoveryCurve], out: W) -> Result<(), ChannelError> {
    let mut w = csv::Writer::from_writer(out);
    for c in curves {
        for pt in &c.points {
            w.serialize(CsvRow {
                decoder: c.meta.decoder,
                kind: c.meta.kind,
                gauge: c.meta.gauge,
                layout: c.meta.layout.to_string(),
                layers: c.meta.layers,
                n: c.meta.n,
                k: c.meta.k,
                p_phys: pt.p_phys,
                p_rec: pt.p_rec,
                std_err: pt.std_err,
                trials: c.meta.trials_per_weight,
            })?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads rows written by [`write_csv`] and groups them by layer count.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<(usize, Vec<CurvePoint>)>, ChannelError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out: Vec<(usize, Vec<CurvePoint>)> = Vec::new();
    for row in r.deserialize() {
        let row: CsvRow = row?;
        let pt = CurvePoint {
            p_phys: row.p_phys,
            p_rec: row.p_rec,
            std_err: row.std_err,
        };
        match out.iter_mut().find(|(l, _)| *l == row.layers) {
            Some((_, pts)) => pts.push(pt),
            None => out.push((row.layers, vec![pt])),
        }
    }
    out.sort_by_key(|(l, _)| *l);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub p_threshold: f64,
    pub uncertainty: f64,
    /// Which pair of curves crossed, e.g. `"L2/L3"`.
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ThresholdResult {
    Crossing(ThresholdEstimate),
    NoThreshold { method: String, reason: String },
}

impl ThresholdResult {
    pub fn estimate(&self) -> Option<&ThresholdEstimate> {
        match self {
            ThresholdResult::Crossing(e) => Some(e),
            ThresholdResult::NoThreshold { .. } => None,
        }
    }
}

/// Crossing of `d = larger − smaller` from positive to negative. The
/// difference must first be significantly positive (more than 2σ) and then
/// significantly negative after that point; the last sign change between
/// the two is interpolated linearly.
fn crossing(ps: &[f64], d: &[f64], sigma: &[f64]) -> Result<f64, String> {
    let z: Vec<f64> = d
        .iter()
        .zip(sigma)
        .map(|(&d, &s)| if s > 0.0 { d / s } else if d == 0.0 { 0.0 } else { d.signum() * f64::INFINITY })
        .collect();
    let (imax, &zmax) = z
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or("empty grid")?;
    if zmax <= 2.0 {
        return Err("the larger code is never significantly better".into());
    }
    let (jmin, &zmin) = z[imax..]
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(j, v)| (j + imax, v))
        .unwrap();
    if zmin >= -2.0 {
        return Err("the larger code is never significantly worse above its best point".into());
    }
    let i = (imax..jmin)
        .rev()
        .find(|&i| d[i] > 0.0 && d[i + 1] <= 0.0)
        .expect("a sign change exists between a positive and a negative point");
    let t = d[i] / (d[i] - d[i + 1]);
    Ok(ps[i] + t * (ps[i + 1] - ps[i]))
}

/// Threshold from the crossing of two recovery curves on the same grid,
/// `smaller` having fewer layers. The uncertainty is the spread of the
/// crossing over [`BOOTSTRAP_RESAMPLES`] resamples in which every point is
/// perturbed by its standard error.
pub fn estimate_threshold(
    smaller: &[CurvePoint],
    larger: &[CurvePoint],
    method: &str,
    seed: u64,
) -> Result<ThresholdResult, ChannelError> {
    if smaller.len() != larger.len()
        || smaller.iter().zip(larger).any(|(a, b)| (a.p_phys - b.p_phys).abs() > 1e-12)
    {
        return Err(ChannelError::Config(format!("{method}: curves are on different grids")));
    }
    let ps: Vec<f64> = smaller.iter().map(|c| c.p_phys).collect();
    let d: Vec<f64> = smaller.iter().zip(larger).map(|(a, b)| b.p_rec - a.p_rec).collect();
    let sigma: Vec<f64> = smaller
        .iter()
        .zip(larger)
        .map(|(a, b)| a.std_err.hypot(b.std_err))
        .collect();
    let p0 = match crossing(&ps, &d, &sigma) {
        Ok(p) => p,
        Err(reason) => {
            return Ok(ThresholdResult::NoThreshold {
                method: method.to_string(),
                reason,
            })
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let mut samples = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let dd: Vec<f64> = smaller
            .iter()
            .zip(larger)
            .map(|(a, b)| {
                let pa = a.p_rec + a.std_err * std_normal.sample(&mut rng);
                let pb = b.p_rec + b.std_err * std_normal.sample(&mut rng);
                pb - pa
            })
            .collect();
        if let Ok(p) = crossing(&ps, &dd, &sigma) {
            samples.push(p);
        }
    }
    let spread = if samples.len() > 1 {
        let m = samples.iter().sum::<f64>() / samples.len() as f64;
        (samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (samples.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(ThresholdResult::Crossing(ThresholdEstimate {
        p_threshold: p0,
        uncertainty: spread.max(1e-6),
        method: method.to_string(),
    }))
}

/// Thresholds of every adjacent pair of curves, ordered by layer count.
pub fn adjacent_thresholds(
    curves: &[(usize, Vec<CurvePoint>)],
    seed: u64,
) -> Result<Vec<ThresholdResult>, ChannelError> {
    curves
        .windows(2)
        .map(|w| estimate_threshold(&w[0].1, &w[1].1, &format!("L{}/L{}", w[0].0, w[1].0), seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::seed_code;

    fn seed_decoder() -> (StabilizerCode, TrialDecoder) {
        let code = seed_code(4).unwrap().to_code(0);
        let d = TrialDecoder::new(&code, None, DecoderKind::Gaussian, &[0]).unwrap();
        (code, d)
    }

    #[test]
    fn seed_erasure_weights() {
        let (code, d) = seed_decoder();
        let stat = |w| sample_per_weight(&d, NoiseKind::Erasure, code.n, w, 200, 3, 0).unwrap();
        assert_eq!(stat(0).p_rec(), 1.0);
        assert_eq!(stat(1).p_rec(), 1.0);
        assert_eq!(stat(2).p_rec(), 0.0);
        assert_eq!(stat(4).p_rec(), 0.0);
    }

    #[test]
    fn recombine_matches_closed_form() {
        let table: Vec<WeightStat> = [1.0, 1.0, 0.0, 0.0, 0.0]
            .iter()
            .enumerate()
            .map(|(w, &p)| WeightStat {
                w,
                trials: 10,
                successes: (p * 10.0) as u64,
                ties: 0,
                greedy_violations: 0,
                bound: None,
                exact: false,
            })
            .collect();
        for p in [0.0, 0.1, 0.37, 0.9] {
            let exact = (1.0f64 - p).powi(4) + 4.0 * p * (1.0f64 - p).powi(3);
            assert!((recombine(&table, p).0 - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_crossing_and_no_crossing() {
        let ps = linear_grid(0.0, 1.0, 11);
        let pt = |p: f64, r: f64| CurvePoint { p_phys: p, p_rec: r, std_err: 0.0 };
        let a: Vec<_> = ps.iter().map(|&p| pt(p, 0.8 - 0.4 * p)).collect();
        let b: Vec<_> = ps.iter().map(|&p| pt(p, 1.0 - 0.9 * p)).collect();
        let est = estimate_threshold(&a, &b, "L1/L2", 0).unwrap();
        assert!((est.estimate().unwrap().p_threshold - 0.4).abs() < 1e-12);
        assert!(matches!(
            estimate_threshold(&a, &a, "L1/L1", 0).unwrap(),
            ThresholdResult::NoThreshold { .. }
        ));
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(1, 2, 3, 4), trial_seed(1, 2, 3, 5));
        assert_ne!(trial_seed(1, 2, 3, 4), trial_seed(1, 3, 2, 4));
    }
}
