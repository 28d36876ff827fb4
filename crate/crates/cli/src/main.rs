//! `evenbly`: build hyperbolic tensor-network codes, tabulate their scaling
//! and run erasure and Pauli decoding sweeps.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use evenbly_core::analytics::{distance_weights, rate_sequence, LogicalOp};
use evenbly_core::channels::{
    adjacent_thresholds, linear_grid, read_csv, sweep, write_csv, ChannelError, NoiseKind,
    SweepConfig, TrialsTable,
};
use evenbly_core::codegen::{build_evenbly_code, GaugeBasis, GaugeSpec, Layout, StabilizerCode};
use evenbly_core::decoders::{
    DecoderKind, ErasureDecoder, ErasurePattern, GreedyDecoder, PauliDecoder,
};
use evenbly_core::symplectic::PauliString;
use evenbly_core::tiling::{build_tiling, TilingGraph};

#[derive(Parser, Debug)]
#[command(name = "evenbly", version, about = "Hyperbolic tensor-network codes and their decoders")]
struct Cli {
    /// Worker threads for sampling (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Base seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with default parameters; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code and write it as JSON.
    Build(Params),
    /// Tabulate n, k, rate and bit distances per layer.
    Analytics(Params),
    /// Estimate recovery curves over a grid of physical error rates.
    Sweep(Params),
    /// Locate crossings between curves of adjacent layer counts.
    Threshold(Params),
    /// Decode a single erasure pattern or Pauli error.
    Decode(Params),
}

/// Parameters shared by all commands. Every field is optional so a config
/// file can supply it; unset fields fall back to defaults.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    /// Polygon size of the tiling.
    #[arg(long = "p")]
    p: Option<usize>,
    /// Polygons meeting at each vertex.
    #[arg(long = "q")]
    q: Option<usize>,
    /// Layer counts (comma separated); `build` and `decode` use the first.
    #[arg(long, value_delimiter = ',')]
    layers: Option<Vec<usize>>,
    /// max-rate, zero-rate, constant-rate or constant-rate-every-second-beta.
    #[arg(long)]
    layout: Option<String>,
    /// Gauge basis X, Y or Z.
    #[arg(long)]
    gauge: Option<String>,
    /// Extra outer layers that are gauged and then discarded.
    #[arg(long)]
    extra_gauged_layers: Option<usize>,
    /// greedy, gaussian or integer.
    #[arg(long)]
    decoder: Option<String>,
    /// erasure, depolarizing, pure-x, pure-y or pure-z.
    #[arg(long)]
    noise: Option<String>,
    /// Explicit physical error rates (comma separated).
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    p_step: Option<f64>,
    /// Trials per weight indexed by layer count (comma separated).
    #[arg(long, value_delimiter = ',')]
    trials: Option<Vec<u64>>,
    /// Multiplier applied to the trials table.
    #[arg(long)]
    trials_scale: Option<f64>,
    /// Bulk qubits whose logical information must survive.
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<usize>>,
    /// Skip weights with negligible binomial mass.
    #[arg(long)]
    truncate: Option<bool>,
    /// Erased qubits for `decode`, as indices or a 0/1 mask.
    #[arg(long)]
    erasure: Option<String>,
    /// Pauli error for `decode`, e.g. `XIIZ`.
    #[arg(long)]
    error: Option<String>,
    /// Curve CSV files for `threshold`.
    #[arg(long, value_delimiter = ',')]
    input: Option<Vec<PathBuf>>,
    /// Output path (stdout when omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(skip)]
    seed: Option<u64>,
    #[arg(skip)]
    threads: Option<usize>,
}

macro_rules! merge_fields {
    ($hi:expr, $lo:expr; $($f:ident),*) => {
        Params { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl Params {
    fn over(self, lo: Params) -> Params {
        merge_fields!(self, lo; p, q, layers, layout, gauge, extra_gauged_layers, decoder,
            noise, p_grid, p_min, p_max, p_step, trials, trials_scale, targets, truncate,
            erasure, error, input, output, seed, threads)
    }
}

/// A failure carrying the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, err: e.into() }
}

fn compute_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, err: e.into() }
}

fn channel_err(e: ChannelError) -> Failure {
    let config = matches!(&e, ChannelError::Config(_))
        || matches!(&e, ChannelError::Context { source, .. } if matches!(**source, ChannelError::Config(_)));
    Failure { code: if config { 2 } else { 3 }, err: e.into() }
}

/// Fully resolved parameters, written into every output.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    command: &'static str,
    p: usize,
    q: usize,
    layers: Vec<usize>,
    layout: Layout,
    gauge: GaugeBasis,
    extra_gauged_layers: usize,
    decoder: DecoderKind,
    noise: NoiseKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<TrialsTable>,
    targets: Vec<usize>,
    truncate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    erasure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<Vec<PathBuf>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<PathBuf>,
    seed: u64,
    threads: Option<usize>,
}

fn parse<T: std::str::FromStr<Err = String>>(v: Option<String>, default: T) -> Result<T, Failure> {
    v.map_or(Ok(default), |s| s.parse().map_err(|e: String| config_err(anyhow!(e))))
}

impl RunConfig {
    fn resolve(command: &'static str, p: Params) -> Result<Self, Failure> {
        let noise = parse(p.noise, NoiseKind::Erasure)?;
        let default_decoder = if noise.is_pauli() { DecoderKind::Integer } else { DecoderKind::Gaussian };
        let p_grid = match p.p_grid {
            Some(g) => g,
            None => {
                let (lo, hi, step) = (p.p_min.unwrap_or(0.0), p.p_max.unwrap_or(0.6), p.p_step.unwrap_or(0.005));
                if step <= 0.0 || hi < lo {
                    return Err(config_err(anyhow!("bad rate range {lo}..{hi} step {step}")));
                }
                linear_grid(lo, hi, ((hi - lo) / step).round() as usize + 1)
            }
        };
        let mut trials = p.trials.map_or_else(TrialsTable::reference, TrialsTable);
        if let Some(s) = p.trials_scale {
            if s <= 0.0 {
                return Err(config_err(anyhow!("trials scale must be positive")));
            }
            trials = trials.scaled(s);
        }
        let default_layers = if command == "sweep" { vec![1, 2, 3] } else { vec![1] };
        let cfg = RunConfig {
            command,
            p: p.p.unwrap_or(5),
            q: p.q.unwrap_or(4),
            layers: p.layers.filter(|l| !l.is_empty()).unwrap_or(default_layers),
            layout: parse(p.layout, Layout::ZeroRate)?,
            gauge: parse(p.gauge, GaugeBasis::Z)?,
            extra_gauged_layers: p.extra_gauged_layers.unwrap_or(0),
            decoder: parse(p.decoder, default_decoder)?,
            noise,
            p_grid: (command == "sweep").then_some(p_grid),
            trials: (command == "sweep").then_some(trials),
            targets: p.targets.unwrap_or_else(|| vec![0]),
            truncate: p.truncate.unwrap_or(false),
            erasure: p.erasure,
            error: p.error,
            input: p.input,
            output: p.output,
            seed: p.seed.unwrap_or(0),
            threads: p.threads,
        };
        cfg.spec().validate().map_err(config_err)?;
        Ok(cfg)
    }

    fn spec(&self) -> GaugeSpec {
        GaugeSpec {
            layout: self.layout,
            basis: self.gauge,
            extra_gauged_layers: self.extra_gauged_layers,
        }
    }

    fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            tiling_p: self.p,
            tiling_q: self.q,
            layers: self.layers.clone(),
            layout: self.layout,
            gauge: self.gauge,
            extra_gauged_layers: self.extra_gauged_layers,
            decoder: self.decoder,
            kind: self.noise,
            p_grid: self.p_grid.clone().unwrap_or_default(),
            trials: self.trials.clone().unwrap_or_else(TrialsTable::reference),
            seed: self.seed,
            targets: self.targets.clone(),
            truncate: self.truncate,
        }
    }

    /// Code at the first layer count plus the tiling the greedy decoder
    /// walks (which includes any extra gauged layers).
    fn code(&self) -> Result<(StabilizerCode, TilingGraph), Failure> {
        let layers = self.layers[0];
        let g = build_tiling(self.p, self.q, layers).map_err(config_err)?;
        let code = build_evenbly_code(&g, &self.spec()).map_err(compute_err)?;
        let full = if self.extra_gauged_layers > 0 {
            build_tiling(self.p, self.q, layers + self.extra_gauged_layers).map_err(config_err)?
        } else {
            g
        };
        Ok((code, full))
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display())).map_err(compute_err)?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_json(path: &Option<PathBuf>, value: &impl Serialize) -> Result<(), Failure> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(compute_err)?;
    writeln!(out).and_then(|_| out.flush()).map_err(compute_err)
}

fn cmd_build(cfg: &RunConfig) -> Result<(), Failure> {
    let (code, _) = cfg.code()?;
    eprintln!(
        "n = {}, k = {}, stabilizer generators = {}",
        code.n,
        code.k(),
        code.stabilizers.rows().len()
    );
    #[derive(Serialize)]
    struct Out<'a> {
        config: &'a RunConfig,
        code: &'a StabilizerCode,
    }
    write_json(&cfg.output, &Out { config: cfg, code: &code })
}

#[derive(Serialize)]
struct AnalyticsRow {
    #[serde(rename = "L")]
    layer: usize,
    n: u128,
    k: u128,
    rate: f64,
    d_bit_x: Option<u128>,
    d_bit_z: Option<u128>,
}

fn cmd_analytics(cfg: &RunConfig) -> Result<(), Failure> {
    let l_max = *cfg.layers.iter().max().unwrap();
    build_tiling(cfg.p, cfg.q, 0).map_err(config_err)?;
    // The distance recursion describes the {5,4} inflation only.
    let distances = (cfg.p, cfg.q) == (5, 4);
    let mut w = csv::Writer::from_writer(open_output(&cfg.output)?);
    for r in rate_sequence(cfg.p, cfg.q, l_max) {
        w.serialize(AnalyticsRow {
            layer: r.layer,
            n: r.n,
            k: r.k,
            rate: r.rate,
            d_bit_x: distances.then(|| distance_weights(LogicalOp::X, r.layer).total()),
            d_bit_z: distances.then(|| distance_weights(LogicalOp::Z, r.layer).total()),
        })
        .map_err(compute_err)?;
    }
    w.flush().map_err(compute_err)?;
    if let Some(p) = &cfg.output {
        write_json(&Some(sidecar(p)), &serde_json::json!({ "config": cfg }))?;
    }
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig) -> Result<(), Failure> {
    let curves = sweep(&cfg.sweep_config()).map_err(channel_err)?;
    write_csv(&curves, open_output(&cfg.output)?).map_err(channel_err)?;
    let violations: u64 = curves.iter().map(|c| c.greedy_violations()).sum();
    for c in &curves {
        eprintln!(
            "L = {}: n = {}, k = {}, {} trials per weight",
            c.meta.layers, c.meta.n, c.meta.k, c.meta.trials_per_weight
        );
    }
    if let Some(p) = &cfg.output {
        let report = serde_json::json!({
            "config": cfg,
            "seed": cfg.seed,
            "greedy_violations": violations,
            "curves": curves.iter().map(|c| serde_json::json!({
                "meta": c.meta,
                "per_weight": c.per_weight,
            })).collect::<Vec<_>>(),
        });
        write_json(&Some(sidecar(p)), &report)?;
    }
    if violations > 0 {
        return Err(compute_err(anyhow!(
            "greedy decoding succeeded on {violations} erasures that the Gaussian decoder failed"
        )));
    }
    Ok(())
}

fn cmd_threshold(cfg: &RunConfig) -> Result<(), Failure> {
    let inputs = cfg
        .input
        .as_ref()
        .filter(|i| !i.is_empty())
        .ok_or_else(|| config_err(anyhow!("threshold needs --input")))?;
    let mut curves = Vec::new();
    for path in inputs {
        let f = File::open(path)
            .with_context(|| format!("opening {}", path.display()))
            .map_err(config_err)?;
        for (l, pts) in read_csv(f).map_err(|e| config_err(anyhow!("{}: {e}", path.display())))? {
            if curves.iter().any(|(m, _)| *m == l) {
                return Err(config_err(anyhow!("layer count {l} appears twice")));
            }
            curves.push((l, pts));
        }
    }
    curves.sort_by_key(|(l, _)| *l);
    if curves.len() < 2 {
        return Err(config_err(anyhow!("need curves for at least two layer counts")));
    }
    let results = adjacent_thresholds(&curves, cfg.seed).map_err(channel_err)?;
    write_json(&cfg.output, &serde_json::json!({ "config": cfg, "thresholds": results }))
}

fn cmd_decode(cfg: &RunConfig) -> Result<(), Failure> {
    let (code, graph) = cfg.code()?;
    let n = code.n;
    let outcome = match (&cfg.erasure, &cfg.error) {
        (Some(e), None) => {
            let pattern = ErasurePattern::parse(n, e).map_err(|e| config_err(anyhow!(e)))?;
            match cfg.decoder {
                DecoderKind::Greedy => {
                    let d = GreedyDecoder::new(&code, &graph).map_err(config_err)?;
                    let mut out = d.decode(&pattern, cfg.targets[0]).map_err(config_err)?;
                    for &t in &cfg.targets[1..] {
                        let o = d.decode(&pattern, t).map_err(config_err)?;
                        if !o.success {
                            out = o;
                        }
                    }
                    out
                }
                DecoderKind::Gaussian => ErasureDecoder::new(&code, &cfg.targets)
                    .and_then(|d| d.decode(&pattern))
                    .map_err(config_err)?,
                DecoderKind::Integer => {
                    return Err(config_err(anyhow!("the integer decoder takes --error, not --erasure")))
                }
            }
        }
        (None, Some(e)) => {
            if cfg.decoder != DecoderKind::Integer {
                return Err(config_err(anyhow!("Pauli errors need --decoder integer")));
            }
            let err: PauliString = e.parse().map_err(|e| config_err(anyhow!("{e}")))?;
            PauliDecoder::new(&code, &cfg.targets)
                .and_then(|d| d.decode(&err))
                .map_err(config_err)?
        }
        _ => return Err(config_err(anyhow!("give exactly one of --erasure and --error"))),
    };
    write_json(
        &cfg.output,
        &serde_json::json!({
            "config": cfg,
            "n": n,
            "success": outcome.success,
            "tie": outcome.tie,
            "correction": outcome.correction.map(|c| c.to_string()),
            "detail": outcome.detail,
        }),
    )
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, flags) = match cli.command {
        Command::Build(p) => ("build", p),
        Command::Analytics(p) => ("analytics", p),
        Command::Sweep(p) => ("sweep", p),
        Command::Threshold(p) => ("threshold", p),
        Command::Decode(p) => ("decode", p),
    };
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(config_err)?;
            serde_json::from_str::<Params>(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(config_err)?
        }
        None => Params::default(),
    };
    let flags = Params {
        seed: cli.seed,
        threads: cli.threads,
        ..flags
    };
    let cfg = RunConfig::resolve(name, flags.over(file))?;
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(config_err(anyhow!("--threads must be positive")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(compute_err)?;
    }
    match name {
        "build" => cmd_build(&cfg),
        "analytics" => cmd_analytics(&cfg),
        "sweep" => cmd_sweep(&cfg),
        "threshold" => cmd_threshold(&cfg),
        _ => cmd_decode(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
