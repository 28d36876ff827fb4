use evenbly_core::channels::{
    estimate_threshold, read_csv, recombine, sample_direct, sample_per_weight, sweep_with_threads,
    write_csv, CurvePoint, NoiseKind, NoiseModel, SweepConfig, ThresholdResult, TrialDecoder,
    TrialsTable, WeightStat,
};
use evenbly_core::codegen::{build_evenbly_code, seed_code, GaugeBasis, GaugeSpec, Layout};
use evenbly_core::decoders::DecoderKind;
use evenbly_core::tiling::build_tiling;
use proptest::prelude::*;

fn table(values: &[f64]) -> Vec<WeightStat> {
    values
        .iter()
        .enumerate()
        .map(|(w, &v)| WeightStat {
            w,
            trials: 1000,
            successes: (v * 1000.0).round() as u64,
            ties: 0,
            greedy_violations: 0,
            bound: None,
            exact: false,
        })
        .collect()
}

#[test]
fn recombine_edge_cases() {
    let ones = table(&[1.0; 9]);
    for p in [0.0, 0.2, 0.7, 1.0] {
        assert!((recombine(&ones, p).0 - 1.0).abs() < 1e-12);
    }
    let t = table(&[0.9, 0.5, 0.25, 0.0]);
    assert_eq!(recombine(&t, 0.0).0, 0.9);
    assert_eq!(recombine(&t, 1.0).0, 0.0);
}

proptest! {
    #[test]
    fn recombine_is_monotone_for_monotone_tables(
        mut steps in proptest::collection::vec(0.0f64..1.0, 1..30),
        p in 0.0f64..0.99,
        dp in 0.0f64..0.01,
    ) {
        steps.sort_by(|a, b| b.total_cmp(a));
        let t = table(&steps);
        let (a, sa) = recombine(&t, p);
        let (b, _) = recombine(&t, p + dp);
        prop_assert!(b <= a + 1e-12);
        prop_assert!((0.0..=1.0).contains(&a) && sa >= 0.0);
    }
}

#[test]
fn seed_code_per_weight_and_direct_sampling_agree() {
    let code = seed_code(4).unwrap().to_code(0);
    let dec = TrialDecoder::new(&code, None, DecoderKind::Gaussian, &[0]).unwrap();
    let per_weight: Vec<_> = (0..=4)
        .map(|w| sample_per_weight(&dec, NoiseKind::Erasure, 4, w, 500, 9, 0).unwrap())
        .collect();
    for p in [0.1, 0.3, 0.5] {
        let (exact, _) = recombine(&per_weight, p);
        let closed = (1f64 - p).powi(4) + 4.0 * p * (1f64 - p).powi(3);
        assert!((exact - closed).abs() < 1e-12);
        let (direct, se) =
            sample_direct(&dec, NoiseModel::new(NoiseKind::Erasure, p).unwrap(), 4, 20_000, 3).unwrap();
        assert!((direct - closed).abs() < 4.0 * se.max(1e-3), "p = {p}: {direct} vs {closed}");
    }
}

#[test]
fn direct_sampling_cross_check_on_twenty_qubits() {
    let g = build_tiling(5, 4, 1).unwrap();
    let code = build_evenbly_code(&g, &GaugeSpec::new(Layout::ZeroRate, GaugeBasis::Z)).unwrap();
    let dec = TrialDecoder::new(&code, Some(&g), DecoderKind::Gaussian, &[0]).unwrap();
    let per_weight: Vec<_> = (0..=20)
        .map(|w| sample_per_weight(&dec, NoiseKind::Erasure, 20, w, 2000, 4, 1).unwrap())
        .collect();
    for p in [0.2, 0.4] {
        let (mixed, se_mixed) = recombine(&per_weight, p);
        let (direct, se) =
            sample_direct(&dec, NoiseModel::new(NoiseKind::Erasure, p).unwrap(), 20, 20_000, 8).unwrap();
        let sigma = se.hypot(se_mixed);
        assert!((mixed - direct).abs() < 4.0 * sigma, "p = {p}: {mixed} vs {direct} (σ {sigma})");
    }
}

fn small_config() -> SweepConfig {
    SweepConfig {
        trials: TrialsTable(vec![300, 300, 100]),
        seed: 99,
        p_grid: (0..=12).map(|i| i as f64 * 0.05).collect(),
        ..SweepConfig::erasure(vec![0, 1, 2], GaugeBasis::Y)
    }
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let mut outputs = Vec::new();
    for threads in [1, 3, 8] {
        let curves = sweep_with_threads(&small_config(), threads).unwrap();
        let mut buf = Vec::new();
        write_csv(&curves, &mut buf).unwrap();
        outputs.push(buf);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn csv_round_trip_and_header() {
    let curves = sweep_with_threads(&small_config(), 2).unwrap();
    let mut buf = Vec::new();
    write_csv(&curves, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "decoder,kind,gauge,layout,L,n,k,p_phys,p_rec,std_err,trials"
    );
    let back = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), 3);
    for ((l, pts), c) in back.iter().zip(&curves) {
        assert_eq!(*l, c.meta.layers);
        assert_eq!(pts, &c.points);
    }
}

#[test]
fn curves_satisfy_their_invariants() {
    let mut cfg = small_config();
    cfg.decoder = DecoderKind::Greedy;
    for c in sweep_with_threads(&cfg, 4).unwrap() {
        assert_eq!(c.greedy_violations(), 0);
        assert!(c.points.windows(2).all(|w| w[0].p_phys < w[1].p_phys));
        for pt in &c.points {
            assert!((0.0..=1.0).contains(&pt.p_rec) && pt.std_err >= 0.0);
        }
        assert_eq!(c.per_weight.len(), c.meta.n + 1);
        assert_eq!(c.per_weight[0].p_rec(), 1.0);
        assert_eq!(c.per_weight[c.meta.n].p_rec(), 0.0);
    }
}

#[test]
fn truncation_keeps_the_curve() {
    let mut cfg = small_config();
    cfg.p_grid = vec![0.01, 0.02, 0.03];
    let full = sweep_with_threads(&cfg, 2).unwrap();
    cfg.truncate = true;
    let cut = sweep_with_threads(&cfg, 2).unwrap();
    let skipped = cut[2].per_weight.iter().filter(|s| s.trials == 0).count();
    assert!(skipped > 0);
    for (a, b) in full.iter().zip(&cut) {
        for (x, y) in a.points.iter().zip(&b.points) {
            assert!((x.p_rec - y.p_rec).abs() < 1e-6);
        }
    }
}

#[test]
fn config_errors() {
    let mut cfg = small_config();
    cfg.kind = NoiseKind::Depolarizing;
    assert!(cfg.validate().is_err());
    let mut cfg = small_config();
    cfg.p_grid = vec![0.3, 0.2];
    assert!(cfg.validate().is_err());
}

fn line(ps: &[f64], a: f64, b: f64, se: f64) -> Vec<CurvePoint> {
    ps.iter()
        .map(|&p| CurvePoint { p_phys: p, p_rec: a + b * p, std_err: se })
        .collect()
}

#[test]
fn synthetic_thresholds() {
    let ps: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    // 0.9 - 0.5p and 1.1 - p meet at p = 0.4.
    let a = line(&ps, 0.9, -0.5, 0.0);
    let b = line(&ps, 1.1, -1.0, 0.0);
    let r = estimate_threshold(&a, &b, "L1/L2", 1).unwrap();
    let est = r.estimate().unwrap();
    assert!((est.p_threshold - 0.4).abs() < 1e-12);
    assert!(est.uncertainty > 0.0);

    let noisy_a = line(&ps, 0.9, -0.5, 0.01);
    let noisy_b = line(&ps, 1.1, -1.0, 0.01);
    let est = estimate_threshold(&noisy_a, &noisy_b, "L1/L2", 1).unwrap();
    let est = est.estimate().unwrap();
    assert!((est.p_threshold - 0.4).abs() < 1e-12);
    assert!(est.uncertainty > 0.001 && est.uncertainty < 0.05);

    assert!(matches!(estimate_threshold(&a, &a, "L1/L1", 1).unwrap(), ThresholdResult::NoThreshold { .. }));
    let worse = line(&ps, 0.8, -0.6, 0.0);
    assert!(matches!(estimate_threshold(&a, &worse, "L1/L2", 1).unwrap(), ThresholdResult::NoThreshold { .. }));
    assert!(estimate_threshold(&a, &b[1..], "L1/L2", 1).is_err());
}
