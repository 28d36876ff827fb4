use std::collections::BTreeSet;

use evenbly_core::analytics::{distance_weights, LogicalOp};
use evenbly_core::codegen::{
    build_evenbly_code, conjoin, push_logical, seed_code, EdgeGate, GaugeBasis, GaugeSpec, Layout,
};
use evenbly_core::symplectic::{Pauli, PauliString, SymplecticMatrix};
use evenbly_core::tiling::build_tiling;

#[test]
fn pushed_central_logicals_follow_the_weight_recursion() {
    for layers in 0..=3 {
        let g = build_tiling(5, 4, layers).unwrap();
        let code = build_evenbly_code(&g, &GaugeSpec::max_rate()).unwrap();
        for op in [LogicalOp::X, LogicalOp::Z] {
            let rep = push_logical(&code, 0, op).unwrap();
            let w = distance_weights(op, layers);
            assert_eq!(rep.weight() as u128, w.total(), "L={layers} {op:?}");
            let xs = (0..rep.n()).filter(|&q| rep.get(q) == Pauli::X).count();
            let zs = (0..rep.n()).filter(|&q| rep.get(q) == Pauli::Z).count();
            assert_eq!((xs as u128, zs as u128), (w.w_x, w.w_z));
        }
    }
}

#[test]
fn layer_zero_push_is_the_seed_logical() {
    let g = build_tiling(5, 4, 0).unwrap();
    let code = build_evenbly_code(&g, &GaugeSpec::max_rate()).unwrap();
    let x = push_logical(&code, 0, LogicalOp::X).unwrap();
    assert_eq!(x.weight(), 2);
    assert!(x.to_string() == "IXIX" || x.to_string() == "XIXI");
}

#[test]
fn zero_rate_x_gauge_keeps_weight_two() {
    for layers in 1..=3 {
        let g = build_tiling(5, 4, layers).unwrap();
        let code = build_evenbly_code(&g, &GaugeSpec::new(Layout::ZeroRate, GaugeBasis::X)).unwrap();
        for op in [LogicalOp::X, LogicalOp::Z] {
            assert_eq!(push_logical(&code, 0, op).unwrap().weight(), 2, "L={layers} {op:?}");
        }
    }
}

#[test]
fn every_bulk_qubit_can_be_pushed() {
    let g = build_tiling(5, 4, 2).unwrap();
    let code = build_evenbly_code(&g, &GaugeSpec::max_rate()).unwrap();
    for b in 0..g.k_bulk() {
        push_logical(&code, b, LogicalOp::X).unwrap();
        push_logical(&code, b, LogicalOp::Z).unwrap();
    }
}

#[test]
fn conjoin_order_does_not_matter() {
    let s = seed_code(4).unwrap().to_code(0);
    let ab = conjoin(&s, 1, &s, 2, EdgeGate::Hadamard).unwrap();
    let ba = conjoin(&s, 2, &s, 1, EdgeGate::Hadamard).unwrap();
    // ab qubits: a0 a2 a3 b0 b1 b3; ba qubits: b0 b1 b3 a0 a2 a3.
    let perm = [3, 4, 5, 0, 1, 2];
    let mapped: Vec<PauliString> = ba.stabilizers.rows().iter().map(|r| r.restrict(&perm)).collect();
    let mapped = SymplecticMatrix::new(6, mapped).unwrap();
    assert!(ab.stabilizers.same_row_space(&mapped));
}

#[test]
fn conjoined_z_logicals_live_on_one_side() {
    let s = seed_code(4).unwrap().to_code(0);
    let c = conjoin(&s, 3, &s, 0, EdgeGate::Hadamard).unwrap();
    // Qubits 0..3 belong to the first seed, 3..6 to the second.
    for (bulk, side) in [(0usize, [0usize, 1, 2]), (1, [3, 4, 5])] {
        let z = &c.logical(bulk).unwrap().z;
        let found = (0u32..1 << c.stabilizers.len()).any(|mask| {
            let mut p = z.clone();
            for (i, s) in c.stabilizers.rows().iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p.mul_assign_unsigned(s);
                }
            }
            p.support().iter().all(|q| side.contains(q))
        });
        assert!(found, "bulk {bulk}");
    }
}

#[test]
fn other_tilings_build() {
    for (p, q, layers, n) in [(6, 4, 2, 164), (5, 6, 1, 66), (5, 6, 2, 654)] {
        let g = build_tiling(p, q, layers).unwrap();
        assert_eq!(g.n_physical(), n);
        let (rn, rk) = evenbly_core::analytics::counts(p, q, layers)[layers];
        assert_eq!((g.n_physical() as u128, g.k_bulk() as u128), (rn, rk));
        let code = build_evenbly_code(&g, &GaugeSpec::new(Layout::ZeroRate, GaugeBasis::Z)).unwrap();
        assert_eq!(code.k(), 1);
    }
}

#[test]
fn larger_builds_satisfy_invariants() {
    let g = build_tiling(5, 4, 3).unwrap();
    for spec in [
        GaugeSpec::max_rate(),
        GaugeSpec::new(Layout::ZeroRate, GaugeBasis::Y),
        GaugeSpec::new(Layout::ConstantRate(evenbly_core::codegen::ConstantRateRule::HalfFilled), GaugeBasis::Z),
    ] {
        let code = build_evenbly_code(&g, &spec).unwrap();
        assert_eq!(code.n, 284);
        let kept = evenbly_core::codegen::kept_qubits(&g, spec.layout);
        let ids: BTreeSet<usize> = code.bulk_qubit_map().into_iter().collect();
        assert_eq!(ids, kept);
    }
}
