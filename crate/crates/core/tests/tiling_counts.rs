use evenbly_core::analytics::{counts, k_closed_form, n_closed_form, rate_sequence};
use evenbly_core::tiling::{
    build_tiling, build_tiling_with_cap, layer_counts_recursion, vertex_counts, Leg, TilingError,
    VertexType,
};

#[test]
fn small_layers_by_hand() {
    // η: (0,0,1) → (4,8,0) → (20,28,0) → (76,104,0); n = n_α + 2 n_β.
    let expected = [(4, 1), (20, 13), (76, 61), (284, 241)];
    for (l, &(n, k)) in expected.iter().enumerate() {
        let g = build_tiling(5, 4, l).unwrap();
        assert_eq!((g.n_physical(), g.k_bulk()), (n, k), "L = {l}");
    }
}

#[test]
fn graph_matches_recursion_and_closed_forms() {
    for l in 0..=8 {
        let g = build_tiling(5, 4, l).unwrap();
        g.validate().unwrap();
        let c = vertex_counts(&g);
        assert_eq!(c.per_layer, layer_counts_recursion(5, 4, l), "L = {l}");
        let (n, k) = counts(5, 4, l)[l];
        assert_eq!((c.n_physical as u128, c.k_bulk as u128), (n, k));
        assert_eq!(n_closed_form(l).round() as u128, n);
        assert_eq!(k_closed_form(l).round() as u128, k);
    }
}

#[test]
fn rate_approaches_the_limit() {
    let r = rate_sequence(5, 4, 8);
    assert!((r[8].rate - 3f64.sqrt() / 2.0).abs() < 1e-3);
    assert!(r.windows(2).all(|w| w[1].rate > w[0].rate));
}

#[test]
fn seed_layer_shape() {
    let g = build_tiling(5, 4, 0).unwrap();
    assert_eq!(g.vertices.len(), 1);
    assert_eq!(g.vertices[0].vtype, VertexType::Delta);
    assert!(g.vertices[0].legs[..4].iter().all(|l| matches!(l, Leg::Boundary { .. })));
}

#[test]
fn only_alpha_and_beta_after_the_seed() {
    let g = build_tiling(5, 4, 4).unwrap();
    let deltas = g.vertices.iter().filter(|v| v.vtype == VertexType::Delta).count();
    assert_eq!(deltas, 1);
}

#[test]
fn other_tilings_are_consistent() {
    for (p, q) in [(6, 4), (7, 4), (5, 6), (4, 6), (4, 8)] {
        for l in 0..=4 {
            let g = build_tiling(p, q, l).unwrap();
            g.validate().unwrap_or_else(|e| panic!("{{{p},{q}}} L = {l}: {e}"));
            let c = vertex_counts(&g);
            assert_eq!(c.per_layer, layer_counts_recursion(p, q, l));
            assert_eq!(counts(p, q, l)[l], (c.n_physical as u128, c.k_bulk as u128));
        }
    }
}

#[test]
fn rejected_parameters() {
    assert_eq!(build_tiling(4, 4, 1).unwrap_err(), TilingError::NotHyperbolic { p: 4, q: 4 });
    assert_eq!(build_tiling(5, 5, 1).unwrap_err(), TilingError::InvalidQ(5));
    assert!(matches!(build_tiling_with_cap(5, 4, 6, 1000), Err(TilingError::TooLarge { .. })));
}
