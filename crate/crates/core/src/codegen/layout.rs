use std::collections::BTreeSet;

use super::{ConstantRateRule, Layout};
use crate::tiling::{TilingGraph, VertexType};

/// Bulk qubits a layout leaves ungauged.
pub fn kept_qubits(g: &TilingGraph, layout: Layout) -> BTreeSet<usize> {
    match layout {
        Layout::MaxRate => (0..g.k_bulk()).collect(),
        Layout::ZeroRate => BTreeSet::from([0]),
        Layout::ConstantRate(rule) => constant_rate_selection(g, rule),
    }
}

/// The central qubit plus a periodic subset of the β vertices of every
/// layer, counted in ring order: every fourth for
/// [`ConstantRateRule::HalfFilled`], every second for
/// [`ConstantRateRule::EverySecondBeta`].
pub fn constant_rate_selection(g: &TilingGraph, rule: ConstantRateRule) -> BTreeSet<usize> {
    let stride = match rule {
        ConstantRateRule::HalfFilled => 4,
        ConstantRateRule::EverySecondBeta => 2,
    };
    let mut keep = BTreeSet::from([0]);
    for layer in &g.layers[1..] {
        let betas = layer
            .iter()
            .copied()
            .filter(|&v| g.vertices[v].vtype == VertexType::Beta);
        keep.extend(betas.step_by(stride));
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::build_tiling;

    #[test]
    fn small_selections() {
        let g0 = build_tiling(5, 4, 0).unwrap();
        assert_eq!(constant_rate_selection(&g0, ConstantRateRule::HalfFilled), BTreeSet::from([0]));
        let g1 = build_tiling(5, 4, 1).unwrap();
        let keep = constant_rate_selection(&g1, ConstantRateRule::HalfFilled);
        assert_eq!(keep.len(), 3);
        assert!(keep.iter().skip(1).all(|&v| g1.vertices[v].vtype == VertexType::Beta));
        assert_eq!(constant_rate_selection(&g1, ConstantRateRule::EverySecondBeta).len(), 5);
    }

    #[test]
    fn kept_fraction_approaches_one_eighth() {
        let g = build_tiling(5, 4, 7).unwrap();
        let keep = constant_rate_selection(&g, ConstantRateRule::HalfFilled);
        let rate = keep.len() as f64 / g.n_physical() as f64;
        assert!((rate - 0.125).abs() < 2e-3, "{rate}");
    }
}
