//! Exact rate and distance scaling from the inflation recursion.

use serde::{Deserialize, Serialize};

use crate::tiling::{layer_counts_recursion, substitution_matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub layer: usize,
    pub n: u128,
    pub k: u128,
    pub rate: f64,
    pub asymptotic_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalOp {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightVector {
    pub layer: usize,
    pub w_x: u128,
    pub w_z: u128,
}

impl WeightVector {
    pub fn total(&self) -> u128 {
        self.w_x + self.w_z
    }
}

/// `(n, k)` per layer `0..=l_max` from the integer recursion.
pub fn counts(p: usize, q: usize, l_max: usize) -> Vec<(u128, u128)> {
    let eta = layer_counts_recursion(p, q, l_max);
    let q = q as u128;
    let mut k = 0u128;
    eta.iter()
        .map(|e| {
            k += e.iter().sum::<u128>();
            let n = e[0] * (q - 3) + e[1] * (q - 2) + e[2] * q;
            (n, k)
        })
        .collect()
}

pub fn rate_sequence(p: usize, q: usize, l_max: usize) -> Vec<RateReport> {
    let asymptotic = asymptotic_rate(p, q);
    counts(p, q, l_max)
        .into_iter()
        .enumerate()
        .map(|(layer, (n, k))| RateReport {
            layer,
            n,
            k,
            rate: k as f64 / n as f64,
            asymptotic_rate: asymptotic,
        })
        .collect()
}

/// Dominant eigenvalue and eigenvector `(u_α, u_β)` of the α/β block.
fn dominant_mode(p: usize, q: usize) -> (f64, f64, f64) {
    let m = substitution_matrix(p, q);
    let (a, b, c, d) = (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
    let tr = a + d;
    let det = a * d - b * c;
    let lambda = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
    // (a - λ) u_α + b u_β = 0
    (lambda, b, lambda - a)
}

/// `lim k/n` of the ungauged code.
pub fn asymptotic_rate(p: usize, q: usize) -> f64 {
    let (lambda, ua, ub) = dominant_mode(p, q);
    let qf = q as f64;
    let bulk = (ua + ub) * lambda / (lambda - 1.0);
    bulk / ((qf - 3.0) * ua + (qf - 2.0) * ub)
}

/// Limiting fraction `Σ_ℓ n_β^{(ℓ)} / n^{(L)}`.
pub fn beta_fraction_limit(p: usize, q: usize) -> f64 {
    let (lambda, ua, ub) = dominant_mode(p, q);
    let qf = q as f64;
    ub * lambda / (lambda - 1.0) / ((qf - 3.0) * ua + (qf - 2.0) * ub)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Best approximation with denominator at most `max_den` via continued
    /// fractions; `None` if it is further than `tol` from `x`.
    pub fn approximate(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
        let (mut h0, mut h1, mut k0, mut k1) = (0u64, 1u64, 1u64, 0u64);
        let mut r = x;
        loop {
            let a = r.floor();
            let (h2, k2) = (a as u64 * h1 + h0, a as u64 * k1 + k0);
            if k2 > max_den {
                break;
            }
            (h0, h1, k0, k1) = (h1, h2, k1, k2);
            let frac = r - a;
            if ((h1 as f64 / k1 as f64) - x).abs() < tol || frac < 1e-15 {
                break;
            }
            r = 1.0 / frac;
        }
        let out = Rational { num: h1, den: k1.max(1) };
        ((out.value() - x).abs() < tol).then_some(out)
    }
}

/// Rate with every second β vertex kept ungauged.
pub fn every_second_beta_rate(p: usize, q: usize) -> f64 {
    beta_fraction_limit(p, q) / 2.0
}

/// Asymptotic rate of the half-filled constant-rate layout, which keeps
/// half of the every-second-β qubits.
pub fn constant_rate(p: usize, q: usize) -> Rational {
    let x = every_second_beta_rate(p, q) / 2.0;
    Rational::approximate(x, 1 << 20, 1e-9).unwrap_or(Rational {
        num: (x * 1e9).round() as u64,
        den: 1_000_000_000,
    })
}

/// Counts of X and Z factors of the boundary representative of the central
/// logical after `layer` inflation steps.
pub fn distance_weights(op: LogicalOp, layer: usize) -> WeightVector {
    let (mut w_x, mut w_z) = match op {
        LogicalOp::X => (2u128, 0u128),
        LogicalOp::Z => (0, 2),
    };
    for _ in 0..layer {
        // X ↦ Z, Z ↦ ZXZ
        (w_x, w_z) = (w_z, w_x + 2 * w_z);
    }
    WeightVector { layer, w_x, w_z }
}

/// `(2√3+2) λ₁^L − (2√3−2) λ₂^L` for {5,4}.
pub fn n_closed_form(layer: usize) -> f64 {
    let s3 = 3f64.sqrt();
    let (l1, l2) = (2.0 + s3, 2.0 - s3);
    (2.0 * s3 + 2.0) * l1.powi(layer as i32) - (2.0 * s3 - 2.0) * l2.powi(layer as i32)
}

/// Closed form of the bulk qubit count for {5,4}.
pub fn k_closed_form(layer: usize) -> f64 {
    let s3 = 3f64.sqrt();
    let l2 = 2.0 - s3;
    let l = layer as i32;
    1.0 + 2.0 * s3 * (l2.powi(l + 1) + l2.powi(-l) + s3 - 3.0) / (s3 - 1.0)
}

/// `(1+√2)^L + (1−√2)^L`.
pub fn dbit_closed_form(layer: usize) -> f64 {
    let s2 = 2f64.sqrt();
    (1.0 + s2).powi(layer as i32) + (1.0 - s2).powi(layer as i32)
}

/// `log_{2+√3}(1+√2)`, the exponent in `d_bit ~ n^a`.
pub fn distance_exponent() -> f64 {
    (1.0 + 2f64.sqrt()).ln() / (2.0 + 3f64.sqrt()).ln()
}
