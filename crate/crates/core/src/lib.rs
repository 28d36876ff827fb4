//! Evenbly codes on hyperbolic tilings: construction, analytics, decoders and
//! Monte Carlo threshold estimation.

pub mod symplectic;
pub mod tiling;
pub mod analytics;
pub mod codegen;
pub mod decoders;
pub mod channels;
