//! Numerical laboratory for α-GAN: the Rényi-order value function, exact
//! saddle-point checks on finite alphabets, gradient analysis, a small
//! hand-written MLP and the alternating training loop built on top of it.

pub mod error;
pub mod renyi;

pub use error::{AganError, Result};
pub use renyi::{AlphaOrder, FiniteDistribution, PairedSampleWeights, Regime, SoftDecision};
pub mod grad;
pub mod nn;
pub mod report;
pub mod saddle;
pub mod train;
