//! Transpose depolarizing channels `Φ(μ) = t μᵀ + (1 − t) tr μ · I/d` and
//! numerical checks of their two-copy minimum output entropy.
//!
//! The crate is organised bottom-up:
//!
//! - [`channel`]: the channel itself, its `Φ±` decomposition and Kraus forms.
//! - [`spectrum`]: the two-copy output state on the Schmidt simplex and its
//!   spectrum, both in closed form (secular roots) and by dense diagonalization.
//! - [`entropy`]: entropy functionals, the `S₁ + S₂` split, minimum output
//!   entropy and the additivity gap.
//! - [`majorization`]: majorization, elementary symmetric polynomials, the
//!   `ν` transform and the Schur-concavity criterion.
//! - [`verification`]: scans of the polynomial inequalities that imply
//!   Schur-concavity, with deterministic parallel sampling.

pub mod channel;
pub mod density;
pub mod entropy;
pub mod error;
pub mod majorization;
pub mod optimize;
pub mod rng;
pub mod secular;
pub mod spectrum;
pub mod verification;

pub use channel::{kraus_set, Channel, Decomposition, KrausSet, Sign};
pub use density::{CMatrix, DensityMatrix, Tolerances};
pub use entropy::{EntropyReport, LogBase, OptimizerConfig};
pub use error::{Error, Result};
pub use majorization::NuVector;
pub use spectrum::{SchmidtVector, Spectrum};
pub use verification::{ScanConfig, ScanKind, ScanReport};
