//! Beam selection for beamspace mmWave massive MIMO.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Gram matrices and a reference
//!   Hermitian eigensolver.
//! - [`rankone`]: eigensystem downdates/updates for a rank-one change of a
//!   Gram matrix, solved through the secular equation.
//! - [`channel`]: clustered geometric channels and the DFT lens codebook.
//! - [`selection`]: SVD-based beam selection (simplified, decremental,
//!   incremental), baselines and an exhaustive oracle.
//! - [`precode`]: zero-forcing and SVD precoders, SINR and sum-rate.
//! - [`sim`]: configuration, Monte Carlo sweeps and CSV output.
//!
//! Operation counts are tracked through an explicit [`OpCounter`] so the
//! complexity of the fast and naive paths can be compared without timing.

pub mod channel;
pub mod linalg;
mod ops;
pub mod precode;
pub mod rankone;
pub mod selection;
pub mod sim;

pub use num_complex::Complex64 as C64;
pub use ops::OpCounter;
