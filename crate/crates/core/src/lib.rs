//! Resonances of finitely perturbed discrete-time quantum walks on the integer line.
//!
//! A walk is fixed by a [`CoinSequence`]: unitary 2×2 coins on the sites `0..=n0`
//! and the identity everywhere else. From it this crate computes
//!
//! - exact time evolution and the compressed evolution matrix `K` ([`walk`]),
//! - local and global transfer matrices and the transfer polynomial ([`transfer`]),
//! - Jost solutions and the scattering matrix, including its continuation into
//!   the lower half plane ([`scattering`]),
//! - resonances, their multiplicities and Jordan chains of resonant states
//!   ([`resonances`]),
//! - resonance expansions of the time evolution and survival decay fits ([`expansion`]),
//! - the outgoing resolvent ([`resolvent`]),
//! - coin perturbation families that split multiple resonances ([`genericity`]).
//!
//! All states are finitely supported, or evaluated on explicit finite windows.

pub mod coins;
pub mod config;
pub mod error;
pub mod expansion;
pub mod genericity;
pub mod linalg;
pub mod random;
pub mod resolvent;
pub mod resonances;
pub mod roots;
pub mod scattering;
pub mod selftest;
pub mod states;
pub mod transfer;
pub mod walk;

pub use num_complex::Complex64 as C64;

pub use coins::{Coin, CoinSequence, PQTheta};
pub use error::{Error, Result};
pub use expansion::{DecayFit, ExpansionData};
pub use resonances::{JordanChainStates, Resonance};
pub use scattering::ScatteringMatrix;
pub use states::{Chirality, Decomposition, WaveState};
pub use transfer::TransferPolynomial;
pub use walk::KMatrix;

/// `i`, the imaginary unit.
pub(crate) const I: C64 = C64::new(0.0, 1.0);
