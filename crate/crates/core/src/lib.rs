//! Photon-counting statistics of balanced homodyne detection.
//!
//! A signal state in the Fock basis is mixed with a coherent local
//! oscillator on a 50/50 beam splitter and photons are counted at both
//! output ports. The crate computes
//!
//! * the exact joint count distribution `P(2j, 2m)` through SU(2) Wigner
//!   d-functions at `π/2` ([`exact`]),
//! * the strong-oscillator quadrature POVM and the normally ordered
//!   correction series for finite oscillator strength ([`povm`]),
//! * the numerical kernels underneath both ([`special`]) and the signal
//!   state constructors ([`states`]).
//!
//! Half-integer quantum numbers never cross the public API: the photon sum
//! and difference are carried doubled, as `two_j = n1 + n2` and
//! `two_m = n1 - n2`.

pub mod error;
pub mod exact;
pub mod povm;
pub mod special;
pub mod states;

pub use error::{Error, Result};
pub use exact::{CountOutcome, HomodyneDistribution, WindowPolicy};
pub use special::LogWeight;
pub use states::{FockDensity, FockVector, LocalOscillator, Signal, SignalState};
