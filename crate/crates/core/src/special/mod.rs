//! Scalar kernels: log-factorials and Poisson weights, Hermite-Gaussians,
//! SU(2) Wigner d-functions at `π/2` and a dense rotation oracle for them.

mod factorial;
mod hermite;
mod log_weight;
mod oracle;
mod sum;
mod wigner;

pub use factorial::{log_binomial, log_factorial, log_poisson};
pub use hermite::{hermite_gaussian, hermite_gaussians, MAX_HERMITE_ORDER};
pub use log_weight::LogWeight;
pub use oracle::{wigner_d_oracle, ORACLE_MAX_TWO_J};
pub use sum::{ComplexNeumaier, Neumaier};
pub(crate) use wigner::check_indices;
pub use wigner::{
    set_seed_corruption, wigner_d_asymptotic, wigner_d_pi2, AsymptoticArgument, WignerDColumn,
};
