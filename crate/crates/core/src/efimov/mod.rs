//! Three identical bosons with a rank-one separable pair force.
//!
//! At the unitary coupling the pair has a zero-energy resonance and the
//! trimer energies accumulate at zero with a fixed ratio.

mod jacobi;
mod kernel;
mod s0;
mod separable;
mod spectrum;

pub use jacobi::{jacobi_pair_coeffs, JacobiCoeffs};
pub use kernel::three_boson_kernel;
pub use s0::{efimov_residual, s0_oracle, S0_BRACKET};
pub use separable::{
    lambda_unitary, lambda_unitary_integral, pair_bubble, two_body_count, MomentumMap, SeparableModel,
    MIN_MOMENTUM_POINTS,
};
pub use spectrum::{
    cutoff_stability, efimov_spectrum, level_ratios, trimer_count, trimer_levels, CutoffComparison, EfimovSpectrum,
    ScanOptions,
};
