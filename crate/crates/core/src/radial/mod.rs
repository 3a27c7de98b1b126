//! Two-body experiments in a single partial wave.
//!
//! Units are `ħ = 2m = 1`, so the radial Hamiltonian is
//! `−d²/dr² + ℓ(ℓ+1)/r² + v(r)` acting on `u(r) = r ψ(r)`.

mod critical;
mod green;
mod grid;
mod hamiltonian;
mod kernel;
mod potential;
mod resolvent;
mod rollnik;
mod scaling;

pub use critical::{find_critical_coupling_radial, nystrom_critical_strength};
pub use green::{free_green_3d, green_function, green_kernel, riccati_decaying_scaled, riccati_regular_scaled};
pub use grid::{OuterBoundary, RadialGrid, Scheme, MIN_POINTS};
pub use hamiltonian::{count_radial_bound_states, reduced_hamiltonian, reduced_tridiagonal, Tridiagonal};
pub use kernel::{
    bs_kernel_radial, bs_kernel_radial_factored, mu_radial, nystrom_kernel, radial_counts, weighted_free_operator,
    RadialCounts,
};
pub use potential::{PotentialSpec, ShapeKind, Term};
pub use resolvent::{resolvent_power_kernel, ResolventKernel};
pub use rollnik::{rollnik_norm, schwinger_bound_check, SchwingerReport, ELL_MAX};
pub use scaling::{log_spaced, mu_scan, tune_to_criticality, MuScalingReport, CRITICALITY_TOL, DEFAULT_WINDOW};
