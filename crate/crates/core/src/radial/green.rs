use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linop::SymOperator;

use super::grid::RadialGrid;

const SERIES_LIMIT: f64 = 30.0;

fn ln_double_factorial_odd(ell: u32) -> f64 {
    (1..=ell).map(|j| ((2 * j + 1) as f64).ln()).sum()
}

/// `e^{−x} φ_ℓ(x)` for the regular modified Riccati–Bessel function,
/// `φ_0 = sinh x`, `φ_1 = cosh x − sinh x / x`.
pub fn riccati_regular_scaled(ell: u32, x: f64) -> f64 {
    assert!(x > 0.0);
    let l = ell as f64;
    if x <= SERIES_LIMIT + 2.0 * l {
        let y = 0.5 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= y / (k * (2.0 * l + 2.0 * k + 1.0));
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        ((l + 1.0) * x.ln() - ln_double_factorial_odd(ell) + sum.ln() - x).exp()
    } else {
        let e2 = (-2.0 * x).exp();
        let mut prev = 0.5 * (1.0 - e2);
        if ell == 0 {
            return prev;
        }
        let mut cur = 0.5 * (1.0 + e2) - prev / x;
        for j in 1..ell {
            let next = prev - (2 * j + 1) as f64 / x * cur;
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// `e^{x} χ_ℓ(x)` for the decaying modified Riccati–Bessel function,
/// `χ_0 = e^{−x}`, `χ_1 = e^{−x}(1 + 1/x)`.
pub fn riccati_decaying_scaled(ell: u32, x: f64) -> f64 {
    assert!(x > 0.0);
    let mut prev = 1.0;
    if ell == 0 {
        return prev;
    }
    let mut cur = 1.0 + 1.0 / x;
    for j in 1..ell {
        let next = prev + (2 * j + 1) as f64 / x * cur;
        prev = cur;
        cur = next;
    }
    cur
}

/// Reduced free Green function of `−d²/dr² + ℓ(ℓ+1)/r² + κ²` on `(0, ∞)`,
/// `G = φ_ℓ(κr<) χ_ℓ(κr>)/κ`; at `κ = 0` it is `r<^{ℓ+1} r>^{−ℓ}/(2ℓ+1)`.
pub fn green_function(ell: u32, kappa: f64, r: f64, rp: f64) -> f64 {
    let (lo, hi) = if r <= rp { (r, rp) } else { (rp, r) };
    if lo <= 0.0 {
        return 0.0;
    }
    if kappa == 0.0 {
        let l = ell as f64;
        return lo.powf(l + 1.0) * hi.powf(-l) / (2.0 * l + 1.0);
    }
    riccati_regular_scaled(ell, kappa * lo) * riccati_decaying_scaled(ell, kappa * hi) * (-kappa * (hi - lo)).exp()
        / kappa
}

/// Dense matrix `G_ℓ(√ε; r_i, r_j)` on the grid nodes.
pub fn green_kernel(eps: f64, grid: &RadialGrid) -> Result<SymOperator> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("must be positive, got {eps}"),
        });
    }
    let kappa = eps.sqrt();
    let (r, _) = grid.nodes();
    let n = r.len();
    let m = DMatrix::from_fn(n, n, |i, j| green_function(grid.ell, kappa, r[i], r[j]));
    Ok(SymOperator::symmetrize_unchecked(m))
}

/// `e^{−κ|x−y|}/(4π|x−y|)`, the kernel of `(−Δ + κ²)^{−1}` in three dimensions.
pub fn free_green_3d(kappa: f64, distance: f64) -> f64 {
    (-kappa * distance).exp() / (4.0 * std::f64::consts::PI * distance)
}
