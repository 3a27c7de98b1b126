use crate::bsengine::{CriticalCouplingResult, LAMBDA_MAX};
use crate::error::{Error, Result};

use super::grid::RadialGrid;
use super::hamiltonian::reduced_tridiagonal;
use super::kernel::nystrom_kernel;
use super::potential::PotentialSpec;

fn binds(shape: &PotentialSpec, grid: &RadialGrid, lambda: f64) -> Result<bool> {
    Ok(reduced_tridiagonal(&shape.with_strength(lambda), grid)?.count_negative() > 0)
}

fn bisect(shape: &PotentialSpec, grid: &RadialGrid, tol: f64) -> Result<CriticalCouplingResult> {
    let mut iterations = 0;
    let (mut lo, mut hi) = if binds(shape, grid, 1.0)? {
        (0.0, 1.0)
    } else {
        let mut lo = 1.0;
        let mut hi = 2.0;
        loop {
            iterations += 1;
            if hi > LAMBDA_MAX {
                return Err(Error::NeverBinds { lambda_max: LAMBDA_MAX });
            }
            if binds(shape, grid, hi)? {
                break (lo, hi);
            }
            lo = hi;
            hi *= 2.0;
        }
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binds(shape, grid, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let lambda_star = 0.5 * (lo + hi);
    let h = reduced_tridiagonal(&shape.with_strength(lambda_star), grid)?;
    Ok(CriticalCouplingResult {
        lambda_star,
        bracket: (lo, hi),
        iterations,
        residual_min_eig: h.lowest_eigenvalue(),
    })
}

/// Coupling `λ*` at which `−d²/dr² + ℓ(ℓ+1)/r² − λ·shape` first binds.
///
/// Bisects on the grid and on its refinement to brackets of width `tol/8`;
/// the two thresholds must agree within `tol/2`. The refined result is returned.
pub fn find_critical_coupling_radial(
    shape: &PotentialSpec,
    grid: &RadialGrid,
    tol: f64,
) -> Result<CriticalCouplingResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    if grid.nodes().0.iter().all(|&r| shape.attractive.shape(r) <= 0.0) {
        return Err(Error::InvalidParameter {
            name: "potential",
            reason: "attractive shape vanishes".into(),
        });
    }
    let coarse = bisect(shape, grid, tol / 8.0)?;
    let fine = bisect(shape, &grid.refined(), tol / 8.0)?;
    if (coarse.lambda_star - fine.lambda_star).abs() > tol / 2.0 {
        return Err(Error::GridNotConverged {
            coarse: coarse.lambda_star,
            fine: fine.lambda_star,
        });
    }
    log::debug!(
        "critical coupling: n={} λ*={} n={} λ*={}",
        grid.n,
        coarse.lambda_star,
        2 * grid.n,
        fine.lambda_star
    );
    Ok(fine)
}

/// `λ* = 1/μ_top(K(0))` for the Nyström discretization of a unit-strength shape.
pub fn nystrom_critical_strength(shape: &PotentialSpec, grid: &RadialGrid) -> Result<f64> {
    let k = nystrom_kernel(&shape.with_strength(1.0), grid, 0.0)?;
    let mu = k.max_eigenvalue();
    if !(mu > 0.0) {
        return Err(Error::NeverBinds {
            lambda_max: f64::INFINITY,
        });
    }
    Ok(1.0 / mu)
}
