use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::integrate;

use super::grid::{OuterBoundary, RadialGrid};
use super::hamiltonian::reduced_tridiagonal;
use super::potential::PotentialSpec;

/// Largest partial wave examined by [`schwinger_bound_check`].
pub const ELL_MAX: u32 = 25;

const INNER_TOL: f64 = 1e-11;
const OUTER_TOL: f64 = 1e-9;

/// Angular reduction `r r'·∫ dΩ dΩ' |x − y|^{−s}/(8π²)` with `s = 2 − 8γ`.
fn angular(gamma: f64, r: f64, rp: f64) -> f64 {
    let plus = r + rp;
    let minus = (r - rp).abs();
    if gamma == 0.0 {
        (plus / minus).ln()
    } else {
        let q = 8.0 * gamma;
        (plus.powf(q) - minus.powf(q)) / q
    }
}

fn segments(lo: f64, hi: f64, breaks: &[f64]) -> Vec<(f64, f64)> {
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    pts.push(hi);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn norm_squared(pot: &PotentialSpec, gamma: f64, r_cut: f64) -> Result<f64> {
    let breaks = pot.breakpoints();
    let rv = |r: f64| r * pot.v_minus(r);
    let inner = |r: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (a, b) in segments(0.0, r, &breaks) {
            acc += integrate(|rp| rv(rp) * angular(gamma, r, rp), a, b, 1e-300, INNER_TOL)?;
        }
        Ok(acc)
    };
    let mut total = 0.0;
    for (a, b) in segments(0.0, r_cut, &breaks) {
        let failure = std::cell::RefCell::new(None);
        let piece = integrate(
            |r| {
                let w = rv(r);
                if w == 0.0 {
                    return 0.0;
                }
                match inner(r) {
                    Ok(v) => w * v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            a,
            b,
            1e-300,
            OUTER_TOL,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        total += piece?;
    }
    Ok(16.0 * PI * PI * total)
}

/// `[∫∫ v₋(x) v₋(y) |x − y|^{−(2−8γ)} d³x d³y]^{1/2}` for `γ ∈ [0, 1/8)`.
///
/// The angular integrals are done in closed form; the radial double integral
/// is split on the diagonal and at the potential's breakpoints.
pub fn rollnik_norm(pot: &PotentialSpec, gamma: f64) -> Result<f64> {
    if !(0.0..0.125).contains(&gamma) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must lie in [0, 1/8), got {gamma}"),
        });
    }
    if pot.strength() == 0.0 && !pot.has_repulsion() {
        return Ok(0.0);
    }
    let compact = pot.attractive.support().is_some();
    let r_cut = pot.attractive.effective_extent();
    let full = norm_squared(pot, gamma, r_cut)?;
    if !compact && full > 0.0 {
        let half = norm_squared(pot, gamma, 0.5 * r_cut)?;
        let tail = full - half;
        if tail > 1e-3 * full {
            return Err(Error::Quadrature(format!(
                "tail estimate {tail:e} exceeds 1e-3 of the accumulated value {full:e}"
            )));
        }
    }
    Ok(full.max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchwingerReport {
    /// Bound states below zero at `ℓ = 0, 1, …` up to the first empty wave.
    pub counts: Vec<usize>,
    /// `Σ (2ℓ + 1)·counts[ℓ]`.
    pub count_total: usize,
    pub rollnik: f64,
    /// `(4π)^{−2}·rollnik²`.
    pub bound: f64,
}

impl SchwingerReport {
    pub fn holds(&self) -> bool {
        self.count_total as f64 <= self.bound
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.count_total as f64
    }
}

/// Compares the three-dimensional bound-state count with `(4π)^{−2}‖v₋‖²_R`.
///
/// Partial waves are counted on `grid` with the zero-energy matched outer
/// boundary, from `ℓ = 0` up to the first wave without negative eigenvalues.
pub fn schwinger_bound_check(pot: &PotentialSpec, grid: &RadialGrid) -> Result<SchwingerReport> {
    if pot.strength() <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "potential",
            reason: "attractive part vanishes".into(),
        });
    }
    let base = grid.with_outer(OuterBoundary::ZeroEnergyMatched);
    let mut counts = Vec::new();
    for ell in 0..=ELL_MAX {
        let c = reduced_tridiagonal(pot, &base.with_ell(ell))?.count_negative();
        counts.push(c);
        if c == 0 {
            break;
        }
        if ell == ELL_MAX {
            return Err(Error::PartialWaveCutoff { ell: ell as usize });
        }
    }
    let count_total = counts.iter().enumerate().map(|(l, c)| (2 * l + 1) * c).sum();
    let rollnik = rollnik_norm(pot, 0.0)?;
    Ok(SchwingerReport {
        counts,
        count_total,
        rollnik,
        bound: rollnik * rollnik / (16.0 * PI * PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_well_closed_form() {
        // For a ball of radius a, ∫∫ d³x d³y/|x−y|² = 4π²a⁴.
        let a = 1.3;
        let pot = PotentialSpec::square_well(1.0, a).unwrap();
        let n = rollnik_norm(&pot, 0.0).unwrap();
        assert!((n * n / (4.0 * PI * PI * a.powi(4)) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn bilinear_in_strength() {
        let one = rollnik_norm(&PotentialSpec::yukawa(1.0, 1.0).unwrap(), 0.0).unwrap();
        let three = rollnik_norm(&PotentialSpec::yukawa(3.0, 1.0).unwrap(), 0.0).unwrap();
        assert!((three / one - 3.0).abs() < 1e-8);
        assert_eq!(
            rollnik_norm(&PotentialSpec::yukawa(0.0, 1.0).unwrap(), 0.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn gamma_out_of_range() {
        let pot = PotentialSpec::yukawa(1.0, 1.0).unwrap();
        assert!(rollnik_norm(&pot, 0.125).is_err());
        assert!(rollnik_norm(&pot, -0.01).is_err());
        assert!(rollnik_norm(&pot, 0.1).unwrap() > 0.0);
    }

    #[test]
    fn subcritical_well_has_no_states() {
        let pot = PotentialSpec::square_well(2.0, 1.0).unwrap();
        let grid = RadialGrid::new(0, 10.0, 400).unwrap();
        let r = schwinger_bound_check(&pot, &grid).unwrap();
        assert_eq!(r.count_total, 0);
        assert!(r.holds());
    }
}
