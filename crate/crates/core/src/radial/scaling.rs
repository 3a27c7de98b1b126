use crate::error::{Error, Result};

use super::grid::{RadialGrid, Scheme};
use super::kernel::nystrom_kernel;
use super::potential::PotentialSpec;

/// Tolerance on `|μ(0) − 1|` for a potential to count as critical.
pub const CRITICALITY_TOL: f64 = 1e-8;

/// Default fit window for `ln(1 − μ)` against `ln ε`.
pub const DEFAULT_WINDOW: (f64, f64) = (1e-6, 1e-4);

#[derive(Debug, Clone, PartialEq)]
pub struct MuScalingReport {
    pub epsilons: Vec<f64>,
    pub mus: Vec<f64>,
    /// Slope of `ln(1 − μ)` against `ln ε` inside the window.
    pub fitted_exponent: f64,
    pub fit_window: (f64, f64),
    /// `a_μ` in `1 − μ(ε) ≈ a_μ ε^p`.
    pub a_mu_estimate: f64,
    /// `μ(0)` on the same discretization.
    pub mu_zero: f64,
}

/// `ε` values log-spaced over `[lo, hi]`, ascending.
pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Same potential with the attractive strength set so that `μ(0) = 1` on the
/// Nyström discretization of `grid`.
pub fn tune_to_criticality(shape: &PotentialSpec, grid: &RadialGrid) -> Result<PotentialSpec> {
    let lambda = super::critical::nystrom_critical_strength(shape, grid)?;
    Ok(shape.with_strength(lambda))
}

fn top_mu(pot: &PotentialSpec, grid: &RadialGrid, eps: f64) -> Result<f64> {
    Ok(nystrom_kernel(pot, grid, eps)?.max_eigenvalue())
}

/// `μ(ε)` over ascending `eps_list` for a potential tuned to criticality, with
/// a least-squares fit of `ln(1 − μ)` against `ln ε` on `window`.
///
/// Runs on the Nyström kernel, so `grid` must use the Gauss–Legendre scheme
/// and cover the support of the potential.
pub fn mu_scan(
    pot: &PotentialSpec,
    grid: &RadialGrid,
    eps_list: &[f64],
    window: (f64, f64),
) -> Result<MuScalingReport> {
    if eps_list.windows(2).any(|w| !(w[1] > w[0])) || eps_list.first().is_some_and(|&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "eps_list",
            reason: "energies must be positive and strictly increasing".into(),
        });
    }
    if grid.scheme != Scheme::GaussLegendre {
        return Err(Error::UnsupportedScheme("mu_scan needs the gauss_legendre scheme"));
    }
    let mu_zero = top_mu(pot, grid, 0.0)?;
    if (mu_zero - 1.0).abs() > CRITICALITY_TOL {
        return Err(Error::NotCritical { mu_zero });
    }

    let mut mus = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let mu = top_mu(pot, grid, eps)?;
        if mu >= 1.0 {
            return Err(Error::Supercritical { eps, mu });
        }
        mus.push(mu);
    }
    if let Some(i) = mus.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::NotMonotone(format!(
            "mu({}) = {} < mu({}) = {}",
            eps_list[i],
            mus[i],
            eps_list[i + 1],
            mus[i + 1]
        )));
    }

    let (xs, ys): (Vec<f64>, Vec<f64>) = eps_list
        .iter()
        .zip(&mus)
        .filter(|(e, _)| **e >= window.0 * (1.0 - 1e-12) && **e <= window.1 * (1.0 + 1e-12))
        .map(|(e, m)| (e.ln(), (1.0 - m).ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("needs at least two scan points inside {window:?}"),
        });
    }
    let (slope, intercept) = linear_fit(&xs, &ys);
    Ok(MuScalingReport {
        epsilons: eps_list.to_vec(),
        mus,
        fitted_exponent: slope,
        fit_window: window,
        a_mu_estimate: intercept.exp(),
        mu_zero,
    })
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
