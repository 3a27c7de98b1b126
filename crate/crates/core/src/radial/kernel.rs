use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linop::{collision, count_in, op_function_from, spectral_decompose, Relation, SymOperator};

use super::green::green_function;
use super::grid::{RadialGrid, Scheme};
use super::hamiltonian::{fd_operator, reduced_tridiagonal, Tridiagonal};
use super::potential::PotentialSpec;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("must be positive, got {eps}"),
        })
    }
}

/// `H_w = −d²/dr² + ℓ(ℓ+1)/r² + v₊` on the finite-difference grid.
pub fn weighted_free_operator(pot: &PotentialSpec, grid: &RadialGrid) -> Result<Tridiagonal> {
    fd_operator(grid, |r| pot.v_plus(r))
}

/// `K(ε) = (H_w + ε)^{−1/2} V₋ (H_w + ε)^{−1/2}` with the repulsive part kept in `H_w`.
///
/// On a Gauss–Legendre grid this is the Nyström kernel of [`nystrom_kernel`].
pub fn bs_kernel_radial(pot: &PotentialSpec, grid: &RadialGrid, eps: f64) -> Result<SymOperator> {
    check_eps(eps)?;
    if grid.scheme == Scheme::GaussLegendre {
        return nystrom_kernel(pot, grid, eps);
    }
    let hw = weighted_free_operator(pot, grid)?.to_dense();
    let dec = spectral_decompose(&hw.shifted(eps))?;
    if dec.eigenvalues[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: dec.eigenvalues[0],
        });
    }
    let s = op_function_from(&dec, |x| x.powf(-0.5))?;
    let (r, _) = grid.nodes();
    let v = SymOperator::from_diagonal(&r.iter().map(|&x| pot.v_minus(x)).collect::<Vec<_>>());
    Ok(v.conjugated_by(&s))
}

/// `√V₋ (H_w + ε)^{−1} √V₋`, isospectral to [`bs_kernel_radial`].
pub fn bs_kernel_radial_factored(pot: &PotentialSpec, grid: &RadialGrid, eps: f64) -> Result<SymOperator> {
    check_eps(eps)?;
    let hw = weighted_free_operator(pot, grid)?;
    if hw.count_below(-eps) > 0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: hw.lowest_eigenvalue() + eps,
        });
    }
    let (r, _) = grid.nodes();
    let n = r.len();
    let sq: Vec<f64> = r.iter().map(|&x| pot.v_minus(x).sqrt()).collect();
    let mut m = DMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for j in 0..n {
        if sq[j] == 0.0 {
            continue;
        }
        rhs.iter_mut().for_each(|x| *x = 0.0);
        rhs[j] = sq[j];
        let col = hw.solve_shifted(eps, &rhs);
        for i in 0..n {
            m[(i, j)] = sq[i] * col[i];
        }
    }
    Ok(SymOperator::symmetrize_unchecked(m))
}

/// Nyström discretization `√(wᵢv₋ᵢ) G_ℓ(√ε; rᵢ, rⱼ) √(wⱼv₋ⱼ)` of the continuum
/// BS operator on Gauss–Legendre nodes of `(0, r_max)`, for purely
/// attractive potentials. `ε = 0` gives `K(0)`.
pub fn nystrom_kernel(pot: &PotentialSpec, grid: &RadialGrid, eps: f64) -> Result<SymOperator> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("must be nonnegative, got {eps}"),
        });
    }
    if grid.scheme != Scheme::GaussLegendre {
        return Err(Error::UnsupportedScheme(
            "the Nyström kernel needs the gauss_legendre scheme",
        ));
    }
    if pot.has_repulsion() {
        return Err(Error::UnsupportedScheme("the Nyström kernel has no repulsive part"));
    }
    let kappa = eps.sqrt();
    let (r, w) = grid.nodes();
    let n = r.len();
    let s: Vec<f64> = r.iter().zip(&w).map(|(&x, &wi)| (wi * pot.v_minus(x)).sqrt()).collect();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = s[i] * s[j] * green_function(grid.ell, kappa, r[i], r[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(SymOperator::symmetrize_unchecked(m))
}

/// `μ(ε)`, the largest eigenvalue of [`bs_kernel_radial`].
pub fn mu_radial(pot: &PotentialSpec, grid: &RadialGrid, eps: f64) -> Result<f64> {
    Ok(bs_kernel_radial(pot, grid, eps)?.max_eigenvalue())
}

/// Direct and BS counts of radial bound states below `−ε` on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadialCounts {
    pub direct: usize,
    pub bs: usize,
}

/// Counts eigenvalues of the reduced Hamiltonian below `−ε` and of `K(ε)` above one.
///
/// The first count is a Sturm inertia count; `K(ε)` is diagonalized in its
/// factored form on the support of `v₋`.
pub fn radial_counts(pot: &PotentialSpec, grid: &RadialGrid, eps: f64) -> Result<RadialCounts> {
    check_eps(eps)?;
    let h = reduced_tridiagonal(pot, grid)?;
    let g = h.guard_band();
    let below = h.count_below(-eps - g);
    if h.count_below((-eps + g).next_up()) > below {
        return Err(Error::ThresholdCollision {
            eigenvalue: h.eigenvalue(below),
            threshold: -eps,
        });
    }
    let k = match grid.scheme {
        Scheme::GaussLegendre => nystrom_kernel(pot, grid, eps)?,
        Scheme::UniformFd2 => factored_on_support(pot, grid, eps)?,
    };
    let k_eigs = k.eigenvalues();
    if let Some(ev) = collision(&k_eigs, 1.0, k.guard_band()) {
        return Err(Error::ThresholdCollision {
            eigenvalue: ev,
            threshold: 1.0,
        });
    }
    Ok(RadialCounts {
        direct: below,
        bs: count_in(&k_eigs, Relation::Greater, 1.0, k.guard_band()),
    })
}

/// [`bs_kernel_radial_factored`] restricted to the nodes where `v₋ > 0`.
/// The dropped rows and columns are zero, so the nonzero spectrum is unchanged.
fn factored_on_support(pot: &PotentialSpec, grid: &RadialGrid, eps: f64) -> Result<SymOperator> {
    let hw = weighted_free_operator(pot, grid)?;
    if hw.count_below(-eps) > 0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: hw.lowest_eigenvalue() + eps,
        });
    }
    let (r, _) = grid.nodes();
    let support: Vec<(usize, f64)> = r
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, pot.v_minus(x).sqrt()))
        .filter(|&(_, s)| s > 0.0)
        .collect();
    let m = support.len();
    let mut k = DMatrix::zeros(m, m);
    let mut rhs = vec![0.0; r.len()];
    for (b, &(j, sj)) in support.iter().enumerate() {
        rhs[j] = sj;
        let col = hw.solve_shifted(eps, &rhs);
        rhs[j] = 0.0;
        for (a, &(i, si)) in support.iter().enumerate() {
            k[(a, b)] = si * col[i];
        }
    }
    Ok(SymOperator::symmetrize_unchecked(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::OuterBoundary;
    use crate::radial::potential::ShapeKind;
    use std::f64::consts::PI;

    #[test]
    fn pure_repulsion_gives_zero_kernel() {
        let pot = PotentialSpec::square_well(0.0, 1.0)
            .unwrap()
            .with_repulsion(ShapeKind::Exponential, 2.0, 1.0)
            .unwrap();
        let grid = RadialGrid::new(0, 10.0, 64).unwrap();
        let k = bs_kernel_radial(&pot, &grid, 0.5).unwrap();
        assert_eq!(k.frobenius_norm(), 0.0);
    }

    #[test]
    fn both_forms_are_isospectral() {
        let pot = PotentialSpec::yukawa(3.0, 1.0)
            .unwrap()
            .with_repulsion(ShapeKind::Gaussian, 4.0, 0.3)
            .unwrap();
        for ell in [0, 2] {
            let grid = RadialGrid::new(ell, 12.0, 160).unwrap();
            let a = bs_kernel_radial(&pot, &grid, 0.3).unwrap().eigenvalues();
            let b = bs_kernel_radial_factored(&pot, &grid, 0.3).unwrap().eigenvalues();
            let gap = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-8, "spectra differ by {gap}");
        }
    }

    #[test]
    fn half_critical_well_has_mu_one_half() {
        let pot = PotentialSpec::square_well(PI * PI / 8.0, 1.0).unwrap();
        let gl = RadialGrid::new(0, 1.0, 96).unwrap().with_scheme(Scheme::GaussLegendre);
        assert!((mu_radial(&pot, &gl, 1e-6).unwrap() - 0.5).abs() < 5e-3);
        let fd = RadialGrid::new(0, 10.0, 800)
            .unwrap()
            .with_outer(OuterBoundary::ZeroEnergyMatched);
        assert!((mu_radial(&pot, &fd, 1e-6).unwrap() - 0.5).abs() < 5e-3);
    }

    #[test]
    fn counts_agree_on_a_deep_well() {
        let pot = PotentialSpec::square_well(60.0, 1.0).unwrap();
        let grid = RadialGrid::new(0, 8.0, 200).unwrap();
        let c = radial_counts(&pot, &grid, 0.7).unwrap();
        assert_eq!(c.direct, c.bs);
        assert!(c.direct >= 2);
    }

    #[test]
    fn nystrom_needs_attractive_potential() {
        let pot = PotentialSpec::square_well(1.0, 1.0)
            .unwrap()
            .with_repulsion(ShapeKind::SquareWell, 1.0, 0.5)
            .unwrap();
        let gl = RadialGrid::new(0, 1.0, 32).unwrap().with_scheme(Scheme::GaussLegendre);
        assert!(matches!(
            nystrom_kernel(&pot, &gl, 0.0),
            Err(Error::UnsupportedScheme(_))
        ));
    }
}
