use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linop::{SymOperator, COUNT_GUARD};

use super::grid::{OuterBoundary, RadialGrid, Scheme};
use super::potential::PotentialSpec;

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sylvester inertia of `T − x`).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by Sturm bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.dim());
        let (mut lo, mut hi) = self.bounds();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        while hi - lo > 4.0 * f64::EPSILON * scale {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn lowest_eigenvalue(&self) -> f64 {
        self.eigenvalue(0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.diag.iter().map(|x| x * x).sum::<f64>() + 2.0 * self.off.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// `COUNT_GUARD·(1 + ‖T‖_F)`.
    pub fn guard_band(&self) -> f64 {
        COUNT_GUARD * (1.0 + self.frobenius_norm())
    }

    /// Bound states below `−ε` with the guard band applied.
    pub fn count_bound_states(&self, eps: f64) -> usize {
        self.count_below(-eps - self.guard_band())
    }

    /// Strictly negative eigenvalues, from the Sturm signs alone.
    ///
    /// The Frobenius guard band grows like `√n/h²` and would hide states
    /// bound by less than it; the inertia count itself is accurate to
    /// roughly `ε_mach·‖T‖_∞`.
    pub fn count_negative(&self) -> usize {
        self.count_below(0.0)
    }

    /// Solves `(T + s) x = rhs` (Thomas algorithm, no pivoting; `T + s ≻ 0`).
    pub fn solve_shifted(&self, s: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0] + s;
        if n > 1 {
            c[0] = self.off[0] / denom;
        }
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] + s - self.off[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    pub fn to_dense(&self) -> SymOperator {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        SymOperator::symmetrize_unchecked(m)
    }
}

/// `−d²/dr² + ℓ(ℓ+1)/r² + w(r)` on the half-step mesh, `u(0) = 0` by an
/// antisymmetric ghost node, outer end as selected by the grid.
pub(crate) fn fd_operator(grid: &RadialGrid, w: impl Fn(f64) -> f64) -> Result<Tridiagonal> {
    if grid.scheme != Scheme::UniformFd2 {
        return Err(Error::UnsupportedScheme(
            "finite-difference operators need the uniform_fd2 scheme",
        ));
    }
    let n = grid.n;
    let h = grid.step();
    let h2 = h * h;
    let (r, _) = grid.nodes();
    let l = grid.ell as f64;
    let centrifugal = l * (l + 1.0);
    let mut diag: Vec<f64> = r.iter().map(|&x| 2.0 / h2 + centrifugal / (x * x) + w(x)).collect();
    diag[0] += 1.0 / h2;
    diag[n - 1] += match grid.outer {
        OuterBoundary::Dirichlet => 1.0 / h2,
        OuterBoundary::ZeroEnergyMatched => {
            let beta = l / grid.r_max;
            let rho = (1.0 - 0.5 * beta * h) / (1.0 + 0.5 * beta * h);
            -rho / h2
        }
    };
    Ok(Tridiagonal {
        diag,
        off: vec![-1.0 / h2; n - 1],
    })
}

/// Tridiagonal reduced Hamiltonian `−d²/dr² + ℓ(ℓ+1)/r² + v(r)`.
pub fn reduced_tridiagonal(pot: &PotentialSpec, grid: &RadialGrid) -> Result<Tridiagonal> {
    grid.warn_if_short(pot.range());
    fd_operator(grid, |r| pot.value(r))
}

/// Dense reduced Hamiltonian.
pub fn reduced_hamiltonian(pot: &PotentialSpec, grid: &RadialGrid) -> Result<SymOperator> {
    Ok(reduced_tridiagonal(pot, grid)?.to_dense())
}

/// Number of eigenvalues of the reduced Hamiltonian below `−ε`.
pub fn count_radial_bound_states(pot: &PotentialSpec, grid: &RadialGrid, eps: f64) -> Result<usize> {
    Ok(reduced_tridiagonal(pot, grid)?.count_bound_states(eps))
}
