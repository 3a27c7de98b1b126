use crate::error::{Error, Result};
use crate::quad::gauss_legendre_on;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Second-order finite differences on `r_j = (j − ½)h`, `h = r_max/n`.
    UniformFd2,
    /// Gauss–Legendre nodes on `(0, r_max)`, used by the Nyström kernels.
    GaussLegendre,
}

/// Condition imposed at `r_max` by the finite-difference Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterBoundary {
    /// `u(r_max) = 0`.
    Dirichlet,
    /// `u'/u = −ℓ/r_max`, the log-derivative of the decaying free solution at
    /// zero energy. Thresholds computed with it do not depend on `r_max` once
    /// the potential has died out.
    ZeroEnergyMatched,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub ell: u32,
    pub r_max: f64,
    pub n: usize,
    pub scheme: Scheme,
    pub outer: OuterBoundary,
}

pub const MIN_POINTS: usize = 16;

impl RadialGrid {
    pub fn new(ell: u32, r_max: f64, n: usize) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("need at least {MIN_POINTS} points, got {n}"),
            });
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r_max",
                reason: format!("must be positive, got {r_max}"),
            });
        }
        Ok(Self {
            ell,
            r_max,
            n,
            scheme: Scheme::UniformFd2,
            outer: OuterBoundary::Dirichlet,
        })
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_outer(mut self, outer: OuterBoundary) -> Self {
        self.outer = outer;
        self
    }

    pub fn with_ell(mut self, ell: u32) -> Self {
        self.ell = ell;
        self
    }

    /// Same grid with `2n` points.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n, ..*self }
    }

    pub fn step(&self) -> f64 {
        self.r_max / self.n as f64
    }

    /// Nodes and quadrature weights.
    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        match self.scheme {
            Scheme::UniformFd2 => {
                let h = self.step();
                ((1..=self.n).map(|j| (j as f64 - 0.5) * h).collect(), vec![h; self.n])
            }
            Scheme::GaussLegendre => gauss_legendre_on(self.n, 0.0, self.r_max),
        }
    }

    pub(crate) fn warn_if_short(&self, range: f64) {
        if self.r_max <= 10.0 * range {
            log::warn!(
                "r_max = {} is not beyond 10 potential ranges ({})",
                self.r_max,
                10.0 * range
            );
        }
    }
}
