use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linop::COUNT_GUARD;
use crate::quad::{gauss_legendre, integrate};

/// Node placement on `(0, p_max)` for the spectator momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentumMap {
    /// Gauss–Legendre in `ln p` over `[p_min, p_max]`.
    LogUniform { p_min: f64 },
    /// `p = p_max·t/(1 + c(1 − t))` with Gauss–Legendre in `t ∈ (0, 1)`.
    Rational { c: f64 },
}

/// Three identical bosons with `V = −λ|g⟩⟨g|` in every pair, Yamaguchi
/// `g(p) = 1/(p² + β²)`, and `H₀ = p² + q²` in Jacobi momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableModel {
    pub beta: f64,
    pub lambda: f64,
    pub p_max: f64,
    pub n_p: usize,
    pub masses: [f64; 3],
    pub map: MomentumMap,
    /// Gauss–Legendre points for the angular projection.
    pub n_x: usize,
}

pub const MIN_MOMENTUM_POINTS: usize = 64;

impl SeparableModel {
    pub fn new(beta: f64, lambda: f64, p_max: f64, n_p: usize) -> Result<Self> {
        let m = Self {
            beta,
            lambda,
            p_max,
            n_p,
            masses: [1.0; 3],
            map: MomentumMap::LogUniform { p_min: 1e-11 * beta },
            n_x: 32,
        };
        m.validate()?;
        Ok(m)
    }

    /// Model at `λ = lambda_unitary(β)`.
    pub fn at_unitarity(beta: f64, p_max: f64, n_p: usize) -> Result<Self> {
        Self::new(beta, lambda_unitary(beta)?, p_max, n_p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return bad("beta", format!("must be positive, got {}", self.beta));
        }
        if !(self.p_max > 0.0) || !self.p_max.is_finite() {
            return bad("p_max", format!("must be positive, got {}", self.p_max));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return bad("lambda", format!("must be nonnegative, got {}", self.lambda));
        }
        if self.n_p < MIN_MOMENTUM_POINTS {
            return bad(
                "n_p",
                format!("need at least {MIN_MOMENTUM_POINTS} points, got {}", self.n_p),
            );
        }
        if self.n_x < 4 {
            return bad("n_x", format!("need at least 4 angular points, got {}", self.n_x));
        }
        if self.masses.iter().any(|m| !(*m > 0.0)) {
            return bad("masses", "masses must be positive".into());
        }
        match self.map {
            MomentumMap::LogUniform { p_min } if !(p_min > 0.0 && p_min < self.p_max) => {
                bad("p_min", format!("must lie in (0, p_max), got {p_min}"))
            }
            MomentumMap::Rational { c } if !(c >= 0.0) => bad("c", format!("must be nonnegative, got {c}")),
            _ => Ok(()),
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..self.clone() }
    }

    pub fn with_map(&self, map: MomentumMap) -> Self {
        Self { map, ..self.clone() }
    }

    pub fn with_p_max(&self, p_max: f64) -> Self {
        Self { p_max, ..self.clone() }
    }

    pub fn with_n_p(&self, n_p: usize) -> Self {
        Self { n_p, ..self.clone() }
    }

    pub fn form_factor(&self, p: f64) -> f64 {
        1.0 / (p * p + self.beta * self.beta)
    }

    /// Spectator momentum nodes and weights.
    pub fn momentum_grid(&self) -> (Vec<f64>, Vec<f64>) {
        let (t, wt) = gauss_legendre(self.n_p);
        match self.map {
            MomentumMap::LogUniform { p_min } => {
                let (a, b) = (p_min.ln(), self.p_max.ln());
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                t.iter()
                    .zip(&wt)
                    .map(|(t, w)| {
                        let p = (mid + half * t).exp();
                        (p, half * w * p)
                    })
                    .unzip()
            }
            MomentumMap::Rational { c } => t
                .iter()
                .zip(&wt)
                .map(|(t, w)| {
                    let u = 0.5 * (t + 1.0);
                    let den = 1.0 + c * (1.0 - u);
                    let p = self.p_max * u / den;
                    let dp = self.p_max * (1.0 + c) / (den * den);
                    (p, 0.5 * w * dp)
                })
                .unzip(),
        }
    }

    /// `1/λ − 1/λ_u`; zero at unitarity, negative when a dimer exists.
    pub fn detuning(&self) -> f64 {
        1.0 / self.lambda - PI * PI / self.beta.powi(3)
    }

    /// `τ(−κ²)` in `t(z) = |g⟩τ(z)⟨g|`:
    /// `τ = −1/D`, `D = (1/λ − 1/λ_u) + π²κ(2β + κ)/(β³(β + κ)²)`.
    pub fn tau(&self, kappa: f64) -> f64 {
        let b = self.beta;
        let d = self.detuning() + PI * PI * kappa * (2.0 * b + kappa) / (b.powi(3) * (b + kappa).powi(2));
        -1.0 / d
    }

    /// Two-body binding momentum `κ_d = √(λπ²/β) − β`, if bound.
    pub fn dimer_kappa(&self) -> Option<f64> {
        let k = (self.lambda * PI * PI / self.beta).sqrt() - self.beta;
        (k > 0.0).then_some(k)
    }

    /// Two-body binding energy `−κ_d²`, if bound.
    pub fn dimer_energy(&self) -> Option<f64> {
        self.dimer_kappa().map(|k| -k * k)
    }
}

/// `λ_u = β³/π²`, the coupling at which `⟨g|p^{−2}|g⟩λ = 1`.
///
/// Evaluated in closed form and by quadrature of `4π∫₀^∞ g(p)² dp`; the two
/// must agree to 1e-10.
pub fn lambda_unitary(beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("must be positive, got {beta}"),
        });
    }
    let closed = beta.powi(3) / (PI * PI);
    let quad = 1.0 / lambda_unitary_integral(beta)?;
    if (quad / closed - 1.0).abs() > 1e-10 {
        return Err(Error::Internal(format!(
            "unitary coupling: quadrature {quad} vs closed form {closed}"
        )));
    }
    Ok(closed)
}

/// `4π∫₀^∞ g(p)² dp` by adaptive quadrature after `p = β tan θ`.
pub fn lambda_unitary_integral(beta: f64) -> Result<f64> {
    let b2 = beta * beta;
    let f = |theta: f64| {
        let p = beta * theta.tan();
        let g = 1.0 / (p * p + b2);
        g * g * beta / theta.cos().powi(2)
    };
    Ok(4.0 * PI * integrate(f, 0.0, 0.5 * PI, 1e-300, 1e-14)?)
}

/// `4π∫ p² g(p)²/(p² + κ²) dp = π²/(β(β + κ)²)`.
pub fn pair_bubble(beta: f64, kappa: f64) -> f64 {
    PI * PI / (beta * (beta + kappa).powi(2))
}

/// Two-body bound states below `−ε` by the BS principle. The BS operator
/// `λ(p² + ε)^{−1/2}|g⟩⟨g|(p² + ε)^{−1/2}` has rank one, with eigenvalue
/// `λ·4π∫p²g²/(p² + ε)dp`, here summed on the model's momentum grid.
pub fn two_body_count(model: &SeparableModel, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("must be positive, got {eps}"),
        });
    }
    let (p, w) = model.momentum_grid();
    let mu: f64 = p
        .iter()
        .zip(&w)
        .map(|(&p, &w)| 4.0 * PI * w * p * p * model.form_factor(p).powi(2) / (p * p + eps))
        .sum::<f64>()
        * model.lambda;
    if (mu - 1.0).abs() <= COUNT_GUARD {
        return Err(Error::ThresholdCollision {
            eigenvalue: mu,
            threshold: 1.0,
        });
    }
    Ok(usize::from(mu > 1.0))
}
