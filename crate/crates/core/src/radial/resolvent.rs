use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quad::integrate;

const REL_TOL: f64 = 1e-13;
const ROUTE_AGREEMENT: f64 = 1e-8;

/// Kernel of `(−Δ + ε)^{−p}`, `p = 1 + 2γ`, at distance `R`, with its upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventKernel {
    pub p: f64,
    /// Log-variable quadrature.
    pub value: f64,
    /// Rational-map quadrature of the same integral.
    pub alt_value: f64,
    /// `2^{−2p} Γ(3/2 − p) / (π^{3/2} Γ(p)) · R^{−(3−2p)}`.
    pub bound: f64,
}

impl ResolventKernel {
    pub fn holds(&self) -> bool {
        self.value <= self.bound
    }
}

/// `(4π)^{−3/2}/Γ(p) ∫₀^∞ s^{p−5/2} e^{−εs − R²/(4s)} ds`.
///
/// Evaluated twice, once in `u = ln s` and once with `s = s₀ w/(1 − w)` where
/// `s₀ = R/(2√ε)` is the saddle of the exponent; the two must agree to 1e-8.
pub fn resolvent_power_kernel(gamma_exp: f64, eps: f64, r: f64) -> Result<ResolventKernel> {
    if !(gamma_exp >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be nonnegative, got {gamma_exp}"),
        });
    }
    let p = 1.0 + 2.0 * gamma_exp;
    if p >= 1.5 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("p = 1 + 2γ = {p} must stay below 3/2"),
        });
    }
    if !(eps > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon, R",
            reason: format!("must be positive, got ε = {eps}, R = {r}"),
        });
    }
    let pre = (4.0 * PI).powf(-1.5) / gamma(p);
    let expo = |s: f64| (p - 2.5) * s.ln() - eps * s - r * r / (4.0 * s);

    let s0 = r / (2.0 * eps.sqrt());
    let u0 = s0.ln();
    // Scale out the peak so that both routes integrate O(1) functions.
    let peak = {
        let sp = {
            let b = p - 1.5;
            (b + (b * b + eps * r * r).sqrt()) / (2.0 * eps)
        };
        expo(sp) + sp.ln()
    };
    let u_lo = (r * r / 3000.0).ln().min(u0 - 5.0);
    let u_hi = (750.0 / eps).ln().max(u0 + 5.0);
    let f_log = |u: f64| (expo(u.exp()) + u - peak).exp();
    let value = (integrate(f_log, u_lo, u0, 1e-300, REL_TOL)? + integrate(f_log, u0, u_hi, 1e-300, REL_TOL)?)
        * peak.exp()
        * pre;

    let f_map = |w: f64| {
        if w <= 0.0 || w >= 1.0 {
            return 0.0;
        }
        let s = s0 * w / (1.0 - w);
        let jac = s0 / ((1.0 - w) * (1.0 - w));
        let v = (expo(s) - peak).exp() * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let alt_value = (integrate(f_map, 0.0, 0.5, 1e-300, REL_TOL)? + integrate(f_map, 0.5, 1.0, 1e-300, REL_TOL)?)
        * peak.exp()
        * pre;

    if (value - alt_value).abs() > ROUTE_AGREEMENT * value.abs() {
        return Err(Error::Quadrature(format!(
            "substitutions disagree: {value:e} vs {alt_value:e}"
        )));
    }
    let bound = 2f64.powf(-2.0 * p) * gamma(1.5 - p) / (PI.powf(1.5) * gamma(p)) * r.powf(-(3.0 - 2.0 * p));
    Ok(ResolventKernel {
        p,
        value,
        alt_value,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::green::free_green_3d;

    #[test]
    fn gamma_zero_is_free_resolvent() {
        for (eps, r) in [(1.0, 1.0), (0.01, 3.0), (25.0, 0.2), (4.0, 5.0)] {
            let k = resolvent_power_kernel(0.0, eps, r).unwrap();
            let exact = free_green_3d(eps.sqrt(), r);
            assert!((k.value / exact - 1.0).abs() < 1e-6);
            assert!((k.bound - 1.0 / (4.0 * PI * r)).abs() < 1e-14 / r);
            assert!(k.holds());
        }
    }

    #[test]
    fn routes_agree_off_zero() {
        let k = resolvent_power_kernel(0.2, 1.0, 2.0).unwrap();
        assert!((k.value - k.alt_value).abs() <= 1e-8 * k.value);
        assert!(k.holds());
    }

    #[test]
    fn rejects_divergent_power() {
        assert!(resolvent_power_kernel(0.25, 1.0, 1.0).is_err());
        assert!(resolvent_power_kernel(0.1, 0.0, 1.0).is_err());
    }
}
