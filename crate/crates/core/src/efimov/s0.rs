use std::f64::consts::PI;

/// `s cosh(πs/2) − (8/√3) sinh(πs/6)`.
pub fn efimov_residual(s: f64) -> f64 {
    s * (0.5 * PI * s).cosh() - 8.0 / 3f64.sqrt() * (PI * s / 6.0).sinh()
}

/// Bracket used by [`s0_oracle`].
pub const S0_BRACKET: (f64, f64) = (0.1, 2.0);

/// Root `s₀` of [`efimov_residual`] in `(0.1, 2)` by bisection to 1e-12, and
/// the trimer energy ratio `e^{2π/s₀}`.
pub fn s0_oracle() -> (f64, f64) {
    let (mut lo, mut hi) = S0_BRACKET;
    let f_lo = efimov_residual(lo);
    assert!(f_lo * efimov_residual(hi) < 0.0, "bracket does not straddle the root");
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if efimov_residual(mid) * f_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s0 = 0.5 * (lo + hi);
    (s0, (2.0 * PI / s0).exp())
}
