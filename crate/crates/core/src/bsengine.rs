//! Birman–Schwinger operators and bound-state counting.
//!
//! For `A ⪰ 0`, symmetric `B` and a spectral shift `ε > 0` the BS operator is
//!
//! ```text
//! K(ε) = −(A + ε)^{−1/2} B (A + ε)^{−1/2}
//! ```
//!
//! and the number of eigenvalues of `A + B` below `−ε` equals the number of
//! eigenvalues of `K(ε)` above one. The leading minus sign is used
//! throughout, so an attractive `B ⪯ 0` gives a positive `K(ε)`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linop::{
    collision, count_evs, count_in, normalized, op_function_from, spectral_decompose, Relation, SymOperator,
    COUNT_GUARD,
};

/// Largest coupling tried by [`critical_coupling`] before giving up.
pub const LAMBDA_MAX: f64 = 1e6;

/// `(A, B, ε)` with `A ⪰ 0` and `ε > 0`.
#[derive(Debug, Clone)]
pub struct BsProblem {
    a: SymOperator,
    b: SymOperator,
    epsilon: f64,
}

impl BsProblem {
    pub fn new(a: SymOperator, b: SymOperator, epsilon: f64) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must be positive and finite, got {epsilon}"),
            });
        }
        let min_eig = a.min_eigenvalue();
        if min_eig < -COUNT_GUARD * (1.0 + a.frobenius_norm()) {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self { a, b, epsilon })
    }

    pub fn a(&self) -> &SymOperator {
        &self.a
    }

    pub fn b(&self) -> &SymOperator {
        &self.b
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `A + B`.
    pub fn hamiltonian(&self) -> SymOperator {
        &self.a + &self.b
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), epsilon)
    }
}

/// `K(ε) = −(A+ε)^{−1/2} B (A+ε)^{−1/2}`, symmetrized.
pub fn bs_operator(p: &BsProblem) -> Result<SymOperator> {
    let dec = spectral_decompose(&p.a.shifted(p.epsilon))?;
    if dec.eigenvalues[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: dec.eigenvalues[0],
        });
    }
    let s = op_function_from(&dec, |x| x.powf(-0.5))?;
    Ok(-&p.b.conjugated_by(&s))
}

/// `#(evs(A + B) < −ε)`.
pub fn count_direct(p: &BsProblem) -> usize {
    count_evs(&p.hamiltonian(), Relation::Less, -p.epsilon)
}

/// `#(evs(K(ε)) > 1)`, refusing to count when `−ε` collides with the
/// spectrum of `A + B` (or `1` with the spectrum of `K`).
pub fn count_bs(p: &BsProblem) -> Result<usize> {
    let h = p.hamiltonian();
    if let Some(ev) = collision(&h.eigenvalues(), -p.epsilon, h.guard_band()) {
        return Err(Error::ThresholdCollision {
            eigenvalue: ev,
            threshold: -p.epsilon,
        });
    }
    let k = bs_operator(p)?;
    let k_eigs = k.eigenvalues();
    if let Some(ev) = collision(&k_eigs, 1.0, k.guard_band()) {
        return Err(Error::ThresholdCollision {
            eigenvalue: ev,
            threshold: 1.0,
        });
    }
    Ok(count_in(&k_eigs, Relation::Greater, 1.0, k.guard_band()))
}

/// `μ(ε) = sup σ(K(ε))`.
pub fn mu_max(p: &BsProblem) -> Result<f64> {
    Ok(bs_operator(p)?.max_eigenvalue())
}

/// `K(0) = −A^{−1/2} B A^{−1/2}` for `A` bounded below by a positive constant.
pub fn bs_operator_at_zero(a: &SymOperator, b: &SymOperator) -> Result<SymOperator> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let dec = spectral_decompose(a)?;
    if dec.eigenvalues[0] <= a.guard_band() {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: dec.eigenvalues[0],
        });
    }
    let s = op_function_from(&dec, |x| x.powf(-0.5))?;
    Ok(-&b.conjugated_by(&s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCouplingResult {
    pub lambda_star: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Lowest eigenvalue of the family at `lambda_star`.
    pub residual_min_eig: f64,
}

/// `λ* = sup{λ ≥ 0 : min eig(A + λB) ≥ −η}` by doubling from 1 and bisection
/// to a bracket of width `tol`. `η` is the guard band of `A + λB`.
pub fn critical_coupling(a: &SymOperator, b: &SymOperator, tol: f64) -> Result<CriticalCouplingResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    let a_min = a.min_eigenvalue();
    if a_min < -a.guard_band() {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: a_min });
    }
    if b.min_eigenvalue() >= -b.guard_band() {
        return Err(Error::NeverBinds { lambda_max: LAMBDA_MAX });
    }

    let family = |lambda: f64| a + &b.scaled(lambda);
    let binds = |lambda: f64| count_evs(&family(lambda), Relation::Less, 0.0) > 0;

    let mut iterations = 0;
    let (mut lo, mut hi) = if binds(1.0) {
        (0.0, 1.0)
    } else {
        let mut lo = 1.0;
        let mut hi = 2.0;
        loop {
            iterations += 1;
            if hi >= LAMBDA_MAX {
                if !binds(LAMBDA_MAX) {
                    return Err(Error::NeverBinds { lambda_max: LAMBDA_MAX });
                }
                break (lo, LAMBDA_MAX);
            }
            if binds(hi) {
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
        if binds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let lambda_star = 0.5 * (lo + hi);
    Ok(CriticalCouplingResult {
        lambda_star,
        bracket: (lo, hi),
        iterations,
        residual_min_eig: family(lambda_star).min_eigenvalue(),
    })
}

/// Outcome of the Hilbert–Schmidt counting bound `n ≤ ‖A‖²_HS / δ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsBound {
    pub n: usize,
    pub bound: f64,
    pub holds: bool,
}

impl HsBound {
    pub fn slack(&self) -> f64 {
        self.bound - self.n as f64
    }
}

/// Checks `n ≤ ‖A‖²_HS/δ²` for an orthonormal set with `|⟨φᵢ, Aφᵢ⟩| ≥ δ`.
pub fn hs_count_bound_check(a: &SymOperator, delta: f64, vectors: &[DVector<f64>]) -> Result<HsBound> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("must be positive, got {delta}"),
        });
    }
    for (i, u) in vectors.iter().enumerate() {
        if u.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: u.len(),
            });
        }
        for (j, v) in vectors.iter().enumerate().skip(i) {
            let inner = u.dot(v);
            let target = if i == j { 1.0 } else { 0.0 };
            if (inner - target).abs() > 1e-10 {
                return Err(Error::NotOrthonormal { i, j, inner });
            }
        }
    }
    for (index, v) in vectors.iter().enumerate() {
        let value = a.expectation(v).abs();
        if value < delta * (1.0 - 1e-12) {
            return Err(Error::ExpectationBelowDelta { index, value, delta });
        }
    }
    let n = vectors.len();
    let bound = a.frobenius_norm().powi(2) / (delta * delta);
    Ok(HsBound {
        n,
        bound,
        holds: n as f64 <= bound * (1.0 + 1e-12),
    })
}

/// Constant `L` with `f fᵀ − L (A + ε₀)^{−1} ≤ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domination {
    pub l: f64,
    /// Spectral cutoff with `‖f − P_{[0,k₀]} f‖ < c/2`.
    pub k0: f64,
    /// Largest eigenvalue of `f fᵀ − L (A + ε₀)^{−1}`.
    pub max_eigenvalue: f64,
}

/// Builds `L = 2(k₀ + ε₀)` from the smallest spectral cutoff `k₀` of `A` for
/// which `‖f − P_{[0,k₀]} f‖ < c/2`, then verifies the operator inequality.
pub fn rank_one_domination(f: &DVector<f64>, a: &SymOperator, epsilon0: f64, c: f64) -> Result<Domination> {
    if !(epsilon0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon0",
            reason: format!("must be positive, got {epsilon0}"),
        });
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            reason: format!("must be positive, got {c}"),
        });
    }
    if f.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: f.len(),
        });
    }
    let f = normalized(f)?;
    let dec = spectral_decompose(a)?;
    if dec.eigenvalues[0] < -a.guard_band() {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: dec.eigenvalues[0],
        });
    }
    let coeffs = dec.eigenvectors.tr_mul(&f);

    // Candidates are the distinct eigenvalues; P_{[0,k]} keeps every λ ≤ k.
    let mut k0 = None;
    for &cut in &dec.eigenvalues {
        let tail: f64 = dec
            .eigenvalues
            .iter()
            .zip(coeffs.iter())
            .filter(|(l, _)| **l > cut)
            .map(|(_, w)| w * w)
            .sum::<f64>()
            .sqrt();
        if tail < 0.5 * c {
            k0 = Some(cut.max(0.0));
            break;
        }
    }
    let k0 = k0.ok_or_else(|| Error::Internal("no spectral cutoff found".into()))?;
    let l = 2.0 * (k0 + epsilon0);

    let resolvent: Vec<f64> = dec.eigenvalues.iter().map(|x| 1.0 / (x + epsilon0)).collect();
    let r = dec.reconstruct(&resolvent);
    let ff_t = SymOperator::symmetrize_unchecked(&f * f.transpose());
    let m = &ff_t - &r.scaled(l);
    let max_eigenvalue = m.max_eigenvalue();
    if max_eigenvalue > c + m.guard_band() {
        return Err(Error::Internal(format!(
            "rank-one domination check failed: max eig {max_eigenvalue} > c = {c}"
        )));
    }
    Ok(Domination { l, k0, max_eigenvalue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn problem(a: &[f64], b: &[f64], eps: f64) -> BsProblem {
        BsProblem::new(SymOperator::from_diagonal(a), SymOperator::from_diagonal(b), eps).unwrap()
    }

    #[test]
    fn scalar_cases() {
        let p = problem(&[1.0, 1.0], &[-1.0, -1.0], 1.0);
        let k = bs_operator(&p).unwrap();
        assert_abs_diff_eq!(k.matrix(), &(DMatrix::identity(2, 2) * 0.5), epsilon = 1e-14);
        assert_eq!(count_bs(&p).unwrap(), 0);
        assert_eq!(count_direct(&p), 0);
        assert_abs_diff_eq!(mu_max(&p).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_cases() {
        let p = problem(&[0.0, 3.0], &[-2.0, -2.0], 1.0);
        let k = bs_operator(&p).unwrap();
        assert_abs_diff_eq!(k.matrix()[(0, 0)], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k.matrix()[(1, 1)], 0.5, epsilon = 1e-14);

        let p = problem(&[0.0, 1.0], &[-2.0, 0.0], 0.5);
        assert_eq!(count_direct(&p), 1);
        assert_eq!(count_bs(&p).unwrap(), 1);
        assert_abs_diff_eq!(bs_operator(&p).unwrap().matrix()[(0, 0)], 4.0, epsilon = 1e-14);

        assert_eq!(count_direct(&problem(&[1.0; 3], &[0.0; 3], 0.5)), 0);
        assert_eq!(count_direct(&problem(&[0.0, 0.0], &[-3.0, -3.0], 1.0)), 2);
        assert_abs_diff_eq!(
            mu_max(&problem(&[0.0, 2.0], &[-1.0, -1.0], 0.25)).unwrap(),
            4.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn collision_is_reported() {
        // A + B = diag(-1, 1): eigenvalue -1 sits on -ε for ε = 1.
        let p = problem(&[0.0, 1.0], &[-1.0, 0.0], 1.0);
        assert!(matches!(count_bs(&p), Err(Error::ThresholdCollision { .. })));
    }

    #[test]
    fn invalid_problems() {
        let a = SymOperator::from_diagonal(&[-1.0, 1.0]);
        assert!(matches!(
            BsProblem::new(a, SymOperator::zeros(2), 1.0),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        assert!(BsProblem::new(SymOperator::identity(2), SymOperator::zeros(2), 0.0).is_err());
        assert!(BsProblem::new(SymOperator::identity(2), SymOperator::zeros(3), 1.0).is_err());
    }

    #[test]
    fn critical_coupling_identity() {
        let r = critical_coupling(&SymOperator::identity(3), &SymOperator::identity(3).scaled(-1.0), 1e-10).unwrap();
        assert_abs_diff_eq!(r.lambda_star, 1.0, epsilon = 1e-9);
        assert!(r.bracket.0 <= r.lambda_star && r.lambda_star <= r.bracket.1);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-10);
    }

    #[test]
    fn critical_coupling_never_binds() {
        let a = SymOperator::identity(2);
        assert!(matches!(
            critical_coupling(&a, &SymOperator::identity(2), 1e-6),
            Err(Error::NeverBinds { .. })
        ));
        assert!(matches!(
            critical_coupling(&a, &SymOperator::zeros(2), 1e-6),
            Err(Error::NeverBinds { .. })
        ));
    }

    #[test]
    fn hs_bound_examples() {
        let e: Vec<DVector<f64>> = (0..4)
            .map(|i| DVector::from_fn(4, |r, _| if r == i { 1.0 } else { 0.0 }))
            .collect();
        let r = hs_count_bound_check(&SymOperator::identity(4), 1.0, &e).unwrap();
        assert_eq!(r.n, 4);
        assert_abs_diff_eq!(r.bound, 4.0, epsilon = 1e-14);
        assert!(r.holds);

        let a = SymOperator::from_diagonal(&[2.0, 0.1]);
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let r = hs_count_bound_check(&a, 2.0, std::slice::from_ref(&e1)).unwrap();
        assert_abs_diff_eq!(r.bound, 4.01 / 4.0, epsilon = 1e-14);
        assert!(r.holds);

        let err = hs_count_bound_check(&a, 2.5, std::slice::from_ref(&e1)).unwrap_err();
        assert!(matches!(err, Error::ExpectationBelowDelta { index: 0, .. }));
        let err = hs_count_bound_check(&a, 1.0, &[e1.clone(), e1]).unwrap_err();
        assert!(matches!(err, Error::NotOrthonormal { i: 0, j: 1, .. }));
    }

    #[test]
    fn domination_examples() {
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let d = rank_one_domination(&e1, &SymOperator::identity(3), 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(d.l, 4.0);
        assert!(d.max_eigenvalue <= 0.5);

        let d = rank_one_domination(&e1, &SymOperator::identity(3), 1.0, 1.5).unwrap();
        assert!(d.max_eigenvalue <= 1.5);
        assert!(rank_one_domination(&e1, &SymOperator::identity(3), 0.0, 1.0).is_err());
    }
}
