//! Finite-dimensional self-adjoint operators.
//!
//! A [`SymOperator`] is a dense real symmetric matrix standing in for a
//! self-adjoint operator. Everything the counting machinery needs is here:
//! spectral decomposition, scalar functional calculus `f(A) = V f(Λ) Vᵀ`,
//! rank-one projections, Hilbert–Schmidt norms and eigenvalue counting with
//! a comparison guard band.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance on `|a_ij - a_ji|` accepted by [`SymOperator::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative guard band used when comparing eigenvalues to a threshold.
pub const COUNT_GUARD: f64 = 1e-10;

/// Smallest vector norm accepted when normalizing.
pub const MIN_NORM: f64 = 1e-8;

/// Dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymOperator {
    m: DMatrix<f64>,
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

/// Comparison used by [`count_evs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Greater,
    GreaterEq,
    Less,
    LessEq,
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::EmptyOperator);
    }
    Ok(())
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

impl SymOperator {
    /// Wraps `m`, rejecting non-square or asymmetric input.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square(&m)?;
        let asym = max_asymmetry(&m);
        let scale = m.amax().max(1.0);
        if !(asym <= SYMMETRY_TOL * scale) {
            return Err(Error::NotSymmetric { max_asymmetry: asym });
        }
        Ok(Self { m })
    }

    /// Builds `(m + mᵀ)/2`. Used after products that are symmetric in exact
    /// arithmetic but pick up rounding asymmetry.
    pub fn symmetrize(m: DMatrix<f64>) -> Result<Self> {
        check_square(&m)?;
        Ok(Self::symmetrize_unchecked(m))
    }

    pub(crate) fn symmetrize_unchecked(m: DMatrix<f64>) -> Self {
        let mt = m.transpose();
        Self { m: (m + mt) * 0.5 }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "operator dimension must be positive");
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "operator dimension must be positive");
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        assert!(!diag.is_empty(), "operator dimension must be positive");
        Self {
            m: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    /// Row-major constructor, checked for symmetry.
    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// `η = 1e-10 · (1 + ‖A‖_F)`.
    pub fn guard_band(&self) -> f64 {
        COUNT_GUARD * (1.0 + self.frobenius_norm())
    }

    /// Eigenvalues only, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("non-empty operator")
    }

    /// `A + s·I`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut m = self.m.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += s;
        }
        Self { m }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { m: &self.m * c }
    }

    /// `S·A·S` for symmetric `S`, symmetrized.
    pub fn conjugated_by(&self, s: &SymOperator) -> Self {
        Self::symmetrize_unchecked(&s.m * &self.m * &s.m)
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.m * v
    }

    /// `⟨v, A v⟩`.
    pub fn expectation(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.m * v))
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }
}

impl Add for &SymOperator {
    type Output = SymOperator;
    fn add(self, rhs: &SymOperator) -> SymOperator {
        SymOperator { m: &self.m + &rhs.m }
    }
}

impl Sub for &SymOperator {
    type Output = SymOperator;
    fn sub(self, rhs: &SymOperator) -> SymOperator {
        SymOperator { m: &self.m - &rhs.m }
    }
}

impl Neg for &SymOperator {
    type Output = SymOperator;
    fn neg(self) -> SymOperator {
        SymOperator { m: -&self.m }
    }
}

impl Mul<&SymOperator> for &SymOperator {
    type Output = DMatrix<f64>;
    fn mul(self, rhs: &SymOperator) -> DMatrix<f64> {
        &self.m * &rhs.m
    }
}

impl SpectralDecomp {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V·diag(values)·Vᵀ`, symmetrized.
    pub fn reconstruct(&self, values: &[f64]) -> SymOperator {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &f) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(f);
        }
        SymOperator::symmetrize_unchecked(scaled * v.transpose())
    }

    /// `‖A·V − V·Λ‖_F`.
    pub fn residual(&self, a: &SymOperator) -> f64 {
        let av = a.matrix() * &self.eigenvectors;
        let mut vl = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            vl.column_mut(j).scale_mut(l);
        }
        (av - vl).norm()
    }

    /// `‖Vᵀ·V − I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dim();
        (self.eigenvectors.transpose() * &self.eigenvectors - DMatrix::<f64>::identity(n, n)).norm()
    }

    pub fn eigenvector(&self, j: usize) -> DVector<f64> {
        self.eigenvectors.column(j).into_owned()
    }
}

/// Full spectral decomposition with eigenvalues sorted ascending.
pub fn spectral_decompose(a: &SymOperator) -> Result<SpectralDecomp> {
    let n = a.dim();
    let max_iter = 64 * n.max(4);
    let eig = SymmetricEigen::try_new(a.m.clone(), f64::EPSILON, max_iter)
        .ok_or(Error::NoConvergence { iterations: max_iter })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomp {
        eigenvalues,
        eigenvectors,
    })
}

/// `f(A) = V·diag(f(λ))·Vᵀ`. Fails if `f` is not finite at some eigenvalue.
pub fn op_function<F>(a: &SymOperator, f: F) -> Result<SymOperator>
where
    F: Fn(f64) -> f64,
{
    let dec = spectral_decompose(a)?;
    op_function_from(&dec, f)
}

/// Same as [`op_function`] but reuses an existing decomposition.
pub fn op_function_from<F>(dec: &SpectralDecomp, f: F) -> Result<SymOperator>
where
    F: Fn(f64) -> f64,
{
    let mut values = Vec::with_capacity(dec.dim());
    for &l in &dec.eigenvalues {
        let y = f(l);
        if !y.is_finite() {
            return Err(Error::Domain { eigenvalue: l });
        }
        values.push(y);
    }
    Ok(dec.reconstruct(&values))
}

/// Number of eigenvalues (with multiplicity) satisfying `λ rel threshold`,
/// using the default guard band `η = 1e-10·(1 + ‖A‖_F)`.
pub fn count_evs(a: &SymOperator, relation: Relation, threshold: f64) -> usize {
    count_in(&a.eigenvalues(), relation, threshold, a.guard_band())
}

/// Counting on a precomputed eigenvalue list with an explicit guard band.
///
/// Strict relations require clearance `η`; non-strict ones admit values
/// within `η` of the threshold.
pub fn count_in(eigenvalues: &[f64], relation: Relation, threshold: f64, guard: f64) -> usize {
    eigenvalues
        .iter()
        .filter(|&&l| match relation {
            Relation::Greater => l > threshold + guard,
            Relation::GreaterEq => l >= threshold - guard,
            Relation::Less => l < threshold - guard,
            Relation::LessEq => l <= threshold + guard,
        })
        .count()
}

/// Eigenvalue closest to `threshold` if it lies within `guard` of it.
pub fn collision(eigenvalues: &[f64], threshold: f64, guard: f64) -> Option<f64> {
    eigenvalues
        .iter()
        .copied()
        .filter(|l| (l - threshold).abs() <= guard)
        .min_by(|x, y| (x - threshold).abs().total_cmp(&(y - threshold).abs()))
}

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(a: &SymOperator) -> f64 {
    a.frobenius_norm()
}

/// `P = f·fᵀ` for the normalized `f`. Inputs with `‖f‖ < 1e-8` are rejected.
pub fn rank_one_projection(f: &DVector<f64>) -> Result<SymOperator> {
    let u = normalized(f)?;
    Ok(SymOperator::symmetrize_unchecked(&u * u.transpose()))
}

pub(crate) fn normalized(f: &DVector<f64>) -> Result<DVector<f64>> {
    let norm = f.norm();
    if f.is_empty() {
        return Err(Error::EmptyOperator);
    }
    if !(norm >= MIN_NORM) || !norm.is_finite() {
        return Err(Error::DegenerateVector { norm });
    }
    Ok(f / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_spectrum() {
        let dec = spectral_decompose(&SymOperator::identity(3)).unwrap();
        for &l in &dec.eigenvalues {
            assert_abs_diff_eq!(l, 1.0, epsilon = 1e-14);
        }
        assert!(dec.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let a = SymOperator::from_diagonal(&[5.0, -2.0, 0.0]);
        let dec = spectral_decompose(&a).unwrap();
        assert_eq!(dec.eigenvalues, vec![-2.0, 0.0, 5.0]);
        assert!(dec.residual(&a) < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_and_reports_gap() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.5, 1.0]);
        match SymOperator::new(m) {
            Err(Error::NotSymmetric { max_asymmetry }) => assert_abs_diff_eq!(max_asymmetry, 0.5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            SymOperator::new(DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn inverse_sqrt_of_diagonal() {
        let a = SymOperator::from_diagonal(&[4.0, 9.0]);
        let r = op_function(&a, |x| x.powf(-0.5)).unwrap();
        assert_abs_diff_eq!(r.matrix()[(0, 0)], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r.matrix()[(1, 1)], 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.matrix()[(0, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn domain_error_names_eigenvalue() {
        let a = SymOperator::from_diagonal(&[4.0, -1.0]);
        let err = op_function(&a, |x| x.powf(-0.5)).unwrap_err();
        assert_eq!(err, Error::Domain { eigenvalue: -1.0 });
    }

    #[test]
    fn counting_with_boundaries() {
        let a = SymOperator::from_diagonal(&[-1.0, 0.0, 2.0]);
        assert_eq!(count_evs(&a, Relation::Greater, 1.0), 1);
        let id = SymOperator::identity(5);
        assert_eq!(count_evs(&id, Relation::Greater, 1.0), 0);
        assert_eq!(count_evs(&id, Relation::GreaterEq, 1.0), 5);
        assert_eq!(count_evs(&id, Relation::Less, 1.0), 0);
        assert_eq!(count_evs(&id, Relation::LessEq, 1.0), 5);
    }

    #[test]
    fn hs_norm_small_cases() {
        assert_eq!(hs_norm(&SymOperator::zeros(3)), 0.0);
        assert_abs_diff_eq!(hs_norm(&SymOperator::from_diagonal(&[3.0, 4.0])), 5.0);
    }

    #[test]
    fn projections() {
        let p = rank_one_projection(&DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!(p.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let p = rank_one_projection(&DVector::from_vec(vec![1.0, 1.0])).unwrap();
        for x in p.matrix().iter() {
            assert_abs_diff_eq!(*x, 0.5, epsilon = 1e-15);
        }
        // unnormalized input is normalized
        let p = rank_one_projection(&DVector::from_vec(vec![3.0, 4.0])).unwrap();
        assert_abs_diff_eq!(p.trace(), 1.0, epsilon = 1e-15);
        assert!(matches!(
            rank_one_projection(&DVector::from_vec(vec![1e-9, 0.0])),
            Err(Error::DegenerateVector { .. })
        ));
        assert!(rank_one_projection(&DVector::zeros(3)).is_err());
    }
}
