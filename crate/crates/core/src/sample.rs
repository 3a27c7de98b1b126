//! Seeded random instances for the property corpora.
//!
//! Every generator takes an explicit RNG; corpora derive one seed per
//! instance with [`instance_seed`] so they can be run in parallel and still
//! reproduce bit for bit.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bsengine::BsProblem;
use crate::linop::{collision, SymOperator};

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0xB5C0;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 of `base` and `index`.
pub fn instance_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Symmetric matrix with independent N(0,1) entries on and above the diagonal.
pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> SymOperator {
    let g = gaussian_matrix(rng, n, n);
    SymOperator::symmetrize_unchecked(g)
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed).
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// `QᵀDQ` with the given spectrum.
pub fn with_spectrum<R: Rng>(rng: &mut R, spectrum: &[f64]) -> SymOperator {
    let n = spectrum.len();
    let q = random_orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(spectrum));
    SymOperator::symmetrize_unchecked(q.transpose() * d * q)
}

/// Sign structure of the random perturbation `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationSign {
    /// `B = −GᵀG ⪯ 0`.
    NonPositive,
    /// `B = −GᵀG + 0.5·S` with `S` a symmetric Gaussian matrix.
    Indefinite,
}

#[derive(Debug, Clone, Copy)]
pub struct InstanceOptions {
    pub min_dim: usize,
    pub max_dim: usize,
    /// Force one zero eigenvalue of `A` (the `A ⪰ 0` branch).
    pub zero_mode: bool,
    pub sign: PerturbationSign,
}

impl Default for InstanceOptions {
    fn default() -> Self {
        Self {
            min_dim: 2,
            max_dim: 20,
            zero_mode: false,
            sign: PerturbationSign::NonPositive,
        }
    }
}

/// Random `(A, B, ε)` with `A = QᵀDQ`, `D ~ U[0, 5]`.
///
/// `ε` is jittered by 1e-6 (relative) until no eigenvalue of `A + B` sits
/// within 100 guard bands of `−ε`.
pub fn random_bs_problem<R: Rng>(rng: &mut R, opts: &InstanceOptions) -> BsProblem {
    let n = rng.random_range(opts.min_dim..=opts.max_dim);
    let mut spectrum: Vec<f64> = (0..n).map(|_| 5.0 * rng.random::<f64>()).collect();
    if opts.zero_mode {
        spectrum[0] = 0.0;
    }
    let a = with_spectrum(rng, &spectrum);

    let rows = rng.random_range(1..=n);
    let strength: f64 = 2.0 + 10.0 * rng.random::<f64>();
    let g = gaussian_matrix(rng, rows, n) * (strength / n as f64).sqrt();
    let mut b = -(g.transpose() * g);
    if opts.sign == PerturbationSign::Indefinite {
        b += random_symmetric(rng, n).into_matrix() * 0.5;
    }
    let b = SymOperator::symmetrize_unchecked(b);

    let mut eps = 0.05 + 1.95 * rng.random::<f64>();
    let h = &a + &b;
    let eigs = h.eigenvalues();
    let window = 100.0 * h.guard_band();
    while collision(&eigs, -eps, window).is_some() {
        eps *= 1.0 + 1e-6;
    }
    BsProblem::new(a, b, eps).expect("generator produces valid problems")
}
