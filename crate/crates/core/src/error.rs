use thiserror::Error;

/// Errors raised by the operator algebra and the numerical experiments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric: max |a_ij - a_ji| = {max_asymmetry:e}")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator must have dimension >= 1")]
    EmptyOperator,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("symmetric eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("function is not finite at eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("vector norm {norm:e} is below the admissible minimum 1e-8")]
    DegenerateVector { norm: f64 },

    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("A + eps is not positive definite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("threshold collision: eigenvalue {eigenvalue:e} lies within the guard band of -eps = {threshold:e}; perturb eps")]
    ThresholdCollision { eigenvalue: f64, threshold: f64 },

    #[error("the perturbation never binds for coupling up to {lambda_max:e}")]
    NeverBinds { lambda_max: f64 },

    #[error("vectors {i} and {j} are not orthonormal: <phi_i, phi_j> = {inner:e}")]
    NotOrthonormal { i: usize, j: usize, inner: f64 },

    #[error("expectation |<phi_{index}, A phi_{index}>| = {value:e} is below delta = {delta:e}")]
    ExpectationBelowDelta { index: usize, value: f64, delta: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("not an orthogonal projection: |P^2 - P|_F = {residual:e}")]
    NotProjection { residual: f64 },

    #[error("projection is not spectral for its subsystem part: |(K_j - mu_j P_j) R_j|_F = {residual:e}")]
    NotSpectralProjection { residual: f64 },

    #[error("recurrence and conjugation disagree at stage {stage}: residual {residual:e}")]
    RecurrenceMismatch { stage: usize, residual: f64 },

    #[error("internal verification failed: {0}")]
    Internal(String),

    #[error("grid scheme does not support this operation: {0}")]
    UnsupportedScheme(&'static str),

    #[error("critical coupling not grid converged: coarse {coarse}, fine {fine}")]
    GridNotConverged { coarse: f64, fine: f64 },

    #[error("quadrature diverges or is unresolved: {0}")]
    Quadrature(String),

    #[error("bound states persist at partial wave {ell}; raise the cutoff")]
    PartialWaveCutoff { ell: usize },

    #[error("potential is not at critical coupling: mu(0) = {mu_zero}")]
    NotCritical { mu_zero: f64 },

    #[error("mu(eps) = {mu} >= 1 at eps = {eps:e}: supercritical tuning")]
    Supercritical { eps: f64, mu: f64 },

    #[error("monotonicity violated: {0}")]
    NotMonotone(String),

    #[error("only {found} trimer levels resolved; raise p_max / n_p or lower p_min")]
    TooFewLevels { found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
