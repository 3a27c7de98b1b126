//! Successive Birman–Schwinger transforms at finite dimension.
//!
//! Each step removes a weighted projection `μP` from the current operator and
//! conjugates by `(1 − μP)^{−1/2}`:
//!
//! ```text
//! T' = (1 − μP)^{−1/2} (T − μP) (1 − μP)^{−1/2}
//! ```
//!
//! Since `T' > 1` exactly when `T − μP > 1 − μP`, the number of eigenvalues
//! above one never changes. [`iterate`] also tracks the correction `M_k` in
//! `T_k = K − Σ μᵢPᵢ + M_k` through its recurrence and checks it against the
//! direct product.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linop::{collision, count_evs, hs_norm, op_function, Relation, SymOperator};
use crate::sample::{random_orthogonal, random_symmetric};

const PROJECTION_TOL: f64 = 1e-10;
const SPLIT_TOL: f64 = 1e-10;
const SPECTRAL_TOL: f64 = 1e-6;
const RECURRENCE_TOL: f64 = 1e-8;

/// One subtraction `μP` together with the split `K_total = K_part + L_part`.
#[derive(Debug, Clone)]
pub struct ProjectionStep {
    p: SymOperator,
    mu: f64,
    k_part: SymOperator,
    l_part: SymOperator,
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "mu",
            reason: format!("must lie in (0, 1), got {mu}"),
        })
    }
}

fn check_projection(p: &SymOperator) -> Result<()> {
    let sq = p * p;
    let residual = (sq - p.matrix()).norm();
    if residual > PROJECTION_TOL {
        return Err(Error::NotProjection { residual });
    }
    if p.frobenius_norm() < 0.5 {
        return Err(Error::InvalidParameter {
            name: "P",
            reason: "projection is zero".into(),
        });
    }
    Ok(())
}

impl ProjectionStep {
    pub fn new(
        p: SymOperator,
        mu: f64,
        k_part: SymOperator,
        l_part: SymOperator,
        k_total: &SymOperator,
    ) -> Result<Self> {
        check_mu(mu)?;
        for op in [&p, &k_part, &l_part] {
            if op.dim() != k_total.dim() {
                return Err(Error::DimensionMismatch {
                    expected: k_total.dim(),
                    got: op.dim(),
                });
            }
        }
        check_projection(&p)?;
        let split = (&(&k_part + &l_part) - k_total).frobenius_norm();
        if split > SPLIT_TOL * (1.0 + k_total.frobenius_norm()) {
            return Err(Error::InvalidParameter {
                name: "K_part + L_part",
                reason: format!("differs from K_total by {split:e}"),
            });
        }
        Ok(Self { p, mu, k_part, l_part })
    }

    pub fn p(&self) -> &SymOperator {
        &self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn k_part(&self) -> &SymOperator {
        &self.k_part
    }

    pub fn l_part(&self) -> &SymOperator {
        &self.l_part
    }

    /// `‖(K_part − μP)P‖_F`, zero when `P` is a spectral projection of `K_part`.
    pub fn spectral_defect(&self) -> f64 {
        let d = &self.k_part - &self.p.scaled(self.mu);
        (&d * &self.p).norm()
    }
}

fn projection_rank(p: &SymOperator) -> usize {
    p.trace().round().max(0.0) as usize
}

/// `(1 − μP)^{−1/2}`.
pub fn inv_sqrt_one_minus(p: &SymOperator, mu: f64) -> Result<SymOperator> {
    check_mu(mu)?;
    check_projection(p)?;
    if projection_rank(p) == 1 {
        let c = 1.0 / (1.0 - mu).sqrt() - 1.0;
        Ok(&SymOperator::identity(p.dim()) + &p.scaled(c))
    } else {
        let one_minus = &SymOperator::identity(p.dim()) - &p.scaled(mu);
        op_function(&one_minus, |x| x.powf(-0.5))
    }
}

/// `R = (1 − μP)^{−1/2} − 1`.
pub fn r_operator(p: &SymOperator, mu: f64) -> Result<SymOperator> {
    Ok(&inv_sqrt_one_minus(p, mu)? - &SymOperator::identity(p.dim()))
}

/// `(1 − μP)^{−1/2} (T − μP) (1 − μP)^{−1/2}`.
pub fn bs_step(t: &SymOperator, p: &SymOperator, mu: f64) -> Result<SymOperator> {
    if t.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: p.dim(),
        });
    }
    let s = inv_sqrt_one_minus(p, mu)?;
    Ok((t - &p.scaled(mu)).conjugated_by(&s))
}

/// State after `k` steps; stage 0 is `T_0 = K_total`, `M_0 = 0`.
#[derive(Debug, Clone)]
pub struct Stage {
    pub k: usize,
    pub t: SymOperator,
    pub m: DMatrix<f64>,
    pub count_above_one: usize,
    pub hs_norm_m: f64,
    /// `‖T_k − (K_total − Σ μᵢPᵢ + M_k)‖_F`.
    pub consistency_residual: f64,
}

/// Applies the steps in order and returns every stage including stage 0.
pub fn iterate(k_total: &SymOperator, steps: &[ProjectionStep]) -> Result<Vec<Stage>> {
    let n = k_total.dim();
    let id = DMatrix::<f64>::identity(n, n);
    let tol = RECURRENCE_TOL * (1.0 + k_total.frobenius_norm());

    let mut t = k_total.clone();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut removed = DMatrix::<f64>::zeros(n, n);
    let mut stages = vec![Stage {
        k: 0,
        t: t.clone(),
        m: m.clone(),
        count_above_one: count_evs(&t, Relation::Greater, 1.0),
        hs_norm_m: 0.0,
        consistency_residual: 0.0,
    }];

    for (idx, step) in steps.iter().enumerate() {
        let k = idx + 1;
        if step.k_part.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: step.k_part.dim(),
            });
        }
        let split = (&(&step.k_part + &step.l_part) - k_total).frobenius_norm();
        if split > SPLIT_TOL * (1.0 + k_total.frobenius_norm()) {
            return Err(Error::InvalidParameter {
                name: "K_part + L_part",
                reason: format!("step {k} differs from K_total by {split:e}"),
            });
        }
        let r = r_operator(&step.p, step.mu)?;
        let residual = (&(&step.k_part - &step.p.scaled(step.mu)) * &r).norm();
        if residual > SPECTRAL_TOL {
            return Err(Error::NotSpectralProjection { residual });
        }

        let r = r.into_matrix();
        let y = step.l_part.matrix() - &removed;
        let one_r = &id + &r;
        m = &one_r * &m * &one_r + &r * &y * &r + &r * &y + &y * &r;
        removed += step.p.matrix() * step.mu;

        t = bs_step(&t, &step.p, step.mu)?;
        let direct = k_total.matrix() - &removed + &m;
        let consistency_residual = (t.matrix() - direct).norm();
        if consistency_residual > tol {
            return Err(Error::RecurrenceMismatch {
                stage: k,
                residual: consistency_residual,
            });
        }
        stages.push(Stage {
            k,
            t: t.clone(),
            hs_norm_m: m.norm(),
            m: m.clone(),
            count_above_one: count_evs(&t, Relation::Greater, 1.0),
            consistency_residual,
        });
    }
    Ok(stages)
}

/// `‖M_k‖_HS` of a stage, via the shared norm routine.
pub fn stage_hs_norm(stage: &Stage) -> f64 {
    hs_norm(&SymOperator::symmetrize_unchecked(stage.m.clone()))
}

/// Random `K_total` of dimension `n` with `steps` spectral rank-one steps.
///
/// `K_j = μ_j φ_jφ_jᵀ + Π_j S_j Π_j` with orthonormal `φ_j`, `Π_j = 1 − φ_jφ_jᵀ`
/// and `‖S_j‖ < μ_j`, so `μ_j` is the top eigenvalue of `K_j`; the remainder
/// `W` is a random symmetric matrix. Instances whose `K_total` has an
/// eigenvalue within 1e-6 of one are redrawn.
pub fn random_iterbs_instance<R: Rng>(rng: &mut R, n: usize, steps: usize) -> (SymOperator, Vec<ProjectionStep>) {
    assert!(steps <= n, "need at least as many dimensions as steps");
    loop {
        let q = random_orthogonal(rng, n);
        let id = DMatrix::<f64>::identity(n, n);
        let mut parts = Vec::with_capacity(steps);
        let mut total = DMatrix::<f64>::zeros(n, n);
        for j in 0..steps {
            let phi = q.column(j).into_owned();
            let p = &phi * phi.transpose();
            let mu = 0.2 + 0.7 * rng.random::<f64>();
            let s = random_symmetric(rng, n);
            let s = s.scaled(0.9 * mu / s.eigenvalues().iter().fold(0.0f64, |a, x| a.max(x.abs())));
            let pi = &id - &p;
            let k_j = &p * mu + &pi * s.matrix() * &pi;
            total += &k_j;
            parts.push((p, mu, k_j));
        }
        let w = random_symmetric(rng, n).scaled(0.6);
        total += w.matrix();
        let k_total = SymOperator::symmetrize_unchecked(total);
        if collision(&k_total.eigenvalues(), 1.0, 1e-6).is_some() {
            continue;
        }
        let steps = parts
            .into_iter()
            .map(|(p, mu, k_j)| {
                let k_j = SymOperator::symmetrize_unchecked(k_j);
                let l_j = SymOperator::symmetrize_unchecked(k_total.matrix() - k_j.matrix());
                ProjectionStep::new(SymOperator::symmetrize_unchecked(p), mu, k_j, l_j, &k_total)
                    .expect("generated step is valid")
            })
            .collect();
        return (k_total, steps);
    }
}
