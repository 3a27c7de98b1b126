use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linop::SymOperator;
use crate::quad::gauss_legendre;

use super::jacobi::jacobi_pair_coeffs;
use super::separable::SeparableModel;

/// S-wave three-boson kernel `Λ(E)` on the spectator-momentum grid.
///
/// With `ψ₁ = G₀|g⟩F(q)` the bound-state equation for identical bosons reads
///
/// ```text
/// F(q) = 2τ(E − q²) |a₁₂|^{−3} ∫d³q' g(p₁) g(p₂) F(q') / (E − (q² + q'² + 2a₁₁ q·q')/a₁₂²)
/// ```
///
/// with `p₁ = |q' + a₁₁q|/a₁₂`, `p₂ = |q + a₁₁q'|/a₁₂`. After the angular
/// projection and the similarity `√(|τᵢ| wᵢ) qᵢ` the kernel is symmetric and
/// positive; the number of its eigenvalues above one is the number of
/// trimers below `E`.
pub fn three_boson_kernel(model: &SeparableModel, energy: f64) -> Result<SymOperator> {
    if !(energy < 0.0) || !energy.is_finite() {
        return Err(Error::InvalidParameter {
            name: "E",
            reason: format!("must be negative, got {energy}"),
        });
    }
    model.validate()?;
    if model.masses.iter().any(|m| (m / model.masses[0] - 1.0).abs() > 1e-12) {
        return Err(Error::InvalidParameter {
            name: "masses",
            reason: "the three-boson kernel needs equal masses".into(),
        });
    }
    if let Some(ed) = model.dimer_energy() {
        if energy >= ed {
            return Err(Error::InvalidParameter {
                name: "E",
                reason: format!("must lie below the dimer energy {ed}"),
            });
        }
    }
    let jac = jacobi_pair_coeffs(&model.masses)?;
    let (a11, a12) = (jac.a11(), jac.a12());
    let inv_a12_sq = 1.0 / (a12 * a12);
    let pre = 2.0 * PI / a12.abs().powi(3);

    let (q, w) = model.momentum_grid();
    let (x, wx) = gauss_legendre(model.n_x);
    let n = q.len();
    let scale: Vec<f64> = q
        .iter()
        .zip(&w)
        .map(|(&qi, &wi)| (model.tau((qi * qi - energy).sqrt()).abs() * wi).sqrt() * qi)
        .collect();

    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let (qi, qj) = (q[i], q[j]);
            let mut z = 0.0;
            for (xk, wk) in x.iter().zip(&wx) {
                let p1 = (qj * qj + a11 * a11 * qi * qi + 2.0 * a11 * qi * qj * xk)
                    .max(0.0)
                    .sqrt()
                    / a12;
                let p2 = (qi * qi + a11 * a11 * qj * qj + 2.0 * a11 * qi * qj * xk)
                    .max(0.0)
                    .sqrt()
                    / a12;
                let denom = energy - (qi * qi + qj * qj + 2.0 * a11 * qi * qj * xk) * inv_a12_sq;
                z += wk * model.form_factor(p1) * model.form_factor(p2) / denom;
            }
            let v = -2.0 * pre * z * scale[i] * scale[j];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(SymOperator::symmetrize_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_model() -> SeparableModel {
        SeparableModel::at_unitarity(1.0, 50.0, 96).unwrap()
    }

    #[test]
    fn kernel_is_symmetric_and_positive() {
        let k = three_boson_kernel(&small_model(), -0.01).unwrap();
        let asym = (k.matrix() - k.matrix().transpose()).norm();
        assert!(asym <= 1e-10);
        assert!(k.matrix().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn top_eigenvalue_decreases_with_binding() {
        let m = small_model();
        let mut last = f64::INFINITY;
        for e in [-1e-6, -1e-4, -1e-2, -1.0] {
            let top = three_boson_kernel(&m, e).unwrap().max_eigenvalue();
            assert!(top < last);
            last = top;
        }
    }

    #[test]
    fn rejects_nonnegative_energy() {
        assert!(three_boson_kernel(&small_model(), 0.0).is_err());
        let bound = small_model().with_lambda(1.5 * small_model().lambda);
        let ed = bound.dimer_energy().unwrap();
        assert!(three_boson_kernel(&bound, 0.5 * ed).is_err());
    }
}
