use crate::error::{Error, Result};

/// Orthogonal change between the Jacobi pairs `(x₁, y₁)` and `(x₂, y₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiCoeffs {
    pub a: [[f64; 2]; 2],
}

impl JacobiCoeffs {
    pub fn a11(&self) -> f64 {
        self.a[0][0]
    }

    pub fn a12(&self) -> f64 {
        self.a[0][1]
    }

    /// `‖aᵀa − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        let a = &self.a;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let dot = a[0][i] * a[0][j] + a[1][i] * a[1][j];
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Coefficients for the pairs `(1, 2)` and `(1, 3)` of an `N`-body system with
/// masses `m`, `M = Σ mᵢ`:
///
/// ```text
/// a₁₁ = −√(m₁m₂ / ((M − m₁)(M − m₂)))
/// a₁₂ =  √(M(M − m₁ − m₂) / ((M − m₁)(M − m₂)))
/// a₂₁ = a₁₂,  a₂₂ = −a₁₁
/// ```
pub fn jacobi_pair_coeffs(masses: &[f64]) -> Result<JacobiCoeffs> {
    if masses.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "masses",
            reason: format!("need at least three particles, got {}", masses.len()),
        });
    }
    if let Some(m) = masses.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "masses",
            reason: format!("masses must be positive, got {m}"),
        });
    }
    let (m1, m2) = (masses[0], masses[1]);
    let total: f64 = masses.iter().sum();
    let denom = (total - m1) * (total - m2);
    let a11 = -(m1 * m2 / denom).sqrt();
    let a12 = (total * (total - m1 - m2) / denom).sqrt();
    let c = JacobiCoeffs {
        a: [[a11, a12], [a12, -a11]],
    };
    let defect = c.orthogonality_defect();
    if defect > 1e-12 {
        return Err(Error::Internal(format!(
            "Jacobi matrix not orthogonal: defect {defect:e}"
        )));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_masses() {
        let c = jacobi_pair_coeffs(&[1.0, 1.0, 1.0]).unwrap();
        assert!((c.a11() + 0.5).abs() < 1e-15);
        assert!((c.a12() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(c.a[1][1], -c.a[0][0]);
        assert_eq!(c.a[1][0], c.a[0][1]);
    }

    #[test]
    fn light_first_particle() {
        let c = jacobi_pair_coeffs(&[1e-12, 1.0, 1.0]).unwrap();
        assert!(c.a11().abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(jacobi_pair_coeffs(&[1.0, 0.0, 1.0]).is_err());
        assert!(jacobi_pair_coeffs(&[1.0, 1.0]).is_err());
    }
}
