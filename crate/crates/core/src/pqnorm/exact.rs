use serde::Serialize;

use crate::exponent::Exponent;
use crate::matrix::DenseMatrix;
use crate::norm::lp_norm;

use super::spectrum::singular_spectrum;

/// The closed forms used for `‖A‖_{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactRule {
    /// `p = 1`: largest `ℓ_q` norm of a column.
    MaxColumnNorm,
    /// `q = ∞`: largest `ℓ_{p'}` norm of a row.
    MaxRowDualNorm,
    /// `p = q = 2`: largest singular value.
    SpectralNorm,
}

impl ExactRule {
    pub fn for_pair(p: Exponent, q: Exponent) -> Option<ExactRule> {
        if p.is_one() {
            Some(ExactRule::MaxColumnNorm)
        } else if q.is_infinite() {
            Some(ExactRule::MaxRowDualNorm)
        } else if p == Exponent::TWO && q == Exponent::TWO {
            Some(ExactRule::SpectralNorm)
        } else {
            None
        }
    }

    pub fn evaluate(self, a: &DenseMatrix, p: Exponent, q: Exponent) -> f64 {
        match self {
            ExactRule::MaxColumnNorm => {
                (0..a.cols()).map(|j| lp_norm(&a.column(j), q)).fold(0.0, f64::max)
            }
            ExactRule::MaxRowDualNorm => {
                let pd = p.dual();
                (0..a.rows()).map(|i| lp_norm(a.row(i), pd)).fold(0.0, f64::max)
            }
            ExactRule::SpectralNorm => singular_spectrum(a).largest(),
        }
    }
}

/// `‖A‖_{p,q}` when `(p, q)` admits a closed form (`p = 1`, `q = ∞`, or
/// `p = q = 2`); `None` otherwise.
pub fn pq_norm_exact(a: &DenseMatrix, p: Exponent, q: Exponent) -> Option<f64> {
    ExactRule::for_pair(p, q).map(|rule| rule.evaluate(a, p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::hadamard_matrix;
    use approx::assert_relative_eq;

    #[test]
    fn hadamard_endpoints() {
        let h2 = hadamard_matrix(2).unwrap();
        assert_eq!(pq_norm_exact(&h2, Exponent::ONE, Exponent::INFINITY), Some(1.0));
        assert_eq!(pq_norm_exact(&h2, Exponent::ONE, Exponent::ONE), Some(4.0));
        assert_eq!(pq_norm_exact(&h2, Exponent::INFINITY, Exponent::INFINITY), Some(4.0));
        assert_relative_eq!(
            pq_norm_exact(&h2, Exponent::TWO, Exponent::TWO).unwrap(),
            2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn not_applicable_elsewhere() {
        let a = DenseMatrix::identity(3);
        assert_eq!(pq_norm_exact(&a, "4/3".parse().unwrap(), "4".parse().unwrap()), None);
        assert_eq!(pq_norm_exact(&a, Exponent::TWO, "4".parse().unwrap()), None);
    }

    #[test]
    fn row_rule_uses_dual_exponent() {
        let a = DenseMatrix::from_rows(&[[3.0, 4.0], [1.0, 1.0]]).unwrap();
        // q = ∞, p = 2: max row ℓ_2 norm
        assert_eq!(pq_norm_exact(&a, Exponent::TWO, Exponent::INFINITY), Some(5.0));
        // p = 1 takes precedence: max column ℓ_∞ norm
        assert_eq!(pq_norm_exact(&a, Exponent::ONE, Exponent::INFINITY), Some(4.0));
        let d = DenseMatrix::from_diagonal(&[1.0, 2.0]);
        assert_eq!(pq_norm_exact(&d, Exponent::ONE, Exponent::ONE), Some(2.0));
    }
}
