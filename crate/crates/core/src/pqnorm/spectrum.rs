use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::linalg::jacobi_svd;
use crate::matrix::DenseMatrix;
use crate::norm::lp_norm;

/// Singular values `s_1 >= s_2 >= … >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument("singular values must be finite and nonnegative".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("singular values must be nonincreasing".into()));
        }
        Ok(SingularSpectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `ℓ_r` norm of the spectrum.
    pub fn schatten(&self, r: Exponent) -> f64 {
        lp_norm(&self.values, r)
    }

    /// Rescaled so that the `S_q` norm is one; `None` for the zero spectrum.
    pub fn normalized(&self, q: Exponent) -> Option<SingularSpectrum> {
        let n = self.schatten(q);
        (n > 0.0).then(|| SingularSpectrum { values: self.values.iter().map(|v| v / n).collect() })
    }
}

pub fn singular_spectrum(a: &DenseMatrix) -> SingularSpectrum {
    SingularSpectrum { values: jacobi_svd(a).values }
}

/// The Schatten `r`-norm: `ℓ_r` norm of the singular values.
pub fn schatten_norm(a: &DenseMatrix, r: Exponent) -> f64 {
    singular_spectrum(a).schatten(r)
}
