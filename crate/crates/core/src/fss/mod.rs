//! Finite strict singularity, measured numerically.
//!
//! An operator is finitely strictly singular when every `k`-dimensional
//! subspace contains unit vectors it shrinks below any `ε` once `k` is large.
//! The Bernstein width `b_k` is the best infimum over `k`-dimensional
//! subspaces; FSS means `b_k → 0`.

mod flat;
mod spectral;
mod width;

pub use flat::{flat_vector, FlatVectorResult, FLAT_TOLERANCE};
pub use spectral::{hs_composition_bound_check, schatten_dim_bound, HsCheck, SchattenDimBound, NORMALIZATION_TOLERANCE};
pub use width::{
    bernstein_width, injectivity_modulus, ipq_width_upper, operator_norm_bound, BernsteinEstimate, Modulus,
    UpperSource, DESCENT_RESTARTS,
};

use crate::error::{Error, Result};
use crate::linalg::{columns_to_matrix, numerical_rank};

/// Relative singular-value tolerance for the independence check on a basis.
pub const RANK_TOLERANCE: f64 = 1e-10;

fn check_basis(basis: &[Vec<f64>], dim: Option<usize>) -> Result<usize> {
    let k = basis.len();
    let m = basis.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::InvalidArgument("empty basis".into()));
    }
    for v in basis {
        if v.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: v.len() });
        }
    }
    if let Some(d) = dim {
        if d != m {
            return Err(Error::DimensionMismatch { expected: d, found: m });
        }
    }
    if k > m {
        return Err(Error::RankDeficient { rank: m, k });
    }
    let rank = numerical_rank(&columns_to_matrix(basis), RANK_TOLERANCE);
    if rank < k {
        return Err(Error::RankDeficient { rank, k });
    }
    Ok(m)
}
