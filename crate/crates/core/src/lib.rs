//! Operator norms between finite `ℓ_p` spaces, Sylvester–Hadamard block
//! operators, finite-strict-singularity moduli, factorization certificates and
//! banded block splitting.
//!
//! Exponents are exact rationals (or `∞`); only norm values are floating point.
//!
//! ```
//! use lpq::{hadamard::u_block, pqnorm::pq_norm_lower, Exponent};
//!
//! let (p, q): (Exponent, Exponent) = ("4/3".parse().unwrap(), "4".parse().unwrap());
//! let u = u_block(3, p, q).unwrap();
//! let est = pq_norm_lower(&u, p, q, 8, 0);
//! assert!((est.lower - 1.0).abs() < 1e-9 && (est.upper - 1.0).abs() < 1e-9);
//! ```

pub mod error;
pub mod exponent;
pub mod factorization;
pub mod fss;
pub mod hadamard;
pub mod linalg;
pub mod matrix;
pub mod norm;
pub mod pqnorm;
pub mod splitting;
pub mod verification;

pub use error::{Error, Result};
pub use exponent::{dual_exponent, Exponent};
pub use factorization::{ExplicitFactorization, FactorizationCertificate, RangeClass};
pub use fss::{BernsteinEstimate, FlatVectorResult};
pub use hadamard::{BlockOperator, PdIdentity};
pub use matrix::{matrix_apply, DenseMatrix};
pub use norm::{lp_norm, vector_norm, MixedNormSpace, NormFunctional};
pub use pqnorm::{NormEstimate, SingularSpectrum, UpperBound};
pub use splitting::{BandedSupport, BlockSplit};
