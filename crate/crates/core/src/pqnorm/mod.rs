//! Two-sided estimates of `‖A‖_{p,q} = sup{‖Ax‖_q : ‖x‖_p <= 1}` and Schatten norms.

mod ascent;
mod exact;
mod oracle;
mod spectrum;
mod upper;

pub use ascent::{
    ascend, ascent_starts, pq_norm_lower, rayleigh_quotient, AscentRun, NormEstimate, ASCENT_RELATIVE_TOL,
    DEFAULT_SEEDS, MAX_ASCENT_ITERATIONS,
};
pub use exact::{pq_norm_exact, ExactRule};
pub use oracle::{pq_norm_oracle, MAX_ORACLE_COLS, MIN_ORACLE_GRID};
pub use spectrum::{schatten_norm, singular_spectrum, SingularSpectrum};
pub use upper::{pq_norm_upper, pq_norm_upper_interpolate, DerivationStep, Interpolated, UpperBound};
