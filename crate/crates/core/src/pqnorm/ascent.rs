//! Lower estimates of `‖A‖_{p,q}` by alternating ascent with norming functionals.
//!
//! One step maps `x` (unit in `ℓ_p`) to `y = Ax`, takes the norming functional
//! `z` of `y` in `ℓ_q`, pulls back `w = Aᵀz`, and lets the next iterate be the
//! norming functional of `w` in `ℓ_{p'}`. Hölder gives
//! `‖Ax'‖_q >= ⟨z, Ax'⟩ = ‖w‖_{p'} >= ⟨w, x⟩ = ‖Ax‖_q`, so the quotient never
//! decreases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::exponent::Exponent;
use crate::matrix::DenseMatrix;
use crate::norm::{lp_dual_map, lp_norm};

use super::upper::{pq_norm_upper, DerivationStep};

pub const DEFAULT_SEEDS: usize = 32;
pub const MAX_ASCENT_ITERATIONS: usize = 10_000;
pub const ASCENT_RELATIVE_TOL: f64 = 1e-12;

/// A two-sided estimate `lower <= ‖A‖_{p,q} <= upper`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    /// `‖A·witness‖_q / ‖witness‖_p` equals `lower`.
    pub witness: Vec<f64>,
    pub upper_derivation: Vec<DerivationStep>,
}

impl NormEstimate {
    /// Whether the two sides agree to relative tolerance `tol`.
    pub fn is_tight(&self, tol: f64) -> bool {
        self.upper - self.lower <= tol * self.upper.max(f64::MIN_POSITIVE)
    }
}

/// One ascent run from a given start.
#[derive(Debug, Clone)]
pub struct AscentRun {
    /// Quotient `‖Ax‖_q / ‖x‖_p` after every step, starting with the initial point.
    pub quotients: Vec<f64>,
    pub witness: Vec<f64>,
    pub value: f64,
}

/// Quotient `‖Ax‖_q / ‖x‖_p`, or `0` for `x = 0`.
pub fn rayleigh_quotient(a: &DenseMatrix, x: &[f64], p: Exponent, q: Exponent) -> f64 {
    let nx = lp_norm(x, p);
    if nx == 0.0 {
        return 0.0;
    }
    lp_norm(&a.apply_unchecked(x), q) / nx
}

/// Runs the alternating ascent from `start`.
pub fn ascend(a: &DenseMatrix, p: Exponent, q: Exponent, start: &[f64]) -> AscentRun {
    let pd = p.dual();
    let n0 = lp_norm(start, p);
    if n0 == 0.0 {
        return AscentRun { quotients: vec![0.0], witness: start.to_vec(), value: 0.0 };
    }
    let mut x: Vec<f64> = start.iter().map(|v| v / n0).collect();
    let mut value = rayleigh_quotient(a, &x, p, q);
    let mut quotients = vec![value];

    for _ in 0..MAX_ASCENT_ITERATIONS {
        let y = a.apply_unchecked(&x);
        let z = lp_dual_map(&y, q);
        let w = a.apply_transpose_unchecked(&z);
        let next = lp_dual_map(&w, pd);
        let nx = lp_norm(&next, p);
        if nx == 0.0 {
            break;
        }
        let next: Vec<f64> = next.iter().map(|v| v / nx).collect();
        let nv = rayleigh_quotient(a, &next, p, q);
        quotients.push(nv);
        let improved = nv > value;
        if improved {
            x = next;
        }
        if !improved || nv - value <= ASCENT_RELATIVE_TOL * value.abs() {
            value = value.max(nv);
            break;
        }
        value = nv;
    }
    AscentRun { quotients, witness: x, value }
}

/// Start points: all coordinate vectors, the flat vector, then `seeds`
/// Gaussian vectors drawn from a ChaCha stream seeded by `rng_seed`.
pub fn ascent_starts(dim: usize, seeds: usize, rng_seed: u64) -> Vec<Vec<f64>> {
    let mut starts = Vec::with_capacity(dim + 1 + seeds);
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        starts.push(e);
    }
    starts.push(vec![1.0; dim]);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..seeds {
        starts.push((0..dim).map(|_| StandardNormal.sample(&mut rng)).collect());
    }
    starts
}

/// Lower estimate of `‖A‖_{p,q}` by multi-start ascent, paired with the
/// certified upper bound. Deterministic given `rng_seed`; among equal values the
/// earliest start wins.
pub fn pq_norm_lower(a: &DenseMatrix, p: Exponent, q: Exponent, seeds: usize, rng_seed: u64) -> NormEstimate {
    let upper = pq_norm_upper(a, p, q);
    let n = a.cols();
    let mut witness = vec![0.0; n];
    if let Some(w) = witness.first_mut() {
        *w = 1.0;
    }
    let mut lower = 0.0;
    if !a.is_zero() {
        for start in ascent_starts(n, seeds, rng_seed) {
            let run = ascend(a, p, q, &start);
            if run.value > lower {
                lower = run.value;
                witness = run.witness;
            }
        }
        lower = rayleigh_quotient(a, &witness, p, q);
    }
    NormEstimate { lower, upper: upper.value, witness, upper_derivation: upper.derivation }
}
