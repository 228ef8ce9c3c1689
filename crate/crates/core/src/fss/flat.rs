//! Vectors attaining their sup norm on many coordinates.
//!
//! Every `k`-dimensional subspace of `ℝ^m` contains a vector `x` with
//! `|x_i| = ‖x‖_∞` for at least `k` indices. The construction is inductive:
//! given `x` flat on `I`, pick `y` in the subspace vanishing on `I`, and move
//! along `x + s·y` until a new coordinate reaches the current maximum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{columns_to_matrix, kernel_vector};
use crate::matrix::DenseMatrix;

use super::check_basis;

/// Coordinate `i` counts as flat when `|x_i| >= δ (1 - FLAT_TOLERANCE)`.
pub const FLAT_TOLERANCE: f64 = 1e-7;
const BISECTION_WIDTH: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatVectorResult {
    pub x: Vec<f64>,
    /// `x = Σ coefficients[j] · basis[j]`.
    pub coefficients: Vec<f64>,
    /// Sorted flat set `I`.
    pub flat_indices: Vec<usize>,
    /// `δ = ‖x‖_∞`.
    pub flat_value: f64,
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn off_sup(x: &[f64], y: &[f64], s: f64, flat: &[bool]) -> f64 {
    x.iter()
        .zip(y)
        .zip(flat)
        .filter(|(_, &f)| !f)
        .fold(0.0f64, |m, ((a, b), _)| m.max((a + s * b).abs()))
}

pub fn flat_vector(basis: &[Vec<f64>]) -> Result<FlatVectorResult> {
    let m = check_basis(basis, None)?;
    let k = basis.len();
    let b = columns_to_matrix(basis);

    let mut coefficients = vec![0.0; k];
    coefficients[0] = 1.0;
    let mut x = b.apply_unchecked(&coefficients);
    let mut delta = sup(&x);
    let mut flat: Vec<bool> = x.iter().map(|v| v.abs() >= delta * (1.0 - FLAT_TOLERANCE)).collect();
    let mut size = flat.iter().filter(|&&f| f).count();

    while size < k {
        let rows: Vec<usize> = (0..m).filter(|&i| flat[i]).collect();
        let restricted = DenseMatrix::from_fn(rows.len(), k, |r, j| b.get(rows[r], j));
        let mut dir = kernel_vector(&restricted);
        let mut y = b.apply_unchecked(&dir);
        let scale = off_sup(&y, &y, 0.0, &flat);
        if scale == 0.0 {
            return Err(Error::ToleranceBreakdown(size));
        }
        dir.iter_mut().for_each(|c| *c /= scale);
        y.iter_mut().for_each(|c| *c /= scale);

        // f(s) = max_{j ∉ I} |x_j + s y_j| is convex with f(0) < δ; grow then bisect.
        let (mut lo, mut hi) = (0.0, delta.max(f64::MIN_POSITIVE));
        while off_sup(&x, &y, hi, &flat) < delta {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > BISECTION_WIDTH * delta {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if off_sup(&x, &y, mid, &flat) < delta {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        for (c, d) in coefficients.iter_mut().zip(&dir) {
            *c += hi * d;
        }
        x = b.apply_unchecked(&coefficients);
        delta = sup(&x);
        for (i, f) in flat.iter_mut().enumerate() {
            *f = *f || x[i].abs() >= delta * (1.0 - FLAT_TOLERANCE);
        }
        let grown = flat.iter().filter(|&&f| f).count();
        if grown <= size {
            return Err(Error::ToleranceBreakdown(size));
        }
        size = grown;
    }

    let flat_indices = (0..m).filter(|&i| flat[i]).collect();
    Ok(FlatVectorResult { x, coefficients, flat_indices, flat_value: delta })
}
