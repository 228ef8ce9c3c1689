//! Brute-force reference for `‖A‖_{p,q}` on matrices with at most four columns.
//!
//! Samples the `ℓ_1` integer lattice sphere `{k ∈ ℤ^n : Σ|k_i| = L}`, rescales
//! each point onto the `ℓ_p` sphere, and polishes the best points by compass
//! search. Shares no code path with the ascent.

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::matrix::DenseMatrix;
use crate::norm::lp_norm;

pub const MAX_ORACLE_COLS: usize = 4;
pub const MIN_ORACLE_GRID: usize = 64;
const POLISH_TOP: usize = 8;
const POLISH_MIN_STEP: f64 = 1e-11;

fn objective(a: &DenseMatrix, x: &[f64], p: Exponent, q: Exponent) -> f64 {
    let nx = lp_norm(x, p);
    if nx == 0.0 {
        return 0.0;
    }
    let y: Vec<f64> = (0..a.rows())
        .map(|i| a.row(i).iter().zip(x).map(|(u, v)| u * v).sum::<f64>())
        .collect();
    lp_norm(&y, q) / nx
}

fn lattice_sphere(n: usize, radius: i64) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<f64>>) {
        if n == 1 {
            for v in if left == 0 { vec![0] } else { vec![left, -left] } {
                cur.push(v);
                out.push(cur.iter().map(|&k| k as f64).collect());
                cur.pop();
            }
            return;
        }
        for k in 0..=left {
            for v in if k == 0 { vec![0] } else { vec![k, -k] } {
                cur.push(v);
                rec(n - 1, left - k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, radius, &mut Vec::with_capacity(n), &mut out);
    out
}

fn polish(a: &DenseMatrix, p: Exponent, q: Exponent, mut x: Vec<f64>, step: f64) -> f64 {
    let mut best = objective(a, &x, p, q);
    let mut h = step;
    while h > POLISH_MIN_STEP {
        let mut moved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += dir * h;
                let ny = lp_norm(&y, p);
                if ny == 0.0 {
                    continue;
                }
                y.iter_mut().for_each(|v| *v /= ny);
                let v = objective(a, &y, p, q);
                if v > best {
                    best = v;
                    x = y;
                    moved = true;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    best
}

/// Brute-force estimate of `‖A‖_{p,q}` for `cols(A) <= 4`, sampling with
/// lattice radius `grid / (cols - 1)` and polishing the best points.
pub fn pq_norm_oracle(a: &DenseMatrix, p: Exponent, q: Exponent, grid: usize) -> Result<f64> {
    let n = a.cols();
    if n > MAX_ORACLE_COLS {
        return Err(Error::InvalidArgument(format!("oracle supports at most {MAX_ORACLE_COLS} columns, got {n}")));
    }
    if grid < MIN_ORACLE_GRID {
        return Err(Error::InvalidArgument(format!("oracle grid must be at least {MIN_ORACLE_GRID}")));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let radius = (grid / (n - 1).max(1)) as i64;
    let mut scored: Vec<(f64, Vec<f64>)> = lattice_sphere(n, radius)
        .into_iter()
        .map(|k| {
            let nk = lp_norm(&k, p);
            let x: Vec<f64> = k.iter().map(|v| v / nk).collect();
            (objective(a, &x, p, q), x)
        })
        .collect();
    scored.sort_by(|u, v| v.0.total_cmp(&u.0));
    let step = 1.0 / radius as f64;
    Ok(scored
        .into_iter()
        .take(POLISH_TOP)
        .map(|(_, x)| polish(a, p, q, x, step))
        .fold(0.0, f64::max))
}
