//! Small dense linear algebra: one-sided Jacobi SVD and helpers built on it.

use crate::matrix::DenseMatrix;

const MAX_SWEEPS: usize = 80;

/// Singular values (nonincreasing, `min(rows, cols)` of them) together with
/// the full set of right singular vectors, ordered to match. Right singular
/// vectors beyond `min(rows, cols)` span the kernel.
#[derive(Debug, Clone)]
pub struct Svd {
    pub values: Vec<f64>,
    /// Right singular vectors, one per entry, each of length `cols`.
    pub right: Vec<Vec<f64>>,
}

/// One-sided (Hestenes) Jacobi SVD: orthogonalises the columns of `A` by plane
/// rotations accumulated into `V`; singular values are the final column norms.
pub fn jacobi_svd(a: &DenseMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    // Columns below this squared length are numerical zeros; rotating them
    // only churns rounding noise.
    let frob2: f64 = a.as_slice().iter().map(|x| x * x).sum();
    let negligible = f64::EPSILON * f64::EPSILON * frob2 * 1e-4;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for j in 0..n {
            for k in (j + 1)..n {
                let (alpha, beta, gamma) = cols[j].iter().zip(&cols[k]).fold(
                    (0.0, 0.0, 0.0),
                    |(a, b, g), (x, y)| (a + x * x, b + y * y, g + x * y),
                );
                if gamma == 0.0
                    || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt()
                    || alpha.min(beta) <= negligible
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, j, k, c, s);
                rotate(&mut v, j, k, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let values = order.iter().take(m.min(n)).map(|&i| norms[i]).collect();
    let right = order.iter().map(|&i| v[i].clone()).collect();
    Svd { values, right }
}

fn rotate(cols: &mut [Vec<f64>], j: usize, k: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(k);
    let (cj, ck) = (&mut left[j], &mut right[0]);
    for (x, y) in cj.iter_mut().zip(ck.iter_mut()) {
        let (xj, xk) = (*x, *y);
        *x = c * xj - s * xk;
        *y = s * xj + c * xk;
    }
}

/// Basis vectors as the columns of a `len x k` matrix.
pub fn columns_to_matrix(basis: &[Vec<f64>]) -> DenseMatrix {
    let rows = basis.first().map_or(0, Vec::len);
    DenseMatrix::from_fn(rows, basis.len(), |i, j| basis[j][i])
}

/// Numerical rank with relative tolerance `tol` on the singular values.
pub fn numerical_rank(a: &DenseMatrix, tol: f64) -> usize {
    let svd = jacobi_svd(a);
    let top = svd.values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    svd.values.iter().filter(|&&s| s > tol * top).count()
}

/// A unit vector in the kernel of a `r x k` matrix with `r < k`.
pub fn kernel_vector(a: &DenseMatrix) -> Vec<f64> {
    let svd = jacobi_svd(a);
    svd.right.last().cloned().unwrap_or_default()
}

/// Orthonormal basis of the span of `basis` (modified Gram-Schmidt, run twice).
pub fn orthonormalize(basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for b in basis {
        let mut v = b.clone();
        for _ in 0..2 {
            for q in &out {
                let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= d * qi;
                }
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
            out.push(v);
        }
    }
    out
}
