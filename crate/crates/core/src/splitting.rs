//! Banded truncation and the split of a banded matrix into two block-diagonal
//! pieces.
//!
//! A support `Γ = {(i, j) : i <= M_j, j <= N_i}` with strictly increasing
//! bounds yields interlaced cut points `k_n`, `l_n`. Every admissible entry
//! then lies in a diagonal block of `Δ` (cuts `k`) or of `Λ` (cuts `l`), so
//! `S = W + V` with `W` supported on `Δ` and `V` on `Λ`.
//!
//! Sequences use the 1-based convention of the bounds themselves; matrix
//! positions in errors are 0-based.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::matrix::DenseMatrix;
use crate::norm::lp_norm;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandedSupport {
    /// `M_j`: column `j` may be nonzero in rows `1..=M_j`.
    m_bounds: Vec<usize>,
    /// `N_i`: row `i` may be nonzero in columns `1..=N_i`.
    n_bounds: Vec<usize>,
    size: usize,
}

fn strictly_increasing_positive(v: &[usize]) -> bool {
    v.first().is_none_or(|&x| x >= 1) && v.windows(2).all(|w| w[0] < w[1])
}

impl BandedSupport {
    pub fn new(m_bounds: Vec<usize>, n_bounds: Vec<usize>) -> Result<Self> {
        let size = m_bounds.len();
        if n_bounds.len() != size {
            return Err(Error::DimensionMismatch { expected: size, found: n_bounds.len() });
        }
        if size == 0 {
            return Err(Error::InvalidArgument("empty support".into()));
        }
        if !strictly_increasing_positive(&m_bounds) || !strictly_increasing_positive(&n_bounds) {
            return Err(Error::InvalidArgument("band bounds must be positive and strictly increasing".into()));
        }
        Ok(BandedSupport { m_bounds, n_bounds, size })
    }

    /// `M_j = N_j = j + w` on an `m x m` matrix.
    pub fn uniform(size: usize, width: usize) -> Result<Self> {
        let b: Vec<usize> = (1..=size).map(|j| j + width).collect();
        Self::new(b.clone(), b)
    }

    pub fn m_bounds(&self) -> &[usize] {
        &self.m_bounds
    }

    pub fn n_bounds(&self) -> &[usize] {
        &self.n_bounds
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Whether the 0-based position `(i, j)` lies in `Γ`.
    pub fn admissible(&self, i: usize, j: usize) -> bool {
        i < self.size && j < self.size && i < self.m_bounds[j] && j < self.n_bounds[i]
    }

    /// `M_t` and `N_t` with 1-based `t`, capped at the matrix size.
    fn bounds_at(&self, t: usize) -> usize {
        self.m_bounds[t - 1].max(self.n_bounds[t - 1]).min(self.size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandedTruncation {
    pub s: DenseMatrix,
    pub support: BandedSupport,
    /// Certified bound on `‖R - S‖_{p,q}`.
    pub certified_error: f64,
    /// Per-column limit on the `ℓ_q` norm of a discarded column tail.
    pub column_budget: f64,
    /// Per-row limit on the `ℓ_{p'}` norm of a discarded row tail.
    pub row_budget: f64,
}

/// Smallest `t` such that the tail `v[t..]` has norm at most `budget`.
fn cut_for_tail(v: &[f64], e: Exponent, budget: f64) -> usize {
    let mut t = v.len();
    while t > 0 && lp_norm(&v[t - 1..], e) <= budget {
        t -= 1;
    }
    t
}

fn enforce_increasing(bounds: &mut [usize]) {
    let mut prev = 0;
    for b in bounds.iter_mut() {
        *b = (*b).max(prev + 1);
        prev = *b;
    }
}

/// Truncates a square `R` to a band with `‖R - S‖_{p,q} <= eps`.
///
/// Half the budget goes to column tails (`ℓ_q` norm at most
/// `(eps/2) m^{-1/p'}` each, so Hölder bounds their sum) and half to row
/// tails (`ℓ_{p'}` norm at most `(eps/2) m^{-1/q}` each). The reported error is
/// the same two envelopes evaluated on what was actually discarded.
pub fn truncate_to_banded(r: &DenseMatrix, eps: f64, p: Exponent, q: Exponent) -> Result<BandedTruncation> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if p > q {
        return Err(Error::ExponentRange(format!("need p <= q, got p = {p}, q = {q}")));
    }
    if !r.is_square() || r.rows() == 0 {
        return Err(Error::NotSquare { rows: r.rows(), cols: r.cols() });
    }
    let m = r.rows();
    let pd = p.dual();
    let mf = m as f64;
    let column_budget = 0.5 * eps * mf.powf(-pd.recip_f64());
    let row_budget = 0.5 * eps * mf.powf(-q.recip_f64());

    let mut m_bounds: Vec<usize> = (0..m).map(|j| cut_for_tail(&r.column(j), q, column_budget)).collect();
    let mut n_bounds: Vec<usize> = (0..m).map(|i| cut_for_tail(r.row(i), pd, row_budget)).collect();
    enforce_increasing(&mut m_bounds);
    enforce_increasing(&mut n_bounds);
    let support = BandedSupport::new(m_bounds, n_bounds)?;

    let s = DenseMatrix::from_fn(m, m, |i, j| if support.admissible(i, j) { r.get(i, j) } else { 0.0 });
    // Column tails below M_j, then whatever the row bounds removed above it.
    let column_tails: Vec<f64> = (0..m)
        .map(|j| lp_norm(&(0..m).map(|i| if i >= support.m_bounds[j] { r.get(i, j) } else { 0.0 }).collect::<Vec<_>>(), q))
        .collect();
    let row_tails: Vec<f64> = (0..m)
        .map(|i| {
            let tail: Vec<f64> = (0..m)
                .map(|j| if i < support.m_bounds[j] && j >= support.n_bounds[i] { r.get(i, j) } else { 0.0 })
                .collect();
            lp_norm(&tail, pd)
        })
        .collect();
    let certified_error = lp_norm(&column_tails, pd) + lp_norm(&row_tails, q);
    Ok(BandedTruncation { s, support, certified_error, column_budget, row_budget })
}

/// `k_0 = 0`, `l_0 = 1`, `k_{n+1} = max(M_{l_n}, N_{l_n})`,
/// `l_{n+1} = max(M_{k_{n+1}}, N_{k_{n+1}})`, each forced to exceed its
/// predecessor and capped at the size, until both reach it.
pub fn interlaced_cut_points(support: &BandedSupport) -> (Vec<usize>, Vec<usize>) {
    let m = support.size;
    let (mut k, mut l) = (vec![0], vec![1.min(m)]);
    while *k.last().unwrap() < m || *l.last().unwrap() < m {
        let (kn, ln) = (*k.last().unwrap(), *l.last().unwrap());
        let next_k = support.bounds_at(ln).max(kn + 1).min(m);
        let next_l = support.bounds_at(next_k).max(ln + 1).min(m);
        k.push(next_k);
        l.push(next_l);
    }
    (k, l)
}

/// Block label of every 0-based coordinate for a cut sequence. Coordinates
/// up to the first cut get no block.
fn block_labels(cuts: &[usize], m: usize) -> Vec<Option<usize>> {
    let mut labels = vec![None; m];
    for (n, w) in cuts.windows(2).enumerate() {
        for label in labels.iter_mut().take(w[1]).skip(w[0]) {
            *label = Some(n);
        }
    }
    labels
}

fn block_ranges(cuts: &[usize]) -> Vec<Range<usize>> {
    cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| w[0]..w[1]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSplit {
    pub w: DenseMatrix,
    pub v: DenseMatrix,
    pub k_cuts: Vec<usize>,
    pub l_cuts: Vec<usize>,
}

impl BlockSplit {
    /// 0-based index ranges of the diagonal blocks of `W`.
    pub fn delta_blocks(&self) -> Vec<Range<usize>> {
        block_ranges(&self.k_cuts)
    }

    /// 0-based index ranges of the diagonal blocks of `V`.
    pub fn lambda_blocks(&self) -> Vec<Range<usize>> {
        block_ranges(&self.l_cuts)
    }

    /// The square diagonal blocks of `W`.
    pub fn w_blocks(&self) -> Vec<DenseMatrix> {
        self.delta_blocks().into_iter().map(|b| self.w.submatrix(b.start, b.end, b.start, b.end)).collect()
    }
}

/// Splits `S` into `W` (entries of `S` on `Δ`) and `V = S - W`, after
/// checking that `S` lives on `Γ` and that `Γ ⊆ Δ ∪ Λ`.
pub fn split_block_diagonal(s: &DenseMatrix, support: &BandedSupport) -> Result<BlockSplit> {
    let m = support.size;
    if s.rows() != m || s.cols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: if s.rows() != m { s.rows() } else { s.cols() } });
    }
    for i in 0..m {
        for j in 0..m {
            if s.get(i, j) != 0.0 && !support.admissible(i, j) {
                return Err(Error::Inadmissible { row: i, col: j });
            }
        }
    }
    let (k_cuts, l_cuts) = interlaced_cut_points(support);
    let (kb, lb) = (block_labels(&k_cuts, m), block_labels(&l_cuts, m));
    let in_delta = |i: usize, j: usize| kb[i].is_some() && kb[i] == kb[j];
    let in_lambda = |i: usize, j: usize| lb[i].is_some() && lb[i] == lb[j];
    for i in 0..m {
        for j in 0..m {
            if support.admissible(i, j) && !in_delta(i, j) && !in_lambda(i, j) {
                return Err(Error::Uncovered { row: i, col: j });
            }
        }
    }
    let w = DenseMatrix::from_fn(m, m, |i, j| if in_delta(i, j) { s.get(i, j) } else { 0.0 });
    let v = DenseMatrix::from_fn(m, m, |i, j| if in_delta(i, j) { 0.0 } else { s.get(i, j) });
    Ok(BlockSplit { w, v, k_cuts, l_cuts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pqnorm::{pq_norm_lower, pq_norm_upper};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn random_support(rng: &mut ChaCha8Rng, m: usize) -> BandedSupport {
        let draw = |rng: &mut ChaCha8Rng| {
            let mut b: Vec<usize> = (1..=m).map(|j| j + rng.random_range(0..4)).collect();
            enforce_increasing(&mut b);
            b
        };
        let mb = draw(rng);
        let nb = draw(rng);
        BandedSupport::new(mb, nb).unwrap()
    }

    fn random_banded(rng: &mut ChaCha8Rng, support: &BandedSupport) -> DenseMatrix {
        let m = support.size();
        DenseMatrix::from_fn(m, m, |i, j| if support.admissible(i, j) { rng.random_range(-1.0..1.0) } else { 0.0 })
    }

    #[test]
    fn support_validation() {
        assert!(BandedSupport::new(vec![1, 1], vec![1, 2]).is_err());
        assert!(BandedSupport::new(vec![0, 1], vec![1, 2]).is_err());
        assert!(BandedSupport::new(vec![1, 2], vec![1]).is_err());
        let s = BandedSupport::new(vec![2, 5], vec![1, 3]).unwrap();
        assert!(s.admissible(0, 0) && s.admissible(1, 1) && !s.admissible(0, 1) && s.admissible(1, 0));
    }

    #[test]
    fn cut_points_shifted_band() {
        let (k, l) = interlaced_cut_points(&BandedSupport::uniform(8, 1).unwrap());
        assert_eq!(k, vec![0, 2, 4, 6, 8]);
        assert_eq!(l, vec![1, 3, 5, 7, 8]);
    }

    #[test]
    fn cut_points_diagonal() {
        let (k, l) = interlaced_cut_points(&BandedSupport::uniform(5, 0).unwrap());
        assert_eq!(k, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(l, vec![1, 2, 3, 4, 5, 5]);
    }

    #[test]
    fn cut_points_stabilize_at_size() {
        let s = BandedSupport::new(vec![3, 10, 11, 12], vec![2, 9, 10, 11]).unwrap();
        let (k, l) = interlaced_cut_points(&s);
        assert_eq!(*k.last().unwrap(), 4);
        assert_eq!(*l.last().unwrap(), 4);
        assert!(k.iter().chain(&l).all(|&c| c <= 4));
    }

    #[test]
    fn diagonal_matrices_survive() {
        let d = DenseMatrix::from_diagonal(&[1.0, -2.0, 3.0, 0.5]);
        for eps in [1e-6, 0.1, 10.0] {
            let t = truncate_to_banded(&d, eps, e("4/3"), e("4")).unwrap();
            assert_eq!(t.s, d);
            assert_eq!(t.certified_error, 0.0);
        }
        let support = BandedSupport::uniform(4, 0).unwrap();
        let split = split_block_diagonal(&d, &support).unwrap();
        assert_eq!(split.w, d);
        assert!(split.v.is_zero());
    }

    #[test]
    fn already_banded_is_kept() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let support = BandedSupport::uniform(10, 2).unwrap();
        let s = random_banded(&mut rng, &support);
        let t = truncate_to_banded(&s, 0.01, e("1"), e("2")).unwrap();
        assert_eq!(t.s, s);
        assert_eq!(t.certified_error, 0.0);
    }

    #[test]
    fn block_diagonal_input_has_no_remainder() {
        let support = BandedSupport::uniform(8, 1).unwrap();
        let (k, _) = interlaced_cut_points(&support);
        let labels = block_labels(&k, 8);
        let s = DenseMatrix::from_fn(8, 8, |i, j| if labels[i] == labels[j] { (i + 2 * j + 1) as f64 } else { 0.0 });
        let split = split_block_diagonal(&s, &support).unwrap();
        assert!(split.v.is_zero());
        assert_eq!(split.w, s);
    }

    #[test]
    fn rejects_bad_inputs() {
        let support = BandedSupport::uniform(3, 0).unwrap();
        let s = DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(split_block_diagonal(&s, &support), Err(Error::Inadmissible { row: 0, col: 1 }));
        assert!(truncate_to_banded(&s, 0.0, e("1"), e("2")).is_err());
        assert!(truncate_to_banded(&s, 0.1, e("3"), e("2")).is_err());
        assert!(truncate_to_banded(&DenseMatrix::zeros(2, 3), 0.1, e("1"), e("2")).is_err());
    }

    #[test]
    fn envelope_dominates_discarded_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let (p, q) = (e("4/3"), e("4"));
        for _ in 0..10 {
            let r = DenseMatrix::from_fn(20, 20, |i, j| {
                let decay = 0.6f64.powi((i as i32 - j as i32).abs());
                decay * rng.random_range(-1.0..1.0)
            });
            let t = truncate_to_banded(&r, 0.1, p, q).unwrap();
            assert!(t.certified_error <= 0.1 * (1.0 + 1e-12));
            let diff = r.sub(&t.s).unwrap();
            let lower = pq_norm_lower(&diff, p, q, 4, 0).lower;
            assert!(lower <= t.certified_error * (1.0 + 1e-9) + 1e-15);
        }
    }

    #[test]
    fn w_matches_its_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (p, q) = (e("4/3"), e("4"));
        for m in [6, 9, 12] {
            let support = random_support(&mut rng, m);
            let s = random_banded(&mut rng, &support);
            let split = split_block_diagonal(&s, &support).unwrap();
            let whole = pq_norm_lower(&split.w, p, q, 16, 1).lower;
            let best_block =
                split.w_blocks().iter().map(|b| pq_norm_lower(b, p, q, 16, 1).lower).fold(0.0, f64::max);
            assert!((whole - best_block).abs() <= 1e-6 * best_block.max(1.0), "{whole} vs {best_block}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn random_banded_splits(m in 1usize..40, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let support = random_support(&mut rng, m);
            let s = random_banded(&mut rng, &support);
            let split = split_block_diagonal(&s, &support).unwrap();
            let (kb, lb) = (block_labels(&split.k_cuts, m), block_labels(&split.l_cuts, m));
            for i in 0..m {
                for j in 0..m {
                    prop_assert_eq!((split.w.get(i, j) + split.v.get(i, j)).to_bits(), s.get(i, j).to_bits());
                    if split.w.get(i, j) != 0.0 {
                        prop_assert!(kb[i].is_some() && kb[i] == kb[j]);
                    }
                    if split.v.get(i, j) != 0.0 {
                        prop_assert!(lb[i].is_some() && lb[i] == lb[j]);
                    }
                }
            }
        }

        #[test]
        fn compression_norm_control(m in 2usize..14, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let support = random_support(&mut rng, m);
            let s = random_banded(&mut rng, &support);
            let split = split_block_diagonal(&s, &support).unwrap();
            for (p, q) in [(e("4/3"), e("4")), (e("1"), e("2")), (e("2"), e("2"))] {
                let upper = pq_norm_upper(&s, p, q).value;
                prop_assert!(pq_norm_lower(&split.w, p, q, 4, seed).lower <= upper + 1e-9);
                prop_assert!(pq_norm_lower(&split.v, p, q, 4, seed).lower <= 2.0 * upper + 1e-9);
            }
        }
    }
}
