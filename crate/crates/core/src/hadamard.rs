//! Sylvester Hadamard matrices and the block operators built from them.
//!
//! `H_n` is `2^n x 2^n` with `H_0 = (1)` and `H_{n+1} = (H_n H_n; H_n -H_n)`.
//! The block `U_n = N^{-a} H_n` (with `N = 2^n`) uses the scaling exponent
//! `a = 1/min(p', q)`; the `r`-scaled variant uses `a = 1/r'`.

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{ratio_to_f64, Exponent};
use crate::matrix::DenseMatrix;
use crate::norm::MixedNormSpace;

/// Largest supported order: `H_14` is `16384 x 16384`.
pub const MAX_ORDER: u32 = 14;

/// The `2^n x 2^n` Sylvester Hadamard matrix, built by repeated doubling.
pub fn hadamard_matrix(n: u32) -> Result<DenseMatrix> {
    if n > MAX_ORDER {
        return Err(Error::SizeCap(n));
    }
    let mut h = DenseMatrix::identity(1);
    for _ in 0..n {
        let m = h.rows();
        h = DenseMatrix::from_fn(2 * m, 2 * m, |i, j| {
            let v = h.get(i % m, j % m);
            if i >= m && j >= m {
                -v
            } else {
                v
            }
        });
    }
    Ok(h)
}

fn block_size(n: u32) -> f64 {
    (1u64 << n) as f64
}

/// `N^{-e}` with `N = 2^n`, computed as `2^{-n·e}`.
fn size_power(n: u32, e: Rational64) -> f64 {
    (-(n as f64) * ratio_to_f64(e)).exp2()
}

fn check_u_range(p: Exponent, q: Exponent) -> Result<()> {
    if p > Exponent::TWO || q < Exponent::TWO {
        return Err(Error::ExponentRange(format!("need 1 <= p <= 2 <= q, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// Scaling exponent `1/min(p', q)` of the `U` family.
pub fn u_scaling_exponent(p: Exponent, q: Exponent) -> Rational64 {
    p.dual().min(q).recip()
}

/// `U_n = N^{-1/min(p', q)} H_n` for `1 <= p <= 2 <= q`, `n >= 1`.
pub fn u_block(n: u32, p: Exponent, q: Exponent) -> Result<DenseMatrix> {
    check_u_range(p, q)?;
    if n == 0 {
        return Err(Error::InvalidArgument("U blocks start at n = 1".into()));
    }
    Ok(hadamard_matrix(n)?.scaled(size_power(n, u_scaling_exponent(p, q))))
}

/// The `r`-scaled block `U^{(r)}_n = N^{-1/r'} H_n`, which has `‖·‖_{r,r'} <= 1`
/// for `1 <= r <= 2`.
pub fn u_block_r_scaled(n: u32, r: Exponent) -> Result<DenseMatrix> {
    Ok(hadamard_matrix(n)?.scaled(size_power(n, r.dual().recip())))
}

/// `U_n^{-1} = N^{-1/p} H_n`, available when `p' <= q` (then `U_n = N^{-1/p'} H_n`).
pub fn u_block_inverse(n: u32, p: Exponent, q: Exponent) -> Result<DenseMatrix> {
    check_u_range(p, q)?;
    if p.dual() > q {
        return Err(Error::UseDuality);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("U blocks start at n = 1".into()));
    }
    Ok(hadamard_matrix(n)?.scaled(size_power(n, p.recip())))
}

/// The family `U_1, …, U_{max_n}` for fixed `p <= 2 <= q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UBlockFamily {
    pub p: Exponent,
    pub q: Exponent,
    pub max_n: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub scaling: Rational64,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl UBlockFamily {
    pub fn new(p: Exponent, q: Exponent, max_n: u32) -> Result<Self> {
        check_u_range(p, q)?;
        if max_n > MAX_ORDER {
            return Err(Error::SizeCap(max_n));
        }
        Ok(UBlockFamily { p, q, max_n, scaling: u_scaling_exponent(p, q) })
    }

    /// `U^{(r)}` family, scaling `1/r'`, viewed from `ℓ_r` to `ℓ_{r'}`.
    pub fn r_scaled(r: Exponent, max_n: u32) -> Result<Self> {
        if max_n > MAX_ORDER {
            return Err(Error::SizeCap(max_n));
        }
        Ok(UBlockFamily { p: r, q: r.dual(), max_n, scaling: r.dual().recip() })
    }

    pub fn block(&self, n: u32) -> Result<DenseMatrix> {
        if n == 0 || n > self.max_n {
            return Err(Error::InvalidArgument(format!("block index {n} outside 1..={}", self.max_n)));
        }
        Ok(hadamard_matrix(n)?.scaled(size_power(n, self.scaling)))
    }

    pub fn blocks(&self) -> Result<Vec<DenseMatrix>> {
        (1..=self.max_n).map(|n| self.block(n)).collect()
    }

    /// The truncated direct sum `U_1 ⊕ … ⊕ U_{max_n}`.
    pub fn direct_sum(&self) -> Result<BlockOperator> {
        block_direct_sum(self.blocks()?, self.p, self.q)
    }
}

/// Indices `j_1, …, j_n` with `H_n e_{j_i} = r_i`, the `i`-th Rademacher sign
/// pattern (alternating runs of `+1`/`-1` of length `2^{n-i}`, starting with
/// `+1`). Found by comparing against every column.
pub fn rademacher_columns(n: u32) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need n >= 1".into()));
    }
    let h = hadamard_matrix(n)?;
    let size = h.rows();
    (1..=n)
        .map(|i| {
            let run = 1usize << (n - i);
            let pattern: Vec<f64> = (0..size).map(|k| if (k / run).is_multiple_of(2) { 1.0 } else { -1.0 }).collect();
            (0..size)
                .find(|&j| (0..size).all(|k| h.get(k, j) == pattern[k]))
                .ok_or_else(|| Error::InvalidArgument(format!("Rademacher pattern {i} not found")))
        })
        .collect()
}

/// A block-diagonal operator `T = ⊕ T_k` from `(⊕ ℓ_p)` to `(⊕ ℓ_q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    blocks: Vec<DenseMatrix>,
    domain_outer: Exponent,
    codomain_outer: Exponent,
}

impl BlockOperator {
    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }

    pub fn domain_outer(&self) -> Exponent {
        self.domain_outer
    }

    pub fn codomain_outer(&self) -> Exponent {
        self.codomain_outer
    }

    /// Starting `(row, col)` offset of each block, plus the total size at the end.
    pub fn offsets(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.blocks.len() + 1);
        let (mut r, mut c) = (0, 0);
        out.push((r, c));
        for b in &self.blocks {
            r += b.rows();
            c += b.cols();
            out.push((r, c));
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let &(rows, cols) = self.offsets().last().expect("offsets are nonempty");
        let mut m = DenseMatrix::zeros(rows, cols);
        for (b, &(r0, c0)) in self.blocks.iter().zip(&self.offsets()) {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    m.set(r0 + i, c0 + j, b.get(i, j));
                }
            }
        }
        m
    }
}

/// Assembles the direct sum of `blocks`; requires `p <= q`, where the norm of
/// the sum is the largest block norm.
pub fn block_direct_sum(blocks: Vec<DenseMatrix>, p: Exponent, q: Exponent) -> Result<BlockOperator> {
    if blocks.is_empty() {
        return Err(Error::EmptyBlocks);
    }
    if p > q {
        return Err(Error::ExponentRange(format!("block-diagonal norms need p <= q, got p = {p}, q = {q}")));
    }
    Ok(BlockOperator { blocks, domain_outer: p, codomain_outer: q })
}

/// The identity matrix viewed from `(⊕ ℓ_2^{m_k})_p` to `(⊕ ℓ_2^{m_k})_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdIdentity {
    pub domain: MixedNormSpace,
    pub codomain: MixedNormSpace,
    pub operator: DenseMatrix,
}

impl PdIdentity {
    /// Index range of the largest block (the first one among equals).
    pub fn largest_block(&self) -> std::ops::Range<usize> {
        let ranges = self.domain.block_ranges();
        let mut best = 0;
        for (i, r) in ranges.iter().enumerate() {
            if r.len() > ranges[best].len() {
                best = i;
            }
        }
        ranges[best].clone()
    }

    /// Unit coordinate vectors spanning the largest block.
    pub fn largest_block_basis(&self) -> Vec<Vec<f64>> {
        let dim = self.domain.dimension();
        self.largest_block()
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e
            })
            .collect()
    }

    /// `‖x‖_codomain / ‖x‖_domain`.
    pub fn quotient(&self, x: &[f64]) -> Result<f64> {
        let d = self.domain.norm(x)?;
        if d == 0.0 {
            return Ok(0.0);
        }
        Ok(self.codomain.norm(x)? / d)
    }
}

/// Finite truncation of the formal identity between `ℓ_p`- and `ℓ_q`-sums of
/// Euclidean blocks. For `p <= q` its norm is one.
pub fn finite_pd_identity(block_sizes: Vec<usize>, p: Exponent, q: Exponent) -> Result<PdIdentity> {
    if p > q {
        return Err(Error::ExponentRange(format!("need p <= q, got p = {p}, q = {q}")));
    }
    let domain = MixedNormSpace::euclidean_blocks(block_sizes.clone(), p)?;
    let codomain = MixedNormSpace::euclidean_blocks(block_sizes, q)?;
    let operator = DenseMatrix::identity(domain.dimension());
    Ok(PdIdentity { domain, codomain, operator })
}

/// `C: ℓ^{2^n} → ℓ^{2^{n+1}}` and `D: ℓ^{2^{n+1}} → ℓ^{2^n}` with
/// `D U_{n+1} C = U_n`, `‖C‖_{p,p} <= 1`, `‖D‖_{q,q} <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalvingFactorization {
    pub c: DenseMatrix,
    pub d: DenseMatrix,
    /// Built from the adjoint construction (the `q > p'` case).
    pub transposed: bool,
}

/// Embedding `e_i^{(n)} ↦ e_i^{(n+1)}`.
pub fn halving_embedding(n: u32) -> DenseMatrix {
    let m = 1usize << n;
    DenseMatrix::from_fn(2 * m, m, |i, j| if i == j { 1.0 } else { 0.0 })
}

/// Averaging projection onto vectors whose two halves agree.
pub fn averaging_projection(n: u32) -> DenseMatrix {
    let m = 1usize << n;
    DenseMatrix::from_fn(2 * m, 2 * m, |i, j| if i % m == j % m { 0.5 } else { 0.0 })
}

/// `B_n P_n`: average the halves, then send `f_i + f_{i+2^n} ↦ 2^{1/q} f_i`.
pub fn halving_compression(n: u32, q: Exponent) -> DenseMatrix {
    let m = 1usize << n;
    let c = q.recip_f64().exp2() * 0.5;
    DenseMatrix::from_fn(m, 2 * m, |i, j| if j % m == i { c } else { 0.0 })
}

/// Factors `U_n` through `U_{n+1}`. For `q <= p'` this is the direct
/// embed/average construction; for `q > p'` the construction is applied to the
/// adjoint (exponents `(q', p')`, same matrices since `H_n` is symmetric) and
/// transposed back.
pub fn halving_factorization(n: u32, p: Exponent, q: Exponent) -> Result<HalvingFactorization> {
    check_u_range(p, q)?;
    if n + 1 > MAX_ORDER {
        return Err(Error::SizeCap(n + 1));
    }
    if q <= p.dual() {
        Ok(HalvingFactorization { c: halving_embedding(n), d: halving_compression(n, q), transposed: false })
    } else {
        let adjoint_d = halving_compression(n, p.dual());
        let adjoint_c = halving_embedding(n);
        Ok(HalvingFactorization { c: adjoint_d.transpose(), d: adjoint_c.transpose(), transposed: true })
    }
}

/// Composite `(D, C)` with `D U_m C = U_n` for `n < m`.
pub fn iterated_halving(n: u32, m: u32, p: Exponent, q: Exponent) -> Result<(DenseMatrix, DenseMatrix)> {
    if n >= m {
        return Err(Error::InvalidArgument(format!("need n < m, got n = {n}, m = {m}")));
    }
    let first = halving_factorization(n, p, q)?;
    let (mut d, mut c) = (first.d, first.c);
    for k in (n + 1)..m {
        let step = halving_factorization(k, p, q)?;
        d = d.matmul(&step.d)?;
        c = step.c.matmul(&c)?;
    }
    Ok((d, c))
}

/// Size `N = 2^n` as a float.
pub fn order_size(n: u32) -> f64 {
    block_size(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::lp_norm;
    use approx::assert_relative_eq;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn walsh_entry(i: usize, j: usize) -> f64 {
        if (i & j).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    #[test]
    fn small_orders() {
        assert_eq!(hadamard_matrix(0).unwrap().as_slice(), &[1.0]);
        assert_eq!(hadamard_matrix(1).unwrap().as_slice(), &[1.0, 1.0, 1.0, -1.0]);
        assert_eq!(hadamard_matrix(MAX_ORDER + 1), Err(Error::SizeCap(MAX_ORDER + 1)));
    }

    #[test]
    fn matches_walsh_formula() {
        for n in 0..=6 {
            let h = hadamard_matrix(n).unwrap();
            let size = 1 << n;
            assert_eq!(h, DenseMatrix::from_fn(size, size, walsh_entry));
        }
    }

    #[test]
    fn square_is_scaled_identity_in_integers() {
        let h = hadamard_matrix(3).unwrap();
        let size = h.rows();
        for i in 0..size {
            for j in 0..size {
                let s: i64 = (0..size).map(|k| h.get(i, k) as i64 * h.get(k, j) as i64).sum();
                assert_eq!(s, if i == j { 8 } else { 0 });
            }
        }
    }

    #[test]
    fn u_block_examples() {
        let u = u_block(2, e("4/3"), e("4")).unwrap();
        let expect = hadamard_matrix(2).unwrap().scaled(1.0 / 2f64.sqrt());
        assert!(u.max_abs_diff(&expect) < 1e-15);
        let u1 = u_block(1, Exponent::TWO, Exponent::TWO).unwrap();
        let gram = u1.transpose().matmul(&u1).unwrap();
        assert!(gram.max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
        assert!(u_block(1, e("3"), e("4")).is_err());
        assert!(u_block(1, e("4/3"), e("3/2")).is_err());
        assert!(u_block(0, e("4/3"), e("4")).is_err());
    }

    #[test]
    fn u_inverse_examples() {
        let (p, q) = (e("4/3"), e("4"));
        let inv = u_block_inverse(2, p, q).unwrap();
        assert!(inv.max_abs_diff(&hadamard_matrix(2).unwrap().scaled(4f64.powf(-0.75))) < 1e-15);
        let prod = u_block(2, p, q).unwrap().matmul(&inv).unwrap();
        assert!(prod.max_abs_diff(&DenseMatrix::identity(4)) < 1e-12);
        for n in 1..=6 {
            let inv = u_block_inverse(n, p, q).unwrap();
            let worst = (0..inv.cols()).map(|i| lp_norm(&inv.column(i), p)).fold(0.0, f64::max);
            assert_relative_eq!(worst, 1.0, max_relative = 1e-12);
        }
        let inv = u_block_inverse(1, Exponent::TWO, Exponent::TWO).unwrap();
        assert!(inv.max_abs_diff(&u_block(1, Exponent::TWO, Exponent::TWO).unwrap().transpose()) < 1e-15);
        assert_eq!(u_block_inverse(2, e("4/3"), e("3")), Err(Error::UseDuality));
    }

    #[test]
    fn r_scaled_family() {
        let fam = UBlockFamily::r_scaled(e("4/3"), 3).unwrap();
        let b = fam.block(3).unwrap();
        assert!(b.max_abs_diff(&hadamard_matrix(3).unwrap().scaled(8f64.powf(-0.25))) < 1e-15);
        assert!(fam.block(4).is_err());
        let fam = UBlockFamily::new(e("4/3"), e("4"), 3).unwrap();
        assert_eq!(fam.scaling, Rational64::new(1, 4));
        assert_eq!(fam.direct_sum().unwrap().to_dense().rows(), 2 + 4 + 8);
    }

    #[test]
    fn rademacher_examples() {
        assert_eq!(rademacher_columns(1).unwrap(), vec![1]);
        let h = hadamard_matrix(2).unwrap();
        let cols = rademacher_columns(2).unwrap();
        assert_eq!(h.column(cols[0]), vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(h.column(cols[1]), vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(rademacher_columns(4).unwrap(), vec![8, 4, 2, 1]);
    }

    #[test]
    fn direct_sum_layout() {
        let blocks = vec![DenseMatrix::identity(1).scaled(2.0), DenseMatrix::from_rows(&[[1.0, 2.0]]).unwrap()];
        let op = block_direct_sum(blocks, Exponent::ONE, Exponent::TWO).unwrap();
        assert_eq!(op.offsets(), vec![(0, 0), (1, 1), (2, 3)]);
        let d = op.to_dense();
        assert_eq!(d.as_slice(), &[2.0, 0.0, 0.0, 0.0, 1.0, 2.0]);
        assert_eq!(block_direct_sum(vec![], Exponent::ONE, Exponent::TWO), Err(Error::EmptyBlocks));
        assert!(block_direct_sum(vec![DenseMatrix::identity(1)], Exponent::TWO, Exponent::ONE).is_err());
    }

    #[test]
    fn pd_identity_single_block_witness() {
        let pd = finite_pd_identity(vec![1, 2, 3], e("4/3"), e("4")).unwrap();
        assert_eq!(pd.largest_block(), 3..6);
        for b in pd.domain.block_ranges() {
            let mut x = vec![0.0; 6];
            for (k, i) in b.enumerate() {
                x[i] = 1.0 + k as f64;
            }
            assert_relative_eq!(pd.quotient(&x).unwrap(), 1.0, max_relative = 1e-15);
        }
        let pd = finite_pd_identity(vec![1], Exponent::ONE, Exponent::INFINITY).unwrap();
        assert_eq!(pd.quotient(&[-3.0]).unwrap(), 1.0);
        assert!(finite_pd_identity(vec![1], e("4"), e("2")).is_err());
    }

    #[test]
    fn halving_examples() {
        let f = halving_factorization(1, Exponent::TWO, Exponent::TWO).unwrap();
        assert!(!f.transposed);
        assert_eq!((f.c.rows(), f.c.cols(), f.d.rows(), f.d.cols()), (4, 2, 2, 4));
        let lhs = f.d.matmul(&u_block(2, Exponent::TWO, Exponent::TWO).unwrap()).unwrap().matmul(&f.c).unwrap();
        assert!(lhs.max_abs_diff(&u_block(1, Exponent::TWO, Exponent::TWO).unwrap()) < 1e-12);

        for n in 0..=5 {
            let p = averaging_projection(n);
            assert_eq!(p.matmul(&p).unwrap(), p);
        }
    }

    #[test]
    fn halving_both_regimes() {
        for (p, q) in [("4/3", "2"), ("2", "2"), ("4/3", "4"), ("3/2", "4"), ("1", "inf"), ("2", "inf")] {
            let (p, q) = (e(p), e(q));
            for n in 1..=4 {
                let f = halving_factorization(n, p, q).unwrap();
                assert_eq!(f.transposed, q > p.dual());
                let lhs = f.d.matmul(&u_block(n + 1, p, q).unwrap()).unwrap().matmul(&f.c).unwrap();
                assert!(lhs.max_abs_diff(&u_block(n, p, q).unwrap()) < 1e-12, "p={p} q={q} n={n}");
            }
        }
    }

    #[test]
    fn iterated_composite() {
        let (p, q) = (e("4/3"), e("2"));
        let (d, c) = iterated_halving(1, 4, p, q).unwrap();
        let lhs = d.matmul(&u_block(4, p, q).unwrap()).unwrap().matmul(&c).unwrap();
        assert!(lhs.max_abs_diff(&u_block(1, p, q).unwrap()) < 1e-12);
        assert!(iterated_halving(3, 3, p, q).is_err());
    }
}
