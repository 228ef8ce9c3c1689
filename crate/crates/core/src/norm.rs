//! Plain `ℓ_p` norms, mixed `(⊕ ℓ_s^{m_k})_r` norms, and their norming functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;

/// `‖x‖_p`. The `1` and `∞` cases are direct; otherwise entries are scaled by
/// the largest magnitude before powering.
pub fn lp_norm(x: &[f64], p: Exponent) -> f64 {
    let amax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || amax == 0.0 {
        return amax;
    }
    if p.is_one() {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == Exponent::TWO {
        let s: f64 = x.iter().map(|v| (v / amax) * (v / amax)).sum();
        return amax * s.sqrt();
    }
    let pf = p.to_f64();
    let s: f64 = x.iter().map(|v| (v.abs() / amax).powf(pf)).sum();
    amax * s.powf(1.0 / pf)
}

/// The norming functional of `x` in `ℓ_p`: a vector `z` with `⟨z, x⟩ = ‖x‖_p`
/// and `‖z‖_{p'} = 1`. Entries are `sign(x_i) (|x_i| / ‖x‖_p)^{p-1}`; for
/// `p = ∞` it is the signed unit vector at the first maximal coordinate and for
/// `p = 1` it is `sign(x)` with `sign(0) = 0`. Returns zeros for `x = 0`.
pub fn lp_dual_map(x: &[f64], p: Exponent) -> Vec<f64> {
    let norm = lp_norm(x, p);
    let mut z = vec![0.0; x.len()];
    if norm == 0.0 {
        return z;
    }
    if p.is_infinite() {
        let mut best = 0;
        for (i, v) in x.iter().enumerate() {
            if v.abs() > x[best].abs() {
                best = i;
            }
        }
        z[best] = x[best].signum();
        return z;
    }
    if p.is_one() {
        for (zi, &xi) in z.iter_mut().zip(x) {
            if xi != 0.0 {
                *zi = xi.signum();
            }
        }
        return z;
    }
    let pm1 = p.to_f64() - 1.0;
    for (zi, &xi) in z.iter_mut().zip(x) {
        if xi != 0.0 {
            *zi = xi.signum() * (xi.abs() / norm).powf(pm1);
        }
    }
    z
}

/// Block structure `(m_1, …, m_K)` with an inner exponent on each block and an
/// outer exponent across blocks: the finite model of `(⊕ ℓ_inner^{m_k})_outer`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedNormSpace {
    block_sizes: Vec<usize>,
    inner: Exponent,
    outer: Exponent,
}

impl MixedNormSpace {
    pub fn new(block_sizes: Vec<usize>, inner: Exponent, outer: Exponent) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::EmptyBlocks);
        }
        if block_sizes.contains(&0) {
            return Err(Error::InvalidArgument("block sizes must be positive".into()));
        }
        Ok(MixedNormSpace { block_sizes, inner, outer })
    }

    /// Euclidean blocks with outer exponent `outer`.
    pub fn euclidean_blocks(block_sizes: Vec<usize>, outer: Exponent) -> Result<Self> {
        Self::new(block_sizes, Exponent::TWO, outer)
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn inner(&self) -> Exponent {
        self.inner
    }

    pub fn outer(&self) -> Exponent {
        self.outer
    }

    pub fn dimension(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Half-open coordinate ranges of the blocks.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.block_sizes
            .iter()
            .map(|&m| {
                let r = start..start + m;
                start += m;
                r
            })
            .collect()
    }

    fn block_norms(&self, x: &[f64]) -> Vec<f64> {
        self.block_ranges().into_iter().map(|r| lp_norm(&x[r], self.inner)).collect()
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(lp_norm(&self.block_norms(x), self.outer))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        let d = self.dimension();
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x.len() });
        }
        Ok(())
    }

    fn dual_map(&self, x: &[f64]) -> Vec<f64> {
        let weights = lp_dual_map(&self.block_norms(x), self.outer);
        let mut z = vec![0.0; x.len()];
        for (r, w) in self.block_ranges().into_iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            let d = lp_dual_map(&x[r.clone()], self.inner);
            for (zi, di) in z[r].iter_mut().zip(d) {
                *zi = w * di;
            }
        }
        z
    }
}

/// A norm on `ℝ^d`: either a plain `ℓ_p` norm or a mixed block norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormFunctional {
    Plain(Exponent),
    Mixed(MixedNormSpace),
}

impl NormFunctional {
    pub fn plain(p: Exponent) -> Self {
        NormFunctional::Plain(p)
    }

    /// Fixed dimension of a mixed norm; plain norms accept any length.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            NormFunctional::Plain(_) => None,
            NormFunctional::Mixed(s) => Some(s.dimension()),
        }
    }

    pub fn check_dimension(&self, d: usize) -> Result<()> {
        match self.dimension() {
            Some(e) if e != d => Err(Error::DimensionMismatch { expected: e, found: d }),
            _ => Ok(()),
        }
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        match self {
            NormFunctional::Plain(p) => Ok(lp_norm(x, *p)),
            NormFunctional::Mixed(s) => s.norm(x),
        }
    }

    /// Norming functional: `⟨z, x⟩ = ‖x‖` and dual norm of `z` equal to one.
    pub fn dual_map(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            NormFunctional::Plain(p) => Ok(lp_dual_map(x, *p)),
            NormFunctional::Mixed(s) => {
                s.check_dim(x)?;
                Ok(s.dual_map(x))
            }
        }
    }
}

/// `‖x‖_f` for a plain or mixed norm.
pub fn vector_norm(x: &[f64], f: &NormFunctional) -> Result<f64> {
    f.norm(x)
}
