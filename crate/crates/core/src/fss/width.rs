//! Injectivity moduli of an operator on a subspace and Bernstein widths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{ratio_to_f64, Exponent};
use crate::linalg::{columns_to_matrix, jacobi_svd, orthonormalize};
use crate::matrix::DenseMatrix;
use crate::norm::{MixedNormSpace, NormFunctional};
use crate::pqnorm::pq_norm_upper;

use super::{check_basis, flat_vector};

pub const DESCENT_RESTARTS: usize = 64;
const MAX_DESCENT_STEPS: usize = 400;
const MIN_STEP: f64 = 1e-12;

/// `k^{1/q - 1/p}`: every `k`-dimensional subspace holds a flat vector on
/// which the identity `ℓ_p → ℓ_q` shrinks by at least this much.
pub fn ipq_width_upper(k: usize, p: Exponent, q: Exponent) -> Result<f64> {
    if p >= q {
        return Err(Error::ExponentRange(format!("need p < q, got p = {p}, q = {q}")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok((k as f64).powf(ratio_to_f64(q.recip() - p.recip())))
}

/// `inf ‖Ax‖ / ‖x‖` over a subspace, as found by descent, with the minimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Modulus {
    pub value: f64,
    /// Normalized to domain norm one.
    pub witness: Vec<f64>,
}

struct Objective<'a> {
    a: &'a DenseMatrix,
    q: DenseMatrix,
    dom: &'a NormFunctional,
    cod: &'a NormFunctional,
}

impl Objective<'_> {
    fn value(&self, c: &[f64]) -> f64 {
        let x = self.q.apply_unchecked(c);
        let n = self.dom.norm(&x).unwrap_or(0.0);
        if n == 0.0 {
            return f64::INFINITY;
        }
        self.cod.norm(&self.a.apply_unchecked(&x)).unwrap_or(0.0) / n
    }

    /// Subgradient of `‖AQc‖ / ‖Qc‖` via the two norming functionals.
    fn gradient(&self, c: &[f64]) -> Vec<f64> {
        let x = self.q.apply_unchecked(c);
        let y = self.a.apply_unchecked(&x);
        let (n, m) = (self.dom.norm(&x).unwrap_or(0.0), self.cod.norm(&y).unwrap_or(0.0));
        let gm = self.q.apply_transpose_unchecked(&self.a.apply_transpose_unchecked(&self.cod.dual_map(&y).unwrap_or_default()));
        let gn = self.q.apply_transpose_unchecked(&self.dom.dual_map(&x).unwrap_or_default());
        gm.iter().zip(&gn).map(|(a, b)| (a * n - m * b) / (n * n)).collect()
    }

    fn descend(&self, start: &[f64]) -> (f64, Vec<f64>) {
        let mut c = unit(start);
        let mut val = self.value(&c);
        let mut step = 0.25;
        for _ in 0..MAX_DESCENT_STEPS {
            if val == 0.0 {
                break;
            }
            let mut g = self.gradient(&c);
            let along: f64 = g.iter().zip(&c).map(|(a, b)| a * b).sum();
            g.iter_mut().zip(&c).for_each(|(gi, ci)| *gi -= along * ci);
            let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gnorm == 0.0 || !gnorm.is_finite() {
                break;
            }
            let mut moved = false;
            while step >= MIN_STEP {
                let trial = unit(&c.iter().zip(&g).map(|(ci, gi)| ci - step * gi / gnorm).collect::<Vec<_>>());
                let tv = self.value(&trial);
                if tv < val {
                    moved = val - tv > 1e-15 * val;
                    c = trial;
                    val = tv;
                    step = (step * 2.0).min(1.0);
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        (val, c)
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / n).collect()
}

fn check_spaces(a: &DenseMatrix, dom: &NormFunctional, cod: &NormFunctional) -> Result<()> {
    dom.check_dimension(a.cols())?;
    cod.check_dimension(a.rows())
}

/// Descent on the unit sphere of (orthonormalized) coefficients from the
/// flat vector of the basis, the basis directions and random starts. The
/// result is an upper estimate of the true infimum, realized by `witness`.
pub fn injectivity_modulus(
    a: &DenseMatrix,
    basis: &[Vec<f64>],
    dom: &NormFunctional,
    cod: &NormFunctional,
    rng_seed: u64,
) -> Result<Modulus> {
    check_basis(basis, Some(a.cols()))?;
    check_spaces(a, dom, cod)?;
    let k = basis.len();
    let q = columns_to_matrix(&orthonormalize(basis));
    let objective = Objective { a, q, dom, cod };

    let mut starts = Vec::with_capacity(DESCENT_RESTARTS);
    if let Ok(flat) = flat_vector(basis) {
        starts.push(objective.q.apply_transpose_unchecked(&flat.x));
    }
    for j in 0..k {
        let mut e = vec![0.0; k];
        e[j] = 1.0;
        starts.push(e);
    }
    for b in basis {
        starts.push(objective.q.apply_transpose_unchecked(b));
    }
    starts.truncate(DESCENT_RESTARTS);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    while starts.len() < DESCENT_RESTARTS {
        starts.push((0..k).map(|_| StandardNormal.sample(&mut rng)).collect());
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in &starts {
        let (v, c) = objective.descend(s);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, c));
        }
    }
    let (value, c) = best.expect("at least one start");
    let x = objective.q.apply_unchecked(&c);
    let n = dom.norm(&x)?;
    Ok(Modulus { value, witness: x.iter().map(|v| v / n).collect() })
}

/// Where the upper end of a [`BernsteinEstimate`] comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperSource {
    /// `b_k(A) <= ‖A‖`, with the norm bounded by interpolation or through `ℓ_2`.
    OperatorNorm,
    /// `b_k(I_{p,q}) <= k^{1/q-1/p}`.
    IdentityWidth,
    /// The identity between block sums with outer exponents `p <= q` has norm one.
    MixedIdentity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernsteinEstimate {
    pub k: usize,
    pub lower: f64,
    pub witness_basis: Vec<Vec<f64>>,
    pub upper: f64,
    pub upper_source: UpperSource,
}

fn is_identity(a: &DenseMatrix) -> bool {
    a.is_square() && *a == DenseMatrix::identity(a.rows())
}

fn power_gap(n: f64, e: f64) -> f64 {
    if e > 0.0 {
        n.powf(e)
    } else {
        1.0
    }
}

/// `c` with `‖x‖_2 <= c ‖x‖_f` (`to_two`) or `‖x‖_f <= c ‖x‖_2` (otherwise) on `ℝ^d`.
fn euclidean_constant(f: &NormFunctional, d: usize, to_two: bool) -> f64 {
    let sign = if to_two { 1.0 } else { -1.0 };
    let gap = |s: Exponent, len: usize| power_gap(len as f64, sign * (0.5 - s.recip_f64()));
    match f {
        NormFunctional::Plain(p) => gap(*p, d),
        NormFunctional::Mixed(s) => {
            let inner = s.block_sizes().iter().map(|&m| gap(s.inner(), m)).fold(1.0, f64::max);
            inner * gap(s.outer(), s.block_sizes().len())
        }
    }
}

fn mixed_identity(a: &DenseMatrix, d: &MixedNormSpace, c: &MixedNormSpace) -> bool {
    is_identity(a) && d.block_sizes() == c.block_sizes() && d.inner() == c.inner() && d.outer() <= c.outer()
}

/// A certified upper bound on `‖A‖_{dom→cod}`.
pub fn operator_norm_bound(a: &DenseMatrix, dom: &NormFunctional, cod: &NormFunctional) -> Result<(f64, UpperSource)> {
    check_spaces(a, dom, cod)?;
    Ok(match (dom, cod) {
        (NormFunctional::Plain(p), NormFunctional::Plain(q)) => (pq_norm_upper(a, *p, *q).value, UpperSource::OperatorNorm),
        (NormFunctional::Mixed(d), NormFunctional::Mixed(c)) if mixed_identity(a, d, c) => (1.0, UpperSource::MixedIdentity),
        _ => {
            let s1 = jacobi_svd(a).values.first().copied().unwrap_or(0.0);
            let bound = euclidean_constant(dom, a.cols(), true) * s1 * euclidean_constant(cod, a.rows(), false);
            (bound, UpperSource::OperatorNorm)
        }
    })
}

/// Searches `k`-dimensional subspaces for a large injectivity modulus.
///
/// Candidates, in order: contiguous coordinate windows, the top-`k` right
/// singular vectors, `budget` random spans, then `budget` random perturbations
/// of the best span so far. `lower` is the best modulus found.
pub fn bernstein_width(
    a: &DenseMatrix,
    k: usize,
    dom: &NormFunctional,
    cod: &NormFunctional,
    budget: usize,
    rng_seed: u64,
) -> Result<BernsteinEstimate> {
    let n = a.cols();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= {n}, got k = {k}")));
    }
    check_spaces(a, dom, cod)?;
    let (mut upper, mut upper_source) = operator_norm_bound(a, dom, cod)?;
    if let (NormFunctional::Plain(p), NormFunctional::Plain(q)) = (dom, cod) {
        if is_identity(a) && p < q {
            let w = ipq_width_upper(k, *p, *q)?;
            if w < upper {
                upper = w;
                upper_source = UpperSource::IdentityWidth;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut candidates: Vec<Vec<Vec<f64>>> = Vec::new();
    for s in 0..=(n - k) {
        candidates.push(
            (s..s + k)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    e
                })
                .collect(),
        );
    }
    candidates.push(jacobi_svd(a).right.into_iter().take(k).collect());
    for _ in 0..budget {
        candidates.push((0..k).map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).collect());
    }

    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    let consider = |basis: Vec<Vec<f64>>, seed: u64, best: &mut Option<(f64, Vec<Vec<f64>>)>| {
        if let Ok(m) = injectivity_modulus(a, &basis, dom, cod, seed) {
            if best.as_ref().is_none_or(|(v, _)| m.value > *v) {
                *best = Some((m.value, basis));
            }
        }
    };
    for (i, basis) in candidates.into_iter().enumerate() {
        consider(basis, rng_seed.wrapping_add(i as u64), &mut best);
    }
    for _ in 0..budget {
        let Some((_, current)) = best.clone() else { break };
        let scale = 0.1;
        let perturbed = current
            .iter()
            .map(|v| v.iter().map(|x| x + scale * rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        consider(perturbed, rng.random(), &mut best);
    }

    let (lower, witness_basis) = best.unwrap_or((0.0, Vec::new()));
    Ok(BernsteinEstimate { k, lower, witness_basis, upper, upper_source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{finite_pd_identity, u_block};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn plain(s: &str) -> NormFunctional {
        NormFunctional::plain(e(s))
    }

    #[test]
    fn width_formula() {
        assert_eq!(ipq_width_upper(16, e("1"), e("2")).unwrap(), 0.25);
        assert_eq!(ipq_width_upper(1, e("4/3"), e("4")).unwrap(), 1.0);
        assert_relative_eq!(ipq_width_upper(81, e("4/3"), e("4")).unwrap(), 1.0 / 9.0, max_relative = 1e-15);
        assert!(ipq_width_upper(4, e("2"), e("2")).is_err());
        assert!(ipq_width_upper(4, e("3"), e("2")).is_err());
    }

    #[test]
    fn identity_in_euclidean_norm() {
        let basis = vec![vec![1.0, 2.0, 0.0, 1.0], vec![0.0, 1.0, -1.0, 3.0]];
        let m = injectivity_modulus(&DenseMatrix::identity(4), &basis, &plain("2"), &plain("2"), 1).unwrap();
        assert_relative_eq!(m.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn identity_modulus_below_flat_bound() {
        let basis: Vec<Vec<f64>> = (0..3).map(|j| (0..10).map(|i| ((i * 7 + j * 3) % 5) as f64 - 2.0 + 0.1 * j as f64).collect()).collect();
        for (p, q) in [("1", "2"), ("4/3", "4")] {
            let m = injectivity_modulus(&DenseMatrix::identity(10), &basis, &plain(p), &plain(q), 3).unwrap();
            assert!(m.value <= ipq_width_upper(3, e(p), e(q)).unwrap() * (1.0 + 1e-6));
        }
    }

    #[test]
    fn pd_identity_fixes_euclidean_blocks() {
        let pd = finite_pd_identity(vec![1, 2, 3, 4], e("4/3"), e("4")).unwrap();
        let dom = NormFunctional::Mixed(pd.domain.clone());
        let cod = NormFunctional::Mixed(pd.codomain.clone());
        let m = injectivity_modulus(&pd.operator, &pd.largest_block_basis(), &dom, &cod, 0).unwrap();
        assert!((m.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identity_width_at_one_two() {
        let est = bernstein_width(&DenseMatrix::identity(16), 16, &plain("1"), &plain("2"), 2, 7).unwrap();
        assert_eq!(est.upper, 0.25);
        assert_eq!(est.upper_source, UpperSource::IdentityWidth);
        assert!((0.2..=0.25 * (1.0 + 1e-9)).contains(&est.lower), "{}", est.lower);
    }

    #[test]
    fn hadamard_column_has_width_one() {
        let (p, q) = (e("4/3"), e("4"));
        let u = u_block(3, p, q).unwrap();
        let est = bernstein_width(&u, 1, &NormFunctional::Plain(p), &NormFunctional::Plain(q), 2, 0).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-9 && (est.upper - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_operator_has_zero_width() {
        let z = DenseMatrix::zeros(5, 5);
        for k in 1..=5 {
            let est = bernstein_width(&z, k, &plain("2"), &plain("3"), 1, 0).unwrap();
            assert_eq!((est.lower, est.upper), (0.0, 0.0));
        }
    }

    #[test]
    fn mixed_identity_upper_is_one() {
        let pd = finite_pd_identity(vec![1, 2, 3], e("1"), e("2")).unwrap();
        let (dom, cod) = (NormFunctional::Mixed(pd.domain), NormFunctional::Mixed(pd.codomain));
        let est = bernstein_width(&pd.operator, 3, &dom, &cod, 0, 0).unwrap();
        assert_eq!((est.upper, est.upper_source), (1.0, UpperSource::MixedIdentity));
        assert!((est.lower - 1.0).abs() < 1e-9);
        let m = injectivity_modulus(&pd.operator, &est.witness_basis, &dom, &cod, 0).unwrap();
        assert!((m.value - est.lower).abs() < 1e-6);
    }

    #[test]
    fn chain_bound_dominates_mixed_norms() {
        let a = DenseMatrix::from_rows(&[[1.0, -2.0, 0.5], [0.0, 1.0, 3.0]]).unwrap();
        let dom = NormFunctional::Mixed(MixedNormSpace::new(vec![1, 2], e("3"), e("4/3")).unwrap());
        let cod = plain("inf");
        let (bound, _) = operator_norm_bound(&a, &dom, &cod).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let x: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut rng)).collect();
            let r = cod.norm(&a.apply(&x).unwrap()).unwrap() / dom.norm(&x).unwrap();
            assert!(r <= bound * (1.0 + 1e-12));
        }
        assert!(operator_norm_bound(&a, &dom, &NormFunctional::Mixed(MixedNormSpace::euclidean_blocks(vec![3], e("2")).unwrap())).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn identity_widths_never_exceed_flat_bound(k in 1usize..5, extra in 0usize..12, seed in any::<u64>()) {
            let m = k + extra;
            let est = bernstein_width(&DenseMatrix::identity(m), k, &plain("1"), &plain("2"), 3, seed).unwrap();
            prop_assert!(est.lower <= est.upper * (1.0 + 1e-9));
        }
    }
}
