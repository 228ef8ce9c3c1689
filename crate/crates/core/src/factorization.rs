//! Lower bounds on factorization constants through `ℓ_r`, and the explicit
//! factorizations that exist outside the obstruction range.
//!
//! If `U = A B` with `B: ℓ_p → ℓ_r` and `A: ℓ_r → ℓ_q`, then
//! `‖B‖_{p,r} ‖A‖_{r,q} >= 1/δ` where `δ = ‖U^{-1}‖_{r',r'}`. Only certified
//! upper bounds on `δ` are used, so the reported constants are genuine lower
//! bounds.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::fss::operator_norm_bound;
use crate::hadamard::{finite_pd_identity, hadamard_matrix, u_block, u_block_inverse, order_size, MAX_ORDER};
use crate::linalg::numerical_rank;
use crate::matrix::DenseMatrix;
use crate::norm::{lp_norm, MixedNormSpace, NormFunctional};
use crate::pqnorm::{pq_norm_upper, DerivationStep};

const SINGULAR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationCertificate {
    pub r: Exponent,
    /// Certified upper bound on `‖U^{-1}‖_{r',r'}`.
    pub delta_upper: f64,
    /// `1 / delta_upper`.
    pub constant_lower: f64,
    /// Any `Ũ` with `‖Ũ - U‖_{p,q}` below this still satisfies `robust_lower`.
    pub perturbation_radius: f64,
    /// `1 / (2 delta_upper)`.
    pub robust_lower: f64,
    pub derivation: Vec<DerivationStep>,
}

fn check_inner_exponent(r: Exponent) -> Result<()> {
    if r.is_one() || r.is_infinite() {
        return Err(Error::ExponentRange(format!("need 1 < r < inf, got r = {r}")));
    }
    Ok(())
}

fn check_invertible(m: &DenseMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() == 0 || numerical_rank(m, SINGULAR_TOLERANCE) < m.rows() {
        return Err(Error::Singular);
    }
    Ok(())
}

/// Certificate for any factorization of `U` through `ℓ_r`, given `U^{-1}`.
/// `p` is the domain exponent of `U`, used only for the perturbation radius.
pub fn factorization_lower_bound(uinv: &DenseMatrix, r: Exponent, p: Exponent) -> Result<FactorizationCertificate> {
    check_inner_exponent(r)?;
    check_invertible(uinv)?;
    let rd = r.dual();
    let ub = pq_norm_upper(uinv, rd, rd);
    let worst_column = (0..uinv.cols()).map(|i| lp_norm(&uinv.column(i), p)).fold(0.0, f64::max);
    let delta_upper = ub.value;
    Ok(FactorizationCertificate {
        r,
        delta_upper,
        constant_lower: 1.0 / delta_upper,
        perturbation_radius: 1.0 / (2.0 * worst_column),
        robust_lower: 1.0 / (2.0 * delta_upper),
        derivation: ub.derivation,
    })
}

/// Where `r` sits relative to the `U_n` family at `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeClass {
    /// `p <= r <= q'`, `p' <= r <= q`, or the trivial `r ∈ {p, q}`: `U`
    /// factors through `ℓ_r`.
    Factorable,
    /// `max(p, q') < r < min(p', q)`: the constants grow without bound.
    Obstructed,
    /// `r < p` or `r > q`.
    OutOfRange,
}

impl fmt::Display for RangeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RangeClass::Factorable => "factorable",
            RangeClass::Obstructed => "obstructed",
            RangeClass::OutOfRange => "out-of-range",
        })
    }
}

/// Exact classification; both endpoints of the factorable ranges count as factorable.
pub fn classify_r(p: Exponent, q: Exponent, r: Exponent) -> RangeClass {
    let (pd, qd) = (p.dual(), q.dual());
    if (p <= r && r <= qd) || (pd <= r && r <= q) || r == p || r == q {
        RangeClass::Factorable
    } else if p.max(qd) < r && r < pd.min(q) {
        RangeClass::Obstructed
    } else {
        RangeClass::OutOfRange
    }
}

fn check_u_exponents(p: Exponent, q: Exponent) -> Result<()> {
    if p > Exponent::TWO || q < Exponent::TWO {
        return Err(Error::ExponentRange(format!("need 1 <= p <= 2 <= q, got p = {p}, q = {q}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u32,
    /// `N = 2^n`.
    pub size: u64,
    pub delta_upper: f64,
    pub constant_lower: f64,
    pub robust_lower: f64,
    pub perturbation_radius: f64,
}

/// Certified `ℓ_r`-factorization constants of `U_1, …, U_{n_max}` at `(p, q)`
/// for `r` in the obstruction range. When `p' > q` the certificate is taken for
/// the adjoint `U_n: ℓ_{q'} → ℓ_{p'}` through `ℓ_{r'}`, which has the same
/// factorization constants.
pub fn u_certificate_growth(p: Exponent, q: Exponent, r: Exponent, n_max: u32) -> Result<Vec<GrowthRow>> {
    check_u_exponents(p, q)?;
    match classify_r(p, q, r) {
        RangeClass::Obstructed => {}
        RangeClass::Factorable => return Err(Error::Factorable(r.to_string())),
        RangeClass::OutOfRange => {
            return Err(Error::ExponentRange(format!("r = {r} lies outside [{}, {}]", p, q)))
        }
    }
    let direct = p.dual() <= q;
    (1..=n_max)
        .map(|n| {
            let cert = if direct {
                factorization_lower_bound(&u_block_inverse(n, p, q)?, r, p)?
            } else {
                factorization_lower_bound(&u_block_inverse(n, q.dual(), p.dual())?, r.dual(), q.dual())?
            };
            Ok(GrowthRow {
                n,
                size: 1u64 << n,
                delta_upper: cert.delta_upper,
                constant_lower: cert.constant_lower,
                robust_lower: cert.robust_lower,
                perturbation_radius: cert.perturbation_radius,
            })
        })
        .collect()
}

/// `U = A · B` with `B: ℓ_p → ℓ_middle` and `A: ℓ_middle → ℓ_q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplicitFactorization {
    pub b: DenseMatrix,
    pub a: DenseMatrix,
    pub middle: Exponent,
    pub b_norm_upper: f64,
    pub a_norm_upper: f64,
    /// `b_norm_upper · a_norm_upper`.
    pub product_norm_upper: f64,
}

impl ExplicitFactorization {
    pub fn product(&self) -> DenseMatrix {
        self.a.matmul(&self.b).expect("factor shapes agree")
    }
}

/// Factors `U_n` through `ℓ_r` for `r` in a factorable range:
/// for `p' <= r <= q` as `N^{-1/p'} H_n` followed by the formal identity
/// `ℓ_r → ℓ_q`; for `p <= r <= q'` as the formal identity `ℓ_p → ℓ_r` followed
/// by `N^{-1/q} H_n`. The trivial splits at `r = q` and `r = p` put `U_n`
/// on one side and the identity on the other.
pub fn explicit_u_factorization(n: u32, p: Exponent, q: Exponent, r: Exponent) -> Result<ExplicitFactorization> {
    check_u_exponents(p, q)?;
    if n == 0 {
        return Err(Error::InvalidArgument("U blocks start at n = 1".into()));
    }
    if n > MAX_ORDER {
        return Err(Error::SizeCap(n));
    }
    let size = 1usize << n;
    let scaled = |e: Exponent| -> Result<DenseMatrix> {
        Ok(hadamard_matrix(n)?.scaled(order_size(n).powf(-e.recip_f64())))
    };
    let (b, a) = if p.dual() <= r && r <= q {
        (scaled(p.dual())?, DenseMatrix::identity(size))
    } else if p <= r && r <= q.dual() {
        (DenseMatrix::identity(size), scaled(q)?)
    } else if r == q {
        (u_block(n, p, q)?, DenseMatrix::identity(size))
    } else if r == p {
        (DenseMatrix::identity(size), u_block(n, p, q)?)
    } else {
        return match classify_r(p, q, r) {
            RangeClass::Obstructed => Err(Error::Obstructed {
                r: r.to_string(),
                lo: p.max(q.dual()).to_string(),
                hi: p.dual().min(q).to_string(),
            }),
            _ => Err(Error::ExponentRange(format!("r = {r} lies outside [{p}, {q}]"))),
        };
    };
    let b_norm_upper = pq_norm_upper(&b, p, r).value;
    let a_norm_upper = pq_norm_upper(&a, r, q).value;
    Ok(ExplicitFactorization { b, a, middle: r, b_norm_upper, a_norm_upper, product_norm_upper: b_norm_upper * a_norm_upper })
}

/// The formal identity `(⊕ ℓ_2^{m_k})_p → (⊕ ℓ_2^{m_k})_q`, `p <= 2 <= q`,
/// factored through `(⊕ ℓ_2^{m_k})_2 = ℓ_2`.
pub fn pd_identity_factorization(block_sizes: Vec<usize>, p: Exponent, q: Exponent) -> Result<ExplicitFactorization> {
    check_u_exponents(p, q)?;
    let pd = finite_pd_identity(block_sizes.clone(), p, q)?;
    let middle = NormFunctional::Mixed(MixedNormSpace::euclidean_blocks(block_sizes, Exponent::TWO)?);
    let (dom, cod) = (NormFunctional::Mixed(pd.domain), NormFunctional::Mixed(pd.codomain));
    let (b_norm_upper, _) = operator_norm_bound(&pd.operator, &dom, &middle)?;
    let (a_norm_upper, _) = operator_norm_bound(&pd.operator, &middle, &cod)?;
    Ok(ExplicitFactorization {
        b: pd.operator.clone(),
        a: pd.operator,
        middle: Exponent::TWO,
        b_norm_upper,
        a_norm_upper,
        product_norm_upper: b_norm_upper * a_norm_upper,
    })
}

/// Largest sampled `(Σ_i |⟨x*, z_i⟩|^r / Σ_i |⟨x*, e_i⟩|^r)^{1/r}` with
/// `z_i = δ^{-1} U^{-1} e_i` and `δ` the certified bound on `‖U^{-1}‖_{r',r'}`.
/// Values at most one are consistent with the domination hypothesis.
pub fn domination_gap(uinv: &DenseMatrix, r: Exponent, samples: usize, rng_seed: u64) -> Result<f64> {
    check_inner_exponent(r)?;
    check_invertible(uinv)?;
    let delta = pq_norm_upper(uinv, r.dual(), r.dual()).value;
    domination_gap_with_delta(uinv, r, delta, samples, rng_seed)
}

/// [`domination_gap`] with a caller-chosen `δ`.
pub fn domination_gap_with_delta(uinv: &DenseMatrix, r: Exponent, delta: f64, samples: usize, rng_seed: u64) -> Result<f64> {
    check_inner_exponent(r)?;
    if !uinv.is_square() {
        return Err(Error::NotSquare { rows: uinv.rows(), cols: uinv.cols() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x: Vec<f64> = (0..uinv.rows()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let denom = lp_norm(&x, r);
        if denom == 0.0 {
            continue;
        }
        let pairings: Vec<f64> = uinv.apply_transpose_unchecked(&x).iter().map(|v| v / delta).collect();
        worst = worst.max(lp_norm(&pairings, r) / denom);
    }
    Ok(worst)
}

/// `(Σ_i ‖U z_i‖_q^r, δ^{-r} m)` for the witnesses `z_i = δ^{-1} U^{-1} e_i`.
pub fn witness_energy(u: &DenseMatrix, uinv: &DenseMatrix, q: Exponent, r: Exponent, delta: f64) -> Result<(f64, f64)> {
    let m = uinv.cols();
    let rf = r.to_f64();
    let product = u.matmul(uinv)?;
    let lhs = (0..m).map(|i| (lp_norm(&product.column(i), q) / delta).powf(rf)).sum();
    Ok((lhs, delta.powf(-rf) * m as f64))
}

/// `u_block` paired with its inverse in the direct range, for callers that
/// need both.
pub fn u_block_pair(n: u32, p: Exponent, q: Exponent) -> Result<(DenseMatrix, DenseMatrix)> {
    Ok((u_block(n, p, q)?, u_block_inverse(n, p, q)?))
}
