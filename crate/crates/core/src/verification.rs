//! The acceptance checks, runnable from tests and from the command line.
//!
//! Each criterion is a deterministic function of a seed and produces a
//! [`Check`] with the worst observed value, the bound it was held to, and a
//! short human-readable detail line.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::exponent::Exponent;
use crate::factorization::{classify_r, explicit_u_factorization, u_certificate_growth, RangeClass};
use crate::fss::{bernstein_width, flat_vector, hs_composition_bound_check, schatten_dim_bound};
use crate::hadamard::{finite_pd_identity, hadamard_matrix, halving_factorization, rademacher_columns, u_block};
use crate::matrix::DenseMatrix;
use crate::norm::{lp_norm, NormFunctional};
use crate::pqnorm::{pq_norm_exact, pq_norm_lower, pq_norm_oracle, pq_norm_upper, SingularSpectrum};
use crate::splitting::{split_block_diagonal, BandedSupport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    /// The identity or inequality being checked.
    pub paper_anchor: String,
    /// Worst value observed (its meaning is given by `detail`).
    pub computed: f64,
    /// Bound the worst value was held to.
    pub bound: f64,
    pub pass: bool,
    pub detail: String,
    pub runtime_ms: f64,
}

/// A criterion: id, short name, suite, anchor and implementation.
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub suite: &'static str,
    pub anchor: &'static str,
    run: fn(u64) -> Outcome,
}

impl Criterion {
    pub fn run(&self, seed: u64) -> Check {
        let start = Instant::now();
        let o = (self.run)(seed);
        Check {
            id: self.id,
            name: self.name.to_string(),
            paper_anchor: self.anchor.to_string(),
            computed: o.computed,
            bound: o.bound,
            pass: o.pass,
            detail: o.detail,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

struct Outcome {
    computed: f64,
    bound: f64,
    pass: bool,
    detail: String,
}

/// Suites accepted by [`criteria_for_suite`].
pub const SUITES: [&str; 8] = ["all", "hadamard", "fss", "split", "schatten", "norm", "factorization", "hs"];

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "hadamard-algebra", suite: "hadamard", anchor: "H_n H_n = N I, H_n = H_n^T, closed-form endpoint norms", run: hadamard_algebra },
        Criterion { id: 2, name: "u-block-norm", suite: "hadamard", anchor: "||U_n||_{p,q} = 1", run: u_block_norm },
        Criterion { id: 3, name: "flat-vector", suite: "fss", anchor: "|I| >= k and ||x||_q / ||x||_p <= |I|^{1/q-1/p}", run: flat_vector_law },
        Criterion { id: 4, name: "fss-contrast", suite: "fss", anchor: "b_k(I_{1,2}) = k^{-1/2}; b_k(I_{2,p,q}) = 1", run: fss_contrast },
        Criterion { id: 5, name: "certificate-growth", suite: "factorization", anchor: "||B||_{p,r} ||A||_{r,q} >= 1/delta >= N^{1/p - 1/min(r,r')}", run: certificate_growth },
        Criterion { id: 6, name: "factorable-range", suite: "factorization", anchor: "U = I_{p',q} o U^(p) through l_r, p' <= r <= q", run: factorable_range },
        Criterion { id: 7, name: "block-splitting", suite: "split", anchor: "S = W + V, Gamma in Delta u Lambda, ||W|| <= ||S||", run: block_splitting },
        Criterion { id: 8, name: "schatten-dimension", suite: "schatten", anchor: "#{s_i >= eps} <= eps^{-q} when ||s||_q = 1", run: schatten_dimension },
        Criterion { id: 9, name: "hs-composition", suite: "fss", anchor: "||D T M_psi||_HS <= ||psi||_2 sup||g_n||_inf ||d||_2", run: hs_composition },
        Criterion { id: 10, name: "rademacher-isometry", suite: "hadamard", anchor: "||H_n x||_inf = ||x||_1 on Rademacher columns", run: rademacher_isometry },
        Criterion { id: 11, name: "oracle-equivalence", suite: "norm", anchor: "ascent = exhaustive search for ||A||_{p,q}", run: oracle_equivalence },
        Criterion { id: 12, name: "halving-factorization", suite: "hadamard", anchor: "D_n U_{n+1} C_n = U_n", run: halving },
    ]
}

/// Criteria belonging to `suite`; `None` for an unknown suite name.
pub fn criteria_for_suite(suite: &str) -> Option<Vec<Criterion>> {
    if !SUITES.contains(&suite) {
        return None;
    }
    let all = criteria();
    if suite == "all" {
        return Some(all);
    }
    let suite = if suite == "hs" { "fss" } else { suite };
    Some(all.into_iter().filter(|c| c.suite == suite).collect())
}

pub fn run_all(seed: u64) -> Vec<Check> {
    criteria().iter().map(|c| c.run(seed)).collect()
}

fn e(s: &str) -> Exponent {
    s.parse().expect("literal exponent")
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn hadamard_algebra(_seed: u64) -> Outcome {
    let mut algebra_ok = true;
    for n in 0..=10u32 {
        let h = hadamard_matrix(n).expect("within cap");
        let size = h.rows();
        let ints: Vec<i64> = h.as_slice().iter().map(|&v| v as i64).collect();
        let mut square = vec![0i64; size * size];
        for i in 0..size {
            for k in 0..size {
                let a = ints[i * size + k];
                let row = &ints[k * size..(k + 1) * size];
                for (s, &b) in square[i * size..(i + 1) * size].iter_mut().zip(row) {
                    *s += a * b;
                }
            }
        }
        for i in 0..size {
            for j in 0..size {
                let expect = if i == j { size as i64 } else { 0 };
                algebra_ok &= square[i * size + j] == expect && ints[i * size + j] == ints[j * size + i];
            }
        }
    }
    let mut worst = 0.0f64;
    for n in 0..=8u32 {
        let h = hadamard_matrix(n).expect("within cap");
        let big_n = (1u64 << n) as f64;
        let cases = [(Exponent::ONE, Exponent::INFINITY, 1.0), (Exponent::ONE, Exponent::ONE, big_n), (Exponent::TWO, Exponent::TWO, big_n.sqrt())];
        for (p, q, expect) in cases {
            let v = pq_norm_exact(&h, p, q).expect("closed-form pair");
            worst = worst.max(rel_err(v, expect));
        }
    }
    let bound = 1e-15;
    Outcome {
        computed: worst,
        bound,
        pass: algebra_ok && worst <= bound,
        detail: format!("integer algebra n<=10: {}; worst relative error of endpoint norms n<=8: {worst:.3e}", if algebra_ok { "exact" } else { "FAILED" }),
    }
}

fn u_block_norm(seed: u64) -> Outcome {
    let mut worst = 0.0f64;
    for (p, q) in [("4/3", "4"), ("3/2", "3"), ("2", "4"), ("4/3", "2")] {
        let (p, q) = (e(p), e(q));
        for n in 1..=6 {
            let u = u_block(n, p, q).expect("valid exponents");
            let est = pq_norm_lower(&u, p, q, 8, seed);
            let upper = pq_norm_upper(&u, p, q).value;
            worst = worst.max((est.lower - 1.0).abs()).max((upper - 1.0).abs()).max(est.lower - upper);
        }
    }
    Outcome {
        computed: worst,
        bound: 1e-6,
        pass: worst <= 1e-6,
        detail: format!("max |lower - 1|, |upper - 1| over 4 exponent pairs, n = 1..6: {worst:.3e}"),
    }
}

fn flat_vector_law(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
    let (mut failures, mut worst) = (0usize, 0.0f64);
    for _ in 0..500 {
        let k = rng.random_range(1..=8usize);
        let m = rng.random_range(k..=40usize);
        let basis: Vec<Vec<f64>> = (0..k).map(|_| gaussian(&mut rng, m)).collect();
        let Ok(r) = flat_vector(&basis) else {
            failures += 1;
            continue;
        };
        let size = r.flat_indices.len();
        if size < k {
            failures += 1;
        }
        for (p, q) in [(Exponent::ONE, Exponent::TWO), (e("4/3"), e("4"))] {
            let ratio = lp_norm(&r.x, q) / lp_norm(&r.x, p);
            let bound = (size as f64).powf(q.recip_f64() - p.recip_f64());
            worst = worst.max(ratio / bound);
        }
    }
    Outcome {
        computed: worst,
        bound: 1.0 + 1e-6,
        pass: failures == 0 && worst <= 1.0 + 1e-6,
        detail: format!("500 subspaces: {failures} runs with |I| < k; worst ratio / |I|^(1/q-1/p) = {worst:.12}"),
    }
}

fn fss_contrast(seed: u64) -> Outcome {
    let (one, two) = (NormFunctional::Plain(Exponent::ONE), NormFunctional::Plain(Exponent::TWO));
    let mut ok = true;
    let mut worst_decay = f64::INFINITY;
    let mut parts = Vec::new();
    for k in [4usize, 16, 64] {
        let est = bernstein_width(&DenseMatrix::identity(k), k, &one, &two, 4, seed).expect("k <= size");
        let target = (k as f64).powf(-0.5);
        let upper_ok = rel_err(est.upper, target) <= 1e-12;
        let lower_ok = est.lower >= 0.8 * target && est.lower <= target * (1.0 + 1e-9);
        ok &= upper_ok && lower_ok;
        worst_decay = worst_decay.min(est.lower / target);
        parts.push(format!("k={k}: [{:.6}, {:.6}]", est.lower, est.upper));
    }
    let pd = finite_pd_identity((1..=8).collect(), e("4/3"), e("4")).expect("p <= q");
    let (dom, cod) = (NormFunctional::Mixed(pd.domain.clone()), NormFunctional::Mixed(pd.codomain.clone()));
    let mut worst_pd = 0.0f64;
    for k in 1..=8 {
        let est = bernstein_width(&pd.operator, k, &dom, &cod, 2, seed).expect("k <= size");
        worst_pd = worst_pd.max((est.lower - 1.0).abs()).max((est.upper - 1.0).abs());
    }
    ok &= worst_pd <= 1e-6;
    parts.push(format!("PD identity k<=8: max |b_k - 1| = {worst_pd:.3e}"));
    Outcome { computed: worst_pd, bound: 1e-6, pass: ok, detail: parts.join("; ") }
}

fn certificate_growth(_seed: u64) -> Outcome {
    let rows = u_certificate_growth(e("4/3"), e("4"), Exponent::TWO, 6).expect("obstruction range");
    let mut ok = rows.len() == 6;
    let mut worst_margin = f64::INFINITY;
    for row in &rows {
        let floor = 2f64.powf(row.n as f64 / 4.0);
        worst_margin = worst_margin.min(row.constant_lower - floor);
    }
    ok &= worst_margin >= -1e-9;
    ok &= rows.windows(2).all(|w| w[1].constant_lower > w[0].constant_lower);
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.constant_lower.log2()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 6.0, ys.iter().sum::<f64>() / 6.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    ok &= (slope - 0.25).abs() <= 0.02;
    Outcome {
        computed: slope,
        bound: 0.25,
        pass: ok,
        detail: format!("min constant_lower - 2^(n/4) = {worst_margin:.3e}; fitted slope {slope:.6}"),
    }
}

fn factorable_range(_seed: u64) -> Outcome {
    let (p, q, r) = (e("4/3"), e("4"), e("4"));
    let class = classify_r(p, q, r);
    let mut worst = 0.0f64;
    let mut exact = true;
    for n in 1..=6 {
        let f = explicit_u_factorization(n, p, q, r).expect("factorable range");
        worst = worst.max(f.product_norm_upper);
        exact &= f.product().max_abs_diff(&u_block(n, p, q).expect("valid")) <= 1e-10;
    }
    let refused = u_certificate_growth(p, q, r, 3).is_err();
    Outcome {
        computed: worst,
        bound: 1.0 + 1e-9,
        pass: class == RangeClass::Factorable && refused && exact && worst <= 1.0 + 1e-9,
        detail: format!("classification {class}; max product_norm_upper n<=6 = {worst:.15}"),
    }
}

fn random_support(rng: &mut ChaCha8Rng, m: usize) -> BandedSupport {
    let mut draw = || {
        let mut prev = 0;
        (1..=m)
            .map(|j| {
                prev = (j + rng.random_range(0..4usize)).max(prev + 1);
                prev
            })
            .collect::<Vec<_>>()
    };
    let mb = draw();
    let nb = draw();
    BandedSupport::new(mb, nb).expect("strictly increasing")
}

fn block_splitting(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
    let (p, q) = (e("4/3"), e("4"));
    let (mut failures, mut worst) = (0usize, f64::NEG_INFINITY);
    for _ in 0..1000 {
        let m = rng.random_range(1..=40usize);
        let support = random_support(&mut rng, m);
        let s = DenseMatrix::from_fn(m, m, |i, j| if support.admissible(i, j) { rng.random_range(-1.0..1.0) } else { 0.0 });
        let Ok(split) = split_block_diagonal(&s, &support) else {
            failures += 1;
            continue;
        };
        let exact = (0..m).all(|i| (0..m).all(|j| (split.w.get(i, j) + split.v.get(i, j)).to_bits() == s.get(i, j).to_bits()));
        if !exact {
            failures += 1;
        }
        let lower = pq_norm_lower(&split.w, p, q, 2, seed).lower;
        let upper = pq_norm_upper(&s, p, q).value;
        worst = worst.max(lower - upper);
    }
    Outcome {
        computed: worst,
        bound: 1e-9,
        pass: failures == 0 && worst <= 1e-9,
        detail: format!("1000 instances: {failures} failed exactness/coverage; max lower(W) - upper(S) = {worst:.3e}"),
    }
}

fn schatten_dimension(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 8);
    let mut violations = 0usize;
    let mut worst = 0.0f64;
    for t in 0..1000 {
        let q = if t % 2 == 0 { Exponent::TWO } else { Exponent::integer(4).expect("integer") };
        let len = rng.random_range(1..=32usize);
        let mut raw: Vec<f64> = (0..len).map(|_| rng.random::<f64>().powi(3)).collect();
        raw[0] += 1e-3;
        raw.sort_by(|a, b| b.total_cmp(a));
        let spec = SingularSpectrum::new(raw).expect("sorted").normalized(q).expect("nonzero");
        for g in 1..=10 {
            let eps = g as f64 / 10.0;
            let r = schatten_dim_bound(&spec, eps, q).expect("normalized");
            if !r.holds {
                violations += 1;
            }
            worst = worst.max(r.count as f64 * eps.powf(q.to_f64()));
        }
    }
    Outcome {
        computed: violations as f64,
        bound: 0.0,
        pass: violations == 0,
        detail: format!("1000 spectra x 10 eps: {violations} violations; max count * eps^q = {worst:.12}"),
    }
}

fn hs_composition(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 9);
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for _ in 0..1000 {
        let m = rng.random_range(1..=16usize);
        let n = rng.random_range(1..=8usize);
        let psi = gaussian(&mut rng, m);
        let g: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let d = gaussian(&mut rng, n);
        let c = hs_composition_bound_check(&psi, &g, &d).expect("shapes agree");
        if !c.pass {
            violations += 1;
        }
        if c.rhs > 0.0 {
            worst = worst.max(c.lhs / c.rhs);
        }
    }
    Outcome {
        computed: worst,
        bound: 1.0 + 1e-9,
        pass: violations == 0,
        detail: format!("1000 instances: {violations} violations; max lhs / rhs = {worst:.12}"),
    }
}

fn rademacher_isometry(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 10);
    let mut worst = 0.0f64;
    let mut found = true;
    for n in 1..=6u32 {
        let h = hadamard_matrix(n).expect("within cap");
        let cols = rademacher_columns(n).expect("n >= 1");
        found &= cols.len() == n as usize;
        for _ in 0..100 {
            let mut x = vec![0.0; h.cols()];
            for &c in &cols {
                x[c] = StandardNormal.sample(&mut rng);
            }
            let lhs = lp_norm(&h.apply(&x).expect("dimensions agree"), Exponent::INFINITY);
            worst = worst.max((lhs - lp_norm(&x, Exponent::ONE)).abs());
        }
    }
    Outcome {
        computed: worst,
        bound: 1e-9,
        pass: found && worst <= 1e-9,
        detail: format!("n <= 6, 100 vectors each: max | ||Hx||_inf - ||x||_1 | = {worst:.3e}"),
    }
}

fn oracle_equivalence(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 11);
    let mut worst = 0.0f64;
    for t in 0..200u64 {
        let rows = rng.random_range(1..=4usize);
        let cols = rng.random_range(1..=4usize);
        let a = DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
        for (p, q) in [("1", "2"), ("4/3", "4"), ("2", "2"), ("2", "4")] {
            let (p, q) = (e(p), e(q));
            let lower = pq_norm_lower(&a, p, q, 32, seed.wrapping_add(t)).lower;
            let oracle = pq_norm_oracle(&a, p, q, 64).expect("at most 4 columns");
            worst = worst.max(rel_err(lower, oracle));
        }
    }
    Outcome {
        computed: worst,
        bound: 1e-4,
        pass: worst <= 1e-4,
        detail: format!("200 matrices x 4 exponent pairs: max relative gap {worst:.3e}"),
    }
}

fn halving(_seed: u64) -> Outcome {
    let mut worst = 0.0f64;
    for (p, q) in [("2", "2"), ("4/3", "2")] {
        let (p, q) = (e(p), e(q));
        for n in 1..=5 {
            let f = halving_factorization(n, p, q).expect("valid exponents");
            let big = u_block(n + 1, p, q).expect("valid");
            let lhs = f.d.matmul(&big).and_then(|m| m.matmul(&f.c)).expect("shapes agree");
            worst = worst.max(lhs.max_abs_diff(&u_block(n, p, q).expect("valid")));
        }
    }
    Outcome {
        computed: worst,
        bound: 1e-12,
        pass: worst <= 1e-12,
        detail: format!("(2,2) and (4/3,2), n = 1..5: max entrywise error {worst:.3e}"),
    }
}
