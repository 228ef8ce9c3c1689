//! One function per subcommand. Each returns everything it wants written;
//! nothing reaches stdout or the filesystem until [`Done::finish`].

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use lpq::factorization::{classify_r, explicit_u_factorization, u_certificate_growth, RangeClass};
use lpq::fss::{bernstein_width, UpperSource};
use lpq::hadamard::{hadamard_matrix, u_block, u_block_inverse};
use lpq::pqnorm::{pq_norm_exact, pq_norm_lower, DerivationStep};
use lpq::splitting::{split_block_diagonal, truncate_to_banded};
use lpq::verification::criteria_for_suite;
use lpq::{DenseMatrix, Exponent, NormFunctional};
use serde::Serialize;

use crate::output::{emit, json, num, Format, Table};
use crate::{Construct, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(2)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<lpq::Error> for CliError {
    fn from(e: lpq::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// The complete output of a command.
#[derive(Debug, Default)]
pub struct Done {
    text: String,
    files: Vec<(PathBuf, String)>,
    notes: Vec<String>,
    failed: bool,
}

impl Done {
    fn text(text: String) -> Self {
        Done { text, ..Done::default() }
    }

    pub fn finish(self, output: Option<&Path>) -> Result<ExitCode> {
        for (path, contents) in &self.files {
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
            }
            fs::write(path, contents).map_err(|e| CliError::Io(path.clone(), e))?;
        }
        emit(&self.text, output).map_err(|e| CliError::Io(output.map_or_else(|| "<stdout>".into(), Path::to_path_buf), e))?;
        for note in &self.notes {
            eprintln!("{note}");
        }
        Ok(if self.failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
    }
}

fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    DenseMatrix::parse_text(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn unsupported(format: Format, command: &str) -> CliError {
    CliError::Usage(format!("`{command}` does not support --format {format:?}"))
}

#[derive(Serialize)]
struct NormRecord<'a> {
    paper_anchor: &'static str,
    p: Exponent,
    q: Exponent,
    lower: f64,
    upper: f64,
    /// Present when `(p, q)` has a closed form.
    exact: Option<f64>,
    witness: &'a [f64],
    upper_derivation: &'a [DerivationStep],
}

pub fn norm(run: &RunConfig, path: &Path, p: Exponent, q: Exponent) -> Result<Done> {
    let a = read_matrix(path)?;
    let est = pq_norm_lower(&a, p, q, run.seeds, run.seed);
    let exact = pq_norm_exact(&a, p, q);
    match run.format.unwrap_or(Format::Json) {
        Format::Json => Ok(Done::text(json(&NormRecord {
            paper_anchor: "||A||_{p,q} = sup ||Ax||_q / ||x||_p",
            p,
            q,
            lower: est.lower,
            upper: est.upper,
            exact,
            witness: &est.witness,
            upper_derivation: &est.upper_derivation,
        }))),
        Format::Csv => {
            let mut t = Table::new(vec!["p", "q", "lower", "upper", "exact"]);
            t.push(vec![p.to_string(), q.to_string(), num(est.lower), num(est.upper), exact.map(num).unwrap_or_default()]);
            Ok(Done::text(t.render()))
        }
        f => Err(unsupported(f, "norm")),
    }
}

#[derive(Serialize)]
struct GrowthRecord {
    n: u32,
    #[serde(rename = "N")]
    size: u64,
    delta_upper: f64,
    constant_lower: f64,
    robust_lower: f64,
    perturbation_radius: f64,
}

#[derive(Serialize)]
struct ExplicitRecord {
    n: u32,
    b_norm_upper: f64,
    a_norm_upper: f64,
    product_norm_upper: f64,
}

#[derive(Serialize)]
struct CertifyRecord {
    paper_anchor: &'static str,
    p: Exponent,
    q: Exponent,
    r: Exponent,
    classification: String,
    rows: Vec<GrowthRecord>,
    explicit: Vec<ExplicitRecord>,
}

/// Shared by `certify` and `sweep --family u-block`.
pub fn growth(run: &RunConfig, p: Exponent, q: Exponent, r: Exponent, n_max: u32) -> Result<Done> {
    u_block(1, p, q)?;
    let class = classify_r(p, q, r);
    let rows: Vec<GrowthRecord> = if class == RangeClass::Obstructed {
        u_certificate_growth(p, q, r, n_max)?
            .into_iter()
            .map(|g| GrowthRecord {
                n: g.n,
                size: g.size,
                delta_upper: g.delta_upper,
                constant_lower: g.constant_lower,
                robust_lower: g.robust_lower,
                perturbation_radius: g.perturbation_radius,
            })
            .collect()
    } else {
        Vec::new()
    };
    let explicit: Vec<ExplicitRecord> = if class == RangeClass::Factorable {
        (1..=n_max)
            .map(|n| {
                explicit_u_factorization(n, p, q, r).map(|f| ExplicitRecord {
                    n,
                    b_norm_upper: f.b_norm_upper,
                    a_norm_upper: f.a_norm_upper,
                    product_norm_upper: f.product_norm_upper,
                })
            })
            .collect::<lpq::Result<_>>()?
    } else {
        Vec::new()
    };
    match run.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(vec!["n", "N", "delta_upper", "constant_lower", "robust_lower", "perturbation_radius"]);
            for g in &rows {
                t.push(vec![
                    g.n.to_string(),
                    g.size.to_string(),
                    num(g.delta_upper),
                    num(g.constant_lower),
                    num(g.robust_lower),
                    num(g.perturbation_radius),
                ]);
            }
            let mut done = Done::text(t.render());
            done.notes.push(format!("classification: {class}"));
            Ok(done)
        }
        Format::Json => Ok(Done::text(json(&CertifyRecord {
            paper_anchor: "||B||_{p,r} ||A||_{r,q} >= 1/||U^{-1}||_{r',r'}",
            p,
            q,
            r,
            classification: class.to_string(),
            rows,
            explicit,
        }))),
        f => Err(unsupported(f, "certify")),
    }
}

#[derive(Serialize)]
struct CheckRecord {
    id: u32,
    name: String,
    paper_anchor: String,
    computed: f64,
    bound: f64,
    pass: bool,
    detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<f64>,
}

#[derive(Serialize)]
struct VerificationReport {
    paper_anchor: &'static str,
    suite: String,
    seed: u64,
    pass: bool,
    checks: Vec<CheckRecord>,
}

pub fn verify(run: &RunConfig, suite: &str, timings: bool) -> Result<Done> {
    let list = criteria_for_suite(suite).ok_or_else(|| CliError::Usage(format!("unknown suite `{suite}`")))?;
    let mut notes = Vec::new();
    let checks: Vec<CheckRecord> = list
        .iter()
        .map(|c| {
            let check = c.run(run.seed);
            notes.push(format!(
                "{} criterion {:>2} {:<22} ({:.1} ms) {}",
                if check.pass { "PASS" } else { "FAIL" },
                check.id,
                check.name,
                check.runtime_ms,
                check.detail
            ));
            CheckRecord {
                id: check.id,
                name: check.name,
                paper_anchor: check.paper_anchor,
                computed: check.computed,
                bound: check.bound,
                pass: check.pass,
                detail: check.detail,
                runtime_ms: timings.then_some(check.runtime_ms),
            }
        })
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    let text = match run.format.unwrap_or(Format::Json) {
        Format::Json => json(&VerificationReport {
            paper_anchor: "acceptance criteria 1-12",
            suite: suite.to_string(),
            seed: run.seed,
            pass,
            checks,
        }),
        Format::Csv => {
            let mut header = vec!["id", "name", "paper_anchor", "computed", "bound", "pass"];
            if timings {
                header.push("runtime_ms");
            }
            let mut t = Table::new(header);
            for c in checks {
                let mut row = vec![c.id.to_string(), c.name, c.paper_anchor, num(c.computed), num(c.bound), c.pass.to_string()];
                row.extend(c.runtime_ms.map(num));
                t.push(row);
            }
            t.render()
        }
        f => return Err(unsupported(f, "verify")),
    };
    notes.push(format!("{}: suite `{suite}`", if pass { "all checks passed" } else { "some checks FAILED" }));
    Ok(Done { text, files: Vec::new(), notes, failed: !pass })
}

#[derive(Serialize)]
struct SplitRecord {
    paper_anchor: &'static str,
    eps: f64,
    p: Exponent,
    q: Exponent,
    certified_error: f64,
    column_budget: f64,
    row_budget: f64,
    m_bounds: Vec<usize>,
    n_bounds: Vec<usize>,
    k_cuts: Vec<usize>,
    l_cuts: Vec<usize>,
    exact: bool,
}

pub fn split(run: &RunConfig, path: &Path, eps: f64, p: Exponent, q: Exponent, out_dir: &Path) -> Result<Done> {
    let r = read_matrix(path)?;
    let t = truncate_to_banded(&r, eps, p, q)?;
    let s = split_block_diagonal(&t.s, &t.support)?;
    let exact = s.w.add(&s.v)? == t.s;
    let record = SplitRecord {
        paper_anchor: "S = W + V, W supported on Delta, V on Lambda",
        eps,
        p,
        q,
        certified_error: t.certified_error,
        column_budget: t.column_budget,
        row_budget: t.row_budget,
        m_bounds: t.support.m_bounds().to_vec(),
        n_bounds: t.support.n_bounds().to_vec(),
        k_cuts: s.k_cuts.clone(),
        l_cuts: s.l_cuts.clone(),
        exact,
    };
    let cuts = json(&record);
    let text = match run.format.unwrap_or(Format::Json) {
        Format::Json => cuts.clone(),
        Format::Csv => {
            let mut table = Table::new(vec!["index", "k", "l"]);
            for (i, (k, l)) in s.k_cuts.iter().zip(&s.l_cuts).enumerate() {
                table.push(vec![i.to_string(), k.to_string(), l.to_string()]);
            }
            table.render()
        }
        f => return Err(unsupported(f, "split")),
    };
    let files = vec![
        (out_dir.join("S.mat"), t.s.to_text()),
        (out_dir.join("W.mat"), s.w.to_text()),
        (out_dir.join("V.mat"), s.v.to_text()),
        (out_dir.join("cuts.json"), cuts),
    ];
    let notes = if exact { Vec::new() } else { vec!["W + V differs from S".to_string()] };
    Ok(Done { text, files, notes, failed: !exact })
}

#[derive(Serialize)]
struct BernsteinRecord<'a> {
    paper_anchor: &'static str,
    p: Exponent,
    q: Exponent,
    k: usize,
    lower: f64,
    upper: f64,
    upper_source: UpperSource,
    witness_basis: &'a [Vec<f64>],
}

pub fn bernstein(run: &RunConfig, path: &Path, k: usize, p: Exponent, q: Exponent, budget: usize) -> Result<Done> {
    let a = read_matrix(path)?;
    let est = bernstein_width(&a, k, &NormFunctional::Plain(p), &NormFunctional::Plain(q), budget, run.seed)?;
    match run.format.unwrap_or(Format::Json) {
        Format::Json => Ok(Done::text(json(&BernsteinRecord {
            paper_anchor: "b_k(A) = sup over k-dim E of inf_{x in E} ||Ax||_q / ||x||_p",
            p,
            q,
            k,
            lower: est.lower,
            upper: est.upper,
            upper_source: est.upper_source,
            witness_basis: &est.witness_basis,
        }))),
        Format::Csv => {
            let mut t = Table::new(vec!["k", "p", "q", "lower", "upper", "upper_source"]);
            let source = serde_json::to_value(est.upper_source).ok().and_then(|v| v.as_str().map(str::to_string));
            t.push(vec![k.to_string(), p.to_string(), q.to_string(), num(est.lower), num(est.upper), source.unwrap_or_default()]);
            Ok(Done::text(t.render()))
        }
        f => Err(unsupported(f, "bernstein")),
    }
}

#[derive(Serialize)]
struct MatrixRecord<'a> {
    paper_anchor: &'static str,
    rows: usize,
    cols: usize,
    data: &'a [f64],
}

pub fn construct(run: &RunConfig, what: &Construct) -> Result<Done> {
    let (m, anchor) = match *what {
        Construct::Hadamard { n } => (hadamard_matrix(n)?, "H_{n+1} = [[H_n, H_n], [H_n, -H_n]], H_0 = (1)"),
        Construct::UBlock { n, p, q } => (u_block(n, p, q)?, "U_n = N^{-1/min(p',q)} H_n"),
        Construct::UInverse { n, p, q } => (u_block_inverse(n, p, q)?, "U_n^{-1} = N^{-1/p} H_n"),
        Construct::Identity { size } => (DenseMatrix::identity(size), "I"),
    };
    match run.format.unwrap_or(Format::MatrixText) {
        Format::MatrixText => Ok(Done::text(m.to_text())),
        Format::Json => Ok(Done::text(json(&MatrixRecord { paper_anchor: anchor, rows: m.rows(), cols: m.cols(), data: m.as_slice() }))),
        f => Err(unsupported(f, "construct")),
    }
}
