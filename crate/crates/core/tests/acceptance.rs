//! The twelve acceptance criteria, one test and one report line each.
//! Lines go straight to the stderr handle, so they show up without `--nocapture`.

use std::io::Write;

use lpq::verification::{criteria, Check};

const SEED: u64 = 0xD1A6;

fn run(id: u32) {
    let criterion = criteria().into_iter().find(|c| c.id == id).expect("known criterion");
    let c: Check = criterion.run(SEED);
    let line = format!(
        "criterion {:>2} {:<22} {}  ({:.1} ms)  {}",
        c.id,
        c.name,
        if c.pass { "PASS" } else { "FAIL" },
        c.runtime_ms,
        c.detail
    );
    let _ = writeln!(std::io::stderr().lock(), "{line}");
    assert!(c.pass, "criterion {} ({}) failed: {}", c.id, c.name, c.detail);
}

macro_rules! criterion_tests {
    ($($name:ident = $id:expr),* $(,)?) => {
        $(#[test] fn $name() { run($id); })*
    };
}

criterion_tests! {
    c01_hadamard_algebra = 1,
    c02_u_block_norm_is_one = 2,
    c03_flat_vector_law = 3,
    c04_fss_contrast = 4,
    c05_certificate_growth = 5,
    c06_factorable_range = 6,
    c07_block_splitting = 7,
    c08_schatten_dimension_bound = 8,
    c09_hs_composition = 9,
    c10_rademacher_isometry = 10,
    c11_oracle_equivalence = 11,
    c12_halving_factorization = 12,
}

#[test]
fn every_criterion_has_a_test() {
    let ids: Vec<u32> = criteria().iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=12).collect::<Vec<_>>());
}
