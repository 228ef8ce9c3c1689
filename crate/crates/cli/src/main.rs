use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpq::Exponent;

mod commands;
mod output;

use output::Format;

/// Fixed default so that runs without `--seed` are reproducible.
#[cfg(test)]
const DEFAULT_SEED: u64 = 0xD1A6;

#[derive(Parser, Debug)]
#[command(name = "lpq", version, about = "p->q operator norms, Hadamard-block certificates and banded splits")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for every random choice (decimal or 0x-prefixed hex).
    #[arg(long, global = true, default_value = "0xD1A6", value_parser = parse_seed)]
    seed: u64,
    /// Random restarts for norm ascent.
    #[arg(long, global = true, default_value_t = lpq::pqnorm::DEFAULT_SEEDS)]
    seeds: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-sided estimate of ‖A‖_{p,q} for a matrix file.
    Norm {
        matrix: PathBuf,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_parser = parse_exponent)]
        q: Exponent,
    },
    /// Growth table of certified ℓ_r-factorization constants for U_n.
    Certify(GrowthArgs),
    /// Run the verification suite.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(lpq::verification::SUITES))]
        suite: String,
        /// Include per-check runtimes in the report (makes output run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Parameter sweep over an operator family.
    Sweep {
        #[arg(long, value_enum, default_value_t = Family::UBlock)]
        family: Family,
        #[command(flatten)]
        growth: GrowthArgs,
    },
    /// Banded truncation and block-diagonal split; writes S.mat, W.mat, V.mat and cuts.json.
    Split {
        matrix: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_parser = parse_exponent)]
        q: Exponent,
        /// Directory receiving the matrix files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Bernstein width b_k between plain ℓ_p and ℓ_q.
    Bernstein {
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_parser = parse_exponent)]
        q: Exponent,
        /// Random candidate subspaces (and as many perturbation rounds).
        #[arg(long, default_value_t = 8)]
        budget: usize,
    },
    /// Emit a constructed matrix.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GrowthArgs {
    #[arg(long, value_parser = parse_exponent)]
    p: Exponent,
    #[arg(long, value_parser = parse_exponent)]
    q: Exponent,
    #[arg(long, value_parser = parse_exponent)]
    r: Exponent,
    #[arg(long, default_value_t = 6)]
    n_max: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    UBlock,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Construct {
    /// Sylvester Hadamard matrix H_n (2^n x 2^n).
    Hadamard {
        #[arg(long)]
        n: u32,
    },
    /// U_n = N^{-1/min(p',q)} H_n.
    UBlock {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_parser = parse_exponent)]
        q: Exponent,
    },
    /// U_n^{-1} = N^{-1/p} H_n (requires p' <= q).
    UInverse {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_parser = parse_exponent)]
        q: Exponent,
    },
    /// Identity matrix of the given size.
    Identity {
        #[arg(long)]
        size: usize,
    },
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: lpq::Error| e.to_string())
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("bad seed `{s}`: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Norm { matrix, p, q } => commands::norm(&cli.run, &matrix, p, q),
        Command::Certify(g) => commands::growth(&cli.run, g.p, g.q, g.r, g.n_max),
        Command::Sweep { family: Family::UBlock, growth: g } => commands::growth(&cli.run, g.p, g.q, g.r, g.n_max),
        Command::Verify { suite, timings } => commands::verify(&cli.run, &suite, timings),
        Command::Split { matrix, eps, p, q, out_dir } => commands::split(&cli.run, &matrix, eps, p, q, &out_dir),
        Command::Bernstein { matrix, k, p, q, budget } => commands::bernstein(&cli.run, &matrix, k, p, q, budget),
        Command::Construct { what } => commands::construct(&cli.run, &what),
    };
    match result.and_then(|done| done.finish(cli.run.output.as_deref())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seeds_in_both_bases() {
        assert_eq!(parse_seed("0xD1A6").unwrap(), DEFAULT_SEED);
        assert_eq!(parse_seed("53670").unwrap(), DEFAULT_SEED);
        assert!(parse_seed("0xZZ").is_err());
    }

    #[test]
    fn exponents_reject_decimals() {
        assert!(parse_exponent("1.5").is_err());
        assert_eq!(parse_exponent("3/2").unwrap(), Exponent::new(3, 2).unwrap());
    }
}
