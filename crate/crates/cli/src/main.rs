mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// q-matroids, subspace designs and q-Steiner systems over finite fields.
#[derive(Parser)]
#[command(name = "qmatroid", version)]
pub struct Cli {
    /// Print reports as key=value lines.
    #[arg(long, global = true)]
    pub machine: bool,
    /// Largest number of subspaces a single sweep may enumerate.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_subspaces: u64,
    /// Largest |GL(n,q)| an automorphism sweep may visit.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub max_group_order: u64,
    /// Worker threads: a positive integer or `auto`.
    #[arg(long, global = true, default_value = "auto")]
    pub jobs: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Gaussian binomial [N, M]_q.
    Qbinom {
        big_n: u64,
        m: u64,
        #[arg(long)]
        q: u64,
    },
    /// Block count, intersection numbers and related parameter sets.
    Params(DesignArgs),
    /// Integrality test for design parameters, or the STS(n;q) congruences.
    Admissible {
        #[command(flatten)]
        design: OptDesignArgs,
        /// Test STS(n;q) instead; with --q also the implied 2-designs.
        #[arg(long, conflicts_with_all = ["t", "k", "lambda"])]
        sts: Option<u64>,
    },
    /// Desarguesian spread S(1,k,n;q) as a QDESIGN file.
    Spread {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Checks that every t-subspace lies in exactly λ blocks.
    Verify {
        /// Design file; stdin when absent or `-`.
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Strategy::Auto)]
        strategy: Strategy,
    },
    /// Derives a design from the independent spaces or circuits of a q-Steiner system.
    Derive {
        /// independent_t1, circuit_t1 or circuit_t2 (also `independent`, `circuit-t1`, `circuit-t2`).
        #[arg(long)]
        kind: String,
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Checks a QFLATS family, or writes the flats of a q-matroid.
    Flats {
        input: Option<PathBuf>,
        #[command(flatten)]
        matroid: OptMatroidArgs,
    },
    /// Rank, independence, circuit and flat status, and closure of a subspace.
    Rank {
        #[command(flatten)]
        matroid: MatroidArgs,
        /// Basis vectors joined by `;`, `-` for the zero space.
        subspace: String,
    },
    /// Rank axioms, the perfect-matroid-design property, and the flats round trip.
    Axioms {
        #[command(flatten)]
        matroid: MatroidArgs,
        /// Check all pairs up to --pair-dim plus --pairs random pairs instead of all pairs.
        #[arg(long)]
        sampled: bool,
        #[arg(long, default_value_t = 3)]
        pair_dim: usize,
        #[arg(long, default_value_t = 100_000)]
        pairs: u64,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Also rebuild the rank function from the flats and compare.
        #[arg(long)]
        roundtrip: bool,
    },
    /// Automorphism group of a design inside GL(n,q).
    Aut {
        input: Option<PathBuf>,
        /// Compare with the automorphism groups of the derived designs.
        #[arg(long)]
        transfer: bool,
    },
    /// Parameter tables for the designs implied by STS(13;2) and STS(7;q).
    Tables,
}

#[derive(Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value = "1")]
    pub lambda: String,
}

#[derive(Args)]
pub struct OptDesignArgs {
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub lambda: Option<String>,
}

#[derive(Args)]
pub struct MatroidArgs {
    /// uniform:<k>, free, representable:<matrix file> or steiner:<design file>.
    #[arg(long)]
    pub matroid: String,
    /// Ambient dimension (uniform and free).
    #[arg(long)]
    pub n: Option<usize>,
    /// Field order of the ambient space (uniform and free; base field for representable).
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Args)]
pub struct OptMatroidArgs {
    /// Write the flats of this q-matroid instead of checking a file.
    #[arg(long, conflicts_with = "input")]
    pub matroid: Option<String>,
    #[arg(long, requires = "matroid")]
    pub n: Option<usize>,
    #[arg(long, requires = "matroid")]
    pub q: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Strategy {
    Auto,
    Superspaces,
    BlockScan,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
