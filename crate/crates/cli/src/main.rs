mod commands;
mod json;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exact cycle-factor statistics of regular digraphs.
#[derive(Debug, Parser)]
#[command(name = "cyclefactor", version, about)]
struct Cli {
    /// Worker threads for enumeration and search (0 = all cores).
    #[arg(long, global = true, env = "CYCLEFACTOR_THREADS", default_value_t = 0)]
    threads: usize,

    /// Print human-readable tables instead of JSON where available.
    #[arg(long, global = true)]
    table: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Complete looped digraph on `--d` vertices.
    Complete,
    /// Looped bidirected cycle on `--n` vertices.
    Gn,
    /// The two-halves construction for degree `--d`.
    Xd,
    /// `X_d` padded with `k - 2` complete looped digraphs.
    Gkd,
    /// Undirected family named by `--name` (e.g. C6, 2K3, 5K222).
    Undirected,
    /// Three blocks of `K_m` spliced into a ring, `--m` per block.
    Splice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    Strict,
    EdgesAsTwoCycles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// Exhaustive degree-two checks.
    D2,
    /// Enumeration of `X_d` against the closed forms.
    XdCross,
    /// Cycle-factors of the looped bidirected cycle.
    GnClass,
    /// Exhaustive maximum of the expected cycle count.
    MaxScan,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a graph of a named family in text format.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        name: Option<String>,
        /// Wrap the graph in a JSON object.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact cycle statistics of a graph file (`-` for stdin).
    Expect {
        #[arg(long)]
        graph: PathBuf,
        /// Include per-arc usage counts.
        #[arg(long)]
        edge_usage: bool,
        /// Include the cycle-count histogram.
        #[arg(long)]
        histogram: bool,
        /// Treat the file as a symmetric digraph and count undirected 2-factors.
        #[arg(long)]
        undirected: bool,
        #[arg(long, value_enum, default_value_t = Convention::Strict, requires = "undirected")]
        convention: Convention,
    },
    /// Certify a `d`-regular graph against the clique benchmark.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "")]
        provenance: String,
    },
    /// Closed forms for `X_d`.
    Formula {
        #[arg(long)]
        d: usize,
    },
    /// Crossing-pattern table for `X_d`, optionally measured by enumeration.
    Table1 {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        enumerate: bool,
    },
    /// Run one of the verification suites.
    Suite {
        #[arg(long, value_enum)]
        name: Suite,
        /// Largest order (d2: default 6; gn-class: default 12).
        #[arg(long)]
        n_max: Option<usize>,
        /// Largest degree for xd-cross (default 6).
        #[arg(long)]
        d_max: Option<usize>,
        /// Order and degree for max-scan.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Beam search for graphs beating the benchmark.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = cyclefactor_core::search::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        pop: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 1)]
        moves: usize,
        #[arg(long, default_value_t = 25)]
        restart_after: usize,
        #[arg(long, default_value_t = 32)]
        leaderboard: usize,
        /// JSON-lines file receiving every new record as it is found.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the headline values with a pass/fail summary.
    Report {
        #[arg(long, required = true)]
        paper: bool,
        /// Also enumerate `X_7` (slow).
        #[arg(long)]
        with_d7: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match commands::dispatch(cli) {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e.downcast_ref::<cyclefactor_core::Error>() {
                Some(core) if core.is_consistency_failure() => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<serde_json::Error>()
                .and_then(|j| j.io_error_kind())
                .is_some_and(|k| k == std::io::ErrorKind::BrokenPipe)
    })
}
