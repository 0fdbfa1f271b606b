//! `bdcover`: command-line driver emitting JSON verification reports.

mod commands;
mod lemmas;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::UsageError;

#[derive(Parser, Debug)]
#[command(name = "bdcover", version, about = "Exact checks for Brylinski-Deligne covering data of classical groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Worker threads for parallel sweeps (0 = all cores, 1 = sequential).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Half-width of the point grid {-w..w}^rank used for window checks on extensions.
    #[arg(long, global = true, default_value_t = 2)]
    pub window: i64,
    /// Upper bound on the number of maximal isotropic subspaces enumerated.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_states: u128,
    /// Print a tab-separated flattening instead of JSON.
    #[arg(long, global = true)]
    pub tsv: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a root datum and print it.
    Rootdatum {
        #[arg(long)]
        family: String,
        #[arg(long)]
        rank: usize,
    },
    /// Solve for the invariant form with value `a` on short coroots and verify it.
    Qform {
        #[arg(long)]
        family: String,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        a: i64,
        /// Cover degree; adds n_Q to the report.
        #[arg(long)]
        n: Option<i64>,
    },
    /// Construct the doubled BD data and verify the square theorem.
    Square {
        #[arg(long)]
        family: String,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        a: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        n: i64,
    },
    /// Residue symbols, tame Hilbert symbols and torus-cover commutators.
    Symbols(commands::SymbolsArgs),
    /// Enumerate P \ G^box / iota(G x G) N_bullet over F_q.
    Orbits {
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u64,
    },
    /// Run the identity suite (forms, parity, extensions, s_Q, square theorem, symbols).
    Lemmas,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let g = &cli.global;
    let doc = match &cli.command {
        Command::Rootdatum { family, rank } => commands::rootdatum(g, family, *rank),
        Command::Qform { family, rank, a, n } => commands::qform(g, family, *rank, *a, *n),
        Command::Square { family, rank, a, k, n } => commands::square(g, family, *rank, *a, *k, *n),
        Command::Symbols(args) => commands::symbols(g, args),
        Command::Orbits { family, m, k, q } => commands::orbits(g, family, *m, *k, *q),
        Command::Lemmas => Ok(lemmas::run(g)),
    };
    match doc {
        Ok(doc) => {
            let text = if g.tsv {
                doc.to_tsv()
            } else {
                serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
            };
            // a closed pipe (e.g. `| head`) is not an error
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(if doc.passed() { 0 } else { 1 })
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
