//! `indstab`: stability of independence polynomials of `K_{m,n}`.

mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{GlobalArgs, RunConfig};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "indstab",
    version,
    about = "Hurwitz stability of independence polynomials of complete bipartite graphs"
)]
struct Cli {
    #[command(flatten)]
    globals: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Coords {
    /// independence variable x
    X,
    /// shifted variable y = x + 1
    Y,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Independence polynomial of K_{m,n} or of an edge-list graph
    Indpoly {
        #[arg(long, required_unless_present = "graph")]
        m: Option<u32>,
        #[arg(long, required_unless_present = "graph")]
        n: Option<u32>,
        /// Edge list: header "p N", then one "u v" pair per line
        #[arg(long, conflicts_with_all = ["m", "n"])]
        graph: Option<PathBuf>,
        /// Cross-check the closed form against subset enumeration
        #[arg(long)]
        check: bool,
    },
    /// Stability verdict for K_{m,n}
    Stability {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
    },
    /// Verdicts for all K_{m,n} with m <= m-max, m <= n <= n-max
    Grid {
        #[arg(long)]
        m_max: u32,
        #[arg(long)]
        n_max: u32,
    },
    /// All roots of Φ(K_{m,n})
    Roots {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "y")]
        coords: Coords,
    },
    /// Rouché margin and zero counts for one scenario or the whole suite
    Rouche {
        /// p21, p22, p23 or t3
        #[arg(long, required_unless_present = "suite")]
        scenario: Option<String>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, conflicts_with = "scenario")]
        suite: bool,
        /// Largest m or n in the suite
        #[arg(long, default_value_t = 40)]
        max: u32,
        /// Largest k of the t3 scenarios in the suite
        #[arg(long, default_value_t = 6)]
        k_max: u32,
    },
    /// Minimum c_k of P_k on [1, √5], or a table of them
    Ck {
        #[arg(long, required_unless_present = "table")]
        k: Option<u32>,
        #[arg(long, requires = "k_max")]
        table: bool,
        #[arg(long)]
        k_max: Option<u32>,
    },
    /// Threshold N(k): K_{m,m+k} is stable for m > N(k)
    Nk {
        #[arg(long)]
        k: u32,
    },
    /// Threshold N(ℓ) for ℓ = p/q: K_{m,ℓm} is unstable for m > N(ℓ)
    Nell {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
    },
    /// Smallest unstable m among K_{m,ℓm}, m = q, 2q, ..., m-max
    Witness {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        m_max: u32,
    },
    /// Roots of i(K_{m,n}) in x coordinates as CSV re,im
    Scatter {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
    },
}

fn init_logging(verbose: bool) {
    let level = if verbose {
        log::LevelFilter::Info
    } else {
        log::LevelFilter::Warn
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

pub use crate::error::CliError as Error;

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.globals)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    }
    let text = commands::execute(&cli.command, &cfg)?;
    output::emit(&text, cfg.output.as_deref())
}

/// Runs a command line in-process and returns what would be written,
/// ignoring `--output`, `--threads` and `--verbose`.
pub fn render<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::usage(e.to_string()))?;
    let cfg = RunConfig::resolve(&cli.globals)?;
    commands::execute(&cli.command, &cfg)
}

/// Process entry point: parses `std::env::args`, runs, maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.globals.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
