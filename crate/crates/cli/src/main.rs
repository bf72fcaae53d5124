mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;

#[derive(Parser)]
#[command(name = "cubemix", version, about = "Random walks on the Rubik's Cube group: sampling, optimal distances, TV decay")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// More logging; repeat for debug output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct BudgetArgs {
    /// Node limit per optimal solve.
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// Wall-clock limit per optimal solve, in seconds.
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Allow solves deeper than 14 moves (these can take hours).
    #[arg(long)]
    allow_deep: bool,
}

#[derive(Args, Clone)]
pub struct PdbArgs {
    /// Directory holding the pattern databases (default: the cache directory).
    #[arg(long)]
    pdb_dir: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value = "full")]
    mode: String,
    /// Comma-separated subset of d_o,d_s,d_c.
    #[arg(long, default_value = "d_o")]
    functional: String,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    pdb: PdbArgs,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a random move sequence and the state it produces.
    Scramble {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Optimal solution of a state: a facelet string, a named state, or a move sequence.
    Solve {
        state: Option<String>,
        /// Apply these moves to the origin instead of giving a state.
        #[arg(long, conflicts_with = "state")]
        moves: Option<String>,
        /// Solve towards this named state instead of the origin.
        #[arg(long, default_value = "origin")]
        target: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        pdb: PdbArgs,
    },
    /// Rows `n,sample_index,...` for walks of length n.
    WalkSample {
        #[arg(long)]
        n: i64,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Rows for uniform (stationary) states, written with n = -1.
    StationarySample {
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Bootstrap TV between the samples in two row files.
    Tv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "d_o")]
        functional: String,
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decay curve `n,tv,stderr` of a dataset against its stationary rows.
    Decay {
        dataset: PathBuf,
        #[arg(long, default_value = "d_o")]
        functional: String,
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-step histograms `distance,count,probability` of a dataset.
    Hist {
        dataset: PathBuf,
        #[arg(long, default_value = "d_o")]
        functional: String,
        /// Steps to emit, e.g. `1..8,inf` (default: all).
        #[arg(long)]
        steps: Option<String>,
        /// Output directory (default: print all to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sharded, resumable sample generation.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Pattern databases for the optimal solver.
    #[command(subcommand)]
    Pdb(PdbCommand),
    /// The exactly evolved corner chain.
    #[command(subcommand)]
    ExactCorner(ExactCommand),
    /// Threshold table `epsilon,n` of a decay curve file.
    Thresholds {
        curve: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// Write a manifest for a new dataset.
    Init {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "full")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Steps, e.g. `1..52,inf`; `inf` adds stationary samples.
        #[arg(long, default_value = "1..52,inf")]
        steps: String,
        /// Samples per step (default 1000 in full mode, 100000 otherwise).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value = "d_o")]
        functional: String,
        #[arg(long, default_value_t = 10_000)]
        shard_size: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Generate pending shards.
    Run {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        pdb: PdbArgs,
        /// Stop after this many shards.
        #[arg(long)]
        max_shards: Option<usize>,
    },
    /// Verify completed shards and generate the rest.
    Resume {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        pdb: PdbArgs,
    },
    /// Progress and digest check.
    Status {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum PdbCommand {
    /// Build the corner and two edge databases.
    Build {
        #[command(flatten)]
        pdb: PdbArgs,
    },
    /// Header and distance histogram of each database file.
    Info {
        #[command(flatten)]
        pdb: PdbArgs,
    },
}

#[derive(Subcommand)]
enum ExactCommand {
    /// Build and check the coordinate move tables.
    Tables {
        #[arg(long, default_value = "corner")]
        mode: String,
    },
    /// Distance table of the chain; prints `distance,count`.
    Bfs {
        #[arg(long, default_value = "corner")]
        mode: String,
        /// Also write the table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact TV decay from the origin.
    Decay {
        #[arg(long, default_value_t = 60)]
        max_n: usize,
        #[arg(long, default_value = "corner")]
        mode: String,
        /// Also report projected curves for these functionals (comma-separated).
        #[arg(long)]
        functional: Option<String>,
        #[command(flatten)]
        pdb: PdbArgs,
        /// Output directory (default: full-state curve to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    use commands::*;
    match command {
        Command::Scramble { n, seed, stream } => scramble(n, seed, stream),
        Command::Solve {
            state,
            moves,
            target,
            budget,
            pdb,
        } => solve(state.as_deref(), moves.as_deref(), &target, &budget, &pdb),
        Command::WalkSample { n, sample } => sample_rows(n, &sample),
        Command::StationarySample { sample } => sample_rows(cubemix::pipeline::INF_STEP, &sample),
        Command::Tv {
            a,
            b,
            functional,
            resamples,
            seed,
        } => tv(&a, &b, &functional, resamples, seed),
        Command::Decay {
            dataset,
            functional,
            resamples,
            seed,
            out,
        } => decay(&dataset, &functional, resamples, seed, out.as_deref()),
        Command::Hist {
            dataset,
            functional,
            steps,
            out,
        } => hist(&dataset, &functional, steps.as_deref(), out.as_deref()),
        Command::Dataset(DatasetCommand::Init {
            out,
            mode,
            seed,
            steps,
            samples,
            functional,
            shard_size,
            budget,
        }) => dataset_init(&out, &mode, seed, &steps, samples, &functional, shard_size, &budget),
        Command::Dataset(DatasetCommand::Run { out, pdb, max_shards }) => dataset_run(&out, &pdb, max_shards),
        Command::Dataset(DatasetCommand::Resume { out, pdb }) => dataset_run(&out, &pdb, None),
        Command::Dataset(DatasetCommand::Status { out }) => dataset_status(&out),
        Command::Pdb(PdbCommand::Build { pdb }) => pdb_build(&pdb),
        Command::Pdb(PdbCommand::Info { pdb }) => pdb_info(&pdb),
        Command::ExactCorner(ExactCommand::Tables { mode }) => exact_tables(&mode),
        Command::ExactCorner(ExactCommand::Bfs { mode, out }) => exact_bfs(&mode, out.as_deref()),
        Command::ExactCorner(ExactCommand::Decay {
            max_n,
            mode,
            functional,
            pdb,
            out,
        }) => exact_decay(max_n, &mode, functional.as_deref(), &pdb, out.as_deref()),
        Command::Thresholds { curve, out } => thresholds(&curve, out.as_deref()),
    }
}
