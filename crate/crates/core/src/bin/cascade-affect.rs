use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cascade_affect::cascade::{generate_puzzle, GridStatus, Puzzle};
use cascade_affect::plans::{closure, RuleSet};
use cascade_affect::rng::SplitMix64;
use cascade_affect::simcli::batch::{run_batch, run_seeded_episode, BatchError};
use cascade_affect::simcli::config::{load_config, ConfigError};
use cascade_affect::simcli::output::{write_outputs, write_trace, OutputPaths};

#[derive(Parser)]
#[command(name = "cascade-affect", version, about = "Appraisal-coping agent on Cascades sum pyramids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a puzzle solvable by local inference.
    Generate {
        #[arg(long)]
        rows: usize,
        #[arg(long, default_value_t = 9)]
        vmax: i64,
        #[arg(long)]
        require_subtraction: bool,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Complete a puzzle with addition and subtraction inference.
    Solve { puzzle: PathBuf },
    /// Run a single episode and write its trace.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        puzzle: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Run a batch of episodes and write summary, traces and trajectories.
    Batch {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        trajectories: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write one trace file per episode (`traces.<i>.jsonl`) instead of
        /// a single file tagged with an `episode` field.
        #[arg(long)]
        split_traces: bool,
    },
}

enum Failure {
    Io(String),
    Config(String),
    Domain(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (code, msg) = match self {
            Failure::Io(m) => (1, m),
            Failure::Config(m) => (2, m),
            Failure::Domain(m) => (3, m),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<BatchError> for Failure {
    fn from(e: BatchError) -> Self {
        match e {
            BatchError::Pool(e) => Failure::Io(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn read_puzzle(path: &Path) -> Result<Puzzle, Failure> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Puzzle::from_json(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { rows, vmax, require_subtraction, seed, out } => {
            let mut rng = SplitMix64::new(seed);
            let puzzle = generate_puzzle(rows, vmax, require_subtraction, &mut rng)
                .map_err(|e| Failure::Domain(e.to_string()))?;
            fs::write(&out, puzzle.to_json() + "\n").map_err(io_err(&out))?;
            print!("{}", puzzle.grid);
        }
        Command::Solve { puzzle } => {
            let puzzle = read_puzzle(&puzzle)?;
            let done = closure(&puzzle.grid, RuleSet::FULL);
            match done.status() {
                GridStatus::Solved => print!("{done}"),
                _ => {
                    println!("UNDETERMINED");
                    return Err(Failure::Domain("closure stalls before completing the grid".into()));
                }
            }
        }
        Command::Run { config, puzzle, seed, trace } => {
            let puzzle = puzzle.as_deref().map(read_puzzle).transpose()?;
            let cfg = load_config(&config, puzzle)?;
            let rec = run_seeded_episode(&cfg, 0, seed)?;
            write_trace(File::create(&trace).map_err(io_err(&trace))?, &rec.trace).map_err(io_err(&trace))?;
            let r = &rec.result;
            println!(
                "outcome={} steps={} plan_changes={} fills={} corrections={} slips={} valence={} frustration={}",
                r.outcome.as_str(),
                r.steps,
                r.plan_changes,
                r.fills,
                r.corrections,
                r.slips,
                r.final_emotion.valence,
                r.final_emotion.frustration
            );
        }
        Command::Batch { config, out, traces, trajectories, jobs, split_traces } => {
            let cfg = load_config(&config, None)?;
            let (summary, records) = run_batch(&cfg, jobs)?;
            let paths = OutputPaths { summary: &out, traces: &traces, trajectories: &trajectories, split_traces };
            write_outputs(&summary, &records, &paths).map_err(|e| Failure::Io(e.to_string()))?;
            println!(
                "episodes={} solve_rate={} abandon_rate={} stepcap_rate={}",
                summary.episodes, summary.solve_rate, summary.abandon_rate, summary.stepcap_rate
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
