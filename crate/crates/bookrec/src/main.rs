use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bookrec::config::{Overrides, ReportFormat, Resolved, RunConfigFile};
use bookrec::{pipeline, CliError};

/// Book rating prediction and recommendation toolkit.
///
/// Reads ratings and tag files, groups similar readers, predicts scores for
/// unread books, and evaluates recommendation quality. A JSON config file
/// can hold any of the flag values; flags given on the command line win.
#[derive(Parser)]
#[command(name = "bookrec", version)]
struct Cli {
    /// JSON run configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Ratings TSV: user<TAB>book<TAB>score per line
    #[arg(long, global = true)]
    ratings: Option<PathBuf>,

    /// Tags TSV: book<TAB>comma,separated,tags per line
    #[arg(long, global = true)]
    tags: Option<PathBuf>,

    /// Criterion tree JSON for the ahp subcommand
    #[arg(long, global = true)]
    ahp_config: Option<PathBuf>,

    /// Directory artifacts are written to
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Seed for every randomized stage; equal seeds reproduce outputs
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Neighborhood size for rating prediction
    #[arg(long, global = true)]
    k: Option<usize>,

    /// Recommendation list length; evaluate accepts a comma-separated list
    #[arg(long, global = true, value_delimiter = ',')]
    n: Option<Vec<usize>>,

    /// Fraction of each user's ratings held out by evaluate
    #[arg(long, global = true)]
    test_fraction: Option<f64>,

    /// Artifact format for report-emitting subcommands
    #[arg(long, global = true, value_enum)]
    format: Option<ReportFormat>,

    /// Similarity scale for grouping; smaller separates more aggressively
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Baseline ant speed
    #[arg(long, global = true)]
    speed: Option<f64>,

    /// Fastest ant speed
    #[arg(long, global = true)]
    max_speed: Option<f64>,

    /// Odd side length of the neighborhood window
    #[arg(long, global = true)]
    patch_side: Option<usize>,

    /// Pickup steepness constant
    #[arg(long, global = true)]
    k1: Option<f64>,

    /// Drop threshold constant
    #[arg(long, global = true)]
    k2: Option<f64>,

    /// Total ant steps
    #[arg(long, global = true)]
    iterations: Option<usize>,

    /// Grid width in cells
    #[arg(long, global = true)]
    grid_width: Option<usize>,

    /// Grid height in cells
    #[arg(long, global = true)]
    grid_height: Option<usize>,

    /// Number of ants
    #[arg(long, global = true)]
    ant_count: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive criterion weights and report their consistency
    Ahp,
    /// Group users by rating similarity
    Cluster,
    /// Predict scores for (user, book) pairs listed in a TSV file
    Predict {
        /// Pairs TSV: user<TAB>book per line
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Rank one user's unread books and keep the top n
    Recommend {
        /// Target user id
        #[arg(long)]
        user: u64,
    },
    /// Measure recommendation hitrate on a held-out split
    Evaluate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfigFile::load(path)?,
        None => RunConfigFile::default(),
    };
    let flags = Overrides {
        ratings: cli.ratings,
        tags: cli.tags,
        ahp_config: cli.ahp_config,
        output_dir: cli.output_dir,
        seed: cli.seed,
        k: cli.k,
        n_values: cli.n,
        test_fraction: cli.test_fraction,
        format: cli.format,
        alpha: cli.alpha,
        speed: cli.speed,
        max_speed: cli.max_speed,
        patch_side: cli.patch_side,
        k1: cli.k1,
        k2: cli.k2,
        iterations: cli.iterations,
        grid_width: cli.grid_width,
        grid_height: cli.grid_height,
        ant_count: cli.ant_count,
    };
    let cfg = Resolved::merge(file, flags)?;
    match cli.command {
        Command::Ahp => pipeline::run_ahp(&cfg),
        Command::Cluster => pipeline::run_cluster(&cfg),
        Command::Predict { pairs } => pipeline::run_predict(&cfg, &pairs),
        Command::Recommend { user } => pipeline::run_recommend(&cfg, user),
        Command::Evaluate => pipeline::run_evaluate(&cfg),
    }
}
