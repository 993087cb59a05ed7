use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use bstlab::acceptance::{AcceptanceConfig, Suite};
use bstlab::config::{KeyValues, OutputFormat, RunConfig};

mod commands;

#[derive(Parser)]
#[command(
    name = "bstlab",
    version,
    about = "Random binary tree growth: simulation, exact computation and verification"
)]
struct Cli {
    /// `key = value` config file, applied before flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of insertions (tree size)
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Time horizon for continuous-time runs
    #[arg(long, global = true)]
    t: Option<f64>,

    /// Martingale parameter: a value, a `start:stop:step` grid, or a
    /// complex point `re,im` (region scans only)
    #[arg(long, global = true)]
    z: Option<String>,

    /// Tilt parameter `2z` of the spine-marked models
    #[arg(long = "two-z", global = true)]
    two_z: Option<f64>,

    /// Number of Monte Carlo replicates
    #[arg(long, global = true)]
    replicates: Option<usize>,

    /// Output file (stdout if omitted)
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimKind {
    /// Discrete uniform-insertion chain
    Bst,
    /// Continuous-time splitting process
    Yule,
    /// Spine-marked tilted chain
    Biased,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Fast,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Critical constants, rate-function table and moment-region scan
    Constants,
    /// Emit one simulated trajectory
    Simulate {
        #[arg(value_enum)]
        kind: SimKind,
    },
    /// Per-level table: counts, expectations, ratios and martingale values
    Profile,
    /// Martingale families along one simulated path, with the jump-time
    /// factorisation residual
    Martingale,
    /// Replicated samples of the depth-derivative functional at z = 1
    Quicksort,
    /// Tilted spine-depth samples with LLN/CLT/LDP statistics
    Spine,
    /// Tilted continuous-time leaf counts
    Tilted,
    /// Run the verification suite and write a machine-readable report
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Run a single criterion by number instead of a whole suite
        #[arg(long)]
        criterion: Option<u32>,
    },
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        cfg.apply(&KeyValues::parse(&text)?)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(t) = cli.t {
        cfg.t = t;
    }
    if let Some(z) = &cli.z {
        cfg.set_z(z)?;
    }
    if let Some(two_z) = cli.two_z {
        cfg.two_z = two_z;
    }
    if let Some(replicates) = cli.replicates {
        cfg.replicates = replicates;
    }
    if let Some(format) = cli.format {
        cfg.format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    Ok(cfg)
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let cfg = effective_config(&cli)?;
    let mut out = commands::Output::create(cli.output.as_deref())?;
    match cli.command {
        Command::Constants => commands::constants(&cfg, &mut out)?,
        Command::Simulate { kind } => match kind {
            SimKind::Bst => commands::simulate_bst(&cfg, &mut out)?,
            SimKind::Yule => commands::simulate_yule(&cfg, &mut out)?,
            SimKind::Biased => commands::simulate_biased(&cfg, &mut out)?,
        },
        Command::Profile => commands::profile(&cfg, &mut out)?,
        Command::Martingale => commands::martingale(&cfg, &mut out)?,
        Command::Quicksort => commands::quicksort(&cfg, &mut out)?,
        Command::Spine => commands::spine(&cfg, &mut out)?,
        Command::Tilted => commands::tilted(&cfg, &mut out)?,
        Command::Verify { suite, criterion } => {
            let acc = match &cli.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading config {}", path.display()))?;
                    let mut acc = AcceptanceConfig::from_text(&text)?;
                    if let Some(seed) = cli.seed {
                        acc.seed = seed;
                    }
                    acc
                }
                None => match cli.seed {
                    Some(seed) => AcceptanceConfig::with_seed(seed),
                    None => AcceptanceConfig::default_config(),
                },
            };
            let suite = match suite {
                SuiteArg::Fast => Suite::Fast,
                SuiteArg::All => Suite::All,
            };
            let ok = commands::verify(&acc, suite, criterion, &mut out)?;
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
