use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod commands;
mod output;

use output::Failure;

#[derive(Parser)]
#[command(name = "mpxeq", version, about = "Equilibria of exchange economies with multiplex network externalities")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Emit CSV instead of JSON.
    #[arg(long, global = true)]
    csv: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Economy document (JSON).
    economy: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check an economy document and the spillover-size assumptions.
    Validate(Input),
    /// Competitive equilibrium in closed form.
    Solve(Input),
    /// Influence matrices and centralities per layer.
    Centrality(Input),
    /// Efficiency verdict, loss weights and resource utilization.
    Welfare(Input),
    /// Coefficient of resource utilization with its bounds.
    Cru {
        #[command(flatten)]
        input: Input,
        /// Fail if the witness allocation has negative entries.
        #[arg(long)]
        strict: bool,
    },
    /// Pareto improvement over the competitive equilibrium.
    Improve(Input),
    /// Lindahl equilibrium.
    Lindahl {
        #[command(flatten)]
        input: Input,
        /// Also compare with the competitive equilibrium.
        #[arg(long)]
        compare: bool,
    },
    /// First-order comparative statics.
    Compstat {
        #[command(flatten)]
        input: Input,
        /// Perturbation document (JSON).
        #[arg(long)]
        perturbation: PathBuf,
        /// Also check against finite differences with this step.
        #[arg(long)]
        fd_step: Option<f64>,
    },
    /// Closed-form equilibrium locus and contract curve of a 2x2 example.
    Curves {
        /// I, II or III.
        #[arg(long)]
        example: mpxeq::fixtures::Edgeworth,
        #[arg(long)]
        phi: f64,
        /// Number of evenly spaced x values on [0, 2].
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Cross-check the closed forms against the numerical oracles.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// Seed for the random perturbations (overridden by MPXEQ_SEED).
        #[arg(long)]
        seed: Option<u64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Solve(_) => "solve",
            Command::Centrality(_) => "centrality",
            Command::Welfare(_) => "welfare",
            Command::Cru { .. } => "cru",
            Command::Improve(_) => "improve",
            Command::Lindahl { .. } => "lindahl",
            Command::Compstat { .. } => "compstat",
            Command::Curves { .. } => "curves",
            Command::Oracle { .. } => "oracle",
        }
    }
}

/// Envelope shared by all JSON reports.
#[derive(Serialize)]
struct Report<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    economy_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    result: T,
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(path, e))
}

fn load(input: &Input) -> Result<mpxeq::MultiplexEconomy, Failure> {
    Ok(mpxeq::parse_economy(&read(&input.economy)?)?)
}

fn seed(flag: Option<u64>) -> Result<u64, Failure> {
    match std::env::var("MPXEQ_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("MPXEQ_SEED must be an unsigned integer, got '{v}'"), Some("MPXEQ_SEED"))),
        Err(_) => Ok(flag.unwrap_or(mpxeq::oracle::random::DEFAULT_SEED)),
    }
}

fn render<T: Serialize>(cli: &Cli, hash: Option<String>, seed: Option<u64>, result: T) -> Result<String, Failure> {
    let report = Report {
        tool: "mpxeq",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        economy_hash: hash,
        seed,
        result,
    };
    if cli.csv {
        output::flat_csv(&report)
    } else {
        Ok(mpxeq::json::to_string(&report))
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Curves { example, phi, points } => {
            let grid = mpxeq::oracle::curves::uniform_grid(*points);
            let sample = mpxeq::oracle::textbook_curves(*example, *phi, &grid)?;
            if cli.csv {
                output::curves_csv(&sample)
            } else {
                render(cli, None, None, sample)
            }
        }
        Command::Validate(input) => {
            let e = load(input)?;
            render(cli, Some(e.hash()), None, commands::validate(&e))
        }
        Command::Solve(input) => {
            let e = load(input)?;
            render(cli, Some(e.hash()), None, commands::solve(&e)?)
        }
        Command::Centrality(input) => {
            let e = load(input)?;
            render(cli, Some(e.hash()), None, commands::centrality(&e)?)
        }
        Command::Welfare(input) => {
            let e = load(input)?;
            render(cli, Some(e.hash()), None, mpxeq::welfare::welfare_report(&e)?)
        }
        Command::Cru { input, strict } => {
            let e = load(input)?;
            let r = if *strict {
                mpxeq::welfare::resource_utilization_strict(&e)?
            } else {
                mpxeq::welfare::resource_utilization(&e)?
            };
            render(cli, Some(e.hash()), None, r)
        }
        Command::Improve(input) => {
            let e = load(input)?;
            render(cli, Some(e.hash()), None, mpxeq::welfare::construct_improvement(&e)?)
        }
        Command::Lindahl { input, compare } => {
            let e = load(input)?;
            if *compare {
                render(cli, Some(e.hash()), None, mpxeq::lindahl::compare_lindahl(&e)?)
            } else {
                render(cli, Some(e.hash()), None, mpxeq::lindahl::solve_lindahl(&e)?)
            }
        }
        Command::Compstat {
            input,
            perturbation,
            fd_step,
        } => {
            let e = load(input)?;
            let p = mpxeq::compstat::Perturbation::from_json(&e, &read(perturbation)?)?;
            render(cli, Some(e.hash()), None, commands::compstat(&e, &p, *fd_step)?)
        }
        Command::Oracle { input, seed: flag } => {
            let e = load(input)?;
            let seed = seed(*flag)?;
            render(cli, Some(e.hash()), Some(seed), commands::oracle(&e, seed)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            return Failure::usage(err.to_string().trim().to_string(), None).emit();
        }
    };
    let text = match run(&cli) {
        Ok(text) => text,
        Err(f) => return f.emit(),
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                return Failure::io(path, e).emit();
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
