use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qfg::commands::{self, Code, ContractArgs, McArgs, OrderKind, QecArgs};
use qfg::{exit, CliError};
use qfg_core::montecarlo::{SamplerOptions, DEFAULT_BURN_IN, DEFAULT_THINNING};

/// Complex factor graphs for quantum probabilities.
///
/// Exit codes: 0 success, 1 internal or I/O error, 2 parse or usage error,
/// 3 semantic error, 4 oracle mismatch, 5 resource guard exceeded.
/// QFG_TOL=ABS[,REL] overrides the default tolerance.
#[derive(Parser)]
#[command(name = "qfg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Greedy,
    User,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodeArg {
    Rep3,
    Shor,
}

#[derive(Subcommand)]
enum Command {
    /// Exterior function of a box, or the partition sum.
    Contract {
        graph: PathBuf,
        /// Name of a box in the graph file.
        #[arg(value_name = "BOX", required_unless_present = "partition_sum")]
        box_name: Option<String>,
        #[arg(long, conflicts_with = "box_name")]
        partition_sum: bool,
        #[arg(long, value_enum, default_value = "greedy")]
        order: Order,
        /// Elimination order (file variable ids) for --order user.
        #[arg(long, value_delimiter = ',')]
        elim: Vec<usize>,
        /// Cross-check against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        raw: bool,
    },
    /// Outcome probability table of a timeline.
    Joint {
        timeline: PathBuf,
        /// Observed outcomes, e.g. y1=0 (repeatable or comma separated).
        #[arg(long, value_delimiter = ',')]
        condition: Vec<String>,
        #[arg(long)]
        raw: bool,
    },
    /// Syndrome tables and recovery for the repetition and Shor codes.
    Qec {
        #[arg(value_enum)]
        code: CodeArg,
        /// Pauli coefficients w0,w1,w2,w3 (each RE or RE:IM), or "random".
        #[arg(long)]
        error: String,
        #[arg(long)]
        location: usize,
        /// Only this syndrome, e.g. 11 or 11000000.
        #[arg(long)]
        syndrome: Option<String>,
        /// Apply the Pauli correction and report the fidelity.
        #[arg(long)]
        recover: bool,
        /// Input state a,b for recovery (each RE or RE:IM); random if absent.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        raw: bool,
    },
    /// Monte Carlo estimate of the partition sum, as JSON.
    Mc {
        /// Graph or timeline file.
        file: PathBuf,
        /// uniform, abs_f or abs_f_annealed:RHO.
        #[arg(long, default_value = "uniform")]
        scheme: String,
        #[arg(short = 'K', long = "samples", default_value_t = 10_000)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Annealing levels, e.g. 0.25,0.5,1.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
        /// Join every sample with its mirror image.
        #[arg(long)]
        augment: bool,
        #[arg(long)]
        metropolis: bool,
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: usize,
        #[arg(long, default_value_t = DEFAULT_THINNING)]
        thinning: usize,
        #[arg(long)]
        raw: bool,
    },
    /// Check a graph or timeline file against the schema and the measurement
    /// completeness condition.
    Validate { file: PathBuf },
    /// Compile a timeline into a graph file.
    Compile {
        timeline: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run(cli: Cli) -> Result<String, CliError> {
    let tol = commands::tolerance_from_env(std::env::var("QFG_TOL").ok().as_deref())?;
    match cli.command {
        Command::Contract {
            graph,
            box_name,
            partition_sum,
            order,
            elim,
            oracle,
            raw,
        } => {
            let args = ContractArgs {
                box_name,
                partition_sum,
                order: match order {
                    Order::Greedy => OrderKind::Greedy,
                    Order::User => OrderKind::User,
                },
                elimination: elim,
                oracle,
                raw,
            };
            commands::contract(&read(&graph)?, &args, tol)
        }
        Command::Joint {
            timeline,
            condition,
            raw,
        } => {
            let conds = condition
                .iter()
                .map(|c| commands::parse_condition(c))
                .collect::<Result<Vec<_>, _>>()?;
            commands::joint(&read(&timeline)?, &conds, raw, tol)
        }
        Command::Qec {
            code,
            error,
            location,
            syndrome,
            recover,
            state,
            seed,
            raw,
        } => {
            let state = match state {
                Some(s) => {
                    let v = s
                        .split(',')
                        .map(commands::parse_complex)
                        .collect::<Result<Vec<_>, _>>()?;
                    Some(
                        <[_; 2]>::try_from(v)
                            .map_err(|_| CliError::Usage("--state needs two amplitudes".into()))?,
                    )
                }
                None => None,
            };
            let args = QecArgs {
                code: match code {
                    CodeArg::Rep3 => Code::Rep3,
                    CodeArg::Shor => Code::Shor,
                },
                error: commands::parse_error_arg(&error)?,
                location,
                syndrome: syndrome.as_deref().map(commands::parse_bits).transpose()?,
                recover,
                state,
                seed,
                raw,
            };
            commands::qec(&args)
        }
        Command::Mc {
            file,
            scheme,
            k,
            seed,
            ladder,
            augment,
            metropolis,
            burn_in,
            thinning,
            raw,
        } => {
            let args = McArgs {
                scheme: commands::parse_scheme(&scheme)?,
                k,
                seed,
                ladder,
                augment,
                options: SamplerOptions {
                    burn_in,
                    thinning,
                    force_metropolis: metropolis,
                },
                raw,
            };
            commands::mc(&read(&file)?, &args, tol)
        }
        Command::Validate { file } => commands::validate(&read(&file)?, tol),
        Command::Compile { timeline, output } => {
            let json = commands::compile(&read(&timeline)?, tol)?;
            match output {
                Some(path) => {
                    std::fs::write(&path, json).map_err(|source| CliError::Io {
                        path: path.display().to_string(),
                        source,
                    })?;
                    Ok(String::new())
                }
                None => Ok(json),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::PARSE as u8
            } else {
                exit::OK as u8
            });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qfg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
