//! Command-line front end. See the library's `cli` module for job semantics.

use clap::{Args, Parser, Subcommand};
use relcrit::cli::{default_radii, run, InputDocument, JobCommand, JobSpec, OutputFormat, Source};
use relcrit::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "relcrit",
    version,
    about = "Exact cone-positivity checks for square integrability on p-adic symmetric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, default_value = "table", value_parser = ["table", "machine"])]
    format: String,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 3 when the evaluated verdict is negative.
    #[arg(long, global = true)]
    fail_on_negative: bool,
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Preset name: gl3_inner, gl4_symplectic, group_case(n).
    #[arg(long)]
    preset: Option<String>,
    /// Path to a JSON input document.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl SourceArgs {
    fn resolve(&self) -> Result<Source, Error> {
        match (&self.preset, &self.input) {
            (Some(_), Some(_)) => Err(Error::InvalidJob(
                "give either --preset or --input, not both".into(),
            )),
            (Some(name), None) => Ok(Source::Preset(name.clone())),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                Ok(Source::Inline(Box::new(InputDocument::from_json(&text)?)))
            }
            (None, None) => Err(Error::InvalidJob("give --preset or --input".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived structure of a symmetric-space datum.
    Describe {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Run the square-integrability criterion.
    Check {
        #[command(flatten)]
        source: SourceArgs,
        /// Use the preset's bundled golden exponent family.
        #[arg(long)]
        golden: bool,
        /// Only consider exponents with the support flag set.
        #[arg(long)]
        lambda_only: bool,
        /// Enforce central vanishing of every considered exponent.
        #[arg(long)]
        unitary: bool,
    },
    /// Compute Jacquet-module exponents of an induced representation.
    Exponents {
        /// Rank of the general linear group.
        #[arg(long)]
        gln: usize,
        /// Representation, e.g. "ind(1,2 | char 0 ; st 2)".
        #[arg(long)]
        rep: String,
        /// Comma-separated simple-root names of the parabolic; empty for the
        /// Borel.
        #[arg(long, default_value = "")]
        along: String,
    },
    /// Verify the sliced-cone partition on a coefficient box.
    Partition {
        #[command(flatten)]
        source: SourceArgs,
        /// Valuation threshold N (epsilon = q^-N).
        #[arg(long, default_value_t = 1)]
        threshold: i64,
        /// Coefficient box radius.
        #[arg(long, default_value_t = 8)]
        radius: i64,
    },
    /// Numerically probe the series behind a parabolic check.
    Series {
        #[command(flatten)]
        source: SourceArgs,
        /// Probe the preset's golden exponents.
        #[arg(long)]
        golden: bool,
        /// Explicit exponent vector, comma-separated rationals.
        #[arg(long)]
        vector: Option<String>,
        /// Comma-separated simple-root names of the parabolic subset.
        #[arg(long, default_value = "")]
        parabolic: String,
        /// Residue-field size.
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Polynomial degree of the coefficient bound.
        #[arg(long, default_value_t = 1)]
        poly_degree: u32,
        /// Comma-separated shell radii schedule.
        #[arg(long, default_value = "4,8,12,16")]
        radii: String,
    },
}

fn split_names(csv: &str) -> Vec<String> {
    csv.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn build_job(cli: &Cli) -> Result<JobSpec, Error> {
    let format = match cli.format.as_str() {
        "machine" => OutputFormat::Machine,
        _ => OutputFormat::Table,
    };
    let command = match &cli.command {
        Command::Describe { source } => JobCommand::Describe {
            source: source.resolve()?,
        },
        Command::Check {
            source,
            golden,
            lambda_only,
            unitary,
        } => JobCommand::Check {
            source: source.resolve()?,
            golden: *golden,
            lambda_only: *lambda_only,
            unitary: *unitary,
        },
        Command::Exponents { gln, rep, along } => JobCommand::Exponents {
            gl_rank: *gln,
            rep: rep.clone(),
            along: split_names(along),
        },
        Command::Partition {
            source,
            threshold,
            radius,
        } => JobCommand::Partition {
            source: source.resolve()?,
            threshold: *threshold,
            radius: *radius,
        },
        Command::Series {
            source,
            golden,
            vector,
            parabolic,
            q,
            poly_degree,
            radii,
        } => {
            let radii: Vec<usize> = if radii.trim().is_empty() {
                default_radii()
            } else {
                radii
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad radius `{t}`")))
                    })
                    .collect::<Result<_, _>>()?
            };
            JobCommand::Series {
                source: source.resolve()?,
                golden: *golden,
                vector: vector.as_ref().map(|v| split_names(v)),
                parabolic: split_names(parabolic),
                q: *q,
                poly_degree: *poly_degree,
                radii,
            }
        }
    };
    Ok(JobSpec {
        command,
        format,
        fail_on_negative: cli.fail_on_negative,
    })
}

fn main() -> ExitCode {
    // cap internal parallelism when requested
    if let Ok(threads) = std::env::var("RELCRIT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let job = match build_job(&cli) {
        Ok(job) => job,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&job) {
        Ok(outcome) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &outcome.rendered) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", outcome.rendered);
            }
            if job.fail_on_negative && outcome.verdict_failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
