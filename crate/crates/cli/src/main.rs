//! `dpar`: train models, analyze and strengthen passwords, and measure
//! improvement over a sample.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dpar_core::api::{self, RecommendError};
use dpar_core::evaluate::evaluate;
use dpar_core::model::train_reader;
use dpar_core::{load_model, save_model, Engine, Error, L33tTable, RecommenderConfig, TrainOptions, Variant};

#[derive(Parser)]
#[command(name = "dpar", version, about = "Data-driven password strength analysis and recommendation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model from a corpus with one password (optionally `\t<count>`) per line.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// L33t table file; the built-in table is used when omitted.
        #[arg(long)]
        l33t: Option<PathBuf>,
        /// Drop keys seen fewer than this many times.
        #[arg(long, default_value_t = 1)]
        min_count: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print strength, category and crack time for a password.
    Analyze {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        l33t: Option<PathBuf>,
        /// Emit the same JSON body as `/v1/analyze`.
        #[arg(long)]
        json: bool,
        password: String,
    },
    /// Print up to three stronger variants of a password.
    Recommend {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        l33t: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "asterisks")]
        variant: Variant,
        /// Emit the same JSON body as `/v1/recommend`.
        #[arg(long)]
        json: bool,
        password: String,
    },
    /// Report strength improvement over a sample of passwords.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        l33t: Option<PathBuf>,
        #[arg(long)]
        sample: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
}

enum Failure {
    /// I/O, configuration, model or sample problems.
    Setup(String),
    /// The password was rejected by the policy.
    Policy,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Setup(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Setup(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors are configuration errors; 2 is reserved for policy
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Setup(message)) => {
            eprintln!("dpar: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Policy) => ExitCode::from(2),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    let config = RecommenderConfig::default();
    let mut out = io::stdout().lock();
    match command {
        Command::Train { corpus, l33t, min_count, out: path } => {
            let table = l33t_table(l33t.as_deref())?;
            let reader = BufReader::new(open(&corpus)?);
            let (model, stats) = train_reader(reader, &table, &TrainOptions { min_count })?;
            save_model(&model, &path).map_err(|e| Failure::Setup(format!("{}: {e}", path.display())))?;
            writeln!(out, "lines\t{}", stats.lines)?;
            writeln!(out, "skipped\t{}", stats.skipped)?;
        }
        Command::Analyze { model, l33t, json, password } => {
            let engine = engine(&model, l33t.as_deref())?;
            match api::analyze(&engine, &password, &config) {
                Ok(resp) if json => writeln!(out, "{}", api::to_json(&resp))?,
                Ok(resp) => {
                    writeln!(out, "PS\t{}", resp.ps)?;
                    writeln!(out, "category\t{}", resp.category.as_str())?;
                    writeln!(out, "crack_seconds\t{}", resp.crack_seconds)?;
                    writeln!(out, "crack_human\t{}", resp.crack_human)?;
                    writeln!(out, "feedback\t{}", resp.feedback_text)?;
                }
                Err(violation) => {
                    if json {
                        writeln!(out, "{}", api::to_json(&violation))?;
                    }
                    return Err(policy_failure(&violation.violations));
                }
            }
        }
        Command::Recommend { model, l33t, seed, variant, json, password } => {
            let engine = engine(&model, l33t.as_deref())?;
            let config = RecommenderConfig { seed: Some(seed.unwrap_or_else(|| config.resolve_seed())), ..config };
            match api::recommend(&engine, &password, variant, &config) {
                Ok(resp) if json => writeln!(out, "{}", api::to_json(&resp))?,
                Ok(resp) => {
                    writeln!(
                        out,
                        "PS\t{}\tcategory\t{}\tseed\t{}",
                        resp.analysis.ps,
                        resp.analysis.category.as_str(),
                        resp.seed
                    )?;
                    writeln!(out, "id\tlabel\tpassword\tPS\tld\tcrack_human\tmask_preview")?;
                    for b in &resp.buttons {
                        writeln!(
                            out,
                            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            b.id, b.label, b.password, b.ps, b.ld, b.crack_human, b.mask_preview
                        )?;
                    }
                }
                Err(RecommendError::Policy(violation)) => {
                    if json {
                        writeln!(out, "{}", api::to_json(&violation))?;
                    }
                    return Err(policy_failure(&violation.violations));
                }
                Err(RecommendError::Internal(e)) => return Err(e.into()),
            }
        }
        Command::Eval { model, l33t, sample, seed, n } => {
            let engine = engine(&model, l33t.as_deref())?;
            let lines = BufReader::new(open(&sample)?)
                .split(b'\n')
                .map(|l| l.map(|b| String::from_utf8_lossy(&b).into_owned()))
                .collect::<io::Result<Vec<_>>>()?;
            let report = evaluate(&engine, &lines, n, seed, &config)?;
            writeln!(out, "password\toriginal_PS\tbest_PS\tld")?;
            for row in &report.rows {
                writeln!(out, "{}\t{}\t{}\t{}", row.password, row.original_bits, row.best_bits, row.ld)?;
            }
            writeln!(out, "valid_lines\t{}", report.valid_lines)?;
            writeln!(out, "evaluated\t{}", report.rows.len())?;
            writeln!(out, "mean_improvement\t{}", report.mean_improvement())?;
            writeln!(out, "min_improvement\t{}", report.min_improvement())?;
        }
    }
    Ok(())
}

fn policy_failure(violations: &[dpar_core::Violation]) -> Failure {
    let names: Vec<&str> = violations.iter().map(|v| v.as_str()).collect();
    eprintln!("dpar: password violates policy: {}", names.join(", "));
    Failure::Policy
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::Setup(format!("{}: {e}", path.display())))
}

fn l33t_table(path: Option<&Path>) -> Result<L33tTable, Failure> {
    match path {
        Some(p) => L33tTable::load(p).map_err(|e| Failure::Setup(format!("{}: {e}", p.display()))),
        None => Ok(L33tTable::default()),
    }
}

fn engine(model: &Path, l33t: Option<&Path>) -> Result<Engine, Failure> {
    let table = l33t_table(l33t)?;
    let model = load_model(model).map_err(|e| Failure::Setup(format!("{}: {e}", model.display())))?;
    Ok(Engine::new(model, table)?)
}
