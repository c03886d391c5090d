use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sauq::models::{build_model, ModelOptions, MODEL_NAMES};
use sauq::report::Format;
use sauq::study::{resolve, run_study, ResolvedStudy, StudyConfig};
use sauq::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "sauq", version, about = "Sensitivity analysis and uncertainty quantification studies")]
struct Cli {
    /// Override the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for model evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the output directory from the config.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study config.
    Run { config: PathBuf },
    /// List registered models with their inputs and outputs.
    ListModels,
    /// Check a study config without running it.
    Validate { config: PathBuf },
}

fn load(cli: &Cli, path: &PathBuf) -> Result<ResolvedStudy, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = StudyConfig::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.output_dir {
        cfg.output_dir = d.clone();
    }
    resolve(&cfg, Some(&text)).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };

    match &cli.command {
        Command::ListModels => {
            let opts = ModelOptions::default();
            for name in MODEL_NAMES {
                let m = build_model(name, &opts).expect("registered model");
                println!(
                    "{name:<11} inputs=[{}] outputs=[{}]",
                    m.input_names().join(", "),
                    m.output_names().join(", ")
                );
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&cli, config) {
            Ok(study) => {
                println!(
                    "{}: ok ({} on {} parameters, {} methods)",
                    config.display(),
                    study.config.model.name,
                    study.specs.len(),
                    study.config.methods.len()
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Run { config } => {
            let study = match load(&cli, config) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            match run_study(&study, format) {
                Ok(summary) => {
                    for m in &summary.methods {
                        match &m.error {
                            None => println!("{:<14} ok      {}", m.label, m.files.join(" ")),
                            Some(e) => eprintln!("{:<14} FAILED  {e}", m.label),
                        }
                    }
                    println!("results in {}", summary.output_dir.display());
                    if summary.ok() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_RUNTIME)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_RUNTIME)
                }
            }
        }
    }
}
