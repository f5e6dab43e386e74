//! qcorr-lab binary: dispatches subcommands, applies flag overrides on top
//! of the config file, and reports failures as JSON on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use qcorr::measurement::NoiseModel;
use qcorr_lab::config::RunConfig;
use qcorr_lab::error::{emit_error_json, LabResult};
use qcorr_lab::{commands, ModelSelection};

#[derive(Parser)]
#[command(
    name = "qcorr-lab",
    version,
    about = "Learn nonclassical correlations from simulated photonic data"
)]
struct Cli {
    /// Run configuration file (JSON); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Noise model override: poisson or none.
    #[arg(long, global = true)]
    noise: Option<String>,
    /// Classifier selection: ann, svm, dt, or all.
    #[arg(long, global = true, default_value = "all")]
    model: ModelSelection,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the train/test grids and write dataset files.
    GenData,
    /// Train the classifiers and write evaluation reports.
    TrainEval,
    /// Compare noise-matched training against noiseless training.
    MismatchStudy,
    /// Time tomography+criteria labeling against model inference.
    Bench,
    /// Classify random bipartite states via extension feasibility.
    SdpRun,
    /// Re-export phase-diagram CSVs from saved models.
    PhaseExport,
}

fn load_config(cli: &Cli) -> LabResult<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.root_seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(noise) = &cli.noise {
        config.noise = match noise.as_str() {
            "poisson" => NoiseModel::Poisson,
            "none" => NoiseModel::Noiseless,
            other => {
                return Err(qcorr::Error::InvalidParameter(format!(
                    "unknown noise model '{other}' (expected poisson or none)"
                ))
                .into())
            }
        };
    }
    config.validate()?;
    Ok(config)
}

fn dispatch(cli: &Cli) -> LabResult<String> {
    let config = load_config(cli)?;
    let kinds = cli.model.kinds();
    let summary = match cli.command {
        Command::GenData => serde_json::to_string_pretty(&commands::gen_data::run(&config)?)?,
        Command::TrainEval => {
            serde_json::to_string_pretty(&commands::train_eval::run(&config, &kinds)?)?
        }
        Command::MismatchStudy => serde_json::to_string_pretty(&commands::mismatch::run(&config)?)?,
        Command::Bench => serde_json::to_string_pretty(&commands::bench::run(&config)?)?,
        Command::SdpRun => serde_json::to_string_pretty(&commands::sdp_run::run(&config)?)?,
        Command::PhaseExport => {
            serde_json::to_string_pretty(&commands::phase_export::run(&config, &kinds)?)?
        }
    };
    Ok(summary)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            emit_error_json("usage", &err.to_string());
            return ExitCode::from(2);
        }
    };
    match dispatch(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            emit_error_json(err.kind(), &err.to_string());
            ExitCode::FAILURE
        }
    }
}
