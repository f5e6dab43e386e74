//! phase-export: regenerate the per-state phase-diagram CSV for already
//! trained models without retraining.

use serde::Serialize;

use qcorr::ml::{load_model, ModelKind};

use crate::config::RunConfig;
use crate::error::{LabError, LabResult};

use super::train_eval::{read_split, write_phase_csv};

#[derive(Debug, Serialize)]
pub struct PhaseExportSummary {
    pub config_hash: String,
    pub files: Vec<String>,
}

pub fn run(config: &RunConfig, selection: &[ModelKind]) -> LabResult<PhaseExportSummary> {
    let records = read_split(&config.out_dir.join("test.jsonl"))?;
    let mut files = Vec::new();
    for &kind in selection {
        let model_path = config.out_dir.join("models").join(format!("{kind}.json"));
        if !model_path.exists() {
            return Err(LabError::MissingArtifact(format!(
                "{} (run train-eval first)",
                model_path.display()
            )));
        }
        let model = load_model(&model_path)?;
        let csv_path = config.out_dir.join(format!("phase_{kind}.csv"));
        write_phase_csv(&csv_path, &records, &model)?;
        files.push(csv_path.display().to_string());
    }
    Ok(PhaseExportSummary {
        config_hash: config.hash(),
        files,
    })
}
