//! train-eval: fit the selected classifiers on the training split, score
//! them on the test split (four-class and the three binary questions), and
//! write reports, phase-diagram CSVs, and reusable model files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use qcorr::ml::{
    binary_task, evaluate, read_jsonl, save_model, train_model, BinaryQuestion, Classifier,
    ClassifierModel, Dataset, DatasetRecord, EvalReport, ModelKind,
};
use qcorr::states::CorrelationLabel;
use qcorr::{Error, Result};

use crate::config::RunConfig;
use crate::error::{LabError, LabResult};

/// Scores for one model family.
#[derive(Debug, Serialize)]
pub struct ModelReport {
    pub four_class: EvalReport,
    /// Keyed by binary question name.
    pub binary: BTreeMap<String, EvalReport>,
}

/// The full train-eval report written to disk.
#[derive(Debug, Serialize)]
pub struct TrainEvalReport {
    pub config_hash: String,
    pub root_seed: u64,
    pub train_rows: usize,
    pub test_rows: usize,
    pub models: BTreeMap<String, ModelReport>,
}

/// Reads a dataset file produced by gen-data, with a pointer to it when
/// missing.
pub fn read_split(path: &Path) -> LabResult<Vec<DatasetRecord>> {
    if !path.exists() {
        return Err(LabError::MissingArtifact(format!(
            "{} (run gen-data first)",
            path.display()
        )));
    }
    Ok(read_jsonl(path)?)
}

/// Writes the per-state phase-diagram export for one trained model.
pub fn write_phase_csv(
    path: &Path,
    records: &[DatasetRecord],
    model: &ClassifierModel,
) -> Result<()> {
    let mut text = String::from("p,theta,true,pred,correct\n");
    for record in records {
        let predicted = model.predict(&[record.f1, record.f2])?;
        let predicted = CorrelationLabel::from_class_index(predicted).ok_or_else(|| {
            Error::UnknownLabel(format!("class index {predicted} out of range"))
        })?;
        let correct = predicted == record.label;
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            record.p, record.theta, record.label, predicted, correct
        ));
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn run(config: &RunConfig, selection: &[ModelKind]) -> LabResult<TrainEvalReport> {
    let train_records = read_split(&config.out_dir.join("train.jsonl"))?;
    let test_records = read_split(&config.out_dir.join("test.jsonl"))?;
    let train = Dataset::from_records(&train_records)?;
    let test = Dataset::from_records(&test_records)?;
    let models_dir = config.out_dir.join("models");
    std::fs::create_dir_all(&models_dir)?;
    let mut models = BTreeMap::new();
    for kind in selection {
        let model = train_model(*kind, &train, &config.models)?;
        let four_class = evaluate(&model, &test)?;
        save_model(&models_dir.join(format!("{kind}.json")), &model)?;
        write_phase_csv(
            &config.out_dir.join(format!("phase_{kind}.csv")),
            &test_records,
            &model,
        )?;
        let mut binary = BTreeMap::new();
        for question in BinaryQuestion::ALL {
            binary.insert(
                question.to_string(),
                binary_task(*kind, &train, &test, question, &config.models)?,
            );
        }
        models.insert(kind.to_string(), ModelReport { four_class, binary });
    }
    let report = TrainEvalReport {
        config_hash: config.hash(),
        root_seed: config.root_seed,
        train_rows: train.len(),
        test_rows: test.len(),
        models,
    };
    let report_path = config.out_dir.join("train_eval_report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}
