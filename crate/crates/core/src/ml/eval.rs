//! Classifier evaluation: accuracy, confusion matrix, per-class recall.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::dataset::Dataset;
use crate::ml::Classifier;

/// Evaluation summary over one dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// confusion[true_class][predicted_class] = row count.
    pub confusion: Vec<Vec<usize>>,
    /// None for classes absent from the dataset.
    pub per_class_recall: Vec<Option<f64>>,
    /// Row indices the model got wrong.
    pub misclassified: Vec<usize>,
    pub n: usize,
}

/// Runs `model` over every row of `data`.
pub fn evaluate(model: &dyn Classifier, data: &Dataset) -> Result<EvalReport> {
    if data.is_empty() {
        return Err(Error::BadDataset("cannot evaluate on empty dataset".into()));
    }
    if model.input_dim() != data.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "model expects {} features, dataset has {}",
            model.input_dim(),
            data.input_dim()
        )));
    }
    if model.n_classes() < data.n_classes() {
        return Err(Error::DimensionMismatch(format!(
            "model covers {} classes, dataset has {}",
            model.n_classes(),
            data.n_classes()
        )));
    }
    let k = model.n_classes();
    let mut confusion = vec![vec![0usize; k]; k];
    let mut misclassified = Vec::new();
    for (i, (x, &truth)) in data.features().iter().zip(data.labels()).enumerate() {
        let pred = model.predict(x)?;
        confusion[truth][pred] += 1;
        if pred != truth {
            misclassified.push(i);
        }
    }
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let per_class_recall = confusion
        .iter()
        .enumerate()
        .map(|(c, row)| {
            let total: usize = row.iter().sum();
            (total > 0).then(|| confusion[c][c] as f64 / total as f64)
        })
        .collect();
    Ok(EvalReport {
        accuracy: correct as f64 / data.len() as f64,
        confusion,
        per_class_recall,
        misclassified,
        n: data.len(),
    })
}
