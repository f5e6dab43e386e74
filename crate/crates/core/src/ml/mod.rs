//! From-scratch classifiers over the two-feature correlation data: a small
//! feedforward network, an RBF-kernel SVM, and a CART decision tree, plus
//! shared dataset, evaluation, and model-file plumbing.

pub mod ann;
pub mod dataset;
pub mod eval;
pub mod svm;
pub mod tree;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use ann::{ann_forward, ann_train, AnnConfig, AnnModel};
pub use dataset::{
    read_jsonl, write_jsonl, BinaryQuestion, DataSource, Dataset, DatasetRecord,
};
pub use eval::{evaluate, EvalReport};
pub use svm::{svm_predict, svm_train, SvmConfig, SvmModel};
pub use tree::{dt_predict, dt_train, DtConfig, DtModel};

use crate::error::{Error, Result};

/// Anything that maps a feature vector to a class index.
pub trait Classifier {
    fn predict(&self, x: &[f64]) -> Result<usize>;
    fn n_classes(&self) -> usize;
    fn input_dim(&self) -> usize;
}

impl Classifier for AnnModel {
    /// Argmax of the class probabilities; ties go to the lower index.
    fn predict(&self, x: &[f64]) -> Result<usize> {
        let probs = ann_forward(self, x)?;
        let mut best = 0usize;
        for (i, &p) in probs.iter().enumerate() {
            if p > probs[best] {
                best = i;
            }
        }
        Ok(best)
    }

    fn n_classes(&self) -> usize {
        AnnModel::n_classes(self)
    }

    fn input_dim(&self) -> usize {
        AnnModel::input_dim(self)
    }
}

impl Classifier for SvmModel {
    fn predict(&self, x: &[f64]) -> Result<usize> {
        svm_predict(self, x)
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn input_dim(&self) -> usize {
        SvmModel::input_dim(self)
    }
}

impl Classifier for DtModel {
    fn predict(&self, x: &[f64]) -> Result<usize> {
        dt_predict(self, x)
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn input_dim(&self) -> usize {
        self.input_dim
    }
}

/// Which classifier family to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ann,
    Svm,
    Dt,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Ann, ModelKind::Svm, ModelKind::Dt];
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModelKind::Ann => "ann",
            ModelKind::Svm => "svm",
            ModelKind::Dt => "dt",
        };
        write!(f, "{name}")
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ann" => Ok(ModelKind::Ann),
            "svm" => Ok(ModelKind::Svm),
            "dt" => Ok(ModelKind::Dt),
            other => Err(Error::InvalidParameter(format!(
                "unknown model kind '{other}' (expected ann, svm, or dt)"
            ))),
        }
    }
}

/// Hyperparameters for all three families, so runs are reproducible from one
/// config value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub ann: AnnConfig,
    pub svm: SvmConfig,
    pub dt: DtConfig,
}

/// A trained model of any family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierModel {
    Ann(AnnModel),
    Svm(SvmModel),
    Dt(DtModel),
}

impl ClassifierModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            ClassifierModel::Ann(_) => ModelKind::Ann,
            ClassifierModel::Svm(_) => ModelKind::Svm,
            ClassifierModel::Dt(_) => ModelKind::Dt,
        }
    }
}

impl Classifier for ClassifierModel {
    fn predict(&self, x: &[f64]) -> Result<usize> {
        match self {
            ClassifierModel::Ann(m) => m.predict(x),
            ClassifierModel::Svm(m) => m.predict(x),
            ClassifierModel::Dt(m) => m.predict(x),
        }
    }

    fn n_classes(&self) -> usize {
        match self {
            ClassifierModel::Ann(m) => Classifier::n_classes(m),
            ClassifierModel::Svm(m) => Classifier::n_classes(m),
            ClassifierModel::Dt(m) => Classifier::n_classes(m),
        }
    }

    fn input_dim(&self) -> usize {
        match self {
            ClassifierModel::Ann(m) => Classifier::input_dim(m),
            ClassifierModel::Svm(m) => Classifier::input_dim(m),
            ClassifierModel::Dt(m) => Classifier::input_dim(m),
        }
    }
}

/// Trains one classifier family on `data`.
pub fn train_model(
    kind: ModelKind,
    data: &Dataset,
    config: &TrainConfig,
) -> Result<ClassifierModel> {
    match kind {
        ModelKind::Ann => Ok(ClassifierModel::Ann(ann_train(data, &config.ann)?)),
        ModelKind::Svm => Ok(ClassifierModel::Svm(svm_train(data, &config.svm)?)),
        ModelKind::Dt => Ok(ClassifierModel::Dt(dt_train(data, &config.dt)?)),
    }
}

/// Collapses both splits to a yes/no question, trains on the first, and
/// evaluates on the second.
pub fn binary_task(
    kind: ModelKind,
    train: &Dataset,
    test: &Dataset,
    question: BinaryQuestion,
    config: &TrainConfig,
) -> Result<EvalReport> {
    let train_bin = train.to_binary(question)?;
    let test_bin = test.to_binary(question)?;
    let model = train_model(kind, &train_bin, config)?;
    evaluate(&model, &test_bin)
}

const MODEL_FORMAT_VERSION: &str = "qcorr-model/1";

/// On-disk envelope for a trained model.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: String,
    pub model: ClassifierModel,
}

/// Writes a model as versioned JSON.
pub fn save_model(path: &Path, model: &ClassifierModel) -> Result<()> {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION.to_string(),
        model: model.clone(),
    };
    let text = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads a model written by `save_model`, rejecting unknown versions.
pub fn load_model(path: &Path) -> Result<ClassifierModel> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text)?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelFormat(format!(
            "unsupported model format '{}' (expected '{MODEL_FORMAT_VERSION}')",
            file.format_version
        )));
    }
    Ok(file.model)
}
