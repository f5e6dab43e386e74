//! Training/test data containers and their JSON Lines form.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{CorrelationLabel, StateParams};

/// Where a dataset row's features came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Exact,
    Poisson,
}

/// One serialized state: parameters, measured features, and ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub p: f64,
    pub theta: f64,
    pub f1: f64,
    pub f2: f64,
    pub label: CorrelationLabel,
    pub source: DataSource,
    pub seed: u64,
}

/// In-memory dataset: feature rows with integer class labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    params: Vec<Option<StateParams>>,
}

impl Dataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        params: Vec<Option<StateParams>>,
    ) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::BadDataset("empty dataset".into()));
        }
        if features.len() != labels.len() || features.len() != params.len() {
            return Err(Error::BadDataset("row count mismatch".into()));
        }
        let dim = features[0].len();
        if dim == 0 {
            return Err(Error::BadDataset("zero-dimensional features".into()));
        }
        for row in &features {
            if row.len() != dim {
                return Err(Error::BadDataset("ragged feature rows".into()));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::BadDataset("non-finite feature value".into()));
            }
        }
        if labels.iter().any(|&l| l >= class_names.len()) {
            return Err(Error::BadDataset("label outside class range".into()));
        }
        Ok(Dataset {
            features,
            labels,
            class_names,
            params,
        })
    }

    /// Four-class dataset over (f1, f2) from serialized records.
    pub fn from_records(records: &[DatasetRecord]) -> Result<Self> {
        let features = records.iter().map(|r| vec![r.f1, r.f2]).collect();
        let labels = records.iter().map(|r| r.label.class_index()).collect();
        let params = records
            .iter()
            .map(|r| StateParams::new(r.p, r.theta).ok())
            .collect();
        Dataset::new(
            features,
            labels,
            CorrelationLabel::ALL.iter().map(|c| c.to_string()).collect(),
            params,
        )
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn params(&self) -> &[Option<StateParams>] {
        &self.params
    }

    /// Rows per class, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Collapses the four classes to a yes/no dataset for one question.
    pub fn to_binary(&self, question: BinaryQuestion) -> Result<Dataset> {
        if self.n_classes() != 4 {
            return Err(Error::BadDataset(
                "binary collapse needs the four-class labeling".into(),
            ));
        }
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                let label = CorrelationLabel::from_class_index(l).expect("validated label");
                usize::from(question.answer(label))
            })
            .collect();
        Dataset::new(
            self.features.clone(),
            labels,
            vec!["no".into(), "yes".into()],
            self.params.clone(),
        )
    }
}

/// The three yes/no questions asked of the classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinaryQuestion {
    Entangled,
    Steerable,
    Nonlocal,
}

impl BinaryQuestion {
    pub const ALL: [BinaryQuestion; 3] = [
        BinaryQuestion::Entangled,
        BinaryQuestion::Steerable,
        BinaryQuestion::Nonlocal,
    ];

    /// Yes iff the class is at least as non-classical as the question asks.
    pub fn answer(self, label: CorrelationLabel) -> bool {
        let idx = label.class_index();
        match self {
            BinaryQuestion::Entangled => idx >= 1,
            BinaryQuestion::Steerable => idx >= 2,
            BinaryQuestion::Nonlocal => idx >= 3,
        }
    }
}

impl std::fmt::Display for BinaryQuestion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BinaryQuestion::Entangled => "entangled",
            BinaryQuestion::Steerable => "steerable",
            BinaryQuestion::Nonlocal => "nonlocal",
        })
    }
}

impl std::str::FromStr for BinaryQuestion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entangled" => Ok(BinaryQuestion::Entangled),
            "steerable" => Ok(BinaryQuestion::Steerable),
            "nonlocal" => Ok(BinaryQuestion::Nonlocal),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Writes records as JSON Lines.
pub fn write_jsonl(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a JSON Lines dataset file.
pub fn read_jsonl(path: &Path) -> Result<Vec<DatasetRecord>> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_records() -> Vec<DatasetRecord> {
        vec![
            DatasetRecord {
                p: 0.2,
                theta: 0.5,
                f1: 0.14,
                f2: 0.11,
                label: CorrelationLabel::Separable,
                source: DataSource::Exact,
                seed: 1,
            },
            DatasetRecord {
                p: 0.9,
                theta: 0.8,
                f1: 0.63,
                f2: 0.64,
                label: CorrelationLabel::BellNonlocal,
                source: DataSource::Poisson,
                seed: 2,
            },
        ]
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = std::env::temp_dir().join("qcorr-dataset-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.jsonl");
        let records = sample_records();
        write_jsonl(&path, &records).unwrap();
        let back = read_jsonl(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].label, CorrelationLabel::Separable);
        assert_eq!(back[1].source, DataSource::Poisson);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.lines().next().unwrap().contains("\"label\":\"I\""));
        assert!(text.lines().nth(1).unwrap().contains("\"source\":\"poisson\""));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![], vec![], vec!["a".into()], vec![]).is_err());
        assert!(Dataset::new(
            vec![vec![1.0], vec![2.0, 3.0]],
            vec![0, 0],
            vec!["a".into()],
            vec![None, None]
        )
        .is_err());
        assert!(Dataset::new(
            vec![vec![f64::NAN]],
            vec![0],
            vec!["a".into()],
            vec![None]
        )
        .is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![3], vec!["a".into()], vec![None]).is_err());
    }

    #[test]
    fn binary_collapse() {
        let ds = Dataset::from_records(&sample_records()).unwrap();
        for (question, expect) in [
            (BinaryQuestion::Entangled, [0, 1]),
            (BinaryQuestion::Steerable, [0, 1]),
            (BinaryQuestion::Nonlocal, [0, 1]),
        ] {
            let b = ds.to_binary(question).unwrap();
            assert_eq!(b.labels(), expect);
            assert_eq!(b.n_classes(), 2);
        }
        // class III answers: entangled yes, steerable yes, nonlocal no
        assert!(BinaryQuestion::Entangled.answer(CorrelationLabel::OneWaySteerable));
        assert!(BinaryQuestion::Steerable.answer(CorrelationLabel::OneWaySteerable));
        assert!(!BinaryQuestion::Nonlocal.answer(CorrelationLabel::OneWaySteerable));
        assert!(!BinaryQuestion::Steerable.answer(CorrelationLabel::Entangled));
    }
}
