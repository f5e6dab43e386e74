//! mismatch-study: the train/test source-mismatch experiment. Models are
//! trained once on exact features and once on noisy features, then both
//! are scored on the same noisy test split. Noise-matched training should
//! win, and the thin one-way-steerable class should suffer most: the
//! exact-trained model's class-III recall on noisy data is compared
//! against the same model's recall on an exact-feature reference split.

use std::collections::BTreeMap;

use serde::Serialize;

use qcorr::measurement::NoiseModel;
use qcorr::ml::{evaluate, train_model, Dataset, ModelKind};

use crate::config::RunConfig;
use crate::error::LabResult;
use crate::grid::build_grids;
use crate::pipeline::{simulate_split, RowSpec};

/// One train/test pairing's scores.
#[derive(Debug, Serialize)]
pub struct MismatchArm {
    pub train_source: String,
    pub test_source: String,
    pub accuracy: f64,
    pub per_class_recall: Vec<Option<f64>>,
    pub class_iii_recall: Option<f64>,
}

/// Matched-vs-mismatched comparison for one model family.
#[derive(Debug, Serialize)]
pub struct MismatchModelReport {
    /// Noisy-trained, scored on the noisy test split.
    pub matched: MismatchArm,
    /// Exact-trained, scored on the same noisy test split.
    pub mismatched: MismatchArm,
    /// Exact-trained, scored on an exact-feature reference split.
    pub exact_reference: MismatchArm,
    /// matched accuracy minus mismatched accuracy.
    pub accuracy_gap: f64,
    /// True when the exact-trained model loses class-III recall on noisy
    /// data relative to its own exact-feature reference.
    pub class_iii_recall_degrades: bool,
}

/// The full mismatch-study report.
#[derive(Debug, Serialize)]
pub struct MismatchReport {
    pub config_hash: String,
    pub root_seed: u64,
    /// Budget of the short feature measurement in this study; labels
    /// always use the full tomography budget.
    pub feature_n0: u64,
    pub label_n0: u64,
    pub models: BTreeMap<String, MismatchModelReport>,
}

const MATCHED_TAG: &str = "mismatch-train";
const CLEAN_TAG: &str = "mismatch-train-clean";
const TEST_TAG: &str = "mismatch-test";
const TEST_CLEAN_TAG: &str = "mismatch-test-clean";

pub fn run(config: &RunConfig) -> LabResult<MismatchReport> {
    config.validate()?;
    let grids = build_grids(config)?;
    let root = config.root_seed;
    // labels keep the full tomography budget; only the quick two-setting
    // feature measurement is starved, which is the regime the study probes
    let noisy_spec = RowSpec {
        label_noise: NoiseModel::Poisson,
        label_n0: config.n0,
        feature_noise: NoiseModel::Poisson,
        feature_n0: config.mismatch_n0,
    };
    let clean_spec = RowSpec::uniform(NoiseModel::Noiseless, config.n0);
    let train_noisy = simulate_split(&grids.train, noisy_spec, root, MATCHED_TAG)?;
    let train_clean = simulate_split(&grids.train, clean_spec, root, CLEAN_TAG)?;
    let test_noisy = simulate_split(&grids.test, noisy_spec, root, TEST_TAG)?;
    let test_clean = simulate_split(&grids.test, clean_spec, root, TEST_CLEAN_TAG)?;
    let train_noisy = Dataset::from_records(&train_noisy)?;
    let train_clean = Dataset::from_records(&train_clean)?;
    let test = Dataset::from_records(&test_noisy)?;
    let test_clean = Dataset::from_records(&test_clean)?;
    let arm = |train: &str, test: &str, eval: qcorr::ml::EvalReport| MismatchArm {
        train_source: train.into(),
        test_source: test.into(),
        accuracy: eval.accuracy,
        class_iii_recall: eval.per_class_recall[2],
        per_class_recall: eval.per_class_recall,
    };
    let mut models = BTreeMap::new();
    for kind in ModelKind::ALL {
        let matched_model = train_model(kind, &train_noisy, &config.models)?;
        let mismatched_model = train_model(kind, &train_clean, &config.models)?;
        let matched = arm("poisson", "poisson", evaluate(&matched_model, &test)?);
        let mismatched = arm("exact", "poisson", evaluate(&mismatched_model, &test)?);
        let exact_reference = arm("exact", "exact", evaluate(&mismatched_model, &test_clean)?);
        let accuracy_gap = matched.accuracy - mismatched.accuracy;
        let class_iii_recall_degrades = match (
            mismatched.class_iii_recall,
            exact_reference.class_iii_recall,
        ) {
            (Some(noisy), Some(exact)) => noisy < exact,
            _ => false,
        };
        models.insert(
            kind.to_string(),
            MismatchModelReport {
                matched,
                mismatched,
                exact_reference,
                accuracy_gap,
                class_iii_recall_degrades,
            },
        );
    }
    let report = MismatchReport {
        config_hash: config.hash(),
        root_seed: root,
        feature_n0: config.mismatch_n0,
        label_n0: config.n0,
        models,
    };
    std::fs::create_dir_all(&config.out_dir)?;
    std::fs::write(
        config.out_dir.join("mismatch_report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}
