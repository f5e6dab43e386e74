//! gen-data: simulate the train and test splits and write them as JSONL.

use std::path::PathBuf;

use serde::Serialize;

use qcorr::ml::write_jsonl;

use crate::config::RunConfig;
use crate::error::LabResult;
use crate::grid::build_grids;
use crate::pipeline::{simulate_split, RowSpec};

/// What gen-data produced, echoed to stdout as JSON.
#[derive(Debug, Serialize)]
pub struct GenDataSummary {
    pub config_hash: String,
    pub root_seed: u64,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Rows per class, train then test, indexed I..IV.
    pub train_label_counts: [usize; 4],
    pub test_label_counts: [usize; 4],
    pub train_path: PathBuf,
    pub test_path: PathBuf,
}

pub fn run(config: &RunConfig) -> LabResult<GenDataSummary> {
    config.validate()?;
    let grids = build_grids(config)?;
    let spec = RowSpec::uniform(config.noise, config.n0);
    let train = simulate_split(&grids.train, spec, config.root_seed, "train-state")?;
    let test = simulate_split(&grids.test, spec, config.root_seed, "test-state")?;
    std::fs::create_dir_all(&config.out_dir)?;
    let train_path = config.out_dir.join("train.jsonl");
    let test_path = config.out_dir.join("test.jsonl");
    write_jsonl(&train_path, &train)?;
    write_jsonl(&test_path, &test)?;
    let mut train_label_counts = [0usize; 4];
    for row in &train {
        train_label_counts[row.label.class_index()] += 1;
    }
    let mut test_label_counts = [0usize; 4];
    for row in &test {
        test_label_counts[row.label.class_index()] += 1;
    }
    Ok(GenDataSummary {
        config_hash: config.hash(),
        root_seed: config.root_seed,
        train_rows: train.len(),
        test_rows: test.len(),
        train_label_counts,
        test_label_counts,
        train_path,
        test_path,
    })
}
