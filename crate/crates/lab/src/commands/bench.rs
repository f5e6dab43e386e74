//! bench: median per-state wall times for tomography+criteria labeling
//! versus inference with each trained classifier. The paper's qualitative
//! claim is that labeling a state through measurement and criteria costs
//! orders of magnitude more than asking a trained model.

use std::collections::BTreeMap;
use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use qcorr::criteria::label_state;
use qcorr::measurement::{
    features_from_counts, simulate_counts, tomography_reconstruct, CountRecord, NoiseModel,
    ProjectorSet,
};
use qcorr::ml::{load_model, Classifier, ClassifierModel, ModelKind};
use qcorr::states::make_state;

use crate::config::RunConfig;
use crate::error::{LabError, LabResult};
use crate::grid::build_grids;
use crate::seed::derive_seed;

/// Timing comparison results, written before any ordering check fails.
#[derive(Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub config_hash: String,
    pub repetitions: usize,
    pub states: usize,
    pub timer_resolution_ns: f64,
    /// Median wall time per state, nanoseconds, keyed by quantity.
    pub median_ns: BTreeMap<String, f64>,
    /// Quantities whose timer resolution exceeds 10% of the median.
    pub resolution_flags: Vec<String>,
    pub tomography_slower_than_ann: bool,
    pub ann_slower_than_svm: bool,
    pub ann_slower_than_dt: bool,
}

/// Smallest observable nonzero gap between consecutive clock readings.
fn timer_resolution_ns() -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..256 {
        let t0 = Instant::now();
        let mut t1 = Instant::now();
        while t1.duration_since(t0).is_zero() {
            t1 = Instant::now();
        }
        best = best.min(t1.duration_since(t0).as_nanos() as f64);
    }
    best
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

fn measure(repetitions: usize, states: usize, mut work: impl FnMut(usize)) -> f64 {
    let mut samples = Vec::with_capacity(repetitions * states);
    for _ in 0..repetitions {
        for s in 0..states {
            let start = Instant::now();
            work(s);
            samples.push(start.elapsed().as_nanos() as f64);
        }
    }
    median(&mut samples)
}

fn load_required(config: &RunConfig, kind: ModelKind) -> LabResult<ClassifierModel> {
    let path = config.out_dir.join("models").join(format!("{kind}.json"));
    if !path.exists() {
        return Err(LabError::MissingArtifact(format!(
            "{} (run train-eval first)",
            path.display()
        )));
    }
    Ok(load_model(&path)?)
}

pub fn run(config: &RunConfig) -> LabResult<BenchReport> {
    let ann = load_required(config, ModelKind::Ann)?;
    let svm = load_required(config, ModelKind::Svm)?;
    let dt = load_required(config, ModelKind::Dt)?;
    let grids = build_grids(config)?;
    let n_states = config.bench.states.clamp(1, grids.test.len());
    let mut tomography_records: Vec<CountRecord> = Vec::with_capacity(n_states);
    let mut feature_rows: Vec<[f64; 2]> = Vec::with_capacity(n_states);
    for (i, params) in grids.test.iter().take(n_states).enumerate() {
        let rho = make_state(*params);
        tomography_records.push(simulate_counts(
            &rho,
            ProjectorSet::tomography(),
            config.n0,
            derive_seed(config.root_seed, "bench-tomography", i as u64),
            NoiseModel::Poisson,
        )?);
        let counts = simulate_counts(
            &rho,
            ProjectorSet::features(),
            config.n0,
            derive_seed(config.root_seed, "bench-features", i as u64),
            NoiseModel::Poisson,
        )?;
        feature_rows.push(features_from_counts(&counts)?.as_array());
    }
    let repetitions = config.bench.repetitions.max(30);

    let tomography_ns = measure(repetitions, n_states, |s| {
        let rho = tomography_reconstruct(&tomography_records[s]).expect("simulated counts");
        black_box(label_state(&rho).expect("reconstruction is a valid state"));
    });
    let ann_ns = measure(repetitions, n_states, |s| {
        black_box(ann.predict(&feature_rows[s]).expect("two features"));
    });
    let svm_ns = measure(repetitions, n_states, |s| {
        black_box(svm.predict(&feature_rows[s]).expect("two features"));
    });
    let dt_ns = measure(repetitions, n_states, |s| {
        black_box(dt.predict(&feature_rows[s]).expect("two features"));
    });

    let resolution = timer_resolution_ns();
    let mut median_ns = BTreeMap::new();
    median_ns.insert("tomography_label".to_string(), tomography_ns);
    median_ns.insert("ann".to_string(), ann_ns);
    median_ns.insert("svm".to_string(), svm_ns);
    median_ns.insert("dt".to_string(), dt_ns);
    let resolution_flags = median_ns
        .iter()
        .filter(|(_, &v)| resolution > 0.1 * v)
        .map(|(k, _)| k.clone())
        .collect();
    let report = BenchReport {
        config_hash: config.hash(),
        repetitions,
        states: n_states,
        timer_resolution_ns: resolution,
        median_ns,
        resolution_flags,
        tomography_slower_than_ann: tomography_ns > ann_ns,
        ann_slower_than_svm: ann_ns > svm_ns,
        ann_slower_than_dt: ann_ns > dt_ns,
    };
    std::fs::create_dir_all(&config.out_dir)?;
    std::fs::write(
        config.out_dir.join("bench_report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    if !(report.tomography_slower_than_ann
        && report.ann_slower_than_svm
        && report.ann_slower_than_dt)
    {
        return Err(LabError::OrderingViolated(format!(
            "medians (ns): tomography+label {tomography_ns:.0}, ann {ann_ns:.0}, \
             svm {svm_ns:.0}, dt {dt_ns:.0}; expected tomography > ann > svm, dt"
        )));
    }
    Ok(report)
}
