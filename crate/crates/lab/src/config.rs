//! Run configuration: one JSON file drives every command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qcorr::measurement::NoiseModel;
use qcorr::ml::TrainConfig;
use qcorr::{Error, Result};

/// Parameters of one SDP batch run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SdpRunConfig {
    pub dim_a: usize,
    pub dim_b: usize,
    pub n_states: usize,
    /// Iteration budget used for the headline agreement number.
    pub budget: usize,
    /// Budgets for the (iterations, error) trade-off table.
    pub budget_sweep: Vec<usize>,
    /// Ginibre rank; omitted means full rank.
    pub rank: Option<usize>,
}

impl Default for SdpRunConfig {
    fn default() -> Self {
        SdpRunConfig {
            dim_a: 2,
            dim_b: 2,
            n_states: 500,
            budget: 500,
            budget_sweep: vec![50, 100, 250, 500],
            rank: None,
        }
    }
}

/// Parameters of the timing comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    /// Timing repetitions per quantity; at least 30 are always taken.
    pub repetitions: usize,
    /// How many distinct states the timing loop cycles over.
    pub states: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repetitions: 50,
            states: 32,
        }
    }
}

/// Everything a run needs: grid shape, sizes, noise, seeds, models, paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Number of p values, uniformly spaced over [p_min, p_max].
    pub p_count: usize,
    pub p_min: f64,
    pub p_max: f64,
    /// Number of candidate theta values, midpoint-spaced over (0, 2pi).
    pub theta_count: usize,
    /// Half-width of the exclusion window around multiples of pi/2.
    pub exclusion_half_width: f64,
    pub train_size: usize,
    pub test_size: usize,
    /// Test-grid theta offset; omitted means half the theta spacing.
    pub delta_theta: Option<f64>,
    /// Mean photon-pair count scale for simulated measurements.
    pub n0: u64,
    /// Feature-measurement count scale for the source-mismatch study;
    /// labels there keep the full `n0` tomography budget.
    pub mismatch_n0: u64,
    pub root_seed: u64,
    pub noise: NoiseModel,
    pub out_dir: PathBuf,
    pub models: TrainConfig,
    pub sdp: SdpRunConfig,
    pub bench: BenchConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p_count: 23,
            p_min: 0.02,
            p_max: 0.98,
            theta_count: 24,
            exclusion_half_width: 0.1,
            train_size: 445,
            test_size: 455,
            delta_theta: None,
            n0: 60_000,
            mismatch_n0: 200,
            root_seed: 7,
            noise: NoiseModel::Poisson,
            out_dir: PathBuf::from("out"),
            models: TrainConfig::default(),
            sdp: SdpRunConfig::default(),
            bench: BenchConfig::default(),
        }
    }
}

impl RunConfig {
    /// Loads a config file; missing fields fall back to defaults.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        let config: RunConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_count == 0 || self.theta_count == 0 {
            return Err(Error::InvalidParameter("empty parameter grid".into()));
        }
        if !(0.0..=1.0).contains(&self.p_min)
            || !(0.0..=1.0).contains(&self.p_max)
            || self.p_min >= self.p_max
        {
            return Err(Error::InvalidParameter(format!(
                "p range [{}, {}] is not an ordered subrange of [0, 1]",
                self.p_min, self.p_max
            )));
        }
        if self.train_size == 0 || self.test_size == 0 {
            return Err(Error::InvalidParameter(
                "train and test sizes must be at least 1".into(),
            ));
        }
        if self.n0 == 0 || self.mismatch_n0 == 0 {
            return Err(Error::InvalidParameter("count scales must be positive".into()));
        }
        if !(self.exclusion_half_width > 0.0) || self.exclusion_half_width >= 0.5 {
            return Err(Error::InvalidParameter(format!(
                "exclusion half-width {} outside (0, 0.5)",
                self.exclusion_half_width
            )));
        }
        Ok(())
    }

    /// Hash of the serialized config, recorded in every report.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }
}
