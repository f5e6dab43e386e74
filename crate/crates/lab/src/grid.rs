//! Train/test parameter grids: a uniform (p, theta) lattice minus the
//! exclusion windows, with the test grid shifted in theta so the two sets
//! share no state.

use qcorr::states::{is_theta_excluded, StateParams};
use qcorr::{Error, Result};

use crate::config::RunConfig;

/// The two disjoint parameter sets of a run.
#[derive(Debug, Clone)]
pub struct Grids {
    pub train: Vec<StateParams>,
    pub test: Vec<StateParams>,
}

fn p_values(config: &RunConfig) -> Vec<f64> {
    if config.p_count == 1 {
        return vec![config.p_min];
    }
    let step = (config.p_max - config.p_min) / (config.p_count - 1) as f64;
    (0..config.p_count)
        .map(|i| config.p_min + i as f64 * step)
        .collect()
}

/// Midpoint-spaced candidate angles over (0, 2pi); midpoints keep the
/// endpoints themselves (which are excluded anyway) off the grid.
fn theta_candidates(config: &RunConfig) -> Vec<f64> {
    let step = std::f64::consts::TAU / config.theta_count as f64;
    (0..config.theta_count)
        .map(|k| (k as f64 + 0.5) * step)
        .collect()
}

fn surviving_thetas(candidates: &[f64], offset: f64, half_width: f64) -> Vec<f64> {
    candidates
        .iter()
        .map(|t| t + offset)
        .filter(|t| !is_theta_excluded(*t, half_width))
        .collect()
}

/// Theta-major enumeration truncated to `size` rows, so a truncated grid
/// keeps full p coverage on every remaining theta row.
fn enumerate(ps: &[f64], thetas: &[f64], size: usize) -> Result<Vec<StateParams>> {
    let available = ps.len() * thetas.len();
    if available < size {
        return Err(Error::InvalidParameter(format!(
            "grid provides {available} states after exclusion, {size} requested"
        )));
    }
    let mut out = Vec::with_capacity(size);
    'outer: for theta in thetas {
        for p in ps {
            if out.len() == size {
                break 'outer;
            }
            out.push(StateParams::new(*p, *theta)?);
        }
    }
    Ok(out)
}

/// Builds both grids and enforces train/test disjointness.
pub fn build_grids(config: &RunConfig) -> Result<Grids> {
    let ps = p_values(config);
    let candidates = theta_candidates(config);
    let delta = config
        .delta_theta
        .unwrap_or(std::f64::consts::PI / config.theta_count as f64);
    let train_thetas = surviving_thetas(&candidates, 0.0, config.exclusion_half_width);
    let test_thetas = surviving_thetas(&candidates, delta, config.exclusion_half_width);
    let train = enumerate(&ps, &train_thetas, config.train_size)?;
    let test = enumerate(&ps, &test_thetas, config.test_size)?;
    for a in &train {
        for b in &test {
            if (a.p - b.p).abs() < 1e-12 && (a.theta - b.theta).abs() < 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "train and test grids overlap at (p, theta) = ({}, {})",
                    a.p, a.theta
                )));
            }
        }
    }
    Ok(Grids { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcorr::states::theoretical_label;

    #[test]
    fn default_grids_have_the_documented_sizes() {
        let grids = build_grids(&RunConfig::default()).unwrap();
        assert_eq!(grids.train.len(), 445);
        assert_eq!(grids.test.len(), 455);
    }

    #[test]
    fn no_grid_point_sits_in_an_exclusion_window() {
        let config = RunConfig::default();
        let grids = build_grids(&config).unwrap();
        for params in grids.train.iter().chain(&grids.test) {
            assert!(!is_theta_excluded(params.theta, config.exclusion_half_width));
            theoretical_label(*params).unwrap();
        }
    }

    #[test]
    fn zero_offset_is_rejected_as_overlapping() {
        let mut config = RunConfig::default();
        config.delta_theta = Some(0.0);
        assert!(build_grids(&config).is_err());
    }

    #[test]
    fn all_four_classes_appear_in_both_splits() {
        let grids = build_grids(&RunConfig::default()).unwrap();
        for (name, split) in [("train", &grids.train), ("test", &grids.test)] {
            let mut counts = [0usize; 4];
            for params in split.iter() {
                counts[theoretical_label(*params).unwrap().class_index()] += 1;
            }
            assert!(
                counts.iter().all(|&c| c > 10),
                "{name} class histogram {counts:?}"
            );
        }
    }

    #[test]
    fn undersized_grids_error_out() {
        let mut config = RunConfig::default();
        config.p_count = 2;
        config.theta_count = 4;
        assert!(build_grids(&config).is_err());
    }
}
