//! One-vs-one support vector machine with an RBF kernel, trained by a
//! simplified sequential-minimal-optimization loop on standardized features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::dataset::Dataset;

/// Training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    /// Box constraint (error penalty) C.
    pub c: f64,
    /// RBF width sigma in K(u, v) = exp(-|u - v|^2 / (2 sigma^2)).
    pub kernel_width: f64,
    /// KKT violation tolerance.
    pub kkt_tol: f64,
    /// Consecutive sweeps without an update before a machine is converged.
    pub quiet_sweeps: usize,
    /// Hard cap on sweeps per machine.
    pub max_sweeps: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 25.0,
            kernel_width: 1.0,
            kkt_tol: 1e-3,
            quiet_sweeps: 1,
            max_sweeps: 200,
        }
    }
}

/// One binary machine of the one-vs-one ensemble; stores its support
/// vectors in standardized feature space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseMachine {
    pub class_a: usize,
    pub class_b: usize,
    pub support_vectors: Vec<Vec<f64>>,
    /// alpha_i y_i per support vector, with y = +1 for class_a.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
}

impl PairwiseMachine {
    fn decision(&self, x: &[f64], width: f64) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, c)| c * rbf(sv, x, width))
            .sum::<f64>()
            + self.bias
    }

    /// Votes class_a on a nonnegative decision value, class_b otherwise.
    pub fn vote(&self, x: &[f64], width: f64) -> usize {
        if self.decision(x, width) >= 0.0 {
            self.class_a
        } else {
            self.class_b
        }
    }
}

/// The trained ensemble plus the feature standardization it was fit with.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmModel {
    pub machines: Vec<PairwiseMachine>,
    pub feature_means: Vec<f64>,
    pub feature_stds: Vec<f64>,
    pub kernel_width: f64,
    pub c: f64,
    pub n_classes: usize,
}

impl SvmModel {
    pub fn input_dim(&self) -> usize {
        self.feature_means.len()
    }

    /// True when every pairwise machine reached its KKT tolerance.
    pub fn converged(&self) -> bool {
        self.machines.iter().all(|m| m.converged)
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.feature_means.iter().zip(&self.feature_stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// Alphas closer than this to a box edge count as sitting on it.
const ALPHA_SLACK: f64 = 1e-8;

fn rbf(u: &[f64], v: &[f64], width: f64) -> f64 {
    let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    (-d2 / (2.0 * width * width)).exp()
}

/// Standardization statistics from training data; constant features get
/// unit scale to stay well-defined.
fn standardization(features: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let dim = features[0].len();
    let n = features.len() as f64;
    let mut means = vec![0.0; dim];
    for row in features {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v / n;
        }
    }
    let mut vars = vec![0.0; dim];
    for row in features {
        for ((var, m), v) in vars.iter_mut().zip(&means).zip(row) {
            *var += (v - m) * (v - m) / n;
        }
    }
    let stds = vars
        .iter()
        .map(|v| if *v > 1e-24 { v.sqrt() } else { 1.0 })
        .collect();
    (means, stds)
}

struct SmoProblem<'a> {
    y: &'a [f64],
    kernel: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    bias: f64,
    /// Cached prediction errors E_k = f(x_k) - y_k, updated incrementally.
    errors: Vec<f64>,
    c: f64,
    tol: f64,
}

impl<'a> SmoProblem<'a> {
    fn new(x: &[Vec<f64>], y: &'a [f64], c: f64, width: f64, tol: f64) -> Self {
        let n = x.len();
        let mut kernel = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let k = rbf(&x[i], &x[j], width);
                kernel[i][j] = k;
                kernel[j][i] = k;
            }
        }
        SmoProblem {
            y,
            kernel,
            alpha: vec![0.0; n],
            bias: 0.0,
            errors: y.iter().map(|yi| -yi).collect(),
            c,
            tol,
        }
    }

    /// Indices realizing the bias window edges: the point forcing the
    /// largest lower bound and the point forcing the smallest upper bound.
    /// They form the maximal violating pair and are always distinct when
    /// the window is empty. A bound only counts when the point has real
    /// room to move; alphas pinned within ALPHA_SLACK of a box edge would
    /// otherwise force window edges they cannot back up.
    fn window_pair(&self) -> (Option<usize>, Option<usize>, f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut i_lo = None;
        let mut i_hi = None;
        for (k, ((&y, &a), &e)) in self.y.iter().zip(&self.alpha).zip(&self.errors).enumerate() {
            let r0 = y * (e - self.bias);
            let off_upper = a < self.c - ALPHA_SLACK;
            let off_lower = a > ALPHA_SLACK;
            let (lower, upper) = if y > 0.0 {
                (
                    off_upper.then_some(-self.tol - r0),
                    off_lower.then_some(self.tol - r0),
                )
            } else {
                (
                    off_lower.then_some(r0 - self.tol),
                    off_upper.then_some(self.tol + r0),
                )
            };
            if let Some(b) = lower {
                if b > lo {
                    lo = b;
                    i_lo = Some(k);
                }
            }
            if let Some(b) = upper {
                if b < hi {
                    hi = b;
                    i_hi = Some(k);
                }
            }
        }
        (i_lo, i_hi, lo, hi)
    }

    /// One optimization round: maximal-violating-pair steps first, then a
    /// deterministic pass over all i. Returns the number of updates.
    fn sweep(&mut self) -> usize {
        let n = self.y.len();
        let mut changed = 0;
        for _ in 0..n {
            let (i_lo, i_hi, lo, hi) = self.window_pair();
            let (Some(i), Some(j)) = (i_lo, i_hi) else {
                break;
            };
            if lo <= hi || !self.step(i, j) {
                break;
            }
            changed += 1;
        }
        for i in 0..n {
            let e_i = self.errors[i];
            let r = e_i * self.y[i];
            let violates = (r < -self.tol && self.alpha[i] < self.c - ALPHA_SLACK)
                || (r > self.tol && self.alpha[i] > ALPHA_SLACK);
            if !violates {
                continue;
            }
            // preferred partner: largest |E_i - E_j|, lowest index on ties;
            // if that pair cannot move, fall back to the remaining indices
            // in order so a violating point is never abandoned early
            let mut j_best = usize::MAX;
            let mut gap_best = -1.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let gap = (e_i - self.errors[j]).abs();
                if gap > gap_best + 1e-15 {
                    gap_best = gap;
                    j_best = j;
                }
            }
            if j_best != usize::MAX && self.step(i, j_best) {
                changed += 1;
                continue;
            }
            for j in 0..n {
                if j == i || j == j_best {
                    continue;
                }
                if self.step(i, j) {
                    changed += 1;
                    break;
                }
            }
        }
        changed
    }

    fn step(&mut self, i: usize, j: usize) -> bool {
        let (e_i, e_j) = (self.errors[i], self.errors[j]);
        let (a_i_old, a_j_old) = (self.alpha[i], self.alpha[j]);
        let (lo, hi) = if (self.y[i] - self.y[j]).abs() < f64::EPSILON {
            let sum = a_i_old + a_j_old;
            ((sum - self.c).max(0.0), sum.min(self.c))
        } else {
            let diff = a_j_old - a_i_old;
            (diff.max(0.0), (self.c + diff).min(self.c))
        };
        if hi - lo < 1e-12 {
            return false;
        }
        let eta = 2.0 * self.kernel[i][j] - self.kernel[i][i] - self.kernel[j][j];
        // dual gain along the feasible line: g*(a - old) + eta/2*(a - old)^2
        let g = self.y[j] * (e_i - e_j);
        let a_j = if eta < -1e-12 {
            (a_j_old - g / eta).clamp(lo, hi)
        } else {
            // flat or convex section (near-duplicate points): the maximum
            // sits at a box endpoint
            let dl = lo - a_j_old;
            let dh = hi - a_j_old;
            let gain_lo = g * dl + 0.5 * eta * dl * dl;
            let gain_hi = g * dh + 0.5 * eta * dh * dh;
            let (target, gain) = if gain_lo >= gain_hi {
                (lo, gain_lo)
            } else {
                (hi, gain_hi)
            };
            if gain <= 1e-12 {
                return false;
            }
            target
        };
        // termination rests on the bias window, so even tiny steps may run;
        // this floor only guards against no-op churn
        if (a_j - a_j_old).abs() < 1e-8 {
            return false;
        }
        let a_i = a_i_old + self.y[i] * self.y[j] * (a_j_old - a_j);
        self.alpha[i] = a_i;
        self.alpha[j] = a_j;

        let b1 = self.bias
            - e_i
            - self.y[i] * (a_i - a_i_old) * self.kernel[i][i]
            - self.y[j] * (a_j - a_j_old) * self.kernel[i][j];
        let b2 = self.bias
            - e_j
            - self.y[i] * (a_i - a_i_old) * self.kernel[i][j]
            - self.y[j] * (a_j - a_j_old) * self.kernel[j][j];
        let new_bias = if a_i > 0.0 && a_i < self.c {
            b1
        } else if a_j > 0.0 && a_j < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        let d_i = self.y[i] * (a_i - a_i_old);
        let d_j = self.y[j] * (a_j - a_j_old);
        let d_b = new_bias - self.bias;
        self.bias = new_bias;
        for (k, e) in self.errors.iter_mut().enumerate() {
            *e += d_i * self.kernel[i][k] + d_j * self.kernel[j][k] + d_b;
        }
        true
    }

    /// Range of bias values compatible with every KKT condition at the
    /// current alphas (maximal-violating-pair criterion). The per-point
    /// checks steer the working-set choice, but convergence is a nonempty
    /// window, which does not depend on where the running bias happens
    /// to sit.
    fn bias_window(&self) -> (f64, f64) {
        let (_, _, lo, hi) = self.window_pair();
        (lo, hi)
    }
}

/// Trains the one-vs-one ensemble. Machines that hit the sweep cap carry
/// converged = false; the best-so-far coefficients are kept.
pub fn svm_train(data: &Dataset, config: &SvmConfig) -> Result<SvmModel> {
    if config.c <= 0.0 || config.kernel_width <= 0.0 {
        return Err(Error::InvalidParameter(
            "C and kernel width must be positive".into(),
        ));
    }
    let counts = data.class_counts();
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::Training("need at least two classes".into()));
    }
    let (means, stds) = standardization(data.features());
    let standardized: Vec<Vec<f64>> = data
        .features()
        .iter()
        .map(|row| {
            row.iter()
                .zip(means.iter().zip(&stds))
                .map(|(v, (m, s))| (v - m) / s)
                .collect()
        })
        .collect();

    let mut machines = Vec::new();
    for a in 0..data.n_classes() {
        for b in (a + 1)..data.n_classes() {
            if counts[a] == 0 || counts[b] == 0 {
                continue;
            }
            let mut x = Vec::new();
            let mut y = Vec::new();
            for (row, &label) in standardized.iter().zip(data.labels()) {
                if label == a {
                    x.push(row.clone());
                    y.push(1.0);
                } else if label == b {
                    x.push(row.clone());
                    y.push(-1.0);
                }
            }
            let mut problem =
                SmoProblem::new(&x, &y, config.c, config.kernel_width, config.kkt_tol);
            let mut quiet = 0;
            let mut converged = false;
            for _ in 0..config.max_sweeps {
                let changed = problem.sweep();
                let (lo, hi) = problem.bias_window();
                if lo <= hi {
                    // stale error cache is fine: only alphas and this final
                    // bias are read from here on
                    if lo.is_finite() && hi.is_finite() {
                        problem.bias = 0.5 * (lo + hi);
                    } else if lo.is_finite() {
                        problem.bias = lo;
                    } else if hi.is_finite() {
                        problem.bias = hi;
                    }
                    converged = true;
                    break;
                }
                if changed == 0 {
                    quiet += 1;
                    if quiet >= config.quiet_sweeps {
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
            let mut support_vectors = Vec::new();
            let mut coefficients = Vec::new();
            for (idx, &alpha) in problem.alpha.iter().enumerate() {
                debug_assert!((-1e-12..=config.c + 1e-12).contains(&alpha));
                if alpha > ALPHA_SLACK {
                    support_vectors.push(x[idx].clone());
                    coefficients.push(alpha * y[idx]);
                }
            }
            machines.push(PairwiseMachine {
                class_a: a,
                class_b: b,
                support_vectors,
                coefficients,
                bias: problem.bias,
                converged,
            });
        }
    }
    Ok(SvmModel {
        machines,
        feature_means: means,
        feature_stds: stds,
        kernel_width: config.kernel_width,
        c: config.c,
        n_classes: data.n_classes(),
    })
}

/// Pairwise-vote prediction; ties go to the lower class index.
pub fn svm_predict(model: &SvmModel, x: &[f64]) -> Result<usize> {
    if x.len() != model.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "model expects {} features, got {}",
            model.input_dim(),
            x.len()
        )));
    }
    let z = model.standardize(x);
    let mut votes = vec![0usize; model.n_classes];
    for machine in &model.machines {
        votes[machine.vote(&z, model.kernel_width)] += 1;
    }
    Ok(votes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(idx, _)| idx)
        .unwrap_or(0))
}
