//! Photonic measurement layer: polarization projectors, Poissonian count
//! simulation, the two count-ratio features, and 16-projector tomography
//! with linear inversion plus projection to the physical set.

use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    nearest_density_matrix, solve_real_linear, tensor_product, ComplexMatrix, DensityMatrix,
};

/// Single-photon polarization analyzer settings.
///
/// `A0` and `A0Prime` are the first (steering-side) observable bases, `B0`
/// and `B0Prime` the second side's rotated bases; `Perp` variants are the
/// orthogonal complements, ket (a, b) -> (-conj(b), conj(a)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
    D,
    R,
    A0,
    A0Perp,
    A0Prime,
    A0PrimePerp,
    B0,
    B0Perp,
    B0Prime,
    B0PrimePerp,
}

impl Polarization {
    /// Normalized single-qubit ket in the {H, V} basis.
    pub fn ket(self) -> [Complex64; 2] {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let eighth = std::f64::consts::FRAC_PI_8;
        let re = |a: f64, b: f64| [Complex64::new(a, 0.0), Complex64::new(b, 0.0)];
        match self {
            Polarization::H => re(1.0, 0.0),
            Polarization::V => re(0.0, 1.0),
            Polarization::D => re(inv_sqrt2, inv_sqrt2),
            Polarization::R => [
                Complex64::new(inv_sqrt2, 0.0),
                Complex64::new(0.0, -inv_sqrt2),
            ],
            Polarization::A0 => re(1.0, 0.0),
            Polarization::A0Perp => re(0.0, 1.0),
            Polarization::A0Prime => re(inv_sqrt2, -inv_sqrt2),
            Polarization::A0PrimePerp => re(inv_sqrt2, inv_sqrt2),
            Polarization::B0 => re(eighth.cos(), -eighth.sin()),
            Polarization::B0Perp => re(eighth.sin(), eighth.cos()),
            Polarization::B0Prime => re(eighth.cos(), eighth.sin()),
            Polarization::B0PrimePerp => re(-eighth.sin(), eighth.cos()),
        }
    }

    /// 2x2 projector |ket><ket|.
    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.ket()).expect("kets are normalized")
    }

    /// Signed observable 2 |ket><ket| - I.
    pub fn observable(self) -> ComplexMatrix {
        self.projector()
            .scale_re(2.0)
            .sub(&crate::linalg::identity(2))
            .expect("2x2 shapes")
    }

    pub fn token(self) -> &'static str {
        match self {
            Polarization::H => "H",
            Polarization::V => "V",
            Polarization::D => "D",
            Polarization::R => "R",
            Polarization::A0 => "A0",
            Polarization::A0Perp => "A0perp",
            Polarization::A0Prime => "A0p",
            Polarization::A0PrimePerp => "A0pperp",
            Polarization::B0 => "B0",
            Polarization::B0Perp => "B0perp",
            Polarization::B0Prime => "B0p",
            Polarization::B0PrimePerp => "B0pperp",
        }
    }
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        const ALL: [Polarization; 12] = [
            Polarization::H,
            Polarization::V,
            Polarization::D,
            Polarization::R,
            Polarization::A0,
            Polarization::A0Perp,
            Polarization::A0Prime,
            Polarization::A0PrimePerp,
            Polarization::B0,
            Polarization::B0Perp,
            Polarization::B0Prime,
            Polarization::B0PrimePerp,
        ];
        ALL.into_iter()
            .find(|p| p.token() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// Rank-1 two-photon projector for a pair of analyzer settings.
pub fn build_projector(label_a: Polarization, label_b: Polarization) -> ComplexMatrix {
    tensor_product(&label_a.projector(), &label_b.projector())
}

/// An ordered list of named two-photon projectors.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    pairs: Vec<(Polarization, Polarization)>,
    projectors: Vec<ComplexMatrix>,
}

impl ProjectorSet {
    fn from_pairs(pairs: &[(Polarization, Polarization)]) -> Self {
        let projectors = pairs.iter().map(|&(a, b)| build_projector(a, b)).collect();
        ProjectorSet {
            pairs: pairs.to_vec(),
            projectors,
        }
    }

    /// The 16 tomography settings.
    pub fn tomography() -> &'static ProjectorSet {
        static SET: OnceLock<ProjectorSet> = OnceLock::new();
        SET.get_or_init(|| {
            use Polarization::*;
            ProjectorSet::from_pairs(&[
                (H, H),
                (H, V),
                (H, R),
                (H, D),
                (V, D),
                (V, R),
                (V, H),
                (V, V),
                (R, V),
                (R, H),
                (R, R),
                (R, D),
                (D, D),
                (D, R),
                (D, H),
                (D, V),
            ])
        })
    }

    /// The 8 settings behind the two feature estimators.
    pub fn features() -> &'static ProjectorSet {
        static SET: OnceLock<ProjectorSet> = OnceLock::new();
        SET.get_or_init(|| {
            use Polarization::*;
            ProjectorSet::from_pairs(&[
                (A0, B0Prime),
                (A0Perp, B0Prime),
                (A0, B0PrimePerp),
                (A0Perp, B0PrimePerp),
                (A0Prime, B0),
                (A0PrimePerp, B0),
                (A0Prime, B0Perp),
                (A0PrimePerp, B0Perp),
            ])
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Polarization, Polarization)] {
        &self.pairs
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Pair names, e.g. "HH" or "A0pB0perp".
    pub fn names(&self) -> Vec<String> {
        self.pairs
            .iter()
            .map(|(a, b)| format!("{a}{b}"))
            .collect()
    }
}

/// Counting noise applied by `simulate_counts`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    Poisson,
    #[serde(rename = "none")]
    Noiseless,
}

impl std::fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NoiseModel::Poisson => "poisson",
            NoiseModel::Noiseless => "none",
        })
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(NoiseModel::Poisson),
            "none" => Ok(NoiseModel::Noiseless),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Photon-pair counts for one projector set.
///
/// Counts are kept as reals so that the noiseless mode can carry the exact
/// expected counts n0 Tr(rho Pi); Poisson mode always stores integers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountRecord {
    pub names: Vec<String>,
    pub counts: Vec<f64>,
    pub n0: u64,
}

impl CountRecord {
    /// Checks alignment with a projector set and nonnegativity.
    pub fn validate_against(&self, set: &ProjectorSet) -> Result<()> {
        if self.names != set.names() || self.counts.len() != set.len() {
            return Err(Error::InvalidParameter(
                "count record does not align with the projector set".into(),
            ));
        }
        if self.counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InsufficientCounts(
                "negative or non-finite count".into(),
            ));
        }
        Ok(())
    }
}

/// Simulates photon-pair counts with mean n0 Tr(rho Pi) per projector.
/// Deterministic for a given seed; the noiseless model records the exact
/// means instead of sampling.
pub fn simulate_counts(
    rho: &DensityMatrix,
    set: &ProjectorSet,
    n0: u64,
    seed: u64,
    noise: NoiseModel,
) -> Result<CountRecord> {
    if n0 == 0 {
        return Err(Error::InvalidParameter("n0 must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(set.len());
    for proj in set.projectors() {
        let mean = (n0 as f64 * rho.expectation(proj)?).max(0.0);
        let count = match noise {
            NoiseModel::Noiseless => mean,
            NoiseModel::Poisson => {
                if mean > 0.0 {
                    let dist = Poisson::new(mean).expect("positive finite mean");
                    dist.sample(&mut rng).round()
                } else {
                    0.0
                }
            }
        };
        counts.push(count);
    }
    Ok(CountRecord {
        names: set.names(),
        counts,
        n0,
    })
}

/// The two measured features (f1, f2) = (<a0 b0'>, <a0' b0>) under the
/// analyzer conventions of `Polarization`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub f1: f64,
    pub f2: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 2] {
        [self.f1, self.f2]
    }
}

fn count_ratio(counts: &[f64]) -> Result<f64> {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return Err(Error::InsufficientCounts(
            "feature estimator denominator is zero".into(),
        ));
    }
    Ok((counts[0] + counts[3] - counts[1] - counts[2]) / total)
}

/// Count-ratio feature estimators over the 8-projector feature set; each
/// correlator is (N_++ + N_-- - N_-+ - N_+-) / (sum of the four).
pub fn features_from_counts(record: &CountRecord) -> Result<FeatureVector> {
    record.validate_against(ProjectorSet::features())?;
    let f1 = count_ratio(&record.counts[0..4])?;
    let f2 = count_ratio(&record.counts[4..8])?;
    Ok(FeatureVector { f1, f2 })
}

/// Exact features as traces against the signed analyzer observables.
pub fn features_exact(rho: &DensityMatrix) -> Result<FeatureVector> {
    let f1 = rho.expectation(&tensor_product(
        &Polarization::A0.observable(),
        &Polarization::B0Prime.observable(),
    ))?;
    let f2 = rho.expectation(&tensor_product(
        &Polarization::A0Prime.observable(),
        &Polarization::B0.observable(),
    ))?;
    Ok(FeatureVector { f1, f2 })
}

/// Row of the real 16x16 tomography design matrix for one projector:
/// coefficients of (diag(0..3), Re rho_ij i<j, Im rho_ij i<j).
fn design_row(proj: &ComplexMatrix) -> Vec<f64> {
    let mut row = Vec::with_capacity(16);
    for k in 0..4 {
        row.push(proj[(k, k)].re);
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            row.push(2.0 * proj[(j, i)].re);
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            row.push(-2.0 * proj[(j, i)].im);
        }
    }
    row
}

fn design_matrix() -> &'static Vec<Vec<f64>> {
    static DESIGN: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    DESIGN.get_or_init(|| {
        let rows: Vec<Vec<f64>> = ProjectorSet::tomography()
            .projectors()
            .iter()
            .map(design_row)
            .collect();
        assert!(
            solve_real_linear(&rows, &[0.0; 16]).is_some(),
            "tomography design matrix is singular"
        );
        rows
    })
}

/// Linear-inversion tomography over the 16-projector set, then projection
/// to the nearest density matrix.
pub fn tomography_reconstruct(record: &CountRecord) -> Result<DensityMatrix> {
    record.validate_against(ProjectorSet::tomography())?;
    if record.n0 == 0 {
        return Err(Error::InvalidParameter("n0 must be positive".into()));
    }
    let probs: Vec<f64> = record
        .counts
        .iter()
        .map(|c| c / record.n0 as f64)
        .collect();
    let x = solve_real_linear(design_matrix(), &probs)
        .ok_or_else(|| Error::SingularSystem("tomography design matrix".into()))?;
    let mut est = ComplexMatrix::zeros(4, 4);
    for k in 0..4 {
        est[(k, k)] = Complex64::new(x[k], 0.0);
    }
    let mut idx = 4;
    let mut offdiag = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            offdiag.push((i, j));
        }
    }
    for &(i, j) in &offdiag {
        est[(i, j)] += Complex64::new(x[idx], 0.0);
        est[(j, i)] += Complex64::new(x[idx], 0.0);
        idx += 1;
    }
    for &(i, j) in &offdiag {
        est[(i, j)] += Complex64::new(0.0, x[idx]);
        est[(j, i)] += Complex64::new(0.0, -x[idx]);
        idx += 1;
    }
    nearest_density_matrix(&est)
}
