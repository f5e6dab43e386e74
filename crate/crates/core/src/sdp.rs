//! Separability testing beyond PPT: feasibility of a swap-symmetric
//! extension on A⊗B⊗A with PPT side constraints, solved by projection
//! splitting over the three positivity cones and the affine constraint set.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::criteria::ppt_min_eigenvalue;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, identity, partial_transpose_multi, tensor_product, ComplexMatrix,
    DensityMatrix,
};

/// Hermitian operator basis for one subsystem: identity first, everything
/// else traceless, Tr(sigma_i sigma_j) = alpha * delta_ij with alpha = d.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    pub dim: usize,
    pub alpha: f64,
    pub elements: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Identity plus scaled generalized Gell-Mann matrices.
pub fn build_hermitian_basis(d: usize) -> OperatorBasis {
    assert!(d >= 2, "operator basis needs dimension >= 2");
    let mut elements = Vec::with_capacity(d * d);
    elements.push(identity(d));
    let pair_scale = (d as f64 / 2.0).sqrt();
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = Complex64::new(pair_scale, 0.0);
            sym[(k, j)] = Complex64::new(pair_scale, 0.0);
            elements.push(sym);
            let mut asym = ComplexMatrix::zeros(d, d);
            asym[(j, k)] = Complex64::new(0.0, -pair_scale);
            asym[(k, j)] = Complex64::new(0.0, pair_scale);
            elements.push(asym);
        }
    }
    for k in 1..d {
        let scale = (d as f64 / (k * (k + 1)) as f64).sqrt();
        let mut diag = ComplexMatrix::zeros(d, d);
        for i in 0..k {
            diag[(i, i)] = Complex64::new(scale, 0.0);
        }
        diag[(k, k)] = Complex64::new(-(k as f64) * scale, 0.0);
        elements.push(diag);
    }
    OperatorBasis {
        dim: d,
        alpha: d as f64,
        elements,
    }
}

/// Nonzero entries of one basis element, as (row, col, value).
type SparseElement = Vec<(usize, usize, Complex64)>;

fn sparsify(basis: &OperatorBasis) -> Vec<SparseElement> {
    basis
        .elements
        .iter()
        .map(|m| {
            let mut entries = Vec::new();
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if m[(r, c)].norm() > 1e-15 {
                        entries.push((r, c, m[(r, c)]));
                    }
                }
            }
            entries
        })
        .collect()
}

/// The affine side of the feasibility problem: operators on A⊗B⊗A whose
/// coefficient tensor is swap-symmetric in the two A slots and reduces to
/// the target state when the second copy is traced out.
pub struct ExtensionProblem {
    dim_a: usize,
    dim_b: usize,
    dims: [usize; 3],
    total: usize,
    na: usize,
    nb: usize,
    /// Tr(B_m B_m) for the triple products, used to extract coefficients.
    norm: f64,
    /// Required values of the coefficients with identity in the second A slot.
    fixed: Vec<f64>,
    sparse_a: Vec<SparseElement>,
    sparse_b: Vec<SparseElement>,
}

impl ExtensionProblem {
    pub fn new(rho: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a < 2 || dim_b < 2 {
            return Err(Error::InvalidParameter(format!(
                "subsystem dimensions must be >= 2, got {dim_a}x{dim_b}"
            )));
        }
        if dim_a * dim_b != rho.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} does not factor dimension {}",
                dim_a,
                dim_b,
                rho.dim()
            )));
        }
        let total = dim_a * dim_b * dim_a;
        if dim_a * dim_a * dim_b > 100 {
            return Err(Error::DimensionGuard(format!(
                "extension space dimension {total} exceeds the supported limit of 100"
            )));
        }
        let basis_a = build_hermitian_basis(dim_a);
        let basis_b = build_hermitian_basis(dim_b);
        let na = dim_a * dim_a;
        let nb = dim_b * dim_b;
        let divisor = basis_a.alpha * basis_b.alpha * basis_a.alpha;
        let mut fixed = vec![0.0; na * nb];
        for (i, si) in basis_a.elements.iter().enumerate() {
            for (j, sj) in basis_b.elements.iter().enumerate() {
                let overlap = rho.matrix().trace_product(&tensor_product(si, sj))?;
                fixed[i * nb + j] = overlap.re / divisor;
            }
        }
        Ok(ExtensionProblem {
            dim_a,
            dim_b,
            dims: [dim_a, dim_b, dim_a],
            total,
            na,
            nb,
            norm: divisor,
            fixed,
            sparse_a: sparsify(&basis_a),
            sparse_b: sparsify(&basis_b),
        })
    }

    pub fn extension_dim(&self) -> usize {
        self.total
    }

    fn coeff_index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.nb + j) * self.na + k
    }

    /// Coefficients of `x` in the triple product basis.
    fn coefficients(&self, x: &ComplexMatrix) -> Result<Vec<f64>> {
        if !x.is_square() || x.rows() != self.total {
            return Err(Error::DimensionMismatch(format!(
                "expected {0}x{0} extension operator, got {1}x{2}",
                self.total,
                x.rows(),
                x.cols()
            )));
        }
        let mut y = vec![0.0; self.na * self.nb * self.na];
        for (i, p) in self.sparse_a.iter().enumerate() {
            for (j, q) in self.sparse_b.iter().enumerate() {
                for (k, r) in self.sparse_a.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(ar, ac, pv) in p {
                        for &(br, bc, qv) in q {
                            for &(cr, cc, rv) in r {
                                let row = (ac * self.dim_b + bc) * self.dim_a + cc;
                                let col = (ar * self.dim_b + br) * self.dim_a + cr;
                                acc += x[(row, col)] * pv * qv * rv;
                            }
                        }
                    }
                    y[self.coeff_index(i, j, k)] = acc.re / self.norm;
                }
            }
        }
        Ok(y)
    }

    fn assemble(&self, y: &[f64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.total, self.total);
        for (i, p) in self.sparse_a.iter().enumerate() {
            for (j, q) in self.sparse_b.iter().enumerate() {
                for (k, r) in self.sparse_a.iter().enumerate() {
                    let coeff = y[self.coeff_index(i, j, k)];
                    if coeff == 0.0 {
                        continue;
                    }
                    for &(ar, ac, pv) in p {
                        for &(br, bc, qv) in q {
                            for &(cr, cc, rv) in r {
                                let row = (ar * self.dim_b + br) * self.dim_a + cr;
                                let col = (ac * self.dim_b + bc) * self.dim_a + cc;
                                out[(row, col)] += pv * qv * rv * coeff;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Orthogonal projection onto the affine constraint set: symmetrize the
    /// two A slots, then pin the coefficients that encode Tr_C(x) = rho.
    pub fn proj_affine(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut y = self.coefficients(x)?;
        for i in 0..self.na {
            for j in 0..self.nb {
                for k in (i + 1)..self.na {
                    let a = self.coeff_index(i, j, k);
                    let b = self.coeff_index(k, j, i);
                    let avg = 0.5 * (y[a] + y[b]);
                    y[a] = avg;
                    y[b] = avg;
                }
            }
        }
        for i in 0..self.na {
            for j in 0..self.nb {
                let val = self.fixed[i * self.nb + j];
                y[self.coeff_index(i, j, 0)] = val;
                y[self.coeff_index(0, j, i)] = val;
            }
        }
        Ok(self.assemble(&y))
    }

    /// Projection onto one PSD cone: the operator itself (0) or its partial
    /// transpose over the first A copy (1) or over B (2).
    pub fn project_cone(&self, which: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        match which {
            0 => Ok(psd_project(x)?.0),
            1 | 2 => {
                let sub = which - 1;
                let transposed = partial_transpose_multi(x, &self.dims, sub)?;
                let clipped = psd_project(&transposed)?.0;
                partial_transpose_multi(&clipped, &self.dims, sub)
            }
            other => Err(Error::InvalidParameter(format!(
                "cone index {other} out of range"
            ))),
        }
    }

    /// Worst constraint violation at `x`: the most negative eigenvalue over
    /// x, x^{T_A}, x^{T_B}, measured before any clipping.
    pub fn residual_at(&self, x: &ComplexMatrix) -> Result<f64> {
        let mut worst = 0.0f64;
        let direct = hermitian_eigen(&x.hermitize())?;
        worst = worst.max(-direct.min());
        for sub in 0..2 {
            let transposed = partial_transpose_multi(x, &self.dims, sub)?;
            let eig = hermitian_eigen(&transposed.hermitize())?;
            worst = worst.max(-eig.min());
        }
        Ok(worst)
    }
}

/// Eigenvalue clip to the PSD cone; also reports the most negative
/// eigenvalue seen (0 if none).
fn psd_project(x: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let eig = hermitian_eigen(&x.hermitize())?;
    let neg = eig.min().min(0.0);
    Ok((eig.apply(|v| v.max(0.0)), neg))
}

/// Stopping rules for the feasibility solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityConfig {
    pub max_iter: usize,
    pub tol: f64,
    /// Residual history length inspected for stall detection.
    pub stall_window: usize,
    /// Relative improvement below which the residual counts as stalled.
    pub stall_rel: f64,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        FeasibilityConfig {
            max_iter: 500,
            tol: 1e-7,
            stall_window: 50,
            stall_rel: 1e-6,
        }
    }
}

/// How a feasibility run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Undecided,
}

impl fmt::Display for FeasibilityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FeasibilityStatus::Feasible => "feasible",
            FeasibilityStatus::Infeasible => "infeasible",
            FeasibilityStatus::Undecided => "undecided",
        };
        write!(f, "{name}")
    }
}

/// Outcome of one feasibility run.
#[derive(Debug, Clone)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub residual: f64,
    pub iterations: usize,
    /// The certified extension when feasible.
    pub extension: Option<ComplexMatrix>,
}

/// Decides whether `rho` admits a swap-symmetric PPT extension on A⊗B⊗A.
///
/// Runs product-space projection splitting: one copy of the iterate per
/// cone, averaged and re-projected onto the affine set each sweep. The
/// residual is checked at the affine-feasible point, so `feasible` comes
/// with an extension violating no constraint by more than the tolerance.
/// A residual that stops improving is reported as `infeasible`; this is a
/// calibrated heuristic, not a dual certificate.
pub fn symmetric_extension_feasibility(
    rho: &DensityMatrix,
    dim_a: usize,
    dim_b: usize,
    config: &FeasibilityConfig,
) -> Result<FeasibilityResult> {
    let problem = ExtensionProblem::new(rho, dim_a, dim_b)?;
    let seed = tensor_product(rho.matrix(), &identity(dim_a).scale_re(1.0 / dim_a as f64));
    let start = problem.proj_affine(&seed)?;
    let mut copies = [start.clone(), start.clone(), start];
    let mut history: Vec<f64> = Vec::with_capacity(config.max_iter);
    for iteration in 1..=config.max_iter {
        let mean = copies[0].add(&copies[1])?.add(&copies[2])?.scale_re(1.0 / 3.0);
        let anchor = problem.proj_affine(&mean)?;
        let residual = problem.residual_at(&anchor)?;
        history.push(residual);
        if residual < config.tol {
            return Ok(FeasibilityResult {
                status: FeasibilityStatus::Feasible,
                residual,
                iterations: iteration,
                extension: Some(anchor),
            });
        }
        if history.len() > config.stall_window {
            let cut = history.len() - config.stall_window;
            let old = history[..cut].iter().copied().fold(f64::INFINITY, f64::min);
            let recent = history.iter().copied().fold(f64::INFINITY, f64::min);
            if old - recent < config.stall_rel * old.max(1e-30) {
                return Ok(FeasibilityResult {
                    status: FeasibilityStatus::Infeasible,
                    residual,
                    iterations: iteration,
                    extension: None,
                });
            }
        }
        for which in 0..3 {
            let reflected = anchor.scale_re(2.0).sub(&copies[which])?;
            let projected = problem.project_cone(which, &reflected)?;
            copies[which] = copies[which].add(&projected)?.sub(&anchor)?;
        }
    }
    Ok(FeasibilityResult {
        status: FeasibilityStatus::Undecided,
        residual: *history.last().expect("max_iter >= 1"),
        iterations: config.max_iter,
        extension: None,
    })
}

/// Verdict of the combined PPT + extension test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpClassification {
    Entangled,
    SeparableConsistent,
    Undecided,
}

impl fmt::Display for SdpClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SdpClassification::Entangled => "entangled",
            SdpClassification::SeparableConsistent => "separable-consistent",
            SdpClassification::Undecided => "undecided",
        };
        write!(f, "{name}")
    }
}

/// PPT first; only PPT states are handed to the extension solver.
pub fn classify_sdp(
    rho: &DensityMatrix,
    dim_a: usize,
    dim_b: usize,
    iter_budget: usize,
) -> Result<SdpClassification> {
    if ppt_min_eigenvalue(rho, dim_a, dim_b)? < -1e-9 {
        return Ok(SdpClassification::Entangled);
    }
    let config = FeasibilityConfig {
        max_iter: iter_budget,
        ..FeasibilityConfig::default()
    };
    let result = symmetric_extension_feasibility(rho, dim_a, dim_b, &config)?;
    Ok(match result.status {
        FeasibilityStatus::Feasible => SdpClassification::SeparableConsistent,
        FeasibilityStatus::Infeasible => SdpClassification::Entangled,
        FeasibilityStatus::Undecided => SdpClassification::Undecided,
    })
}

/// Ginibre-ensemble random state: GG†/Tr(GG†) with G a d×rank matrix of
/// standard complex Gaussians, deterministic per seed.
pub fn random_density_matrix(d: usize, rank: usize, seed: u64) -> DensityMatrix {
    assert!(d >= 1, "dimension must be positive");
    assert!((1..=d).contains(&rank), "rank must lie in 1..=d");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = ComplexMatrix::zeros(d, rank);
    for r in 0..d {
        for c in 0..rank {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            g[(r, c)] = Complex64::new(re, im);
        }
    }
    let gram = g
        .matmul(&g.adjoint())
        .expect("dimensions agree by construction");
    let trace = gram.trace().re;
    let normalized = gram.scale_re(1.0 / trace).hermitize();
    DensityMatrix::new(normalized).expect("Gram matrix is PSD with unit trace")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, pauli_x, pauli_y, pauli_z, Subsystem};
    use crate::states::{make_state, StateParams};
    use approx::assert_relative_eq;

    fn family(p: f64, theta: f64) -> DensityMatrix {
        make_state(StateParams::new(p, theta).unwrap())
    }

    #[test]
    fn qubit_basis_is_the_pauli_basis() {
        let basis = build_hermitian_basis(2);
        assert_eq!(basis.len(), 4);
        assert_relative_eq!(basis.alpha, 2.0);
        let expected = [identity(2), pauli_x(), pauli_y(), pauli_z()];
        for (got, want) in basis.elements.iter().zip(&expected) {
            assert!(got.sub(want).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn qutrit_basis_is_orthogonal_with_alpha_three() {
        let basis = build_hermitian_basis(3);
        assert_eq!(basis.len(), 9);
        for (i, a) in basis.elements.iter().enumerate() {
            assert!(
                (a.trace().re - if i == 0 { 3.0 } else { 0.0 }).abs() < 1e-12,
                "element {i} trace"
            );
            for (j, b) in basis.elements.iter().enumerate() {
                let overlap = a.trace_product(b).unwrap();
                let want = if i == j { 3.0 } else { 0.0 };
                assert!(
                    (overlap.re - want).abs() < 1e-12 && overlap.im.abs() < 1e-12,
                    "Gram entry ({i},{j}) = {overlap}"
                );
            }
        }
    }

    #[test]
    fn bipartite_expansion_round_trips() {
        let rho = random_density_matrix(4, 4, 99);
        let basis_a = build_hermitian_basis(2);
        let mut rebuilt = ComplexMatrix::zeros(4, 4);
        for si in &basis_a.elements {
            for sj in &basis_a.elements {
                let op = tensor_product(si, sj);
                let coeff = rho.matrix().trace_product(&op).unwrap().re
                    / (basis_a.alpha * basis_a.alpha);
                rebuilt = rebuilt.add(&op.scale_re(coeff)).unwrap();
            }
        }
        assert!(rebuilt.sub(rho.matrix()).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn affine_projection_is_idempotent_and_reduces_correctly() {
        let rho = family(0.5, std::f64::consts::FRAC_PI_4);
        let problem = ExtensionProblem::new(&rho, 2, 2).unwrap();
        let arbitrary = random_density_matrix(8, 8, 5);
        let once = problem.proj_affine(arbitrary.matrix()).unwrap();
        let twice = problem.proj_affine(&once).unwrap();
        assert!(twice.sub(&once).unwrap().max_abs() < 1e-10);
        let reduced = partial_trace(&once, 4, 2, Subsystem::A).unwrap();
        assert!(reduced.sub(rho.matrix()).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn affine_projection_enforces_swap_symmetry() {
        let rho = family(0.4, 0.9);
        let problem = ExtensionProblem::new(&rho, 2, 2).unwrap();
        let projected = problem
            .proj_affine(random_density_matrix(8, 8, 7).matrix())
            .unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for ap in 0..2 {
                        for bp in 0..2 {
                            for cp in 0..2 {
                                let row = (a * 2 + b) * 2 + c;
                                let col = (ap * 2 + bp) * 2 + cp;
                                let srow = (c * 2 + b) * 2 + a;
                                let scol = (cp * 2 + bp) * 2 + ap;
                                let diff = projected[(row, col)] - projected[(srow, scol)];
                                assert!(diff.norm() < 1e-10);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_state_is_feasible() {
        let rho = DensityMatrix::maximally_mixed(4);
        let result =
            symmetric_extension_feasibility(&rho, 2, 2, &FeasibilityConfig::default()).unwrap();
        assert_eq!(result.status, FeasibilityStatus::Feasible);
        let extension = result.extension.expect("feasible run returns extension");
        let reduced = partial_trace(&extension, 4, 2, Subsystem::A).unwrap();
        assert!(reduced.sub(rho.matrix()).unwrap().max_abs() < 1e-8);
        let problem = ExtensionProblem::new(&rho, 2, 2).unwrap();
        assert!(problem.residual_at(&extension).unwrap() < 1e-7);
    }

    #[test]
    fn bell_state_is_infeasible_on_a_direct_call() {
        let rho = family(1.0, std::f64::consts::FRAC_PI_4);
        let result =
            symmetric_extension_feasibility(&rho, 2, 2, &FeasibilityConfig::default()).unwrap();
        assert_eq!(result.status, FeasibilityStatus::Infeasible);
        assert!(result.residual > 1e-7);
    }

    #[test]
    fn werner_states_split_at_the_separability_boundary() {
        let sep = family(0.2, std::f64::consts::FRAC_PI_4);
        let result =
            symmetric_extension_feasibility(&sep, 2, 2, &FeasibilityConfig::default()).unwrap();
        assert_eq!(result.status, FeasibilityStatus::Feasible);

        let ent = family(0.8, std::f64::consts::FRAC_PI_4);
        let result =
            symmetric_extension_feasibility(&ent, 2, 2, &FeasibilityConfig::default()).unwrap();
        assert_eq!(result.status, FeasibilityStatus::Infeasible);
    }

    #[test]
    fn product_qubit_qutrit_state_is_feasible() {
        let qubit = DensityMatrix::maximally_mixed(2);
        let mut b = ComplexMatrix::zeros(3, 3);
        b[(0, 0)] = Complex64::new(0.5, 0.0);
        b[(1, 1)] = Complex64::new(0.3, 0.0);
        b[(2, 2)] = Complex64::new(0.2, 0.0);
        let rho =
            DensityMatrix::new(tensor_product(qubit.matrix(), &b)).unwrap();
        let result =
            symmetric_extension_feasibility(&rho, 2, 3, &FeasibilityConfig::default()).unwrap();
        assert_eq!(result.status, FeasibilityStatus::Feasible);
    }

    #[test]
    fn oversized_problems_are_rejected() {
        let rho = DensityMatrix::maximally_mixed(25);
        match symmetric_extension_feasibility(&rho, 5, 5, &FeasibilityConfig::default()) {
            Err(Error::DimensionGuard(_)) => {}
            other => panic!("expected dimension guard, got {other:?}"),
        }
    }

    #[test]
    fn classification_short_circuits_on_npt_states() {
        let bell = family(1.0, std::f64::consts::FRAC_PI_4);
        assert_eq!(
            classify_sdp(&bell, 2, 2, 500).unwrap(),
            SdpClassification::Entangled
        );
        let mixed = DensityMatrix::maximally_mixed(4);
        assert_eq!(
            classify_sdp(&mixed, 2, 2, 500).unwrap(),
            SdpClassification::SeparableConsistent
        );
    }

    #[test]
    fn classification_agrees_with_ppt_on_random_qubit_pairs() {
        let mut agree = 0usize;
        let total = 40usize;
        for seed in 0..total as u64 {
            let rho = random_density_matrix(4, 4, 1000 + seed);
            let npt = ppt_min_eigenvalue(&rho, 2, 2).unwrap() < -1e-9;
            let verdict = classify_sdp(&rho, 2, 2, 500).unwrap();
            if npt {
                assert_ne!(
                    verdict,
                    SdpClassification::SeparableConsistent,
                    "seed {seed} is NPT but came back separable-consistent"
                );
            }
            let expected = if npt {
                SdpClassification::Entangled
            } else {
                SdpClassification::SeparableConsistent
            };
            if verdict == expected {
                agree += 1;
            }
        }
        assert!(agree * 100 >= total * 95, "agreement {agree}/{total}");
    }

    #[test]
    fn ginibre_states_are_valid_and_deterministic() {
        let a = random_density_matrix(3, 2, 42);
        let b = random_density_matrix(3, 2, 42);
        assert!(a.matrix().sub(b.matrix()).unwrap().max_abs() == 0.0);
        assert!((a.matrix().trace().re - 1.0).abs() < 1e-12);
        let pure = random_density_matrix(4, 1, 7);
        assert_relative_eq!(pure.purity(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn ginibre_mean_purity_matches_the_ensemble_value() {
        let draws = 10_000;
        let mut purities = Vec::with_capacity(draws);
        for seed in 0..draws as u64 {
            purities.push(random_density_matrix(2, 2, 20_000 + seed).purity());
        }
        let mean = purities.iter().sum::<f64>() / draws as f64;
        let var = purities
            .iter()
            .map(|p| (p - mean) * (p - mean))
            .sum::<f64>()
            / (draws as f64 - 1.0);
        let sigma_mean = (var / draws as f64).sqrt();
        let expected = (2.0 + 2.0) / (2.0 * 2.0 + 1.0);
        assert!(
            (mean - expected).abs() < 3.0 * sigma_mean,
            "mean purity {mean} vs {expected} (3 sigma = {})",
            3.0 * sigma_mean
        );
    }
}
