//! Exact correlation labelers for two-qubit states.
//!
//! Four criteria are implemented: the PPT minimum eigenvalue (entanglement,
//! exact at 2x2 and 2x3), the Horodecki M value and a fixed-settings CHSH
//! value (Bell nonlocality), and the two-setting steering radius obtained by
//! minimizing the worst hidden-state Bloch length over local-hidden-state
//! decompositions of the conditional assemblage.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, identity, partial_trace, partial_transpose, pauli_x, pauli_y, pauli_z,
    tensor_product, ComplexMatrix, DensityMatrix, Subsystem, EIGENVALUE_TOL,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::states::CorrelationLabel;

/// The two projective measurement settings used for steering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementSetting {
    X,
    Z,
}

impl MeasurementSetting {
    pub const ALL: [MeasurementSetting; 2] = [MeasurementSetting::X, MeasurementSetting::Z];

    fn axis(self) -> ComplexMatrix {
        match self {
            MeasurementSetting::X => pauli_x(),
            MeasurementSetting::Z => pauli_z(),
        }
    }

    fn index(self) -> usize {
        match self {
            MeasurementSetting::X => 0,
            MeasurementSetting::Z => 1,
        }
    }
}

/// Trace/Bloch form of a 2x2 Hermitian operator: X = (w I + v . sigma)/2.
#[derive(Debug, Clone, Copy)]
struct BlochPair {
    w: f64,
    v: [f64; 3],
}

impl BlochPair {
    fn from_matrix(m: &ComplexMatrix) -> Self {
        let w = m.trace().re;
        let vx = (m[(0, 1)] + m[(1, 0)]).re;
        let vy = (Complex64::i() * (m[(0, 1)] - m[(1, 0)])).re;
        let vz = (m[(0, 0)] - m[(1, 1)]).re;
        BlochPair { w, v: [vx, vy, vz] }
    }

    fn to_matrix(self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new((self.w + self.v[2]) / 2.0, 0.0);
        m[(1, 1)] = Complex64::new((self.w - self.v[2]) / 2.0, 0.0);
        m[(0, 1)] = Complex64::new(self.v[0] / 2.0, -self.v[1] / 2.0);
        m[(1, 0)] = Complex64::new(self.v[0] / 2.0, self.v[1] / 2.0);
        m
    }

    fn bloch_norm(&self) -> f64 {
        (self.v[0] * self.v[0] + self.v[1] * self.v[1] + self.v[2] * self.v[2]).sqrt()
    }
}

/// The four unnormalized conditional states of the steered party, indexed by
/// (setting, outcome).
#[derive(Debug, Clone)]
pub struct Assemblage {
    members: [[ComplexMatrix; 2]; 2],
}

impl Assemblage {
    /// sigma_{outcome|setting}.
    pub fn member(&self, setting: MeasurementSetting, outcome: u8) -> &ComplexMatrix {
        &self.members[setting.index()][outcome as usize]
    }

    /// sigma_{0|setting} + sigma_{1|setting}; equals the steered party's
    /// reduced state for every setting.
    pub fn marginal(&self, setting: MeasurementSetting) -> ComplexMatrix {
        self.member(setting, 0)
            .add(self.member(setting, 1))
            .expect("members share shape")
    }

    /// Largest entrywise deviation between the two setting marginals.
    pub fn no_signaling_residual(&self) -> f64 {
        self.marginal(MeasurementSetting::X)
            .sub(&self.marginal(MeasurementSetting::Z))
            .expect("members share shape")
            .max_abs()
    }
}

/// Projector (I + (-1)^outcome axis)/2 on one qubit.
fn setting_projector(setting: MeasurementSetting, outcome: u8) -> ComplexMatrix {
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    identity(2)
        .add(&setting.axis().scale_re(sign))
        .expect("2x2 shapes")
        .scale_re(0.5)
}

/// Conditional states of the steered party when `steering_party` measures
/// x and z: sigma_{k|n} = Tr_steering[(Pi_{k|n} (x) I) rho].
pub fn conditional_assemblage(
    rho: &DensityMatrix,
    steering_party: Subsystem,
) -> Result<Assemblage> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "assemblage needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let steered = match steering_party {
        Subsystem::A => Subsystem::B,
        Subsystem::B => Subsystem::A,
    };
    let mut members: Vec<ComplexMatrix> = Vec::with_capacity(4);
    for setting in MeasurementSetting::ALL {
        for outcome in 0..2u8 {
            let proj = setting_projector(setting, outcome);
            let full = match steering_party {
                Subsystem::A => tensor_product(&proj, &identity(2)),
                Subsystem::B => tensor_product(&identity(2), &proj),
            };
            let sigma = partial_trace(&full.matmul(rho.matrix())?, 2, 2, steered)?;
            members.push(sigma.hermitize());
        }
    }
    let members = [
        [members[0].clone(), members[1].clone()],
        [members[2].clone(), members[3].clone()],
    ];
    let asm = Assemblage { members };
    let reduced = rho.reduced(2, 2, steered)?;
    for setting in MeasurementSetting::ALL {
        let gap = asm
            .marginal(setting)
            .sub(reduced.matrix())
            .expect("2x2 shapes")
            .max_abs();
        debug_assert!(gap < 1e-9, "no-signaling violated: {gap}");
    }
    Ok(asm)
}

/// A local-hidden-state decomposition: four unnormalized hidden operators
/// tau_{ij} where i answers the x setting and j answers the z setting.
#[derive(Debug, Clone)]
pub struct LhsDecomposition {
    tau: [ComplexMatrix; 4],
}

impl LhsDecomposition {
    fn from_pairs(pairs: [BlochPair; 4]) -> Self {
        LhsDecomposition {
            tau: [
                pairs[0].to_matrix(),
                pairs[1].to_matrix(),
                pairs[2].to_matrix(),
                pairs[3].to_matrix(),
            ],
        }
    }

    /// tau indexed by (answer to x, answer to z).
    pub fn tau(&self, answer_x: u8, answer_z: u8) -> &ComplexMatrix {
        &self.tau[(answer_x as usize) * 2 + answer_z as usize]
    }

    /// Largest entrywise violation of the four recombination constraints
    /// tying the decomposition to its assemblage.
    pub fn constraint_residual(&self, asm: &Assemblage) -> f64 {
        let sum =
            |a: &ComplexMatrix, b: &ComplexMatrix| a.add(b).expect("2x2 shapes");
        let checks = [
            (sum(self.tau(0, 0), self.tau(0, 1)), MeasurementSetting::X, 0),
            (sum(self.tau(1, 0), self.tau(1, 1)), MeasurementSetting::X, 1),
            (sum(self.tau(0, 0), self.tau(1, 0)), MeasurementSetting::Z, 0),
            (sum(self.tau(0, 1), self.tau(1, 1)), MeasurementSetting::Z, 1),
        ];
        checks
            .iter()
            .map(|(got, setting, outcome)| {
                got.sub(asm.member(*setting, *outcome))
                    .expect("2x2 shapes")
                    .max_abs()
            })
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over the four hidden operators.
    pub fn min_eigenvalue(&self) -> f64 {
        self.tau
            .iter()
            .map(|t| hermitian_eigen(t).expect("tau is Hermitian").min())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Knobs for the steering-radius search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteeringConfig {
    /// Multi-start count; the first start is deterministic, the rest random.
    pub restarts: usize,
    /// Seed for the random restarts.
    pub seed: u64,
    /// Simplex iteration cap per restart.
    pub max_iter: usize,
    /// Convergence tolerance on the objective spread.
    pub f_tol: f64,
    /// Convergence tolerance on the simplex diameter.
    pub x_tol: f64,
    /// Hidden operators with trace at or below this are treated as dropped.
    pub trace_floor: f64,
    /// Weight of the exact penalty on invalid decompositions.
    pub penalty_weight: f64,
}

impl Default for SteeringConfig {
    fn default() -> Self {
        SteeringConfig {
            restarts: 16,
            seed: 0x5eed,
            max_iter: 4000,
            f_tol: 1e-6,
            x_tol: 1e-6,
            trace_floor: 1e-12,
            penalty_weight: 1e3,
        }
    }
}

/// One direction's search outcome.
#[derive(Debug, Clone)]
pub struct SteeringOutcome {
    /// Minimized maximum Bloch length; > 1 means steerable with settings x, z.
    pub radius: f64,
    /// Convergence measure: final simplex spread plus any residual penalty.
    pub optimizer_residual: f64,
    /// The minimizing decomposition.
    pub decomposition: LhsDecomposition,
}

/// Both directions plus the worse of the two convergence residuals.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SteeringResult {
    pub radius_a_to_b: f64,
    pub radius_b_to_a: f64,
    pub optimizer_residual: f64,
}

/// Objective pieces at one parameter point: (max Bloch length, penalty).
fn lhs_objective(x: &[f64], members: &[BlochPair; 4], cfg: &SteeringConfig) -> (f64, f64) {
    let (s0x, _s1x, s0z, _s1z) = (members[0], members[1], members[2], members[3]);
    let q = x[0];
    let v = [x[1], x[2], x[3]];
    let t00 = BlochPair { w: q, v };
    let t01 = BlochPair {
        w: s0x.w - q,
        v: [s0x.v[0] - v[0], s0x.v[1] - v[1], s0x.v[2] - v[2]],
    };
    let t10 = BlochPair {
        w: s0z.w - q,
        v: [s0z.v[0] - v[0], s0z.v[1] - v[1], s0z.v[2] - v[2]],
    };
    let t11 = BlochPair {
        w: members[1].w - s0z.w + q,
        v: [
            members[1].v[0] - s0z.v[0] + v[0],
            members[1].v[1] - s0z.v[1] + v[1],
            members[1].v[2] - s0z.v[2] + v[2],
        ],
    };
    let mut worst = 0.0f64;
    let mut penalty = 0.0f64;
    for t in [t00, t01, t10, t11] {
        let len = t.bloch_norm();
        if t.w <= cfg.trace_floor {
            penalty += cfg.penalty_weight * (-t.w).max(0.0);
            if len > 1e-9 {
                penalty += cfg.penalty_weight * len;
            }
        } else {
            worst = worst.max(len / t.w);
        }
    }
    (worst, penalty)
}

fn decomposition_at(x: &[f64], members: &[BlochPair; 4]) -> LhsDecomposition {
    let q = x[0];
    let v = [x[1], x[2], x[3]];
    let t00 = BlochPair { w: q, v };
    let t01 = BlochPair {
        w: members[0].w - q,
        v: [
            members[0].v[0] - v[0],
            members[0].v[1] - v[1],
            members[0].v[2] - v[2],
        ],
    };
    let t10 = BlochPair {
        w: members[2].w - q,
        v: [
            members[2].v[0] - v[0],
            members[2].v[1] - v[1],
            members[2].v[2] - v[2],
        ],
    };
    let t11 = BlochPair {
        w: members[1].w - members[2].w + q,
        v: [
            members[1].v[0] - members[2].v[0] + v[0],
            members[1].v[1] - members[2].v[1] + v[1],
            members[1].v[2] - members[2].v[2] + v[2],
        ],
    };
    LhsDecomposition::from_pairs([t00, t01, t10, t11])
}

/// Two-setting steering radius of `rho` when `steering_party` measures.
///
/// The hidden-state model is reduced to the four deterministic response
/// strategies, leaving one free Hermitian operator tau_00; the remaining
/// three members are fixed linearly by the assemblage. Nelder-Mead with
/// deterministic multi-start minimizes the worst normalized Bloch length.
pub fn steering_radius(
    rho: &DensityMatrix,
    steering_party: Subsystem,
    cfg: &SteeringConfig,
) -> Result<SteeringOutcome> {
    let asm = conditional_assemblage(rho, steering_party)?;
    let members = [
        BlochPair::from_matrix(asm.member(MeasurementSetting::X, 0)),
        BlochPair::from_matrix(asm.member(MeasurementSetting::X, 1)),
        BlochPair::from_matrix(asm.member(MeasurementSetting::Z, 0)),
        BlochPair::from_matrix(asm.member(MeasurementSetting::Z, 1)),
    ];

    let opts = NelderMeadOptions {
        max_iter: cfg.max_iter,
        f_tol: cfg.f_tol,
        x_tol: cfg.x_tol,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cap = members[0].w.min(members[2].w).max(1e-6);

    // Smart start: product of the outcome-0 weights, averaged Bloch vectors.
    let mut starts: Vec<[f64; 4]> = vec![[
        members[0].w * members[2].w,
        (members[0].v[0] + members[2].v[0]) / 2.0,
        (members[0].v[1] + members[2].v[1]) / 2.0,
        (members[0].v[2] + members[2].v[2]) / 2.0,
    ]];
    for _ in 1..cfg.restarts.max(1) {
        starts.push([
            rng.gen_range(0.0..cap),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        ]);
    }

    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for start in &starts {
        let mut f = |x: &[f64]| {
            let (worst, penalty) = lhs_objective(x, &members, cfg);
            worst + penalty
        };
        let step = [0.05; 4];
        let run = nelder_mead(&mut f, start, &step, &opts);
        if best.as_ref().map_or(true, |(f0, _, _)| run.f < *f0) {
            best = Some((run.f, run.x, run.spread));
        }
    }
    let (_, x, spread) = best.expect("at least one restart");
    let (radius, penalty) = lhs_objective(&x, &members, cfg);
    Ok(SteeringOutcome {
        radius,
        optimizer_residual: spread + penalty,
        decomposition: decomposition_at(&x, &members),
    })
}

/// Steering radii in both directions.
pub fn steering_result(rho: &DensityMatrix, cfg: &SteeringConfig) -> Result<SteeringResult> {
    let a_to_b = steering_radius(rho, Subsystem::A, cfg)?;
    let b_to_a = steering_radius(rho, Subsystem::B, cfg)?;
    Ok(SteeringResult {
        radius_a_to_b: a_to_b.radius,
        radius_b_to_a: b_to_a.radius,
        optimizer_residual: a_to_b.optimizer_residual.max(b_to_a.optimizer_residual),
    })
}

/// Minimum eigenvalue of the partial transpose over A; negative below
/// -1e-9 certifies entanglement for 2x2 and 2x3 systems.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<f64> {
    if dim_a * dim_b != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} does not factor dimension {}",
            dim_a,
            dim_b,
            rho.dim()
        )));
    }
    let pt = partial_transpose(rho.matrix(), dim_a, dim_b, Subsystem::A)?;
    Ok(hermitian_eigen(&pt)?.min())
}

/// Correlation matrix T_ij = Tr[rho sigma_i (x) sigma_j].
fn correlation_matrix(rho: &DensityMatrix) -> Result<[[f64; 3]; 3]> {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut t = [[0.0; 3]; 3];
    for (i, si) in paulis.iter().enumerate() {
        for (j, sj) in paulis.iter().enumerate() {
            t[i][j] = rho.expectation(&tensor_product(si, sj))?;
        }
    }
    Ok(t)
}

/// Horodecki M: the sum of the two largest eigenvalues of T^T T.
/// The maximal CHSH value of the state is 2 sqrt(M); M > 1 means nonlocal.
pub fn horodecki_m(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "Horodecki M needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let t = correlation_matrix(rho)?;
    let mut gram = ComplexMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += t[k][i] * t[k][j];
            }
            gram[(i, j)] = Complex64::new(acc, 0.0);
        }
    }
    let eigs = hermitian_eigen(&gram)?;
    Ok(eigs.values[1] + eigs.values[2])
}

/// CHSH value at the fixed settings a0 = sigma_z, a0' = sigma_x,
/// b0 = (sigma_z - sigma_x)/sqrt(2), b0' = (sigma_z + sigma_x)/sqrt(2):
/// S = <a0 b0> + <a0 b0'> + <a0' b0'> - <a0' b0>.
pub fn chsh_fixed_settings(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "CHSH needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let b0 = pauli_z().sub(&pauli_x()).expect("2x2").scale_re(inv_sqrt2);
    let b0p = pauli_z().add(&pauli_x()).expect("2x2").scale_re(inv_sqrt2);
    let term = |a: &ComplexMatrix, b: &ComplexMatrix| rho.expectation(&tensor_product(a, b));
    Ok(term(&pauli_z(), &b0)? + term(&pauli_z(), &b0p)? + term(&pauli_x(), &b0p)?
        - term(&pauli_x(), &b0)?)
}

/// Everything the labeler computed on the way to its verdict.
#[derive(Debug, Clone)]
pub struct LabelReport {
    pub label: CorrelationLabel,
    pub ppt_min_eig: f64,
    pub horodecki_m: f64,
    pub steering: SteeringResult,
    /// The steering party when exactly one direction exceeds radius 1.
    pub steer_direction: Option<Subsystem>,
    /// Both radii exceed 1 yet M <= 1; such states are labeled Entangled.
    pub two_way_not_nonlocal: bool,
}

/// Four-class label from the exact criteria, by precedence: nonlocal
/// (M > 1), then one-way steerable (exactly one radius > 1), then entangled
/// (negative partial transpose, or steerable both ways without nonlocality),
/// then separable.
pub fn label_state_detailed(rho: &DensityMatrix, cfg: &SteeringConfig) -> Result<LabelReport> {
    let ppt_min_eig = ppt_min_eigenvalue(rho, 2, 2)?;
    let m = horodecki_m(rho)?;
    let steering = steering_result(rho, cfg)?;
    let a_steers = steering.radius_a_to_b > 1.0;
    let b_steers = steering.radius_b_to_a > 1.0;

    let mut steer_direction = None;
    let mut two_way_not_nonlocal = false;
    let label = if m > 1.0 {
        CorrelationLabel::BellNonlocal
    } else if a_steers != b_steers {
        steer_direction = Some(if a_steers { Subsystem::A } else { Subsystem::B });
        CorrelationLabel::OneWaySteerable
    } else if a_steers && b_steers {
        two_way_not_nonlocal = true;
        CorrelationLabel::Entangled
    } else if ppt_min_eig < -EIGENVALUE_TOL {
        CorrelationLabel::Entangled
    } else {
        CorrelationLabel::Separable
    };
    Ok(LabelReport {
        label,
        ppt_min_eig,
        horodecki_m: m,
        steering,
        steer_direction,
        two_way_not_nonlocal,
    })
}

/// Four-class label with default steering-search settings.
pub fn label_state(rho: &DensityMatrix) -> Result<CorrelationLabel> {
    Ok(label_state_detailed(rho, &SteeringConfig::default())?.label)
}
