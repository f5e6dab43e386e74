//! The two-parameter state family and its exact correlation classes.
//!
//! rho(p, theta) = p |psi_theta><psi_theta| + (1 - p) I_A/2 (x) rho_B^theta
//! with |psi_theta> = cos(theta)|00> + sin(theta)|11> and
//! rho_B^theta = diag(cos^2 theta, sin^2 theta). The class boundaries in p
//! are exact: separable up to 1/3, steerable (A to B, two settings) above
//! 1/sqrt(2), Bell nonlocal above 1/sqrt(1 + sin^2 2theta).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{identity, tensor_product, ComplexMatrix, DensityMatrix};
use crate::optimize::{nelder_mead, NelderMeadOptions};

/// Parameters (p, theta) of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    pub p: f64,
    pub theta: f64,
}

impl StateParams {
    pub fn new(p: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mixing weight p = {p} outside [0, 1]"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta = {theta}")));
        }
        Ok(StateParams { p, theta })
    }
}

/// The four correlation classes, ordered by strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorrelationLabel {
    #[serde(rename = "I")]
    Separable,
    #[serde(rename = "II")]
    Entangled,
    #[serde(rename = "III")]
    OneWaySteerable,
    #[serde(rename = "IV")]
    BellNonlocal,
}

impl CorrelationLabel {
    pub const ALL: [CorrelationLabel; 4] = [
        CorrelationLabel::Separable,
        CorrelationLabel::Entangled,
        CorrelationLabel::OneWaySteerable,
        CorrelationLabel::BellNonlocal,
    ];

    pub fn class_index(self) -> usize {
        match self {
            CorrelationLabel::Separable => 0,
            CorrelationLabel::Entangled => 1,
            CorrelationLabel::OneWaySteerable => 2,
            CorrelationLabel::BellNonlocal => 3,
        }
    }

    pub fn from_class_index(idx: usize) -> Option<Self> {
        Self::ALL.get(idx).copied()
    }
}

impl std::fmt::Display for CorrelationLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CorrelationLabel::Separable => "I",
            CorrelationLabel::Entangled => "II",
            CorrelationLabel::OneWaySteerable => "III",
            CorrelationLabel::BellNonlocal => "IV",
        };
        write!(f, "{s}")
    }
}

/// Half-width of the default exclusion window around the degenerate angles
/// {0, pi/2, pi, 3pi/2} where sin(2 theta) vanishes.
pub const DEFAULT_EXCLUSION_HALF_WIDTH: f64 = 0.1;

/// cos(theta)|00> + sin(theta)|11>.
pub fn family_ket(theta: f64) -> [Complex64; 4] {
    [
        Complex64::new(theta.cos(), 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(theta.sin(), 0.0),
    ]
}

/// Builds rho(p, theta).
pub fn make_state(params: StateParams) -> DensityMatrix {
    let StateParams { p, theta } = params;
    let ket = family_ket(theta);
    let pure = ComplexMatrix::projector(&ket).expect("family ket is normalized");
    let c2 = theta.cos().powi(2);
    let s2 = theta.sin().powi(2);
    let mut rho_b = ComplexMatrix::zeros(2, 2);
    rho_b[(0, 0)] = Complex64::new(c2, 0.0);
    rho_b[(1, 1)] = Complex64::new(s2, 0.0);
    let noise = tensor_product(&identity(2).scale_re(0.5), &rho_b);
    let m = pure
        .scale_re(p)
        .add(&noise.scale_re(1.0 - p))
        .expect("shapes match");
    DensityMatrix::new(m).expect("family members are valid states")
}

/// Separability boundary in p (inclusive below).
pub fn separable_boundary() -> f64 {
    1.0 / 3.0
}

/// Two-setting steering boundary in p for the A-to-B direction.
pub fn steering_boundary() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

/// CHSH/Horodecki boundary 1/sqrt(1 + sin^2 2theta).
pub fn nonlocal_boundary(theta: f64) -> f64 {
    1.0 / (1.0 + (2.0 * theta).sin().powi(2)).sqrt()
}

/// True when theta falls inside an exclusion window around a multiple of
/// pi/2, where sin(2 theta) = 0 and the class-III window collapses.
pub fn is_theta_excluded(theta: f64, half_width: f64) -> bool {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let r = theta.rem_euclid(half_pi);
    r < half_width || half_pi - r < half_width
}

/// Exact class of rho(p, theta) using the default exclusion window.
pub fn theoretical_label(params: StateParams) -> Result<CorrelationLabel> {
    theoretical_label_with_window(params, DEFAULT_EXCLUSION_HALF_WIDTH)
}

/// Exact class of rho(p, theta). Boundary points go to the weaker class.
pub fn theoretical_label_with_window(
    params: StateParams,
    exclusion_half_width: f64,
) -> Result<CorrelationLabel> {
    if is_theta_excluded(params.theta, exclusion_half_width) {
        return Err(Error::DegenerateTheta {
            theta: params.theta,
        });
    }
    let p = params.p;
    Ok(if p <= separable_boundary() {
        CorrelationLabel::Separable
    } else if p > nonlocal_boundary(params.theta) {
        CorrelationLabel::BellNonlocal
    } else if p > steering_boundary() {
        CorrelationLabel::OneWaySteerable
    } else {
        CorrelationLabel::Entangled
    })
}

/// Result of fitting (p, theta) to an arbitrary two-qubit state.
#[derive(Debug, Clone, Copy)]
pub struct FitOutcome {
    pub params: StateParams,
    /// Frobenius distance between the input and the fitted family member.
    pub residual: f64,
    /// Set when p is so small that theta has no effect on the state.
    pub theta_ill_determined: bool,
    /// Set when the residual exceeds the family-membership threshold.
    pub outside_family: bool,
}

/// Residual above which a state is flagged as outside the family.
pub const FAMILY_RESIDUAL_THRESHOLD: f64 = 0.2;

const FIT_GRID: usize = 400;
const THETA_ILL_DETERMINED_BELOW: f64 = 0.02;

/// Distance to the family evaluated from the six nonzero entries of
/// rho(p, theta); `floor_sq` carries the target's weight on the entries the
/// family never populates.
fn family_distance(p: f64, theta: f64, target: &ComplexMatrix, floor_sq: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    let q = (1.0 - p) / 2.0;
    let coh = p * theta.sin() * theta.cos();
    let diag = [(p + q) * c2, q * s2, q * c2, (p + q) * s2];
    let mut d2 = floor_sq;
    for (i, v) in diag.iter().enumerate() {
        d2 += (target[(i, i)] - Complex64::new(*v, 0.0)).norm_sqr();
    }
    d2 += (target[(0, 3)] - Complex64::new(coh, 0.0)).norm_sqr();
    d2 += (target[(3, 0)] - Complex64::new(coh, 0.0)).norm_sqr();
    d2.sqrt()
}

fn family_floor_sq(target: &ComplexMatrix) -> f64 {
    let mut floor = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            if r != c && !(r == 0 && c == 3) && !(r == 3 && c == 0) {
                floor += target[(r, c)].norm_sqr();
            }
        }
    }
    floor
}

/// Least-squares fit of (p, theta) over the family, searching theta in
/// (0, pi/2) against a sign-adjusted target and mapping back through the
/// symmetry theta -> pi - theta when the |00><11| coherence is negative.
pub fn fit_parameters(rho: &DensityMatrix) -> Result<FitOutcome> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "family fit needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    // Family members have Re <00|rho|11> = p sin(theta) cos(theta); a
    // negative value corresponds to theta in (pi/2, pi), reachable from the
    // search range by conjugating with sigma_z (x) I.
    let coherence = rho.matrix()[(0, 3)].re;
    let mut target = rho.matrix().clone();
    if coherence < 0.0 {
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            target[(i, j)] = -target[(i, j)];
            target[(j, i)] = -target[(j, i)];
        }
    }

    let floor_sq = family_floor_sq(&target);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut best = (f64::INFINITY, 0.0, half_pi / 2.0);
    for i in 0..FIT_GRID {
        let p = i as f64 / (FIT_GRID - 1) as f64;
        for j in 0..FIT_GRID {
            let theta = (j as f64 + 0.5) * half_pi / FIT_GRID as f64;
            let d = family_distance(p, theta, &target, floor_sq);
            if d < best.0 {
                best = (d, p, theta);
            }
        }
    }

    let mut obj = |x: &[f64]| family_distance(x[0], x[1], &target, floor_sq);
    let refined = nelder_mead(
        &mut obj,
        &[best.1, best.2],
        &[half_pi / FIT_GRID as f64, half_pi / FIT_GRID as f64],
        &NelderMeadOptions {
            max_iter: 600,
            f_tol: 1e-12,
            x_tol: 1e-10,
        },
    );
    let (residual, p_fit, theta_fit) = if refined.f < best.0 {
        (refined.f, refined.x[0].clamp(0.0, 1.0), refined.x[1])
    } else {
        (best.0, best.1, best.2)
    };
    let theta = if coherence < 0.0 {
        std::f64::consts::PI - theta_fit
    } else {
        theta_fit
    };
    Ok(FitOutcome {
        params: StateParams::new(p_fit, theta)?,
        residual,
        theta_ill_determined: p_fit < THETA_ILL_DETERMINED_BELOW,
        outside_family: residual > FAMILY_RESIDUAL_THRESHOLD,
    })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::linalg::{hermitian_eigen, Subsystem};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn family_states_are_valid(p in 0.0_f64..=1.0, theta in 0.0_f64..std::f64::consts::PI) {
            let rho = make_state(StateParams::new(p, theta).unwrap());
            let m = rho.matrix();
            prop_assert!(m.hermiticity_residual() < 1e-12);
            prop_assert!((m.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(m.trace().im.abs() < 1e-12);
            prop_assert!(hermitian_eigen(m).unwrap().min() > -1e-12);
        }

        #[test]
        fn steered_marginal_is_theta_diagonal(p in 0.0_f64..=1.0, theta in 0.0_f64..std::f64::consts::PI) {
            let rho = make_state(StateParams::new(p, theta).unwrap());
            let rb = rho.reduced(2, 2, Subsystem::B).unwrap();
            let m = rb.matrix();
            prop_assert!((m[(0, 0)].re - theta.cos().powi(2)).abs() < 1e-12);
            prop_assert!((m[(1, 1)].re - theta.sin().powi(2)).abs() < 1e-12);
            prop_assert!(m[(0, 1)].norm() < 1e-12);
        }
    }
}
