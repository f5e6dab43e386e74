//! Density matrices, Bloch vectors, and the fidelity / projection helpers
//! built on top of the raw matrix type.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::eigen::hermitian_eigen;
use crate::linalg::matrix::{
    partial_trace, pauli_x, pauli_y, pauli_z, ComplexMatrix, Subsystem,
};

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

/// Absolute tolerances used when validating a candidate density matrix.
pub const HERMITICITY_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
pub const EIGENVALUE_TOL: f64 = 1e-9;

impl DensityMatrix {
    /// Validates and wraps a candidate matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected a nonempty square matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_residual();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermiticity residual {herm:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {tr} differs from 1"
            )));
        }
        let eig = hermitian_eigen(&matrix)?;
        if eig.min() < -EIGENVALUE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "minimum eigenvalue {:.3e} below -{EIGENVALUE_TOL:.0e}",
                eig.min()
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    /// |ket><ket| normalized to unit trace.
    pub fn from_pure(ket: &[Complex64]) -> Result<Self> {
        Ok(DensityMatrix {
            matrix: ComplexMatrix::projector(ket)?,
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Tr(rho O) for a Hermitian observable O.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        Ok(self.matrix.trace_product(op)?.re)
    }

    pub fn purity(&self) -> f64 {
        self.matrix
            .trace_product(&self.matrix)
            .expect("square by construction")
            .re
    }

    /// Reduced state on the kept subsystem of an A(x)B split.
    pub fn reduced(&self, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, dim_a, dim_b, keep)?;
        DensityMatrix::new(m)
    }
}

/// Bloch vector of a qubit state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Bloch vector (Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z) of a
/// single-qubit density matrix.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Bloch vector needs a qubit, got dimension {}",
            rho.dim()
        )));
    }
    Ok(BlochVector {
        x: rho.expectation(&pauli_x())?,
        y: rho.expectation(&pauli_y())?,
        z: rho.expectation(&pauli_z())?,
    })
}

/// Projects a Hermitian matrix to the closest-in-spirit density matrix:
/// negative eigenvalues are clipped to zero, the clipped deficit is
/// redistributed proportionally over the remaining positive eigenvalues,
/// and the result is normalized to unit trace.
pub fn nearest_density_matrix(h: &ComplexMatrix) -> Result<DensityMatrix> {
    let residual = h.hermiticity_residual();
    if residual > HERMITICITY_TOL * (1.0 + h.max_abs()) {
        return Err(Error::NotHermitian { residual });
    }
    let eig = hermitian_eigen(&h.hermitize())?;
    let positive_sum: f64 = eig.values.iter().filter(|&&v| v > 0.0).sum();
    let deficit: f64 = eig.values.iter().filter(|&&v| v < 0.0).sum();
    if positive_sum <= 0.0 || positive_sum + deficit <= 1e-12 {
        return Err(Error::ZeroSpectralWeight);
    }
    // proportional redistribution followed by trace normalization reduces
    // to dividing each clipped eigenvalue by the positive mass
    let m = eig.apply(|v| if v > 0.0 { v / positive_sum } else { 0.0 });
    DensityMatrix::new(m.hermitize())
}

/// Uhlmann fidelity F(a, b) = (Tr sqrt(sqrt(a) b sqrt(a)))^2.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity of dimension {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let ea = hermitian_eigen(a.matrix())?;
    let sqrt_a = ea.apply(|v| v.max(0.0).sqrt());
    let inner = sqrt_a.matmul(b.matrix())?.matmul(&sqrt_a)?;
    let ei = hermitian_eigen(&inner.hermitize())?;
    let tr: f64 = ei.values.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok(tr * tr)
}
