//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is sized for operators on a handful of qubits/qutrits
//! (dimension <= 27), so the implementations favor clarity and exactness
//! over asymptotic speed: row-major dense storage, cyclic Jacobi
//! eigendecomposition, Gaussian elimination with partial pivoting.

mod density;
mod eigen;
mod matrix;

pub use density::{
    bloch_vector, fidelity, nearest_density_matrix, BlochVector, DensityMatrix,
    EIGENVALUE_TOL, HERMITICITY_TOL, TRACE_TOL,
};
pub use eigen::{hermitian_eigen, EigenDecomposition};
pub use matrix::{
    identity, partial_trace, partial_transpose, partial_transpose_multi, pauli_x, pauli_y,
    pauli_z, solve_real_linear, tensor_product, ComplexMatrix, Subsystem,
};
