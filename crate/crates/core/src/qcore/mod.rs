//! Dense complex linear algebra for small quantum systems.

pub mod density;
pub mod eigen;
pub mod matrix;
pub mod paulis;
pub mod random;
pub mod tensor;

pub use density::{validate_density, DensityOperator, PureState};
pub use eigen::{hermitian_eigensystem, hermitian_eigenvalues, Eigensystem};
pub use matrix::{real, ComplexMatrix, I, ONE, ZERO};
pub use tensor::{
    embed, partial_trace, partial_trace_matrix, partial_transpose, tensor_all, tensor_product,
};
