//! Dense complex linear algebra over qubit registers.

pub mod eigen;
pub mod operator;
pub mod pauli;
pub mod state;

pub use eigen::HermitianEigen;
pub use operator::{kron, qubit_mask, DenseOperator, HERMITIAN_TOL};
pub use pauli::{bloch_operator, rotation_to, Mat2, Pauli};
pub use state::{bipartition_masks, StateVector};
