//! States, density matrices, Pauli-string operators, and the entropy /
//! distance / thermal functionals built on them.

pub mod density;
pub mod entropy;
pub mod mask;
pub mod operator;
pub mod pauli;
pub mod state;

pub use density::DensityMatrix;
pub use entropy::{
    fannes_audenaert_rhs, renyi2_entropy, shannon_entropy, spectrum_entropy, trace_norm_distance,
    von_neumann_entropy,
};
pub use mask::{MaskPlan, SubsystemMask};
pub use operator::{Eigendecomposition, HermitianOperator};
pub use pauli::{pauli_site_product, pauli_string_product, Pauli, PauliString};
pub use state::PureState;
