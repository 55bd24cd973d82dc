//! Hamiltonian and circuit ensemble constructors, subsystem restriction, and
//! spectral diagnostics.

pub mod charge;
pub mod lattice;
pub mod spectral;
pub mod spin_glass;
pub mod syk;

pub use charge::{
    apply_two_qubit_gate, build_charge_conserving_unitary, total_charge_expectation,
    ChargeCircuit, ChargeCircuitSpec,
};
pub use lattice::{build_lattice_chain, BondTerm, Boundary, LatticeChain, LatticeChainSpec};
pub use spectral::{check_nondegenerate_gaps, GapReport};
pub use spin_glass::{
    build_spin_glass, restrict_to_subsystem, spin_glass_coefficient_count,
    spin_glass_from_coefficients, trace_moment_check, DisorderKind, DisorderSample, MomentReport,
};
pub use syk::{
    build_syk, majorana_operator, restrict_syk_block, syk_coefficient_count,
    syk_from_coefficients, MajoranaBlock,
};
