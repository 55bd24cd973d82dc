//! Certificate evaluators: each computes the left- and right-hand side of a
//! concrete finite-size inequality and reports the margin, tolerance, and
//! statistical error.

pub mod charge_cert;
pub mod entropy_properties;
pub mod equilibration;
pub mod fitting;
pub mod lattice_cert;
pub mod page;
pub mod pair_bound;
pub mod report;
pub mod sg_cert;
pub mod subsystem;
pub mod syk_cert;
pub mod thermo;

pub use charge_cert::{charge_circuit_certificate, ChargeCertificate, ChargeCheckpoint};
pub use entropy_properties::entropy_property_suite;
pub use equilibration::{
    gap_certified_chain, ti_equilibration_certificate, EquilibrationCertificate,
    EquilibrationStateRow,
};
pub use fitting::{fit_line, LineFit};
pub use lattice_cert::{
    lattice_chain_certificate, state_average_certificate, ChainCheckpoint, LatticeCertificate,
    StateAverageCertificate, StateAverageCheckpoint,
};
pub use page::{page_mean_entropy, page_monte_carlo, PageCheck};
pub use pair_bound::{pair_entropy_energy_bound, random_pair_sweep, schur_extremal_sweep};
pub use report::CertificateReport;
pub use sg_cert::{spin_glass_certificate, SpinGlassCertificate, SpinGlassSampleRow};
pub use subsystem::{subsystem_average_entropy, subsystem_masks, AveragingScheme};
pub use syk_cert::{syk_certificate, SykCertificate, SykSampleRow};
pub use thermo::{series_energy_bound, solve_gibbs_beta, thermo_curves, ThermoCurves, ThermoPoint};
