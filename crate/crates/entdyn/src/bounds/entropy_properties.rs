//! Property suite for the von Neumann entropy itself: randomized instances of
//! the structural inequalities every certificate in this crate leans on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::pair_bound::random_traceless_pair;
use crate::bounds::report::CertificateReport;
use crate::bounds::thermo::{gibbs_energy_entropy, solve_gibbs_beta};
use crate::error::Result;
use crate::qcore::{
    fannes_audenaert_rhs, trace_norm_distance, von_neumann_entropy, DensityMatrix, SubsystemMask,
};
use crate::sampling::{sample_haar_state, sample_random_density};
use crate::derive_seed;

/// Tracks the worst (smallest) margin instance of one inequality.
struct WorstCase {
    lhs: f64,
    rhs: f64,
}

impl WorstCase {
    fn new() -> Self {
        Self {
            lhs: f64::NEG_INFINITY,
            rhs: f64::INFINITY,
        }
    }

    fn update(&mut self, lhs: f64, rhs: f64) {
        if rhs - lhs < self.rhs - self.lhs {
            self.lhs = lhs;
            self.rhs = rhs;
        }
    }
}

/// Checks randomized instances (≤ 4 qubits) of: subadditivity, strong
/// subadditivity, pure-state complement symmetry, the Fannes–Audenaert
/// continuity bound, concavity, and thermal extremality (no state beats the
/// Gibbs state's entropy at its own energy). Returns one worst-case report
/// per property; every inequality is exact, so tolerances are `1e-7` with no
/// statistical component.
pub fn entropy_property_suite(num_instances: usize, seed: u64) -> Result<Vec<CertificateReport>> {
    let mut subadditivity = WorstCase::new();
    let mut strong_subadditivity = WorstCase::new();
    let mut complement_symmetry = WorstCase::new();
    let mut fannes_audenaert = WorstCase::new();
    let mut concavity = WorstCase::new();
    let mut thermal_extremality = WorstCase::new();

    let a_mask = SubsystemMask::new(vec![0])?;
    let b_mask = SubsystemMask::new(vec![1])?;
    let ab_mask = SubsystemMask::new(vec![0, 1])?;
    let bc_mask = SubsystemMask::new(vec![1, 2])?;
    let abc_mask = SubsystemMask::new(vec![0, 1, 2])?;

    for i in 0..num_instances as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i));

        // Subadditivity on a random mixed two-qubit state.
        let rho_ab = sample_random_density(2, 2, derive_seed(seed, 7 * i + 1))?;
        let s_ab = von_neumann_entropy(&rho_ab)?;
        let s_a = von_neumann_entropy(&rho_ab.partial_trace(&a_mask)?)?;
        let s_b = von_neumann_entropy(&rho_ab.partial_trace(&b_mask)?)?;
        subadditivity.update(s_ab, s_a + s_b);

        // Strong subadditivity and complement symmetry on a Haar four-qubit
        // pure state with A = {0}, B = {1}, C = {2}.
        let pure = sample_haar_state(4, derive_seed(seed, 7 * i + 2))?;
        let s_abc = von_neumann_entropy(&pure.partial_trace(&abc_mask)?)?;
        let s_mid = von_neumann_entropy(&pure.partial_trace(&b_mask)?)?;
        let s_ab4 = von_neumann_entropy(&pure.partial_trace(&ab_mask)?)?;
        let s_bc4 = von_neumann_entropy(&pure.partial_trace(&bc_mask)?)?;
        strong_subadditivity.update(s_abc + s_mid, s_ab4 + s_bc4);

        let cut: usize = rng.gen_range(1..4);
        let keep = SubsystemMask::new((0..cut).collect())?;
        let rest = SubsystemMask::new((cut..4).collect())?;
        let s_keep = von_neumann_entropy(&pure.partial_trace(&keep)?)?;
        let s_rest = von_neumann_entropy(&pure.partial_trace(&rest)?)?;
        complement_symmetry.update((s_keep - s_rest).abs(), 0.0);

        // Fannes–Audenaert and concavity on a pair of mixed two-qubit states.
        let sigma_ab = sample_random_density(2, 2, derive_seed(seed, 7 * i + 3))?;
        let s_sigma = von_neumann_entropy(&sigma_ab)?;
        let t = trace_norm_distance(&rho_ab, &sigma_ab)? / 2.0;
        fannes_audenaert.update((s_ab - s_sigma).abs(), fannes_audenaert_rhs(t, 4));

        let lambda: f64 = rng.gen_range(0.05..0.95);
        let mixed = DensityMatrix::new(
            2,
            rho_ab.matrix().mapv(|v| v * lambda) + sigma_ab.matrix().mapv(|v| v * (1.0 - lambda)),
        )?;
        concavity.update(
            lambda * s_ab + (1.0 - lambda) * s_sigma,
            von_neumann_entropy(&mixed)?,
        );

        // Thermal extremality: the Gibbs state at the energy of ρ has the
        // largest entropy among all states with that energy.
        let h = random_traceless_pair(&mut rng)?;
        let spectrum = h.eigendecomposition()?.eigenvalues.to_vec();
        let energy = h.expectation_density(&rho_ab)?;
        let beta = solve_gibbs_beta(&[spectrum.clone()], energy)?;
        let (_, gibbs_entropy) = gibbs_energy_entropy(&spectrum, beta);
        thermal_extremality.update(s_ab, gibbs_entropy);
    }

    let instance = format!("instances={num_instances} qubits<=4");
    let report = |name: &str, w: &WorstCase| {
        CertificateReport::new(name, &instance, w.lhs, w.rhs, 1e-7, 0.0)
    };
    Ok(vec![
        report("entropy-subadditivity", &subadditivity),
        report("entropy-strong-subadditivity", &strong_subadditivity),
        report("entropy-pure-complement", &complement_symmetry),
        report("entropy-fannes-audenaert", &fannes_audenaert),
        report("entropy-concavity", &concavity),
        report("entropy-thermal-extremality", &thermal_extremality),
    ])
}
