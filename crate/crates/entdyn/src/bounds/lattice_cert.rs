//! The contiguous-window entropy certificate for nearest-neighbor chains:
//! every step of the finite-size inequality chain
//!
//! `E_{|A|=n} S ≤ (n/2)·E_{|A|=2} S ≤ n ln 2 − (n/4N)Σεⱼ² ≤ n ln 2 − (n/4N²)(Σεⱼ)²`
//!
//! is evaluated at every grid time, where `εⱼ(t) = |tr(ρ(t)Hⱼ)|/‖Hⱼ‖` is the
//! normalized bond energy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::report::CertificateReport;
use crate::bounds::subsystem::{subsystem_masks, AveragingScheme};
use crate::derive_seed;
use crate::dynamics::{EvolutionContext, TimeGrid};
use crate::error::{Error, Result};
use crate::models::{Boundary, LatticeChain};
use crate::qcore::{von_neumann_entropy, HermitianOperator, MaskPlan, PureState, SubsystemMask};
use crate::sampling::{mean_and_se, sample_haar_product_state};

const LN2: f64 = std::f64::consts::LN_2;

/// Everything the chain inequality needs at one evolved time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainCheckpoint {
    pub time: f64,
    /// Mean entropy over the `N` contiguous windows of size `n`.
    pub mean_entropy_n: f64,
    /// Largest single-window entropy at this time.
    pub max_entropy_n: f64,
    /// Mean entropy over the `N` nearest-neighbor pairs.
    pub mean_entropy_2: f64,
    /// `Σⱼ εⱼ` with `εⱼ = |tr(ρ Hⱼ)|/‖Hⱼ‖`.
    pub epsilon_sum: f64,
    pub epsilon_sq_sum: f64,
    /// `Σⱼ tr(ρ Hⱼ)`, i.e. the total energy reassembled from the bonds.
    pub energy: f64,
    /// `n ln 2 − (n/4N)·Σεⱼ²`.
    pub rhs_explicit: f64,
    /// `n ln 2 − (n/4N²)·(Σεⱼ)²`, the headline bound.
    pub rhs_pairwise: f64,
}

/// Per-time checkpoints plus one worst-case report per inequality step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeCertificate {
    pub num_qubits: usize,
    pub subsystem_size: usize,
    pub max_bond_norm: f64,
    pub checkpoints: Vec<ChainCheckpoint>,
    pub reports: Vec<CertificateReport>,
}

struct BondProbe {
    plan: MaskPlan,
    /// Bond operator re-expressed in the sorted register order of the mask.
    aligned: HermitianOperator,
    norm: f64,
}

fn bond_probes(chain: &LatticeChain) -> Result<Vec<BondProbe>> {
    let num_qubits = chain.num_qubits();
    chain
        .bonds
        .iter()
        .map(|b| -> Result<BondProbe> {
            let mut sites = vec![b.left_site, b.right_site];
            sites.sort_unstable();
            let mask = SubsystemMask::new(sites)?;
            let plan = MaskPlan::new(&mask, num_qubits)?;
            let pos_left = mask.position_of(b.left_site).expect("site in own mask");
            let pos_right = mask.position_of(b.right_site).expect("site in own mask");
            Ok(BondProbe {
                plan,
                aligned: b.local.embedded(&[pos_left, pos_right], 2)?,
                norm: b.local.operator_norm()?,
            })
        })
        .collect()
}

/// Evaluates the full inequality chain for a periodic chain along a time
/// grid. Each report aggregates the worst margin over all grid times.
///
/// Emitted reports: the window-to-pair reduction, the per-pair entropy-energy
/// bound, the quadratic-mean step between the two right-hand sides, the
/// headline bound on the window average, the energy-sum linkage
/// `Σεⱼ ≥ |tr(ρH)|/maxⱼ‖Hⱼ‖`, and the `n ln 2` ceiling on every window.
pub fn lattice_chain_certificate(
    chain: &LatticeChain,
    psi: &PureState,
    grid: &TimeGrid,
    n: usize,
) -> Result<LatticeCertificate> {
    let num_qubits = chain.num_qubits();
    if chain.spec.boundary != Boundary::Periodic {
        return Err(Error::InvalidArgument(
            "chain certificate expects periodic boundary (window and bond counts must match)"
                .into(),
        ));
    }
    if n <= 1 {
        return Err(Error::InvalidArgument(
            "the window-to-pair reduction needs subsystem size n > 1".into(),
        ));
    }
    if 2 * n > num_qubits {
        return Err(Error::InvalidArgument(format!(
            "subsystem size {n} exceeds half of {num_qubits} qubits"
        )));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }

    let ctx = EvolutionContext::new(&chain.hamiltonian, psi)?;
    let bonds = bond_probes(chain)?;
    let window_plans: Vec<MaskPlan> = subsystem_masks(AveragingScheme::Contiguous, n, num_qubits)?
        .iter()
        .map(|m| MaskPlan::new(m, num_qubits))
        .collect::<Result<Vec<_>>>()?;
    let max_norm = chain.max_bond_norm()?;

    let columns = ctx.evolve_batch(&grid.times);
    let checkpoints: Vec<ChainCheckpoint> = grid
        .times
        .par_iter()
        .enumerate()
        .map(|(k, &time)| -> Result<ChainCheckpoint> {
            let state = PureState::new(columns.column(k).to_owned())?;

            let mut mean_entropy_n = 0.0;
            let mut max_entropy_n = f64::NEG_INFINITY;
            for plan in &window_plans {
                let s = von_neumann_entropy(&state.partial_trace_with_plan(plan)?)?;
                mean_entropy_n += s;
                max_entropy_n = max_entropy_n.max(s);
            }
            mean_entropy_n /= window_plans.len() as f64;

            let mut mean_entropy_2 = 0.0;
            let mut epsilon_sum = 0.0;
            let mut epsilon_sq_sum = 0.0;
            let mut energy = 0.0;
            for bond in &bonds {
                let rho = state.partial_trace_with_plan(&bond.plan)?;
                mean_entropy_2 += von_neumann_entropy(&rho)?;
                let e = bond.aligned.expectation_density(&rho)?;
                energy += e;
                let eps = e.abs() / bond.norm;
                epsilon_sum += eps;
                epsilon_sq_sum += eps * eps;
            }
            mean_entropy_2 /= bonds.len() as f64;

            let nf = n as f64;
            let big_n = num_qubits as f64;
            Ok(ChainCheckpoint {
                time,
                mean_entropy_n,
                max_entropy_n,
                mean_entropy_2,
                epsilon_sum,
                epsilon_sq_sum,
                energy,
                rhs_explicit: nf * LN2 - nf / (4.0 * big_n) * epsilon_sq_sum,
                rhs_pairwise: nf * LN2 - nf / (4.0 * big_n * big_n) * epsilon_sum * epsilon_sum,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let instance = format!("N={num_qubits} n={n} times={}", grid.len());
    let worst = |f: &dyn Fn(&ChainCheckpoint) -> (f64, f64)| -> (f64, f64) {
        checkpoints
            .iter()
            .map(f)
            .reduce(|acc, x| if x.1 - x.0 < acc.1 - acc.0 { x } else { acc })
            .expect("grid is non-empty")
    };
    let nf = n as f64;

    let (lhs, rhs) = worst(&|c| (c.mean_entropy_n, nf / 2.0 * c.mean_entropy_2));
    let window_chain = CertificateReport::new("lattice-window-chain", &instance, lhs, rhs, 1e-7, 0.0);
    let (lhs, rhs) = worst(&|c| (nf / 2.0 * c.mean_entropy_2, c.rhs_explicit));
    let pair_bound = CertificateReport::new("lattice-pair-bound", &instance, lhs, rhs, 1e-7, 0.0);
    let (lhs, rhs) = worst(&|c| (c.rhs_explicit, c.rhs_pairwise));
    let rms_am = CertificateReport::new("lattice-rms-am", &instance, lhs, rhs, 1e-9, 0.0);
    let (lhs, rhs) = worst(&|c| (c.mean_entropy_n, c.rhs_pairwise));
    let headline = CertificateReport::new("lattice-headline", &instance, lhs, rhs, 1e-7, 0.0);
    let (lhs, rhs) = worst(&|c| (c.energy.abs() / max_norm, c.epsilon_sum));
    let linkage = CertificateReport::new("lattice-energy-linkage", &instance, lhs, rhs, 1e-9, 0.0);
    let (lhs, rhs) = worst(&|c| (c.max_entropy_n, nf * LN2));
    let ceiling = CertificateReport::new("lattice-entropy-ceiling", &instance, lhs, rhs, 1e-8, 0.0);

    Ok(LatticeCertificate {
        num_qubits,
        subsystem_size: n,
        max_bond_norm: max_norm,
        checkpoints,
        reports: vec![window_chain, pair_bound, rms_am, headline, linkage, ceiling],
    })
}

/// One grid time of the state-averaged variant for translationally
/// invariant chains.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateAverageCheckpoint {
    pub time: f64,
    /// Mean over the sampled product states of the fixed-window entropy
    /// `S(ρ_{A₀}(t))` with `A₀ = {0,…,n−1}`.
    pub mean_window_entropy: f64,
    /// Mean over states of the per-state headline right-hand side.
    pub mean_rhs: f64,
    /// Standard error of the per-state margin `rhs − S(ρ_{A₀})`.
    pub margin_se: f64,
}

/// State-averaged certificate: for a translationally invariant chain the
/// product-state ensemble is itself translation invariant, so averaging over
/// Haar product states replaces averaging over window positions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateAverageCertificate {
    pub num_qubits: usize,
    pub subsystem_size: usize,
    pub num_states: usize,
    pub checkpoints: Vec<StateAverageCheckpoint>,
    pub reports: Vec<CertificateReport>,
}

/// Evaluates the headline bound with the subsystem average replaced by an
/// average over Haar-random product initial states on the fixed first
/// window. The bound is statistical here (3·SE slack): pointwise in the
/// state it only controls the window average, and translation invariance
/// transfers it to the fixed window in expectation.
pub fn state_average_certificate(
    chain: &LatticeChain,
    n: usize,
    num_states: usize,
    grid: &TimeGrid,
    seed: u64,
) -> Result<StateAverageCertificate> {
    let num_qubits = chain.num_qubits();
    if !chain.spec.translationally_invariant || chain.spec.boundary != Boundary::Periodic {
        return Err(Error::InvalidArgument(
            "state averaging replaces window averaging only for translationally invariant periodic chains"
                .into(),
        ));
    }
    if n <= 1 || 2 * n > num_qubits {
        return Err(Error::InvalidArgument(format!(
            "subsystem size must satisfy 1 < n ≤ N/2, got n={n}, N={num_qubits}"
        )));
    }
    if num_states < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            got: num_states,
        });
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }

    let bonds = bond_probes(chain)?;
    let window = SubsystemMask::new((0..n).collect())?;
    let window_plan = MaskPlan::new(&window, num_qubits)?;
    let nf = n as f64;
    let big_n = num_qubits as f64;

    // Per state: (S(ρ_{A₀}), rhs) at every grid time.
    let per_state: Vec<Vec<(f64, f64)>> = (0..num_states)
        .into_par_iter()
        .map(|i| -> Result<Vec<(f64, f64)>> {
            let psi = sample_haar_product_state(num_qubits, derive_seed(seed, i as u64))?;
            let ctx = EvolutionContext::new(&chain.hamiltonian, &psi)?;
            let columns = ctx.evolve_batch(&grid.times);
            grid.times
                .iter()
                .enumerate()
                .map(|(k, _)| -> Result<(f64, f64)> {
                    let state = PureState::new(columns.column(k).to_owned())?;
                    let entropy =
                        von_neumann_entropy(&state.partial_trace_with_plan(&window_plan)?)?;
                    let mut epsilon_sum = 0.0;
                    for bond in &bonds {
                        let rho = state.partial_trace_with_plan(&bond.plan)?;
                        epsilon_sum += bond.aligned.expectation_density(&rho)?.abs() / bond.norm;
                    }
                    let rhs = nf * LN2 - nf / (4.0 * big_n * big_n) * epsilon_sum * epsilon_sum;
                    Ok((entropy, rhs))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut max_entropy = 0.0f64;
    let checkpoints: Vec<StateAverageCheckpoint> = grid
        .times
        .iter()
        .enumerate()
        .map(|(k, &time)| {
            let entropies: Vec<f64> = per_state.iter().map(|rows| rows[k].0).collect();
            let margins: Vec<f64> = per_state.iter().map(|rows| rows[k].1 - rows[k].0).collect();
            let mean_entropy = entropies.iter().sum::<f64>() / entropies.len() as f64;
            let mean_rhs = per_state.iter().map(|rows| rows[k].1).sum::<f64>()
                / per_state.len() as f64;
            max_entropy = max_entropy.max(entropies.iter().copied().fold(0.0, f64::max));
            let (_, margin_se) = mean_and_se(&margins);
            StateAverageCheckpoint {
                time,
                mean_window_entropy: mean_entropy,
                mean_rhs,
                margin_se,
            }
        })
        .collect();

    let instance = format!("N={num_qubits} n={n} states={num_states} times={}", grid.len());
    let worst = checkpoints
        .iter()
        .map(|c| (c.mean_window_entropy, c.mean_rhs, c.margin_se))
        .reduce(|acc, x| {
            if x.1 + 3.0 * x.2 - x.0 < acc.1 + 3.0 * acc.2 - acc.0 {
                x
            } else {
                acc
            }
        })
        .expect("grid is non-empty");
    let reports = vec![
        CertificateReport::new(
            "lattice-state-average",
            &instance,
            worst.0,
            worst.1,
            1e-9,
            worst.2,
        ),
        CertificateReport::new(
            "lattice-state-entropy-ceiling",
            &instance,
            max_entropy,
            nf * LN2,
            1e-8,
            0.0,
        ),
    ];

    Ok(StateAverageCertificate {
        num_qubits,
        subsystem_size: n,
        num_states,
        checkpoints,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::report::all_pass;
    use crate::bounds::subsystem::subsystem_average_entropy;
    use crate::models::{build_lattice_chain, LatticeChainSpec};
    use crate::sampling::sample_haar_product_state;

    fn chain(num_qubits: usize, seed: u64) -> LatticeChain {
        build_lattice_chain(&LatticeChainSpec {
            num_qubits,
            boundary: Boundary::Periodic,
            translationally_invariant: false,
            seed,
            norm_floor: 0.8,
            norm_ceiling: 1.2,
        })
        .unwrap()
    }

    #[test]
    fn product_state_at_time_zero_is_trivial() {
        let ch = chain(6, 3);
        let psi = sample_haar_product_state(6, 11).unwrap();
        let grid = TimeGrid::linear(1.0, 2).unwrap();
        let cert = lattice_chain_certificate(&ch, &psi, &grid, 2).unwrap();
        assert!(cert.checkpoints[0].mean_entropy_n.abs() < 1e-10);
        assert!(all_pass(&cert.reports), "reports: {:#?}", cert.reports);
    }

    #[test]
    fn random_chain_holds_at_every_time() {
        let ch = chain(8, 17);
        let psi = sample_haar_product_state(8, 5).unwrap();
        let grid = TimeGrid::linear(20.0, 50).unwrap();
        let cert = lattice_chain_certificate(&ch, &psi, &grid, 2).unwrap();
        assert!(all_pass(&cert.reports), "reports: {:#?}", cert.reports);
        // The dynamics must actually generate entanglement, otherwise the
        // certificate is vacuous.
        let peak = cert
            .checkpoints
            .iter()
            .map(|c| c.mean_entropy_n)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(peak > 0.5, "peak window entropy {peak}");
    }

    #[test]
    fn checkpoint_matches_independent_window_average() {
        let ch = chain(6, 29);
        let psi = sample_haar_product_state(6, 31).unwrap();
        let grid = TimeGrid::linear(1.7, 2).unwrap();
        let cert = lattice_chain_certificate(&ch, &psi, &grid, 3).unwrap();
        let ctx = EvolutionContext::new(&ch.hamiltonian, &psi).unwrap();
        let evolved = ctx.evolve(1.7).unwrap();
        let reference =
            subsystem_average_entropy(&evolved, 3, AveragingScheme::Contiguous).unwrap();
        let last = cert.checkpoints.last().unwrap();
        assert!((last.mean_entropy_n - reference).abs() < 1e-10);
        // Energy reassembled from the bonds is the conserved total energy.
        assert!((last.energy - ctx.initial_energy()).abs() < 1e-8);
    }

    #[test]
    fn ti_state_average_passes_and_rejects_non_ti() {
        let ti = build_lattice_chain(&LatticeChainSpec {
            num_qubits: 8,
            boundary: Boundary::Periodic,
            translationally_invariant: true,
            seed: 41,
            norm_floor: 0.8,
            norm_ceiling: 1.2,
        })
        .unwrap();
        let grid = TimeGrid::linear(15.0, 25).unwrap();
        let cert = state_average_certificate(&ti, 2, 40, &grid, 7).unwrap();
        assert!(all_pass(&cert.reports), "reports: {:#?}", cert.reports);
        let peak = cert
            .checkpoints
            .iter()
            .map(|c| c.mean_window_entropy)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(peak > 0.9, "peak state-averaged entropy {peak}");

        let non_ti = chain(8, 17);
        assert!(state_average_certificate(&non_ti, 2, 40, &grid, 7).is_err());
    }

    #[test]
    fn rejects_open_boundary_and_small_windows() {
        let open = build_lattice_chain(&LatticeChainSpec {
            num_qubits: 6,
            boundary: Boundary::Open,
            translationally_invariant: false,
            seed: 3,
            norm_floor: 0.8,
            norm_ceiling: 1.2,
        })
        .unwrap();
        let psi = sample_haar_product_state(6, 1).unwrap();
        let grid = TimeGrid::linear(1.0, 2).unwrap();
        assert!(lattice_chain_certificate(&open, &psi, &grid, 2).is_err());
        let ch = chain(6, 3);
        assert!(lattice_chain_certificate(&ch, &psi, &grid, 1).is_err());
        assert!(lattice_chain_certificate(&ch, &psi, &grid, 4).is_err());
    }
}
