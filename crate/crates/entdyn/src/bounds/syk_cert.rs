//! Disorder-averaged entanglement certificate for the quartic Majorana
//! ensemble on pair-aligned blocks: anticommutation sanity, the measured
//! energy hypothesis with its strong-monomial fraction, the time-max entropy
//! margin below `(n/2) ln 2` for a block of `n` modes, and the
//! common-temperature thermal ceiling.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::report::CertificateReport;
use crate::bounds::thermo::{mean_gibbs_entropy, solve_gibbs_beta};
use crate::derive_seed;
use crate::dynamics::{EvolutionContext, TimeGrid};
use crate::error::{Error, Result};
use crate::models::{build_syk, majorana_operator, restrict_syk_block, MajoranaBlock};
use crate::qcore::{von_neumann_entropy, MaskPlan, PureState};
use crate::sampling::mean_and_se;

const LN2: f64 = std::f64::consts::LN_2;

/// A monomial counts as "strong" when `|⟨ψ|χχχχ|ψ⟩| ≥ 1/2`; the hypothesis
/// the full asymptotic argument wants is a constant fraction of strong
/// monomials, flagged here at the 5% level.
pub const STRONG_MONOMIAL_THRESHOLD: f64 = 0.5;
pub const STRONG_FRACTION_FLOOR: f64 = 0.05;

/// Everything measured for one disorder realization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SykSampleRow {
    pub sample_index: usize,
    pub seed: u64,
    /// `⟨ψ|H_K|ψ⟩`; its sign fixes the class used by the thermal ceiling.
    pub energy: f64,
    pub abs_energy: f64,
    /// `max_t` over the grid of the block-average entropy.
    pub max_mean_entropy: f64,
    pub argmax_time: f64,
    /// Largest single-block entropy seen at any grid time.
    pub max_block_entropy: f64,
    /// Block-mean `tr(ρ*_B H_{K,B})` at the argmax time.
    pub restricted_energy_at_max: f64,
}

/// Aggregated certificate across the disorder ensemble.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SykCertificate {
    pub num_modes: usize,
    pub num_qubits: usize,
    pub block_modes: usize,
    pub block_qubits: usize,
    pub num_blocks: usize,
    /// Deliberate narrowing: subsystems are contiguous pair-aligned Majorana
    /// blocks, the only subsets whose reduced state is independent of the
    /// Jordan–Wigner ordering. Echoed so every report is explicit about it.
    pub subsystem_scheme: String,
    pub num_disorder: usize,
    pub grid_len: usize,
    pub t_max: f64,
    /// Worst-entry residual of `{χ_a, χ_b} − 2δ_{ab}` over all mode pairs.
    pub anticommutation_residual: f64,
    pub mean_abs_energy: f64,
    pub abs_energy_se: f64,
    /// `√(2σ²/π)` with `σ² = (1/C(N,4)) Σ_q ⟨ψ|O_q|ψ⟩²`: the exact
    /// disorder-mean of `|⟨ψ|H_K|ψ⟩|` for the supplied state.
    pub hypothesis_reference: f64,
    /// `Σ_q ⟨ψ|O_q|ψ⟩²` over all quadruple monomials.
    pub monomial_weight_sum: f64,
    /// Fraction of monomials with `|⟨ψ|O_q|ψ⟩| ≥ 1/2`.
    pub strong_fraction: f64,
    /// Whether the strong fraction clears the 5% floor for this state; the
    /// all-zeros state does not at desk scale, and the certificate records
    /// that loudly instead of failing.
    pub hypothesis_strong: bool,
    pub measured_mean_max_entropy: f64,
    pub measured_se: f64,
    /// Common inverse temperature solving the measured energy constraint
    /// over all (sample, block) pairs; not sign-constrained here because
    /// block energies are not conserved along the evolution.
    pub solved_beta: f64,
    pub thermal_ceiling: f64,
    pub rows: Vec<SykSampleRow>,
    pub reports: Vec<CertificateReport>,
}

fn dense_majoranas(num_modes: usize) -> Result<Vec<Array2<Complex64>>> {
    let num_qubits = num_modes / 2;
    let dim = 1usize << num_qubits;
    (0..num_modes)
        .map(|mode| {
            let mut m = Array2::zeros((dim, dim));
            majorana_operator(mode, num_modes)?.accumulate_dense(&mut m, num_qubits, 1.0)?;
            Ok(m)
        })
        .collect()
}

fn anticommutation_residual(gammas: &[Array2<Complex64>]) -> f64 {
    let dim = gammas[0].nrows();
    let mut worst = 0.0f64;
    for a in 0..gammas.len() {
        for b in a..gammas.len() {
            let anti = gammas[a].dot(&gammas[b]) + gammas[b].dot(&gammas[a]);
            let expect = if a == b { 2.0 } else { 0.0 };
            for r in 0..dim {
                for c in 0..dim {
                    let want = if r == c { expect } else { 0.0 };
                    worst = worst.max((anti[(r, c)] - Complex64::new(want, 0.0)).norm());
                }
            }
        }
    }
    worst
}

/// Expectation `⟨ψ|χ_jχ_kχ_lχ_m|ψ⟩` for every quadruple `j<k<l<m`, in the
/// coefficient order used by the ensemble constructor. Each value is real
/// because the quadruple product is Hermitian.
fn monomial_expectations(
    gammas: &[Array2<Complex64>],
    state: &PureState,
) -> Result<Vec<f64>> {
    let n = gammas.len();
    let psi = state.amplitudes();
    let mut out = Vec::with_capacity(n * (n - 1) * (n - 2) * (n - 3) / 24);
    for j in 0..n {
        for k in j + 1..n {
            for l in k + 1..n {
                for m in l + 1..n {
                    let v: Array1<Complex64> =
                        gammas[j].dot(&gammas[k].dot(&gammas[l].dot(&gammas[m].dot(psi))));
                    let w: Complex64 = psi.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                    if w.im.abs() > 1e-10 {
                        return Err(Error::Numerical(format!(
                            "quadruple ({j},{k},{l},{m}) expectation has imaginary part {}",
                            w.im
                        )));
                    }
                    out.push(w.re);
                }
            }
        }
    }
    Ok(out)
}

struct SampleOutcome {
    row: SykSampleRow,
    signed_spectra: Vec<Vec<f64>>,
}

/// Runs the SYK certificate: `num_disorder` quartic-Majorana realizations on
/// a fixed initial state, each maximized over the time grid (the declared
/// finite stand-in for `sup_t`), with entropies averaged over all
/// pair-aligned non-wrapping blocks of `block_modes` modes.
pub fn syk_certificate(
    num_modes: usize,
    block_modes: usize,
    num_disorder: usize,
    state: &PureState,
    grid: &TimeGrid,
    seed: u64,
) -> Result<SykCertificate> {
    if block_modes < 4 || block_modes % 2 != 0 || 2 * block_modes > num_modes {
        return Err(Error::InvalidArgument(format!(
            "block size must be even, >= 4, and <= half the modes, got {block_modes} of {num_modes}"
        )));
    }
    if grid.len() < 20 {
        return Err(Error::InsufficientSamples {
            required: 20,
            got: grid.len(),
        });
    }
    if num_disorder < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            got: num_disorder,
        });
    }
    let num_qubits = num_modes / 2;
    if state.num_qubits() != num_qubits {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: 1 << num_qubits,
        });
    }

    let gammas = dense_majoranas(num_modes)?;
    let anti_residual = anticommutation_residual(&gammas);
    let weights = monomial_expectations(&gammas, state)?;
    let monomial_weight_sum: f64 = weights.iter().map(|w| w * w).sum();
    let strong_count = weights
        .iter()
        .filter(|w| w.abs() >= STRONG_MONOMIAL_THRESHOLD)
        .count();
    let strong_fraction = strong_count as f64 / weights.len() as f64;
    let hypothesis_strong = strong_fraction >= STRONG_FRACTION_FLOOR;
    let variance = monomial_weight_sum / weights.len() as f64;
    let hypothesis_reference = (2.0 * variance / std::f64::consts::PI).sqrt();

    let blocks = MajoranaBlock::all_blocks(num_modes, block_modes)?;
    let block_qubits = block_modes / 2;
    let plans: Vec<MaskPlan> = blocks
        .iter()
        .map(|b| MaskPlan::new(&b.qubits, num_qubits))
        .collect::<Result<Vec<_>>>()?;

    let outcomes: Vec<SampleOutcome> = (0..num_disorder)
        .into_par_iter()
        .map(|i| -> Result<SampleOutcome> {
            let sample = build_syk(num_modes, derive_seed(seed, i as u64))?;
            let energy = sample.hamiltonian.expectation_pure(state)?;
            let sign = if energy >= 0.0 { 1.0 } else { -1.0 };

            let restricted: Vec<_> = blocks
                .iter()
                .map(|b| restrict_syk_block(&sample, b))
                .collect::<Result<Vec<_>>>()?;

            let ctx = EvolutionContext::new(&sample.hamiltonian, state)?;
            let columns = ctx.evolve_batch(&grid.times);
            let mut best = (f64::NEG_INFINITY, 0.0);
            let mut best_state: Option<PureState> = None;
            let mut max_block_entropy = 0.0f64;
            for (k, &t) in grid.times.iter().enumerate() {
                let evolved = PureState::new(columns.column(k).to_owned())?;
                let mut mean_entropy = 0.0;
                for plan in &plans {
                    let s = von_neumann_entropy(&evolved.partial_trace_with_plan(plan)?)?;
                    max_block_entropy = max_block_entropy.max(s);
                    mean_entropy += s;
                }
                mean_entropy /= plans.len() as f64;
                if mean_entropy > best.0 {
                    best = (mean_entropy, t);
                    best_state = Some(evolved);
                }
            }
            let best_state = best_state.expect("grid is non-empty");

            let mut restricted_energy_at_max = 0.0;
            for (op, plan) in restricted.iter().zip(&plans) {
                restricted_energy_at_max +=
                    op.expectation_density(&best_state.partial_trace_with_plan(plan)?)?;
            }
            restricted_energy_at_max /= blocks.len() as f64;

            let signed_spectra = restricted
                .iter()
                .map(|op| -> Result<Vec<f64>> {
                    Ok(op
                        .eigendecomposition()?
                        .eigenvalues
                        .iter()
                        .map(|&l| sign * l)
                        .collect())
                })
                .collect::<Result<Vec<_>>>()?;

            Ok(SampleOutcome {
                row: SykSampleRow {
                    sample_index: i,
                    seed: sample.seed,
                    energy,
                    abs_energy: energy.abs(),
                    max_mean_entropy: best.0,
                    argmax_time: best.1,
                    max_block_entropy,
                    restricted_energy_at_max,
                },
                signed_spectra,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let abs_energies: Vec<f64> = outcomes.iter().map(|o| o.row.abs_energy).collect();
    let (mean_abs_energy, abs_energy_se) = mean_and_se(&abs_energies);
    let max_entropies: Vec<f64> = outcomes.iter().map(|o| o.row.max_mean_entropy).collect();
    let (measured_mean, measured_se) = mean_and_se(&max_entropies);

    // Thermal ceiling over the (sample, block) family with sign-adjusted
    // restricted Hamiltonians; the constraint is the value measured on the
    // argmax states themselves, so the maximum-entropy comparison is
    // deterministic for this collection.
    let constraint_target = outcomes
        .iter()
        .map(|o| o.row.restricted_energy_at_max * o.row.energy.signum())
        .sum::<f64>()
        / num_disorder as f64;
    let all_spectra: Vec<Vec<f64>> = outcomes
        .iter()
        .flat_map(|o| o.signed_spectra.iter().cloned())
        .collect();
    let solved_beta = solve_gibbs_beta(&all_spectra, constraint_target)?;
    let thermal_ceiling = mean_gibbs_entropy(&all_spectra, solved_beta);

    let instance = format!(
        "modes={num_modes} block={block_modes} scheme=pair-aligned M={num_disorder} grid={}@{} strong_fraction={:.4} strong={}",
        grid.len(),
        grid.t_max,
        strong_fraction,
        hypothesis_strong
    );
    let ceiling = block_qubits as f64 * LN2;
    let worst_block_entropy = outcomes
        .iter()
        .map(|o| o.row.max_block_entropy)
        .fold(0.0f64, f64::max);

    let reports = vec![
        CertificateReport::new(
            "syk-anticommutation",
            &instance,
            anti_residual,
            0.0,
            1e-10,
            0.0,
        ),
        CertificateReport::new(
            "syk-hypothesis",
            &instance,
            (mean_abs_energy - hypothesis_reference).abs(),
            0.0,
            1e-12,
            abs_energy_se,
        ),
        // Informational: margin is the measured strong fraction itself, so
        // the row always passes while keeping the number in the report
        // stream (weak-hypothesis states are expected, not bugs).
        CertificateReport::new("syk-engf-fraction", &instance, 0.0, strong_fraction, 0.0, 0.0),
        CertificateReport::new(
            "syk-ceiling-margin",
            &instance,
            measured_mean + 3.0 * measured_se,
            ceiling,
            0.0,
            0.0,
        ),
        CertificateReport::new(
            "syk-entropy-ceiling",
            &instance,
            worst_block_entropy,
            ceiling,
            1e-8,
            0.0,
        ),
        CertificateReport::new(
            "syk-thermal-ceiling",
            &instance,
            measured_mean,
            thermal_ceiling,
            1e-6,
            0.0,
        ),
    ];

    Ok(SykCertificate {
        num_modes,
        num_qubits,
        block_modes,
        block_qubits,
        num_blocks: blocks.len(),
        subsystem_scheme: "contiguous pair-aligned majorana blocks".into(),
        num_disorder,
        grid_len: grid.len(),
        t_max: grid.t_max,
        anticommutation_residual: anti_residual,
        mean_abs_energy,
        abs_energy_se,
        hypothesis_reference,
        monomial_weight_sum,
        strong_fraction,
        hypothesis_strong,
        measured_mean_max_entropy: measured_mean,
        measured_se,
        solved_beta,
        thermal_ceiling,
        rows: outcomes.into_iter().map(|o| o.row).collect(),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::report::all_pass;

    #[test]
    fn twelve_mode_run_passes_all_reports() {
        let state = PureState::all_zeros(6).unwrap();
        let grid = TimeGrid::linear(30.0, 30).unwrap();
        let cert = syk_certificate(12, 4, 100, &state, &grid, 29).unwrap();
        assert!(all_pass(&cert.reports), "reports: {:#?}", cert.reports);

        // For the all-zeros state only the 15 pair-matched quadruples
        // contribute, each with unit weight.
        assert!((cert.monomial_weight_sum - 15.0).abs() < 1e-9);
        assert!((cert.strong_fraction - 15.0 / 495.0).abs() < 1e-12);
        assert!(!cert.hypothesis_strong);
        let expected_ref = (2.0 * (15.0 / 495.0) / std::f64::consts::PI).sqrt();
        assert!((cert.hypothesis_reference - expected_ref).abs() < 1e-12);

        assert_eq!(cert.num_blocks, 5);
        assert!(cert.anticommutation_residual < 1e-12);
        assert!(cert.measured_mean_max_entropy < 2.0 * LN2);
        assert!(cert.thermal_ceiling <= 2.0 * LN2 + 1e-9);
    }

    #[test]
    fn rejects_bad_geometry_and_grids() {
        let state = PureState::all_zeros(6).unwrap();
        let grid = TimeGrid::linear(30.0, 30).unwrap();
        assert!(syk_certificate(12, 5, 10, &state, &grid, 1).is_err());
        assert!(syk_certificate(12, 2, 10, &state, &grid, 1).is_err());
        assert!(syk_certificate(12, 8, 10, &state, &grid, 1).is_err());
        let coarse = TimeGrid::linear(30.0, 10).unwrap();
        assert!(syk_certificate(12, 4, 10, &state, &coarse, 1).is_err());
        let small = PureState::all_zeros(4).unwrap();
        assert!(syk_certificate(12, 4, 10, &small, &grid, 1).is_err());
    }

    #[test]
    fn certificate_is_deterministic() {
        let state = PureState::all_zeros(4).unwrap();
        let grid = TimeGrid::linear(10.0, 20).unwrap();
        let a = syk_certificate(8, 4, 30, &state, &grid, 5).unwrap();
        let b = syk_certificate(8, 4, 30, &state, &grid, 5).unwrap();
        assert_eq!(
            serde_json::to_string(&a.rows).unwrap(),
            serde_json::to_string(&b.rows).unwrap()
        );
    }
}
