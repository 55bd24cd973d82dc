use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{HermitianOperator, Pauli, PauliString, SubsystemMask};
use crate::MAX_DENSE_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderKind {
    SpinGlass,
    Syk,
}

/// A disorder realization: the Gaussian coefficient vector and the
/// Hamiltonian it generates.
///
/// For `SpinGlass`, `num_modes` is the qubit count and the coefficients are
/// the `9N(N-1)/2` couplings in pair-lexicographic order (`j<k` outer,
/// `(l, m) ∈ {x,y,z}²` row-major inner). For `Syk`, `num_modes` is the
/// Majorana count and the coefficients run over index quadruples
/// `j<k<l<m` lexicographically.
#[derive(Clone, Debug)]
pub struct DisorderSample {
    pub kind: DisorderKind,
    pub seed: u64,
    pub num_modes: usize,
    pub coefficients: Vec<f64>,
    pub hamiltonian: HermitianOperator,
}

/// Number of spin-glass couplings on `n` qubits: `9·C(n, 2)`.
pub fn spin_glass_coefficient_count(n: usize) -> usize {
    9 * n * (n - 1) / 2
}

/// Index of coupling `(j, k, l, m)` in the coefficient vector (`j < k`,
/// Pauli indices `l, m ∈ {0, 1, 2}` for x, y, z).
pub fn spin_glass_coefficient_index(n: usize, j: usize, k: usize, l: usize, m: usize) -> usize {
    debug_assert!(j < k && k < n && l < 3 && m < 3);
    let pair_rank = j * n - j * (j + 1) / 2 + (k - j - 1);
    9 * pair_rank + 3 * l + m
}

const PAULIS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// Assembles the all-to-all two-body Hamiltonian
/// `(1/√d_N) Σ_{j<k} Σ_{l,m} J_{jklm} σ_j^l σ_k^m` from a coefficient vector.
pub fn spin_glass_from_coefficients(
    num_qubits: usize,
    coefficients: Vec<f64>,
    seed: u64,
) -> Result<DisorderSample> {
    let n = num_qubits;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "spin glass needs at least 2 qubits, got {n}"
        )));
    }
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let d_n = spin_glass_coefficient_count(n);
    if coefficients.len() != d_n {
        return Err(Error::DimensionMismatch {
            left: coefficients.len(),
            right: d_n,
        });
    }
    let prefactor = 1.0 / (d_n as f64).sqrt();
    let mut terms = Vec::with_capacity(d_n);
    for j in 0..n {
        for k in j + 1..n {
            for (l, pl) in PAULIS.iter().enumerate() {
                for (m, pm) in PAULIS.iter().enumerate() {
                    let c = coefficients[spin_glass_coefficient_index(n, j, k, l, m)];
                    terms.push(PauliString::new(prefactor * c, [(j, *pl), (k, *pm)]));
                }
            }
        }
    }
    let hamiltonian = HermitianOperator::from_terms(n, terms)?;
    Ok(DisorderSample {
        kind: DisorderKind::SpinGlass,
        seed,
        num_modes: n,
        coefficients,
        hamiltonian,
    })
}

/// Draws a spin-glass disorder realization from the seed.
pub fn build_spin_glass(num_qubits: usize, seed: u64) -> Result<DisorderSample> {
    if num_qubits < 2 {
        return Err(Error::InvalidArgument(format!(
            "spin glass needs at least 2 qubits, got {num_qubits}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_n = spin_glass_coefficient_count(num_qubits);
    let coefficients: Vec<f64> = (0..d_n).map(|_| rng.sample(StandardNormal)).collect();
    spin_glass_from_coefficients(num_qubits, coefficients, seed)
}

/// Restricts a disorder Hamiltonian to a subsystem.
///
/// Spin glass: keeps the couplings with both sites in `A`, relabels sites to
/// `A`'s own register, and renormalizes by `1/√d_{|A|}`, so the result is
/// itself a spin-glass Hamiltonian on `|A|` qubits. The original operator is
/// recovered as `√(d_N/d_n)` times the average of the restrictions over all
/// size-`n` subsets, embedded with identity elsewhere.
///
/// SYK: `A` is read as a set of Majorana mode indices (0-based); keeps the
/// monomials with all four modes in `A` and renormalizes by `1/√C(|A|,4)`.
pub fn restrict_to_subsystem(
    sample: &DisorderSample,
    a: &SubsystemMask,
) -> Result<HermitianOperator> {
    match sample.kind {
        DisorderKind::SpinGlass => {
            let n = sample.num_modes;
            if a.len() < 2 {
                return Err(Error::InvalidArgument(
                    "spin-glass restriction needs at least 2 sites".into(),
                ));
            }
            if a.max_site() >= n {
                return Err(Error::SiteOutOfRange {
                    site: a.max_site(),
                    num_qubits: n,
                });
            }
            let sites = a.sites();
            let d_a = spin_glass_coefficient_count(sites.len());
            let prefactor = 1.0 / (d_a as f64).sqrt();
            let mut terms = Vec::with_capacity(d_a);
            for (pj, &j) in sites.iter().enumerate() {
                for (pk, &k) in sites.iter().enumerate().skip(pj + 1) {
                    for (l, pl) in PAULIS.iter().enumerate() {
                        for (m, pm) in PAULIS.iter().enumerate() {
                            let c = sample.coefficients
                                [spin_glass_coefficient_index(n, j, k, l, m)];
                            terms.push(PauliString::new(prefactor * c, [(pj, *pl), (pk, *pm)]));
                        }
                    }
                }
            }
            HermitianOperator::from_terms(sites.len(), terms)
        }
        DisorderKind::Syk => super::syk::restrict_syk_subset(sample, a.sites()),
    }
}

/// One row of the moment-bound check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub k: usize,
    /// `(2k-1)!!`, the bound on `E tr(H^{2k})/2^N`.
    pub double_factorial_bound: f64,
    pub moment_estimate: f64,
    pub moment_se: f64,
    pub squared_trace_estimate: f64,
    pub squared_trace_se: f64,
    /// Mean of the per-sample slack `tr(H^{2k})/2^N - tr²(H^k)/2^{2N}`
    /// (non-negative pointwise by Cauchy–Schwarz).
    pub rms_am_slack_mean: f64,
    pub pass_moment_bound: bool,
    pub pass_rms_am: bool,
}

/// Monte Carlo check of the normalized trace-moment bounds
/// `E tr²(H^k)/2^{2N} ≤ E tr(H^{2k})/2^N ≤ (2k-1)!!` for `k = 1..=k_max`.
pub fn trace_moment_check(
    num_qubits: usize,
    k_max: usize,
    num_samples: usize,
    seed: u64,
) -> Result<Vec<MomentReport>> {
    if num_qubits > 10 {
        return Err(Error::InvalidArgument(
            "moment check is limited to 10 qubits".into(),
        ));
    }
    if k_max == 0 || k_max > 4 {
        return Err(Error::InvalidArgument(
            "moment check supports 1 <= k_max <= 4".into(),
        ));
    }
    if num_samples < 100 {
        return Err(Error::InsufficientSamples {
            required: 100,
            got: num_samples,
        });
    }
    let dim = (1usize << num_qubits) as f64;
    // Per-sample normalized traces tr(H^p)/2^N for p = 1..=2k_max.
    let mut powers: Vec<Vec<f64>> = vec![Vec::with_capacity(num_samples); 2 * k_max];
    for i in 0..num_samples {
        let sample = build_spin_glass(num_qubits, crate::derive_seed(seed, i as u64))?;
        let eig = sample.hamiltonian.eigendecomposition()?;
        for p in 1..=2 * k_max {
            let t: f64 = eig.eigenvalues.iter().map(|l| l.powi(p as i32)).sum();
            powers[p - 1].push(t / dim);
        }
    }
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let moments = &powers[2 * k - 1];
        let squares: Vec<f64> = powers[k - 1].iter().map(|t| t * t).collect();
        let (m_mean, m_se) = crate::sampling::mean_and_se(moments);
        let (s_mean, s_se) = crate::sampling::mean_and_se(&squares);
        let slack: Vec<f64> = moments
            .iter()
            .zip(&squares)
            .map(|(m, s)| m - s)
            .collect();
        let (slack_mean, slack_se) = crate::sampling::mean_and_se(&slack);
        let bound = (1..=2 * k - 1).step_by(2).map(|x| x as f64).product::<f64>();
        out.push(MomentReport {
            k,
            double_factorial_bound: bound,
            moment_estimate: m_mean,
            moment_se: m_se,
            squared_trace_estimate: s_mean,
            squared_trace_se: s_se,
            rms_am_slack_mean: slack_mean,
            pass_moment_bound: m_mean <= bound + 3.0 * m_se,
            pass_rms_am: slack_mean >= -3.0 * slack_se - 1e-12,
        });
    }
    Ok(out)
}
