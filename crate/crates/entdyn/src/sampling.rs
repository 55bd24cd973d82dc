//! Seeded Haar and Gaussian ensembles, plus energy statistics of initial
//! states under a fixed operator.

use ndarray::Array1;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{HermitianOperator, PureState};
use crate::derive_seed;

/// A single-qubit state drawn from the Haar measure.
///
/// Two independent complex Gaussians, normalized — exact and rejection-free.
pub fn haar_qubit(rng: &mut impl Rng) -> [Complex64; 2] {
    loop {
        let a = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let b = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm > 1e-12 {
            return [a / norm, b / norm];
        }
    }
}

/// Haar-random product state on `num_qubits` qubits from the given seed.
pub fn sample_haar_product_state(num_qubits: usize, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_haar_product_state_rng(num_qubits, &mut rng)
}

/// As [`sample_haar_product_state`] but drawing from a caller-owned stream.
pub fn sample_haar_product_state_rng(num_qubits: usize, rng: &mut impl Rng) -> Result<PureState> {
    let factors: Vec<[Complex64; 2]> = (0..num_qubits).map(|_| haar_qubit(rng)).collect();
    PureState::product(&factors)
}

/// Haar-random pure state of the whole register: a normalized complex
/// Gaussian amplitude vector.
pub fn sample_haar_state(num_qubits: usize, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << num_qubits;
    let mut amps = Array1::zeros(dim);
    let mut norm_sq = 0.0;
    for a in amps.iter_mut() {
        let v = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        norm_sq += v.norm_sqr();
        *a = v;
    }
    let norm = norm_sq.sqrt();
    amps.mapv_inplace(|v| v / norm);
    PureState::new(amps)
}

/// Random mixed state on `num_qubits` qubits, induced by tracing a Haar
/// pure state over `ancilla_qubits` extra qubits (larger ancillas
/// concentrate toward the maximally mixed state).
pub fn sample_random_density(
    num_qubits: usize,
    ancilla_qubits: usize,
    seed: u64,
) -> Result<crate::qcore::DensityMatrix> {
    use crate::qcore::SubsystemMask;
    let total = num_qubits + ancilla_qubits;
    let psi = sample_haar_state(total, seed)?;
    let keep = SubsystemMask::new((0..num_qubits).collect())?;
    psi.partial_trace(&keep)
}

/// Haar-random pure state of a bipartite system with local dimensions
/// `d_a ≤ d_b` (the dimensions need not be powers of two).
#[derive(Clone, Debug)]
pub struct BipartiteState {
    pub d_a: usize,
    pub d_b: usize,
    pub amplitudes: Array1<Complex64>,
}

impl BipartiteState {
    /// Entanglement entropy of the `A` marginal, in nats.
    ///
    /// Reshapes the amplitudes into a `d_a x d_b` matrix `M` and takes the
    /// eigenvalues of `M M†`. Kept independent of the qubit-register
    /// machinery so it doubles as an oracle for it.
    pub fn entanglement_entropy(&self) -> Result<f64> {
        use ndarray_linalg::{EigValsh, UPLO};
        let m = ndarray::Array2::from_shape_vec(
            (self.d_a, self.d_b),
            self.amplitudes.to_vec(),
        )
        .map_err(|e| Error::Linalg(e.to_string()))?;
        let mconj = m.mapv(|v| v.conj());
        let rho = m.dot(&mconj.t());
        let eigs = rho
            .eigvalsh(UPLO::Lower)
            .map_err(|e| Error::Linalg(e.to_string()))?;
        crate::qcore::spectrum_entropy(eigs.as_slice().unwrap())
    }

    /// Entropy of the `B` marginal (for the pure-state symmetry check).
    pub fn entanglement_entropy_b(&self) -> Result<f64> {
        use ndarray_linalg::{EigValsh, UPLO};
        let m = ndarray::Array2::from_shape_vec(
            (self.d_a, self.d_b),
            self.amplitudes.to_vec(),
        )
        .map_err(|e| Error::Linalg(e.to_string()))?;
        let mconj = m.mapv(|v| v.conj());
        let rho_b = mconj.t().dot(&m);
        let eigs = rho_b
            .eigvalsh(UPLO::Lower)
            .map_err(|e| Error::Linalg(e.to_string()))?;
        crate::qcore::spectrum_entropy(eigs.as_slice().unwrap())
    }
}

/// Haar-random bipartite pure state: a normalized complex Gaussian vector of
/// dimension `d_a · d_b`. Rejects `d_a > d_b` to keep the usual convention
/// visible at call sites.
pub fn sample_haar_bipartite(d_a: usize, d_b: usize, seed: u64) -> Result<BipartiteState> {
    if d_a == 0 || d_b == 0 || d_a > d_b {
        return Err(Error::InvalidArgument(format!(
            "bipartite dimensions must satisfy 1 <= d_a <= d_b, got ({d_a}, {d_b})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps: Array1<Complex64> = Array1::from_iter((0..d_a * d_b).map(|_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }));
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.mapv_inplace(|a| a / norm);
    Ok(BipartiteState {
        d_a,
        d_b,
        amplitudes: amps,
    })
}

/// Which initial-state ensemble an experiment draws from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Independent Haar single-qubit factors.
    HaarProduct,
    /// The fixed computational-basis state with the given index.
    ComputationalBasis { index: usize },
}

/// Seeded ensemble of initial states.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub num_qubits: usize,
    pub seed: u64,
    pub num_samples: usize,
}

impl EnsembleSpec {
    /// The `i`-th state of the ensemble (seeds split deterministically).
    pub fn state(&self, i: usize) -> Result<PureState> {
        match &self.kind {
            EnsembleKind::HaarProduct => {
                sample_haar_product_state(self.num_qubits, derive_seed(self.seed, i as u64))
            }
            EnsembleKind::ComputationalBasis { index } => {
                PureState::computational_basis(self.num_qubits, *index)
            }
        }
    }
}

/// Monte Carlo summary of `⟨state|H|state⟩` over an ensemble.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnergyStatistics {
    pub mean: f64,
    pub mean_abs: f64,
    pub std: f64,
    pub standard_error: f64,
    /// Fraction of samples with `|⟨H⟩| ≥ threshold`.
    pub fraction_above_threshold: f64,
    pub threshold: f64,
    pub num_samples: usize,
}

/// Estimates the energy distribution of an ensemble under `h`.
///
/// `threshold` is the absolute-energy cut used for the tail fraction
/// (typically `c·√N` for a chain).
pub fn energy_statistics(
    h: &HermitianOperator,
    ensemble: &EnsembleSpec,
    threshold: f64,
) -> Result<EnergyStatistics> {
    if ensemble.num_samples < 100 {
        return Err(Error::InsufficientSamples {
            required: 100,
            got: ensemble.num_samples,
        });
    }
    if 1usize << ensemble.num_qubits != h.dim() {
        return Err(Error::DimensionMismatch {
            left: 1usize << ensemble.num_qubits,
            right: h.dim(),
        });
    }
    let mut energies = Vec::with_capacity(ensemble.num_samples);
    for i in 0..ensemble.num_samples {
        let psi = ensemble.state(i)?;
        energies.push(h.expectation_pure(&psi)?);
    }
    let n = energies.len() as f64;
    let mean = energies.iter().sum::<f64>() / n;
    let mean_abs = energies.iter().map(|e| e.abs()).sum::<f64>() / n;
    let var = energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    let above = energies.iter().filter(|e| e.abs() >= threshold).count();
    Ok(EnergyStatistics {
        mean,
        mean_abs,
        std,
        standard_error: std / n.sqrt(),
        fraction_above_threshold: above as f64 / n,
        threshold,
        num_samples: energies.len(),
    })
}

/// Mean and standard error of a sample.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Pauli, PauliString, SubsystemMask};

    #[test]
    fn product_state_has_zero_entanglement() {
        let psi = sample_haar_product_state(4, 11).unwrap();
        for n in 1..=2 {
            for mask in SubsystemMask::all_subsets(n, 4).unwrap() {
                let rho = psi.partial_trace(&mask).unwrap();
                let s = crate::qcore::von_neumann_entropy(&rho).unwrap();
                assert!(s.abs() < 1e-10, "S = {s}");
            }
        }
    }

    #[test]
    fn haar_bloch_vectors_average_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples = 10_000;
        let mut sums = [0.0f64; 3];
        for _ in 0..samples {
            let [a, b] = haar_qubit(&mut rng);
            sums[0] += 2.0 * (a.conj() * b).re;
            sums[1] += 2.0 * (a.conj() * b).im;
            sums[2] += a.norm_sqr() - b.norm_sqr();
        }
        // Componentwise mean within 3σ of 0; per-component variance is 1/3.
        let tol = 3.0 * (1.0f64 / 3.0 / samples as f64).sqrt();
        for s in sums {
            assert!((s / samples as f64).abs() < tol);
        }
    }

    #[test]
    fn bipartite_rejects_bad_dims_and_is_symmetric() {
        assert!(sample_haar_bipartite(4, 2, 0).is_err());
        let psi = sample_haar_bipartite(2, 4, 5).unwrap();
        let sa = psi.entanglement_entropy().unwrap();
        let sb = psi.entanglement_entropy_b().unwrap();
        assert!((sa - sb).abs() < 1e-8);
    }

    #[test]
    fn seed_determinism() {
        let a = sample_haar_product_state(3, 42).unwrap();
        let b = sample_haar_product_state(3, 42).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
        let c = sample_haar_bipartite(2, 2, 9).unwrap();
        let d = sample_haar_bipartite(2, 2, 9).unwrap();
        assert_eq!(c.amplitudes, d.amplitudes);
    }

    #[test]
    fn energy_statistics_haar_mean_vanishes() {
        let h = HermitianOperator::from_terms(
            3,
            vec![
                PauliString::new(0.8, [(0, Pauli::Z), (1, Pauli::Z)]),
                PauliString::new(-0.5, [(1, Pauli::X), (2, Pauli::Y)]),
            ],
        )
        .unwrap();
        let spec = EnsembleSpec {
            kind: EnsembleKind::HaarProduct,
            num_qubits: 3,
            seed: 17,
            num_samples: 2000,
        };
        let stats = energy_statistics(&h, &spec, 1.0).unwrap();
        assert!(stats.mean.abs() < 3.0 * stats.standard_error + 1e-9);
    }

    #[test]
    fn computational_basis_energy_is_exact() {
        // Periodic σ^z σ^z chain on |0…0⟩: every bond contributes +1.
        let n = 4;
        let terms = (0..n)
            .map(|j| PauliString::new(1.0, [(j, Pauli::Z), ((j + 1) % n, Pauli::Z)]))
            .collect();
        let h = HermitianOperator::from_terms(n, terms).unwrap();
        let psi = PureState::all_zeros(n).unwrap();
        assert!((h.expectation_pure(&psi).unwrap() - n as f64).abs() < 1e-12);
    }

    #[test]
    fn random_density_mean_purity() {
        // Induced measure (d, d) has E[tr ρ²] = 2d/(d² + 1); for one qubit
        // over a one-qubit ancilla that is 4/5.
        let mut purities = Vec::new();
        for i in 0..400 {
            let rho = sample_random_density(1, 1, derive_seed(5, i)).unwrap();
            purities.push(rho.purity());
        }
        let (mean, se) = mean_and_se(&purities);
        assert!((mean - 0.8).abs() < 4.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn haar_state_is_normalized_and_deterministic() {
        let a = sample_haar_state(3, 9).unwrap();
        let b = sample_haar_state(3, 9).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
        let norm: f64 = a.amplitudes().iter().map(|v| v.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
