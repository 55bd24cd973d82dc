use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qcore::{pauli_string_product, HermitianOperator, Pauli, PauliString, SubsystemMask};
use crate::MAX_DENSE_QUBITS;

use super::spin_glass::{DisorderKind, DisorderSample};

/// Number of quartic couplings on `n` Majorana modes: `C(n, 4)`.
pub fn syk_coefficient_count(n: usize) -> usize {
    if n < 4 {
        0
    } else {
        n * (n - 1) * (n - 2) * (n - 3) / 24
    }
}

/// Jordan–Wigner representation of Majorana mode `i` on `num_majorana / 2`
/// qubits: even modes map to `Z…Z X`, odd modes to `Z…Z Y`, with the string
/// of `Z`s on every qubit before `⌊i/2⌋`. Square is the identity, so
/// `{χ_i, χ_j} = 2δ_{ i j }` holds in this normalization.
pub fn majorana_operator(mode: usize, num_majorana: usize) -> Result<PauliString> {
    if num_majorana == 0 || num_majorana % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "majorana mode count must be positive and even, got {num_majorana}"
        )));
    }
    if mode >= num_majorana {
        return Err(Error::SiteOutOfRange {
            site: mode,
            num_qubits: num_majorana,
        });
    }
    let qubit = mode / 2;
    let mut factors: Vec<(usize, Pauli)> = (0..qubit).map(|q| (q, Pauli::Z)).collect();
    factors.push((qubit, if mode % 2 == 0 { Pauli::X } else { Pauli::Y }));
    Ok(PauliString::new(1.0, factors))
}

fn quadruple_string(modes: [usize; 4], num_majorana: usize, coefficient: f64) -> Result<PauliString> {
    // Intermediate pair products carry factors of i; only the full
    // quadruple's phase must be real (±1) for the monomial to be Hermitian.
    let mut acc = majorana_operator(modes[0], num_majorana)?;
    let mut total_phase = num_complex::Complex64::new(1.0, 0.0);
    for &m in &modes[1..] {
        let next = majorana_operator(m, num_majorana)?;
        let (phase, factors) = pauli_string_product(&acc, &next);
        total_phase *= phase;
        acc = PauliString {
            coefficient: acc.coefficient * next.coefficient,
            factors,
        };
    }
    if total_phase.im.abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "majorana quadruple {modes:?} produced a complex phase {total_phase}"
        )));
    }
    acc.coefficient *= total_phase.re * coefficient;
    Ok(acc)
}

/// Assembles the quartic Majorana Hamiltonian
/// `(1/√C(N,4)) Σ_{j<k<l<m} J_{jklm} χ_j χ_k χ_l χ_m` from a coefficient
/// vector in lexicographic quadruple order.
pub fn syk_from_coefficients(
    num_majorana: usize,
    coefficients: Vec<f64>,
    seed: u64,
) -> Result<DisorderSample> {
    if num_majorana < 4 || num_majorana % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "need an even number >= 4 of majorana modes, got {num_majorana}"
        )));
    }
    let num_qubits = num_majorana / 2;
    if num_qubits > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            requested: num_qubits,
            max: MAX_DENSE_QUBITS,
        });
    }
    let count = syk_coefficient_count(num_majorana);
    if coefficients.len() != count {
        return Err(Error::DimensionMismatch {
            left: coefficients.len(),
            right: count,
        });
    }
    let prefactor = 1.0 / (count as f64).sqrt();
    let mut terms = Vec::with_capacity(count);
    let mut idx = 0;
    for j in 0..num_majorana {
        for k in j + 1..num_majorana {
            for l in k + 1..num_majorana {
                for m in l + 1..num_majorana {
                    let c = prefactor * coefficients[idx];
                    terms.push(quadruple_string([j, k, l, m], num_majorana, c)?);
                    idx += 1;
                }
            }
        }
    }
    let hamiltonian = HermitianOperator::from_terms(num_qubits, terms)?;
    Ok(DisorderSample {
        kind: DisorderKind::Syk,
        seed,
        num_modes: num_majorana,
        coefficients,
        hamiltonian,
    })
}

/// Draws an SYK disorder realization from the seed. The full model needs at
/// least 8 modes; smaller registers arise only as restrictions.
pub fn build_syk(num_majorana: usize, seed: u64) -> Result<DisorderSample> {
    if num_majorana < 8 || num_majorana % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "need an even number >= 8 of majorana modes, got {num_majorana}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = syk_coefficient_count(num_majorana);
    let coefficients: Vec<f64> = (0..count).map(|_| rng.sample(StandardNormal)).collect();
    syk_from_coefficients(num_majorana, coefficients, seed)
}

/// Restriction of an SYK sample to an arbitrary even-size mode subset:
/// keeps quadruples with all four modes inside, relabels modes to a fresh
/// register, and renormalizes by `1/√C(|A|,4)`.
pub(crate) fn restrict_syk_subset(
    sample: &DisorderSample,
    modes: &[usize],
) -> Result<HermitianOperator> {
    if sample.kind != DisorderKind::Syk {
        return Err(Error::InvalidArgument(
            "restrict_syk_subset needs an SYK sample".into(),
        ));
    }
    if modes.len() < 4 || modes.len() % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "SYK restriction needs an even subset of >= 4 modes, got {}",
            modes.len()
        )));
    }
    let n = sample.num_modes;
    if let Some(&bad) = modes.iter().find(|&&m| m >= n) {
        return Err(Error::SiteOutOfRange {
            site: bad,
            num_qubits: n,
        });
    }
    let position: std::collections::HashMap<usize, usize> =
        modes.iter().enumerate().map(|(p, &m)| (m, p)).collect();
    let sub_n = modes.len();
    let count = syk_coefficient_count(sub_n);
    let prefactor = 1.0 / (count as f64).sqrt();
    let mut terms = Vec::with_capacity(count);
    let mut idx = 0;
    for j in 0..n {
        for k in j + 1..n {
            for l in k + 1..n {
                for m in l + 1..n {
                    let c = sample.coefficients[idx];
                    idx += 1;
                    if let (Some(&pj), Some(&pk), Some(&pl), Some(&pm)) = (
                        position.get(&j),
                        position.get(&k),
                        position.get(&l),
                        position.get(&m),
                    ) {
                        terms.push(quadruple_string(
                            [pj, pk, pl, pm],
                            sub_n,
                            prefactor * c,
                        )?);
                    }
                }
            }
        }
    }
    HermitianOperator::from_terms(sub_n / 2, terms)
}

/// A contiguous, pair-aligned run of Majorana modes. Because the run starts
/// at an even mode, its Jordan–Wigner image acts only on the qubits
/// `start/2 .. (start+len)/2`, listed in `qubits`.
#[derive(Clone, Debug)]
pub struct MajoranaBlock {
    pub modes: Vec<usize>,
    pub qubits: SubsystemMask,
}

impl MajoranaBlock {
    pub fn contiguous(start_mode: usize, num_modes: usize, total_modes: usize) -> Result<Self> {
        if start_mode % 2 != 0 || num_modes % 2 != 0 || num_modes < 4 {
            return Err(Error::InvalidArgument(format!(
                "majorana blocks must be pair-aligned with >= 4 modes, got start {start_mode}, len {num_modes}"
            )));
        }
        if start_mode + num_modes > total_modes {
            return Err(Error::SiteOutOfRange {
                site: start_mode + num_modes - 1,
                num_qubits: total_modes,
            });
        }
        let modes: Vec<usize> = (start_mode..start_mode + num_modes).collect();
        let qubits = SubsystemMask::new((start_mode / 2..(start_mode + num_modes) / 2).collect())?;
        Ok(Self { modes, qubits })
    }

    /// Every pair-aligned non-wrapping block of `num_modes` modes.
    pub fn all_blocks(total_modes: usize, num_modes: usize) -> Result<Vec<Self>> {
        if num_modes > total_modes {
            return Err(Error::DimensionMismatch {
                left: num_modes,
                right: total_modes,
            });
        }
        (0..=(total_modes - num_modes))
            .step_by(2)
            .map(|s| Self::contiguous(s, num_modes, total_modes))
            .collect()
    }
}

/// Restricts an SYK sample to a pair-aligned block. The result lives on the
/// block's own `modes/2` qubits; under the global Jordan–Wigner mapping the
/// kept quadruples act exactly as this operator on `block.qubits` (the `Z`
/// tails below the block cancel in groups of four).
pub fn restrict_syk_block(
    sample: &DisorderSample,
    block: &MajoranaBlock,
) -> Result<HermitianOperator> {
    restrict_syk_subset(sample, &block.modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use num_complex::Complex64;

    #[test]
    fn anticommutation_symbolic() {
        // {χ_i, χ_j} = 2δ_ij as Pauli algebra, up to 16 modes.
        let n = 16;
        for i in 0..n {
            for j in i..n {
                let a = majorana_operator(i, n).unwrap();
                let b = majorana_operator(j, n).unwrap();
                let (pab, fab) = pauli_string_product(&a, &b);
                let (pba, fba) = pauli_string_product(&b, &a);
                assert_eq!(fab, fba);
                if i == j {
                    assert!(fab.is_empty());
                    assert!((pab - Complex64::new(1.0, 0.0)).norm() < 1e-12);
                } else {
                    // χ_i χ_j = -χ_j χ_i: same word, opposite phase.
                    assert!((pab + pba).norm() < 1e-12, "modes {i},{j}");
                }
            }
        }
    }

    #[test]
    fn anticommutation_dense() {
        let n = 8;
        let dim = 1 << (n / 2);
        let mats: Vec<Array2<Complex64>> = (0..n)
            .map(|i| {
                let mut m = Array2::zeros((dim, dim));
                majorana_operator(i, n)
                    .unwrap()
                    .accumulate_dense(&mut m, n / 2, 1.0)
                    .unwrap();
                m
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                let anti = mats[i].dot(&mats[j]) + mats[j].dot(&mats[i]);
                let expect = if i == j { 2.0 } else { 0.0 };
                for (r, row) in anti.outer_iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        let want = if r == c { expect } else { 0.0 };
                        assert!((v - Complex64::new(want, 0.0)).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn coefficient_counts() {
        assert_eq!(syk_coefficient_count(8), 70);
        assert_eq!(syk_coefficient_count(12), 495);
        let s = build_syk(8, 3).unwrap();
        assert_eq!(s.coefficients.len(), 70);
        assert_eq!(s.hamiltonian.num_qubits(), 4);
        assert!(s.hamiltonian.is_traceless());
    }

    #[test]
    fn negating_couplings_negates_hamiltonian() {
        let s = build_syk(8, 11).unwrap();
        let neg = syk_from_coefficients(8, s.coefficients.iter().map(|c| -c).collect(), 11).unwrap();
        for (a, b) in s.hamiltonian.dense().iter().zip(neg.hamiltonian.dense().iter()) {
            assert!((a + b).norm() < 1e-12);
        }
        // Spectrum of -H is the reversed negated spectrum of H.
        let ev = s.hamiltonian.eigendecomposition().unwrap();
        let ev_neg = neg.hamiltonian.eigendecomposition().unwrap();
        let k = ev.eigenvalues.len();
        for i in 0..k {
            assert!((ev_neg.eigenvalues[i] + ev.eigenvalues[k - 1 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn twelve_mode_spectrum_is_doubly_degenerate() {
        // For 12 modes the particle-hole structure forces exact doublets.
        let s = build_syk(12, 7).unwrap();
        let ev = &s.hamiltonian.eigendecomposition().unwrap().eigenvalues;
        let norm = s.hamiltonian.operator_norm().unwrap();
        assert_eq!(ev.len(), 64);
        for p in 0..32 {
            let gap = (ev[2 * p + 1] - ev[2 * p]).abs();
            assert!(gap < 1e-8 * norm, "doublet {p} split by {gap}");
        }
    }

    #[test]
    fn block_restriction_matches_global_action() {
        // For a pair-aligned block, the kept global quadruples act on the
        // block qubits exactly as the relabeled restriction.
        let s = build_syk(8, 19).unwrap();
        let block = MajoranaBlock::contiguous(2, 4, 8).unwrap();
        assert_eq!(block.qubits.sites(), &[1, 2]);
        let local = restrict_syk_block(&s, &block).unwrap();
        assert_eq!(local.num_qubits(), 2);

        // Rebuild the same operator by summing the kept global quadruples
        // (undoing the local renormalization) and check it equals the
        // embedded local operator.
        let count_local = syk_coefficient_count(4) as f64; // 1 quadruple
        let count_global = syk_coefficient_count(8) as f64;
        let embedded = local.embedded(block.qubits.sites(), 4).unwrap();
        let mut kept = Array2::<Complex64>::zeros((16, 16));
        let mut idx = 0;
        for j in 0..8 {
            for k in j + 1..8 {
                for l in k + 1..8 {
                    for m in l + 1..8 {
                        let c = s.coefficients[idx];
                        idx += 1;
                        if [j, k, l, m].iter().all(|x| block.modes.contains(x)) {
                            quadruple_string([j, k, l, m], 8, c / count_global.sqrt())
                                .unwrap()
                                .accumulate_dense(&mut kept, 4, 1.0)
                                .unwrap();
                        }
                    }
                }
            }
        }
        let scale = (count_global / count_local).sqrt();
        for (a, b) in kept.iter().zip(embedded.dense().iter()) {
            assert!((a * scale - b).norm() < 1e-10);
        }
    }

    #[test]
    fn all_blocks_enumeration() {
        let blocks = MajoranaBlock::all_blocks(12, 4).unwrap();
        assert_eq!(blocks.len(), 5);
        assert_eq!(blocks[0].modes, vec![0, 1, 2, 3]);
        assert_eq!(blocks[4].modes, vec![8, 9, 10, 11]);
        assert!(MajoranaBlock::contiguous(1, 4, 8).is_err());
        assert!(MajoranaBlock::contiguous(6, 4, 8).is_err());
    }
}
