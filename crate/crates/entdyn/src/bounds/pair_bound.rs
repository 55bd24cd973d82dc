use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bounds::report::CertificateReport;
use crate::error::{Error, Result};
use crate::qcore::{shannon_entropy, von_neumann_entropy, DensityMatrix, HermitianOperator};

const LN2: f64 = std::f64::consts::LN_2;

/// Two-qubit entropy–energy tradeoff: with `ε = |tr(ρH)| / ‖H‖` for a
/// traceless pair Hamiltonian, `S(ρ) ≤ 2 ln 2 − ε²/2`.
pub fn pair_entropy_energy_bound(
    rho: &DensityMatrix,
    h_pair: &HermitianOperator,
) -> Result<CertificateReport> {
    if rho.num_qubits() != 2 || h_pair.num_qubits() != 2 {
        return Err(Error::InvalidArgument(
            "pair bound needs a two-qubit state and Hamiltonian".into(),
        ));
    }
    if !h_pair.is_traceless() {
        return Err(Error::NotTraceless);
    }
    let norm = h_pair.operator_norm()?;
    if norm == 0.0 {
        return Err(Error::InvalidArgument("zero pair Hamiltonian".into()));
    }
    let eps = h_pair.expectation_density(rho)?.abs() / norm;
    let lhs = von_neumann_entropy(rho)?;
    let rhs = 2.0 * LN2 - eps * eps / 2.0;
    Ok(CertificateReport::new(
        "pair_entropy_energy_bound",
        format!("eps={eps:.6}"),
        lhs,
        rhs,
        1e-9,
        0.0,
    ))
}

/// The three spectra that majorize every two-qubit spectrum compatible with
/// a given deviation ε (entropy is Schur concave, so checking these suffices):
/// `(1/4±ε/4, 1/4±ε/4, 1/4∓ε/4, 1/4∓ε/4)`, `(1/4+ε/2, (1/4−ε/6)×3)`, and —
/// for ε ≤ 1/2 — `(1/4−ε/2, (1/4+ε/6)×3)`.
fn extremal_spectra(eps: f64) -> Vec<Vec<f64>> {
    let mut fams = vec![
        vec![
            0.25 + eps / 4.0,
            0.25 + eps / 4.0,
            0.25 - eps / 4.0,
            0.25 - eps / 4.0,
        ],
        vec![
            0.25 + eps / 2.0,
            0.25 - eps / 6.0,
            0.25 - eps / 6.0,
            0.25 - eps / 6.0,
        ],
    ];
    if eps <= 0.5 {
        fams.push(vec![
            0.25 - eps / 2.0,
            0.25 + eps / 6.0,
            0.25 + eps / 6.0,
            0.25 + eps / 6.0,
        ]);
    }
    fams
}

/// Sweeps the extremal spectra over `ε ∈ [0, 1]` in steps of `step` and
/// reports the worst margin of `S ≤ 2 ln 2 − ε²/2` across the whole sweep.
pub fn schur_extremal_sweep(step: f64) -> Result<CertificateReport> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidArgument(format!("bad sweep step {step}")));
    }
    let count = (1.0 / step).round() as usize;
    let mut worst: Option<(f64, f64, f64)> = None; // (margin, eps, lhs)
    for i in 0..=count {
        let eps = (i as f64 * step).min(1.0);
        let rhs = 2.0 * LN2 - eps * eps / 2.0;
        for spectrum in extremal_spectra(eps) {
            let lhs = shannon_entropy(&spectrum);
            let margin = rhs - lhs;
            if worst.map_or(true, |(m, _, _)| margin < m) {
                worst = Some((margin, eps, lhs));
            }
        }
    }
    let (margin, eps, lhs) = worst.unwrap();
    Ok(CertificateReport::new(
        "pair_bound_extremal_sweep",
        format!("worst at eps={eps:.4}, step={step}"),
        lhs,
        lhs + margin,
        1e-9,
        0.0,
    ))
}

/// Draws random two-qubit (ρ, H) pairs — mixed states from Haar 4×4
/// bipartite purification, Hamiltonians as Gaussian Pauli sums — and checks
/// the pair bound on each; returns the worst-margin report.
pub fn random_pair_sweep(num_pairs: usize, seed: u64) -> Result<CertificateReport> {
    if num_pairs < 10 {
        return Err(Error::InsufficientSamples {
            required: 10,
            got: num_pairs,
        });
    }
    let mut worst: Option<CertificateReport> = None;
    for i in 0..num_pairs {
        let pair_seed = crate::derive_seed(seed, i as u64);
        let rho = crate::sampling::sample_random_density(2, 2, pair_seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(pair_seed, 1));
        let h = random_traceless_pair(&mut rng)?;
        let report = pair_entropy_energy_bound(&rho, &h)?;
        if worst.as_ref().map_or(true, |w| report.margin < w.margin) {
            worst = Some(report);
        }
    }
    let mut report = worst.unwrap();
    report.certificate = "pair_bound_random_sweep".into();
    report.instance = format!("{num_pairs} pairs, seed={seed}; worst: {}", report.instance);
    Ok(report)
}

pub(crate) fn random_traceless_pair(rng: &mut impl Rng) -> Result<HermitianOperator> {
    use crate::qcore::{Pauli, PauliString};
    let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut terms = Vec::new();
    // All 15 non-identity two-qubit Pauli words.
    for &p in &paulis {
        let c: f64 = rng.sample(StandardNormal);
        terms.push(PauliString::new(c, [(0, p)]));
        let c: f64 = rng.sample(StandardNormal);
        terms.push(PauliString::new(c, [(1, p)]));
        for &q in &paulis {
            let c: f64 = rng.sample(StandardNormal);
            terms.push(PauliString::new(c, [(0, p), (1, q)]));
        }
    }
    HermitianOperator::from_terms(2, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Pauli, PauliString};
    use ndarray::Array2;
    use num_complex::Complex64;

    fn zz() -> HermitianOperator {
        HermitianOperator::from_terms(
            2,
            vec![PauliString::new(1.0, [(0, Pauli::Z), (1, Pauli::Z)])],
        )
        .unwrap()
    }

    #[test]
    fn maximally_mixed_has_zero_margin() {
        let rho = DensityMatrix::maximally_mixed(2);
        let r = pair_entropy_energy_bound(&rho, &zz()).unwrap();
        assert!(r.pass);
        assert!(r.margin.abs() < 1e-12, "margin {}", r.margin);
    }

    #[test]
    fn ground_state_projector_passes() {
        // |01⟩ is a ground state of ZZ (eigenvalue −1 = λ_min, ‖H‖ = 1).
        let mut m = Array2::<Complex64>::zeros((4, 4));
        m[[1, 1]] = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::new(2, m).unwrap();
        let r = pair_entropy_energy_bound(&rho, &zz()).unwrap();
        assert!(r.pass);
        // S = 0, ε = 1: margin = 2 ln 2 − 1/2.
        assert!((r.margin - (2.0 * LN2 - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn extremal_sweep_has_no_violations() {
        let r = schur_extremal_sweep(1e-3).unwrap();
        assert!(r.pass, "{}", r.summary_line());
        assert!(r.margin >= -1e-9);
    }

    #[test]
    fn paired_family_value_at_eps_one() {
        // Spectrum (1/2, 1/2, 0, 0) at ε = 1: S = ln 2 ≤ 2 ln 2 − 1/2.
        let s = shannon_entropy(&[0.5, 0.5, 0.0, 0.0]);
        assert!((s - LN2).abs() < 1e-12);
        assert!(s <= 2.0 * LN2 - 0.5 + 1e-12);
    }

    #[test]
    fn random_sweep_passes() {
        let r = random_pair_sweep(500, 3).unwrap();
        assert!(r.pass, "{}", r.summary_line());
    }

    #[test]
    fn non_traceless_is_rejected() {
        let h = HermitianOperator::from_terms(2, vec![PauliString::identity(1.0)]).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(pair_entropy_energy_bound(&rho, &h).is_err());
    }
}
