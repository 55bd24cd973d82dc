use ndarray_linalg::{EigValsh, UPLO};

use crate::error::{Error, Result};
use crate::qcore::density::DensityMatrix;

/// Eigenvalues in `[-1e-9, 0)` are treated as numerical zeros; anything below
/// signals a corrupted density matrix and is an error.
pub const EIGENVALUE_CLIP: f64 = 1e-9;

/// Shannon entropy `-Σ p ln p` in nats of a probability vector; zero entries
/// contribute zero.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Entropy of a spectrum with the clipping policy applied.
///
/// Returns an error if any eigenvalue is below `-1e-9`.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &p in eigenvalues {
        if p < -EIGENVALUE_CLIP {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: p });
        }
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    Ok(s)
}

/// Von Neumann entropy `S(ρ) = -tr(ρ ln ρ)` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eigs = rho
        .matrix()
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Linalg(e.to_string()))?;
    spectrum_entropy(eigs.as_slice().unwrap())
}

/// Rényi-2 entropy `-ln tr(ρ²)`.
pub fn renyi2_entropy(rho: &DensityMatrix) -> f64 {
    -rho.purity().ln()
}

/// Trace-norm distance `‖ρ - σ‖₁ = tr|ρ - σ|`, in `[0, 2]` for states.
pub fn trace_norm_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    let eigs = diff
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Linalg(e.to_string()))?;
    Ok(eigs.iter().map(|l| l.abs()).sum())
}

/// Right-hand side of the Fannes–Audenaert continuity bound:
/// `T ln(D-1) - T ln T - (1-T) ln(1-T)` for trace distance `T` on dimension
/// `D`. Well defined for `T ∈ [0, 1]`.
pub fn fannes_audenaert_rhs(t: f64, dim: usize) -> f64 {
    debug_assert!((0.0..=1.0 + 1e-12).contains(&t));
    let t = t.clamp(0.0, 1.0);
    let mut rhs = 0.0;
    if dim > 1 {
        rhs += t * ((dim - 1) as f64).ln();
    }
    if t > 0.0 && t < 1.0 {
        rhs += -t * t.ln() - (1.0 - t) * (1.0 - t).ln();
    }
    rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::PureState;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn maximally_mixed_entropies() {
        let rho = DensityMatrix::maximally_mixed(1);
        assert!((von_neumann_entropy(&rho).unwrap() - LN2).abs() < 1e-12);
        let rho = DensityMatrix::maximally_mixed(2);
        assert!((von_neumann_entropy(&rho).unwrap() - 2.0 * LN2).abs() < 1e-12);
        assert!((renyi2_entropy(&rho) - 2.0 * LN2).abs() < 1e-12);
    }

    #[test]
    fn pure_projector_has_zero_entropy() {
        let rho = PureState::computational_basis(2, 1).unwrap().to_density();
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-12);
        assert!(renyi2_entropy(&rho).abs() < 1e-12);
    }

    #[test]
    fn hand_evaluated_spectra() {
        // S(diag(1/2, 1/4, 1/8, 1/8)) = 1.75 ln 2.
        let rho = DensityMatrix::from_probabilities(&[0.5, 0.25, 0.125, 0.125]).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((s - 1.75 * LN2).abs() < 1e-12, "S = {s}");

        // Rényi-2 of diag(3/4, 1/4): -ln(10/16) = ln 1.6.
        let rho = DensityMatrix::from_probabilities(&[0.75, 0.25]).unwrap();
        assert!((renyi2_entropy(&rho) - 1.6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_distance_cases() {
        let p0 = PureState::computational_basis(1, 0).unwrap().to_density();
        let p1 = PureState::computational_basis(1, 1).unwrap().to_density();
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!(trace_norm_distance(&p0, &p0).unwrap().abs() < 1e-12);
        assert!((trace_norm_distance(&p0, &p1).unwrap() - 2.0).abs() < 1e-12);
        // diag(1, 0) vs I/2: eigenvalues ±1/2 of the difference.
        assert!((trace_norm_distance(&p0, &mixed).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corrupted_spectrum_is_an_error() {
        assert!(spectrum_entropy(&[1.1, -1e-6]).is_err());
        // Values inside the clip window are tolerated.
        assert!(spectrum_entropy(&[1.0, -5e-10]).is_ok());
    }

    #[test]
    fn fannes_audenaert_edge_cases() {
        assert_eq!(fannes_audenaert_rhs(0.0, 4), 0.0);
        assert!((fannes_audenaert_rhs(1.0, 4) - 3f64.ln()).abs() < 1e-12);
        let mid = fannes_audenaert_rhs(0.5, 2);
        assert!((mid - LN2).abs() < 1e-12);
    }
}
