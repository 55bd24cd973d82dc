use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::mask::{MaskPlan, SubsystemMask};

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

/// Density matrix of a qubit register (Hermitian, unit trace, PSD up to
/// tolerance).
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: Array2<Complex64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity (1e-10) and unit trace
    /// (1e-10). Positivity is only enforced where eigenvalues are taken
    /// (entropy), where anything below -1e-9 is an error.
    pub fn new(num_qubits: usize, matrix: Array2<Complex64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: dim,
            });
        }
        let mut herm_residual = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                let d = (matrix[[r, c]] - matrix[[c, r]].conj()).norm();
                if d > herm_residual {
                    herm_residual = d;
                }
            }
        }
        if herm_residual > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                residual: herm_residual,
            });
        }
        let trace: Complex64 = (0..dim).map(|i| matrix[[i, i]]).sum();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        Ok(Self { num_qubits, matrix })
    }

    /// Wraps a matrix that is valid by construction (e.g. `M M†` from a
    /// normalized state); skips the validity scan.
    pub(crate) fn new_unchecked(num_qubits: usize, matrix: Array2<Complex64>) -> Self {
        Self { num_qubits, matrix }
    }

    /// Maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut m = Array2::zeros((dim, dim));
        let p = Complex64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            m[[i, i]] = p;
        }
        Self { num_qubits, matrix: m }
    }

    /// Diagonal density matrix from a probability vector (must sum to 1).
    pub fn from_probabilities(probabilities: &[f64]) -> Result<Self> {
        let len = probabilities.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotAQubitRegister { len });
        }
        let mut m = Array2::zeros((len, len));
        for (i, &p) in probabilities.iter().enumerate() {
            m[[i, i]] = Complex64::new(p, 0.0);
        }
        Self::new(len.trailing_zeros() as usize, m)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.matrix[[i, i]]).sum()
    }

    /// `tr(ρ²)`, the purity.
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ_{rc} ρ_{rc} ρ_{cr} = Σ_{rc} |ρ_{rc}|² for Hermitian ρ.
        self.matrix.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Reduced density matrix on the kept subsystem.
    pub fn partial_trace(&self, keep: &SubsystemMask) -> Result<DensityMatrix> {
        let plan = MaskPlan::new(keep, self.num_qubits)?;
        self.partial_trace_with_plan(&plan)
    }

    /// As [`partial_trace`](Self::partial_trace) but reusing a prebuilt plan.
    pub fn partial_trace_with_plan(&self, plan: &MaskPlan) -> Result<DensityMatrix> {
        if plan.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: plan.num_qubits,
                right: self.num_qubits,
            });
        }
        let ka = plan.kept_spread.len();
        let mut out = Array2::zeros((ka, ka));
        for (a, &abits) in plan.kept_spread.iter().enumerate() {
            for (a2, &a2bits) in plan.kept_spread.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &bbits in &plan.rest_spread {
                    acc += self.matrix[[abits | bbits, a2bits | bbits]];
                }
                out[[a, a2]] = acc;
            }
        }
        Ok(DensityMatrix::new_unchecked(plan.kept, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::PureState;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation_catches_bad_inputs() {
        // Non-Hermitian.
        let m = array![[c(0.5, 0.), c(0.1, 0.)], [c(0.3, 0.), c(0.5, 0.)]];
        assert!(matches!(
            DensityMatrix::new(1, m),
            Err(Error::NotHermitian { .. })
        ));
        // Trace 2.
        let m = array![[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]];
        assert!(matches!(
            DensityMatrix::new(1, m),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn purity_of_mixed_and_pure() {
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((mixed.purity() - 0.25).abs() < 1e-12);
        let pure = PureState::computational_basis(2, 3).unwrap().to_density();
        assert!((pure.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_partial_trace_agrees_with_pure_route() {
        // Mixture of two product states; trace out site 1 of 3.
        let a = PureState::computational_basis(3, 0b010).unwrap().to_density();
        let b = PureState::computational_basis(3, 0b111).unwrap().to_density();
        let mix = DensityMatrix::new(
            3,
            a.matrix() * Complex64::new(0.25, 0.0) + b.matrix() * Complex64::new(0.75, 0.0),
        )
        .unwrap();
        let keep = SubsystemMask::new(vec![0, 2]).unwrap();
        let rho = mix.partial_trace(&keep).unwrap();
        // Expected: 0.25 |00⟩⟨00| + 0.75 |11⟩⟨11| on (site0, site2).
        assert!((rho.matrix()[[0, 0]].re - 0.25).abs() < 1e-12);
        assert!((rho.matrix()[[3, 3]].re - 0.75).abs() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }
}
