use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::density::DensityMatrix;
use crate::qcore::mask::{MaskPlan, SubsystemMask};
use crate::MAX_DENSE_QUBITS;

const NORM_TOL: f64 = 1e-10;

/// Normalized pure state of a qubit register.
///
/// Site 0 is the most significant bit of the amplitude index.
#[derive(Clone, Debug)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Array1<Complex64>,
}

impl PureState {
    /// Wraps an amplitude vector, checking the power-of-two length and unit
    /// norm (tolerance 1e-10).
    pub fn new(amplitudes: Array1<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotAQubitRegister { len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                requested: num_qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalizes the vector and wraps it.
    pub fn normalized(mut amplitudes: Array1<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes.mapv_inplace(|a| a / norm);
        Self::new(amplitudes)
    }

    /// Computational basis state `|index⟩` (site 0 = most significant bit).
    pub fn computational_basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize
            .checked_shl(num_qubits as u32)
            .ok_or(Error::TooManyQubits {
                requested: num_qubits,
                max: MAX_DENSE_QUBITS,
            })?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn all_zeros(num_qubits: usize) -> Result<Self> {
        Self::computational_basis(num_qubits, 0)
    }

    /// Tensor product of normalized single-qubit states (site order).
    pub fn product(factors: &[[Complex64; 2]]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::NotAQubitRegister { len: 1 });
        }
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in factors {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * q[0]);
                next.push(a * q[1]);
            }
            amps = next;
        }
        Self::new(Array1::from(amps))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    /// Mutable amplitude access; callers are responsible for keeping the
    /// state normalized (unitary updates do).
    pub fn amplitudes_mut(&mut self) -> &mut Array1<Complex64> {
        &mut self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Full-register density matrix `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.dim();
        let mut m = ndarray::Array2::zeros((dim, dim));
        for r in 0..dim {
            for c in 0..dim {
                m[[r, c]] = self.amplitudes[r] * self.amplitudes[c].conj();
            }
        }
        DensityMatrix::new_unchecked(self.num_qubits, m)
    }

    /// Reduced density matrix of the kept subsystem.
    ///
    /// Reshapes the amplitudes into a `2^|A| x 2^|Ā|` matrix `M` using the
    /// mask's bit plan and returns `M M†`; tracing out nothing returns
    /// `|ψ⟩⟨ψ|`.
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
        let kb = plan.rest_spread.len();
        let mut m = ndarray::Array2::zeros((ka, kb));
        for (a, &abits) in plan.kept_spread.iter().enumerate() {
            for (b, &bbits) in plan.rest_spread.iter().enumerate() {
                m[[a, b]] = self.amplitudes[abits | bbits];
            }
        }
        let mconj = m.mapv(|v| v.conj());
        let rho = m.dot(&mconj.t());
        Ok(DensityMatrix::new_unchecked(plan.kept, rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_lengths_and_norms() {
        assert!(PureState::new(array![c(1., 0.), c(0., 0.), c(0., 0.)]).is_err());
        assert!(PureState::new(array![c(0.5, 0.), c(0.5, 0.)]).is_err());
        assert!(PureState::new(array![c(1., 0.), c(0., 0.)]).is_ok());
    }

    #[test]
    fn product_state_matches_kron() {
        let zero = [c(1., 0.), c(0., 0.)];
        let plus = [c(1. / 2f64.sqrt(), 0.), c(1. / 2f64.sqrt(), 0.)];
        let psi = PureState::product(&[zero, plus]).unwrap();
        // |0⟩ ⊗ |+⟩ = (|00⟩ + |01⟩)/√2 with site 0 the MSB.
        assert!((psi.amplitudes()[0].re - 1. / 2f64.sqrt()).abs() < 1e-12);
        assert!((psi.amplitudes()[1].re - 1. / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(psi.amplitudes()[2], c(0., 0.));
        assert_eq!(psi.amplitudes()[3], c(0., 0.));
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        let s = 1. / 2f64.sqrt();
        let bell = PureState::new(array![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]).unwrap();
        let keep = SubsystemMask::new(vec![0]).unwrap();
        let rho = bell.partial_trace(&keep).unwrap();
        assert!((rho.matrix()[[0, 0]].re - 0.5).abs() < 1e-12);
        assert!((rho.matrix()[[1, 1]].re - 0.5).abs() < 1e-12);
        assert!(rho.matrix()[[0, 1]].norm() < 1e-12);
    }

    #[test]
    fn product_state_marginal_factorizes() {
        // |01⟩, keep site 1 → |1⟩⟨1|.
        let psi = PureState::computational_basis(2, 0b01).unwrap();
        let keep = SubsystemMask::new(vec![1]).unwrap();
        let rho = psi.partial_trace(&keep).unwrap();
        assert!((rho.matrix()[[1, 1]].re - 1.0).abs() < 1e-12);
        assert!(rho.matrix()[[0, 0]].norm() < 1e-12);
    }

    #[test]
    fn ghz_two_qubit_marginal() {
        // GHZ on 3 qubits, keep {0, 1} → (|00⟩⟨00| + |11⟩⟨11|)/2.
        let s = 1. / 2f64.sqrt();
        let mut amps = Array1::zeros(8);
        amps[0] = c(s, 0.);
        amps[7] = c(s, 0.);
        let ghz = PureState::new(amps).unwrap();
        let keep = SubsystemMask::new(vec![0, 1]).unwrap();
        let rho = ghz.partial_trace(&keep).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let expect = if (r, col) == (0, 0) || (r, col) == (3, 3) {
                    0.5
                } else {
                    0.0
                };
                assert!((rho.matrix()[[r, col]] - c(expect, 0.)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tracing_out_nothing_returns_projector() {
        let s = 1. / 2f64.sqrt();
        let psi = PureState::new(array![c(s, 0.), c(0., s)]).unwrap();
        let keep = SubsystemMask::new(vec![0]).unwrap();
        let rho = psi.partial_trace(&keep).unwrap();
        let proj = psi.to_density();
        for (a, b) in rho.matrix().iter().zip(proj.matrix().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
