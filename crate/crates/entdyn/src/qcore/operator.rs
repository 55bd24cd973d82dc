use std::sync::OnceLock;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::density::DensityMatrix;
use crate::qcore::pauli::PauliString;
use crate::qcore::state::PureState;
use crate::MAX_DENSE_QUBITS;

const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Eigensystem of a Hermitian operator: ascending eigenvalues and the
/// corresponding orthonormal eigenvectors as matrix columns.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<Complex64>,
}

/// Hermitian operator as a weighted Pauli-string sum with a dense
/// realization.
///
/// The dense matrix is the single source of truth for all numerics; the term
/// list exists for construction, restriction, and export. The
/// eigendecomposition is computed on first use and cached.
#[derive(Debug)]
pub struct HermitianOperator {
    num_qubits: usize,
    terms: Vec<PauliString>,
    traceless: bool,
    dense: Array2<Complex64>,
    eig: OnceLock<Eigendecomposition>,
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            terms: self.terms.clone(),
            traceless: self.traceless,
            dense: self.dense.clone(),
            eig: self.eig.clone(),
        }
    }
}

impl HermitianOperator {
    /// Builds the operator from Pauli strings, realizing the dense matrix.
    ///
    /// Terms with exactly zero coefficient are dropped; non-finite
    /// coefficients are rejected. The traceless flag is set when no
    /// identity-only term remains (the trace is then exactly zero).
    pub fn from_terms(num_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                requested: num_qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        let mut dense = Array2::zeros((dim, dim));
        let mut kept = Vec::with_capacity(terms.len());
        for t in terms {
            if !t.coefficient.is_finite() {
                return Err(Error::InvalidArgument(
                    "non-finite Pauli-string coefficient".into(),
                ));
            }
            if t.coefficient == 0.0 {
                continue;
            }
            t.accumulate_dense(&mut dense, num_qubits, 1.0)?;
            kept.push(t);
        }
        let traceless = kept.iter().all(|t| !t.is_identity());
        Ok(Self {
            num_qubits,
            terms: kept,
            traceless,
            dense,
            eig: OnceLock::new(),
        })
    }

    /// Wraps a dense Hermitian matrix directly (term list left empty).
    ///
    /// Intended for oracles and tests; checks Hermiticity to 1e-10.
    pub fn from_dense(num_qubits: usize, dense: Array2<Complex64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if dense.nrows() != dim || dense.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: dense.nrows(),
                right: dim,
            });
        }
        let mut residual = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                let d = (dense[[r, c]] - dense[[c, r]].conj()).norm();
                residual = residual.max(d);
            }
        }
        if residual > 1e-10 {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self {
            num_qubits,
            terms: Vec::new(),
            traceless: false,
            dense,
            eig: OnceLock::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.dense.nrows()
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn is_traceless(&self) -> bool {
        self.traceless
    }

    pub fn dense(&self) -> &Array2<Complex64> {
        &self.dense
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.dense[[i, i]]).sum()
    }

    /// Rescales all coefficients (and the dense matrix) by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliString {
                coefficient: t.coefficient * factor,
                factors: t.factors.clone(),
            })
            .collect();
        if self.terms.is_empty() {
            // Dense-only operator: scale the matrix directly.
            return Self::from_dense(self.num_qubits, self.dense.mapv(|v| v * factor));
        }
        Self::from_terms(self.num_qubits, terms)
    }

    /// Embeds this operator into a larger register, sending local site `i`
    /// to `site_map[i]`. Requires the term list (dense-only operators cannot
    /// be embedded).
    pub fn embedded(&self, site_map: &[usize], num_qubits: usize) -> Result<Self> {
        if site_map.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: site_map.len(),
                right: self.num_qubits,
            });
        }
        for &s in site_map {
            if s >= num_qubits {
                return Err(Error::SiteOutOfRange {
                    site: s,
                    num_qubits,
                });
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|t| t.relabeled(|s| site_map[s]))
            .collect();
        Self::from_terms(num_qubits, terms)
    }

    /// Eigendecomposition, computed once and cached.
    pub fn eigendecomposition(&self) -> Result<&Eigendecomposition> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let (eigenvalues, mut eigenvectors) = self
            .dense
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Linalg(e.to_string()))?;
        // ndarray-linalg 0.16's eigh hands back conjugated eigenvectors for
        // complex Hermitian input (LAPACK reads the row-major buffer as its
        // transpose); conjugate once so column j satisfies H v_j = λ_j v_j.
        eigenvectors.mapv_inplace(|v| v.conj());
        let _ = self.eig.set(Eigendecomposition {
            eigenvalues,
            eigenvectors,
        });
        Ok(self.eig.get().unwrap())
    }

    /// Spectral norm `‖H‖` (largest absolute eigenvalue).
    pub fn operator_norm(&self) -> Result<f64> {
        let eig = self.eigendecomposition()?;
        let lo = eig.eigenvalues[0].abs();
        let hi = eig.eigenvalues[eig.eigenvalues.len() - 1].abs();
        Ok(lo.max(hi))
    }

    /// `⟨ψ|H|ψ⟩`; errors if the imaginary residue exceeds 1e-8.
    pub fn expectation_pure(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: psi.dim(),
                right: self.dim(),
            });
        }
        let h_psi = self.dense.dot(psi.amplitudes());
        let val: Complex64 = psi
            .amplitudes()
            .iter()
            .zip(h_psi.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        if val.im.abs() > IMAG_RESIDUE_TOL {
            return Err(Error::Linalg(format!(
                "expectation value has imaginary residue {:.3e}",
                val.im
            )));
        }
        Ok(val.re)
    }

    /// `tr(ρH)`; errors if the imaginary residue exceeds 1e-8.
    pub fn expectation_density(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: rho.dim(),
                right: self.dim(),
            });
        }
        let dim = self.dim();
        let mut val = Complex64::new(0.0, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                val += rho.matrix()[[r, c]] * self.dense[[c, r]];
            }
        }
        if val.im.abs() > IMAG_RESIDUE_TOL {
            return Err(Error::Linalg(format!(
                "tr(rho H) has imaginary residue {:.3e}",
                val.im
            )));
        }
        Ok(val.re)
    }

    /// Gibbs weights `p_i ∝ e^{-β λ_i}`, computed with the extremal
    /// eigenvalue shifted out so the exponentials cannot overflow.
    fn gibbs_weights(&self, beta: f64) -> Result<Array1<f64>> {
        let eig = self.eigendecomposition()?;
        let lam = &eig.eigenvalues;
        let shift = if beta >= 0.0 {
            lam[0]
        } else {
            lam[lam.len() - 1]
        };
        let mut w: Array1<f64> = lam.mapv(|l| (-beta * (l - shift)).exp());
        let z: f64 = w.sum();
        w.mapv_inplace(|x| x / z);
        Ok(w)
    }

    /// Thermal state `e^{-βH} / tr e^{-βH}`.
    ///
    /// At `β = 0` this is the maximally mixed state; large `|β|` projects
    /// onto the extremal eigenspace without overflow.
    pub fn thermal_state(&self, beta: f64) -> Result<DensityMatrix> {
        let p = self.gibbs_weights(beta)?;
        let eig = self.eigendecomposition()?;
        // ρ = V diag(p) V† = M M† with M = V diag(√p).
        let dim = self.dim();
        let mut m = eig.eigenvectors.clone();
        for (j, &pj) in p.iter().enumerate() {
            let s = Complex64::new(pj.sqrt(), 0.0);
            m.column_mut(j).mapv_inplace(|v| v * s);
        }
        let mconj = m.mapv(|v| v.conj());
        let rho = m.dot(&mconj.t());
        debug_assert_eq!(rho.nrows(), dim);
        Ok(DensityMatrix::new_unchecked(self.num_qubits, rho))
    }

    /// Energy and entropy of the thermal state at `β`, from eigenvalues only.
    pub fn thermal_energy_entropy(&self, beta: f64) -> Result<(f64, f64)> {
        let p = self.gibbs_weights(beta)?;
        let lam = &self.eigendecomposition()?.eigenvalues;
        let energy = p.iter().zip(lam.iter()).map(|(&pi, &li)| pi * li).sum();
        let entropy = crate::qcore::entropy::shannon_entropy(p.as_slice().unwrap());
        Ok((energy, entropy))
    }

    /// `ln tr e^{-βH}`, overflow-guarded. For traceless operators this is at
    /// least `N ln 2` by convexity.
    pub fn log_partition_function(&self, beta: f64) -> Result<f64> {
        let eig = self.eigendecomposition()?;
        let lam = &eig.eigenvalues;
        let shift = if beta >= 0.0 {
            lam[0]
        } else {
            lam[lam.len() - 1]
        };
        let sum: f64 = lam.iter().map(|&l| (-beta * (l - shift)).exp()).sum();
        Ok(-beta * shift + sum.ln())
    }
}
