use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-qubit Pauli operator (identity is represented by absence).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Dense 2x2 matrix of this Pauli.
    pub fn matrix(self) -> Array2<Complex64> {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::X => Array2::from_shape_vec((2, 2), vec![z, one, one, z]).unwrap(),
            Pauli::Y => Array2::from_shape_vec((2, 2), vec![z, -i, i, z]).unwrap(),
            Pauli::Z => Array2::from_shape_vec((2, 2), vec![one, z, z, -one]).unwrap(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pauli::X => write!(f, "X"),
            Pauli::Y => write!(f, "Y"),
            Pauli::Z => write!(f, "Z"),
        }
    }
}

/// Weighted tensor product of single-site Pauli operators.
///
/// Sites absent from `factors` carry the identity, so an empty map is the
/// (scaled) identity operator. The coefficient is real; Hermiticity of the
/// dense realization is automatic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub coefficient: f64,
    pub factors: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn new(coefficient: f64, factors: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        Self {
            coefficient,
            factors: factors.into_iter().collect(),
        }
    }

    /// The identity string with the given coefficient.
    pub fn identity(coefficient: f64) -> Self {
        Self {
            coefficient,
            factors: BTreeMap::new(),
        }
    }

    /// True when no site carries a non-identity factor.
    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Largest site index touched, if any.
    pub fn max_site(&self) -> Option<usize> {
        self.factors.keys().next_back().copied()
    }

    /// Relabels sites through `map` (old site -> new site).
    pub fn relabeled(&self, map: impl Fn(usize) -> usize) -> Self {
        Self {
            coefficient: self.coefficient,
            factors: self.factors.iter().map(|(&s, &p)| (map(s), p)).collect(),
        }
    }

    /// Adds this string, times `scale`, into a dense `2^n x 2^n` matrix.
    ///
    /// Site 0 is the most significant bit of the basis index. Each string is
    /// a (signed) permutation-with-phase of the basis, so accumulation costs
    /// `O(2^n)` per string rather than a Kronecker build.
    pub fn accumulate_dense(
        &self,
        dense: &mut Array2<Complex64>,
        num_qubits: usize,
        scale: f64,
    ) -> Result<()> {
        let dim = 1usize << num_qubits;
        if dense.nrows() != dim || dense.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: dense.nrows(),
                right: dim,
            });
        }
        if let Some(site) = self.max_site() {
            if site >= num_qubits {
                return Err(Error::SiteOutOfRange {
                    site,
                    num_qubits,
                });
            }
        }
        // Column j maps to row j ^ flip_mask, with a per-column phase from the
        // Y/Z factors. X flips a bit; Y flips with phase ±i; Z adds sign.
        let mut flip_mask = 0usize;
        for (&site, &p) in &self.factors {
            if matches!(p, Pauli::X | Pauli::Y) {
                flip_mask |= 1 << (num_qubits - 1 - site);
            }
        }
        let amp = Complex64::new(self.coefficient * scale, 0.0);
        for col in 0..dim {
            let mut phase = Complex64::new(1.0, 0.0);
            for (&site, &p) in &self.factors {
                let bit = (col >> (num_qubits - 1 - site)) & 1;
                match p {
                    Pauli::X => {}
                    // Y = [[0, -i], [i, 0]]: column 0 -> i|1>, column 1 -> -i|0>.
                    Pauli::Y => {
                        phase *= if bit == 0 {
                            Complex64::new(0.0, 1.0)
                        } else {
                            Complex64::new(0.0, -1.0)
                        }
                    }
                    Pauli::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                }
            }
            let row = col ^ flip_mask;
            dense[[row, col]] += amp * phase;
        }
        Ok(())
    }

    /// Dense realization on `num_qubits` qubits.
    pub fn to_dense(&self, num_qubits: usize) -> Result<Array2<Complex64>> {
        let dim = 1usize << num_qubits;
        let mut dense = Array2::zeros((dim, dim));
        self.accumulate_dense(&mut dense, num_qubits, 1.0)?;
        Ok(dense)
    }
}

/// Product of two single-site Paulis: returns (phase, result).
///
/// `None` in the result slot means identity. Phases follow σ^aσ^b = δ_{ab}I +
/// iε_{abc}σ^c.
pub fn pauli_site_product(a: Pauli, b: Pauli) -> (Complex64, Option<Pauli>) {
    use Pauli::*;
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    match (a, b) {
        (X, X) | (Y, Y) | (Z, Z) => (one, None),
        (X, Y) => (i, Some(Z)),
        (Y, X) => (-i, Some(Z)),
        (Y, Z) => (i, Some(X)),
        (Z, Y) => (-i, Some(X)),
        (Z, X) => (i, Some(Y)),
        (X, Z) => (-i, Some(Y)),
    }
}

/// Product of two Pauli strings: (overall phase, resulting factors).
///
/// The returned phase multiplies `left.coefficient * right.coefficient`; it
/// is a power of i. Sites where the factors cancel drop out of the map.
pub fn pauli_string_product(
    left: &PauliString,
    right: &PauliString,
) -> (Complex64, BTreeMap<usize, Pauli>) {
    let mut phase = Complex64::new(1.0, 0.0);
    let mut factors = left.factors.clone();
    for (&site, &rp) in &right.factors {
        match factors.remove(&site) {
            None => {
                factors.insert(site, rp);
            }
            Some(lp) => {
                let (ph, res) = pauli_site_product(lp, rp);
                phase *= ph;
                if let Some(p) = res {
                    factors.insert(site, p);
                }
            }
        }
    }
    (phase, factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dense_single_paulis_match_matrices() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let s = PauliString::new(1.0, [(0, p)]);
            assert_eq!(s.to_dense(1).unwrap(), p.matrix());
        }
    }

    #[test]
    fn site_zero_is_most_significant_bit() {
        // Z on site 0 of two qubits: diag(+1, +1, -1, -1).
        let s = PauliString::new(1.0, [(0, Pauli::Z)]);
        let d = s.to_dense(2).unwrap();
        let expected = array![
            [c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)],
            [c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)],
            [c(0., 0.), c(0., 0.), c(-1., 0.), c(0., 0.)],
            [c(0., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
        ];
        assert_eq!(d, expected);
    }

    #[test]
    fn dense_matches_kronecker_oracle() {
        // X ⊗ Y with coefficient 0.5 against an explicit Kronecker product.
        let s = PauliString::new(0.5, [(0, Pauli::X), (1, Pauli::Y)]);
        let d = s.to_dense(2).unwrap();
        let x = Pauli::X.matrix();
        let y = Pauli::Y.matrix();
        for r in 0..4 {
            for col in 0..4 {
                let expect = 0.5 * x[[r / 2, col / 2]] * y[[r % 2, col % 2]];
                assert!((d[[r, col]] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn string_product_tracks_phase() {
        let x = PauliString::new(1.0, [(0, Pauli::X)]);
        let y = PauliString::new(1.0, [(0, Pauli::Y)]);
        let (phase, factors) = pauli_string_product(&x, &y);
        assert_eq!(phase, c(0.0, 1.0));
        assert_eq!(factors.get(&0), Some(&Pauli::Z));

        // Disjoint sites: phases do not mix.
        let a = PauliString::new(1.0, [(0, Pauli::X)]);
        let b = PauliString::new(1.0, [(1, Pauli::Z)]);
        let (phase, factors) = pauli_string_product(&a, &b);
        assert_eq!(phase, c(1.0, 0.0));
        assert_eq!(factors.len(), 2);
    }

    #[test]
    fn string_product_matches_dense_product() {
        let a = PauliString::new(1.0, [(0, Pauli::Y), (1, Pauli::Z)]);
        let b = PauliString::new(1.0, [(0, Pauli::Z), (1, Pauli::Y), (2, Pauli::X)]);
        let (phase, factors) = pauli_string_product(&a, &b);
        let product = PauliString {
            coefficient: 1.0,
            factors,
        };
        let dense_expected = a.to_dense(3).unwrap().dot(&b.to_dense(3).unwrap());
        let dense_product = product.to_dense(3).unwrap().mapv(|v| v * phase);
        for (u, v) in dense_expected.iter().zip(dense_product.iter()) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn out_of_range_site_is_an_error() {
        let s = PauliString::new(1.0, [(3, Pauli::X)]);
        assert!(s.to_dense(2).is_err());
    }
}
