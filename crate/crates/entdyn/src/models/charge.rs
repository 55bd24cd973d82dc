use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::PureState;
use crate::MAX_DENSE_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeCircuitSpec {
    pub num_qubits: usize,
    pub depth: usize,
    pub seed: u64,
}

/// A two-qubit gate acting on an ordered pair of sites, stored as a 4x4
/// matrix over the local basis |00⟩, |01⟩, |10⟩, |11⟩ (first site is the
/// high bit).
#[derive(Clone, Debug)]
pub struct Gate {
    pub sites: (usize, usize),
    pub matrix: Array2<Complex64>,
}

/// Brickwork circuit of charge-conserving two-qubit gates.
///
/// Each layer applies gates on the even bonds (0,1), (2,3), … and then on
/// the odd bonds (1,2), (3,4), …, including the wrap bond (N−1, 0) when N
/// is even. Every gate is block-diagonal in the local charge basis:
/// a random phase on |00⟩, a Haar-random U(2) on span{|01⟩, |10⟩}, and a
/// random phase on |11⟩, so the realized unitary commutes with the total
/// charge Σ_j σ^z_j.
#[derive(Clone, Debug)]
pub struct ChargeCircuit {
    pub spec: ChargeCircuitSpec,
    pub layers: Vec<Vec<Gate>>,
}

/// Haar-random 2x2 unitary: QR of a complex Ginibre matrix with the
/// positive-diagonal-R convention.
fn haar_u2(rng: &mut impl Rng) -> [[Complex64; 2]; 2] {
    let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
    for row in &mut g {
        for v in row.iter_mut() {
            *v = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    // Gram-Schmidt on the columns; normalization factors are positive reals,
    // which is exactly the convention that makes Q Haar-distributed.
    let n0 = (g[0][0].norm_sqr() + g[1][0].norm_sqr()).sqrt();
    let q00 = g[0][0] / n0;
    let q10 = g[1][0] / n0;
    let proj = q00.conj() * g[0][1] + q10.conj() * g[1][1];
    let r0 = g[0][1] - proj * q00;
    let r1 = g[1][1] - proj * q10;
    let n1 = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
    [[q00, r0 / n1], [q10, r1 / n1]]
}

/// Draws one charge-conserving gate: diag(e^{iφ}) ⊕ Haar-U(2) ⊕ diag(e^{iχ}).
pub fn charge_gate(rng: &mut impl Rng) -> Array2<Complex64> {
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let chi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let u = haar_u2(rng);
    let mut m = Array2::zeros((4, 4));
    m[[0, 0]] = Complex64::from_polar(1.0, phi);
    m[[1, 1]] = u[0][0];
    m[[1, 2]] = u[0][1];
    m[[2, 1]] = u[1][0];
    m[[2, 2]] = u[1][1];
    m[[3, 3]] = Complex64::from_polar(1.0, chi);
    m
}

impl ChargeCircuit {
    /// Builds the brickwork circuit described by `spec`; depth 0 yields the
    /// identity circuit.
    pub fn build(spec: ChargeCircuitSpec) -> Result<Self> {
        let n = spec.num_qubits;
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "charge circuit needs at least 2 qubits, got {n}"
            )));
        }
        if n > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                requested: n,
                max: MAX_DENSE_QUBITS,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut layers = Vec::with_capacity(spec.depth);
        for _ in 0..spec.depth {
            let mut layer = Vec::new();
            let mut a = 0;
            while a + 1 < n {
                layer.push(Gate {
                    sites: (a, a + 1),
                    matrix: charge_gate(&mut rng),
                });
                a += 2;
            }
            let mut a = 1;
            while a + 1 < n {
                layer.push(Gate {
                    sites: (a, a + 1),
                    matrix: charge_gate(&mut rng),
                });
                a += 2;
            }
            if n % 2 == 0 && n >= 4 {
                layer.push(Gate {
                    sites: (n - 1, 0),
                    matrix: charge_gate(&mut rng),
                });
            }
            layers.push(layer);
        }
        Ok(Self { spec, layers })
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Applies layer `index` to a state.
    pub fn apply_layer(&self, state: &PureState, index: usize) -> Result<PureState> {
        let layer = self.layers.get(index).ok_or(Error::InvalidArgument(format!(
            "layer {index} out of range ({} layers)",
            self.layers.len()
        )))?;
        let mut out = state.clone();
        for gate in layer {
            apply_two_qubit_gate(&mut out, gate.sites.0, gate.sites.1, &gate.matrix)?;
        }
        Ok(out)
    }

    /// Applies the whole circuit.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        let mut out = state.clone();
        for i in 0..self.layers.len() {
            out = self.apply_layer(&out, i)?;
        }
        Ok(out)
    }

    /// Dense realization of the circuit's unitary, column by column.
    pub fn unitary(&self) -> Result<Array2<Complex64>> {
        let dim = 1usize << self.spec.num_qubits;
        let mut u = Array2::zeros((dim, dim));
        for col in 0..dim {
            let basis = PureState::computational_basis(self.spec.num_qubits, col)?;
            let out = self.apply(&basis)?;
            for (row, amp) in out.amplitudes().iter().enumerate() {
                u[[row, col]] = *amp;
            }
        }
        Ok(u)
    }
}

/// Applies a 4x4 gate to sites `(a, b)` of a state in place.
pub fn apply_two_qubit_gate(
    state: &mut PureState,
    a: usize,
    b: usize,
    gate: &Array2<Complex64>,
) -> Result<()> {
    let n = state.num_qubits();
    if a == b {
        return Err(Error::InvalidArgument("gate sites must differ".into()));
    }
    if a >= n || b >= n {
        return Err(Error::SiteOutOfRange {
            site: a.max(b),
            num_qubits: n,
        });
    }
    if gate.nrows() != 4 || gate.ncols() != 4 {
        return Err(Error::DimensionMismatch {
            left: gate.nrows(),
            right: 4,
        });
    }
    let pa = 1usize << (n - 1 - a);
    let pb = 1usize << (n - 1 - b);
    let dim = 1usize << n;
    let amps = state.amplitudes_mut();
    for i in 0..dim {
        if i & pa != 0 || i & pb != 0 {
            continue;
        }
        let idx = [i, i | pb, i | pa, i | pa | pb];
        let old = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for r in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..4 {
                acc += gate[[r, c]] * old[c];
            }
            amps[idx[r]] = acc;
        }
    }
    Ok(())
}

/// Dense total-charge operator Σ_j σ^z_j (diagonal, entries N − 2·popcount).
pub fn total_charge_diagonal(num_qubits: usize) -> Vec<f64> {
    let dim = 1usize << num_qubits;
    (0..dim)
        .map(|i| num_qubits as f64 - 2.0 * (i as u32).count_ones() as f64)
        .collect()
}

/// Expectation of the total charge Σ_j σ^z_j in a pure state.
pub fn total_charge_expectation(state: &PureState) -> f64 {
    let z = total_charge_diagonal(state.num_qubits());
    state
        .amplitudes()
        .iter()
        .zip(&z)
        .map(|(a, zi)| a.norm_sqr() * zi)
        .sum()
}

/// Builds the circuit and returns its dense unitary.
pub fn build_charge_conserving_unitary(spec: ChargeCircuitSpec) -> Result<Array2<Complex64>> {
    ChargeCircuit::build(spec)?.unitary()
}
