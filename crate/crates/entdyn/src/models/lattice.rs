use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{HermitianOperator, Pauli, PauliString};
use crate::MAX_DENSE_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Specification of a random nearest-neighbor chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeChainSpec {
    pub num_qubits: usize,
    pub boundary: Boundary,
    /// When set, all bonds are translates of one sampled term.
    pub translationally_invariant: bool,
    pub seed: u64,
    /// Per-bond operator-norm targets; each bond's norm is drawn uniformly
    /// from this interval.
    pub norm_floor: f64,
    pub norm_ceiling: f64,
}

/// One nearest-neighbor bond: a traceless two-qubit operator on
/// `(left_site, right_site)`.
#[derive(Clone, Debug)]
pub struct BondTerm {
    pub left_site: usize,
    pub right_site: usize,
    /// Local two-qubit realization (local site 0 = `left_site`).
    pub local: HermitianOperator,
}

/// A built chain: the global Hamiltonian plus its per-bond terms.
#[derive(Clone, Debug)]
pub struct LatticeChain {
    pub spec: LatticeChainSpec,
    pub bonds: Vec<BondTerm>,
    pub hamiltonian: HermitianOperator,
}

impl LatticeChain {
    pub fn num_qubits(&self) -> usize {
        self.spec.num_qubits
    }

    /// Largest bond operator norm, the constant in the energy-sum bound.
    pub fn max_bond_norm(&self) -> Result<f64> {
        let mut best = 0.0f64;
        for b in &self.bonds {
            best = best.max(b.local.operator_norm()?);
        }
        Ok(best)
    }
}

/// The 12-element bond basis: 9 two-site products plus the 3 single-site
/// Paulis on the *right* qubit.
///
/// Single-site terms on the left qubit are excluded so that, for any fixed
/// state of the left qubit, the Haar average over the right qubit of the bond
/// expectation vanishes — the martingale structure that makes product-state
/// energies spread as `√N`. (Left-qubit singles can always be absorbed into
/// the previous bond, so this loses no generality.)
fn bond_basis() -> Vec<PauliString> {
    let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut basis = Vec::with_capacity(12);
    for a in paulis {
        for b in paulis {
            basis.push(PauliString::new(1.0, [(0, a), (1, b)]));
        }
    }
    for b in paulis {
        basis.push(PauliString::new(1.0, [(1, b)]));
    }
    basis
}

const MAX_BOND_RETRIES: usize = 64;

/// Draws one traceless bond term with operator norm `target_norm`.
fn sample_bond(rng: &mut impl Rng, target_norm: f64) -> Result<HermitianOperator> {
    let basis = bond_basis();
    for _ in 0..MAX_BOND_RETRIES {
        let coeffs: Vec<f64> = (0..basis.len()).map(|_| rng.sample(StandardNormal)).collect();
        let terms: Vec<PauliString> = basis
            .iter()
            .zip(&coeffs)
            .map(|(b, &c)| PauliString {
                coefficient: c,
                factors: b.factors.clone(),
            })
            .collect();
        let raw = HermitianOperator::from_terms(2, terms)?;
        let norm = raw.operator_norm()?;
        if norm > 1e-12 {
            return raw.scaled(target_norm / norm);
        }
    }
    Err(Error::ResamplingExhausted {
        attempts: MAX_BOND_RETRIES,
    })
}

/// Builds a random nearest-neighbor chain from its spec.
///
/// Periodic chains have `N` bonds `(j, j+1 mod N)`; open chains have `N-1`.
/// Every bond is traceless with operator norm in
/// `[norm_floor, norm_ceiling]`, and contains no term acting only on its left
/// qubit. Identical specs (including the seed) rebuild the same operator
/// bit-for-bit.
pub fn build_lattice_chain(spec: &LatticeChainSpec) -> Result<LatticeChain> {
    let n = spec.num_qubits;
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "chain needs at least 3 qubits, got {n}"
        )));
    }
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n,
            max: MAX_DENSE_QUBITS,
        });
    }
    if !(spec.norm_floor > 0.0 && spec.norm_floor <= spec.norm_ceiling) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < norm_floor <= norm_ceiling, got [{}, {}]",
            spec.norm_floor, spec.norm_ceiling
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let num_bonds = match spec.boundary {
        Boundary::Periodic => n,
        Boundary::Open => n - 1,
    };

    let mut bonds = Vec::with_capacity(num_bonds);
    if spec.translationally_invariant {
        let target = rng.gen_range(spec.norm_floor..=spec.norm_ceiling);
        let local = sample_bond(&mut rng, target)?;
        for j in 0..num_bonds {
            bonds.push(BondTerm {
                left_site: j,
                right_site: (j + 1) % n,
                local: local.clone(),
            });
        }
    } else {
        for j in 0..num_bonds {
            let target = rng.gen_range(spec.norm_floor..=spec.norm_ceiling);
            let local = sample_bond(&mut rng, target)?;
            bonds.push(BondTerm {
                left_site: j,
                right_site: (j + 1) % n,
                local,
            });
        }
    }

    let mut global_terms = Vec::new();
    for b in &bonds {
        for t in b.local.terms() {
            global_terms.push(t.relabeled(|s| if s == 0 { b.left_site } else { b.right_site }));
        }
    }
    let hamiltonian = HermitianOperator::from_terms(n, global_terms)?;
    Ok(LatticeChain {
        spec: spec.clone(),
        bonds,
        hamiltonian,
    })
}
