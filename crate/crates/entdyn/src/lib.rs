//! Exact-diagonalization toolkit for studying entanglement dynamics of small
//! quantum many-body systems.
//!
//! The crate builds Hamiltonian ensembles (random nearest-neighbor chains,
//! all-to-all two-body spin glasses, four-body Majorana models, and
//! charge-conserving brickwork circuits), evolves product states exactly in
//! the energy eigenbasis, and evaluates *certificates*: machine-checked
//! comparisons of measured subsystem entropies against explicit finite-size
//! entropy bounds, with tolerances and statistical errors recorded.
//!
//! # Index convention
//!
//! A register of `N` qubits is labeled by sites `0..N`. Basis states are
//! indexed so that **site 0 is the most significant bit** of the basis index:
//! basis index `i` assigns to site `j` the bit `(i >> (N - 1 - j)) & 1`.
//! Every module shares this convention; partial traces, operator embeddings,
//! and circuit gates all rely on it.
//!
//! Entropies are natural-log (nats) throughout; the maximal entropy of an
//! `n`-qubit subsystem is `n ln 2`.

use blas_src as _;
use openblas_src as _;

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod models;
pub mod qcore;
pub mod sampling;

pub use error::{Error, Result};

/// Largest register size for which dense matrices are built.
///
/// A `2^13`-dimensional Hermitian matrix (8192²complex entries, 1 GiB) is the
/// practical ceiling for dense eigendecomposition on a desktop; constructors
/// refuse larger registers instead of swapping.
pub const MAX_DENSE_QUBITS: usize = 13;

/// Splits a master seed into independent per-task seeds.
///
/// Uses the SplitMix64 finalizer on `master ^ index`, so distinct task
/// indices give statistically independent streams and the mapping is stable
/// across runs and worker counts.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
