use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of the non-degenerate-gap check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub ok: bool,
    /// Smallest spacing found between distinct entries of the sorted
    /// difference multiset (a zero level gap reports twice its size).
    pub worst_collision: f64,
    pub tol: f64,
    pub num_levels: usize,
}

/// Checks that all pairwise eigenvalue differences `E_j - E_k` (`j ≠ k`) are
/// distinct to within `tol`.
///
/// The full ordered multiset is the positive differences together with their
/// negatives, so it suffices to scan the sorted positive differences: two
/// positive entries collide if adjacent spacing is below `tol`, and a
/// difference collides with its own negation only near zero, where the
/// smallest positive entry `g` sits at distance `2g` from `-g`. A spectrum
/// with an exactly degenerate level therefore fails (its zero gap repeats).
///
/// `eigenvalues` must be sorted ascending. Refuses spectra larger than
/// `2^13` levels, where the difference multiset no longer fits in memory
/// comfortably.
pub fn check_nondegenerate_gaps(eigenvalues: &[f64], tol: f64) -> Result<GapReport> {
    let d = eigenvalues.len();
    if d > 1 << 13 {
        return Err(Error::TooManyQubits {
            requested: d.trailing_zeros() as usize,
            max: 13,
        });
    }
    if d < 2 {
        return Ok(GapReport {
            ok: true,
            worst_collision: f64::INFINITY,
            tol,
            num_levels: d,
        });
    }
    if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "eigenvalues must be sorted ascending".into(),
        ));
    }
    let mut gaps = Vec::with_capacity(d * (d - 1) / 2);
    for j in 1..d {
        for k in 0..j {
            gaps.push(eigenvalues[j] - eigenvalues[k]);
        }
    }
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut worst = 2.0 * gaps[0]; // distance between the smallest gap and its negation
    for w in gaps.windows(2) {
        worst = worst.min(w[1] - w[0]);
    }
    Ok(GapReport {
        ok: worst > tol,
        worst_collision: worst,
        tol,
        num_levels: d,
    })
}
