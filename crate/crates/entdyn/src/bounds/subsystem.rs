use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{von_neumann_entropy, MaskPlan, PureState, SubsystemMask};

/// Which family of size-`n` subsystems an average runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragingScheme {
    /// All `N` contiguous windows of the periodic chain.
    Contiguous,
    /// All `C(N, n)` subsets.
    AllSubsets,
    /// `count` evenly spaced contiguous windows; requires the covering
    /// property that every qubit lies in exactly `count·n/N` of them.
    Windows { count: usize },
}

/// The subsystem family for a scheme, in a fixed deterministic order.
pub fn subsystem_masks(
    scheme: AveragingScheme,
    n: usize,
    num_qubits: usize,
) -> Result<Vec<SubsystemMask>> {
    if n == 0 || n > num_qubits {
        return Err(Error::InvalidArgument(format!(
            "subsystem size {n} invalid for {num_qubits} qubits"
        )));
    }
    match scheme {
        AveragingScheme::Contiguous => SubsystemMask::all_windows(n, num_qubits),
        AveragingScheme::AllSubsets => SubsystemMask::all_subsets(n, num_qubits),
        AveragingScheme::Windows { count } => {
            if count == 0 || num_qubits % count != 0 {
                return Err(Error::InvalidArgument(format!(
                    "window count {count} must divide {num_qubits}"
                )));
            }
            let stride = num_qubits / count;
            let masks: Vec<SubsystemMask> = (0..count)
                .map(|w| SubsystemMask::contiguous(w * stride, n, num_qubits))
                .collect::<Result<_>>()?;
            // Covering property: each qubit in exactly count·n/N windows.
            if (count * n) % num_qubits != 0 {
                return Err(Error::InvalidArgument(format!(
                    "covering property violated: {count}·{n} not divisible by {num_qubits}"
                )));
            }
            let per_qubit = count * n / num_qubits;
            let mut membership = vec![0usize; num_qubits];
            for m in &masks {
                for &s in m.sites() {
                    membership[s] += 1;
                }
            }
            if membership.iter().any(|&c| c != per_qubit) {
                return Err(Error::InvalidArgument(format!(
                    "covering property violated: membership {membership:?}, expected {per_qubit}"
                )));
            }
            Ok(masks)
        }
    }
}

/// Mean of `S(ρ_A)` over the scheme's subsystem family.
pub fn subsystem_average_entropy(
    state: &PureState,
    n: usize,
    scheme: AveragingScheme,
) -> Result<f64> {
    let num_qubits = state.num_qubits();
    if 2 * n > num_qubits {
        return Err(Error::InvalidArgument(format!(
            "subsystem size {n} exceeds half of {num_qubits} qubits"
        )));
    }
    let masks = subsystem_masks(scheme, n, num_qubits)?;
    let mut total = 0.0;
    for mask in &masks {
        let plan = MaskPlan::new(mask, num_qubits)?;
        total += von_neumann_entropy(&state.partial_trace_with_plan(&plan)?)?;
    }
    Ok(total / masks.len() as f64)
}
