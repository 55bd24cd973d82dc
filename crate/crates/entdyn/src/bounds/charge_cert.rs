//! The window-average entropy certificate for charge-conserving circuits:
//! after every layer, the per-qubit polarization bound
//! `S(ρ_k) ≤ ln 2 − ζ_k²/2` with `ζ_k = |tr(ρ σ^z_k)|`, the subadditivity
//! reduction to single qubits, and the headline bound
//! `(1/m)Σⱼ S(ρ_{Aⱼ}) ≤ n ln 2 − (n/4N²)(Σ_k ζ_k)²` are all checked.

use serde::{Deserialize, Serialize};

use crate::bounds::report::CertificateReport;
use crate::bounds::subsystem::{subsystem_masks, AveragingScheme};
use crate::error::{Error, Result};
use crate::models::{total_charge_expectation, ChargeCircuit};
use crate::qcore::{
    von_neumann_entropy, HermitianOperator, MaskPlan, Pauli, PauliString, PureState, SubsystemMask,
};

const LN2: f64 = std::f64::consts::LN_2;

/// Polarization and entropy data after one circuit layer (layer 0 is the
/// initial state).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChargeCheckpoint {
    pub layer: usize,
    /// Mean entropy over the window family.
    pub mean_window_entropy: f64,
    pub max_window_entropy: f64,
    /// `Σ_k ζ_k` with `ζ_k = |tr(ρ σ^z_k)|`.
    pub zeta_sum: f64,
    /// `Σ_k S(ρ_k)` over single qubits.
    pub qubit_entropy_sum: f64,
    /// Smallest per-qubit slack `ln 2 − ζ_k²/2 − S(ρ_k)` at this layer.
    pub worst_qubit_margin: f64,
    pub total_charge: f64,
    /// `n ln 2 − (n/4N²)(Σζ)²`.
    pub rhs_contract: f64,
    /// `n ln 2 − (n/2N²)(Σζ)²`: the constant the subadditivity route
    /// actually yields; strictly tighter than the contract form.
    pub rhs_tight: f64,
}

/// Layer-by-layer checkpoints plus one worst-case report per inequality.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChargeCertificate {
    pub num_qubits: usize,
    pub subsystem_size: usize,
    pub num_windows: usize,
    pub checkpoints: Vec<ChargeCheckpoint>,
    pub reports: Vec<CertificateReport>,
}

/// Runs the layered circuit on `psi` and certifies the charge-conservation
/// entropy bounds after every layer, averaging windows of size `n` drawn
/// from `scheme` (which must satisfy the uniform covering property).
pub fn charge_circuit_certificate(
    circuit: &ChargeCircuit,
    psi: &PureState,
    n: usize,
    scheme: AveragingScheme,
) -> Result<ChargeCertificate> {
    let num_qubits = circuit.spec.num_qubits;
    if psi.num_qubits() != num_qubits {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: 1 << num_qubits,
        });
    }
    let masks = subsystem_masks(scheme, n, num_qubits)?;
    let window_plans: Vec<MaskPlan> = masks
        .iter()
        .map(|m| MaskPlan::new(m, num_qubits))
        .collect::<Result<Vec<_>>>()?;
    let qubit_plans: Vec<MaskPlan> = (0..num_qubits)
        .map(|k| MaskPlan::new(&SubsystemMask::new(vec![k])?, num_qubits))
        .collect::<Result<Vec<_>>>()?;
    let sigma_z = HermitianOperator::from_terms(1, vec![PauliString::new(1.0, [(0, Pauli::Z)])])?;

    let mut checkpoints = Vec::with_capacity(circuit.num_layers() + 1);
    let mut state = psi.clone();
    for layer in 0..=circuit.num_layers() {
        if layer > 0 {
            state = circuit.apply_layer(&state, layer - 1)?;
        }

        let mut mean_window_entropy = 0.0;
        let mut max_window_entropy = f64::NEG_INFINITY;
        for plan in &window_plans {
            let s = von_neumann_entropy(&state.partial_trace_with_plan(plan)?)?;
            mean_window_entropy += s;
            max_window_entropy = max_window_entropy.max(s);
        }
        mean_window_entropy /= window_plans.len() as f64;

        let mut zeta_sum = 0.0;
        let mut qubit_entropy_sum = 0.0;
        let mut worst_qubit_margin = f64::INFINITY;
        for plan in &qubit_plans {
            let rho = state.partial_trace_with_plan(plan)?;
            let s = von_neumann_entropy(&rho)?;
            let zeta = sigma_z.expectation_density(&rho)?.abs();
            zeta_sum += zeta;
            qubit_entropy_sum += s;
            worst_qubit_margin = worst_qubit_margin.min(LN2 - zeta * zeta / 2.0 - s);
        }

        let nf = n as f64;
        let big_n = num_qubits as f64;
        checkpoints.push(ChargeCheckpoint {
            layer,
            mean_window_entropy,
            max_window_entropy,
            zeta_sum,
            qubit_entropy_sum,
            worst_qubit_margin,
            total_charge: total_charge_expectation(&state),
            rhs_contract: nf * LN2 - nf / (4.0 * big_n * big_n) * zeta_sum * zeta_sum,
            rhs_tight: nf * LN2 - nf / (2.0 * big_n * big_n) * zeta_sum * zeta_sum,
        });
    }

    let instance = format!(
        "N={num_qubits} n={n} m={} depth={}",
        window_plans.len(),
        circuit.num_layers()
    );
    let worst = |f: &dyn Fn(&ChargeCheckpoint) -> (f64, f64)| -> (f64, f64) {
        checkpoints
            .iter()
            .map(f)
            .reduce(|acc, x| if x.1 - x.0 < acc.1 - acc.0 { x } else { acc })
            .expect("at least the initial layer exists")
    };
    let nf = n as f64;
    let big_n = num_qubits as f64;

    let (lhs, rhs) = worst(&|c| (0.0, c.worst_qubit_margin));
    let qubit_bound = CertificateReport::new("charge-qubit-bound", &instance, lhs, rhs, 1e-9, 0.0);
    let (lhs, rhs) = worst(&|c| (c.mean_window_entropy, nf / big_n * c.qubit_entropy_sum));
    let subadd = CertificateReport::new("charge-subadditivity", &instance, lhs, rhs, 1e-9, 0.0);
    let (lhs, rhs) = worst(&|c| (c.mean_window_entropy, c.rhs_contract));
    let headline = CertificateReport::new("charge-headline", &instance, lhs, rhs, 1e-7, 0.0);
    let (lhs, rhs) = worst(&|c| (c.mean_window_entropy, c.rhs_tight));
    let tight = CertificateReport::new("charge-headline-tight", &instance, lhs, rhs, 1e-7, 0.0);
    let initial_charge = checkpoints[0].total_charge;
    let (lhs, rhs) = worst(&|c| ((c.total_charge - initial_charge).abs(), 0.0));
    let conserved = CertificateReport::new("charge-conservation", &instance, lhs, rhs, 1e-9, 0.0);
    let (lhs, rhs) = worst(&|c| (c.max_window_entropy, nf * LN2));
    let ceiling = CertificateReport::new("charge-entropy-ceiling", &instance, lhs, rhs, 1e-8, 0.0);

    Ok(ChargeCertificate {
        num_qubits,
        subsystem_size: n,
        num_windows: window_plans.len(),
        checkpoints,
        reports: vec![qubit_bound, subadd, headline, tight, conserved, ceiling],
    })
}
