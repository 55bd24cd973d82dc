//! Executes one run configuration and writes its artifacts.
//!
//! Every run produces three artifacts in the output directory: a data CSV
//! with a fixed column order, `reports.json` with the certificate reports,
//! and `summary.txt` with one line per report plus pass/fail counts. Outputs
//! are deterministic functions of (config, master_seed), independent of the
//! worker count.

use std::f64::consts::LN_2;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use entdyn::bounds::{
    charge_circuit_certificate, gap_certified_chain, lattice_chain_certificate, page_monte_carlo,
    spin_glass_certificate, state_average_certificate, syk_certificate, thermo_curves,
    ti_equilibration_certificate, AveragingScheme, CertificateReport, ChargeCertificate,
    EquilibrationCertificate, LatticeCertificate,
};
use entdyn::models::{
    build_lattice_chain, trace_moment_check, Boundary, ChargeCircuit, ChargeCircuitSpec,
    DisorderKind, LatticeChainSpec,
};
use entdyn::sampling::sample_haar_product_state;
use entdyn::{derive_seed, Result as LibResult};

use crate::config::{Experiment, RunConfig, StatePolicy, TimeGridPolicy};
use crate::error::{CliError, EXIT_CERT_FAILURE, EXIT_PASS};

/// Seed-derivation salts for run-level draws, disjoint from the replicate
/// index range `2i`/`2i+1`.
const SALT_GRID: u64 = 1 << 48;
const SALT_STATE_AVERAGE: u64 = (1 << 48) + 1;
const SALT_TASK: u64 = (1 << 48) + 2;

/// The reports of a completed run plus any typed certificate that sweep-level
/// trend fits consume.
#[derive(Debug)]
pub struct RunOutcome {
    pub experiment: &'static str,
    pub reports: Vec<CertificateReport>,
    pub equilibration: Option<EquilibrationCertificate>,
}

impl RunOutcome {
    /// Failing certificates with no statistical error attached: these are
    /// hard inequality violations and always fail the run.
    pub fn exact_failures(&self) -> usize {
        self.reports
            .iter()
            .filter(|r| r.statistical_error == 0.0 && !r.pass)
            .count()
    }

    /// Failing Monte Carlo certificates; fatal only under `--strict`.
    pub fn statistical_failures(&self) -> usize {
        self.reports
            .iter()
            .filter(|r| r.statistical_error > 0.0 && !r.pass)
            .count()
    }

    pub fn exit_code(&self, strict: bool) -> i32 {
        if self.exact_failures() > 0 || (strict && self.statistical_failures() > 0) {
            EXIT_CERT_FAILURE
        } else {
            EXIT_PASS
        }
    }
}

/// Validates `config`, runs its experiment, and writes the artifact set into
/// `out_dir` (created if missing).
pub fn run_config(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let master = config.master_seed;
    let outcome = match config.experiment.clone() {
        Experiment::Page {
            d_a,
            d_b,
            num_samples,
        } => run_page(d_a, d_b, num_samples, master, out_dir)?,
        Experiment::Lattice {
            num_qubits,
            subsystem_size,
            num_replicates,
            translationally_invariant,
            time_grid,
            state_average_states,
        } => run_lattice(
            num_qubits,
            subsystem_size,
            num_replicates,
            translationally_invariant,
            time_grid,
            state_average_states,
            master,
            out_dir,
        )?,
        Experiment::LatticeTiEquilibration {
            num_qubits,
            subsystem_size,
            num_states,
            tau,
            num_times,
        } => run_equilibration(
            num_qubits,
            subsystem_size,
            num_states,
            tau,
            num_times,
            master,
            out_dir,
        )?,
        Experiment::Charge {
            num_qubits,
            subsystem_size,
            depth,
            num_replicates,
            scheme,
        } => run_charge(
            num_qubits,
            subsystem_size,
            depth,
            num_replicates,
            scheme,
            master,
            out_dir,
        )?,
        Experiment::SpinGlass {
            num_qubits,
            subsystem_size,
            num_disorder,
            time_grid,
            initial_state,
        } => run_spin_glass(
            num_qubits,
            subsystem_size,
            num_disorder,
            time_grid,
            initial_state,
            master,
            out_dir,
        )?,
        Experiment::Syk {
            num_modes,
            block_modes,
            num_disorder,
            time_grid,
            initial_state,
        } => run_syk(
            num_modes,
            block_modes,
            num_disorder,
            time_grid,
            initial_state,
            master,
            out_dir,
        )?,
        Experiment::ThermoCurves {
            disorder,
            num_qubits,
            beta_grid,
            num_disorder,
            initial_state,
        } => run_thermo(
            disorder,
            num_qubits,
            &beta_grid,
            num_disorder,
            initial_state,
            master,
            out_dir,
        )?,
        Experiment::MomentCheck {
            num_qubits,
            k_max,
            num_samples,
        } => run_moment(num_qubits, k_max, num_samples, master, out_dir)?,
    };
    write_reports_json(&out_dir.join("reports.json"), &outcome.reports)?;
    write_summary(out_dir, config, &outcome)?;
    Ok(outcome)
}

pub(crate) fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut text = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_reports_json(path: &Path, reports: &[CertificateReport]) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(reports)
        .map_err(|e| CliError::Config(format!("report serialization: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_summary(out_dir: &Path, config: &RunConfig, outcome: &RunOutcome) -> Result<(), CliError> {
    let mut lines = Vec::with_capacity(outcome.reports.len() + 4);
    lines.push(format!("experiment: {}", outcome.experiment));
    lines.push(format!("master_seed: {}", config.master_seed));
    for report in &outcome.reports {
        lines.push(report.summary_line());
    }
    let passed = outcome.reports.iter().filter(|r| r.pass).count();
    lines.push(format!(
        "certificates: {passed}/{} pass ({} exact failures, {} statistical failures)",
        outcome.reports.len(),
        outcome.exact_failures(),
        outcome.statistical_failures(),
    ));
    lines.push(format!(
        "status: {}",
        if passed == outcome.reports.len() {
            "PASS"
        } else {
            "FAIL"
        }
    ));
    fs::write(out_dir.join("summary.txt"), lines.join("\n") + "\n")?;
    Ok(())
}

/// Collapses per-replicate reports to the worst instance of each certificate
/// name, preserving first-appearance order. "Worst" minimizes the pass
/// quantity `margin + 3·statistical_error` (tolerances agree within a name).
fn worst_by_name(reports: Vec<CertificateReport>) -> Vec<CertificateReport> {
    let key = |r: &CertificateReport| r.margin + 3.0 * r.statistical_error;
    let mut worst: Vec<CertificateReport> = Vec::new();
    for report in reports {
        match worst.iter_mut().find(|w| w.certificate == report.certificate) {
            None => worst.push(report),
            Some(w) => {
                if key(&report) < key(w) {
                    *w = report;
                }
            }
        }
    }
    worst
}

fn run_page(
    d_a: usize,
    d_b: usize,
    num_samples: usize,
    master: u64,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let check = page_monte_carlo(d_a, d_b, num_samples, derive_seed(master, SALT_TASK))?;
    write_csv(
        &out_dir.join("page.csv"),
        "d_a,d_b,num_samples,mean,standard_error,exact,z_score",
        &[format!(
            "{},{},{},{},{},{},{}",
            check.d_a,
            check.d_b,
            check.num_samples,
            check.mean,
            check.standard_error,
            check.exact,
            check.z_score
        )],
    )?;
    Ok(RunOutcome {
        experiment: "page",
        reports: vec![check.report],
        equilibration: None,
    })
}

/// Strict sub-maximality under an energy threshold: whenever the conserved
/// energy satisfies `|⟨H⟩| > 0.3√N`, the pairwise bound caps the window
/// average at `n ln 2 − (n/4N²)(0.3√N / max‖H_j‖)²`, a margin bounded away
/// from zero. Vacuously true when no replicate clears the threshold.
fn energetic_margin_report(
    certs: &[LatticeCertificate],
    num_qubits: usize,
    n: usize,
) -> CertificateReport {
    let threshold = 0.3 * (num_qubits as f64).sqrt();
    let mut worst_entropy = f64::NEG_INFINITY;
    let mut worst_norm: f64 = 0.0;
    let mut qualifying = 0usize;
    for cert in certs {
        // ⟨H⟩ is conserved along the evolution; the first checkpoint has it.
        if cert.checkpoints[0].energy.abs() <= threshold {
            continue;
        }
        qualifying += 1;
        worst_norm = worst_norm.max(cert.max_bond_norm);
        for cp in &cert.checkpoints {
            worst_entropy = worst_entropy.max(cp.mean_entropy_n);
        }
    }
    let instance = format!(
        "N={num_qubits} n={n} threshold={threshold:.4} qualifying={qualifying}/{}",
        certs.len()
    );
    if qualifying == 0 {
        return CertificateReport::new(
            "lattice-energetic-margin",
            format!("{instance} (vacuous)"),
            0.0,
            0.0,
            0.0,
            0.0,
        );
    }
    let nf = n as f64;
    let nn = num_qubits as f64;
    let guaranteed = nf * LN_2 - nf / (4.0 * nn * nn) * (threshold / worst_norm).powi(2);
    CertificateReport::new(
        "lattice-energetic-margin",
        instance,
        worst_entropy,
        guaranteed,
        1e-9,
        0.0,
    )
}

#[allow(clippy::too_many_arguments)]
fn run_lattice(
    num_qubits: usize,
    subsystem_size: usize,
    num_replicates: usize,
    translationally_invariant: bool,
    time_grid: TimeGridPolicy,
    state_average_states: Option<usize>,
    master: u64,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let grid = time_grid.build(derive_seed(master, SALT_GRID))?;
    let chain_spec = |i: u64| LatticeChainSpec {
        num_qubits,
        boundary: Boundary::Periodic,
        translationally_invariant,
        seed: derive_seed(master, 2 * i),
        norm_floor: 0.8,
        norm_ceiling: 1.2,
    };
    let certs: Vec<LatticeCertificate> = (0..num_replicates)
        .into_par_iter()
        .map(|i| -> LibResult<LatticeCertificate> {
            let chain = build_lattice_chain(&chain_spec(i as u64))?;
            let psi =
                sample_haar_product_state(num_qubits, derive_seed(master, 2 * i as u64 + 1))?;
            lattice_chain_certificate(&chain, &psi, &grid, subsystem_size)
        })
        .collect::<LibResult<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (i, cert) in certs.iter().enumerate() {
        for cp in &cert.checkpoints {
            rows.push(format!(
                "{i},{},{},{},{},{},{},{},{},{}",
                cp.time,
                cp.mean_entropy_n,
                cp.max_entropy_n,
                cp.mean_entropy_2,
                cp.epsilon_sum,
                cp.epsilon_sq_sum,
                cp.energy,
                cp.rhs_explicit,
                cp.rhs_pairwise
            ));
        }
    }
    write_csv(
        &out_dir.join("lattice.csv"),
        "replicate,time,mean_entropy_n,max_entropy_n,mean_entropy_2,epsilon_sum,epsilon_sq_sum,energy,rhs_explicit,rhs_pairwise",
        &rows,
    )?;

    let mut tagged = Vec::new();
    for (i, cert) in certs.iter().enumerate() {
        for report in &cert.reports {
            let mut report = report.clone();
            report.instance = format!("{} replicate={i}", report.instance);
            tagged.push(report);
        }
    }
    let mut reports = worst_by_name(tagged);
    reports.push(energetic_margin_report(&certs, num_qubits, subsystem_size));

    if let Some(states) = state_average_states {
        let chain = build_lattice_chain(&chain_spec(0))?;
        let cert = state_average_certificate(
            &chain,
            subsystem_size,
            states,
            &grid,
            derive_seed(master, SALT_STATE_AVERAGE),
        )?;
        let avg_rows: Vec<String> = cert
            .checkpoints
            .iter()
            .map(|cp| {
                format!(
                    "{},{},{},{}",
                    cp.time, cp.mean_window_entropy, cp.mean_rhs, cp.margin_se
                )
            })
            .collect();
        write_csv(
            &out_dir.join("state_average.csv"),
            "time,mean_window_entropy,mean_rhs,margin_se",
            &avg_rows,
        )?;
        reports.extend(cert.reports);
    }

    Ok(RunOutcome {
        experiment: "lattice",
        reports,
        equilibration: None,
    })
}

fn run_equilibration(
    num_qubits: usize,
    subsystem_size: usize,
    num_states: usize,
    tau: f64,
    num_times: usize,
    master: u64,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let (chain, _gap) = gap_certified_chain(num_qubits, derive_seed(master, 0))?;
    let cert = ti_equilibration_certificate(
        &chain,
        subsystem_size,
        num_states,
        tau,
        num_times,
        derive_seed(master, 1),
    )?;
    let rows: Vec<String> = cert
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{}",
                r.state_index,
                r.effective_dimension,
                r.ln_effective_dimension,
                r.mean_trace_distance,
                r.trace_distance_se,
                r.distance_bound,
                r.mean_entropy,
                r.entropy_se,
                r.infinite_time_entropy
            )
        })
        .collect();
    write_csv(
        &out_dir.join("equilibration.csv"),
        "state_index,effective_dimension,ln_effective_dimension,mean_trace_distance,trace_distance_se,distance_bound,mean_entropy,entropy_se,infinite_time_entropy",
        &rows,
    )?;
    Ok(RunOutcome {
        experiment: "lattice_ti_equilibration",
        reports: cert.reports.clone(),
        equilibration: Some(cert),
    })
}

fn run_charge(
    num_qubits: usize,
    subsystem_size: usize,
    depth: usize,
    num_replicates: usize,
    scheme: AveragingScheme,
    master: u64,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let certs: Vec<ChargeCertificate> = (0..num_replicates)
        .into_par_iter()
        .map(|i| -> LibResult<ChargeCertificate> {
            let circuit = ChargeCircuit::build(ChargeCircuitSpec {
                num_qubits,
                depth,
                seed: derive_seed(master, 2 * i as u64),
            })?;
            let psi =
                sample_haar_product_state(num_qubits, derive_seed(master, 2 * i as u64 + 1))?;
            charge_circuit_certificate(&circuit, &psi, subsystem_size, scheme)
        })
        .collect::<LibResult<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (i, cert) in certs.iter().enumerate() {
        for cp in &cert.checkpoints {
            rows.push(format!(
                "{i},{},{},{},{},{},{},{},{},{}",
                cp.layer,
                cp.mean_window_entropy,
                cp.max_window_entropy,
                cp.zeta_sum,
                cp.qubit_entropy_sum,
                cp.worst_qubit_margin,
                cp.total_charge,
                cp.rhs_contract,
                cp.rhs_tight
            ));
        }
    }
    write_csv(
        &out_dir.join("charge.csv"),
        "replicate,layer,mean_window_entropy,max_window_entropy,zeta_sum,qubit_entropy_sum,worst_qubit_margin,total_charge,rhs_contract,rhs_tight",
        &rows,
    )?;

    let mut tagged = Vec::new();
    for (i, cert) in certs.iter().enumerate() {
        for report in &cert.reports {
            let mut report = report.clone();
            report.instance = format!("{} replicate={i}", report.instance);
            tagged.push(report);
        }
    }
    Ok(RunOutcome {
        experiment: "charge",
        reports: worst_by_name(tagged),
        equilibration: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_spin_glass(
    num_qubits: usize,
    subsystem_size: usize,
    num_disorder: usize,
    time_grid: TimeGridPolicy,
    initial_state: StatePolicy,
    master: u64,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let grid = time_grid.build(derive_seed(master, SALT_GRID))?;
    let state = initial_state.build(num_qubits, master)?;
    let cert = spin_glass_certificate(
        num_qubits,
        subsystem_size,
        num_disorder,
        &state,
        &grid,
        derive_seed(master, SALT_TASK),
    )?;
    let rows: Vec<String> = cert
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.sample_index,
                r.seed,
                r.energy,
                r.abs_energy,
                r.max_mean_entropy,
                r.argmax_time,
                r.max_subset_entropy,
                r.restricted_energy_at_max,
                r.reconstruction_residual,
                r.energy_identity_residual
            )
        })
        .collect();
    write_csv(
        &out_dir.join("spin_glass.csv"),
        "sample_index,seed,energy,abs_energy,max_mean_entropy,argmax_time,max_subset_entropy,restricted_energy_at_max,reconstruction_residual,energy_identity_residual",
        &rows,
    )?;
    Ok(RunOutcome {
        experiment: "spin_glass",
        reports: cert.reports,
        equilibration: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_syk(
    num_modes: usize,
    block_modes: usize,
    num_disorder: usize,
    time_grid: TimeGridPolicy,
    initial_state: StatePolicy,
    master: u64,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let grid = time_grid.build(derive_seed(master, SALT_GRID))?;
    let state = initial_state.build(num_modes / 2, master)?;
    let cert = syk_certificate(
        num_modes,
        block_modes,
        num_disorder,
        &state,
        &grid,
        derive_seed(master, SALT_TASK),
    )?;
    let rows: Vec<String> = cert
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{},{}",
                r.sample_index,
                r.seed,
                r.energy,
                r.abs_energy,
                r.max_mean_entropy,
                r.argmax_time,
                r.max_block_entropy,
                r.restricted_energy_at_max
            )
        })
        .collect();
    write_csv(
        &out_dir.join("syk.csv"),
        "sample_index,seed,energy,abs_energy,max_mean_entropy,argmax_time,max_block_entropy,restricted_energy_at_max",
        &rows,
    )?;
    Ok(RunOutcome {
        experiment: "syk",
        reports: cert.reports,
        equilibration: None,
    })
}

fn run_thermo(
    disorder: DisorderKind,
    num_qubits: usize,
    beta_grid: &[f64],
    num_disorder: usize,
    initial_state: StatePolicy,
    master: u64,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let state = initial_state.build(num_qubits, master)?;
    let curves = thermo_curves(
        disorder,
        num_qubits,
        beta_grid,
        num_disorder,
        &state,
        derive_seed(master, SALT_TASK),
    )?;
    let rows: Vec<String> = curves
        .points
        .iter()
        .map(|p| {
            format!(
                "{},{},{},{},{},{}",
                p.beta,
                p.energy,
                p.energy_se,
                p.entropy,
                p.entropy_se,
                p.series_bound.map(|b| b.to_string()).unwrap_or_default()
            )
        })
        .collect();
    write_csv(
        &out_dir.join("thermo_curves.csv"),
        "beta,energy,energy_se,entropy,entropy_se,series_bound",
        &rows,
    )?;
    Ok(RunOutcome {
        experiment: "thermo_curves",
        reports: curves.reports,
        equilibration: None,
    })
}

fn run_moment(
    num_qubits: usize,
    k_max: usize,
    num_samples: usize,
    master: u64,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let moments = trace_moment_check(num_qubits, k_max, num_samples, derive_seed(master, SALT_TASK))?;
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for m in &moments {
        let instance = format!("N={num_qubits} k={} samples={num_samples}", m.k);
        reports.push(CertificateReport::new(
            "moment-upper",
            instance.clone(),
            m.moment_estimate,
            m.double_factorial_bound,
            0.0,
            m.moment_se,
        ));
        // The mean slack is pointwise non-negative by Cauchy–Schwarz, so this
        // comparison is exact, not statistical.
        reports.push(CertificateReport::new(
            "moment-rms-am",
            instance.clone(),
            m.squared_trace_estimate,
            m.moment_estimate,
            1e-12,
            0.0,
        ));
        if m.k == 1 {
            reports.push(CertificateReport::new(
                "moment-k1-anchor",
                instance.clone(),
                (m.moment_estimate - 1.0).abs(),
                0.0,
                0.0,
                m.moment_se,
            ));
        }
        rows.push(format!(
            "{},{},{},{},{},{},{}",
            m.k,
            m.double_factorial_bound,
            m.moment_estimate,
            m.moment_se,
            m.squared_trace_estimate,
            m.squared_trace_se,
            m.rms_am_slack_mean
        ));
    }
    write_csv(
        &out_dir.join("moments.csv"),
        "k,double_factorial_bound,moment_estimate,moment_se,squared_trace_estimate,squared_trace_se,rms_am_slack_mean",
        &rows,
    )?;
    Ok(RunOutcome {
        experiment: "moment_check",
        reports,
        equilibration: None,
    })
}
