//! Acceptance suite: one test per criterion, each printing a single
//! `ACCEPTANCE <id> <label>: PASS|FAIL` line.
//!
//! Run `cargo test --test acceptance -- --nocapture` to see every line
//! (the default harness shows them only for failing tests).

use std::fs;
use std::path::Path;
use std::process::Command;

use entdyn::bounds::{
    entropy_property_suite, page_monte_carlo, random_pair_sweep, schur_extremal_sweep,
    spin_glass_certificate, syk_certificate, thermo_curves, CertificateReport,
};
use entdyn::dynamics::TimeGrid;
use entdyn::models::{trace_moment_check, DisorderKind};
use entdyn::qcore::PureState;
use entdyn::{derive_seed, Result as LibResult};

use entdyn_cli::config::{Experiment, RunConfig, StatePolicy, TimeGridPolicy, SCHEMA_VERSION};
use entdyn_cli::runner::run_config;
use entdyn_cli::sweep::run_sweep;

fn conclude(id: &str, label: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {id} {label}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{id} {label} failed:\n{detail}");
}

fn failing(reports: &[CertificateReport]) -> String {
    reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.summary_line())
        .collect::<Vec<_>>()
        .join("\n")
}

fn config(experiment: Experiment, master_seed: u64) -> RunConfig {
    RunConfig {
        schema_version: SCHEMA_VERSION,
        master_seed,
        output_dir: None,
        experiment,
    }
}

#[test]
fn c01_page_formula() {
    let cases: [(usize, usize, Option<f64>); 3] = [
        (2, 2, Some(1.0 / 3.0)),
        (2, 4, Some(0.509_524)),
        (4, 16, None),
    ];
    let mut reports = Vec::new();
    let mut detail = String::new();
    for (i, &(d_a, d_b, pinned)) in cases.iter().enumerate() {
        let check = page_monte_carlo(d_a, d_b, 100_000, derive_seed(101, i as u64)).unwrap();
        if let Some(value) = pinned {
            if (check.exact - value).abs() > 5e-7 {
                detail.push_str(&format!(
                    "closed form for ({d_a},{d_b}) is {} but expected {value}\n",
                    check.exact
                ));
            }
        }
        reports.push(check.report);
    }
    let pass = detail.is_empty() && reports.iter().all(|r| r.pass);
    detail.push_str(&failing(&reports));
    conclude("c01", "page-formula-monte-carlo", pass, &detail);
}

#[test]
fn c02_pair_bound_sweeps() {
    let extremal = schur_extremal_sweep(1e-3).unwrap();
    let random = random_pair_sweep(10_000, 202).unwrap();
    let reports = [extremal, random];
    let pass = reports.iter().all(|r| r.pass && r.tolerance <= 1e-9);
    conclude("c02", "pair-entropy-energy-sweeps", pass, &failing(&reports));
}

/// Runs the chain certificate over every (N, n) combination of a criterion
/// and returns the aggregated reports plus the total number of replicates
/// whose conserved energy cleared the `0.3√N` threshold.
fn lattice_grid(master: u64) -> (Vec<CertificateReport>, usize) {
    let mut all = Vec::new();
    let mut qualifying = 0usize;
    for (idx, &(num_qubits, n)) in [(6, 2), (6, 3), (8, 2), (8, 3), (10, 2), (10, 3)]
        .iter()
        .enumerate()
    {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(
            Experiment::Lattice {
                num_qubits,
                subsystem_size: n,
                num_replicates: 20,
                translationally_invariant: false,
                time_grid: TimeGridPolicy::Linear {
                    t_max: 20.0,
                    count: 50,
                },
                state_average_states: None,
            },
            derive_seed(master, idx as u64),
        );
        let outcome = run_config(&cfg, dir.path()).unwrap();
        for report in &outcome.reports {
            if report.certificate == "lattice-energetic-margin" {
                if let Some(tail) = report.instance.split("qualifying=").nth(1) {
                    if let Some(count) = tail.split('/').next() {
                        qualifying += count.parse::<usize>().unwrap_or(0);
                    }
                }
            }
        }
        all.extend(outcome.reports);
    }
    (all, qualifying)
}

#[test]
fn c03_lattice_inequality_chain() {
    let (reports, qualifying) = lattice_grid(303);
    let mut pass = reports.iter().all(|r| r.pass);
    let mut detail = failing(&reports);
    // The strict-margin clause must not be vacuous across 120 replicates.
    if qualifying == 0 {
        pass = false;
        detail.push_str("\nno replicate cleared the 0.3√N energy threshold");
    }
    conclude("c03", "lattice-chain-every-time-point", pass, &detail);
}

#[test]
fn c04_charge_circuits() {
    let mut all = Vec::new();
    for (idx, &(num_qubits, n)) in [(6, 2), (6, 3), (8, 2), (8, 3), (10, 2), (10, 3)]
        .iter()
        .enumerate()
    {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(
            Experiment::Charge {
                num_qubits,
                subsystem_size: n,
                depth: 20,
                num_replicates: 20,
                scheme: entdyn::bounds::AveragingScheme::Contiguous,
            },
            derive_seed(404, idx as u64),
        );
        let outcome = run_config(&cfg, dir.path()).unwrap();
        all.extend(outcome.reports);
    }
    let conservation_ok = all
        .iter()
        .any(|r| r.certificate == "charge-conservation" && r.tolerance <= 1e-9);
    let pass = all.iter().all(|r| r.pass) && conservation_ok;
    let mut detail = failing(&all);
    if !conservation_ok {
        detail.push_str("\nno per-layer charge-conservation report at 1e-9");
    }
    conclude("c04", "charge-circuit-chain-depth-20", pass, &detail);
}

#[test]
fn c05_equilibration_sweep() {
    let config_dir = tempfile::tempdir().unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    for &num_qubits in &[6usize, 8, 10] {
        let cfg = config(
            Experiment::LatticeTiEquilibration {
                num_qubits,
                subsystem_size: 2,
                num_states: 30,
                tau: 1.0e5,
                num_times: 60,
            },
            505,
        );
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        fs::write(
            config_dir.path().join(format!("n{num_qubits:02}.json")),
            text,
        )
        .unwrap();
    }
    let outcome = run_sweep(config_dir.path(), out_dir.path(), None).unwrap();
    let mut reports: Vec<CertificateReport> = Vec::new();
    for (_, run) in &outcome.per_run {
        reports.extend(run.reports.iter().cloned());
    }
    reports.extend(outcome.trend_reports.iter().cloned());
    // (a) time-averaged distance bound, (b) eigenstate purity bound,
    // (c) ln D^eff growth, (d) monotone deficit — all must be present.
    let mut detail = failing(&reports);
    let mut pass = reports.iter().all(|r| r.pass);
    for required in [
        "eq-trace-distance",
        "eq-average-purity",
        "sweep-ln-deff-vs-n",
        "sweep-deficit-monotone",
        "sweep-deficit-vs-inverse-n",
    ] {
        if !reports.iter().any(|r| r.certificate == required) {
            pass = false;
            detail.push_str(&format!("\nmissing report {required}"));
        }
    }
    conclude("c05", "ti-equilibration-n-sweep", pass, &detail);
}

#[test]
fn c06_spin_glass_certificates() {
    let state = PureState::computational_basis(6, 0).unwrap();
    let grid = TimeGrid::linear(30.0, 30).unwrap();
    let cert = spin_glass_certificate(6, 2, 200, &state, &grid, 606).unwrap();
    let mut reports = cert.reports.clone();

    // The half-normal closed form for the all-zeros state: √(2/(9π)).
    let closed_form = (2.0 / (9.0 * std::f64::consts::PI)).sqrt();
    let mut detail = String::new();
    if (cert.hypothesis_reference - closed_form).abs() > 1e-12 {
        detail.push_str(&format!(
            "hypothesis reference {} differs from closed form {closed_form}\n",
            cert.hypothesis_reference
        ));
    }

    let beta_grid: Vec<f64> = (-5..=5).map(|i| 0.05 * i as f64).collect();
    let curves = thermo_curves(DisorderKind::SpinGlass, 6, &beta_grid, 150, &state, 616).unwrap();
    reports.extend(curves.reports.iter().cloned());
    for required in [
        "sg-hypothesis",
        "sg-reconstruction",
        "sg-ceiling-margin",
        "thermo-energy-zero",
        "thermo-energy-monotone",
        "thermo-series-band",
    ] {
        if !reports.iter().any(|r| r.certificate == required) {
            detail.push_str(&format!("missing report {required}\n"));
        }
    }
    let pass = detail.is_empty() && reports.iter().all(|r| r.pass);
    detail.push_str(&failing(&reports));
    conclude("c06", "spin-glass-disorder-suite", pass, &detail);
}

#[test]
fn c07_syk_certificates() {
    let state = PureState::computational_basis(6, 0).unwrap();
    let grid = TimeGrid::linear(30.0, 30).unwrap();
    let cert = syk_certificate(12, 4, 100, &state, &grid, 707).unwrap();
    let mut detail = String::new();
    if cert.anticommutation_residual > 1e-10 {
        detail.push_str(&format!(
            "anticommutation residual {} above 1e-10\n",
            cert.anticommutation_residual
        ));
    }
    for required in ["syk-anticommutation", "syk-entropy-ceiling", "syk-hypothesis", "syk-engf-fraction"] {
        if !cert.reports.iter().any(|r| r.certificate == required) {
            detail.push_str(&format!("missing report {required}\n"));
        }
    }
    // The monomial-fraction report must echo the measured fraction.
    if !(cert.strong_fraction.is_finite() && cert.strong_fraction >= 0.0) {
        detail.push_str("strong_fraction not reported\n");
    }
    let pass = detail.is_empty() && cert.reports.iter().all(|r| r.pass);
    detail.push_str(&failing(&cert.reports));
    conclude("c07", "syk-majorana-block-suite", pass, &detail);
}

#[test]
fn c08_trace_moment_bounds() {
    let mut detail = String::new();
    for (idx, &num_qubits) in [4usize, 6].iter().enumerate() {
        let rows = trace_moment_check(num_qubits, 2, 1_000, derive_seed(808, idx as u64)).unwrap();
        for row in &rows {
            if !row.pass_moment_bound {
                detail.push_str(&format!(
                    "N={num_qubits} k={}: moment {} exceeds bound {} beyond 3σ\n",
                    row.k, row.moment_estimate, row.double_factorial_bound
                ));
            }
            if !row.pass_rms_am {
                detail.push_str(&format!(
                    "N={num_qubits} k={}: squared trace {} exceeds moment {}\n",
                    row.k, row.squared_trace_estimate, row.moment_estimate
                ));
            }
            if row.k == 1 && (row.moment_estimate - 1.0).abs() > 3.0 * row.moment_se {
                detail.push_str(&format!(
                    "N={num_qubits}: k=1 moment {} not within 3σ of 1\n",
                    row.moment_estimate
                ));
            }
        }
    }
    conclude("c08", "normalized-trace-moments", detail.is_empty(), &detail);
}

#[test]
fn c09_entropy_property_suites() {
    let reports = entropy_property_suite(1_000, 909).unwrap();
    let pass = reports.len() == 6 && reports.iter().all(|r| r.pass && r.tolerance <= 1e-7);
    conclude("c09", "entropy-property-suites", pass, &failing(&reports));
}

fn run_binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_entdyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn c10_determinism_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        Experiment::SpinGlass {
            num_qubits: 5,
            subsystem_size: 2,
            num_disorder: 10,
            time_grid: TimeGridPolicy::Linear {
                t_max: 10.0,
                count: 20,
            },
            initial_state: StatePolicy::AllZeros,
        },
        1010,
    );
    let cfg_path = dir.path().join("run.json");
    fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let cfg_arg = cfg_path.to_str().unwrap();

    let outs: Vec<_> = ["j1", "j4", "j4b"]
        .iter()
        .zip(["1", "4", "4"])
        .map(|(name, jobs)| {
            let out = dir.path().join(name);
            let result = run_binary(&[
                "run",
                cfg_arg,
                "--out",
                out.to_str().unwrap(),
                "--jobs",
                jobs,
            ]);
            (out, result)
        })
        .collect();

    let mut detail = String::new();
    for (out, result) in &outs {
        if result.status.code() != Some(0) {
            detail.push_str(&format!(
                "{}: exit {:?}, stderr: {}\n",
                out.display(),
                result.status.code(),
                String::from_utf8_lossy(&result.stderr)
            ));
        }
    }
    if detail.is_empty() {
        let baseline: Vec<String> = ["reports.json", "spin_glass.csv", "summary.txt"]
            .iter()
            .map(|name| read(&outs[0].0.join(name)))
            .collect();
        for (out, _) in &outs[1..] {
            for (name, expected) in ["reports.json", "spin_glass.csv", "summary.txt"]
                .iter()
                .zip(&baseline)
            {
                if &read(&out.join(name)) != expected {
                    detail.push_str(&format!("{} differs in {}\n", out.display(), name));
                }
            }
        }
    }
    conclude("c10", "byte-identical-artifacts", detail.is_empty(), &detail);
}

/// Keeps the library and CLI seed plumbing honest: the same experiment run
/// through the library entry point and through the runner agree exactly.
#[test]
fn runner_matches_direct_library_calls() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        Experiment::SpinGlass {
            num_qubits: 4,
            subsystem_size: 2,
            num_disorder: 5,
            time_grid: TimeGridPolicy::Linear {
                t_max: 8.0,
                count: 20,
            },
            initial_state: StatePolicy::AllZeros,
        },
        77,
    );
    let outcome = run_config(&cfg, dir.path()).unwrap();

    let direct: LibResult<_> = (|| {
        let state = PureState::computational_basis(4, 0)?;
        let grid = TimeGrid::linear(8.0, 20)?;
        spin_glass_certificate(4, 2, 5, &state, &grid, derive_seed(77, (1 << 48) + 2))
    })();
    let direct = direct.unwrap();
    let cli_json = serde_json::to_string(&outcome.reports).unwrap();
    let lib_json = serde_json::to_string(&direct.reports).unwrap();
    assert_eq!(cli_json, lib_json);
}
