//! Multi-config sweeps: run every point, then fit the scaling trends the
//! sweep axis was declared for.
//!
//! A sweep directory holds at least three run configs of the same experiment
//! kind that differ in `num_qubits`. Each point runs into its own
//! subdirectory; the sweep layer then adds trend certificates — fitted
//! slopes with confidence intervals — on top of the per-point reports.

use std::fs;
use std::path::{Path, PathBuf};

use entdyn::bounds::{fit_line, CertificateReport, LineFit};
use entdyn::derive_seed;
use entdyn::qcore::{HermitianOperator, Pauli, PauliString};
use entdyn::sampling::{energy_statistics, EnsembleKind, EnsembleSpec};

use crate::config::{Experiment, RunConfig};
use crate::error::{CliError, EXIT_CERT_FAILURE, EXIT_PASS};
use crate::runner::{run_config, write_csv, RunOutcome};

/// Samples per sweep point for the σ^z-chain energy statistics.
const ENERGY_SWEEP_SAMPLES: usize = 2_000;
/// Seed salt for sweep-level draws, disjoint from run-level salts.
const SALT_SWEEP: u64 = (1 << 49) + 3;

/// Per-point outcomes plus the sweep-level trend reports.
#[derive(Debug)]
pub struct SweepOutcome {
    pub experiment: String,
    pub per_run: Vec<(String, RunOutcome)>,
    pub trend_reports: Vec<CertificateReport>,
}

impl SweepOutcome {
    fn all_reports(&self) -> impl Iterator<Item = &CertificateReport> {
        self.per_run
            .iter()
            .flat_map(|(_, outcome)| outcome.reports.iter())
            .chain(self.trend_reports.iter())
    }

    pub fn exact_failures(&self) -> usize {
        self.all_reports()
            .filter(|r| r.statistical_error == 0.0 && !r.pass)
            .count()
    }

    pub fn statistical_failures(&self) -> usize {
        self.all_reports()
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

/// Runs every config in `config_dir` (alphabetically) into a subdirectory of
/// `out_dir`, then fits and writes the sweep trends.
pub fn run_sweep(
    config_dir: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<SweepOutcome, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(config_dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|path| path.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    if paths.len() < 3 {
        return Err(CliError::Config(format!(
            "fewer than 3 sweep points: found {} config files in {}",
            paths.len(),
            config_dir.display()
        )));
    }

    let mut points = Vec::with_capacity(paths.len());
    for path in &paths {
        let mut config = RunConfig::from_path(path)?;
        if let Some(seed) = seed_override {
            config.master_seed = seed;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("point")
            .to_string();
        points.push((stem, config));
    }
    let kind = points[0].1.experiment.name().to_string();
    for (stem, config) in &points {
        if config.experiment.name() != kind {
            return Err(CliError::Config(format!(
                "sweep configs must share one experiment kind: {stem} is {}, expected {kind}",
                config.experiment.name()
            )));
        }
    }

    fs::create_dir_all(out_dir)?;
    let mut per_run = Vec::with_capacity(points.len());
    for (stem, config) in &points {
        let outcome = run_config(config, &out_dir.join(stem))?;
        per_run.push((stem.clone(), outcome));
    }

    let trend_reports = match kind.as_str() {
        "lattice_ti_equilibration" => equilibration_trends(&per_run, out_dir)?,
        "lattice" => lattice_trends(&points, out_dir)?,
        other => {
            return Err(CliError::Config(format!(
                "sweep trends are not defined for experiment '{other}'"
            )))
        }
    };

    let outcome = SweepOutcome {
        experiment: kind,
        per_run,
        trend_reports,
    };
    write_sweep_artifacts(out_dir, &outcome)?;
    Ok(outcome)
}

/// Report that a fitted slope is positive by at least three standard errors.
///
/// With the fixed pass rule `margin ≥ −(tol + 3·se)`, encoding `lhs = 6·se`
/// and `se = slope_se` makes the report pass exactly when
/// `slope ≥ 3·slope_se`; the slope and its 95% confidence interval are
/// echoed in the instance string.
fn positive_slope_report(name: &str, axis: &str, fit: &LineFit) -> CertificateReport {
    CertificateReport::new(
        name,
        fit_instance(axis, fit),
        6.0 * fit.slope_se,
        fit.slope,
        0.0,
        fit.slope_se,
    )
}

fn fit_instance(axis: &str, fit: &LineFit) -> String {
    format!(
        "{axis} slope={:.6} se={:.3e} ci95=[{:.6}, {:.6}] r2={:.4} points={}",
        fit.slope,
        fit.slope_se,
        fit.slope - 1.96 * fit.slope_se,
        fit.slope + 1.96 * fit.slope_se,
        fit.r_squared,
        fit.num_points
    )
}

fn sorted_distinct_by_n<T>(mut rows: Vec<(f64, T)>) -> Result<Vec<(f64, T)>, CliError> {
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite sweep axis"));
    if rows.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(CliError::Config(
            "sweep points must differ in num_qubits".into(),
        ));
    }
    Ok(rows)
}

/// Trends for an equilibration N-sweep: the entropy deficit fitted against
/// `1/N`, `ln D^eff` fitted against `N`, and monotone decrease of the
/// deficit across the sorted points.
fn equilibration_trends(
    per_run: &[(String, RunOutcome)],
    out_dir: &Path,
) -> Result<Vec<CertificateReport>, CliError> {
    let mut rows: Vec<(f64, (f64, f64, f64))> = Vec::with_capacity(per_run.len());
    for (stem, outcome) in per_run {
        let cert = outcome.equilibration.as_ref().ok_or_else(|| {
            CliError::Config(format!("sweep point {stem} produced no equilibration data"))
        })?;
        rows.push((
            cert.num_qubits as f64,
            (
                cert.mean_deficit,
                cert.deficit_se,
                cert.mean_ln_effective_dimension,
            ),
        ));
    }
    let rows = sorted_distinct_by_n(rows)?;

    let ns: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let inv_n: Vec<f64> = rows.iter().map(|r| 1.0 / r.0).collect();
    let deficits: Vec<f64> = rows.iter().map(|r| r.1 .0).collect();
    let ln_deff: Vec<f64> = rows.iter().map(|r| r.1 .2).collect();
    let deficit_fit = fit_line(&inv_n, &deficits)?;
    let deff_fit = fit_line(&ns, &ln_deff)?;
    let mut reports = vec![
        positive_slope_report("sweep-deficit-vs-inverse-n", "x=1/N", &deficit_fit),
        positive_slope_report("sweep-ln-deff-vs-n", "x=N", &deff_fit),
    ];

    let key = |r: &CertificateReport| r.margin + 3.0 * r.statistical_error;
    let mut worst: Option<CertificateReport> = None;
    for pair in rows.windows(2) {
        let (n0, (d0, s0, _)) = pair[0];
        let (n1, (d1, s1, _)) = pair[1];
        let report = CertificateReport::new(
            "sweep-deficit-monotone",
            format!("N={n0}→{n1}"),
            d1,
            d0,
            0.0,
            (s0 * s0 + s1 * s1).sqrt(),
        );
        if worst.as_ref().map_or(true, |w| key(&report) < key(w)) {
            worst = Some(report);
        }
    }
    reports.push(worst.expect("at least two sweep points"));

    let csv: Vec<String> = rows
        .iter()
        .map(|(n, (deficit, se, ln_deff))| format!("{n},{deficit},{se},{ln_deff}"))
        .collect();
    write_csv(
        &out_dir.join("sweep.csv"),
        "num_qubits,mean_deficit,deficit_se,mean_ln_effective_dimension",
        &csv,
    )?;
    Ok(reports)
}

/// Periodic `σ^z_j σ^z_{j+1}` chain with unit couplings; the product-state
/// energy std is exactly `√N/3`, so the fitted log-log slope targets 1/2.
fn zz_chain(num_qubits: usize) -> entdyn::Result<HermitianOperator> {
    let terms: Vec<PauliString> = (0..num_qubits)
        .map(|j| {
            PauliString::new(1.0, [(j, Pauli::Z), ((j + 1) % num_qubits, Pauli::Z)])
        })
        .collect();
    HermitianOperator::from_terms(num_qubits, terms)
}

/// Trend for a lattice N-sweep: the σ^z-chain energy std over Haar product
/// states, fitted log-log against N with target slope 1/2 ± 0.15.
fn lattice_trends(
    points: &[(String, RunConfig)],
    out_dir: &Path,
) -> Result<Vec<CertificateReport>, CliError> {
    let mut rows: Vec<(f64, (f64, f64))> = Vec::with_capacity(points.len());
    for (_, config) in points {
        let num_qubits = match &config.experiment {
            Experiment::Lattice { num_qubits, .. } => *num_qubits,
            _ => unreachable!("sweep kind checked by caller"),
        };
        let h = zz_chain(num_qubits)?;
        let ensemble = EnsembleSpec {
            kind: EnsembleKind::HaarProduct,
            num_qubits,
            seed: derive_seed(config.master_seed, SALT_SWEEP),
            num_samples: ENERGY_SWEEP_SAMPLES,
        };
        let threshold = 0.3 * (num_qubits as f64).sqrt();
        let stats = energy_statistics(&h, &ensemble, threshold)?;
        rows.push((num_qubits as f64, (stats.std, stats.fraction_above_threshold)));
    }
    let rows = sorted_distinct_by_n(rows)?;

    let ln_n: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ln_std: Vec<f64> = rows.iter().map(|r| r.1 .0.ln()).collect();
    let fit = fit_line(&ln_n, &ln_std)?;
    let report = CertificateReport::new(
        "sweep-energy-std-slope",
        format!("{} target=0.5±0.15", fit_instance("x=ln N", &fit)),
        (fit.slope - 0.5).abs(),
        0.0,
        0.15,
        fit.slope_se,
    );

    let csv: Vec<String> = rows
        .iter()
        .map(|(n, (std, fraction))| format!("{n},{std},{fraction}"))
        .collect();
    write_csv(
        &out_dir.join("sweep.csv"),
        "num_qubits,energy_std,fraction_above_threshold",
        &csv,
    )?;
    Ok(vec![report])
}

fn write_sweep_artifacts(out_dir: &Path, outcome: &SweepOutcome) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&outcome.trend_reports)
        .map_err(|e| CliError::Config(format!("report serialization: {e}")))?;
    text.push('\n');
    fs::write(out_dir.join("sweep_reports.json"), text)?;

    let mut lines = Vec::new();
    lines.push(format!(
        "sweep: {} over {} points",
        outcome.experiment,
        outcome.per_run.len()
    ));
    for (stem, run) in &outcome.per_run {
        let passed = run.reports.iter().filter(|r| r.pass).count();
        lines.push(format!(
            "point {stem}: {passed}/{} certificates pass",
            run.reports.len()
        ));
    }
    for report in &outcome.trend_reports {
        lines.push(report.summary_line());
    }
    let total: usize = outcome.all_reports().count();
    let passed = outcome.all_reports().filter(|r| r.pass).count();
    lines.push(format!(
        "certificates: {passed}/{total} pass ({} exact failures, {} statistical failures)",
        outcome.exact_failures(),
        outcome.statistical_failures(),
    ));
    lines.push(format!(
        "status: {}",
        if passed == total { "PASS" } else { "FAIL" }
    ));
    fs::write(out_dir.join("sweep_summary.txt"), lines.join("\n") + "\n")?;
    Ok(())
}
