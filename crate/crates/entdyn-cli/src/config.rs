//! JSON run configurations: one experiment description per file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use entdyn::bounds::AveragingScheme;
use entdyn::dynamics::TimeGrid;
use entdyn::models::DisorderKind;
use entdyn::qcore::PureState;
use entdyn::sampling::sample_haar_product_state;
use entdyn::{derive_seed, MAX_DENSE_QUBITS};

use crate::error::CliError;

/// Schema version this binary reads and writes; configs must declare it.
pub const SCHEMA_VERSION: u32 = 1;

/// A complete, self-contained description of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must equal [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Every task seed in the run is derived from this value.
    pub master_seed: u64,
    /// Artifact directory; `--out` on the command line overrides it.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub experiment: Experiment,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(config)
    }

    /// Checks the schema version, field ranges, and the dense-size guard.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version: got {}, this binary supports {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        self.experiment.validate()
    }
}

/// Time-grid description; seeds for random grids derive from the master seed.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeGridPolicy {
    /// Evenly spaced times `0..=t_max`.
    Linear { t_max: f64, count: usize },
    /// Independent uniform draws in `[0, t_max]`.
    UniformRandom { t_max: f64, count: usize },
}

impl TimeGridPolicy {
    pub fn count(&self) -> usize {
        match *self {
            TimeGridPolicy::Linear { count, .. } => count,
            TimeGridPolicy::UniformRandom { count, .. } => count,
        }
    }

    pub fn build(&self, seed: u64) -> entdyn::Result<TimeGrid> {
        match *self {
            TimeGridPolicy::Linear { t_max, count } => TimeGrid::linear(t_max, count),
            TimeGridPolicy::UniformRandom { t_max, count } => {
                TimeGrid::uniform_random(t_max, count, seed)
            }
        }
    }
}

/// Initial-state choice for disorder experiments.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StatePolicy {
    /// The computational basis state `|0…0⟩`.
    #[default]
    AllZeros,
    /// A Haar-random product state seeded from the master seed and `salt`.
    HaarProduct { salt: u64 },
}

impl StatePolicy {
    pub fn build(&self, num_qubits: usize, master_seed: u64) -> entdyn::Result<PureState> {
        match *self {
            StatePolicy::AllZeros => PureState::computational_basis(num_qubits, 0),
            StatePolicy::HaarProduct { salt } => {
                sample_haar_product_state(num_qubits, derive_seed(master_seed, salt))
            }
        }
    }
}

/// The experiment families the runner knows how to execute.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Monte Carlo check of the mean bipartite entropy formula.
    Page {
        d_a: usize,
        d_b: usize,
        num_samples: usize,
    },
    /// Random nearest-neighbor chains: the full inequality chain per time,
    /// replicated over independent (chain, initial product state) draws.
    Lattice {
        num_qubits: usize,
        subsystem_size: usize,
        num_replicates: usize,
        #[serde(default)]
        translationally_invariant: bool,
        time_grid: TimeGridPolicy,
        /// When set (requires `translationally_invariant`), also certify the
        /// fixed-window bound averaged over this many Haar product states.
        #[serde(default)]
        state_average_states: Option<usize>,
    },
    /// Equilibration suite on a gap-certified translationally invariant chain.
    LatticeTiEquilibration {
        num_qubits: usize,
        subsystem_size: usize,
        num_states: usize,
        tau: f64,
        num_times: usize,
    },
    /// Charge-conserving brickwork circuits, layer by layer.
    Charge {
        num_qubits: usize,
        subsystem_size: usize,
        depth: usize,
        num_replicates: usize,
        scheme: AveragingScheme,
    },
    /// All-to-all two-body spin glass: hypothesis, reconstruction, and
    /// thermal-ceiling certificates over a disorder ensemble.
    SpinGlass {
        num_qubits: usize,
        subsystem_size: usize,
        num_disorder: usize,
        time_grid: TimeGridPolicy,
        #[serde(default)]
        initial_state: StatePolicy,
    },
    /// Four-body Majorana model on pair-aligned blocks.
    Syk {
        num_modes: usize,
        block_modes: usize,
        num_disorder: usize,
        time_grid: TimeGridPolicy,
        #[serde(default)]
        initial_state: StatePolicy,
    },
    /// Sign-split Gibbs energy/entropy curves over a β grid.
    ThermoCurves {
        disorder: DisorderKind,
        num_qubits: usize,
        beta_grid: Vec<f64>,
        num_disorder: usize,
        #[serde(default)]
        initial_state: StatePolicy,
    },
    /// Normalized trace-moment bounds for the spin-glass ensemble.
    MomentCheck {
        num_qubits: usize,
        k_max: usize,
        num_samples: usize,
    },
}

impl Experiment {
    /// The serialized tag, used for directory names and sweep dispatch.
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Page { .. } => "page",
            Experiment::Lattice { .. } => "lattice",
            Experiment::LatticeTiEquilibration { .. } => "lattice_ti_equilibration",
            Experiment::Charge { .. } => "charge",
            Experiment::SpinGlass { .. } => "spin_glass",
            Experiment::Syk { .. } => "syk",
            Experiment::ThermoCurves { .. } => "thermo_curves",
            Experiment::MomentCheck { .. } => "moment_check",
        }
    }

    /// Register size a dense matrix would need, for the resource guard.
    fn dense_qubits(&self) -> usize {
        match *self {
            Experiment::Page { d_a, d_b, .. } => {
                let dim = d_a.saturating_mul(d_b).max(1);
                (usize::BITS - (dim - 1).leading_zeros()) as usize
            }
            Experiment::Lattice { num_qubits, .. }
            | Experiment::LatticeTiEquilibration { num_qubits, .. }
            | Experiment::Charge { num_qubits, .. }
            | Experiment::SpinGlass { num_qubits, .. }
            | Experiment::ThermoCurves { num_qubits, .. }
            | Experiment::MomentCheck { num_qubits, .. } => num_qubits,
            Experiment::Syk { num_modes, .. } => num_modes / 2,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let dense = self.dense_qubits();
        if dense > MAX_DENSE_QUBITS {
            return Err(CliError::Resource(format!(
                "{} would need a dense register of {dense} qubits; the ceiling is {MAX_DENSE_QUBITS}",
                self.name()
            )));
        }
        let fail = |field: &str, reason: String| -> Result<(), CliError> {
            Err(CliError::Config(format!("{}.{field}: {reason}", self.name())))
        };
        match *self {
            Experiment::Page {
                d_a,
                d_b,
                num_samples,
            } => {
                if d_a < 1 || d_a > d_b {
                    return fail("d_a", format!("need 1 ≤ d_a ≤ d_b, got ({d_a}, {d_b})"));
                }
                if num_samples < 100 {
                    return fail("num_samples", format!("need at least 100, got {num_samples}"));
                }
            }
            Experiment::Lattice {
                num_qubits,
                subsystem_size,
                num_replicates,
                translationally_invariant,
                time_grid,
                state_average_states,
            } => {
                if subsystem_size < 2 || 2 * subsystem_size > num_qubits {
                    return fail(
                        "subsystem_size",
                        format!("need 2 ≤ n ≤ N/2, got n={subsystem_size}, N={num_qubits}"),
                    );
                }
                if num_replicates == 0 {
                    return fail("num_replicates", "need at least 1".into());
                }
                if time_grid.count() < 2 {
                    return fail("time_grid.count", "need at least 2 times".into());
                }
                if let Some(states) = state_average_states {
                    if !translationally_invariant {
                        return fail(
                            "state_average_states",
                            "requires translationally_invariant = true".into(),
                        );
                    }
                    if states < 2 {
                        return fail("state_average_states", format!("need at least 2, got {states}"));
                    }
                }
            }
            Experiment::LatticeTiEquilibration {
                num_qubits,
                subsystem_size,
                num_states,
                tau,
                num_times,
            } => {
                if subsystem_size < 1 || 2 * subsystem_size > num_qubits {
                    return fail(
                        "subsystem_size",
                        format!("need 1 ≤ n ≤ N/2, got n={subsystem_size}, N={num_qubits}"),
                    );
                }
                if num_states < 2 {
                    return fail("num_states", format!("need at least 2, got {num_states}"));
                }
                if !(tau.is_finite() && tau > 0.0) {
                    return fail("tau", format!("need a finite positive horizon, got {tau}"));
                }
                if num_times < 10 {
                    return fail("num_times", format!("need at least 10, got {num_times}"));
                }
            }
            Experiment::Charge {
                num_qubits,
                subsystem_size,
                depth,
                num_replicates,
                ..
            } => {
                if num_qubits < 2 {
                    return fail("num_qubits", format!("need at least 2, got {num_qubits}"));
                }
                if subsystem_size < 1 || 2 * subsystem_size > num_qubits {
                    return fail(
                        "subsystem_size",
                        format!("need 1 ≤ n ≤ N/2, got n={subsystem_size}, N={num_qubits}"),
                    );
                }
                if depth == 0 {
                    return fail("depth", "need at least 1 layer".into());
                }
                if num_replicates == 0 {
                    return fail("num_replicates", "need at least 1".into());
                }
            }
            Experiment::SpinGlass {
                num_qubits,
                subsystem_size,
                num_disorder,
                time_grid,
                ..
            } => {
                if subsystem_size < 2 || 2 * subsystem_size > num_qubits {
                    return fail(
                        "subsystem_size",
                        format!("need 2 ≤ n ≤ N/2, got n={subsystem_size}, N={num_qubits}"),
                    );
                }
                if num_disorder < 2 {
                    return fail("num_disorder", format!("need at least 2, got {num_disorder}"));
                }
                if time_grid.count() < 20 {
                    return fail("time_grid.count", "need at least 20 times".into());
                }
            }
            Experiment::Syk {
                num_modes,
                block_modes,
                num_disorder,
                time_grid,
                ..
            } => {
                if num_modes % 2 != 0 || num_modes < 8 {
                    return fail("num_modes", format!("need an even count ≥ 8, got {num_modes}"));
                }
                if block_modes % 2 != 0 || block_modes < 4 || 2 * block_modes > num_modes {
                    return fail(
                        "block_modes",
                        format!("need an even count with 4 ≤ block ≤ modes/2, got {block_modes}"),
                    );
                }
                if num_disorder < 2 {
                    return fail("num_disorder", format!("need at least 2, got {num_disorder}"));
                }
                if time_grid.count() < 20 {
                    return fail("time_grid.count", "need at least 20 times".into());
                }
            }
            Experiment::ThermoCurves {
                ref beta_grid,
                num_disorder,
                ..
            } => {
                if beta_grid.is_empty() {
                    return fail("beta_grid", "need at least one β".into());
                }
                if beta_grid.iter().any(|b| !b.is_finite() || b.abs() > 1.0) {
                    return fail("beta_grid", "every β must lie in [-1, 1]".into());
                }
                if beta_grid.windows(2).any(|w| w[1] <= w[0]) {
                    return fail("beta_grid", "grid must be strictly increasing".into());
                }
                if num_disorder < 100 {
                    return fail("num_disorder", format!("need at least 100, got {num_disorder}"));
                }
            }
            Experiment::MomentCheck {
                num_qubits,
                k_max,
                num_samples,
            } => {
                if num_qubits < 2 || num_qubits > 10 {
                    return fail("num_qubits", format!("need 2 ≤ N ≤ 10, got {num_qubits}"));
                }
                if k_max == 0 || k_max > 4 {
                    return fail("k_max", format!("need 1 ≤ k_max ≤ 4, got {k_max}"));
                }
                if num_samples < 100 {
                    return fail("num_samples", format!("need at least 100, got {num_samples}"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(experiment: Experiment) -> RunConfig {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            master_seed: 7,
            output_dir: None,
            experiment,
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = base(Experiment::Lattice {
            num_qubits: 8,
            subsystem_size: 2,
            num_replicates: 20,
            translationally_invariant: false,
            time_grid: TimeGridPolicy::Linear {
                t_max: 20.0,
                count: 50,
            },
            state_average_states: None,
        });
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&config).unwrap());
        assert!(back.validate().is_ok());
        assert_eq!(back.experiment.name(), "lattice");
    }

    #[test]
    fn validation_names_the_offending_field() {
        let config = base(Experiment::Page {
            d_a: 4,
            d_b: 2,
            num_samples: 1_000,
        });
        let err = config.validate().unwrap_err();
        assert!(matches!(&err, CliError::Config(msg) if msg.contains("page.d_a")));

        let config = base(Experiment::SpinGlass {
            num_qubits: 6,
            subsystem_size: 2,
            num_disorder: 1,
            time_grid: TimeGridPolicy::Linear {
                t_max: 30.0,
                count: 30,
            },
            initial_state: StatePolicy::AllZeros,
        });
        let err = config.validate().unwrap_err();
        assert!(matches!(&err, CliError::Config(msg) if msg.contains("spin_glass.num_disorder")));

        let mut config = base(Experiment::MomentCheck {
            num_qubits: 4,
            k_max: 2,
            num_samples: 1_000,
        });
        config.schema_version = 99;
        let err = config.validate().unwrap_err();
        assert!(matches!(&err, CliError::Config(msg) if msg.contains("schema_version")));
    }

    #[test]
    fn dense_guard_trips_at_fourteen_qubits() {
        let config = base(Experiment::Lattice {
            num_qubits: 14,
            subsystem_size: 2,
            num_replicates: 1,
            translationally_invariant: false,
            time_grid: TimeGridPolicy::Linear {
                t_max: 1.0,
                count: 2,
            },
            state_average_states: None,
        });
        let err = config.validate().unwrap_err();
        assert!(matches!(err, CliError::Resource(_)));

        let config = base(Experiment::Syk {
            num_modes: 28,
            block_modes: 4,
            num_disorder: 2,
            time_grid: TimeGridPolicy::Linear {
                t_max: 1.0,
                count: 20,
            },
            initial_state: StatePolicy::AllZeros,
        });
        let err = config.validate().unwrap_err();
        assert!(matches!(err, CliError::Resource(_)));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "schema_version": 1,
            "master_seed": 1,
            "experiment": {"kind": "page", "d_a": 2, "d_b": 2, "num_samples": 1000, "bogus": 1}
        }"#;
        assert!(serde_json::from_str::<RunConfig>(text).is_err());
    }
}
