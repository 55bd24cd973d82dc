//! Exact time evolution in the eigenbasis of a fixed Hamiltonian, plus the
//! infinite-time objects it induces: the diagonal ensemble, the effective
//! dimension, and time-averaged subsystem distances.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    von_neumann_entropy, trace_norm_distance, DensityMatrix, Eigendecomposition,
    HermitianOperator, MaskPlan, PureState, SubsystemMask,
};

/// Evolution data for one (Hamiltonian, initial state) pair: borrows the
/// cached eigendecomposition and stores the initial state's eigenbasis
/// coefficients `c = V†Ψ(0)`.
pub struct EvolutionContext<'a> {
    hamiltonian: &'a HermitianOperator,
    eig: &'a Eigendecomposition,
    coefficients: Array1<Complex64>,
    initial_energy: f64,
}

impl<'a> EvolutionContext<'a> {
    pub fn new(hamiltonian: &'a HermitianOperator, initial: &PureState) -> Result<Self> {
        if initial.dim() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                left: initial.dim(),
                right: hamiltonian.dim(),
            });
        }
        let eig = hamiltonian.eigendecomposition()?;
        let coefficients = eig
            .eigenvectors
            .mapv(|v| v.conj())
            .t()
            .dot(initial.amplitudes());
        let initial_energy = hamiltonian.expectation_pure(initial)?;
        Ok(Self {
            hamiltonian,
            eig,
            coefficients,
            initial_energy,
        })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        self.hamiltonian
    }

    pub fn num_qubits(&self) -> usize {
        self.hamiltonian.num_qubits()
    }

    pub fn initial_energy(&self) -> f64 {
        self.initial_energy
    }

    /// `Ψ(t) = V · (e^{-iλt} ∘ c)`.
    pub fn evolve(&self, t: f64) -> Result<PureState> {
        let phased = Array1::from_iter(
            self.eig
                .eigenvalues
                .iter()
                .zip(self.coefficients.iter())
                .map(|(&l, c)| c * Complex64::from_polar(1.0, -l * t)),
        );
        PureState::new(self.eig.eigenvectors.dot(&phased))
    }

    /// Evolves at many times with one matrix-matrix product; column `k` of
    /// the result is `Ψ(times[k])`.
    pub fn evolve_batch(&self, times: &[f64]) -> Array2<Complex64> {
        let d = self.coefficients.len();
        let mut phases = Array2::zeros((d, times.len()));
        for (j, (&l, c)) in self
            .eig
            .eigenvalues
            .iter()
            .zip(self.coefficients.iter())
            .enumerate()
        {
            for (k, &t) in times.iter().enumerate() {
                phases[[j, k]] = c * Complex64::from_polar(1.0, -l * t);
            }
        }
        self.eig.eigenvectors.dot(&phases)
    }

    /// Eigenbasis occupation probabilities `p_j = |⟨j|Ψ⟩|²`.
    pub fn occupation_probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `ρ∞ = Σ_j p_j |j⟩⟨j|`: the infinite-time average of `ρ(t)` whenever
    /// the spectrum is non-degenerate.
    pub fn diagonal_ensemble(&self) -> Result<DensityMatrix> {
        let p = self.occupation_probabilities();
        let d = p.len();
        let v = &self.eig.eigenvectors;
        let mut rho = Array2::zeros((d, d));
        for (j, &pj) in p.iter().enumerate() {
            if pj == 0.0 {
                continue;
            }
            let col = v.column(j);
            for r in 0..d {
                for c in 0..d {
                    rho[[r, c]] += col[r] * col[c].conj() * pj;
                }
            }
        }
        DensityMatrix::new(self.num_qubits(), rho)
    }

    /// `D^eff = 1 / Σ_j p_j²`, the participation number of the initial state
    /// in the energy eigenbasis.
    pub fn effective_dimension(&self) -> f64 {
        let s: f64 = self
            .occupation_probabilities()
            .iter()
            .map(|p| p * p)
            .sum();
        1.0 / s
    }

    /// Smallest nonzero spectral gap (adjacent differences above
    /// `1e-12·max(1, ‖H‖)` are considered nonzero).
    pub fn min_nonzero_gap(&self) -> Option<f64> {
        let lam = &self.eig.eigenvalues;
        let scale = lam
            .iter()
            .fold(0.0f64, |m, l| m.max(l.abs()))
            .max(1.0);
        lam.iter()
            .zip(lam.iter().skip(1))
            .map(|(a, b)| b - a)
            .filter(|g| *g > 1e-12 * scale)
            .fold(None, |m: Option<f64>, g| Some(m.map_or(g, |x| x.min(g))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeGridKind {
    /// Evenly spaced, endpoints included.
    Linear,
    /// Independent uniform draws in `[0, t_max]` (Monte Carlo time average).
    UniformRandom,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeGrid {
    pub kind: TimeGridKind,
    pub t_max: f64,
    pub times: Vec<f64>,
}

impl TimeGrid {
    pub fn linear(t_max: f64, count: usize) -> Result<Self> {
        if count < 2 || !t_max.is_finite() || t_max <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "linear grid needs t_max > 0 and at least 2 points, got {t_max}, {count}"
            )));
        }
        let times = (0..count)
            .map(|i| t_max * i as f64 / (count - 1) as f64)
            .collect();
        Ok(Self {
            kind: TimeGridKind::Linear,
            t_max,
            times,
        })
    }

    pub fn uniform_random(t_max: f64, count: usize, seed: u64) -> Result<Self> {
        if count == 0 || !t_max.is_finite() || t_max <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "random grid needs t_max > 0 and at least 1 point, got {t_max}, {count}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let times = (0..count).map(|_| rng.gen_range(0.0..t_max)).collect();
        Ok(Self {
            kind: TimeGridKind::UniformRandom,
            t_max,
            times,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `S(ρ_A(t))` for every grid time (rows) and mask (columns).
pub fn entropy_timeseries(
    ctx: &EvolutionContext,
    grid: &TimeGrid,
    masks: &[SubsystemMask],
) -> Result<Array2<f64>> {
    let n = ctx.num_qubits();
    let plans: Vec<MaskPlan> = masks
        .iter()
        .map(|m| MaskPlan::new(m, n))
        .collect::<Result<_>>()?;
    let states = ctx.evolve_batch(&grid.times);
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let psi = PureState::new(states.column(k).to_owned())?;
            plans
                .iter()
                .map(|plan| von_neumann_entropy(&psi.partial_trace_with_plan(plan)?))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut out = Array2::zeros((grid.len(), masks.len()));
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            out[[r, c]] = *v;
        }
    }
    Ok(out)
}

/// Monte Carlo estimate of the time-averaged trace distance between
/// `ρ_A(t)` and the diagonal ensemble's reduction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquilibrationEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub num_times: usize,
    pub t_max: f64,
    /// Set when `t_max` is below 10 / (minimum nonzero gap): the finite-time
    /// average may not yet probe the equilibrated regime.
    pub pre_asymptotic: bool,
}

pub fn time_averaged_trace_distance(
    ctx: &EvolutionContext,
    mask: &SubsystemMask,
    grid: &TimeGrid,
) -> Result<EquilibrationEstimate> {
    if grid.kind != TimeGridKind::UniformRandom {
        return Err(Error::InvalidArgument(
            "time averaging needs a uniform-random grid".into(),
        ));
    }
    let plan = MaskPlan::new(mask, ctx.num_qubits())?;
    let reference = ctx.diagonal_ensemble()?.partial_trace_with_plan(&plan)?;
    let states = ctx.evolve_batch(&grid.times);
    let distances: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let psi = PureState::new(states.column(k).to_owned())?;
            trace_norm_distance(&psi.partial_trace_with_plan(&plan)?, &reference)
        })
        .collect::<Result<_>>()?;
    let (mean, standard_error) = crate::sampling::mean_and_se(&distances);
    let pre_asymptotic = match ctx.min_nonzero_gap() {
        Some(g) => grid.t_max < 10.0 / g,
        None => true,
    };
    Ok(EquilibrationEstimate {
        mean,
        standard_error,
        num_times: grid.len(),
        t_max: grid.t_max,
        pre_asymptotic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Pauli, PauliString};

    const LN2: f64 = std::f64::consts::LN_2;

    fn xx_like(a: f64, b: f64) -> HermitianOperator {
        HermitianOperator::from_terms(
            2,
            vec![
                PauliString::new(a, [(0, Pauli::X), (1, Pauli::X)]),
                PauliString::new(b, [(0, Pauli::Y), (1, Pauli::Y)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn evolve_at_zero_returns_initial_state() {
        let h = xx_like(1.0, 0.3);
        let psi = crate::sampling::sample_haar_product_state(2, 3).unwrap();
        let ctx = EvolutionContext::new(&h, &psi).unwrap();
        let out = ctx.evolve(0.0).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes().iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn sigma_z_evolution_closed_form() {
        // H = σ^z on |+⟩ at t = π/2 gives (-i|0⟩ + i|1⟩)/√2.
        let h = HermitianOperator::from_terms(1, vec![PauliString::new(1.0, [(0, Pauli::Z)])])
            .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(ndarray::array![
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0)
        ])
        .unwrap();
        let ctx = EvolutionContext::new(&h, &plus).unwrap();
        let out = ctx.evolve(std::f64::consts::FRAC_PI_2).unwrap();
        let want = [Complex64::new(0.0, -s), Complex64::new(0.0, s)];
        for (a, b) in out.amplitudes().iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-10, "got {a}, want {b}");
        }
    }

    #[test]
    fn energy_and_norm_conserved() {
        let h = HermitianOperator::from_terms(
            3,
            vec![
                PauliString::new(0.8, [(0, Pauli::X), (1, Pauli::Y)]),
                PauliString::new(-0.4, [(1, Pauli::Z), (2, Pauli::X)]),
                PauliString::new(0.25, [(0, Pauli::Z)]),
            ],
        )
        .unwrap();
        let psi = crate::sampling::sample_haar_product_state(3, 8).unwrap();
        let ctx = EvolutionContext::new(&h, &psi).unwrap();
        let e0 = ctx.initial_energy();
        for &t in &[0.4, 1.7, 6.3, 19.0] {
            let out = ctx.evolve(t).unwrap();
            let norm: f64 = out.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
            let e = h.expectation_pure(&out).unwrap();
            assert!((e - e0).abs() < 1e-8 * h.operator_norm().unwrap().max(1.0));
        }
    }

    #[test]
    fn batch_matches_single_evolution() {
        let h = xx_like(0.9, 0.2);
        let psi = crate::sampling::sample_haar_product_state(2, 5).unwrap();
        let ctx = EvolutionContext::new(&h, &psi).unwrap();
        let times = [0.0, 0.31, 2.7, 11.0];
        let batch = ctx.evolve_batch(&times);
        for (k, &t) in times.iter().enumerate() {
            let single = ctx.evolve(t).unwrap();
            for (a, b) in batch.column(k).iter().zip(single.amplitudes().iter()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn entropy_timeseries_xx_closed_form() {
        // H = σ^xσ^x on |00⟩: ρ_{qubit 0}(t) = diag(cos²t, sin²t), so the
        // entropy peaks at ln 2 when t = π/4.
        let h = xx_like(1.0, 0.0);
        let psi = PureState::computational_basis(2, 0).unwrap();
        let ctx = EvolutionContext::new(&h, &psi).unwrap();
        let masks = [SubsystemMask::new(vec![0]).unwrap()];
        let grid = TimeGrid {
            kind: TimeGridKind::Linear,
            t_max: std::f64::consts::FRAC_PI_4,
            times: vec![0.0, 0.3, std::f64::consts::FRAC_PI_4],
        };
        let table = entropy_timeseries(&ctx, &grid, &masks).unwrap();
        assert!(table[[0, 0]].abs() < 1e-9);
        let c = 0.3f64.cos().powi(2);
        let s = 0.3f64.sin().powi(2);
        let expect = -c * c.ln() - s * s.ln();
        assert!((table[[1, 0]] - expect).abs() < 1e-9);
        assert!((table[[2, 0]] - LN2).abs() < 1e-9);
    }

    #[test]
    fn diagonal_ensemble_properties() {
        // H = σ^z on |+⟩: ρ∞ = I/2; eigenstate input gives a projector.
        let h = HermitianOperator::from_terms(1, vec![PauliString::new(1.0, [(0, Pauli::Z)])])
            .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(ndarray::array![
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0)
        ])
        .unwrap();
        let ctx = EvolutionContext::new(&h, &plus).unwrap();
        let rho = ctx.diagonal_ensemble().unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c { 0.5 } else { 0.0 };
                assert!((rho.matrix()[[r, c]] - Complex64::new(want, 0.0)).norm() < 1e-10);
            }
        }
        assert!((ctx.effective_dimension() - 2.0).abs() < 1e-10);

        let zero = PureState::computational_basis(1, 0).unwrap();
        let ctx = EvolutionContext::new(&h, &zero).unwrap();
        assert!((ctx.effective_dimension() - 1.0).abs() < 1e-10);
        let rho = ctx.diagonal_ensemble().unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn effective_dimension_hand_value() {
        // p = (1/2, 1/4, 1/8, 1/8) → D^eff = 32/11.
        let diag: Vec<f64> = vec![0.0, 1.0, 2.0, 3.0];
        let mut m = Array2::<Complex64>::zeros((4, 4));
        for (i, &d) in diag.iter().enumerate() {
            m[[i, i]] = Complex64::new(d, 0.0);
        }
        let h = HermitianOperator::from_dense(2, m).unwrap();
        let amps = ndarray::array![
            Complex64::new(0.5f64.sqrt(), 0.0),
            Complex64::new(0.25f64.sqrt(), 0.0),
            Complex64::new(0.125f64.sqrt(), 0.0),
            Complex64::new(0.125f64.sqrt(), 0.0)
        ];
        let psi = PureState::new(amps).unwrap();
        let ctx = EvolutionContext::new(&h, &psi).unwrap();
        assert!((ctx.effective_dimension() - 32.0 / 11.0).abs() < 1e-10);
    }

    #[test]
    fn commuting_pair_time_average_matches_quadrature() {
        // H = XX + 0.3·YY has Bell eigenbasis with distinct eigenvalues
        // {±0.7, ±1.3}. From |00⟩, ρ_A(t) = diag(cos²0.7t, sin²0.7t) and
        // ρ∞_A = I/2, so the time-averaged trace distance is the mean of
        // |cos 1.4t| = 2/π.
        let h = xx_like(1.0, 0.3);
        let psi = PureState::computational_basis(2, 0).unwrap();
        let ctx = EvolutionContext::new(&h, &psi).unwrap();
        let mask = SubsystemMask::new(vec![0]).unwrap();
        let rho_inf = ctx
            .diagonal_ensemble()
            .unwrap()
            .partial_trace(&mask)
            .unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c { 0.5 } else { 0.0 };
                assert!((rho_inf.matrix()[[r, c]] - Complex64::new(want, 0.0)).norm() < 1e-9);
            }
        }
        let grid = TimeGrid::uniform_random(500.0, 4000, 17).unwrap();
        let est = time_averaged_trace_distance(&ctx, &mask, &grid).unwrap();
        let target = 2.0 / std::f64::consts::PI;
        assert!(
            (est.mean - target).abs() < 3.0 * est.standard_error,
            "mean {} vs {target} (se {})",
            est.mean,
            est.standard_error
        );
        assert!(!est.pre_asymptotic);
        // Consistency with the equilibration bound: 2^n/√D^eff = 2/√2 here.
        assert!(est.mean <= 2.0 / ctx.effective_dimension().sqrt());
    }

    #[test]
    fn eigenstate_distance_is_zero() {
        let h = xx_like(1.0, 0.3);
        let eig = h.eigendecomposition().unwrap();
        let psi = PureState::new(eig.eigenvectors.column(2).to_owned()).unwrap();
        let ctx = EvolutionContext::new(&h, &psi).unwrap();
        let mask = SubsystemMask::new(vec![1]).unwrap();
        let grid = TimeGrid::uniform_random(50.0, 64, 4).unwrap();
        let est = time_averaged_trace_distance(&ctx, &mask, &grid).unwrap();
        assert!(est.mean < 1e-9, "mean {}", est.mean);
    }

    #[test]
    fn grid_shapes() {
        let g = TimeGrid::linear(20.0, 50).unwrap();
        assert_eq!(g.len(), 50);
        assert!((g.times[0]).abs() < 1e-15);
        assert!((g.times[49] - 20.0).abs() < 1e-12);
        let g = TimeGrid::uniform_random(30.0, 10, 3).unwrap();
        assert!(g.times.iter().all(|&t| (0.0..30.0).contains(&t)));
        let a = TimeGrid::uniform_random(30.0, 10, 3).unwrap();
        assert_eq!(g.times, a.times);
        assert!(TimeGrid::linear(-1.0, 10).is_err());
        assert!(TimeGrid::linear(5.0, 1).is_err());
    }
}
