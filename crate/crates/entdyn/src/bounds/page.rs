use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::report::CertificateReport;
use crate::error::{Error, Result};
use crate::sampling::sample_haar_bipartite;

/// Exact mean entanglement entropy of a Haar-random bipartite pure state:
/// `Σ_{k=d_B+1}^{d_A d_B} 1/k − (d_A−1)/(2 d_B)`, evaluated as the finite
/// harmonic sum (no asymptotic form).
pub fn page_mean_entropy(d_a: usize, d_b: usize) -> Result<f64> {
    if d_a < 1 || d_b < 1 || d_a > d_b {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= d_A <= d_B, got ({d_a}, {d_b})"
        )));
    }
    let sum: f64 = (d_b + 1..=d_a * d_b).map(|k| 1.0 / k as f64).sum();
    Ok(sum - (d_a as f64 - 1.0) / (2.0 * d_b as f64))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PageCheck {
    pub d_a: usize,
    pub d_b: usize,
    pub num_samples: usize,
    pub mean: f64,
    pub standard_error: f64,
    pub exact: f64,
    pub z_score: f64,
    pub report: CertificateReport,
}

/// Monte Carlo check of the Page value: the sample mean of `S(ρ_A)` over
/// Haar bipartite states must match the exact formula within 3 standard
/// errors (two one-sided reports folded into `|mean − exact| ≤ 3σ`).
pub fn page_monte_carlo(
    d_a: usize,
    d_b: usize,
    num_samples: usize,
    seed: u64,
) -> Result<PageCheck> {
    if num_samples < 100 {
        return Err(Error::InsufficientSamples {
            required: 100,
            got: num_samples,
        });
    }
    let exact = page_mean_entropy(d_a, d_b)?;
    let entropies: Vec<f64> = (0..num_samples)
        .into_par_iter()
        .map(|i| {
            let s = sample_haar_bipartite(d_a, d_b, crate::derive_seed(seed, i as u64))?;
            s.entanglement_entropy()
        })
        .collect::<Result<_>>()?;
    let (mean, standard_error) = crate::sampling::mean_and_se(&entropies);
    let z_score = if standard_error > 0.0 {
        (mean - exact) / standard_error
    } else {
        0.0
    };
    let report = CertificateReport::new(
        "page_mean_entropy",
        format!("d_A={d_a}, d_B={d_b}, samples={num_samples}, seed={seed}"),
        (mean - exact).abs(),
        0.0,
        0.0,
        standard_error,
    );
    Ok(PageCheck {
        d_a,
        d_b,
        num_samples,
        mean,
        standard_error,
        exact,
        z_score,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert!((page_mean_entropy(2, 2).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((page_mean_entropy(2, 4).unwrap() - 107.0 / 210.0).abs() < 1e-14);
        assert!((page_mean_entropy(3, 3).unwrap() - 1669.0 / 2520.0).abs() < 1e-14);
        assert!((page_mean_entropy(4, 16).unwrap() - 1.2694119104767758).abs() < 1e-12);
        assert!(page_mean_entropy(1, 7).unwrap().abs() < 1e-15);
        assert!(page_mean_entropy(3, 2).is_err());
    }

    #[test]
    fn never_exceeds_max_entropy() {
        for d_a in 1..=6usize {
            for d_b in d_a..=12 {
                let p = page_mean_entropy(d_a, d_b).unwrap();
                assert!(p <= (d_a as f64).ln() + 1e-12);
                assert!(p >= 0.0);
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_at_small_sizes() {
        let check = page_monte_carlo(2, 2, 4000, 11).unwrap();
        assert!(check.report.pass, "z = {}", check.z_score);
        assert!((check.exact - 1.0 / 3.0).abs() < 1e-14);
        let check = page_monte_carlo(2, 4, 4000, 12).unwrap();
        assert!(check.report.pass, "z = {}", check.z_score);
    }
}
