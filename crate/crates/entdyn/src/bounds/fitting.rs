use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least-squares line fit with the usual slope standard error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub r_squared: f64,
    pub num_points: usize,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientSamples {
            required: 3,
            got: n,
        });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "all x values identical; cannot fit a slope".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let sigma2 = ssr / (nf - 2.0);
    let slope_se = (sigma2 / sxx).sqrt();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ssr / syy };
    Ok(LineFit {
        slope,
        intercept,
        slope_se,
        r_squared,
        num_points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 0.7).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!((fit.intercept + 0.7).abs() < 1e-12);
        assert!(fit.slope_se < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_slope_has_sane_error_bar() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        // Deterministic "noise" with zero slope trend.
        let y: Vec<f64> = x.iter().map(|v| 1.0 + 0.01 * (v * 12.9898).sin()).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!(fit.slope.abs() < 5.0 * fit.slope_se + 1e-4);
    }

    #[test]
    fn too_few_points_is_an_error() {
        assert!(fit_line(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_line(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
