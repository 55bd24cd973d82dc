use serde::{Deserialize, Serialize};

/// Machine-checked comparison of a measured quantity against an explicit
/// finite-size bound.
///
/// The sign convention is `margin = rhs - lhs`, so certificates always phrase
/// their inequality as `lhs ≤ rhs`. A report passes when the margin is no
/// worse than the combined tolerance: `margin ≥ -(tolerance + 3·statistical_error)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateReport {
    pub certificate: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub statistical_error: f64,
    pub pass: bool,
}

impl CertificateReport {
    pub fn new(
        certificate: impl Into<String>,
        instance: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        statistical_error: f64,
    ) -> Self {
        let margin = rhs - lhs;
        Self {
            certificate: certificate.into(),
            instance: instance.into(),
            lhs,
            rhs,
            margin,
            tolerance,
            statistical_error,
            pass: margin >= -(tolerance + 3.0 * statistical_error),
        }
    }

    /// One line for the summary table.
    pub fn summary_line(&self) -> String {
        format!(
            "{:<4} {:<44} lhs={:+.6e} rhs={:+.6e} margin={:+.3e} tol={:.1e} se={:.1e} [{}]",
            if self.pass { "PASS" } else { "FAIL" },
            self.certificate,
            self.lhs,
            self.rhs,
            self.margin,
            self.tolerance,
            self.statistical_error,
            self.instance,
        )
    }
}

pub fn all_pass(reports: &[CertificateReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
