use serde::{Deserialize, Serialize};

use crate::combinat::AverageEstimate;

/// One verification outcome, serialized as a single JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: String,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub c_low: f64,
    pub c_high: f64,
    pub pass: bool,
    pub method: String,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Relative slack for the two-sided checks `c_low·L ≤ A ≤ c_high·L`.
pub const CHECK_RTOL: f64 = 1e-12;

/// Whether an estimate is consistent with `c_low·L ≤ A ≤ c_high·L`.
///
/// Exact values are compared directly. Monte-Carlo estimates pass unless the
/// confidence interval lies entirely outside the window. Sandwich bounds
/// `(s/2n, s/n)` must satisfy `(c_low/2)·L ≤ s/2n` and `s/n ≤ c_high·L`,
/// which is what the exact sandwich implies for them.
pub fn sandwich_holds(estimate: &AverageEstimate, l: f64, c_low: f64, c_high: f64) -> bool {
    use crate::combinat::Method;
    let slack = CHECK_RTOL * l.abs().max(estimate.value.abs()).max(1.0);
    let (low_probe, high_probe, c_low) = match estimate.method {
        Method::Exact => (estimate.value, estimate.value, c_low),
        Method::MonteCarlo => (estimate.upper(), estimate.lower(), c_low),
        Method::Bounds => (estimate.lower(), estimate.upper(), 0.5 * c_low),
    };
    c_low * l <= low_probe + slack && high_probe <= c_high * l + slack
}

/// Whether `lo·L ≤ A ≤ hi·L` within [`CHECK_RTOL`].
pub fn ratio_holds(a: f64, l: f64, c_low: f64, c_high: f64) -> bool {
    let slack = CHECK_RTOL * l.abs().max(a.abs()).max(1.0);
    c_low * l <= a + slack && a <= c_high * l + slack
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::Method;

    #[test]
    fn json_round_trip() {
        let r = Report {
            theorem: "thm3.2".into(),
            n: 3,
            a: 0.4,
            l: 1.25,
            c_low: 1.0 / 18.0,
            c_high: 2.0 / 3.0,
            pass: true,
            method: "exact".into(),
            seed: None,
            detail: None,
        };
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains(r#""A":0.4"#) && text.contains(r#""seed":null"#));
        assert_eq!(serde_json::from_str::<Report>(&text).unwrap(), r);
    }

    #[test]
    fn probes_by_method() {
        let est = |method, value, half_width| AverageEstimate {
            value,
            method,
            half_width,
            trials: None,
            seed: None,
        };
        assert!(sandwich_holds(&est(Method::Exact, 1.0, 0.0), 1.0, 1.0, 1.0));
        assert!(!sandwich_holds(&est(Method::Exact, 1.1, 0.0), 1.0, 0.5, 1.0));
        assert!(sandwich_holds(&est(Method::MonteCarlo, 1.05, 0.1), 1.0, 0.5, 1.0));
        assert!(!sandwich_holds(&est(Method::Bounds, 0.9, 0.2), 1.0, 0.5, 1.0));
        assert!(sandwich_holds(&est(Method::Bounds, 0.6, 0.2), 1.0, 0.6, 1.0));
        assert!(!sandwich_holds(&est(Method::Bounds, 0.4, 0.2), 1.0, 0.6, 1.0));
        assert!(ratio_holds(0.5, 1.0, 0.5, 2.0));
        assert!(!ratio_holds(0.49, 1.0, 0.5, 2.0));
    }
}
