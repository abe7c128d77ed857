//! Norm estimates with certificates.

use std::collections::BTreeMap;

use serde::Serialize;

/// What a [`NormEstimate`] actually certifies about ‖A‖_{p→q}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Exact,
    LowerBound,
    UpperBound,
    Interval,
}

/// A norm value together with its certificate and provenance.
///
/// The `lower`/`upper` fields always bracket the true norm:
/// exact values have `lower == upper == value`, one-sided certificates leave
/// the open side at 0 or +∞, and intervals carry `value` as the midpoint.
#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub certificate: Certificate,
    pub method: String,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

impl NormEstimate {
    pub fn exact(value: f64, method: &str) -> Self {
        NormEstimate {
            value,
            lower: value,
            upper: value,
            certificate: Certificate::Exact,
            method: method.to_string(),
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn lower_bound(value: f64, method: &str) -> Self {
        NormEstimate {
            value,
            lower: value,
            upper: f64::INFINITY,
            certificate: Certificate::LowerBound,
            method: method.to_string(),
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn upper_bound(value: f64, method: &str) -> Self {
        NormEstimate {
            value,
            lower: 0.0,
            upper: value,
            certificate: Certificate::UpperBound,
            method: method.to_string(),
            diagnostics: BTreeMap::new(),
        }
    }

    /// Requires `lower ≤ upper` (caller guarantees; asserted in debug builds).
    pub fn interval(lower: f64, upper: f64, method: &str) -> Self {
        debug_assert!(
            lower <= upper,
            "interval endpoints out of order: [{lower}, {upper}]"
        );
        NormEstimate {
            value: 0.5 * (lower + upper),
            lower,
            upper,
            certificate: Certificate::Interval,
            method: method.to_string(),
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with_diag(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    /// Numeric diagnostic accessor (used by routines that consume upstream
    /// estimates, e.g. the certified interval reads the raw net maximum).
    pub fn diag_f64(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).and_then(|v| v.as_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_set_brackets() {
        let e = NormEstimate::exact(2.0, "m");
        assert_eq!((e.lower, e.upper, e.value), (2.0, 2.0, 2.0));
        assert_eq!(e.certificate, Certificate::Exact);

        let l = NormEstimate::lower_bound(1.5, "m");
        assert_eq!(l.lower, 1.5);
        assert!(l.upper.is_infinite());

        let u = NormEstimate::upper_bound(3.0, "m");
        assert_eq!((u.lower, u.upper), (0.0, 3.0));

        let i = NormEstimate::interval(1.0, 2.0, "m").with_diag("net_size", 7);
        assert_eq!(i.value, 1.5);
        assert_eq!(i.diag_f64("net_size"), Some(7.0));
    }

    #[test]
    fn serializes_certificate_snake_case() {
        let e = NormEstimate::lower_bound(1.0, "alt");
        let js = serde_json::to_value(&e).unwrap();
        assert_eq!(js["certificate"], "lower_bound");
        assert_eq!(js["method"], "alt");
    }
}
