//! Values tagged with how they were obtained, and their JSON records.

use serde::{Deserialize, Serialize};

use crate::ext_real::ExtReal;
use crate::optimize::OptimizerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Optimizer,
    GridLimit,
}

/// A computed value and its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub method: Method,
    /// Always true for closed forms.
    pub converged: bool,
    pub config: Option<OptimizerConfig>,
}

impl Estimate {
    pub fn closed(value: f64) -> Self {
        Self { value, method: Method::ClosedForm, converged: true, config: None }
    }

    pub fn grid(value: f64) -> Self {
        Self { value, method: Method::GridLimit, converged: true, config: None }
    }

    pub fn optimized(value: f64, converged: bool, cfg: &OptimizerConfig) -> Self {
        Self { value, method: Method::Optimizer, converged, config: Some(*cfg) }
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Self {
        Self { value: f(self.value), ..self }
    }
}

/// One line of measurement output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub measure: String,
    pub alpha: Option<ExtReal>,
    pub value: ExtReal,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub converged: Option<bool>,
    pub config: Option<OptimizerConfig>,
    /// Measure-specific extra fields.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub details: Option<serde_json::Value>,
}

impl MeasureReport {
    pub fn new(measure: impl Into<String>, alpha: Option<f64>, est: Estimate) -> Self {
        Self {
            measure: measure.into(),
            alpha: alpha.map(ExtReal::from_f64),
            value: ExtReal::from_f64(est.value),
            method: est.method,
            converged: (est.method == Method::Optimizer).then_some(est.converged),
            config: est.config,
            details: None,
        }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = MeasureReport::new("c_r_alpha", Some(f64::INFINITY), Estimate::grid(0.5));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["alpha"], "inf");
        assert_eq!(v["method"], "grid-limit");
        assert!(v["config"].is_null());
        assert!(v.get("converged").is_none());
    }
}
