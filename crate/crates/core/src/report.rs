//! Report records shared by every verification pipeline.

use serde::Serialize;

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub richardson: Vec<f64>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: true,
            detail: None,
            residual: None,
            max_residual: None,
            tolerance: None,
            grid_points: None,
            richardson: Vec::new(),
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            passed: false,
            detail: Some(detail.into()),
            ..Check::pass(name)
        }
    }

    /// Passes iff `residual` is `None`; otherwise records where and what.
    pub fn exact(name: impl Into<String>, failure: Option<(String, String)>) -> Self {
        match failure {
            None => Check::pass(name),
            Some((at, res)) => Check {
                residual: Some(res),
                ..Check::fail(name, at)
            },
        }
    }

    /// Numeric check `max_residual < tolerance`.
    pub fn numeric(name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        Check {
            passed: max_residual < tolerance,
            max_residual: Some(max_residual),
            tolerance: Some(tolerance),
            ..Check::pass(name)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_grid(mut self, points: usize) -> Self {
        self.grid_points = Some(points);
        self
    }

    pub fn with_richardson(mut self, ratios: Vec<f64>) -> Self {
        self.richardson = ratios;
        self
    }

    /// Marks the check failed (keeping other fields) when `ok` is false.
    pub fn require(mut self, ok: bool, why: &str) -> Self {
        if !ok {
            self.passed = false;
            self.detail = Some(match self.detail.take() {
                Some(d) => format!("{d}; {why}"),
                None => why.to_string(),
            });
        }
        self
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
