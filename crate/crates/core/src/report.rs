use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Measured against a formula whose hypotheses are out of reach; nothing asserted.
    ReportOnly,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Outcome of a numerical check, serialized as one JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub params: Value,
    pub measured: Value,
    pub bound: Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tolerance: Option<f64>,
}

impl Report {
    pub fn new(check: &str, params: Value, measured: Value, bound: Value, status: Status) -> Self {
        Report {
            check: check.to_string(),
            params,
            measured,
            bound,
            status,
            tolerance: None,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}
