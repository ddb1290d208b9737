//! Outcome records shared by every verification suite.

use serde::{Deserialize, Serialize};

use crate::hilbert::ModeIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Structurally zero with formal phases.
    Exact,
    WithinTolerance,
    Violated,
}

impl Status {
    pub fn passed(self) -> bool {
        self != Status::Violated
    }

    /// The weaker of two statuses.
    pub fn meet(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (WithinTolerance, _) | (_, WithinTolerance) => WithinTolerance,
            _ => Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub id: String,
    pub status: Status,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ModeIndex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl RelationReport {
    pub fn new(id: impl Into<String>, status: Status, max_residual: f64) -> Self {
        Self {
            id: id.into(),
            status,
            max_residual,
            witness: None,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_witness(mut self, w: Option<ModeIndex>) -> Self {
        self.witness = w;
        self
    }

    /// Converts a boolean check; `exact` marks checks done in exact arithmetic.
    pub fn from_bool(id: impl Into<String>, ok: bool, exact: bool, residual: f64) -> Self {
        let status = match (ok, exact) {
            (false, _) => Status::Violated,
            (true, true) => Status::Exact,
            (true, false) => Status::WithinTolerance,
        };
        Self::new(id, status, residual)
    }

    pub fn passed(&self) -> bool {
        self.status.passed()
    }
}

/// True when every report passed.
pub fn all_passed(reports: &[RelationReport]) -> bool {
    reports.iter().all(RelationReport::passed)
}
