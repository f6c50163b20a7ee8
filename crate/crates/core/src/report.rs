//! Inequality-check records shared by every verification routine.

use serde::Serialize;
use serde_json::{Map, Value};

/// Outcome of checking `lhs <= rhs · (1 + slack)` at a set of sample points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub inequality: String,
    pub params: Map<String, Value>,
    /// Largest `lhs / rhs` seen (0 when both sides vanish, `inf` when only
    /// the right side does).
    pub worst_ratio: f64,
    /// Sample location of the worst ratio.
    pub worst_at: Option<f64>,
    pub samples: usize,
    pub violations: usize,
    pub slack: f64,
    pub holds: bool,
}

impl Report {
    pub fn new(inequality: impl Into<String>, slack: f64) -> Self {
        Report {
            inequality: inequality.into(),
            params: Map::new(),
            worst_ratio: 0.0,
            worst_at: None,
            samples: 0,
            violations: 0,
            slack,
            holds: true,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.set_param(key, value);
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<Value>) {
        let v = value.into();
        // serde_json turns non-finite floats into null; keep them readable
        let v = match v {
            Value::Null => Value::String("inf".into()),
            other => other,
        };
        self.params.insert(key.to_string(), v);
    }

    /// Records one comparison; returns whether it held.
    pub fn record(&mut self, at: f64, lhs: f64, rhs: f64) -> bool {
        let ratio = ratio(lhs, rhs);
        self.samples += 1;
        if ratio > self.worst_ratio || self.worst_at.is_none() {
            self.worst_ratio = ratio;
            self.worst_at = Some(at);
        }
        let ok = lhs <= rhs * (1.0 + self.slack) && !lhs.is_nan() && !rhs.is_nan();
        if !ok {
            self.violations += 1;
            self.holds = false;
        }
        ok
    }

    /// Folds another report's samples into this one.
    pub fn absorb(&mut self, other: &Report) {
        self.samples += other.samples;
        self.violations += other.violations;
        self.holds &= other.holds;
        if other.worst_ratio > self.worst_ratio || self.worst_at.is_none() {
            self.worst_ratio = other.worst_ratio;
            self.worst_at = other.worst_at;
        }
    }

    /// `1 - worst_ratio`; negative exactly when some sample failed without slack.
    pub fn margin(&self) -> f64 {
        1.0 - self.worst_ratio
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs <= 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}
