//! Structured verdicts shared by every verification suite.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of one check: pass/fail plus the evidence behind it.
///
/// `residuals` keeps the worst value seen per name, so merging two reports
/// is associative and order-independent except for witness order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub claim: String,
    pub pass: bool,
    pub witnesses: Vec<serde_json::Value>,
    pub residuals: BTreeMap<String, f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(claim: impl Into<String>, seed: u64) -> Self {
        Self {
            claim: claim.into(),
            pass: true,
            witnesses: Vec::new(),
            residuals: BTreeMap::new(),
            seed,
            counts: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Records a counterexample and marks the report failed.
    pub fn fail_with(&mut self, witness: impl Serialize) {
        self.pass = false;
        self.witnesses
            .push(serde_json::to_value(witness).unwrap_or(serde_json::Value::Null));
    }

    /// Keeps the larger of the stored and the new value.
    pub fn residual(&mut self, name: &str, value: f64) {
        let slot = self.residuals.entry(name.to_string()).or_insert(value);
        if value > *slot || slot.is_nan() {
            *slot = value;
        }
    }

    pub fn count(&mut self, name: &str, by: u64) {
        *self.counts.entry(name.to_string()).or_insert(0) += by;
    }

    pub fn note(&mut self, text: impl Into<String>) {
        let text = text.into();
        if !self.notes.contains(&text) {
            self.notes.push(text);
        }
    }

    /// Asserts `condition`, recording `witness` when it fails.
    pub fn require(&mut self, condition: bool, witness: impl Serialize) {
        if !condition {
            self.fail_with(witness);
        }
    }

    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        self.pass &= other.pass;
        self.witnesses.extend(other.witnesses);
        for (k, v) in other.residuals {
            self.residual(&k, v);
        }
        for (k, v) in other.counts {
            self.count(&k, v);
        }
        for n in other.notes {
            self.note(n);
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_ands_pass_and_keeps_worst_residual() {
        let mut a = CheckReport::new("c", 1);
        a.residual("r", 0.5);
        a.count("n", 2);
        let mut b = CheckReport::new("c", 1);
        b.residual("r", 0.7);
        b.count("n", 3);
        b.fail_with([1, 0]);
        let m = a.merge(b);
        assert!(!m.pass);
        assert_eq!(m.residuals["r"], 0.7);
        assert_eq!(m.counts["n"], 5);
        assert_eq!(m.witnesses.len(), 1);
    }

    #[test]
    fn json_has_required_keys() {
        let r = CheckReport::new("claim", 9);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["claim", "pass", "witnesses", "residuals", "seed"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
