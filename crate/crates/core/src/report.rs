//! Check reports: violations found by axiom checkers and discrepancies
//! between two computation routes.
//!
//! An empty violation list means the check passed. Discrepancy reports are
//! informational: they document where a literal structure-constant table or
//! an alternate convention differs from the derived computation, and they
//! never fail a suite on their own.

use serde::{Deserialize, Serialize};

/// One failed instance of a checked identity, with both sides rendered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Which identity failed (e.g. "C2", "antisymmetry").
    pub label: String,
    /// The sample that failed (elements and group indices, rendered).
    pub context: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    /// Name of the check that produced this report.
    pub subject: String,
    /// Number of instances checked.
    pub checked: u64,
    /// Instances skipped because they fall outside a formula's stated domain.
    pub skipped: u64,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report { subject: subject.into(), ..Report::default() }
    }

    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn record(&mut self, label: &str, context: String, lhs: String, rhs: String) {
        self.violations.push(Violation {
            label: label.to_string(),
            context,
            lhs,
            rhs,
        });
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.violations.extend(other.violations);
    }

    /// One-line summary, e.g. `C2 sin: pass (162 checked)`.
    pub fn summary(&self) -> String {
        if self.is_pass() {
            format!("{}: pass ({} checked)", self.subject, self.checked)
        } else {
            format!(
                "{}: FAIL ({} violations / {} checked)",
                self.subject,
                self.violations.len(),
                self.checked
            )
        }
    }

    /// Full text rendering, one violation per line.
    pub fn render_text(&self) -> String {
        let mut out = self.summary();
        for v in &self.violations {
            out.push_str(&format!(
                "\n  [{}] {}\n    lhs = {}\n    rhs = {}",
                v.label, v.context, v.lhs, v.rhs
            ));
        }
        out
    }
}

/// A single compared entry where two sources disagree (or an annotation
/// for an entry that could not be compared).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyEntry {
    pub lhs_source: String,
    pub rhs_source: String,
    /// The basis pair (or basis element) being compared, rendered.
    pub basis_pair: String,
    pub lhs_value: String,
    pub rhs_value: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    /// Short machine-readable identifier, e.g. "ex33_eps_sector_sign".
    pub id: String,
    /// Number of basis pairs compared.
    pub compared: u64,
    /// Entries where the two sources disagree.
    pub entries: Vec<DiscrepancyEntry>,
}

impl DiscrepancyReport {
    pub fn new(id: impl Into<String>) -> Self {
        DiscrepancyReport { id: id.into(), ..DiscrepancyReport::default() }
    }

    /// Empty iff the two sources agree everywhere on the compared range.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn record(
        &mut self,
        lhs_source: &str,
        rhs_source: &str,
        basis_pair: String,
        lhs_value: String,
        rhs_value: String,
    ) {
        self.entries.push(DiscrepancyEntry {
            lhs_source: lhs_source.to_string(),
            rhs_source: rhs_source.to_string(),
            basis_pair,
            lhs_value,
            rhs_value,
        });
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} deviations / {} compared",
            self.id,
            self.entries.len(),
            self.compared
        )
    }
}
