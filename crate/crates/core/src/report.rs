//! Uniform carrier for every numerical check.

use std::fmt;

/// How a check's margin is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// `lhs < rhs`: passes when `margin > error_budget`.
    Strict,
    /// `lhs <= rhs`: passes when `margin >= -error_budget`.
    NonStrict,
    /// `lhs = rhs`: passes when `|margin| <= error_budget`.
    Equality,
}

impl CheckKind {
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Strict => "strict",
            CheckKind::NonStrict => "non-strict",
            CheckKind::Equality => "equality",
        }
    }
}

/// One evaluated inequality. `margin = rhs - lhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub error_budget: f64,
    /// `margin >= -error_budget`
    pub pass: bool,
    /// `margin > error_budget`
    pub strict_pass: bool,
    pub kind: CheckKind,
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, kind: CheckKind, lhs: f64, rhs: f64, error_budget: f64) -> Self {
        let margin = rhs - lhs;
        let error_budget = error_budget.abs();
        Self {
            name: name.into(),
            params: Vec::new(),
            lhs,
            rhs,
            margin,
            error_budget,
            pass: margin >= -error_budget,
            strict_pass: margin > error_budget,
            kind,
            note: None,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), value));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Verdict according to [`CheckKind`]. NaN margins never pass.
    pub fn ok(&self) -> bool {
        match self.kind {
            CheckKind::Strict => self.strict_pass,
            CheckKind::NonStrict => self.pass,
            CheckKind::Equality => self.margin.abs() <= self.error_budget,
        }
    }

    pub fn params_string(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: lhs={:.12e} rhs={:.12e} margin={:.3e} budget={:.3e} {}",
            self.name,
            self.params_string(),
            self.kind.label(),
            self.lhs,
            self.rhs,
            self.margin,
            self.error_budget,
            if self.ok() { "PASS" } else { "FAIL" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let r = CheckReport::new("x", CheckKind::Strict, 1.0, 2.0, 0.1);
        assert!(r.pass && r.strict_pass && r.ok());
        let r = CheckReport::new("x", CheckKind::Strict, 1.0, 1.05, 0.1);
        assert!(r.pass && !r.strict_pass && !r.ok());
        let r = CheckReport::new("x", CheckKind::Equality, 1.0, 1.05, 0.1);
        assert!(r.ok());
        let r = CheckReport::new("x", CheckKind::NonStrict, 1.0, f64::NAN, 0.1);
        assert!(!r.ok());
    }
}
