//! Named checks with their measured value, limit and outcome.

use std::fmt::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
    /// Recorded for information; never fails.
    Diagnostic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// `None` when the quantity could not be computed.
    pub value: Option<f64>,
    pub limit: Option<f64>,
    pub bound: Bound,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            limit: Some(limit),
            bound: Bound::AtMost,
            passed: value <= limit,
            note: None,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            limit: Some(limit),
            bound: Bound::AtLeast,
            passed: value >= limit,
            note: None,
        }
    }

    pub fn diagnostic(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            limit: None,
            bound: Bound::Diagnostic,
            passed: true,
            note: None,
        }
    }

    /// A check whose computation itself failed.
    pub fn error(name: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: None,
            limit: None,
            bound: Bound::AtMost,
            passed: false,
            note: Some(message.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A group of checks, e.g. one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            sections: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.sections.iter().all(Section::passed)
    }

    pub fn check_count(&self) -> usize {
        self.sections.iter().map(|s| s.checks.len()).sum()
    }

    /// Plain-text table; identical reports render to identical text.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let width = self
            .sections
            .iter()
            .flat_map(|s| &s.checks)
            .map(|c| c.name.chars().count())
            .max()
            .unwrap_or(0)
            .max(5);
        let _ = writeln!(out, "{}", self.title);
        for section in &self.sections {
            let _ = writeln!(out, "\n[{}] {}", verdict(section.passed()), section.title);
            for c in &section.checks {
                let value = c.value.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
                let limit = match (c.bound, c.limit) {
                    (Bound::AtMost, Some(l)) => format!("<= {l:.3e}"),
                    (Bound::AtLeast, Some(l)) => format!(">= {l:.3e}"),
                    _ => String::new(),
                };
                let status = match c.bound {
                    Bound::Diagnostic => "INFO",
                    _ => verdict(c.passed),
                };
                let _ = write!(out, "  {status:<4}  {:<width$}  {value:>13}  {limit}", c.name);
                if let Some(note) = &c.note {
                    let _ = write!(out, "  ({note})");
                }
                out.push('\n');
            }
        }
        let failed = self
            .sections
            .iter()
            .flat_map(|s| s.failures())
            .count();
        let _ = writeln!(
            out,
            "\n{}: {} checks, {failed} failed",
            verdict(self.passed()),
            self.check_count()
        );
        out
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
        assert!(!Check::at_least("x", f64::NAN, 1.0).passed);
        assert!(Check::diagnostic("x", f64::NAN).passed);
    }

    #[test]
    fn section_fails_with_any_failure() {
        let mut s = Section::new("s");
        s.push(Check::at_most("small", 1e-12, 1e-10));
        assert!(s.passed());
        s.push(Check::error("broken", "singular"));
        assert!(!s.passed());
        assert_eq!(s.failures().count(), 1);
    }

    #[test]
    fn render_is_stable() {
        let mut r = Report::new("demo");
        let mut s = Section::new("first");
        s.push(Check::at_most("residual", 2.5e-13, 1e-10));
        s.push(Check::diagnostic("shift", -0.34657359).with_note("fitted"));
        r.sections.push(s);
        let text = r.render();
        assert_eq!(text, r.clone().render());
        assert!(text.contains("PASS  residual"));
        assert!(text.contains("INFO  shift"));
        assert!(text.ends_with("PASS: 2 checks, 0 failed\n"));
    }
}
