use serde::Serialize;

/// Outcome of a verification. A failed verdict is a well-formed negative
/// result, not an error.
///
/// `deviation` is the measured violation in the units of the check and is
/// compared against `tolerance`; exact checks use tolerance 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub tolerance: f64,
    pub deviation: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Verdict>,
}

impl Verdict {
    /// Passes iff `deviation <= tolerance`; NaN never passes.
    pub fn from_deviation(check: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Verdict {
            check: check.into(),
            passed: deviation <= tolerance,
            tolerance,
            deviation,
            notes: Vec::new(),
            warnings: Vec::new(),
            parts: Vec::new(),
        }
    }

    /// An exact check (tolerance 0).
    pub fn exact(check: impl Into<String>, holds: bool, deviation: f64) -> Self {
        Verdict {
            check: check.into(),
            passed: holds,
            tolerance: 0.0,
            deviation,
            notes: Vec::new(),
            warnings: Vec::new(),
            parts: Vec::new(),
        }
    }

    /// Conjunction of sub-checks; deviation is the worst part's deviation.
    pub fn all(check: impl Into<String>, tolerance: f64, parts: Vec<Verdict>) -> Self {
        let deviation = parts.iter().map(|p| p.deviation).fold(0.0, f64::max);
        Verdict {
            check: check.into(),
            passed: parts.iter().all(|p| p.passed),
            tolerance,
            deviation,
            notes: Vec::new(),
            warnings: Vec::new(),
            parts,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warnings.push(warning.into());
        self
    }

    pub fn part(&self, check: &str) -> Option<&Verdict> {
        self.parts.iter().find(|p| p.check == check)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_deviation_fails() {
        assert!(!Verdict::from_deviation("x", f64::NAN, 1.0).passed);
        assert!(Verdict::from_deviation("x", 0.5, 1.0).passed);
    }

    #[test]
    fn conjunction() {
        let v = Verdict::all(
            "both",
            1e-9,
            vec![
                Verdict::from_deviation("a", 0.0, 1e-9),
                Verdict::from_deviation("b", 1.0, 1e-9),
            ],
        );
        assert!(!v.passed);
        assert_eq!(v.deviation, 1.0);
        assert!(v.part("a").unwrap().passed);
    }
}
