//! Reports, potential files and the golden suite behind the `hessian` binary.

mod analyze;
mod json;
mod potential_file;
mod suite;

use serde::Serialize;

use crate::error::Error;

pub use analyze::{
    analyze, dual_report, flatness_report, AnalyzeReport, DualReport, ExcludedPoint, FlatnessReport,
    PointRecord,
};
pub use json::{to_json_string, write_json};
pub use potential_file::{PotentialFile, SampleOrigin, DEFAULT_COUNT};
pub use suite::{run_criteria, run_suite, Check, SuiteConfig, SuiteReport, CRITERIA};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status of the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    CheckFailed = 1,
    Usage = 2,
    Numerical = 3,
}

impl Error {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Error::Parse(_)
            | Error::InvalidChart(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::UnknownExample(_)
            | Error::PotentialFile { .. }
            | Error::Io(_)
            | Error::Json(_) => ExitCode::Usage,
            Error::Domain(_)
            | Error::Diff(_)
            | Error::NotAdmissible(_)
            | Error::DegenerateMetric { .. }
            | Error::UnsupportedSignature { .. }
            | Error::Quadrature { .. }
            | Error::Solver { .. } => ExitCode::Numerical,
        }
    }
}

/// What a check's value is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    /// `value <= tolerance`; the tolerance is multiplied by the suite's scale.
    AtMost { tolerance: f64 },
    /// `value >= threshold`, never scaled.
    AtLeast { threshold: f64 },
    /// `lo <= value <= hi`, never scaled.
    Within { lo: f64, hi: f64 },
}

impl Bound {
    pub fn admits(&self, value: f64) -> bool {
        match *self {
            Bound::AtMost { tolerance } => value <= tolerance,
            Bound::AtLeast { threshold } => value >= threshold,
            Bound::Within { lo, hi } => lo <= value && value <= hi,
        }
    }

    fn scaled(self, scale: f64) -> Self {
        match self {
            Bound::AtMost { tolerance } => Bound::AtMost {
                tolerance: tolerance * scale,
            },
            b => b,
        }
    }
}

/// A named residual together with the bound it must satisfy.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: Option<f64>,
    pub bound: Bound,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        let finite = value.is_finite();
        Verdict {
            name: name.into(),
            value: finite.then_some(value),
            passed: finite && bound.admits(value),
            bound,
            error: (!finite).then(|| format!("non-finite value {value}")),
        }
    }

    pub fn failed(name: impl Into<String>, bound: Bound, error: &Error) -> Self {
        Verdict {
            name: name.into(),
            value: None,
            bound,
            passed: false,
            error: Some(error.to_string()),
        }
    }

    pub fn from_result(name: impl Into<String>, value: crate::Result<f64>, bound: Bound) -> Self {
        match value {
            Ok(v) => Verdict::new(name, v, bound),
            Err(e) => Verdict::failed(name, bound, &e),
        }
    }

    /// One human-readable line: `PASS name value bound`.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let value = match (self.value, &self.error) {
            (Some(v), _) => format!("{v:.3e}"),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "-".into(),
        };
        let bound = match self.bound {
            Bound::AtMost { tolerance } => format!("<= {tolerance:.1e}"),
            Bound::AtLeast { threshold } => format!(">= {threshold:.1e}"),
            Bound::Within { lo, hi } => format!("in [{lo}, {hi}]"),
        };
        format!("{status} {} {value} ({bound})", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Bound::AtMost { tolerance: 1e-8 }.admits(1e-9));
        assert!(!Bound::AtMost { tolerance: 1e-8 }.scaled(1e-3).admits(1e-9));
        assert_eq!(Bound::Within { lo: 3.2, hi: 4.8 }.scaled(0.0), Bound::Within { lo: 3.2, hi: 4.8 });
        assert!(!Verdict::new("x", f64::NAN, Bound::AtLeast { threshold: 0.0 }).passed);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Error::InvalidArgument("m".into()).exit_code(), ExitCode::Usage);
        assert_eq!(Error::NotAdmissible(vec![]).exit_code(), ExitCode::Numerical);
    }
}
