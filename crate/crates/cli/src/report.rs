//! Command reports: JSON and text renderings.

use serde_json::{json, Map, Value};

use njk_core::exact::{format_rational, Rational};
use njk_core::lie::Report as CheckReport;

use crate::config::Format;
use crate::error::{EXIT_INVALID, EXIT_OK};

/// Overall outcome of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every check held.
    Valid,
    /// A validity check failed.
    Invalid,
    /// A computation finished; nothing was being decided.
    Computed,
}

impl Verdict {
    /// Lower-case name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::Invalid => "invalid",
            Verdict::Computed => "computed",
        }
    }

    /// `Valid` or `Invalid`.
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Valid
        } else {
            Verdict::Invalid
        }
    }
}

/// Result of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// Command echo, e.g. `check lie`.
    pub command: String,
    /// Input path as given, if any.
    pub input: Option<String>,
    /// Seed in effect.
    pub seed: u64,
    /// Outcome.
    pub verdict: Verdict,
    /// Command-specific data; object keys are sorted on output.
    pub result: Value,
    /// Lines of the text rendering.
    pub summary: Vec<String>,
    /// Wall-clock milliseconds, when requested.
    pub timing_ms: Option<u128>,
}

impl Report {
    /// Process exit code for this report.
    pub fn exit_code(&self) -> u8 {
        if self.verdict == Verdict::Invalid {
            EXIT_INVALID
        } else {
            EXIT_OK
        }
    }

    /// The full JSON document.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("input".into(), json!(self.input));
        m.insert("seed".into(), json!(self.seed));
        m.insert("verdict".into(), json!(self.verdict.name()));
        m.insert("result".into(), self.result.clone());
        if let Some(t) = self.timing_ms {
            m.insert("timing_ms".into(), json!(t as u64));
        }
        Value::Object(m)
    }

    /// Render in the requested format, ending with a newline.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = format!("{}: {}\n", self.command, self.verdict.name());
                for line in &self.summary {
                    s.push_str("  ");
                    s.push_str(line);
                    s.push('\n');
                }
                if let Some(t) = self.timing_ms {
                    s.push_str(&format!("  time: {t} ms\n"));
                }
                s
            }
        }
    }
}

/// Rationals as strings.
pub fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(format_rational(r))).collect())
}

/// A validation report as JSON.
pub fn check_json(r: &CheckReport) -> Value {
    json!({
        "valid": r.valid,
        "failure": r.failure,
        "residual": r.residual.as_deref().map(rationals),
    })
}

/// One summary line for a validation report.
pub fn check_line(name: &str, r: &CheckReport) -> String {
    match &r.failure {
        None if r.valid => format!("{name}: holds"),
        Some(f) => format!("{name}: fails ({f})"),
        None => format!("{name}: fails"),
    }
}
