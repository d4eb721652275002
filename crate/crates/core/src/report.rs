//! Reports: a list of checks, each carrying its tolerance and oracle, plus
//! free-form notes and attached data. Rendered as JSON, CSV or Markdown.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{Error, Result};

/// Version of the JSON report and instance layouts.
pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Md,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Md),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

/// Where an expected value comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "snake_case")]
pub enum Oracle {
    /// A published value.
    Reference,
    /// A value that holds by construction.
    Identity,
    /// An independent computation, named.
    Derived(String),
}

impl Oracle {
    pub fn derived(name: impl Into<String>) -> Self {
        Oracle::Derived(name.into())
    }
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Oracle::Reference => f.write_str("reference"),
            Oracle::Identity => f.write_str("identity"),
            Oracle::Derived(name) => write!(f, "derived:{name}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    /// `None` for exact or boolean checks.
    pub tolerance: Option<f64>,
    pub oracle: Oracle,
    pub passed: bool,
}

impl Check {
    /// `|computed − expected| ≤ tol`.
    pub fn close(name: impl Into<String>, expected: f64, computed: f64, tol: f64, oracle: Oracle) -> Self {
        Check {
            name: name.into(),
            expected: fmt_f64(expected),
            computed: fmt_f64(computed),
            tolerance: Some(tol),
            passed: (computed - expected).abs() <= tol,
            oracle,
        }
    }

    /// `computed ≤ bound + tol`.
    pub fn at_most(name: impl Into<String>, bound: f64, computed: f64, tol: f64, oracle: Oracle) -> Self {
        Check {
            name: name.into(),
            expected: format!("<= {}", fmt_f64(bound)),
            computed: fmt_f64(computed),
            tolerance: Some(tol),
            passed: computed <= bound + tol,
            oracle,
        }
    }

    /// `computed ≥ bound − tol`.
    pub fn at_least(name: impl Into<String>, bound: f64, computed: f64, tol: f64, oracle: Oracle) -> Self {
        Check {
            name: name.into(),
            expected: format!(">= {}", fmt_f64(bound)),
            computed: fmt_f64(computed),
            tolerance: Some(tol),
            passed: computed >= bound - tol,
            oracle,
        }
    }

    /// Exact comparison of displayed values.
    pub fn equal(name: impl Into<String>, expected: impl fmt::Display, computed: impl fmt::Display, oracle: Oracle) -> Self {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        Check { name: name.into(), passed: expected == computed, expected, computed, tolerance: None, oracle }
    }

    /// A predicate with a description of what was observed.
    pub fn holds(name: impl Into<String>, ok: bool, computed: impl Into<String>, oracle: Oracle) -> Self {
        Check { name: name.into(), expected: "true".into(), computed: computed.into(), tolerance: None, oracle, passed: ok }
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.12e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: Vec<String>,
    pub config: Value,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub data: Map<String, Value>,
    pub passed: bool,
    /// The only field that differs between identical runs.
    pub wall_clock_ms: f64,
}

impl Report {
    pub fn new<S: Into<String>>(command: impl IntoIterator<Item = S>, config: &impl Serialize) -> Self {
        Report {
            schema: SCHEMA,
            command: command.into_iter().map(Into::into).collect(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            checks: Vec::new(),
            notes: Vec::new(),
            data: Map::new(),
            passed: true,
            wall_clock_ms: 0.0,
        }
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.passed &= c.passed;
        self.checks.push(c);
        self
    }

    pub fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.notes.push(s.into());
        self
    }

    pub fn attach(&mut self, key: &str, value: &impl Serialize) -> Result<()> {
        self.data.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn finish(&mut self, started: Instant) {
        self.passed = self.checks.iter().all(|c| c.passed);
        self.wall_clock_ms = started.elapsed().as_secs_f64() * 1e3;
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => self.to_csv(),
            Format::Md => Ok(self.to_markdown()),
        }
    }

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(["name", "expected", "computed", "tolerance", "oracle", "passed"]).map_err(io)?;
        for c in &self.checks {
            let tol = c.tolerance.map(|t| format!("{t:e}")).unwrap_or_default();
            w.write_record([
                c.name.as_str(),
                &c.expected,
                &c.computed,
                &tol,
                &c.oracle.to_string(),
                if c.passed { "true" } else { "false" },
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("utf-8 input"))
    }

    fn to_markdown(&self) -> String {
        let mut s = format!("# {}\n\n", self.command.join(" "));
        s += &format!("verdict: **{}**\n\n", if self.passed { "PASS" } else { "FAIL" });
        s += "```json\n";
        s += &serde_json::to_string_pretty(&self.config).unwrap_or_default();
        s += "\n```\n\n| check | expected | computed | tol | oracle | ok |\n|---|---|---|---|---|---|\n";
        for c in &self.checks {
            let tol = c.tolerance.map(|t| format!("{t:e}")).unwrap_or_else(|| "exact".into());
            let ok = if c.passed { "yes" } else { "**no**" };
            s += &format!("| {} | {} | {} | {} | {} | {} |\n", c.name, c.expected, c.computed, tol, c.oracle, ok);
        }
        if !self.notes.is_empty() {
            s += "\n";
            for n in &self.notes {
                s += &format!("- {n}\n");
            }
        }
        s
    }
}
