//! Verification reports and their JSON/CSV renderings.

use std::io::Write;
use std::time::Instant;

use serde::ser::Serializer;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Residual {
    /// The check is an exact identity.
    Exact,
    Value(f64),
}

impl Serialize for Residual {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Residual::Exact => s.serialize_str("exact"),
            Residual::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl std::fmt::Display for Residual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Residual::Exact => write!(f, "exact"),
            Residual::Value(v) => write!(f, "{v:e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub residual: Residual,
    /// Omitted unless timings were requested, so that reports are
    /// reproducible byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub overall_pass: bool,
}

impl VerificationReport {
    pub fn new(suite: &str, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let overall_pass = checks.iter().all(|c| c.status == Status::Pass);
        VerificationReport { suite: suite.to_string(), checks, overall_pass }
    }
}

/// Collects checks for one suite, timing each.
pub struct Recorder {
    timings: bool,
    checks: Vec<Check>,
}

impl Recorder {
    pub fn new(timings: bool) -> Self {
        Recorder { timings, checks: Vec::new() }
    }

    /// Runs `f`, which returns `(passed, residual, note)`. An error
    /// becomes a failed check carrying the message.
    pub fn check<E: std::fmt::Display>(
        &mut self,
        name: impl Into<String>,
        f: impl FnOnce() -> Result<(bool, Residual, Option<String>), E>,
    ) {
        let t = Instant::now();
        let (ok, residual, note) = match f() {
            Ok(v) => v,
            Err(e) => (false, Residual::Value(f64::NAN), Some(e.to_string())),
        };
        let runtime_ms = self.timings.then(|| t.elapsed().as_millis() as u64);
        self.checks.push(Check { name: name.into(), status: Status::from_bool(ok), residual, runtime_ms, note });
    }

    /// An exact check.
    pub fn exact<E: std::fmt::Display>(&mut self, name: impl Into<String>, f: impl FnOnce() -> Result<bool, E>) {
        self.check(name, || f().map(|ok| (ok, Residual::Exact, None)))
    }

    /// A numeric residual compared against `tol`.
    pub fn below<E: std::fmt::Display>(&mut self, name: impl Into<String>, tol: f64, f: impl FnOnce() -> Result<f64, E>) {
        self.check(name, || f().map(|r| (r < tol, Residual::Value(r), None)))
    }

    pub fn finish(self, suite: &str) -> VerificationReport {
        VerificationReport::new(suite, self.checks)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    reports: &'a [VerificationReport],
    overall_pass: bool,
}

pub fn write_json(out: &mut dyn Write, reports: &[VerificationReport]) -> std::io::Result<()> {
    let overall_pass = reports.iter().all(|r| r.overall_pass);
    serde_json::to_writer_pretty(&mut *out, &Summary { reports, overall_pass })?;
    writeln!(out)
}

pub fn write_csv(out: &mut dyn Write, reports: &[VerificationReport], timings: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["suite", "check", "status", "residual"];
    if timings {
        header.push("runtime_ms");
    }
    header.push("note");
    w.write_record(&header)?;
    for r in reports {
        for c in &r.checks {
            let mut rec = vec![
                r.suite.clone(),
                c.name.clone(),
                if c.status == Status::Pass { "pass".into() } else { "fail".into() },
                c.residual.to_string(),
            ];
            if timings {
                rec.push(c.runtime_ms.map(|m| m.to_string()).unwrap_or_default());
            }
            rec.push(c.note.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}
