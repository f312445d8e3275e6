//! Machine-readable verification reports.

use std::fmt;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The check's hypothesis does not hold, so its conclusion is not tested.
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not_applicable",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which way a witness is compared against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// `measured ≥ bound - tolerance`.
    AtLeast,
    /// `measured ≤ bound + tolerance`.
    AtMost,
}

/// A concrete point with its measured value and the required bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub label: String,
    pub point: Vec<f64>,
    pub measured: f64,
    pub bound: f64,
    pub kind: Bound,
}

impl Witness {
    pub fn at_least(label: impl Into<String>, point: Vec<f64>, measured: f64, bound: f64) -> Self {
        Witness { label: label.into(), point, measured, bound, kind: Bound::AtLeast }
    }

    pub fn at_most(label: impl Into<String>, point: Vec<f64>, measured: f64, bound: f64) -> Self {
        Witness { label: label.into(), point, measured, bound, kind: Bound::AtMost }
    }

    /// Signed distance to the bound, positive when satisfied; NaN counts as
    /// an infinite violation.
    pub fn slack(&self) -> f64 {
        let s = match self.kind {
            Bound::AtLeast => self.measured - self.bound,
            Bound::AtMost => self.bound - self.measured,
        };
        if s.is_nan() {
            f64::NEG_INFINITY
        } else {
            s
        }
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        self.slack() >= -tolerance
    }

    fn compact(&self) -> String {
        let pts: Vec<String> = self.point.iter().map(|v| format!("{v:.6e}")).collect();
        let op = match self.kind {
            Bound::AtLeast => ">=",
            Bound::AtMost => "<=",
        };
        format!("{} ({}): {:.6e} {op} {:.6e}", self.label, pts.join(" "), self.measured, self.bound)
    }
}

/// Outcome of one check. Failing reports always carry a violating witness.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check_name: String,
    pub status: Status,
    /// Violations (all of them, up to [`MAX_WITNESSES`]), or the tightest
    /// satisfied point when nothing is violated.
    pub witnesses: Vec<Witness>,
    pub tolerance: f64,
    /// Number of points evaluated.
    pub evaluated: usize,
    /// Auxiliary measured quantities.
    pub notes: Vec<(String, f64)>,
}

/// Cap on stored violating witnesses.
pub const MAX_WITNESSES: usize = 1000;

impl VerificationReport {
    /// Pass iff every witness holds within `tolerance`.
    pub fn from_witnesses(name: impl Into<String>, tolerance: f64, all: impl IntoIterator<Item = Witness>) -> Self {
        let mut failing = Vec::new();
        let mut tightest: Option<Witness> = None;
        let mut evaluated = 0;
        for w in all {
            evaluated += 1;
            if tightest.as_ref().map_or(true, |t| w.slack() < t.slack()) {
                tightest = Some(w.clone());
            }
            if !w.holds(tolerance) && failing.len() < MAX_WITNESSES {
                failing.push(w);
            }
        }
        let status = if failing.is_empty() { Status::Pass } else { Status::Fail };
        let witnesses = if failing.is_empty() { tightest.into_iter().collect() } else { failing };
        VerificationReport { check_name: name.into(), status, witnesses, tolerance, evaluated, notes: Vec::new() }
    }

    /// Like [`Self::from_witnesses`] but stores every witness.
    pub fn keep_all(name: impl Into<String>, tolerance: f64, witnesses: Vec<Witness>) -> Self {
        let status = if witnesses.iter().all(|w| w.holds(tolerance)) { Status::Pass } else { Status::Fail };
        VerificationReport {
            check_name: name.into(),
            status,
            evaluated: witnesses.len(),
            witnesses,
            tolerance,
            notes: Vec::new(),
        }
    }

    pub fn not_applicable(name: impl Into<String>, tolerance: f64, witnesses: Vec<Witness>) -> Self {
        VerificationReport {
            check_name: name.into(),
            status: Status::NotApplicable,
            evaluated: witnesses.len(),
            witnesses,
            tolerance,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, key: impl Into<String>, value: f64) -> Self {
        self.notes.push((key.into(), value));
        self
    }

    pub fn note(&self, key: &str) -> Option<f64> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Pass or not-applicable.
    pub fn ok(&self) -> bool {
        self.status != Status::Fail
    }

    /// Witness with the smallest slack.
    pub fn worst(&self) -> Option<&Witness> {
        self.witnesses.iter().min_by(|a, b| a.slack().partial_cmp(&b.slack()).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// `label,point,measured,bound,slack` for every stored witness.
    pub fn write_witness_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "label,point,measured,bound,slack")?;
        for x in &self.witnesses {
            let pts: Vec<String> = x.point.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{},{},{:.16e},{:.16e},{:.16e}", x.label, pts.join(" "), x.measured, x.bound, x.slack())?;
        }
        Ok(())
    }
}

/// `name,status,worst_witness,tolerance`, one line per report.
pub fn write_summary<W: Write>(reports: &[VerificationReport], mut w: W) -> std::io::Result<()> {
    writeln!(w, "name,status,worst_witness,tolerance")?;
    for r in reports {
        let worst = r.worst().map(|x| x.compact()).unwrap_or_default().replace(',', ";");
        writeln!(w, "{},{},\"{}\",{:.3e}", r.check_name, r.status, worst, r.tolerance)?;
    }
    Ok(())
}
