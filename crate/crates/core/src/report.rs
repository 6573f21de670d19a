//! Pass/fail records produced by the verification routines.

use std::fmt;

use serde::Serialize;

/// Whether an identity is a theorem or a numerically observed statement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Proved,
    Observed,
    /// Informational measurement with nothing asserted.
    Info,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    #[default]
    Pass,
    Fail,
    /// Holds numerically but rests on an observation that failed at some level.
    Conditional,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Conditional => "conditional",
            Status::Info => "info",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Check {
    pub identity: String,
    pub level: i64,
    pub kind: Kind,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a pass/fail entry.
    pub fn check(
        &mut self,
        identity: &str,
        level: impl TryInto<i64>,
        kind: Kind,
        ok: bool,
        detail: impl Into<String>,
    ) {
        self.push(
            identity,
            level,
            kind,
            if ok { Status::Pass } else { Status::Fail },
            detail,
        );
    }

    /// Records a pass/fail entry that downgrades a pass to `Conditional`
    /// when its hypotheses are not all known to hold.
    pub fn check_conditional(
        &mut self,
        identity: &str,
        level: impl TryInto<i64>,
        ok: bool,
        hypotheses_hold: bool,
        detail: impl Into<String>,
    ) {
        let status = match (ok, hypotheses_hold) {
            (false, _) => Status::Fail,
            (true, true) => Status::Pass,
            (true, false) => Status::Conditional,
        };
        self.push(identity, level, Kind::Observed, status, detail);
    }

    pub fn info(&mut self, identity: &str, level: impl TryInto<i64>, detail: impl Into<String>) {
        self.push(identity, level, Kind::Info, Status::Info, detail);
    }

    fn push(
        &mut self,
        identity: &str,
        level: impl TryInto<i64>,
        kind: Kind,
        status: Status,
        detail: impl Into<String>,
    ) {
        self.checks.push(Check {
            identity: identity.to_string(),
            level: level.try_into().unwrap_or(i64::MAX),
            kind,
            status,
            detail: detail.into(),
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn proved_failures(&self) -> impl Iterator<Item = &Check> {
        self.failures().filter(|c| c.kind == Kind::Proved)
    }

    /// Entries for one identity, in insertion order.
    pub fn find<'a>(&'a self, identity: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.identity == identity)
    }

    /// Status of `identity` at `level`, if it was checked.
    pub fn status(&self, identity: &str, level: i64) -> Option<Status> {
        self.checks
            .iter()
            .find(|c| c.identity == identity && c.level == level)
            .map(|c| c.status)
    }
}
