//! Check reports: one `PASS|FAIL|WARN <id> <detail>` line per check, plus a summary.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Warn,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub status: Status,
    pub id: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub title: String,
    pub lines: Vec<Line>,
    /// Notes printed above the lines, e.g. that a formal substitution replaced analytic continuation.
    pub banners: Vec<String>,
}

/// Printed on every report whose checks substitute terminating polynomial data for convergent series.
pub const SURROGATE_BANNER: &str =
    "NOTE: analytic continuation is replaced by formal substitution; specialized Novikov variables must have terminating support";

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report { title: title.into(), lines: Vec::new(), banners: Vec::new() }
    }

    pub fn push(&mut self, status: Status, id: impl Into<String>, detail: impl Into<String>) {
        self.lines.push(Line { status, id: id.into(), detail: detail.into() });
    }

    pub fn pass(&mut self, id: impl Into<String>, detail: impl Into<String>) {
        self.push(Status::Pass, id, detail);
    }

    pub fn fail(&mut self, id: impl Into<String>, detail: impl Into<String>) {
        self.push(Status::Fail, id, detail);
    }

    pub fn warn(&mut self, id: impl Into<String>, detail: impl Into<String>) {
        self.push(Status::Warn, id, detail);
    }

    pub fn check(&mut self, ok: bool, id: impl Into<String>, detail: impl Into<String>) {
        self.push(if ok { Status::Pass } else { Status::Fail }, id, detail);
    }

    pub fn banner(&mut self, text: impl Into<String>) {
        let t = text.into();
        if !self.banners.contains(&t) {
            self.banners.push(t);
        }
    }

    pub fn extend(&mut self, other: Report) {
        for b in other.banners {
            self.banner(b);
        }
        self.lines.extend(other.lines);
    }

    pub fn count(&self, s: Status) -> usize {
        self.lines.iter().filter(|l| l.status == s).count()
    }

    /// No FAIL lines.
    pub fn ok(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn status_of(&self, id: &str) -> Option<Status> {
        self.lines.iter().find(|l| l.id == id).map(|l| l.status)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for b in &self.banners {
            s.push_str(b);
            s.push('\n');
        }
        for l in &self.lines {
            s.push_str(&format!("{} {} {}\n", l.status, l.id, l.detail));
        }
        s.push_str(&format!(
            "--\nsummary {}: {} pass, {} fail, {} warn\nresult {}\n",
            self.title,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Warn),
            if self.ok() { "PASS" } else { "FAIL" }
        ));
        s
    }
}
