//! Line-oriented JSON reports: one record per check, in suite order.

use std::io::{self, Write};
use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub status: Status,
    pub witness: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Record {
    pub fn new(name: impl Into<String>, status: Status, witness: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status,
            witness: witness.into(),
            timing_ms: None,
        }
    }

    pub fn check(name: impl Into<String>, ok: bool, witness: impl Into<String>) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail }, witness)
    }
}

/// Runs `f` and attaches its wall time when `timed` is set.
pub fn timed(timed: bool, f: impl FnOnce() -> Record) -> Record {
    let start = Instant::now();
    let mut rec = f();
    if timed {
        rec.timing_ms = Some(elapsed_ms(start));
    }
    rec
}

/// Milliseconds since `start`, rounded to microseconds.
pub fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn push(&mut self, rec: Record) {
        self.records.push(rec);
    }

    pub fn any_fail(&self) -> bool {
        self.records.iter().any(|r| r.status == Status::Fail)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        for rec in &self.records {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

impl Extend<Record> for Report {
    fn extend<I: IntoIterator<Item = Record>>(&mut self, iter: I) {
        self.records.extend(iter);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_one_line_per_record() {
        let mut r = Report::default();
        r.push(Record::check("a", true, "0"));
        r.push(Record::new("b", Status::Degenerate, "Pf = 0"));
        let mut buf = Vec::new();
        r.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "{\"name\":\"a\",\"status\":\"pass\",\"witness\":\"0\"}\n\
             {\"name\":\"b\",\"status\":\"degenerate\",\"witness\":\"Pf = 0\"}\n"
        );
        assert!(!r.any_fail());
    }

    #[test]
    fn timing_is_opt_in() {
        assert!(timed(false, || Record::check("x", true, "")).timing_ms.is_none());
        assert!(timed(true, || Record::check("x", true, "")).timing_ms.is_some());
    }
}
