use std::fmt::Write as _;
use std::time::Instant;

use fracfib::exec::{self, Exec};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One checked computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Item {
    pub name: String,
    pub inputs: Value,
    pub expected: Option<Value>,
    pub computed: Value,
    pub status: Status,
    pub elapsed_ms: f64,
}

impl Item {
    pub fn new(name: impl Into<String>, inputs: Value, computed: Value, status: Status) -> Item {
        Item {
            name: name.into(),
            inputs,
            expected: None,
            computed,
            status,
            elapsed_ms: 0.0,
        }
    }

    /// Passes iff `computed == expected`.
    pub fn expect(name: impl Into<String>, inputs: Value, expected: Value, computed: Value) -> Item {
        let status = Status::from_bool(computed == expected);
        Item {
            expected: Some(expected),
            ..Item::new(name, inputs, computed, status)
        }
    }

    pub fn error(name: impl Into<String>, inputs: Value, err: impl std::fmt::Display) -> Item {
        Item::new(name, inputs, json!({ "error": err.to_string() }), Status::Fail)
    }

    pub fn with_expected(mut self, expected: Value) -> Item {
        self.expected = Some(expected);
        self
    }

    /// Replaces the displayed value, keeping the status.
    pub fn with_computed(mut self, computed: Value) -> Item {
        self.computed = computed;
        self
    }
}

pub type Job = Box<dyn FnOnce() -> Item + Send>;

/// Runs jobs, possibly concurrently, keeping input order and timing each.
pub fn run_jobs(exec: Exec, jobs: Vec<Job>) -> Vec<Item> {
    exec::map(exec, jobs, |job| {
        let start = Instant::now();
        let mut item = job();
        item.elapsed_ms = elapsed_ms(start);
        item
    })
}

pub fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e4).round() / 10.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub items: Vec<Item>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

impl RunReport {
    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for item in &self.items {
            match item.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Inconclusive => t.inconclusive += 1,
            }
        }
        t
    }

    /// 0 when everything passed, 1 on any failure, 2 when something was
    /// inconclusive and nothing failed.
    pub fn exit_code(&self) -> i32 {
        let t = self.tally();
        if t.fail > 0 {
            1
        } else if t.inconclusive > 0 {
            2
        } else {
            0
        }
    }

    fn summary(&self) -> Value {
        let t = self.tally();
        json!({
            "kind": "summary",
            "command": self.command,
            "pass": t.pass,
            "fail": t.fail,
            "inconclusive": t.inconclusive,
            "wall_ms": self.wall_ms,
            "exit_code": self.exit_code(),
        })
    }

    /// One JSON record per item, then a summary record.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            let mut v = serde_json::to_value(item).expect("items serialize");
            v.as_object_mut()
                .expect("item is an object")
                .insert("kind".into(), "item".into());
            writeln!(out, "{v}").unwrap();
        }
        writeln!(out, "{}", self.summary()).unwrap();
        out
    }

    /// An aligned table with the same fields as [`RunReport::to_json_lines`].
    pub fn to_table(&self) -> String {
        let header = ["status", "name", "inputs", "expected", "computed", "elapsed_ms"];
        let rows: Vec<[String; 6]> = self
            .items
            .iter()
            .map(|i| {
                [
                    i.status.as_str().to_string(),
                    i.name.clone(),
                    i.inputs.to_string(),
                    i.expected.as_ref().map_or_else(|| "-".into(), Value::to_string),
                    i.computed.to_string(),
                    i.elapsed_ms.to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[String]| {
            let mut s = String::new();
            for (idx, (cell, w)) in cells.iter().zip(widths).enumerate() {
                if idx + 1 == cells.len() {
                    s.push_str(cell);
                } else {
                    write!(s, "{cell:<w$}  ").unwrap();
                }
            }
            writeln!(out, "{}", s.trim_end()).unwrap();
        };
        line(&header.map(String::from));
        for row in &rows {
            line(row);
        }
        let t = self.tally();
        writeln!(
            out,
            "command: {}  pass: {}  fail: {}  inconclusive: {}  wall_ms: {}  exit_code: {}",
            self.command,
            t.pass,
            t.fail,
            t.inconclusive,
            self.wall_ms,
            self.exit_code()
        )
        .unwrap();
        out
    }
}
