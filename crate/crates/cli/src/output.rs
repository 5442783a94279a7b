use std::fmt::Display;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

const INPUT: u8 = 2;
const OUTPUT: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Display) -> Self {
        Self {
            code: INPUT,
            message: message.to_string(),
        }
    }

    pub fn output(message: impl Display) -> Self {
        Self {
            code: OUTPUT,
            message: message.to_string(),
        }
    }
}

impl From<unli_core::Error> for Failure {
    fn from(e: unli_core::Error) -> Self {
        Failure::input(e)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Format {
    pub json: bool,
    pub round3: bool,
}

impl Format {
    pub fn number(&self, x: f64) -> String {
        if self.round3 {
            format!("{:.3}", x)
        } else {
            significant(x, 10)
        }
    }
}

/// `x` to `digits` significant digits, shortest form, always with a decimal
/// point or exponent (`10.0`, `0.3989422804`, `5.725571223e-300`).
pub fn significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r: f64 = format!("{:.*e}", digits - 1, x).parse().expect("float round trip");
    let a = r.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        return format!("{r:e}");
    }
    let s = r.to_string();
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

/// Machine-readable result of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl OutputRecord {
    pub fn print(&self) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(self).expect("record serializes");
        print_line(&text)
    }
}

pub fn print_line(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    writeln!(out, "{text}")
        .and_then(|_| out.flush())
        .map_err(|e| Failure::output(format!("standard output: {e}")))
}

pub fn write_stdout(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::output(format!("standard output: {e}")))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| Failure::output(format!("{}: {e}", path.display())))
}

/// CSV with a header row, to `path` or standard output.
pub fn write_csv<const N: usize>(
    path: Option<&Path>,
    header: &[&str; N],
    records: impl Iterator<Item = [String; N]>,
) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_failure = |e: csv::Error| Failure::output(e);
    w.write_record(header).map_err(to_failure)?;
    for r in records {
        w.write_record(&r).map_err(to_failure)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::output(e.error()))?;
    match path {
        Some(p) => write_file(p, &bytes),
        None => write_stdout(&bytes),
    }
}
