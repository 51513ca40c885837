//! Report envelope and serialization: one JSON shape for every command,
//! plain CSV rows for the grid commands. Field order is fixed by struct
//! declaration and floats print shortest-round-trip, so identical runs
//! serialize to identical bytes.

use serde::Serialize;
use std::io::{self, Write};
use std::path::Path;

#[derive(Serialize)]
pub struct Report<R: Serialize> {
    pub config: ConfigEcho,
    pub results: R,
    pub provenance: Provenance,
}

/// Echo of the validated run configuration; optional fields appear only
/// when the command uses them.
#[derive(Serialize, Default)]
pub struct ConfigEcho {
    pub command: &'static str,
    pub f: String,
    pub base: u32,
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upto: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decades: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    pub tol: f64,
    pub max_bits: u32,
    /// Requested worker count; 0 means all cores.
    pub threads: usize,
    pub format: &'static str,
}

/// Runtime facts a reader needs to reproduce the bytes: library version,
/// effective thread count, and how often certified evaluation had to climb
/// the precision ladder while producing these numbers.
#[derive(Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub threads: usize,
    pub sequential: bool,
    pub escalations: u64,
}

pub fn emit_json<R: Serialize>(report: &Report<R>, out: Option<&Path>) -> io::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(report)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    bytes.push(b'\n');
    write_bytes(out, &bytes)
}

pub fn emit_csv(header: &str, rows: &[String], out: Option<&Path>) -> io::Result<()> {
    let mut text = String::with_capacity(header.len() + 1 + rows.iter().map(|r| r.len() + 1).sum::<usize>());
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    write_bytes(out, text.as_bytes())
}

fn write_bytes(out: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)?;
            lock.flush()
        }
    }
}

/// Digits as compact text: one character per digit up to base 10, dotted
/// decimal values above.
pub fn fmt_digits(digits: &[u8], base: u32) -> String {
    if base <= 10 {
        digits.iter().map(|&d| char::from(b'0' + d)).collect()
    } else {
        digits
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_formatting() {
        assert_eq!(fmt_digits(&[1, 2, 3], 10), "123");
        assert_eq!(fmt_digits(&[11, 0, 255], 256), "11.0.255");
        assert_eq!(fmt_digits(&[], 10), "");
    }

    #[test]
    fn json_is_stable() {
        let report = Report {
            config: ConfigEcho {
                command: "generate",
                f: "1^3/2".into(),
                base: 10,
                mode: "primes",
                digits: Some(100),
                ..ConfigEcho::default()
            },
            results: serde_json::json!({"ok": true}),
            provenance: Provenance {
                version: "0.0.0",
                threads: 1,
                sequential: true,
                escalations: 0,
            },
        };
        let a = serde_json::to_string(&report).unwrap();
        let b = serde_json::to_string(&report).unwrap();
        assert_eq!(a, b);
        assert!(a.find("\"config\"").unwrap() < a.find("\"results\"").unwrap());
        assert!(a.find("\"results\"").unwrap() < a.find("\"provenance\"").unwrap());
        // unused optional fields stay out of the echo
        assert!(!a.contains("\"upto\""));
    }
}
