//! CSV files with a commented metadata header.
//!
//! Numbers are written with 17 significant digits, `,` as delimiter and `\n`
//! line endings. Header lines start with `#`: `# cfg ` lines hold the full
//! effective configuration, `# meta ` lines run statistics, and a single
//! `# timestamp ` line (optional) the wall-clock time of the run.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::RunConfig;
use crate::CliError;

/// `x` with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Header block shared by every file of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub command: String,
    pub config: Vec<String>,
    pub stats: Vec<(String, String)>,
    pub timestamp: Option<u64>,
}

impl Metadata {
    pub fn new(command: &str, config: &RunConfig, timestamp: bool) -> Self {
        let timestamp = timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            command: command.to_string(),
            config: config.flat_lines(),
            stats: Vec::new(),
            timestamp,
        }
    }

    pub fn stat(mut self, key: &str, value: impl ToString) -> Self {
        self.stats.push((key.to_string(), value.to_string()));
        self
    }

    fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# tlfdeco {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for l in &self.config {
            let _ = writeln!(s, "# cfg {l}");
        }
        for (k, v) in &self.stats {
            let _ = writeln!(s, "# meta {k} = {v}");
        }
        if let Some(t) = self.timestamp {
            let _ = writeln!(s, "# timestamp {t}");
        }
        s
    }
}

/// Rows of already formatted cells.
pub fn write_csv(path: &Path, meta: &Metadata, columns: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut s = meta.render();
    s.push_str(&columns.join(","));
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, s).map_err(|e| CliError::io(path, e))
}

/// Numeric columns of equal length.
pub fn write_columns(path: &Path, meta: &Metadata, columns: &[(&str, &[f64])]) -> Result<(), CliError> {
    let n = columns.first().map_or(0, |c| c.1.len());
    debug_assert!(columns.iter().all(|c| c.1.len() == n));
    let names: Vec<&str> = columns.iter().map(|c| c.0).collect();
    let rows: Vec<Vec<String>> = (0..n).map(|i| columns.iter().map(|c| num(c.1[i])).collect()).collect();
    write_csv(path, meta, &names, &rows)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// The data rows of a CSV file: everything after the comment block.
pub fn csv_body(text: &str) -> &str {
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if !line.starts_with('#') {
            break;
        }
        offset += line.len();
    }
    &text[offset..]
}

/// The configuration lines embedded in a CSV header, ready to be parsed as a
/// config file.
pub fn embedded_config(text: &str) -> String {
    text.lines()
        .filter_map(|l| l.strip_prefix("# cfg "))
        .fold(String::new(), |mut s, l| {
            s.push_str(l);
            s.push('\n');
            s
        })
}
