//! Report files: one JSON document per run plus CSV data files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use critdecay::Report;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;
pub const OUT_ENV: &str = "CRITDECAY_OUT";
const DEFAULT_DIR: &str = "critdecay-out";

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub params: Value,
    pub results: Vec<Value>,
    pub checks: Vec<Report>,
    /// Every check held.
    pub holds: bool,
    /// Smallest `1 - lhs/rhs` over all checks; absent when nothing was checked.
    pub worst_margin: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, params: impl Serialize) -> Result<Self> {
        Ok(RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            params: serde_json::to_value(params)?,
            results: Vec::new(),
            checks: Vec::new(),
            holds: true,
            worst_margin: None,
        })
    }

    pub fn result(&mut self, value: impl Serialize) -> Result<()> {
        self.results.push(serde_json::to_value(value)?);
        Ok(())
    }

    pub fn check(&mut self, report: Report) {
        self.holds &= report.holds;
        let m = report.margin();
        self.worst_margin = Some(self.worst_margin.map_or(m, |w: f64| w.min(m)));
        self.checks.push(report);
    }
}

/// Where report files go: the flag, then the config, then `$CRITDECAY_OUT`.
pub fn resolve_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.or(config)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DIR))
}

pub struct Output {
    dir: PathBuf,
    csv_files: Vec<String>,
}

impl Output {
    pub fn create(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output {
            dir,
            csv_files: Vec::new(),
        })
    }

    pub fn csv(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.csv_files.push(name.to_string());
        Ok(())
    }

    pub fn json(&self, name: &str, report: &RunReport) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(report)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// A matplotlib script plotting content and bound against `t` for each
    /// decay CSV written so far.
    pub fn plot_script(&self, name: &str) -> Result<()> {
        let files: Vec<String> = self
            .csv_files
            .iter()
            .filter(|f| f.starts_with("decay_"))
            .map(|f| format!("    {f:?},"))
            .collect();
        let script = format!(
            r#"import csv
import matplotlib.pyplot as plt

files = [
{}
]
fig, ax = plt.subplots()
for name in files:
    with open(name) as fh:
        rows = [r for r in csv.DictReader(fh) if float(r["content"]) > 0]
    if not rows:
        continue
    t = [float(r["t"]) for r in rows]
    line, = ax.semilogy(t, [float(r["content"]) for r in rows], label=name)
    ax.semilogy(t, [float(r["bound"]) for r in rows], "--", color=line.get_color())
ax.set_xlabel("t")
ax.set_ylabel("content of {{|I f| > t}}")
ax.legend(fontsize="small")
fig.savefig("decay.png", dpi=150)
"#,
            files.join("\n")
        );
        fs::write(self.dir.join(name), script)?;
        Ok(())
    }
}
