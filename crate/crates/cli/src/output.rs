use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dirac_atm::config::Tolerances;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// 14 significant digits; scientific below `1e-3` in magnitude.
pub fn number(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let a = v.abs();
    if a == 0.0 {
        return "0".into();
    }
    if !(1e-3..1e15).contains(&a) {
        return format!("{v:.13e}");
    }
    let digits = (13 - a.log10().floor() as i64).max(0) as usize;
    format!("{v:.digits$}")
}

/// Identity of one run: the command, its effective config and arguments.
pub struct RunHeader {
    pub command: String,
    pub hash: String,
    pub tolerances: Tolerances,
}

impl RunHeader {
    pub fn new(command: &str, effective: &Value, tolerances: Tolerances) -> Self {
        let digest = Sha256::digest(effective.to_string().as_bytes());
        let hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            command: command.into(),
            hash,
            tolerances,
        }
    }

    pub fn line(&self) -> String {
        let t = self.tolerances;
        format!(
            "# dirac-atm {} config_sha256={} residual_tol={} cross_check_tol={} reference_tol={}",
            self.command,
            self.hash,
            number(t.residual),
            number(t.cross_check),
            number(t.reference)
        )
    }

    pub fn json(&self) -> Value {
        let t = self.tolerances;
        json!({
            "command": self.command,
            "config_sha256": self.hash,
            "tolerances": { "residual": t.residual, "cross_check": t.cross_check, "reference": t.reference },
        })
    }
}

/// Writes output files under one directory, each tagged with the run header.
pub struct Sink {
    dir: PathBuf,
    header: RunHeader,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, header: RunHeader) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            header,
            written: Vec::new(),
        })
    }

    pub fn csv(
        &mut self,
        name: &str,
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> std::io::Result<()> {
        let path = self.dir.join(name);
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "{}", self.header.line())?;
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(columns)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        drop(w);
        out.flush()?;
        self.written.push(path);
        Ok(())
    }

    pub fn json(&mut self, name: &str, body: Value) -> std::io::Result<()> {
        let path = self.dir.join(name);
        let doc = json!({ "header": self.header.json(), "body": body });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }
}
