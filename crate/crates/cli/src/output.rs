use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::CliError;

/// A CSV table whose first line echoes the configuration.
pub struct Table {
    comment: String,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(cfg: &ExperimentConfig, header: &[&str]) -> Self {
        let mut t = Table { comment: format!("# config: {}\n", cfg.to_json()), writer: csv::Writer::from_writer(Vec::new()) };
        t.writer.write_record(header).expect("writing to memory");
        t
    }

    pub fn row(&mut self, fields: &[String]) {
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn into_string(self) -> String {
        let body = self.writer.into_inner().expect("flushing to memory");
        self.comment + &String::from_utf8(body).expect("utf-8 fields")
    }
}

/// Reals in shortest round-trip scientific form.
pub fn real(x: f64) -> String {
    format!("{x:e}")
}

pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// Everything a command produces: the main CSV, extra files and notes for
/// stderr.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub main: String,
    pub extra: Vec<(PathBuf, String)>,
    pub notes: Vec<String>,
}

impl Output {
    pub fn write(&self, out: Option<&Path>) -> Result<(), CliError> {
        let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
        match out {
            Some(p) => std::fs::write(p, &self.main).map_err(|e| io(p, e))?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(self.main.as_bytes()).map_err(|e| io(Path::new("<stdout>"), e))?;
            }
        }
        for (p, text) in &self.extra {
            std::fs::write(p, text).map_err(|e| io(p, e))?;
        }
        let mut notes = String::new();
        for n in &self.notes {
            writeln!(notes, "{n}").expect("writing to String");
        }
        eprint!("{notes}");
        Ok(())
    }
}
