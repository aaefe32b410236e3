//! Incremental, resumable record output.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::OutputFormat;
use super::record::{CsvRow, ExperimentRecord, PointKey, CSV_HEADER};
use crate::error::{Error, Result};

/// Appends BER records to a file (or stdout), one complete line at a time.
///
/// Opening an existing file collects the points it already holds so a rerun
/// of the same configuration skips them. A trailing partial line left by an
/// interrupted write is discarded.
#[derive(Debug)]
pub struct RecordSink {
    format: OutputFormat,
    path: Option<PathBuf>,
    completed: HashMap<PointKey, ExperimentRecord>,
}

impl RecordSink {
    pub fn stdout(format: OutputFormat) -> Self {
        Self {
            format,
            path: None,
            completed: HashMap::new(),
        }
    }

    pub fn open(path: &Path, format: OutputFormat) -> Result<Self> {
        let mut completed = HashMap::new();
        if path.exists() {
            truncate_partial_line(path)?;
            let reader = BufReader::new(File::open(path)?);
            match format {
                OutputFormat::Csv => {
                    let mut rdr = csv::Reader::from_reader(reader);
                    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
                    if header != CSV_HEADER {
                        return Err(Error::Config(format!(
                            "{} exists with a different header; refusing to append",
                            path.display()
                        )));
                    }
                    for row in rdr.deserialize::<CsvRow>() {
                        let rec = ExperimentRecord::from(row?);
                        completed.insert(rec.key(), rec);
                    }
                }
                OutputFormat::Json => {
                    for line in reader.lines() {
                        let line = line?;
                        if line.trim().is_empty() {
                            continue;
                        }
                        let rec: ExperimentRecord = serde_json::from_str(&line)?;
                        completed.insert(rec.key(), rec);
                    }
                }
            }
        }
        let is_empty = !path.exists() || std::fs::metadata(path)?.len() == 0;
        if is_empty && format == OutputFormat::Csv {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{CSV_HEADER}")?;
        }
        Ok(Self {
            format,
            path: Some(path.to_path_buf()),
            completed,
        })
    }

    /// Sink for `path`, or stdout when `None`. Stdout output prints the CSV
    /// header immediately.
    pub fn for_config(path: Option<&Path>, format: OutputFormat) -> Result<Self> {
        match path {
            Some(p) => Self::open(p, format),
            None => {
                if format == OutputFormat::Csv {
                    println!("{CSV_HEADER}");
                }
                Ok(Self::stdout(format))
            }
        }
    }

    /// Record previously written for `key`.
    pub fn completed(&self, key: &PointKey) -> Option<&ExperimentRecord> {
        self.completed.get(key)
    }

    pub fn write(&mut self, rec: &ExperimentRecord) -> Result<()> {
        let line = match self.format {
            OutputFormat::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
                w.serialize(CsvRow::from(rec))?;
                String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                    .expect("csv output is utf-8")
            }
            OutputFormat::Json => format!("{}\n", serde_json::to_string(rec)?),
        };
        match &self.path {
            Some(p) => {
                let mut f = OpenOptions::new().create(true).append(true).open(p)?;
                f.write_all(line.as_bytes())?;
                f.flush()?;
            }
            None => {
                let mut out = io::stdout().lock();
                out.write_all(line.as_bytes())?;
                out.flush()?;
            }
        }
        self.completed.insert(rec.key(), rec.clone());
        Ok(())
    }
}

fn truncate_partial_line(path: &Path) -> Result<()> {
    let bytes = std::fs::read(path)?;
    if bytes.is_empty() || bytes.ends_with(b"\n") {
        return Ok(());
    }
    let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    OpenOptions::new().write(true).open(path)?.set_len(keep as u64)?;
    Ok(())
}

/// Writes a batch of rows as CSV (with header) or JSON Lines.
pub fn write_rows<W: Write, T: Serialize>(out: W, format: OutputFormat, rows: &[T]) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let mut out = out;
            for r in rows {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}
