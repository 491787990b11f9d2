//! CSV serialization and atomic file writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("output directory {0} does not exist")]
    MissingDir(PathBuf),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Shortest decimal text that parses back to exactly `x`. Plain notation for
/// magnitudes in `[1e-5, 1e16)`, scientific otherwise.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir` that is
/// renamed over the target only once complete.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, OutputError> {
    let path = dir.join(name);
    let io = |source| OutputError::Io {
        path: path.clone(),
        source,
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(&format!(".{name}."))
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(&path).map_err(|e| io(e.error))?;
    Ok(path)
}

/// Fails unless `dir` is an existing directory.
pub fn require_dir(dir: &Path) -> Result<(), OutputError> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(OutputError::MissingDir(dir.to_path_buf()))
    }
}

/// In-memory CSV document with optional leading `#` comment lines.
pub struct CsvDoc {
    comments: String,
    writer: csv::Writer<Vec<u8>>,
}

impl CsvDoc {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header).expect("writes to memory");
        Self {
            comments: String::new(),
            writer,
        }
    }

    pub fn comment(&mut self, text: &str) -> &mut Self {
        self.comments.push_str("# ");
        self.comments.push_str(text);
        self.comments.push('\n');
        self
    }

    pub fn row<I, S>(&mut self, fields: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("writes to memory");
        self
    }

    pub fn floats(&mut self, values: &[f64]) -> &mut Self {
        self.row(values.iter().map(|&v| fmt_f64(v)))
    }

    pub fn into_bytes(self) -> Vec<u8> {
        let mut out = self.comments.into_bytes();
        out.extend(self.writer.into_inner().expect("in-memory writer"));
        out
    }

    pub fn write(self, dir: &Path, name: &str) -> Result<PathBuf, OutputError> {
        write_atomic(dir, name, &self.into_bytes())
    }
}
