use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape and encoding of a raw sample file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFile {
    pub file: String,
    pub rows: usize,
    pub cols: usize,
    /// Always `"f64"`.
    pub dtype: String,
    /// Always `"little"`.
    pub byte_order: String,
    /// Always `"sample-major"`: row `i` holds sample `i`.
    pub order: String,
}

impl SampleFile {
    pub fn new(file: &str, rows: usize, cols: usize) -> Self {
        Self {
            file: file.into(),
            rows,
            cols,
            dtype: "f64".into(),
            byte_order: "little".into(),
            order: "sample-major".into(),
        }
    }

    /// Reads the file from `dir`, checking its length against the shape.
    pub fn read(&self, dir: &Path) -> Result<Vec<f64>> {
        if self.dtype != "f64" || self.byte_order != "little" || self.order != "sample-major" {
            return Err(Error::Config(format!(
                "unsupported sample encoding {}/{}/{}",
                self.dtype, self.byte_order, self.order
            )));
        }
        let path = dir.join(&self.file);
        let mut bytes = Vec::new();
        File::open(&path)?.read_to_end(&mut bytes)?;
        let expected = self.rows * self.cols * 8;
        if bytes.len() != expected {
            return Err(Error::Config(format!(
                "{} has {} bytes, expected {expected}",
                path.display(),
                bytes.len()
            )));
        }
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunks of eight bytes")))
            .collect())
    }
}

/// Files written by a run, removed again unless the run commits.
pub(crate) struct OutputGuard {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
    committed: bool,
}

impl OutputGuard {
    pub(crate) fn create(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            created_dir,
            files: Vec::new(),
            committed: false,
        })
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file = File::create(&path)?;
        self.files.push(path);
        Ok(BufWriter::new(file))
    }

    pub(crate) fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    /// Writes rows of `cols` values as little-endian `f64`.
    pub(crate) fn write_samples<'a>(
        &mut self,
        name: &str,
        cols: usize,
        rows: impl Iterator<Item = &'a [f64]>,
    ) -> Result<SampleFile> {
        let mut w = self.open(name)?;
        let mut count = 0;
        for row in rows {
            debug_assert_eq!(row.len(), cols);
            for v in row {
                w.write_all(&v.to_le_bytes())?;
            }
            count += 1;
        }
        w.flush()?;
        Ok(SampleFile::new(name, count, cols))
    }

    /// Writes a numeric table with a header line.
    pub(crate) fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let mut w = self.open(name)?;
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub(crate) fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            // Only succeeds if nothing else was put there.
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

/// Reads a CSV written by the runner into its header and numeric rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let row: Vec<f64> = line
                .split(',')
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("{} line {}: {e}", path.display(), i + 2)))?;
            if row.len() != header.len() {
                return Err(Error::Config(format!(
                    "{} line {} has {} fields, header has {}",
                    path.display(),
                    i + 2,
                    row.len(),
                    header.len()
                )));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}
