//! CSV and JSON emission.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! every `f64` exactly. `NaN` marks masked points.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fluidclock_core::{ComplexField, Grid, RealField};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.to_path_buf(), source }
}

/// Writes a header line and one line per row. Every row must have as many
/// values as the header has columns.
pub fn emit_csv<I>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let file = File::create(path).map_err(write_err(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", header.join(",")).map_err(write_err(path))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let line: Vec<String> = row.into_iter().map(format_float).collect();
        writeln!(w, "{}", line.join(",")).map_err(write_err(path))?;
    }
    w.flush().map_err(write_err(path))
}

fn coordinate_columns(grid: &Grid) -> Vec<&'static str> {
    if grid.dims() == 1 {
        vec!["x"]
    } else {
        vec!["x", "y"]
    }
}

fn coordinates(grid: &Grid, k: usize) -> Vec<f64> {
    let p = grid.position(k);
    p[..grid.dims()].to_vec()
}

/// Columns `x[, y], <names...>`, one row per grid point in flat order.
pub fn emit_fields(path: &Path, grid: &Grid, names: &[&str], columns: &[&[f64]]) -> CliResult<()> {
    let mut header = coordinate_columns(grid);
    header.extend_from_slice(names);
    let rows = (0..grid.len()).map(|k| {
        let mut row = coordinates(grid, k);
        row.extend(columns.iter().map(|c| c[k]));
        row
    });
    emit_csv(path, &header, rows)
}

/// `x[, y], value`.
pub fn emit_real_field(path: &Path, field: &RealField) -> CliResult<()> {
    emit_fields(path, field.grid(), &["value"], &[field.values()])
}

/// `x[, y], re, im`.
pub fn emit_complex_field(path: &Path, field: &ComplexField) -> CliResult<()> {
    let re: Vec<f64> = field.values().iter().map(|z| z.re).collect();
    let im: Vec<f64> = field.values().iter().map(|z| z.im).collect();
    emit_fields(path, field.grid(), &["re", "im"], &[&re, &im])
}

/// Pretty JSON followed by a newline. Struct fields keep declaration order
/// and maps are sorted, so the layout is stable.
pub fn emit_summary<T: Serialize>(value: &T, path: &Path) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("summary serialises");
    text.push('\n');
    std::fs::write(path, text).map_err(write_err(path))
}

/// An output directory that remembers what was written into it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: PathBuf) -> CliResult<Self> {
        std::fs::create_dir_all(&root).map_err(|source| CliError::Write { path: root.clone(), source })?;
        Ok(Self { root, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Path for `name`, recorded as an output.
    pub fn file(&mut self, name: &str) -> PathBuf {
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        self.root.join(name)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}
