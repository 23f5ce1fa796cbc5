use std::fmt::Write as _;
use std::path::Path;

use gbdt::CMatrix;

use crate::error::CliError;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV file assembled in memory so that writing it is a single step.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    body: String,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: columns.into_iter().map(Into::into).collect(),
            body: String::new(),
        }
    }

    /// Adds `name_re_i_j`, `name_im_i_j` columns for a `rows × cols` matrix.
    pub fn with_matrix(mut self, name: &str, rows: usize, cols: usize) -> Self {
        self.header.extend(matrix_columns(name, rows, cols));
        self
    }

    /// Adds `name_i_j` columns for a real `rows × cols` field.
    pub fn with_real(mut self, name: &str, rows: usize, cols: usize) -> Self {
        for i in 0..rows {
            for j in 0..cols {
                self.header.push(format!("{name}_{i}_{j}"));
            }
        }
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        out.push_str(&self.body);
        out
    }
}

pub fn matrix_columns(name: &str, rows: usize, cols: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(format!("{name}_re_{i}_{j}"));
            out.push(format!("{name}_im_{i}_{j}"));
        }
    }
    out
}

/// Real and imaginary parts, row-major, interleaved per entry.
pub fn matrix_cells(m: &CMatrix) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(float(m[(i, j)].re));
            out.push(float(m[(i, j)].im));
        }
    }
    out
}

/// Moduli of the entries, row-major.
pub fn modulus_cells(m: &CMatrix) -> Vec<String> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(float(m[(i, j)].norm()));
        }
    }
    out
}

/// Named output files, kept in insertion order.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn table(&mut self, name: &str, table: &Table) {
        self.files.push((format!("{name}.csv"), table.render()));
    }

    pub fn text(&mut self, name: impl Into<String>, contents: impl Into<String>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn write_all(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        }
        Ok(())
    }
}

/// A one-line listing, used for the stdout summary.
pub fn listing(artifacts: &Artifacts) -> String {
    let mut out = String::new();
    for name in artifacts.names() {
        let _ = write!(out, "{name} ");
    }
    out.trim_end().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use gbdt::linalg::c;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn matrix_headers_and_cells_line_up() {
        let m = CMatrix::from_row_slice(1, 2, &[c(1.0, 2.0), c(3.0, 4.0)]);
        let mut t = Table::new(["x"]).with_matrix("psi", 1, 2);
        let mut cells = vec![float(0.0)];
        cells.extend(matrix_cells(&m));
        t.row(cells);
        let text = t.render();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,psi_re_0_0,psi_im_0_0,psi_re_0_1,psi_im_0_1");
        let values: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(values, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }
}
