use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

pub const SCHEMA_LINE: &str = "# stiff-pressure-lab schema v1";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// A CSV table preceded by the schema line and `# key = value` comments.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    comments: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.comments.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| format_f64(v)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        out.extend_from_slice(SCHEMA_LINE.as_bytes());
        out.push(b'\n');
        for (k, v) in &self.comments {
            out.extend_from_slice(format!("# {k} = {v}\n").as_bytes());
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }
}

/// Reads the `rho` column of a CSV file (with `#` comments) onto `grid`.
pub fn read_density_csv(path: &Path, grid: Grid) -> Result<Field> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let col = r
        .headers()?
        .iter()
        .position(|h| h == "rho")
        .ok_or_else(|| Error::InvalidData(format!("{}: no `rho` column", path.display())))?;
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let v: f64 = rec
            .get(col)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidData(format!("{}: bad rho in data row {}", path.display(), i + 1)))?;
        values.push(v);
    }
    if values.len() != grid.n_cells {
        return Err(Error::InvalidData(format!(
            "{}: {} rows for {} cells",
            path.display(),
            values.len(),
            grid.n_cells
        )));
    }
    Field::new(grid, values, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_f64(f64::NAN), "NaN");
    }

    #[test]
    fn layout_and_read_back() {
        let g = Grid::cartesian(0.0, 1.0, 3).unwrap();
        let mut t = Table::new(&["x", "rho"]);
        t.comment("time", format_f64(0.5));
        for (x, r) in g.centers().iter().zip([0.1, 0.2, 0.3]) {
            t.push_numbers(&[*x, r]);
        }
        let text = String::from_utf8(t.to_bytes().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SCHEMA_LINE));
        assert_eq!(lines.next(), Some("# time = 5.0000000000000000e-1"));
        assert_eq!(lines.next(), Some("x,rho"));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        t.write(&path).unwrap();
        let f = read_density_csv(&path, g).unwrap();
        assert_eq!(f.values, vec![0.1, 0.2, 0.3]);
        assert!(read_density_csv(&path, Grid::cartesian(0.0, 1.0, 4).unwrap()).is_err());
    }
}
