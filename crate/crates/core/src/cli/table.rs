//! Rectangular result tables with byte-stable CSV and JSON rendering.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::bandlimited::Exponent;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    /// Reals use 17 significant digits in scientific notation, which
    /// round-trips every `f64`.
    pub fn render(&self) -> String {
        match self {
            Cell::Real(v) if v.is_nan() => "nan".into(),
            Cell::Real(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Exponent> for Cell {
    fn from(p: Exponent) -> Self {
        match p {
            Exponent::Finite(v) => Cell::Real(v),
            Exponent::Infinity => Cell::Text("inf".into()),
        }
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    header: &'a [String],
    rows: Vec<Vec<String>>,
}

impl ExperimentTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row; panics if its width differs from the header's.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: ExperimentTable) {
        assert_eq!(self.header, other.header, "tables must share a header");
        self.rows.extend(other.rows);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Header line followed by one line per row, LF-terminated.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.into_inner().map_err(|e| Error::Io {
            path: "<memory>".into(),
            source: e.into_error(),
        })
    }

    /// `{"header": [...], "rows": [[...], ...]}` with cells rendered as in
    /// the CSV.
    pub fn to_json(&self) -> Result<Vec<u8>> {
        let table = JsonTable {
            header: &self.header,
            rows: self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect(),
        };
        let mut out = serde_json::to_vec_pretty(&table)?;
        out.push(b'\n');
        Ok(out)
    }

    /// Writes CSV, or JSON when the path ends in `.json`.
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let bytes = if path.extension().is_some_and(|e| e == "json") {
            self.to_json()?
        } else {
            self.to_csv()?
        };
        let mut file = fs::File::create(path).map_err(|source| Error::Io { path: path.into(), source })?;
        file.write_all(&bytes).map_err(|source| Error::Io { path: path.into(), source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_seventeen_digits() {
        assert_eq!(Cell::Real(0.01).render(), "1.0000000000000000e-2");
        assert_eq!(Cell::Real(f64::INFINITY).render(), "inf");
        let x = 0.1 + 0.2;
        let back: f64 = Cell::Real(x).render().parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn single_row_is_two_lines() {
        let mut t = ExperimentTable::new(&["a", "b"]);
        t.push(vec![1.5.into(), "x,y".into()]);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "a,b\n1.5000000000000000e0,\"x,y\"\n");
    }

    #[test]
    #[should_panic]
    fn rejects_ragged_rows() {
        let mut t = ExperimentTable::new(&["a", "b"]);
        t.push(vec![1.0.into()]);
    }

    #[test]
    fn json_and_file_output() {
        let mut t = ExperimentTable::new(&["p"]);
        t.push(vec![Exponent::Infinity.into()]);
        let json: serde_json::Value = serde_json::from_slice(&t.to_json().unwrap()).unwrap();
        assert_eq!(json["rows"][0][0], "inf");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        t.write_to(&path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), t.to_csv().unwrap());
        let missing = dir.path().join("nope").join("t.csv");
        assert!(matches!(t.write_to(&missing), Err(Error::Io { .. })));
    }

    proptest::proptest! {
        #[test]
        fn rendering_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let back: f64 = Cell::Real(x).render().parse().unwrap();
            proptest::prop_assert_eq!(back.to_bits(), x.to_bits());
        }

        #[test]
        fn csv_is_stable(rows in proptest::collection::vec((proptest::num::f64::ANY, "[a-z,\" ]{0,6}"), 0..8)) {
            let build = || {
                let mut t = ExperimentTable::new(&["x", "s"]);
                for (x, s) in &rows {
                    t.push(vec![(*x).into(), s.as_str().into()]);
                }
                t.to_csv().unwrap()
            };
            let bytes = build();
            proptest::prop_assert_eq!(&bytes, &build());
            let mut reader = csv::Reader::from_reader(bytes.as_slice());
            proptest::prop_assert_eq!(reader.records().count(), rows.len());
        }
    }
}
