//! Configuration files.
//!
//! JSON (canonical): `{"d": 1, "k": 4, "matrix": [[1, 1], [1, 0], [0, 1], [0, 1]]}`.
//! CSV: one landmark per line, `d + 1` comma-separated numbers, no header;
//! `d` and `k` are inferred. Both round-trip every finite double exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use projshape_core::Configuration;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// `.csv` selects CSV, anything else JSON.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
pub struct ConfigurationFile {
    pub d: usize,
    pub k: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl From<&Configuration> for ConfigurationFile {
    fn from(c: &Configuration) -> Self {
        ConfigurationFile { d: c.d(), k: c.k(), matrix: c.rows() }
    }
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn build(rows: Vec<Vec<f64>>) -> Result<Configuration> {
    let width = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::Parse(format!("landmark {} has {} coordinates, expected {width}", i + 1, rows[i].len())));
    }
    Configuration::from_rows(&rows).map_err(Error::Invalid)
}

pub fn parse_json(text: &str) -> Result<Configuration> {
    let file: ConfigurationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.matrix.len() != file.k {
        return Err(Error::Parse(format!("k = {} but the matrix has {} rows", file.k, file.matrix.len())));
    }
    if file.matrix.iter().any(|r| r.len() != file.d + 1) {
        return Err(Error::Parse(format!("d = {} but a row does not have {} entries", file.d, file.d + 1)));
    }
    build(file.matrix)
}

pub fn parse_csv(text: &str) -> Result<Configuration> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: `{field}` is not a number", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no landmarks".into()));
    }
    build(rows)
}

pub fn to_json(c: &Configuration) -> String {
    serde_json::to_string_pretty(&ConfigurationFile::from(c)).expect("finite matrix serializes")
}

pub fn to_csv(c: &Configuration) -> String {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in c.rows() {
        writer
            .write_record(row.iter().map(|x| format!("{x:?}")))
            .expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("ascii output")
}

pub fn parse(text: &str, format: Format) -> Result<Configuration> {
    match format {
        Format::Json => parse_json(text),
        Format::Csv => parse_csv(text),
    }
}

pub fn load(path: &Path) -> Result<Configuration> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    parse(&text, Format::from_path(path))
}

pub fn save(path: &Path, c: &Configuration, format: Format) -> Result<()> {
    let text = match format {
        Format::Json => to_json(c),
        Format::Csv => to_csv(c),
    };
    let io = |source| Error::Io { path: path.to_owned(), source };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)?;
    f.write_all(b"\n").map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_example_loads() {
        let c = parse_json(r#"{"d":1,"k":4,"matrix":[[1,1],[1,0],[0,1],[0,1]]}"#).unwrap();
        assert_eq!((c.d(), c.k()), (1, 4));
    }

    #[test]
    fn inconsistent_header_is_a_parse_error() {
        assert!(matches!(parse_json(r#"{"d":2,"k":4,"matrix":[[1,1],[1,0],[0,1],[0,1]]}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_json(r#"{"d":1,"k":5,"matrix":[[1,1],[1,0],[0,1],[0,1]]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn zero_row_is_invalid() {
        let err = parse_csv("1,0\n0,0\n0,1\n1,1\n").unwrap_err();
        assert!(matches!(err, Error::Invalid(projshape_core::Error::InvariantViolation(_))));
    }

    #[test]
    fn csv_ragged_rows_are_rejected() {
        assert!(matches!(parse_csv("1,0\n0,1,2\n0,1\n1,1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_csv("1,x\n0,1\n0,1\n1,1\n"), Err(Error::Parse(_))));
    }
}
