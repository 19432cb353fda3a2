//! Line-oriented state files.
//!
//! ```text
//! # comment
//! j 2
//! label pure two-spinor
//! source make-state
//! 1 0  0 0  0 0
//! 0 0  0 0  0 0
//! 0 0  0 0  0 0
//! ```
//!
//! The header gives `2j`. Each of the `2j+1` rows holds `re im` pairs.
//! Files ending in `.json` use [`JsonStateFile`] instead.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::error::{Error, Result};
use crate::fano::DensityMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct StateFile {
    pub j: HalfInt,
    pub matrix: DMatrix<Complex64>,
    pub label: Option<String>,
    pub source: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonStateFile {
    pub twice_j: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// `rows[r][c] = [re, im]`
    pub rows: Vec<Vec<[f64; 2]>>,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl StateFile {
    pub fn new(rho: &DensityMatrix) -> Self {
        StateFile {
            j: rho.j(),
            matrix: rho.matrix().clone(),
            label: None,
            source: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut j: Option<HalfInt> = None;
        let mut label = None;
        let mut source = None;
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match keyword {
                "j" => {
                    if j.is_some() {
                        return Err(parse_error(line_no, "duplicate `j` header"));
                    }
                    let twice: i32 = rest
                        .parse()
                        .map_err(|_| parse_error(line_no, format!("`j` expects an integer 2j, got `{rest}`")))?;
                    if twice < 1 {
                        return Err(parse_error(line_no, format!("2j must be at least 1, got {twice}")));
                    }
                    j = Some(HalfInt::from_twice(twice));
                }
                "label" | "source" => {
                    if j.is_none() {
                        return Err(parse_error(line_no, "expected `j <twice_j>` header first"));
                    }
                    if !rows.is_empty() {
                        return Err(parse_error(line_no, format!("`{keyword}` must precede the matrix rows")));
                    }
                    let slot = if keyword == "label" { &mut label } else { &mut source };
                    *slot = Some(rest.to_string());
                }
                _ => {
                    let Some(j) = j else {
                        return Err(parse_error(line_no, "expected `j <twice_j>` header first"));
                    };
                    let dim = j.dim();
                    let row = rows.len() + 1;
                    if row > dim {
                        return Err(parse_error(line_no, format!("row {row} exceeds the {dim} rows of a spin {j} matrix")));
                    }
                    let values: Vec<f64> = line
                        .split_whitespace()
                        .map(|tok| {
                            tok.parse::<f64>()
                                .ok()
                                .filter(|v| v.is_finite())
                                .ok_or_else(|| parse_error(line_no, format!("row {row}: `{tok}` is not a finite number")))
                        })
                        .collect::<Result<_>>()?;
                    if values.len() != 2 * dim {
                        return Err(parse_error(
                            line_no,
                            format!("row {row} has {} numbers, expected {} (re im pairs for {dim} columns)", values.len(), 2 * dim),
                        ));
                    }
                    rows.push(values.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect());
                }
            }
        }

        let j = j.ok_or_else(|| parse_error(last_line.max(1), "missing `j <twice_j>` header"))?;
        let dim = j.dim();
        if rows.len() != dim {
            return Err(parse_error(
                last_line + 1,
                format!("row {} missing: spin {j} needs {dim} rows, found {}", rows.len() + 1, rows.len()),
            ));
        }
        Ok(StateFile {
            j,
            matrix: DMatrix::from_fn(dim, dim, |r, c| rows[r][c]),
            label,
            source,
        })
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let raw: JsonStateFile = serde_json::from_str(text).map_err(|e| parse_error(e.line(), e.to_string()))?;
        if raw.twice_j < 1 {
            return Err(parse_error(1, format!("twice_j must be at least 1, got {}", raw.twice_j)));
        }
        let j = HalfInt::from_twice(raw.twice_j);
        let dim = j.dim();
        if raw.rows.len() != dim {
            return Err(parse_error(1, format!("spin {j} needs {dim} rows, found {}", raw.rows.len())));
        }
        if let Some((r, row)) = raw.rows.iter().enumerate().find(|(_, row)| row.len() != dim) {
            return Err(parse_error(1, format!("row {} has {} entries, expected {dim}", r + 1, row.len())));
        }
        Ok(StateFile {
            j,
            matrix: DMatrix::from_fn(dim, dim, |r, c| Complex64::new(raw.rows[r][c][0], raw.rows[r][c][1])),
            label: raw.label,
            source: raw.source,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if is_json(path) {
            Self::parse_json(&text)
        } else {
            Self::parse(&text)
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = if is_json(path) {
            let mut s = serde_json::to_string_pretty(&self.to_json()).expect("state file serializes");
            s.push('\n');
            s
        } else {
            self.to_text()
        };
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("j {}\n", self.j.twice());
        if let Some(label) = &self.label {
            let _ = writeln!(out, "label {label}");
        }
        if let Some(source) = &self.source {
            let _ = writeln!(out, "source {source}");
        }
        for r in 0..self.matrix.nrows() {
            let row: Vec<String> = self
                .matrix
                .row(r)
                .iter()
                .map(|z| format!("{} {}", z.re + 0.0, z.im + 0.0))
                .collect();
            let _ = writeln!(out, "{}", row.join("  "));
        }
        out
    }

    pub fn to_json(&self) -> JsonStateFile {
        JsonStateFile {
            twice_j: self.j.twice(),
            label: self.label.clone(),
            source: self.source.clone(),
            rows: self
                .matrix
                .row_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    /// Validates Hermiticity and positivity after dividing by the trace.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        let tr = self.matrix.trace();
        if tr.re <= 0.0 || tr.im.abs() > 1e-10 * tr.re {
            return Err(Error::Validation(format!("trace {tr} is not positive")));
        }
        DensityMatrix::new_physical(self.j, self.matrix.unscale(tr.re))
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL: &str = "# spin-1 state\nj 2\nlabel bell\n0.5 0  0 0  -0.5 0\n0 0 0 0 0 0\n-0.5 0  0 0  0.5 0\n";

    #[test]
    fn parses_and_round_trips() {
        let file = StateFile::parse(BELL).unwrap();
        assert_eq!(file.j, HalfInt::ONE);
        assert_eq!(file.label.as_deref(), Some("bell"));
        assert_eq!(file.matrix[(0, 2)], Complex64::new(-0.5, 0.0));
        assert_eq!(StateFile::parse(&file.to_text()).unwrap(), file);
        let json = serde_json::to_string(&file.to_json()).unwrap();
        assert_eq!(StateFile::parse_json(&json).unwrap(), file);
        file.density_matrix().unwrap();
    }

    #[test]
    fn diagnostics_name_the_line() {
        let short_row = "j 2\n1 0 0 0 0 0\n0 0 0 0\n0 0 0 0 0 0\n";
        match StateFile::parse(short_row) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("row 2"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        match StateFile::parse("j 2\n1 0 0 0 0 0\n") {
            Err(Error::Parse { message, .. }) => assert!(message.contains("row 2 missing"), "{message}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(StateFile::parse("1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(StateFile::parse("j x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(StateFile::parse("j 1\n1 0 0 0\n0 0 nan 0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(StateFile::parse("j 1\n1 0 0 0\n0 0 0 0\n0 0 0 0\n"), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(StateFile::parse_json("{\"twice_j\": 1, \"rows\": [[[1,0]]]}"), Err(Error::Parse { .. })));
    }

    #[test]
    fn normalizes_trace_and_rejects_unphysical() {
        let file = StateFile::parse("j 1\n2 0 0 0\n0 0 2 0\n").unwrap();
        let rho = file.density_matrix().unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(StateFile::parse("j 1\n1 0 0 1\n0 1 0 0\n").unwrap().density_matrix().is_err());
        assert!(StateFile::parse("j 1\n1.5 0 0 0\n0 0 -0.5 0\n").unwrap().density_matrix().is_err());
        assert!(StateFile::parse("j 1\n0 0 0 0\n0 0 0 0\n").unwrap().density_matrix().is_err());
    }
}
