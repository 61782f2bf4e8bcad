//! Serialized results: pretty JSON or a fixed-column CSV table.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use subspace_core::arith::PrimePower;

use crate::{CliError, EXIT_IO};

pub struct Artifact(pub Vec<u8>);

impl Artifact {
    pub fn json<T: Serialize>(value: &T) -> Result<Self, CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::domain(e.to_string()))?;
        s.push('\n');
        Ok(Artifact(s.into_bytes()))
    }

    pub fn write(&self, out: Option<&Path>) -> Result<(), CliError> {
        let res = match out {
            Some(path) => fs::write(path, &self.0).map_err(|e| (path.display().to_string(), e)),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(&self.0)
                    .and_then(|_| stdout.flush())
                    .map_err(|e| ("stdout".to_string(), e))
            }
        };
        res.map_err(|(what, e)| CliError {
            code: EXIT_IO,
            msg: format!("{what}: {e}"),
            detail: None,
        })
    }
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row<const K: usize>(&mut self, cells: [String; K]) {
        debug_assert_eq!(K, self.header.len());
        self.rows.push(cells.to_vec());
    }

    pub fn render(&self) -> Result<Artifact, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError {
            code: EXIT_IO,
            msg: e.to_string(),
            detail: None,
        };
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let buf = w.into_inner().map_err(|e| CliError {
            code: EXIT_IO,
            msg: e.to_string(),
            detail: None,
        })?;
        Ok(Artifact(buf))
    }
}

/// `e*log(p)`, the exact form of a finite-place value.
pub fn ledger(pp: &PrimePower) -> String {
    format!("{}*log({})", pp.exponent, pp.prime)
}
