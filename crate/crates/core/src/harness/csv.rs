//! CSV tables with leading `#` provenance comments.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::wz::RdSample;
use crate::{Error, Result};

fn format_error(detail: impl ToString) -> Error {
    Error::Format {
        what: "CSV",
        detail: detail.to_string(),
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let comments = text
            .lines()
            .filter_map(|l| l.strip_prefix('#'))
            .map(|c| c.trim().to_string())
            .collect();
        let mut reader = ::csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(::csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers().map_err(format_error)?.iter().map(str::to_string).collect();
        if header.is_empty() {
            return Err(format_error("no header line"));
        }
        let rows = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()).map_err(format_error))
            .collect::<Result<Vec<Vec<String>>>>()?;
        Ok(CsvTable { comments, header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format_error(format!("missing column {name:?}")))
    }
}

/// Writes provenance comments, the header and the rows.
pub fn write_csv(out: &mut impl Write, comments: &[String], header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = ::csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

/// `(rate_kbps, psnr_db)` pairs of an RD CSV, optionally filtered by column
/// values (e.g. `codec=polar`).
pub fn read_rd_csv(path: &Path, filters: &[(String, String)]) -> Result<Vec<RdSample>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let table = CsvTable::parse(&text)?;
    let (ri, pi) = (table.column("rate_kbps")?, table.column("psnr_db")?);
    let filters = filters
        .iter()
        .map(|(k, v)| Ok((table.column(k)?, v.as_str())))
        .collect::<Result<Vec<_>>>()?;
    let num = |s: &str| s.parse::<f64>().map_err(|e| format_error(format!("{s:?}: {e}")));
    table
        .rows
        .iter()
        .filter(|r| filters.iter().all(|&(c, v)| r[c] == v))
        .map(|r| {
            Ok(RdSample {
                rate_kbps: num(&r[ri])?,
                psnr_db: num(&r[pi])?,
            })
        })
        .collect()
}
