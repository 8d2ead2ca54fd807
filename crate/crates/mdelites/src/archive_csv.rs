//! `archive.csv`: one row per occupied bin, sorted by bin key.
//!
//! Numbers carry 6 significant digits; the exact values live in the log.

use std::io::{Read, Write};
use std::path::Path;

use mdelites_core::{Archive, BinKey, Chromosome};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::significant;

pub const HEADER: [&str; 9] = [
    "bin",
    "couriers",
    "emissions",
    "distance",
    "time",
    "fitness",
    "updates",
    "encoding",
    "chromosome_json",
];

const DIGITS: usize = 6;

/// A parsed `archive.csv` row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveRow {
    pub bin: BinKey,
    pub couriers: u32,
    pub emissions: f64,
    pub distance: f64,
    pub time: f64,
    pub fitness: f64,
    pub updates: u32,
    pub encoding: String,
    pub chromosome: Chromosome,
}

pub fn write_archive_csv<W: Write>(archive: &Archive, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for cell in archive.snapshot() {
        let c = &cell.evaluation.characteristics;
        let chromosome = serde_json::to_string(&cell.chromosome).expect("chromosomes serialize");
        w.write_record([
            cell.key.to_string(),
            c.couriers.to_string(),
            significant(c.emissions, DIGITS),
            significant(c.distance, DIGITS),
            significant(c.time_span, DIGITS),
            significant(cell.fitness(), DIGITS),
            cell.updates.to_string(),
            cell.encoding.clone(),
            chromosome,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_archive_csv<R: Read>(input: R, path: &Path) -> Result<Vec<ArchiveRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header_err = |message: String| Error::Line {
        path: path.into(),
        line: 1,
        message,
    };
    let headers = r.headers().map_err(|e| header_err(e.to_string()))?;
    if headers.iter().ne(HEADER) {
        return Err(header_err(format!("expected header {}", HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| Error::Line {
            path: path.into(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = parse_row(&record).map_err(|message| Error::Line {
            path: path.into(),
            line,
            message,
        })?;
        rows.push(row);
    }
    Ok(rows)
}

fn parse_row(rec: &csv::StringRecord) -> std::result::Result<ArchiveRow, String> {
    fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> std::result::Result<T, String> {
        let s = rec.get(i).unwrap_or_default();
        s.parse().map_err(|_| format!("{}: cannot parse {s:?}", HEADER[i]))
    }
    let chromosome =
        serde_json::from_str(rec.get(8).unwrap_or_default()).map_err(|e| format!("chromosome_json: {e}"))?;
    Ok(ArchiveRow {
        bin: field(rec, 0)?,
        couriers: field(rec, 1)?,
        emissions: field(rec, 2)?,
        distance: field(rec, 3)?,
        time: field(rec, 4)?,
        fitness: field(rec, 5)?,
        updates: field(rec, 6)?,
        encoding: rec.get(7).unwrap_or_default().to_string(),
        chromosome,
    })
}

pub fn read_archive_csv(path: &Path) -> Result<Vec<ArchiveRow>> {
    let file = std::fs::File::open(path).map_err(Error::read(path))?;
    parse_archive_csv(std::io::BufReader::new(file), path)
}
