//! `history.log`: one archive change per line,
//!
//! ```text
//! time,bin,origin,updates,fitness,couriers,emissions,distance,time_span,encoding
//! ```
//!
//! `origin` is `-`, `a:b:c:d` or `a:b:c:d/e:f:g:h`. The encoding is the last
//! field and may itself contain commas. Floats use the shortest decimal that
//! parses back to the same value, so a log replays exactly. Every line,
//! including the last, ends in `\n`; a missing terminator means the file was
//! cut short.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use mdelites_core::{Characteristics, HistoryLog, HistoryRecord, HistorySink};

use crate::error::{Error, Result};
use crate::numfmt::shortest;

const FIELDS: usize = 10;

pub fn format_record(r: &HistoryRecord) -> String {
    let c = &r.characteristics;
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.time,
        r.bin,
        r.origin,
        r.updates,
        shortest(r.fitness),
        c.couriers,
        shortest(c.emissions),
        shortest(c.distance),
        shortest(c.time_span),
        r.encoding
    )
}

pub fn parse_record(line: &str) -> std::result::Result<HistoryRecord, String> {
    let fields: Vec<&str> = line.splitn(FIELDS, ',').collect();
    if fields.len() != FIELDS {
        return Err(format!("expected {FIELDS} fields, found {}", fields.len()));
    }
    fn num<T: std::str::FromStr>(name: &str, s: &str) -> std::result::Result<T, String> {
        s.parse().map_err(|_| format!("{name}: cannot parse {s:?}"))
    }
    fn real(name: &str, s: &str) -> std::result::Result<f64, String> {
        let v: f64 = num(name, s)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("{name}: not finite"))
        }
    }
    Ok(HistoryRecord {
        time: num("time", fields[0])?,
        bin: fields[1].parse().map_err(|e| format!("bin: {e}"))?,
        origin: fields[2].parse().map_err(|e| format!("origin: {e}"))?,
        updates: num("updates", fields[3])?,
        fitness: real("fitness", fields[4])?,
        characteristics: Characteristics {
            couriers: num("couriers", fields[5])?,
            emissions: real("emissions", fields[6])?,
            distance: real("distance", fields[7])?,
            time_span: real("time_span", fields[8])?,
        },
        encoding: fields[9].to_string(),
    })
}

/// Parses a whole log. Errors carry the 1-based line number.
pub fn parse_log(text: &str, path: &Path) -> Result<HistoryLog> {
    let line_err = |line: usize, message: String| Error::Line {
        path: path.into(),
        line,
        message,
    };
    let mut log = HistoryLog::new();
    let mut rest = text;
    let mut line_no = 0;
    while !rest.is_empty() {
        line_no += 1;
        let Some((line, tail)) = rest.split_once('\n') else {
            return Err(line_err(line_no, "truncated line (no terminating newline)".into()));
        };
        rest = tail;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let record = parse_record(line).map_err(|m| line_err(line_no, m))?;
        log.append(record).map_err(|e| line_err(line_no, e.to_string()))?;
    }
    Ok(log)
}

pub fn read_log(path: &Path) -> Result<HistoryLog> {
    let text = fs::read_to_string(path).map_err(Error::read(path))?;
    parse_log(&text, path)
}

/// Streams records to a writer as the solver accepts them.
pub struct LogWriter<W: Write> {
    out: W,
}

impl<W: Write> LogWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> HistorySink for LogWriter<W> {
    type Error = io::Error;

    fn record(&mut self, record: &HistoryRecord) -> io::Result<()> {
        writeln!(self.out, "{}", format_record(record))
    }
}

pub fn write_log<W: Write>(records: &[HistoryRecord], out: &mut W) -> io::Result<()> {
    for r in records {
        writeln!(out, "{}", format_record(r))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use mdelites_core::{BinKey, Origin};

    fn rec(time: u64, origin: Origin, encoding: &str) -> HistoryRecord {
        HistoryRecord {
            time,
            bin: BinKey([20, 20, 9, 18]),
            origin,
            updates: 0,
            fitness: 977.11,
            characteristics: Characteristics {
                couriers: 5,
                emissions: 45.48,
                distance: 21.25,
                time_span: 0.1 + 0.2,
            },
            encoding: encoding.into(),
        }
    }

    #[test]
    fn line_round_trip_with_commas_in_encoding() {
        let r = rec(5704, "12:4:9:11/12:12:4:17".parse().unwrap(), "C1V,D1C2WC3W,D2C4B");
        let line = format_record(&r);
        assert_eq!(
            line,
            "5704,20:20:9:18,12:4:9:11/12:12:4:17,0,977.11,5,45.48,21.25,0.30000000000000004,C1V,D1C2WC3W,D2C4B"
        );
        assert_eq!(parse_record(&line).unwrap(), r);
        let seed = rec(1, Origin::Seed, "");
        assert_eq!(parse_record(&format_record(&seed)).unwrap(), seed);
    }

    #[test]
    fn errors_name_the_line() {
        let p = Path::new("h.log");
        let good = format_record(&rec(1, Origin::Seed, "C1V"));
        let text = format!("{good}\n2,1:1:1:1,-,0,oops,0,0,0,0,C1V\n");
        let err = parse_log(&text, p).unwrap_err().to_string();
        assert!(err.starts_with("h.log:2:") && err.contains("fitness"), "{err}");

        let cut = &text[..good.len() + 5];
        let err = parse_log(cut, p).unwrap_err().to_string();
        assert!(err.starts_with("h.log:2:") && err.contains("truncated"), "{err}");

        let twice = format!("{good}\n{good}\n");
        let err = parse_log(&twice, p).unwrap_err().to_string();
        assert!(err.starts_with("h.log:2:"), "{err}");

        let err = parse_log("1,1:1:1,-,0,1,0,0,0,0,\n", p).unwrap_err().to_string();
        assert!(err.contains("bin"), "{err}");
    }

    #[test]
    fn empty_log_is_empty() {
        assert!(parse_log("", Path::new("x")).unwrap().is_empty());
    }
}
