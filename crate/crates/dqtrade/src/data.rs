//! Daily price CSV files.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use dqtrade_core::market_data::{Bar, BarSeries};

use crate::error::{Error, Result};

pub const HEADER: [&str; 7] = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"];

/// Loads a `Date,Open,High,Low,Close,Adj Close,Volume` file. The symbol is
/// taken from the file stem. The `Adj Close` column may be omitted or left
/// blank, in which case the close is used.
pub fn load_csv(path: impl AsRef<Path>) -> Result<BarSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let symbol = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(file, &symbol, path)
}

/// Parses CSV text from any reader; `origin` only labels error messages.
pub fn read_csv<R: Read>(reader: R, symbol: &str, origin: &Path) -> Result<BarSeries> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let has_adj = if header == HEADER {
        true
    } else if header.iter().map(String::as_str).eq(HEADER.iter().copied().filter(|h| *h != "Adj Close")) {
        false
    } else {
        return Err(Error::Row {
            path: origin.to_path_buf(),
            line: 1,
            reason: format!("expected header `{}`", HEADER.join(",")),
        });
    };

    let mut bars = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let row_err = |reason: String| Error::Row {
            path: origin.to_path_buf(),
            line,
            reason,
        };
        if record.len() != header.len() {
            return Err(row_err(format!("expected {} columns, found {}", header.len(), record.len())));
        }
        let date = NaiveDate::parse_from_str(record[0].trim(), "%Y-%m-%d")
            .map_err(|e| row_err(format!("bad date `{}`: {e}", &record[0])))?;
        let num = |i: usize| -> Result<f64> {
            let field = record[i].trim();
            field
                .parse::<f64>()
                .map_err(|_| row_err(format!("unparsable {} `{field}`", header[i])))
        };
        let (open, high, low, close) = (num(1)?, num(2)?, num(3)?, num(4)?);
        let (adj, volume) = if has_adj {
            let adj = if record[5].trim().is_empty() { close } else { num(5)? };
            (adj, num(6)?)
        } else {
            (close, num(5)?)
        };
        bars.push(Bar::new(date, open, high, low, close, adj, volume).map_err(|e| row_err(e.to_string()))?);
    }
    Ok(BarSeries::new(symbol, bars)?)
}

/// Writes bars in the same layout `load_csv` reads.
pub fn write_csv<W: Write>(bars: &BarSeries, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for b in bars.bars() {
        w.write_record([
            b.date.format("%Y-%m-%d").to_string(),
            b.open.to_string(),
            b.high.to_string(),
            b.low.to_string(),
            b.close.to_string(),
            b.adj_close.to_string(),
            b.volume.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn save_csv(bars: &BarSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(bars, file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<BarSeries> {
        read_csv(text.as_bytes(), "T", Path::new("t.csv"))
    }

    #[test]
    fn three_rows() {
        let s = parse(
            "Date,Open,High,Low,Close,Adj Close,Volume\n\
             2020-01-01,10,11,9,10.5,10.4,100\n\
             2020-01-02,10.5,12,10,11,,200\n\
             2020-01-03,11,11,10,10,10,0\n",
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.bars()[0].adj_close, 10.4);
        assert_eq!(s.bars()[1].adj_close, 11.0);
        assert_eq!(s.symbol(), "T");
    }

    #[test]
    fn adj_close_column_optional() {
        let s = parse("Date,Open,High,Low,Close,Volume\n2020-01-01,1,1,1,1,5\n2020-01-02,2,2,2,2,5\n").unwrap();
        assert_eq!(s.bars()[1].adj_close, 2.0);
    }

    #[test]
    fn rejects_bad_input() {
        let h = "Date,Open,High,Low,Close,Adj Close,Volume\n";
        let backwards = format!("{h}2020-01-02,1,1,1,1,1,1\n2020-01-01,1,1,1,1,1,1\n");
        assert!(matches!(
            parse(&backwards),
            Err(Error::Core(dqtrade_core::Error::NonMonotonicDates { .. }))
        ));
        let negative = format!("{h}2020-01-01,1,1,-5,-5,1,1\n");
        let err = parse(&negative).unwrap_err().to_string();
        assert!(err.contains("non-positive price"), "{err}");
        assert!(parse(&format!("{h}2020-01-01,1,1,1,1,1\n")).is_err());
        assert!(parse(&format!("{h}2020-01-01,1,x,1,1,1,1\n")).is_err());
        assert!(parse(&format!("{h}01/02/2020,1,1,1,1,1,1\n")).is_err());
        assert!(parse("date,open\n").is_err());
    }

    #[test]
    fn round_trip() {
        let s = parse("Date,Open,High,Low,Close,Adj Close,Volume\n2020-01-01,0.1,0.30000000000000004,0.1,0.2,0.2,7\n").unwrap();
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), "T", Path::new("x")).unwrap();
        assert_eq!(back, s);
    }
}
