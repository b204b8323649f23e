//! CSV persistence.
//!
//! Matrices are written as `N` rows of `N` comma-separated values without a
//! header; exposures use 17 significant digits so a round trip is exact.
//! Balance sheets carry the header `bank,assets,liabilities`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{AdjacencyMatrix, BalanceSheet, ExposureMatrix};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn rows<R: Read>(reader: R) -> Result<Vec<Vec<String>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        out.push(rec?.iter().map(str::to_owned).collect());
    }
    Ok(out)
}

pub fn write_exposures<W: Write>(x: &ExposureMatrix, w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..x.n() {
        wtr.write_record(x.row(i).iter().map(|&v| fmt_f64(v)))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_exposures<R: Read>(r: R) -> Result<ExposureMatrix> {
    let rows = rows(r)?
        .into_iter()
        .map(|r| r.iter().map(|s| parse_f64(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    ExposureMatrix::from_rows(&rows)
}

pub fn write_adjacency<W: Write>(q: &AdjacencyMatrix, w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for row in q.as_slice().chunks_exact(q.n().max(1)) {
        wtr.write_record(row.iter().map(|&b| if b { "1" } else { "0" }))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_adjacency<R: Read>(r: R) -> Result<AdjacencyMatrix> {
    let rows = rows(r)?
        .into_iter()
        .map(|r| {
            r.iter()
                .map(|s| s.trim().parse::<u8>().map_err(|_| Error::Parse(format!("not 0/1: {s:?}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    AdjacencyMatrix::from_rows(&rows)
}

pub fn write_balance<W: Write>(bs: &BalanceSheet, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["bank", "assets", "liabilities"])?;
    for (i, (a, l)) in bs.assets().iter().zip(bs.liabilities()).enumerate() {
        wtr.write_record([i.to_string(), fmt_f64(*a), fmt_f64(*l)])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_balance<R: Read>(r: R) -> Result<BalanceSheet> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["bank", "assets", "liabilities"] {
        return Err(Error::Parse(format!("unexpected balance-sheet header {headers:?}")));
    }
    let (mut assets, mut liabilities) = (Vec::new(), Vec::new());
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bank: usize = rec[0].trim().parse().map_err(|_| Error::Parse(format!("bad bank index {:?}", &rec[0])))?;
        if bank != k {
            return Err(Error::Parse(format!("bank index {bank} out of order (expected {k})")));
        }
        assets.push(parse_f64(&rec[1])?);
        liabilities.push(parse_f64(&rec[2])?);
    }
    BalanceSheet::new(assets, liabilities)
}

pub fn save_exposures(x: &ExposureMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_exposures(x, File::create(path)?)
}

pub fn load_exposures(path: impl AsRef<Path>) -> Result<ExposureMatrix> {
    read_exposures(File::open(path)?)
}

pub fn save_adjacency(q: &AdjacencyMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_adjacency(q, File::create(path)?)
}

pub fn load_adjacency(path: impl AsRef<Path>) -> Result<AdjacencyMatrix> {
    read_adjacency(File::open(path)?)
}

pub fn save_balance(bs: &BalanceSheet, path: impl AsRef<Path>) -> Result<()> {
    write_balance(bs, File::create(path)?)
}

pub fn load_balance(path: impl AsRef<Path>) -> Result<BalanceSheet> {
    read_balance(File::open(path)?)
}
