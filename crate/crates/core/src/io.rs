//! Point data on disk.
//!
//! CSV holds one point per row. The binary format is a little-endian header
//! `u64 n, u64 d` followed by `n * d` row-major `f64` values. A gram matrix
//! is stored as an `n x n` CSV.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{GramMatrix, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Bin,
}

fn parse_rows<R: Read>(reader: R, skip_header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(skip_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field
                    .parse::<f64>()
                    .map_err(|e| Error::Parse { row, msg: format!("column {col}: {field:?}: {e}") })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    Ok(rows)
}

/// Reads points from CSV. Rows are numbered from 0 after the optional header.
pub fn read_points_csv<R: Read>(reader: R, skip_header: bool) -> Result<PointSet> {
    let rows = parse_rows(reader, skip_header)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    PointSet::from_rows(&rows)
}

pub fn write_points_csv<W: Write>(writer: W, ps: &PointSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for p in ps.rows() {
        w.write_record(p.iter().map(|x| x.to_string())).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points_bin<R: Read>(mut reader: R) -> Result<PointSet> {
    let mut word = [0u8; 8];
    let mut header = [0u64; 2];
    for h in header.iter_mut() {
        reader
            .read_exact(&mut word)
            .map_err(|_| Error::Parse { row: 0, msg: "truncated binary header".into() })?;
        *h = u64::from_le_bytes(word);
    }
    let [n, d] = header.map(|v| v as usize);
    let total = n.checked_mul(d).ok_or_else(|| Error::Parse { row: 0, msg: "header size overflow".into() })?;
    let mut coords = Vec::with_capacity(total.min(1 << 24));
    for k in 0..total {
        reader
            .read_exact(&mut word)
            .map_err(|_| Error::Parse { row: k / d.max(1), msg: "truncated binary data".into() })?;
        coords.push(f64::from_le_bytes(word));
    }
    PointSet::from_flat(n, d, coords)
}

pub fn write_points_bin<W: Write>(mut writer: W, ps: &PointSet) -> Result<()> {
    writer.write_all(&(ps.len() as u64).to_le_bytes())?;
    writer.write_all(&(ps.dim() as u64).to_le_bytes())?;
    for x in ps.as_flat() {
        writer.write_all(&x.to_le_bytes())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_gram_csv<R: Read>(reader: R, skip_header: bool) -> Result<GramMatrix> {
    let rows = parse_rows(reader, skip_header)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    GramMatrix::from_rows(&rows)
}

pub fn read_points(path: &Path, format: Format, skip_header: bool) -> Result<PointSet> {
    let file = BufReader::new(File::open(path)?);
    match format {
        Format::Csv => read_points_csv(file, skip_header),
        Format::Bin => read_points_bin(file),
    }
}

pub fn write_points(path: &Path, format: Format, ps: &PointSet) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_points_csv(file, ps),
        Format::Bin => write_points_bin(file, ps),
    }
}

pub fn read_gram(path: &Path, skip_header: bool) -> Result<GramMatrix> {
    read_gram_csv(BufReader::new(File::open(path)?), skip_header)
}
