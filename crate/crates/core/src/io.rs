//! Matrix file formats.
//!
//! CSV: one matrix row per line, comma-separated decimal floats, optional
//! single header line. Values are written with Rust's shortest round-trip
//! formatting, so write-then-read is bit-exact.
//!
//! Binary: the magic bytes `TWSP`, a format version byte (`1`), the row count
//! and column count as little-endian `u32`, then `rows × cols` little-endian
//! `f64` values in row-major order.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;

pub const BINARY_MAGIC: &[u8; 4] = b"TWSP";
pub const BINARY_VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Bin,
}

impl MatrixFormat {
    /// `.bin` means binary, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => MatrixFormat::Bin,
            _ => MatrixFormat::Csv,
        }
    }
}

impl fmt::Display for MatrixFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Bin => "bin",
        })
    }
}

impl FromStr for MatrixFormat {
    type Err = CurError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(MatrixFormat::Csv),
            "bin" => Ok(MatrixFormat::Bin),
            other => Err(CurError::Config(format!("unknown matrix format '{other}'"))),
        }
    }
}

pub fn read_csv<R: Read>(reader: R, has_header: bool) -> Result<DenseMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CurError::Format(format!("csv: {e}")))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        match cols {
            None => cols = Some(rec.len()),
            Some(c) if c != rec.len() => {
                return Err(CurError::Format(format!(
                    "csv record {} has {} fields, expected {c}",
                    line + 1,
                    rec.len()
                )))
            }
            _ => {}
        }
        for field in rec.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| CurError::Format(format!("csv record {}: bad number '{field}'", line + 1)))?;
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| CurError::Format("csv input holds no rows".into()))?;
    DenseMatrix::new(rows, cols, data)
}

pub fn write_csv<W: Write>(mut writer: W, m: &DenseMatrix) -> Result<()> {
    for i in 0..m.nrows() {
        let line = m
            .row(i)
            .iter()
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut reader: R) -> Result<DenseMatrix> {
    let mut header = [0u8; 13];
    reader
        .read_exact(&mut header)
        .map_err(|_| CurError::Format("binary input shorter than its header".into()))?;
    if &header[..4] != BINARY_MAGIC {
        return Err(CurError::Format("missing TWSP magic bytes".into()));
    }
    if header[4] != BINARY_VERSION {
        return Err(CurError::Format(format!("unsupported format version {}", header[4])));
    }
    let rows = u32::from_le_bytes(header[5..9].try_into().expect("4 bytes")) as usize;
    let cols = u32::from_le_bytes(header[9..13].try_into().expect("4 bytes")) as usize;
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| CurError::Format("matrix size overflows".into()))?;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() != count * 8 {
        return Err(CurError::Format(format!(
            "expected {} payload bytes for {rows}x{cols}, found {}",
            count * 8,
            bytes.len()
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DenseMatrix::new(rows, cols, data)
}

pub fn write_binary<W: Write>(mut writer: W, m: &DenseMatrix) -> Result<()> {
    let dim = |d: usize| {
        u32::try_from(d).map_err(|_| CurError::Format(format!("dimension {d} exceeds u32")))
    };
    writer.write_all(BINARY_MAGIC)?;
    writer.write_all(&[BINARY_VERSION])?;
    writer.write_all(&dim(m.nrows())?.to_le_bytes())?;
    writer.write_all(&dim(m.ncols())?.to_le_bytes())?;
    for v in m.as_slice() {
        writer.write_all(&v.to_le_bytes())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path, format: MatrixFormat, has_header: bool) -> Result<DenseMatrix> {
    let file = File::open(path).map_err(|e| CurError::Io(format!("{}: {e}", path.display())))?;
    let reader = BufReader::new(file);
    match format {
        MatrixFormat::Csv => read_csv(reader, has_header),
        MatrixFormat::Bin => read_binary(reader),
    }
}

pub fn write_matrix(path: &Path, m: &DenseMatrix, format: MatrixFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| CurError::Io(format!("{}: {e}", path.display())))?;
    let writer = BufWriter::new(file);
    match format {
        MatrixFormat::Csv => write_csv(writer, m),
        MatrixFormat::Bin => write_binary(writer, m),
    }
}
