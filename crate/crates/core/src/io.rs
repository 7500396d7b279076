//! CSV datasets: comma separated, `.` decimal point, optional single header
//! row.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DataMatrix;
use crate::scalar::Real;

pub fn read_csv<T: Real>(path: impl AsRef<Path>, header: bool) -> Result<DataMatrix<T>> {
    read_csv_from(File::open(path)?, header)
}

pub fn read_csv_from<T: Real, R: Read>(reader: R, header: bool) -> Result<DataMatrix<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values: Vec<T> = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Csv {
                    line,
                    message: format!("expected {w} fields, found {}", record.len()),
                })
            }
            _ => {}
        }
        for cell in record.iter() {
            let v: f64 = cell.parse().map_err(|_| Error::Csv {
                line,
                message: format!("not a number: `{cell}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    line,
                    message: format!("non-finite value `{cell}`"),
                });
            }
            values.push(T::lit(v));
        }
        rows += 1;
    }
    let Some(d) = width else {
        return Err(Error::Empty);
    };
    DataMatrix::from_row_slice(rows, d, &values)
}

pub fn write_csv<T: Real>(path: impl AsRef<Path>, data: &DataMatrix<T>) -> Result<()> {
    let mut f = File::create(path)?;
    write_csv_to(&mut f, data, None)?;
    Ok(f.flush()?)
}

/// Writes rows using the shortest representation that parses back to the
/// same `f64`.
pub fn write_csv_to<T: Real, W: Write>(
    writer: W,
    data: &DataMatrix<T>,
    header: Option<&[String]>,
) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().from_writer(writer);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    if let Some(h) = header {
        wtr.write_record(h).map_err(csv_err)?;
    }
    for i in 0..data.nrows() {
        wtr.write_record((0..data.ncols()).map(|j| data.get(i, j).as_f64().to_string()))
            .map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}
