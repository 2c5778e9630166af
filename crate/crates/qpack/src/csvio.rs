//! CSV traces. Floats are written with Rust's shortest round-trip formatting,
//! so reading a file back yields the same bits.

use std::io::{Read, Write};

use qpack_core::cqed::RabiTrace;
use qpack_core::em::{s_db, CavityMode, FrequencyGrid};
use qpack_core::Complex64;

pub const SWEEP_HEADER: [&str; 4] = ["freq_hz", "s21_re", "s21_im", "s21_db"];
pub const S21_HEADER: [&str; 3] = ["freq_hz", "s21_re", "s21_im"];
pub const POPULATION_HEADER: [&str; 2] = ["time_s", "population"];
pub const DB_HEADER: [&str; 2] = ["freq_hz", "s21_db"];
pub const MODES_HEADER: [&str; 4] = ["m", "n", "p", "freq_hz"];

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("expected header {expected}, found {found}")]
    Header { expected: String, found: String },
    #[error("line {line}: {msg}")]
    Value { line: u64, msg: String },
    #[error(transparent)]
    Core(#[from] qpack_core::Error),
}

pub type Result<T> = std::result::Result<T, CsvError>;

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: Read>(input: R, header: &[&str]) -> Result<Vec<(u64, Vec<f64>)>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(CsvError::Header { expected: header.join(","), found: found.join(",") });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let values = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| CsvError::Value { line, msg: format!("'{f}' is not a number") }))
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, values));
    }
    Ok(rows)
}

pub fn write_sweep<W: Write>(out: W, grid: &FrequencyGrid, s21: &[Complex64]) -> Result<()> {
    write_rows(
        out,
        &SWEEP_HEADER,
        grid.points()
            .iter()
            .zip(s21)
            .map(|(f, s)| vec![f.to_string(), s.re.to_string(), s.im.to_string(), s_db(*s).to_string()]),
    )
}

pub fn write_s21<W: Write>(out: W, grid: &FrequencyGrid, s21: &[Complex64]) -> Result<()> {
    write_rows(
        out,
        &S21_HEADER,
        grid.points().iter().zip(s21).map(|(f, s)| vec![f.to_string(), s.re.to_string(), s.im.to_string()]),
    )
}

pub fn read_s21<R: Read>(input: R) -> Result<(FrequencyGrid, Vec<Complex64>)> {
    let rows = read_rows(input, &S21_HEADER)?;
    let freqs = rows.iter().map(|(_, v)| v[0]).collect();
    let s21 = rows.iter().map(|(_, v)| Complex64::new(v[1], v[2])).collect();
    Ok((FrequencyGrid::new(freqs)?, s21))
}

pub fn write_db<W: Write>(out: W, grid: &FrequencyGrid, db: &[f64]) -> Result<()> {
    write_rows(out, &DB_HEADER, grid.points().iter().zip(db).map(|(f, d)| vec![f.to_string(), d.to_string()]))
}

pub fn write_population<W: Write>(out: W, trace: &RabiTrace) -> Result<()> {
    write_rows(
        out,
        &POPULATION_HEADER,
        trace.times.iter().zip(&trace.excited_population).map(|(t, p)| vec![t.to_string(), p.to_string()]),
    )
}

pub fn read_population<R: Read>(input: R) -> Result<RabiTrace> {
    let rows = read_rows(input, &POPULATION_HEADER)?;
    Ok(RabiTrace::new(rows.iter().map(|(_, v)| v[0]).collect(), rows.iter().map(|(_, v)| v[1]).collect())?)
}

pub fn write_modes<W: Write>(out: W, modes: &[CavityMode]) -> Result<()> {
    write_rows(
        out,
        &MODES_HEADER,
        modes.iter().map(|m| {
            let (a, b, c) = m.indices;
            vec![a.to_string(), b.to_string(), c.to_string(), m.frequency.to_string()]
        }),
    )
}
