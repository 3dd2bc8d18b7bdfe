//! CSV layouts for count records, `(t, P)` data and sweeps.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{DataPoint, DataSeries};
use crate::tomography::{Basis, MeasurementSetting, TomographyRecord};

pub const RECORDS_HEADER: [&str; 5] = ["signal", "idler", "coincidences", "accidentals", "gates"];
pub const DATA_HEADER: [&str; 3] = ["t_s", "p", "sigma"];
pub const CORRELATION_HEADER: [&str; 7] = ["t_s", "L_m", "P", "total", "classical", "discord", "concurrence"];
pub const SWEEP_HEADER: [&str; 12] = [
    "t_s",
    "L_m",
    "P_pasy",
    "P_p3",
    "total_pasy",
    "classical_pasy",
    "discord_pasy",
    "concurrence_pasy",
    "total_p3",
    "classical_p3",
    "discord_p3",
    "concurrence_p3",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RecordRow {
    signal: Basis,
    idler: Basis,
    coincidences: u64,
    accidentals: u64,
    gates: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub t_s: f64,
    #[serde(rename = "L_m")]
    pub l_m: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub total: f64,
    pub classical: f64,
    pub discord: f64,
    pub concurrence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t_s: f64,
    #[serde(rename = "L_m")]
    pub l_m: f64,
    #[serde(rename = "P_pasy")]
    pub p_pasy: f64,
    #[serde(rename = "P_p3")]
    pub p_p3: f64,
    pub total_pasy: f64,
    pub classical_pasy: f64,
    pub discord_pasy: f64,
    pub concurrence_pasy: f64,
    pub total_p3: f64,
    pub classical_p3: f64,
    pub discord_p3: f64,
    pub concurrence_p3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct DataRow {
    t_s: f64,
    p: f64,
    sigma: Option<f64>,
}

/// Serializes `rows` and checks the emitted header against `header`
/// before anything reaches `out`.
pub fn write_csv<T: Serialize, W: Write>(out: W, header: &[&str], rows: &[T]) -> Result<()> {
    let mut buf = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        buf.write_record(header)?;
    }
    for row in rows {
        buf.serialize(row)?;
    }
    let bytes = buf.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let first = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    let expected = header.join(",");
    if first != expected.as_bytes() {
        return Err(Error::Schema(format!(
            "header {:?} does not match {:?}",
            String::from_utf8_lossy(first),
            expected
        )));
    }
    let mut out = out;
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str], optional_last: bool) -> Result<()> {
    let found: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let ok = found == expected
        || (optional_last && found.len() + 1 == expected.len() && found[..] == expected[..expected.len() - 1]);
    if ok {
        Ok(())
    } else {
        Err(Error::Schema(format!("expected header {:?}, found {:?}", expected.join(","), found.join(","))))
    }
}

pub fn write_records<W: Write>(out: W, records: &[TomographyRecord]) -> Result<()> {
    let rows: Vec<RecordRow> = records
        .iter()
        .map(|r| RecordRow {
            signal: r.setting.signal,
            idler: r.setting.idler,
            coincidences: r.coincidences,
            accidentals: r.accidentals,
            gates: r.gate_count,
        })
        .collect();
    write_csv(out, &RECORDS_HEADER, &rows)
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<TomographyRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, &RECORDS_HEADER, false)?;
    reader
        .deserialize::<RecordRow>()
        .map(|row| {
            let row = row?;
            Ok(TomographyRecord {
                setting: MeasurementSetting::new(row.signal, row.idler),
                coincidences: row.coincidences,
                accidentals: row.accidentals,
                gate_count: row.gates,
            })
        })
        .collect()
}

/// Reads `t_s,p,sigma`. The `sigma` column may be missing or empty, in
/// which case the uncertainty is 1.
pub fn read_data<R: Read>(input: R) -> Result<DataSeries> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, &DATA_HEADER, true)?;
    let mut points = Vec::new();
    for row in reader.deserialize::<DataRow>() {
        let row = row?;
        points.push(DataPoint {
            t: row.t_s,
            p: row.p,
            sigma: row.sigma.unwrap_or(1.0),
        });
    }
    DataSeries::new(points)
}

pub fn write_data<W: Write>(out: W, data: &DataSeries) -> Result<()> {
    let rows: Vec<DataRow> = data
        .points()
        .iter()
        .map(|pt| DataRow {
            t_s: pt.t,
            p: pt.p,
            sigma: Some(pt.sigma),
        })
        .collect();
    write_csv(out, &DATA_HEADER, &rows)
}

pub fn write_correlations<W: Write>(out: W, rows: &[CorrelationRow]) -> Result<()> {
    write_csv(out, &CORRELATION_HEADER, rows)
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_csv(out, &SWEEP_HEADER, rows)
}
