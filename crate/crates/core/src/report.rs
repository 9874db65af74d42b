//! Experiment report and its CSV / JSON carriers.
//!
//! CSV columns, in order:
//! `model,mode,n,m,seed,empirical_mean,std_error,predicted_numeric,predicted_asymptotic,rel_err_numeric,rel_err_asymptotic`.
//! Reals are written with 17 significant digits so every `f64` round-trips.

use std::io::{Read, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::experiment::Mode;

pub const CSV_HEADER: [&str; 11] = [
    "model",
    "mode",
    "n",
    "m",
    "seed",
    "empirical_mean",
    "std_error",
    "predicted_numeric",
    "predicted_asymptotic",
    "rel_err_numeric",
    "rel_err_asymptotic",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub empirical_mean: f64,
    pub std_error: f64,
    pub predicted_numeric: f64,
    pub predicted_asymptotic: f64,
    pub rel_err_numeric: f64,
    pub rel_err_asymptotic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    /// Canonical model spec string.
    pub model: String,
    pub mode: Mode,
    pub replicates: usize,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

/// 17 significant digits in scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_real(field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Report(format!("not a real number: '{field}'")))
}

fn parse_int<T: std::str::FromStr>(field: &str) -> Result<T> {
    field
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Report(format!("not an integer: '{field}'")))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Report(e.to_string())
}

/// Flat record shared by the JSON form; one per report row.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Record {
    model: String,
    mode: Mode,
    n: usize,
    m: usize,
    seed: u64,
    #[serde(with = "nullable_real")]
    empirical_mean: f64,
    #[serde(with = "nullable_real")]
    std_error: f64,
    #[serde(with = "nullable_real")]
    predicted_numeric: f64,
    #[serde(with = "nullable_real")]
    predicted_asymptotic: f64,
    #[serde(with = "nullable_real")]
    rel_err_numeric: f64,
    #[serde(with = "nullable_real")]
    rel_err_asymptotic: f64,
}

// JSON has no NaN; unavailable values travel as null.
mod nullable_real {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

impl ExperimentReport {
    fn records(&self) -> impl Iterator<Item = Record> + '_ {
        self.rows.iter().map(|r| Record {
            model: self.model.clone(),
            mode: self.mode,
            n: r.n,
            m: self.replicates,
            seed: self.seed,
            empirical_mean: r.empirical_mean,
            std_error: r.std_error,
            predicted_numeric: r.predicted_numeric,
            predicted_asymptotic: r.predicted_asymptotic,
            rel_err_numeric: r.rel_err_numeric,
            rel_err_asymptotic: r.rel_err_asymptotic,
        })
    }

    fn from_records(records: Vec<Record>) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::Report("report has no rows".into()))?;
        let mut report = ExperimentReport {
            model: first.model.clone(),
            mode: first.mode,
            replicates: first.m,
            seed: first.seed,
            rows: Vec::with_capacity(records.len()),
        };
        for rec in records {
            if rec.model != report.model
                || rec.mode != report.mode
                || rec.m != report.replicates
                || rec.seed != report.seed
            {
                return Err(Error::Report(format!(
                    "row n = {} disagrees with the report metadata",
                    rec.n
                )));
            }
            report.rows.push(ReportRow {
                n: rec.n,
                empirical_mean: rec.empirical_mean,
                std_error: rec.std_error,
                predicted_numeric: rec.predicted_numeric,
                predicted_asymptotic: rec.predicted_asymptotic,
                rel_err_numeric: rec.rel_err_numeric,
                rel_err_asymptotic: rec.rel_err_asymptotic,
            });
        }
        Ok(report)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(csv_error)?;
        for rec in self.records() {
            w.write_record([
                rec.model,
                rec.mode.to_string(),
                rec.n.to_string(),
                rec.m.to_string(),
                rec.seed.to_string(),
                format_real(rec.empirical_mean),
                format_real(rec.std_error),
                format_real(rec.predicted_numeric),
                format_real(rec.predicted_asymptotic),
                format_real(rec.rel_err_numeric),
                format_real(rec.rel_err_asymptotic),
            ])
            .map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::Report(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = rdr.headers().map_err(csv_error)?.clone();
        if header.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(Error::Report(format!(
                "unexpected header, expected {}",
                CSV_HEADER.join(",")
            )));
        }
        let mut records = Vec::new();
        for row in rdr.records() {
            let row = row.map_err(csv_error)?;
            let f = |k: usize| &row[k];
            records.push(Record {
                model: f(0).to_string(),
                mode: f(1).parse()?,
                n: parse_int(f(2))?,
                m: parse_int(f(3))?,
                seed: parse_int(f(4))?,
                empirical_mean: parse_real(f(5))?,
                std_error: parse_real(f(6))?,
                predicted_numeric: parse_real(f(7))?,
                predicted_asymptotic: parse_real(f(8))?,
                rel_err_numeric: parse_real(f(9))?,
                rel_err_asymptotic: parse_real(f(10))?,
            });
        }
        Self::from_records(records)
    }

    pub fn to_json_string(&self) -> String {
        let records: Vec<Record> = self.records().collect();
        serde_json::to_string_pretty(&records).expect("records serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let records: Vec<Record> =
            serde_json::from_str(s).map_err(|e| Error::Report(e.to_string()))?;
        Self::from_records(records)
    }
}
