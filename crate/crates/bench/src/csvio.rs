//! Trajectory and summary CSV files.

use std::io::{Read, Write};

use gdaam::optimizers::{Record, Status};

use crate::error::{BenchError, Result};

pub const TRAJECTORY_HEADER: [&str; 5] = ["iter", "time_ns", "dist_to_opt", "grad_norm", "residual_norm"];
pub const SUMMARY_HEADER: [&str; 6] = ["method", "seed", "status", "iters", "final_dist", "wall_ms"];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn write_trajectory<W: Write>(out: W, records: &[Record]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for r in records {
        w.write_record([
            r.iter.to_string(),
            r.time_ns.to_string(),
            opt(r.dist_to_opt),
            r.grad_norm.to_string(),
            r.residual_norm.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| BenchError::Csv(format!("missing column `{name}`")))?;
    raw.parse().map_err(|_| BenchError::Csv(format!("bad {name} `{raw}`")))
}

fn opt_field(rec: &csv::StringRecord, i: usize, name: &str) -> Result<Option<f64>> {
    match rec.get(i) {
        Some("") => Ok(None),
        _ => field(rec, i, name).map(Some),
    }
}

fn check_header<R: Read>(r: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = r.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(BenchError::Csv(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    Ok(())
}

pub fn read_trajectory<R: Read>(input: R) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &TRAJECTORY_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(Record {
                iter: field(&rec, 0, "iter")?,
                time_ns: field(&rec, 1, "time_ns")?,
                dist_to_opt: opt_field(&rec, 2, "dist_to_opt")?,
                grad_norm: field(&rec, 3, "grad_norm")?,
                residual_norm: field(&rec, 4, "residual_norm")?,
            })
        })
        .collect()
}

/// One `(method, seed)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub seed: u64,
    pub status: Status,
    pub iters: usize,
    pub final_dist: Option<f64>,
    pub wall_ms: f64,
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.seed.to_string(),
            r.status.as_str().to_string(),
            r.iters.to_string(),
            opt(r.final_dist),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &SUMMARY_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            let status: &str = rec.get(2).unwrap_or("");
            Ok(SummaryRow {
                method: field(&rec, 0, "method")?,
                seed: field(&rec, 1, "seed")?,
                status: status.parse().map_err(|_| BenchError::Csv(format!("bad status `{status}`")))?,
                iters: field(&rec, 3, "iters")?,
                final_dist: opt_field(&rec, 4, "final_dist")?,
                wall_ms: field(&rec, 5, "wall_ms")?,
            })
        })
        .collect()
}

/// Drops the named columns; used to compare runs modulo timing.
pub fn strip_columns(csv_text: &str, drop: &[&str]) -> Result<String> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers()?.clone();
    let keep: Vec<usize> = (0..header.len()).filter(|&i| !drop.contains(&&header[i])).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(keep.iter().map(|&i| &header[i]))?;
    for rec in r.records() {
        let rec = rec?;
        w.write_record(keep.iter().map(|&i| rec.get(i).unwrap_or("")))?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
