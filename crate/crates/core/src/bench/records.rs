//! CSV and JSON-lines serialization of records, predictions and summaries.

use std::io::{BufRead, Write};
use std::str::FromStr;

use super::{BenchmarkRecord, EnsembleComparison, PredictionSet, SummaryRow};
use crate::error::{Error, Result};

/// Column order of record CSV files.
pub const RECORD_CSV_HEADER: &str = "dataset,scales,alpha,probe,seed,status,accuracy,t_roman,t_fit,t_predict,error";

/// Column order of summary CSV files.
pub const SUMMARY_CSV_HEADER: &str = "probe,scales,alpha,baseline,datasets,wins,ties,losses,acc_diff_median,acc_diff_q1,acc_diff_q3,abs_acc_diff_median,abs_acc_diff_q1,abs_acc_diff_q3,train_ratio,infer_ratio,excluded";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecordFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for RecordFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?} (expected csv or jsonl)"))),
        }
    }
}

pub fn write_records(mut out: impl Write, records: &[BenchmarkRecord], format: RecordFormat) -> Result<()> {
    match format {
        RecordFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if records.is_empty() {
                w.write_record(RECORD_CSV_HEADER.split(','))?;
            }
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        RecordFormat::Jsonl => write_jsonl(&mut out, records)?,
    }
    Ok(())
}

pub fn read_records(input: impl BufRead, format: RecordFormat) -> Result<Vec<BenchmarkRecord>> {
    match format {
        RecordFormat::Csv => read_records_csv(input),
        RecordFormat::Jsonl => read_records_jsonl(input),
    }
}

pub fn read_records_csv(input: impl BufRead) -> Result<Vec<BenchmarkRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != RECORD_CSV_HEADER {
        return Err(Error::parse(1, 1, format!("expected record header {RECORD_CSV_HEADER:?}")));
    }
    r.deserialize().enumerate().map(|(i, row)| row.map_err(|e| csv_error(i + 2, e))).collect()
}

fn csv_error(line: usize, e: csv::Error) -> Error {
    Error::parse(line, 1, e.to_string())
}

pub fn read_records_jsonl(input: impl BufRead) -> Result<Vec<BenchmarkRecord>> {
    read_jsonl(input)
}

pub fn write_predictions(mut out: impl Write, predictions: &[PredictionSet]) -> Result<()> {
    write_jsonl(&mut out, predictions)
}

pub fn read_predictions(input: impl BufRead) -> Result<Vec<PredictionSet>> {
    read_jsonl(input)
}

pub fn write_summary_csv(out: impl Write, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(SUMMARY_CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Column order of ensemble comparison CSV files.
pub const ENSEMBLE_CSV_HEADER: &str = "dataset,baseline_accuracy,mixed_accuracy,delta,outcome";

pub fn write_ensemble_csv(out: impl Write, comparisons: &[EnsembleComparison]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if comparisons.is_empty() {
        w.write_record(ENSEMBLE_CSV_HEADER.split(','))?;
    }
    for c in comparisons {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}

/// Any serializable rows as JSON lines.
pub fn write_jsonl_rows<T: serde::Serialize>(mut out: impl Write, rows: &[T]) -> Result<()> {
    write_jsonl(&mut out, rows)
}

fn write_jsonl<T: serde::Serialize>(out: &mut impl Write, items: &[T]) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut *out, item)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn read_jsonl<T: serde::de::DeserializeOwned>(input: impl BufRead) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::parse(i + 1, e.column(), e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::RecordStatus;

    fn record(seed: u64, ok: bool) -> BenchmarkRecord {
        BenchmarkRecord {
            dataset: "a,b".into(),
            scales: 4,
            alpha: 0.5,
            probe: "pooled".into(),
            seed,
            status: if ok { RecordStatus::Ok } else { RecordStatus::Failed },
            accuracy: ok.then_some(0.1 + 0.2),
            t_roman: 1e-7,
            t_fit: 0.333,
            t_predict: 2.0,
            error: (!ok).then(|| "broke \"here\"".into()),
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let recs = vec![record(0, true), record(1, false)];
        let mut buf = Vec::new();
        write_records(&mut buf, &recs, RecordFormat::Csv).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), RECORD_CSV_HEADER);
        assert_eq!(read_records(buf.as_slice(), RecordFormat::Csv).unwrap(), recs);
    }

    #[test]
    fn jsonl_round_trip_is_exact() {
        let recs = vec![record(0, true), record(1, false)];
        let mut buf = Vec::new();
        write_records(&mut buf, &recs, RecordFormat::Jsonl).unwrap();
        assert_eq!(read_records(buf.as_slice(), RecordFormat::Jsonl).unwrap(), recs);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let text = "dataset,seed\nx,1\n";
        assert!(matches!(read_records_csv(text.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_record_set_still_has_header() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[], RecordFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), RECORD_CSV_HEADER);
    }
}
