//! Tidy serialization of learning histories.
//!
//! CSV layout: header `stage,k_1..k_n,J_1..J_n,g_1..g_n`, LF line endings,
//! floats written in shortest round-trip form so a re-read is bit-exact.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::ActionProfile;
use crate::learning::StageRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HistoryFormat {
    #[default]
    Csv,
    JsonLines,
}

impl HistoryFormat {
    pub fn extension(self) -> &'static str {
        match self {
            HistoryFormat::Csv => "csv",
            HistoryFormat::JsonLines => "jsonl",
        }
    }
}

pub fn csv_header(n: usize) -> Vec<String> {
    let mut h = vec!["stage".to_string()];
    for prefix in ["k", "J", "g"] {
        h.extend((1..=n).map(|i| format!("{prefix}_{i}")));
    }
    h
}

fn io_err(e: impl std::fmt::Display) -> GameError {
    GameError::InvalidConfig(format!("history I/O: {e}"))
}

pub fn write_csv<W: Write>(out: W, records: &[StageRecord]) -> Result<()> {
    let n = records.first().map_or(0, |r| r.k.len());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(csv_header(n)).map_err(io_err)?;
    for r in records {
        let mut row = vec![r.stage.to_string()];
        row.extend(r.k.as_slice().iter().map(f64::to_string));
        row.extend(r.cost.iter().map(f64::to_string));
        row.extend(r.gradient.iter().map(f64::to_string));
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<StageRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let width = rd.headers().map_err(io_err)?.len();
    if width == 0 || (width - 1) % 3 != 0 {
        return Err(io_err(format!("unexpected header width {width}")));
    }
    let n = (width - 1) / 3;
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(io_err)?;
        let stage: usize = row[0].parse().map_err(io_err)?;
        let vals: Vec<f64> = (1..width)
            .map(|c| row[c].parse::<f64>().map_err(io_err))
            .collect::<Result<_>>()?;
        out.push(StageRecord {
            stage,
            k: ActionProfile::new(vals[..n].to_vec()),
            cost: vals[n..2 * n].to_vec(),
            gradient: vals[2 * n..].to_vec(),
        });
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    stage: usize,
    k: Vec<f64>,
    #[serde(rename = "J")]
    cost: Vec<f64>,
    g: Vec<f64>,
}

pub fn write_json_lines<W: Write>(mut out: W, records: &[StageRecord]) -> Result<()> {
    for r in records {
        let row = JsonRow {
            stage: r.stage,
            k: r.k.as_slice().to_vec(),
            cost: r.cost.clone(),
            g: r.gradient.clone(),
        };
        serde_json::to_writer(&mut out, &row).map_err(io_err)?;
        out.write_all(b"\n").map_err(io_err)?;
    }
    Ok(())
}

pub fn read_json_lines<R: BufRead>(input: R) -> Result<Vec<StageRecord>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|line| {
            let row: JsonRow = serde_json::from_str(&line.map_err(io_err)?).map_err(io_err)?;
            Ok(StageRecord {
                stage: row.stage,
                k: ActionProfile::new(row.k),
                cost: row.cost,
                gradient: row.g,
            })
        })
        .collect()
}

pub fn write_history<W: Write>(out: W, records: &[StageRecord], format: HistoryFormat) -> Result<()> {
    match format {
        HistoryFormat::Csv => write_csv(out, records),
        HistoryFormat::JsonLines => write_json_lines(out, records),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6f64..1e6, -1e-300f64..1e-300, Just(0.0), Just(1.0 / 3.0)]
    }

    fn records(n: usize, rows: usize) -> impl Strategy<Value = Vec<StageRecord>> {
        prop::collection::vec(prop::collection::vec(finite(), 3 * n), rows).prop_map(move |rows| {
            rows.into_iter()
                .enumerate()
                .map(|(stage, v)| StageRecord {
                    stage,
                    k: ActionProfile::new(v[..n].to_vec()),
                    cost: v[n..2 * n].to_vec(),
                    gradient: v[2 * n..].to_vec(),
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(recs in (1usize..6).prop_flat_map(|n| records(n, 4))) {
            let mut buf = Vec::new();
            write_csv(&mut buf, &recs).unwrap();
            prop_assert_eq!(read_csv(buf.as_slice()).unwrap(), recs);
        }

        #[test]
        fn json_lines_round_trip_is_exact(recs in (1usize..6).prop_flat_map(|n| records(n, 4))) {
            let mut buf = Vec::new();
            write_json_lines(&mut buf, &recs).unwrap();
            prop_assert_eq!(read_json_lines(buf.as_slice()).unwrap(), recs);
        }
    }

    #[test]
    fn header_and_line_endings() {
        let rec = StageRecord {
            stage: 0,
            k: ActionProfile::new(vec![0.5, 1.0]),
            cost: vec![0.1, 0.2],
            gradient: vec![-0.25, 3e-9],
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "stage,k_1,k_2,J_1,J_2,g_1,g_2\n0,0.5,1,0.1,0.2,-0.25,0.000000003\n");
    }
}
