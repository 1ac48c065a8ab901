use std::io::Write;

use crate::error::{Error, Result};
use crate::simulator::TrajectoryRow;

pub const CSV_HEADER: [&str; 9] = [
    "round",
    "iteration",
    "residual",
    "dualgap",
    "eta_min",
    "eta_max",
    "v_max",
    "samples",
    "wall_ms",
];

/// 17 significant digits, enough to recover every `f64` exactly.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn row_fields(row: &TrajectoryRow) -> [String; 9] {
    [
        row.round.to_string(),
        row.iteration.to_string(),
        fmt_f64(row.residual),
        fmt_f64(row.dual_gap),
        fmt_f64(row.eta_min),
        fmt_f64(row.eta_max),
        fmt_f64(row.v_max),
        row.samples.to_string(),
        fmt_f64(row.wall_ms),
    ]
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: "<csv>".into(),
            source,
        },
        other => Error::Parse(format!("csv: {other:?}")),
    }
}

pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> Result<()> {
    write_labeled_csv(out, &[], rows.iter().map(|r| (Vec::new(), r)))
}

/// Long-format CSV: `prefix columns` followed by the trajectory columns.
pub(crate) fn write_labeled_csv<'a, W, I>(out: W, prefix: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (Vec<String>, &'a TrajectoryRow)>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(prefix.iter().copied().chain(CSV_HEADER))
        .map_err(csv_err)?;
    for (labels, row) in rows {
        debug_assert_eq!(labels.len(), prefix.len());
        let fields = row_fields(row);
        w.write_record(
            labels
                .iter()
                .map(String::as_str)
                .chain(fields.iter().map(String::as_str)),
        )
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv>".into(),
        source,
    })
}

fn parse_field<T: std::str::FromStr>(value: &str, column: &str, line: usize) -> Result<T> {
    value.trim().parse().map_err(|_| {
        Error::Parse(format!(
            "line {line}: column {column} has invalid value {value:?}"
        ))
    })
}

/// Reads a trajectory CSV written by [`write_trajectory_csv`].
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!(
            "unexpected header {:?}, expected {}",
            header.iter().collect::<Vec<_>>(),
            CSV_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = i + 2;
        let get = |k: usize| &record[k];
        rows.push(TrajectoryRow {
            round: parse_field(get(0), CSV_HEADER[0], line)?,
            iteration: parse_field(get(1), CSV_HEADER[1], line)?,
            residual: parse_field(get(2), CSV_HEADER[2], line)?,
            dual_gap: parse_field(get(3), CSV_HEADER[3], line)?,
            eta_min: parse_field(get(4), CSV_HEADER[4], line)?,
            eta_max: parse_field(get(5), CSV_HEADER[5], line)?,
            v_max: parse_field(get(6), CSV_HEADER[6], line)?,
            samples: parse_field(get(7), CSV_HEADER[7], line)?,
            wall_ms: parse_field(get(8), CSV_HEADER[8], line)?,
            anchor_residual: None,
        });
    }
    Ok(rows)
}
