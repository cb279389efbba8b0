//! CSV output of sweep records and input parsing for fits.
//!
//! Floats are written in Rust's shortest round-trip form (`{:?}`), so the
//! same values always produce the same bytes.

use std::io::{Read, Write};

use rydchain_core::montecarlo::{CellOutcome, SweepRecord};

use crate::CliError;

pub const SWEEP_HEADER: [&str; 9] = [
    "protocol",
    "N",
    "v0_over_omega",
    "disorder",
    "realizations",
    "mean_fidelity",
    "std_error",
    "min",
    "max",
];

pub fn float(x: f64) -> String {
    format!("{x:?}")
}

fn record_fields(r: &SweepRecord) -> [String; 9] {
    [
        r.protocol.code().to_string(),
        r.n_sites.to_string(),
        float(r.v0_over_omega),
        r.disorder.to_string(),
        r.realizations.to_string(),
        float(r.stats.mean),
        float(r.stats.std_error),
        float(r.stats.min),
        float(r.stats.max),
    ]
}

fn lf_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Writes the header and one row per successful cell.
pub fn write_sweep<W: Write>(out: W, outcomes: &[CellOutcome]) -> Result<(), CliError> {
    let mut w = lf_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for record in outcomes.iter().filter_map(|o| o.result.as_ref().ok()) {
        w.write_record(record_fields(record))?;
    }
    w.flush()?;
    Ok(())
}

/// One row per realization of every successful cell.
pub fn write_raw<W: Write>(out: W, outcomes: &[CellOutcome], raw: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = lf_writer(out);
    w.write_record(["protocol", "N", "v0_over_omega", "disorder", "realization", "fidelity"])?;
    for (outcome, values) in outcomes.iter().zip(raw) {
        let Ok(r) = &outcome.result else { continue };
        for (k, v) in values.iter().enumerate() {
            w.write_record([
                r.protocol.code().to_string(),
                r.n_sites.to_string(),
                float(r.v0_over_omega),
                r.disorder.to_string(),
                k.to_string(),
                float(*v),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `(k, θ_k)` rows.
pub fn write_areas<W: Write>(out: W, thetas: &[f64]) -> Result<(), CliError> {
    let mut w = lf_writer(out);
    w.write_record(["k", "theta"])?;
    for (k, t) in thetas.iter().enumerate() {
        w.write_record([(k + 1).to_string(), float(*t)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `(N, fidelity)` pairs.
///
/// Accepts either bare two-column rows or a header naming an `N` column and
/// a `fidelity` or `mean_fidelity` column (a sweep CSV works as input).
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_fit_points<R: Read>(input: R) -> Result<Vec<(f64, f64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut columns: Option<(usize, usize)> = None;
    let mut points = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| CliError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.iter().all(str::is_empty) {
            continue;
        }
        if columns.is_none() && points.is_empty() && row.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            let find = |names: &[&str]| row.iter().position(|h| names.contains(&h));
            let n = find(&["N", "n"]);
            let f = find(&["mean_fidelity", "fidelity"]);
            match (n, f) {
                (Some(n), Some(f)) => {
                    columns = Some((n, f));
                    continue;
                }
                _ => {
                    return Err(CliError::Parse {
                        line,
                        message: "header must name an N column and a fidelity column".into(),
                    })
                }
            }
        }
        let (ni, fi) = columns.unwrap_or((0, 1));
        let field = |i: usize, what: &str| -> Result<f64, CliError> {
            let raw = row.get(i).ok_or_else(|| CliError::Parse {
                line,
                message: format!("missing {what} column"),
            })?;
            raw.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| CliError::Parse {
                line,
                message: format!("cannot read {what} from {raw:?}"),
            })
        };
        points.push((field(ni, "N")?, field(fi, "fidelity")?));
    }
    Ok(points)
}
