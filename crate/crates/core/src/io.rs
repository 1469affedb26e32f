//! Edge lists, signal CSVs and summary tables.
//!
//! Edge list: a `# m=<nodes>` header, then one `i j weight` line per edge
//! with 1-based `i > j`. Only positive weights are written.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{MuglError, Result};
use crate::harness::ExperimentSummary;
use crate::laplacian::{pair_to_linear, pairs, WeightVector};
use crate::moments::SignalMatrix;

pub fn format_edge_list(w: &WeightVector) -> String {
    let m = w.nodes();
    let mut out = format!("# m={m}\n");
    for (k, (i, j)) in pairs(m).enumerate() {
        let x = w.as_slice()[k];
        if x > 0.0 {
            writeln!(out, "{} {} {:.16e}", i + 1, j + 1, x).unwrap();
        }
    }
    out
}

pub fn write_edge_list(path: &Path, w: &WeightVector) -> Result<()> {
    std::fs::write(path, format_edge_list(w))?;
    Ok(())
}

pub fn parse_edge_list(text: &str) -> Result<WeightVector> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| MuglError::Parse("empty edge list".into()))?;
    let m: usize = header
        .trim()
        .strip_prefix("# m=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| MuglError::Parse(format!("line 1: expected '# m=<nodes>', got '{header}'")))?;
    if m < 2 {
        return Err(MuglError::Parse(format!("line 1: need at least 2 nodes, got {m}")));
    }
    let mut w = vec![0.0; m * (m - 1) / 2];
    let mut seen = vec![false; w.len()];
    for (ln, line) in lines {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| MuglError::Parse(format!("line {}: {what}: '{line}'", ln + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad("expected 'i j weight'"));
        }
        let i: usize = fields[0].parse().map_err(|_| bad("bad node index"))?;
        let j: usize = fields[1].parse().map_err(|_| bad("bad node index"))?;
        let x: f64 = fields[2].parse().map_err(|_| bad("bad weight"))?;
        if !x.is_finite() || x < 0.0 {
            return Err(bad("weight must be finite and non-negative"));
        }
        let k = pair_to_linear(i, j, m).map_err(|e| bad(&e.to_string()))? - 1;
        if seen[k] {
            return Err(bad("duplicate edge"));
        }
        seen[k] = true;
        w[k] = x;
    }
    WeightVector::with_nodes(m, w)
}

pub fn read_edge_list(path: &Path) -> Result<WeightVector> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

/// Signals as CSV: header `node_1,...,node_m`, then one row per sample.
pub fn write_signals<W: Write>(out: W, x: &SignalMatrix) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let header: Vec<String> = (1..=x.nodes()).map(|i| format!("node_{i}")).collect();
    wtr.write_record(&header).map_err(csv_err)?;
    let d = x.data();
    for s in 0..x.samples() {
        let row: Vec<String> = (0..x.nodes()).map(|i| format!("{:.16e}", d[(i, s)])).collect();
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_signals<R: BufRead>(input: R) -> Result<SignalMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let m = rdr.headers().map_err(csv_err)?.len();
    let mut values = Vec::new();
    let mut n = 0;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != m {
            return Err(MuglError::Parse(format!(
                "row {}: expected {m} columns, got {}",
                row + 2,
                rec.len()
            )));
        }
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                MuglError::Parse(format!("row {}, column {}: bad number '{field}'", row + 2, col + 1))
            })?;
            values.push(v);
        }
        n += 1;
    }
    // rows are samples; the matrix is nodes x samples
    SignalMatrix::new(DMatrix::from_row_slice(n, m, &values).transpose())
}

pub fn read_signals_file(path: &Path) -> Result<SignalMatrix> {
    let f = std::fs::File::open(path)?;
    read_signals(std::io::BufReader::new(f))
}

pub fn write_summary_csv<W: Write>(out: W, summary: &ExperimentSummary) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["model", "metric", "mean", "normalized_std_percent", "n_seeds"])
        .map_err(csv_err)?;
    for s in &summary.metrics {
        wtr.write_record([
            s.model.clone(),
            s.metric.clone(),
            format!("{:.16e}", s.mean),
            format!("{:.16e}", s.normalized_std_percent),
            s.n_seeds.to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| MuglError::Parse(e.to_string()))
}

fn csv_err(e: csv::Error) -> MuglError {
    match e.kind() {
        csv::ErrorKind::Io(_) => MuglError::Io(e.to_string()),
        _ => MuglError::Parse(e.to_string()),
    }
}
