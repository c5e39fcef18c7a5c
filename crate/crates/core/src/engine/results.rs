//! Result files: the time series CSV, timing JSON and, in verbose runs, node
//! temperatures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::run::{SimulationOutput, SimulationResult, TimingReport};
use super::weather::format_timestamp;
use crate::error::{Error, Result};

pub const RESULTS_FILE: &str = "results.csv";
pub const TIMING_FILE: &str = "timing.json";
pub const NODES_FILE: &str = "nodes.csv";

/// Six significant digits, `%g` style.
pub fn format_value(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x.is_infinite() {
            format!("{x}")
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    let fixed = format!("{x:.decimals$}");
    let out = trim_zeros(&fixed);
    if out == "-0" {
        "0".into()
    } else {
        out
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn results_header(result: &SimulationResult) -> Vec<String> {
    let mut h = vec!["timestamp".to_string()];
    for z in &result.zone_names {
        for field in ["tair", "w", "p_hvac", "clamped"] {
            h.push(format!("zone.{z}.{field}"));
        }
    }
    for l in &result.link_ids {
        h.push(format!("link.{l}.mdot"));
    }
    h
}

pub fn write_results_csv<W: Write>(out: W, result: &SimulationResult) -> Result<()> {
    let err = |e: csv::Error| Error::Config(format!("writing results: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(results_header(result)).map_err(err)?;
    for row in &result.rows {
        let mut rec = vec![format_timestamp(&row.timestamp)];
        for z in &row.zones {
            rec.push(format_value(z.tair));
            rec.push(format_value(z.w));
            rec.push(format_value(z.p_hvac));
            rec.push(if z.clamped { "1" } else { "0" }.into());
        }
        rec.extend(row.links.iter().map(|m| format_value(*m)));
        w.write_record(rec).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing results: {e}")))
}

pub fn write_nodes_csv<W: Write>(out: W, result: &SimulationResult) -> Result<()> {
    let err = |e: csv::Error| Error::Config(format!("writing node results: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["timestamp".to_string()];
    header.extend(result.node_names.iter().flatten().cloned());
    w.write_record(header).map_err(err)?;
    for row in &result.rows {
        let mut rec = vec![format_timestamp(&row.timestamp)];
        rec.extend(row.zones.iter().flat_map(|z| z.nodes.iter().map(|t| format_value(*t))));
        w.write_record(rec).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing node results: {e}")))
}

pub fn timing_json(timing: &TimingReport) -> String {
    serde_json::to_string_pretty(timing).expect("timing serializes")
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// Writes the result files of one run into `dir`, returning their paths.
pub fn write_outputs(dir: &Path, output: &SimulationOutput, prefix: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![];
    let results = dir.join(format!("{prefix}{RESULTS_FILE}"));
    write_results_csv(std::io::BufWriter::new(create(&results)?), &output.result)?;
    written.push(results);
    let timing = dir.join(format!("{prefix}{TIMING_FILE}"));
    fs::write(&timing, timing_json(&output.timing)).map_err(|e| Error::io(&timing, e))?;
    written.push(timing);
    if !output.result.node_names.is_empty() {
        let nodes = dir.join(format!("{prefix}{NODES_FILE}"));
        write_nodes_csv(std::io::BufWriter::new(create(&nodes)?), &output.result)?;
        written.push(nodes);
    }
    Ok(written)
}
