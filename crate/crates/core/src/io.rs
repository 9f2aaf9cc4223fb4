//! On-disk formats. Text outputs are CSV with a leading version header
//! comment; large activity recordings switch to a little-endian binary dump
//! with the same information. All rendering is deterministic: reruns with
//! the same seed produce byte-identical files.
//!
//! Binary activity dump, version 1 (all integers little-endian):
//!
//! ```text
//! offset  size        field
//! 0       4           magic "TNTS"
//! 4       2           format version (1)
//! 6       2           reserved (0)
//! 8       4           n_nodes  (u32)
//! 12      4           n_times  (u32)
//! 16      8           master_seed (u64)
//! 24      4           run_index (u32)
//! 28      4           reserved (0)
//! 32      8*n_times   recorded steps (u64 each)
//! ...     8*n_times*n_nodes  activities (f64), row-major by time
//! ```

use std::fmt::Write as _;

use crate::analysis::sweeps::{ContourPoint, PhaseGrid, ScenarioGrid};
use crate::error::{Error, Result};
use crate::sim::ActivitySeries;

/// First line of every text artifact.
pub const FORMAT_HEADER: &str = "# tempnet-tradeoff format v1";

const BINARY_MAGIC: &[u8; 4] = b"TNTS";
const BINARY_VERSION: u16 = 1;

/// One sampled row of the analytic curves.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CurveSample {
    pub t: f64,
    pub value: f64,
    pub cost: f64,
    pub net: f64,
}

/// Shortest decimal form that round-trips; integers print without a
/// trailing ".0" (2.25 -> "2.25", 9.0 -> "9").
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn render_series_csv(series: &ActivitySeries) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(
        out,
        "# kind=activity-series master_seed={} run={}",
        series.master_seed, series.run_index
    );
    let _ = writeln!(out, "step,node_id,activity");
    for (&t, row) in series.times.iter().zip(&series.per_node) {
        for (node, &a) in row.iter().enumerate() {
            let _ = writeln!(out, "{t},{node},{}", fmt_f64(a));
        }
    }
    out
}

/// Leading rows of the CSV form, written next to a binary dump so the data
/// stays inspectable without a decoder.
pub fn render_series_sample_csv(series: &ActivitySeries, max_rows: usize) -> String {
    let total = series.times.len() * series.n_nodes();
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(
        out,
        "# kind=activity-series-sample rows={} of={} master_seed={} run={}",
        max_rows.min(total),
        total,
        series.master_seed,
        series.run_index
    );
    let _ = writeln!(out, "step,node_id,activity");
    let mut written = 0;
    'outer: for (&t, row) in series.times.iter().zip(&series.per_node) {
        for (node, &a) in row.iter().enumerate() {
            if written >= max_rows {
                break 'outer;
            }
            let _ = writeln!(out, "{t},{node},{}", fmt_f64(a));
            written += 1;
        }
    }
    out
}

pub fn render_series_binary(series: &ActivitySeries) -> Result<Vec<u8>> {
    let n_nodes = series.n_nodes();
    let n_times = series.times.len();
    if n_nodes > u32::MAX as usize || n_times > u32::MAX as usize {
        return Err(Error::Capacity(
            "series too large for the binary dump header".into(),
        ));
    }
    let mut out =
        Vec::with_capacity(32 + 8 * n_times + 8 * n_times * n_nodes);
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(n_nodes as u32).to_le_bytes());
    out.extend_from_slice(&(n_times as u32).to_le_bytes());
    out.extend_from_slice(&series.master_seed.to_le_bytes());
    out.extend_from_slice(&series.run_index.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for &t in &series.times {
        out.extend_from_slice(&t.to_le_bytes());
    }
    for row in &series.per_node {
        for &a in row {
            out.extend_from_slice(&a.to_le_bytes());
        }
    }
    Ok(out)
}

/// Inverse of `render_series_binary`; `mean_activity` is recomputed.
pub fn parse_series_binary(bytes: &[u8]) -> Result<ActivitySeries> {
    let take = |offset: usize, len: usize| -> Result<&[u8]> {
        bytes.get(offset..offset + len).ok_or_else(|| {
            Error::Config(format!("binary series truncated at offset {offset}"))
        })
    };
    if take(0, 4)? != BINARY_MAGIC {
        return Err(Error::Config("binary series: bad magic".into()));
    }
    let version = u16::from_le_bytes(take(4, 2)?.try_into().unwrap());
    if version != BINARY_VERSION {
        return Err(Error::Config(format!(
            "binary series: unsupported version {version}"
        )));
    }
    let n_nodes = u32::from_le_bytes(take(8, 4)?.try_into().unwrap()) as usize;
    let n_times = u32::from_le_bytes(take(12, 4)?.try_into().unwrap()) as usize;
    let master_seed = u64::from_le_bytes(take(16, 8)?.try_into().unwrap());
    let run_index = u32::from_le_bytes(take(24, 4)?.try_into().unwrap());
    let mut offset = 32;
    let mut times = Vec::with_capacity(n_times);
    for _ in 0..n_times {
        times.push(u64::from_le_bytes(take(offset, 8)?.try_into().unwrap()));
        offset += 8;
    }
    let mut per_node = Vec::with_capacity(n_times);
    let mut mean_activity = Vec::with_capacity(n_times);
    for _ in 0..n_times {
        let mut row = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            row.push(f64::from_le_bytes(take(offset, 8)?.try_into().unwrap()));
            offset += 8;
        }
        mean_activity.push(row.iter().sum::<f64>() / n_nodes as f64);
        per_node.push(row);
    }
    Ok(ActivitySeries {
        times,
        per_node,
        mean_activity,
        master_seed,
        run_index,
    })
}

pub fn render_curves_csv(samples: &[CurveSample]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(out, "t,value,cost,net");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.value),
            fmt_f64(s.cost),
            fmt_f64(s.net)
        );
    }
    out
}

/// Token written for cells without a value. A diverging characteristic time
/// is "inf"; quantities that are simply not defined there are "na".
fn absent_token(grid: &PhaseGrid) -> &'static str {
    if grid.quantity == "ln_t_char" {
        "inf"
    } else {
        "na"
    }
}

pub fn render_phase_grid_csv(grid: &PhaseGrid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(
        out,
        "# kind=phase-grid quantity={} x={} y={} t0={}",
        grid.quantity,
        grid.x_label,
        grid.y_label,
        fmt_f64(grid.t0)
    );
    let _ = writeln!(out, "x,y,value");
    for (iy, &yv) in grid.y.iter().enumerate() {
        for (ix, &xv) in grid.x.iter().enumerate() {
            let rendered = match grid.at(ix, iy) {
                Some(v) => fmt_f64(v),
                None => absent_token(grid).into(),
            };
            let _ = writeln!(out, "{},{},{}", fmt_f64(xv), fmt_f64(yv), rendered);
        }
    }
    out
}

#[derive(serde::Serialize)]
struct PhaseGridDocument<'a> {
    format: &'static str,
    tool_version: &'static str,
    quantity: &'a str,
    x_label: &'a str,
    y_label: &'a str,
    t0: f64,
    absent_means: &'static str,
    x: &'a [f64],
    y: &'a [f64],
    /// Row-major over (y, x); null marks an absent cell.
    values: &'a [Option<f64>],
}

pub fn render_phase_grid_json(grid: &PhaseGrid) -> Result<String> {
    let doc = PhaseGridDocument {
        format: FORMAT_HEADER.trim_start_matches("# "),
        tool_version: env!("CARGO_PKG_VERSION"),
        quantity: &grid.quantity,
        x_label: &grid.x_label,
        y_label: &grid.y_label,
        t0: grid.t0,
        absent_means: absent_token(grid),
        x: &grid.x,
        y: &grid.y,
        values: &grid.values,
    };
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Invariant(format!("grid serialization failed: {e}")))
}

pub fn render_scenario_grid_csv(grid: &ScenarioGrid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(
        out,
        "# kind=scenario-grid x={} y={} t0={} tol={}",
        grid.x_label,
        grid.y_label,
        fmt_f64(grid.t0),
        fmt_f64(grid.tol)
    );
    let _ = writeln!(out, "x,y,value");
    for (iy, &yv) in grid.y.iter().enumerate() {
        for (ix, &xv) in grid.x.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", fmt_f64(xv), fmt_f64(yv), grid.at(ix, iy));
        }
    }
    out
}

#[derive(serde::Serialize)]
struct ScenarioGridDocument<'a> {
    format: &'static str,
    tool_version: &'static str,
    x_label: &'a str,
    y_label: &'a str,
    t0: f64,
    tol: f64,
    x: &'a [f64],
    y: &'a [f64],
    scenarios: Vec<String>,
}

pub fn render_scenario_grid_json(grid: &ScenarioGrid) -> Result<String> {
    let doc = ScenarioGridDocument {
        format: FORMAT_HEADER.trim_start_matches("# "),
        tool_version: env!("CARGO_PKG_VERSION"),
        x_label: &grid.x_label,
        y_label: &grid.y_label,
        t0: grid.t0,
        tol: grid.tol,
        x: &grid.x,
        y: &grid.y,
        scenarios: grid.scenarios.iter().map(ToString::to_string).collect(),
    };
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Invariant(format!("grid serialization failed: {e}")))
}

pub fn render_contours_csv(points: &[ContourPoint], x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(out, "level,{y_label},{x_label}");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(p.level),
            fmt_f64(p.y),
            fmt_f64(p.x)
        );
    }
    out
}
