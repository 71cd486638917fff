use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use semiq_core::cost::LEDGER_FIELDS;

use crate::args::RunConfig;
use crate::run::{ExperimentReport, PointResult, RunError};

const DFT_COLUMNS: [&str; 4] = ["deviation", "oracle", "zero_leaves", "max_std_error"];
const SEARCH_COLUMNS: [&str; 3] = ["found", "missed", "spurious"];

/// `(label, counter)` pairs drawn on sweep charts.
const DFT_CURVES: [(&str, &str); 3] = [
    ("prep", "state_prep_units"),
    ("qft", "quantum_gate_units"),
    ("classical", "classical_ops"),
];
const SEARCH_CURVES: [(&str, &str); 2] = [
    ("oracle queries", "quantum_oracle_queries"),
    ("node accesses", "node_accesses"),
];

fn float(v: f64) -> String {
    format!("{v:e}")
}

/// Header: `n,n_q,mode,shots,seed`, the ledger counters, `forecast_<term>`
/// for every forecast term, then the per-algorithm result columns.
pub fn csv_header(report: &ExperimentReport) -> Vec<String> {
    let mut header: Vec<String> = ["n", "n_q", "mode", "shots", "seed"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(LEDGER_FIELDS.iter().map(|s| s.to_string()));
    if let Some(first) = report.points.first() {
        header.extend(
            first
                .forecast
                .terms
                .iter()
                .map(|t| format!("forecast_{}", t.name)),
        );
    }
    let extra: &[&str] = if report.command.is_search() {
        &SEARCH_COLUMNS
    } else {
        &DFT_COLUMNS
    };
    header.extend(extra.iter().map(|s| s.to_string()));
    header
}

fn csv_row(p: &PointResult) -> Vec<String> {
    let mut row = vec![
        p.n.to_string(),
        p.n_q.to_string(),
        p.mode.to_string(),
        p.shots.to_string(),
        p.seed.to_string(),
    ];
    row.extend(p.ledger.values().iter().map(u64::to_string));
    row.extend(p.forecast.terms.iter().map(|t| t.value.to_string()));
    if let Some(d) = &p.dft {
        row.push(float(d.deviation));
        row.push(
            serde_json::to_value(d.oracle)
                .unwrap()
                .as_str()
                .unwrap()
                .to_string(),
        );
        row.push(d.zero_leaves.to_string());
        row.push(float(d.max_std_error));
    }
    if let Some(s) = &p.search {
        let found: Vec<String> = s.found.iter().map(usize::to_string).collect();
        row.push(found.join(" "));
        row.push(s.missed.to_string());
        row.push(s.spurious.to_string());
    }
    row
}

pub fn render_csv(report: &ExperimentReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header(report)).expect("in-memory write");
    for p in &report.points {
        w.write_record(csv_row(p)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn render_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Line chart of `log2(counter)` against `n_q`: forecast polylines and
/// measured points. Zero counters have no logarithm and are left out.
pub fn render_svg(report: &ExperimentReport) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 170.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 60.0;
    const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

    let curves: &[(&str, &str)] = if report.command.is_search() {
        &SEARCH_CURVES
    } else {
        &DFT_CURVES
    };
    let log = |v: u64| (v > 0).then(|| (v as f64).log2());
    let mut series = Vec::new();
    for &(label, counter) in curves {
        let forecast: Vec<(usize, f64)> = report
            .points
            .iter()
            .filter_map(|p| p.forecast.term(counter).and_then(log).map(|y| (p.n_q, y)))
            .collect();
        let measured: Vec<(usize, f64)> = report
            .points
            .iter()
            .filter_map(|p| p.ledger.get(counter).and_then(log).map(|y| (p.n_q, y)))
            .collect();
        series.push((label, counter, forecast, measured));
    }

    let xs = report.points.iter().map(|p| p.n_q);
    let (x_lo, x_hi) = (
        xs.clone().min().unwrap_or(0) as f64,
        xs.max().unwrap_or(1) as f64,
    );
    let x_hi = if x_hi > x_lo { x_hi } else { x_lo + 1.0 };
    let ys = series
        .iter()
        .flat_map(|s| s.2.iter().chain(&s.3).map(|p| p.1));
    let y_lo = ys.clone().fold(f64::INFINITY, f64::min);
    let y_hi = ys.fold(f64::NEG_INFINITY, f64::max);
    let (y_lo, y_hi) = if y_lo.is_finite() {
        (y_lo.floor(), y_hi.ceil().max(y_lo.floor() + 1.0))
    } else {
        (0.0, 1.0)
    };
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y_lo) / (y_hi - y_lo) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{} cost, n = {}</text>"#,
        (W - RIGHT + LEFT) / 2.0,
        report.command.name(),
        report.n
    );
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black"><line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/></g>"#,
        H - BOTTOM,
        W - RIGHT,
        H - BOTTOM,
        H - BOTTOM
    );
    for q in x_lo as usize..=x_hi as usize {
        let x = px(q as f64);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{q}</text>"#,
            H - BOTTOM + 18.0
        );
    }
    let mut y = y_lo;
    let step = ((y_hi - y_lo) / 8.0).ceil().max(1.0);
    while y <= y_hi {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{y}</text>"#,
            LEFT - 8.0,
            py(y) + 4.0
        );
        y += step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">n_q</text>"#,
        (W - RIGHT + LEFT) / 2.0,
        H - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">log2(counter)</text>"#,
        (H - BOTTOM + TOP) / 2.0,
        (H - BOTTOM + TOP) / 2.0
    );

    for (i, (label, counter, forecast, measured)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = forecast
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x as f64), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="forecast" data-term="{label}" data-counter="{counter}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        for &(x, y) in measured {
            let _ = writeln!(
                s,
                r#"<circle class="measured" data-term="{label}" cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                px(x as f64),
                py(y)
            );
        }
        let ly = TOP + 20.0 * i as f64;
        let lx = W - RIGHT + 16.0;
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{label}</text></g>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}

fn write(path: &Path, contents: &str) -> Result<PathBuf, RunError> {
    std::fs::write(path, contents)
        .map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

/// Writes every requested output; returns the paths written, in
/// csv, json, svg order.
pub fn emit_outputs(
    report: &ExperimentReport,
    config: &RunConfig,
) -> Result<Vec<PathBuf>, RunError> {
    let mut written = Vec::new();
    if let Some(path) = &config.outputs.csv {
        written.push(write(path, &render_csv(report))?);
    }
    if let Some(path) = &config.outputs.json {
        written.push(write(path, &render_json(report))?);
    }
    if let Some(path) = &config.outputs.svg {
        written.push(write(path, &render_svg(report))?);
    }
    Ok(written)
}
