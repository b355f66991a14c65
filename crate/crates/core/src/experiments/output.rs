//! CSV tables and SVG line plots of sweep results.

use std::path::Path;

use plotters::prelude::*;

use super::SweepResult;
use crate::error::{Error, Result};

const HEADER: [&str; 5] = ["param", "error", "matrix_side", "wall_time_seconds", "diverged"];

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Resource(format!("output: {e}"))
}

fn write_rows<W: std::io::Write>(result: &SweepResult, sink: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(HEADER).map_err(io_err)?;
    for row in &result.rows {
        // `{}` on f64 prints the shortest string that round-trips exactly
        w.write_record([
            row.param.clone(),
            format!("{}", row.error),
            row.matrix_side.to_string(),
            format!("{}", row.wall_time_seconds),
            row.diverged.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn to_csv_string(result: &SweepResult) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(result, &mut buf)?;
    String::from_utf8(buf).map_err(io_err)
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err)?;
    write_rows(result, file)
}

/// Error against the swept parameter, with a logarithmic error axis.
///
/// Non-numeric parameters (method names) are placed at their row index.
/// Diverged or failed rows are omitted from the line.
pub fn plot_svg(result: &SweepResult, path: &Path) -> Result<()> {
    let points: Vec<(f64, f64)> = result
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.error.is_finite() && r.error > 0.0)
        .map(|(i, r)| (r.param.parse::<f64>().unwrap_or(i as f64), r.error))
        .collect();
    let log_x = result.parameter.starts_with("radius") && points.iter().all(|p| p.0 > 0.0);

    let (mut x_lo, mut x_hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let (mut y_lo, mut y_hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    if points.is_empty() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, 1e-16, 1.0);
    }
    if x_hi <= x_lo {
        let pad = if log_x { x_lo * 0.5 } else { 1.0 };
        x_lo -= pad;
        x_hi += pad;
    }
    if y_hi <= y_lo * 1.0001 {
        y_lo /= 10.0;
        y_hi *= 10.0;
    }

    let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(io_err)?;
    let caption = format!("{}: error vs {}", result.model, result.parameter);
    let mut builder = ChartBuilder::on(&root);
    builder
        .caption(caption, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(70);

    let series_style = ShapeStyle::from(&BLUE).stroke_width(2);
    let y_range = (y_lo / 2.0..y_hi * 2.0).log_scale();
    if log_x {
        let mut chart = builder
            .build_cartesian_2d((x_lo / 1.2..x_hi * 1.2).log_scale(), y_range)
            .map_err(io_err)?;
        chart
            .configure_mesh()
            .x_desc(result.parameter.as_str())
            .y_desc("max abs error")
            .draw()
            .map_err(io_err)?;
        chart
            .draw_series(LineSeries::new(points.iter().copied(), series_style))
            .map_err(io_err)?;
        chart
            .draw_series(points.iter().map(|&p| Circle::new(p, 3, BLUE.filled())))
            .map_err(io_err)?;
    } else {
        let pad = 0.05 * (x_hi - x_lo);
        let mut chart = builder
            .build_cartesian_2d(x_lo - pad..x_hi + pad, y_range)
            .map_err(io_err)?;
        chart
            .configure_mesh()
            .x_desc(result.parameter.as_str())
            .y_desc("max abs error")
            .draw()
            .map_err(io_err)?;
        chart
            .draw_series(LineSeries::new(points.iter().copied(), series_style))
            .map_err(io_err)?;
        chart
            .draw_series(points.iter().map(|&p| Circle::new(p, 3, BLUE.filled())))
            .map_err(io_err)?;
    }
    root.present().map_err(io_err)
}
