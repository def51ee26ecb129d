//! Figure assets: deterministic CSV, a minimal SVG rendering, and the
//! provenance sidecar.

use super::svg::{heat_color, short, Frame, SvgCanvas, SERIES_COLORS};
use super::table::Table;
use super::ExperimentError;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureStyle {
    /// Grid of colored cells (wind_ar x demand_ar).
    Heatmap,
    /// observed_ar vs pct_error points shaded by coefficient.
    Scatter,
    /// Three panels of per-estimator curves over sample size.
    IndicatorPanels,
    /// Point estimates with error bars per estimator.
    EstimatePanel,
}

/// Write `<name>.csv`, `<name>.svg`, and `<name>.meta.json` into `out_dir`.
/// Returns the written paths.
pub fn emit_figure_assets(
    table: &Table,
    style: FigureStyle,
    meta: &serde_json::Value,
    out_dir: &Path,
    name: &str,
) -> Result<Vec<PathBuf>, ExperimentError> {
    if table.rows.is_empty() {
        return Err(ExperimentError::EmptyTable);
    }
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{name}.csv"));
    let svg_path = out_dir.join(format!("{name}.svg"));
    let meta_path = out_dir.join(format!("{name}.meta.json"));
    std::fs::write(&csv_path, table.to_csv())?;
    std::fs::write(&svg_path, render_svg(table, style))?;
    std::fs::write(&meta_path, serde_json::to_string_pretty(meta).unwrap_or_default())?;
    Ok(vec![csv_path, svg_path, meta_path])
}

/// Render a table to SVG without touching the filesystem.
pub fn render_figure(table: &Table, style: FigureStyle) -> String {
    render_svg(table, style)
}

pub(super) fn render_svg(table: &Table, style: FigureStyle) -> String {
    match style {
        FigureStyle::Heatmap => render_heatmap(table),
        FigureStyle::Scatter => render_scatter(table),
        FigureStyle::IndicatorPanels => render_indicator_panels(table),
        FigureStyle::EstimatePanel => render_estimate_panel(table),
    }
}

fn sorted_unique(values: &[f64]) -> Vec<f64> {
    let mut set: Vec<f64> = values.to_vec();
    set.sort_by(|a, b| a.partial_cmp(b).unwrap());
    set.dedup();
    set
}

fn render_heatmap(table: &Table) -> String {
    let xs = sorted_unique(&table.numeric_column("wind_ar"));
    let ys = sorted_unique(&table.numeric_column("demand_ar"));
    let vals = table.numeric_column("mean_abs_pct_error");
    let vmax = vals.iter().cloned().fold(0.0, f64::max).max(1e-9);

    let cell = 42.0;
    let (x0, y0) = (90.0, 40.0);
    let w = cell * xs.len() as f64;
    let h = cell * ys.len() as f64;
    let mut c = SvgCanvas::new(x0 + w + 120.0, y0 + h + 70.0);
    let wind = table.numeric_column("wind_ar");
    let demand = table.numeric_column("demand_ar");
    for (i, v) in vals.iter().enumerate() {
        let xi = xs.iter().position(|&x| x == wind[i]).unwrap();
        let yi = ys.iter().position(|&y| y == demand[i]).unwrap();
        let px = x0 + cell * xi as f64;
        // Larger demand coefficients upward.
        let py = y0 + h - cell * (yi + 1) as f64;
        c.rect(px, py, cell - 1.0, cell - 1.0, &heat_color(v / vmax));
        c.text(px + 4.0, py + cell / 2.0 + 3.0, 8.0, &short(*v));
    }
    for (xi, x) in xs.iter().enumerate() {
        c.text(x0 + cell * xi as f64 + 10.0, y0 + h + 16.0, 9.0, &short(*x));
    }
    for (yi, y) in ys.iter().enumerate() {
        c.text(x0 - 36.0, y0 + h - cell * yi as f64 - cell / 2.0 + 3.0, 9.0, &short(*y));
    }
    c.text(x0 + w / 2.0 - 60.0, y0 + h + 40.0, 11.0, "instrument autocorrelation");
    c.text(6.0, y0 + 8.0, 11.0, "demand autocorrelation");
    c.text(x0 + w + 12.0, y0 + 10.0, 10.0, &format!("max {}%", short(vmax)));
    // Color legend.
    for k in 0..10 {
        c.rect(x0 + w + 12.0, y0 + 20.0 + 10.0 * (9 - k) as f64, 16.0, 10.0, &heat_color(k as f64 / 9.0));
    }
    c.text(x0 + w + 32.0, y0 + 125.0, 9.0, "0%");
    c.text(6.0, 20.0, 12.0, "average absolute percentage error");
    c.finish()
}

fn render_scatter(table: &Table) -> String {
    let ar = table.numeric_column("observed_ar");
    let err = table.numeric_column("pct_error");
    let coef = table.numeric_column("coefficient");
    let fr = Frame {
        x0: 70.0,
        y0: 40.0,
        w: 420.0,
        h: 300.0,
        xmin: ar.iter().cloned().fold(f64::INFINITY, f64::min).min(0.0),
        xmax: ar.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(0.1),
        ymin: err.iter().cloned().fold(f64::INFINITY, f64::min).min(0.0),
        ymax: err.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(1.0),
    };
    let mut c = SvgCanvas::new(560.0, 410.0);
    fr.draw_axes(&mut c, "observed demand autocorrelation", "% error");
    if fr.ymin < 0.0 && fr.ymax > 0.0 {
        c.dashed_line(fr.x0, fr.py(0.0), fr.x0 + fr.w, fr.py(0.0), "gray");
    }
    let cmin = coef.iter().cloned().fold(f64::INFINITY, f64::min);
    let cmax = coef.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for i in 0..ar.len() {
        let t = if cmax > cmin { (coef[i] - cmin) / (cmax - cmin) } else { 0.5 };
        c.circle(fr.px(ar[i]), fr.py(err[i]), 3.0, "#1f77b4", 0.25 + 0.75 * t);
    }
    c.text(6.0, 20.0, 12.0, "estimator percentage error vs observed autocorrelation");
    c.finish()
}

fn render_indicator_panels(table: &Table) -> String {
    let labels: Vec<String> = {
        let mut seen = BTreeSet::new();
        table
            .rows
            .iter()
            .filter_map(|r| match &r[0] {
                super::table::Cell::Text(s) if seen.insert(s.clone()) => Some(s.clone()),
                _ => None,
            })
            .collect()
    };
    let years = sorted_unique(&table.numeric_column("years"));
    let metrics = ["coverage", "avg_abs_pct_error", "mean_ci_length"];
    let panel_w = 240.0;
    let mut c = SvgCanvas::new(90.0 + metrics.len() as f64 * (panel_w + 40.0), 360.0);
    for (m, metric) in metrics.iter().enumerate() {
        let vals = table.numeric_column(metric);
        let vmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let vmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let pad = 0.1 * (vmax - vmin).max(0.05);
        let fr = Frame {
            x0: 70.0 + m as f64 * (panel_w + 40.0),
            y0: 50.0,
            w: panel_w,
            h: 240.0,
            xmin: years[0],
            xmax: *years.last().unwrap(),
            ymin: (vmin - pad).min(if *metric == "coverage" { 0.8 } else { vmin - pad }),
            ymax: (vmax + pad).max(if *metric == "coverage" { 1.0 } else { vmax + pad }),
        };
        fr.draw_axes(&mut c, "years of data", metric);
        if *metric == "coverage" {
            c.dashed_line(fr.x0, fr.py(0.95), fr.x0 + fr.w, fr.py(0.95), "gray");
        }
        for (e, label) in labels.iter().enumerate() {
            let color = SERIES_COLORS[e % SERIES_COLORS.len()];
            let pts: Vec<(f64, f64)> = table
                .rows_where("estimator", label)
                .iter()
                .map(|r| {
                    let y = r[table.column_index(metric).unwrap()].as_f64();
                    let x = r[table.column_index("years").unwrap()].as_f64();
                    (fr.px(x), fr.py(y))
                })
                .collect();
            c.polyline(&pts, color);
            for &(x, y) in &pts {
                c.circle(x, y, 2.5, color, 1.0);
            }
        }
    }
    for (e, label) in labels.iter().enumerate() {
        let color = SERIES_COLORS[e % SERIES_COLORS.len()];
        let x = 80.0 + e as f64 * 80.0;
        c.line(x, 330.0, x + 18.0, 330.0, color, 2.0);
        c.text(x + 24.0, 334.0, 10.0, label);
    }
    c.text(6.0, 20.0, 12.0, "estimator performance by sample size");
    c.finish()
}

fn render_estimate_panel(table: &Table) -> String {
    // Render the first replicate only when the table carries replicates;
    // further replicates live in the CSV.
    let replicate0: Vec<&Vec<super::table::Cell>> = match table.column_index("replicate") {
        Some(rep_idx) => table.rows.iter().filter(|r| r[rep_idx].as_f64() == 0.0).collect(),
        None => table.rows.iter().collect(),
    };
    let label_idx = table.column_index("estimator").unwrap_or(1);
    let betas = |idx: usize| -> Vec<f64> { replicate0.iter().map(|r| r[idx].as_f64()).collect() };
    let lo_idx = table.column_index("ci_lo").unwrap();
    let hi_idx = table.column_index("ci_hi").unwrap();
    let beta_idx = table.column_index("beta").unwrap();
    let lo = betas(lo_idx);
    let hi = betas(hi_idx);
    let n = replicate0.len();
    let fr = Frame {
        x0: 80.0,
        y0: 40.0,
        w: 380.0,
        h: 26.0 * n as f64,
        xmin: lo.iter().cloned().fold(f64::INFINITY, f64::min),
        xmax: hi.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        ymin: 0.0,
        ymax: n as f64,
    };
    let mut c = SvgCanvas::new(640.0, fr.h + 110.0);
    fr.draw_axes(&mut c, "estimate", "");
    for (i, row) in replicate0.iter().enumerate() {
        let y = fr.y0 + 13.0 + 26.0 * i as f64;
        let label = match &row[label_idx] {
            super::table::Cell::Text(s) => s.clone(),
            _ => String::new(),
        };
        c.text(fr.x0 - 40.0, y + 3.0, 10.0, &label);
        c.line(fr.px(row[lo_idx].as_f64()), y, fr.px(row[hi_idx].as_f64()), y, "#1f77b4", 1.5);
        c.circle(fr.px(row[beta_idx].as_f64()), y, 3.0, "#1f77b4", 1.0);
        // Validity ticks for the three models.
        for (k, col) in ["valid_model1", "valid_model2", "valid_model3"].iter().enumerate() {
            let ok = row[table.column_index(col).unwrap()].as_f64() > 0.5;
            c.text(
                fr.x0 + fr.w + 20.0 + 26.0 * k as f64,
                y + 3.0,
                10.0,
                if ok { "ok" } else { "x" },
            );
        }
    }
    for (k, name) in ["I", "II", "III"].iter().enumerate() {
        c.text(fr.x0 + fr.w + 20.0 + 26.0 * k as f64, fr.y0 - 6.0, 9.0, name);
    }
    c.text(6.0, 20.0, 12.0, "estimates with 95% intervals and per-model validity");
    c.finish()
}
