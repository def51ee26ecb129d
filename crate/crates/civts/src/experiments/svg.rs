//! Minimal self-contained SVG rendering for the experiment tables. No
//! external services or fonts; everything is plain shapes and sans text.

use std::fmt::Write;

pub(super) struct SvgCanvas {
    body: String,
    width: f64,
    height: f64,
}

impl SvgCanvas {
    pub fn new(width: f64, height: f64) -> Self {
        Self { body: String::new(), width, height }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str, opacity: f64) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}" fill-opacity="{opacity:.3}"/>"#
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width:.2}"/>"#
        );
    }

    pub fn dashed_line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="1" stroke-dasharray="4 3"/>"#
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str) {
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, s: &str) {
        let escaped = s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.1}" font-family="sans-serif">{escaped}</text>"#
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" \
             viewBox=\"0 0 {:.0} {:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

/// Three-stop ramp from pale yellow through orange to dark red.
pub(super) fn heat_color(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
    let (r, g, b) = if v < 0.5 {
        let t = v / 0.5;
        (lerp(255.0, 240.0, t), lerp(250.0, 140.0, t), lerp(205.0, 40.0, t))
    } else {
        let t = (v - 0.5) / 0.5;
        (lerp(240.0, 130.0, t), lerp(140.0, 10.0, t), lerp(40.0, 20.0, t))
    };
    format!("rgb({},{},{})", r as u8, g as u8, b as u8)
}

pub(super) const SERIES_COLORS: [&str; 6] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Map data coordinates to pixel coordinates inside a plot box.
pub(super) struct Frame {
    pub x0: f64,
    pub y0: f64,
    pub w: f64,
    pub h: f64,
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Frame {
    pub fn px(&self, x: f64) -> f64 {
        let span = (self.xmax - self.xmin).max(1e-12);
        self.x0 + (x - self.xmin) / span * self.w
    }

    pub fn py(&self, y: f64) -> f64 {
        let span = (self.ymax - self.ymin).max(1e-12);
        self.y0 + self.h - (y - self.ymin) / span * self.h
    }

    pub fn draw_axes(&self, c: &mut SvgCanvas, xlabel: &str, ylabel: &str) {
        c.line(self.x0, self.y0 + self.h, self.x0 + self.w, self.y0 + self.h, "black", 1.0);
        c.line(self.x0, self.y0, self.x0, self.y0 + self.h, "black", 1.0);
        c.text(self.x0 + self.w / 2.0 - 30.0, self.y0 + self.h + 28.0, 11.0, xlabel);
        c.text(self.x0 - 38.0, self.y0 - 8.0, 11.0, ylabel);
        c.text(self.x0 - 6.0, self.y0 + self.h + 14.0, 9.0, &short(self.xmin));
        c.text(self.x0 + self.w - 12.0, self.y0 + self.h + 14.0, 9.0, &short(self.xmax));
        c.text(self.x0 - 40.0, self.y0 + self.h, 9.0, &short(self.ymin));
        c.text(self.x0 - 40.0, self.y0 + 8.0, 9.0, &short(self.ymax));
    }
}

pub(super) fn short(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1000.0 || v.abs() < 0.01 {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}
