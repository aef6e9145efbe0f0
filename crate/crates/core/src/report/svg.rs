use std::fmt::Write;

use super::format::{coord, escape, sig6};
use crate::analysis::{BucketCurve, CorrelationMatrix, Histogram};

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 44.0;
const MARGIN_BOTTOM: f64 = 64.0;

const FONT: &str = "font-family=\"sans-serif\"";
const AXIS: &str = "#333333";
const ACCENT: &str = "#3366aa";

/// Accumulates SVG markup for one chart.
pub(crate) struct Canvas {
    pub width: f64,
    pub height: f64,
    body: String,
}

impl Canvas {
    pub fn new(width: u32, height: u32, title: &str) -> Self {
        let mut c = Canvas {
            width: f64::from(width),
            height: f64::from(height),
            body: String::new(),
        };
        c.text(c.width / 2.0, 26.0, title, "middle", 16.0, "title");
        c
    }

    fn plot_left(&self) -> f64 {
        MARGIN_LEFT
    }

    fn plot_right(&self) -> f64 {
        self.width - MARGIN_RIGHT
    }

    fn plot_top(&self) -> f64 {
        MARGIN_TOP
    }

    fn plot_bottom(&self) -> f64 {
        self.height - MARGIN_BOTTOM
    }

    pub fn text(&mut self, x: f64, y: f64, text: &str, anchor: &str, size: f64, class: &str) {
        let _ = writeln!(
            self.body,
            "<text class=\"{class}\" x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-size=\"{}\" {FONT}>{}</text>",
            coord(x),
            coord(y),
            coord(size),
            escape(text)
        );
    }

    /// Text rotated about its anchor point.
    pub fn text_rotated(&mut self, x: f64, y: f64, deg: f64, text: &str, anchor: &str, size: f64, class: &str) {
        let (x, y) = (coord(x), coord(y));
        let _ = writeln!(
            self.body,
            "<text class=\"{class}\" x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\" font-size=\"{}\" {FONT} transform=\"rotate({} {x} {y})\">{}</text>",
            coord(size),
            coord(deg),
            escape(text)
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, class: &str) {
        let _ = writeln!(
            self.body,
            "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"1\"/>",
            coord(x1),
            coord(y1),
            coord(x2),
            coord(y2)
        );
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, class: &str, tooltip: Option<&str>) {
        let _ = write!(
            self.body,
            "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"",
            coord(x),
            coord(y),
            coord(w.max(0.0)),
            coord(h.max(0.0))
        );
        match tooltip {
            Some(t) => {
                let _ = writeln!(self.body, "><title>{}</title></rect>", escape(t));
            }
            None => self.body.push_str("/>\n"),
        }
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str, class: &str) {
        let _ = writeln!(
            self.body,
            "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>",
            coord(x),
            coord(y),
            coord(r)
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{},{}", coord(*x), coord(*y))).collect();
        let _ = writeln!(
            self.body,
            "<polyline class=\"curve\" points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        );
    }

    /// Axes with labelled ends and midpoint for both ranges.
    fn axes(&mut self, x: (f64, f64), y: (f64, f64), x_label: &str, y_label: &str) {
        let (l, r, t, b) = (self.plot_left(), self.plot_right(), self.plot_top(), self.plot_bottom());
        self.line(l, b, r, b, AXIS, "axis");
        self.line(l, t, l, b, AXIS, "axis");
        for k in 0..=2 {
            let f = k as f64 / 2.0;
            let px = l + f * (r - l);
            let py = b - f * (b - t);
            self.line(px, b, px, b + 5.0, AXIS, "tick");
            self.text(px, b + 18.0, &sig6(x.0 + f * (x.1 - x.0)), "middle", 11.0, "tick-label");
            self.line(l - 5.0, py, l, py, AXIS, "tick");
            self.text(l - 8.0, py + 4.0, &sig6(y.0 + f * (y.1 - y.0)), "end", 11.0, "tick-label");
        }
        self.text((l + r) / 2.0, b + 40.0, x_label, "middle", 12.0, "axis-label");
        let _ = writeln!(
            self.body,
            "<text class=\"axis-label\" x=\"16.00\" y=\"{}\" text-anchor=\"middle\" font-size=\"12.00\" {FONT} transform=\"rotate(-90 16.00 {})\">{}</text>",
            coord((t + b) / 2.0),
            coord((t + b) / 2.0),
            escape(y_label)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect class=\"background\" x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height,
        )
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

/// Rough rendered width of a label, capped so the plot keeps some room.
fn label_width(labels: &[&str], size: f64, cap: f64) -> f64 {
    let chars = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0) as f64;
    (chars * size * 0.64 + 12.0).min(cap)
}

fn scale(v: f64, from: (f64, f64), to: (f64, f64)) -> f64 {
    to.0 + (v - from.0) / (from.1 - from.0) * (to.1 - to.0)
}

pub(crate) fn histogram(c: &mut Canvas, column: &str, h: &Histogram) {
    let max = h.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let x_range = (h.edges[0], h.edges[h.edges.len() - 1]);
    let (l, r, t, b) = (c.plot_left(), c.plot_right(), c.plot_top(), c.plot_bottom());
    c.axes(x_range, (0.0, max), column, "count");
    for (i, &count) in h.counts.iter().enumerate() {
        let x0 = scale(h.edges[i], x_range, (l, r));
        let x1 = scale(h.edges[i + 1], x_range, (l, r));
        let y = scale(count as f64, (0.0, max), (b, t));
        let tip = format!("[{}, {}): {count}", sig6(h.edges[i]), sig6(h.edges[i + 1]));
        c.rect(x0, y, x1 - x0 - 1.0, b - y, ACCENT, "bar", Some(&tip));
    }
}

/// Blue for −1, white for 0, red for +1; grey when missing.
pub(crate) fn diverging_color(v: Option<f64>) -> String {
    let Some(v) = v else {
        return "#cccccc".to_string();
    };
    let v = v.clamp(-1.0, 1.0);
    let (end, t) = if v < 0.0 { ((33.0, 102.0, 172.0), -v) } else { ((178.0, 24.0, 43.0), v) };
    let mix = |e: f64| (255.0 + (e - 255.0) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(end.0), mix(end.1), mix(end.2))
}

pub(crate) fn heatmap(c: &mut Canvas, m: &CorrelationMatrix) {
    let k = m.columns.len() as f64;
    let legend = 40.0;
    let names: Vec<&str> = m.columns.iter().map(String::as_str).collect();
    let lw = label_width(&names, 10.0, c.width * 0.4);
    // Column labels hang below the grid at 35 degrees.
    let (l, r, t, b) = (24.0 + lw, c.plot_right() - legend, c.plot_top(), c.height - 0.6 * lw - 16.0);
    let side = ((r - l) / k).min((b - t) / k);
    let show_values = m.columns.len() <= 12;
    for (i, row) in m.values.iter().enumerate() {
        let y = t + i as f64 * side;
        c.text(l - 6.0, y + side / 2.0 + 4.0, &m.columns[i], "end", 10.0, "row-label");
        for (j, v) in row.iter().enumerate() {
            let x = l + j as f64 * side;
            let tip = format!(
                "{} / {}: {}",
                m.columns[i],
                m.columns[j],
                v.map_or_else(|| "missing".to_string(), sig6)
            );
            c.rect(x, y, side, side, &diverging_color(*v), "cell", Some(&tip));
            if show_values {
                if let Some(v) = v {
                    c.text(x + side / 2.0, y + side / 2.0 + 4.0, &sig6(*v), "middle", 9.0, "cell-value");
                }
            }
        }
    }
    for (j, name) in m.columns.iter().enumerate() {
        let x = l + j as f64 * side + side / 2.0;
        c.text_rotated(x, t + k * side + 12.0, -35.0, name, "end", 10.0, "column-label");
    }
    // Legend spanning [-1, 1].
    let lx = c.plot_right() - legend + 14.0;
    let steps = 20;
    let h = (b - t) / steps as f64;
    for s in 0..steps {
        let v = 1.0 - 2.0 * (s as f64 + 0.5) / steps as f64;
        c.rect(lx, t + s as f64 * h, 12.0, h, &diverging_color(Some(v)), "legend", None);
    }
    c.text(lx + 6.0, t - 4.0, "1", "middle", 10.0, "legend-label");
    c.text(lx + 6.0, b + 12.0, "-1", "middle", 10.0, "legend-label");
}

pub(crate) fn bucket_curve(c: &mut Canvas, curve: &BucketCurve) {
    let xs: Vec<f64> = curve.points.iter().map(|p| p.metric_mean).collect();
    let lo_hi = |f: fn(f64, f64) -> f64, sign: f64| {
        curve
            .points
            .iter()
            .map(|p| p.outcome_mean + sign * p.outcome_se.unwrap_or(0.0))
            .fold(if sign < 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }, f)
    };
    let x_range = padded(
        xs.iter().copied().fold(f64::INFINITY, f64::min),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let y_range = padded(lo_hi(f64::min, -1.0), lo_hi(f64::max, 1.0));
    let (l, r, t, b) = (c.plot_left(), c.plot_right(), c.plot_top(), c.plot_bottom());
    let x_label = format!("{} (bucket mean, {} rows per bucket)", curve.metric, curve.bucket_size);
    c.axes(x_range, y_range, &x_label, &curve.outcome);
    let px = |v| scale(v, x_range, (l, r));
    let py = |v| scale(v, y_range, (b, t));
    let pts: Vec<(f64, f64)> = curve.points.iter().map(|p| (px(p.metric_mean), py(p.outcome_mean))).collect();
    c.polyline(&pts, ACCENT);
    for (p, &(x, y)) in curve.points.iter().zip(&pts) {
        if let Some(se) = p.outcome_se {
            let (y0, y1) = (py(p.outcome_mean - se), py(p.outcome_mean + se));
            c.line(x, y0, x, y1, AXIS, "error-bar");
            c.line(x - 3.0, y0, x + 3.0, y0, AXIS, "error-cap");
            c.line(x - 3.0, y1, x + 3.0, y1, AXIS, "error-cap");
        }
        c.circle(x, y, 3.5, ACCENT, "point");
    }
}

/// Horizontal bars, largest magnitude at the top.
pub(crate) fn coefficient_bars(c: &mut Canvas, ranked: &[(String, f64)], value_label: &str) {
    let lo = ranked.iter().map(|r| r.1).fold(0.0, f64::min);
    let hi = ranked.iter().map(|r| r.1).fold(0.0, f64::max);
    let range = padded(lo, hi);
    let names: Vec<&str> = ranked.iter().map(|r| r.0.as_str()).collect();
    let lw = label_width(&names, 11.0, c.width * 0.45);
    let (l, r, t, b) = (16.0 + lw, c.plot_right(), c.plot_top(), c.plot_bottom());
    let row = (b - t) / ranked.len() as f64;
    let zero = scale(0.0, range, (l, r));
    c.line(zero, t, zero, b, AXIS, "axis");
    for (i, (name, v)) in ranked.iter().enumerate() {
        let y = t + i as f64 * row;
        let x = scale(*v, range, (l, r));
        let fill = if *v < 0.0 { "#2166ac" } else { "#b2182b" };
        let tip = format!("{name}: {}", sig6(*v));
        c.rect(x.min(zero), y + row * 0.15, (x - zero).abs(), row * 0.7, fill, "bar", Some(&tip));
        let size = (row * 0.6).clamp(6.0, 11.0);
        c.text(l - 6.0, y + row / 2.0 + size / 3.0, name, "end", size, "bar-label");
    }
    c.text(zero, b + 18.0, "0", "middle", 11.0, "tick-label");
    c.text(scale(range.0, range, (l, r)), b + 18.0, &sig6(range.0), "start", 11.0, "tick-label");
    c.text(scale(range.1, range, (l, r)), b + 18.0, &sig6(range.1), "end", 11.0, "tick-label");
    c.text((l + r) / 2.0, b + 40.0, value_label, "middle", 12.0, "axis-label");
}
