//! Standalone SVG line plots. Output depends only on the input values.

use std::fmt::Write as _;

use crate::analysis::{derivative, min_max_normalize, AccuracyCurve};
use crate::{Error, Result};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 58.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
];

pub const TOO_FEW_POINTS: &str = "need ≥ 2 points to plot a curve";

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dashed: bool,
}

impl Series {
    pub fn new(name: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            x,
            y,
            dashed: false,
        }
    }
}

/// Vertical line at `x`, drawn in the color of series `series`.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub x: f64,
    pub series: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Up to about `target` round tick values (1, 2 or 5 times a power of ten)
/// covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

impl LinePlot {
    pub fn render(&self) -> Result<String> {
        if self.series.is_empty() {
            return Err(Error::invalid("nothing to plot"));
        }
        for s in &self.series {
            if s.x.len() != s.y.len() {
                return Err(Error::invalid(format!("series {} has mismatched x and y", s.name)));
            }
            if s.x.len() < 2 {
                return Err(Error::invalid(TOO_FEW_POINTS));
            }
            if s.x.iter().chain(&s.y).any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("series {} has non-finite values", s.name)));
            }
        }
        let (x0, x1) = range(self.series.iter().flat_map(|s| s.x.iter().copied()));
        let (y0, y1) = range(self.series.iter().flat_map(|s| s.y.iter().copied()));
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );

        for t in nice_ticks(x0, x1, 8) {
            let x = sx(t);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e6e6e6"/>"##,
                TOP + ph
            );
            let _ = writeln!(
                out,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph + 16.0,
                tick_label(t)
            );
        }
        for t in nice_ticks(y0, y1, 6) {
            let y = sy(t);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e6e6e6"/>"##,
                LEFT + pw
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            out,
            r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#333333"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for m in &self.markers {
            let color = PALETTE[m.series % PALETTE.len()];
            let x = sx(m.x);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="5 4"/>"#,
                TOP + ph
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
                x + 3.0,
                TOP + 12.0 + 13.0 * m.series as f64,
                escape(&m.label)
            );
        }

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let points: Vec<String> = s
                .x
                .iter()
                .zip(&s.y)
                .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let dash = if s.dashed { r#" stroke-dasharray="6 3""# } else { "" };
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
                points.join(" ")
            );
            for p in &points {
                let (cx, cy) = p.split_once(',').expect("formatted pair");
                let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#);
            }
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let lx = LEFT + pw + 14.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
                lx + 22.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 28.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
        out.push_str("</svg>\n");
        Ok(out)
    }
}

/// Legend names: the classifier, prefixed by the dataset when several
/// datasets are present.
fn series_names(curves: &[AccuracyCurve<f64>]) -> Vec<String> {
    let multi = curves.iter().any(|c| c.dataset != curves[0].dataset);
    curves
        .iter()
        .map(|c| {
            if multi {
                format!("{}/{}", c.dataset, c.classifier)
            } else {
                c.classifier.clone()
            }
        })
        .collect()
}

pub fn accuracy_plot(curves: &[AccuracyCurve<f64>]) -> LinePlot {
    let names = series_names(curves);
    LinePlot {
        title: "Identification accuracy by segment duration".into(),
        x_label: "segment duration (s)".into(),
        y_label: "mean accuracy".into(),
        series: curves
            .iter()
            .zip(names)
            .map(|(c, n)| Series::new(n, c.durations.clone(), c.mean_acc.clone()))
            .collect(),
        markers: Vec::new(),
    }
}

/// Curves that cannot be normalized (constant, or fewer than 2 points)
/// are left out with a warning.
pub fn normalized_plot(curves: &[AccuracyCurve<f64>]) -> LinePlot {
    let names = series_names(curves);
    let series = curves
        .iter()
        .zip(names)
        .filter_map(|(c, n)| match min_max_normalize(&c.mean_acc) {
            Ok(y) => Some(Series::new(n, c.durations.clone(), y)),
            Err(e) => {
                log::warn!("{n}: not plotted after normalization: {e}");
                None
            }
        })
        .collect();
    LinePlot {
        title: "Normalized accuracy by segment duration".into(),
        x_label: "segment duration (s)".into(),
        y_label: "normalized accuracy".into(),
        series,
        markers: Vec::new(),
    }
}

/// Derivative of each normalized curve, with a marker at every knee in
/// `knees` (`(series name, duration)`).
pub fn derivative_plot(curves: &[AccuracyCurve<f64>], knees: &[(String, f64)]) -> LinePlot {
    let names = series_names(curves);
    let mut series = Vec::new();
    for (c, n) in curves.iter().zip(names) {
        let d = min_max_normalize(&c.mean_acc).and_then(|y| derivative(&c.durations, &y));
        match d {
            Ok(d) => series.push(Series::new(n, c.durations.clone(), d)),
            Err(e) => log::warn!("{n}: no derivative plotted: {e}"),
        }
    }
    let markers = knees
        .iter()
        .filter_map(|(name, x)| {
            let i = series.iter().position(|s| &s.name == name)?;
            Some(Marker {
                x: *x,
                series: i,
                label: format!("knee {} s", tick_label(*x)),
            })
        })
        .collect();
    LinePlot {
        title: "Derivative of normalized accuracy".into(),
        x_label: "segment duration (s)".into(),
        y_label: "d(normalized accuracy)/d(duration)".into(),
        series,
        markers,
    }
}

/// Curves and reference, each min-max normalized so differently scaled
/// values overlay. Curves that cannot be normalized are left out.
pub fn comparison_plot(curves: &[AccuracyCurve<f64>], ref_x: &[f64], ref_y: &[f64]) -> Result<LinePlot> {
    let mut plot = normalized_plot(curves);
    let mut reference = Series::new("reference", ref_x.to_vec(), min_max_normalize(ref_y)?);
    reference.dashed = true;
    plot.series.push(reference);
    plot.title = "Accuracy against reference curve (normalized)".into();
    plot.y_label = "normalized value".into();
    Ok(plot)
}
