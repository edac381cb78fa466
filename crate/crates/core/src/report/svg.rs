use std::fmt::Write as _;

use crate::erfl_lab::median;

/// Replicate values at one abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub x: f64,
    pub values: Vec<f64>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Points per abscissa on a log-x axis, the median joined by a line, and an
/// optional horizontal reference.
pub fn scatter_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], reference: Option<f64>) -> String {
    let xs: Vec<f64> = series.iter().map(|s| s.x.max(f64::MIN_POSITIVE).log10()).collect();
    let finite = |v: &f64| v.is_finite();
    let mut ys: Vec<f64> = series.iter().flat_map(|s| s.values.iter().copied()).filter(finite).collect();
    ys.extend(reference.filter(finite));
    let (mut x0, mut x1) = bounds(&xs);
    let (mut y0, mut y1) = bounds(&ys);
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let (bx, by) = (LEFT, H - BOTTOM);
    let _ = writeln!(s, r#"<line x1="{bx}" y1="{by}" x2="{}" y2="{by}" stroke="black"/>"#, W - RIGHT);
    let _ = writeln!(s, r#"<line x1="{bx}" y1="{by}" x2="{bx}" y2="{TOP}" stroke="black"/>"#);
    for (x, series) in xs.iter().zip(series) {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#, px(*x), by + 16.0, series.x);
    }
    for k in 0..=4 {
        let y = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{:.3}</text>"#, bx - 6.0, py(y) + 4.0, y);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{} (log scale)</text>"#, W / 2.0, H - 12.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#, H / 2.0, H / 2.0, escape(y_label));
    if let Some(r) = reference.filter(finite) {
        let _ = writeln!(s, r#"<line x1="{bx}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="firebrick" stroke-dasharray="6 4"/>"#, py(r), W - RIGHT);
    }
    for (x, series) in xs.iter().zip(series) {
        for v in series.values.iter().filter(|v| v.is_finite()) {
            let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#4060a0" fill-opacity="0.6"/>"##, px(*x), py(*v));
        }
    }
    let medians: Vec<String> = xs
        .iter()
        .zip(series)
        .filter_map(|(x, s)| median(&s.values).filter(|m| m.is_finite()).map(|m| format!("{:.2},{:.2}", px(*x), py(m))))
        .collect();
    if !medians.is_empty() {
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="black" stroke-width="2"/>"#, medians.join(" "));
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}
