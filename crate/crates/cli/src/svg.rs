//! Plain SVG line and point charts of result tables.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::output::Table;

const W: f64 = 640.0;
const H: f64 = 400.0;
const M: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Scatter `y` against `x`, one colour per value of `group`, joining the
/// points of a group when `lines` is set. Non-finite points are skipped.
pub fn chart(t: &Table, x: &str, y: &str, group: Option<&str>, lines: bool) -> Option<String> {
    let (xi, yi) = (t.column(x)?, t.column(y)?);
    let gi = group.and_then(|g| t.column(g));
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in &t.rows {
        let (px, py) = (row[xi].as_f64()?, row[yi].as_f64()?);
        if px.is_finite() && py.is_finite() {
            let key = gi.map(|g| row[g].render()).unwrap_or_default();
            series.entry(key).or_default().push((px, py));
        }
    }
    let pts = series.values().flatten();
    let (x0, x1) = pts.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = pts.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if !x0.is_finite() {
        return None;
    }
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let sx = |v: f64| M + (v - x0) / span(x0, x1) * (W - 2.0 * M);
    let sy = |v: f64| H - M - (v - y0) / span(y0, y1) * (H - 2.0 * M);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<path d="M{M} {M} V{} H{}" fill="none" stroke="black"/>"#, H - M, W - M);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (vx, vy) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{vx:.4}</text>"#, sx(vx), H - M + 16.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{vy:.4}</text>"#, M - 4.0, sy(vy) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(&t.columns[xi].header()));
    let _ = writeln!(s, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">{}</text>"#, H / 2.0, H / 2.0, escape(&t.columns[yi].header()));
    for (k, (name, pts)) in series.iter().enumerate() {
        let c = PALETTE[k % PALETTE.len()];
        if lines && pts.len() > 1 {
            let d: Vec<String> = pts.iter().map(|&(a, b)| format!("{:.1},{:.1}", sx(a), sy(b))).collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}"/>"#, d.join(" "));
        }
        for &(a, b) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="2" fill="{c}" fill-opacity="0.5"/>"#, sx(a), sy(b));
        }
        if !name.is_empty() {
            let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{c}">{}</text>"#, W - M + 4.0, M + 14.0 * k as f64, escape(name));
        }
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
