//! Minimal SVG line plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// One polyline per series. The y axis is logarithmic when every value is
/// positive and the range spans more than two decades.
pub fn line_plot(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|(_, v)| v.iter().copied()).filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(pts.iter().map(|p| p.1));
    let log = y0 > 0.0 && y1 / y0 > 100.0;
    let ty = |y: f64| if log { y.log10() } else { y };
    let (ly0, ly1) = (ty(y0), ty(y1));
    let sx = |x: f64| PAD + (x - x0) / span(x0, x1) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (ty(y) - ly0) / span(ly0, ly1) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{PAD},{PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(s, r#"<text x="{PAD}" y="{}" text-anchor="middle">{}</text>"#, H - PAD + 15.0, fmt(x0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W - PAD, H - PAD + 15.0, fmt(x1));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, PAD - 4.0, H - PAD, fmt(y0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, PAD - 4.0, PAD + 4.0, fmt(y1));
    if log {
        let _ = writeln!(s, r#"<text x="{}" y="{}">log scale</text>"#, PAD + 4.0, PAD - 6.0);
    }
    for (i, (label, v)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let d: Vec<String> = v
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log || *y > 0.0))
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if !d.is_empty() {
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.join(" "));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{color}">{}</text>"#, W - PAD + 4.0 - 120.0, PAD + 14.0 * (i as f64 + 1.0), escape(label));
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn span(a: f64, b: f64) -> f64 {
    if b > a {
        b - a
    } else {
        1.0
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.3e}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed() {
        let svg = line_plot("a<b", &[("s".into(), vec![(0.0, 1.0), (1.0, 1e4)])]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("log scale"));
        assert!(svg.contains("a&lt;b"));
    }

    #[test]
    fn empty_series_ok() {
        assert!(line_plot("x", &[]).contains("</svg>"));
    }
}
