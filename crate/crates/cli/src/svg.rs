//! Static SVG line chart of `log_ratio` against `log₁₀ ε`, one line per
//! (family, n, function). Output depends only on the records, so
//! re-rendering a CSV reproduces the file.

use std::fmt::Write;

use crate::sweep::{read_csv, SweepRecord};
use crate::CliError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render(records: &[SweepRecord]) -> String {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in records {
        let key = format!("{}:{} {}", r.family, r.n, r.g_id);
        let point = (r.eps.log10(), r.log_ratio);
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push(point),
            None => series.push((key, vec![point])),
        }
    }
    let xs = records.iter().map(|r| r.eps.log10());
    let (x_lo, x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (x_lo, x_hi) = if x_lo.is_finite() { (x_lo.floor(), x_hi.ceil().max(x_lo.floor() + 1.0)) } else { (-6.0, -1.0) };
    let y_max = records.iter().map(|r| r.log_ratio).fold(0.0, f64::max);
    let y_hi = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| TOP + plot_h - y / y_hi * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let mut decade = x_lo;
    while decade <= x_hi + 1e-9 {
        let x = px(decade);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{decade}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0
        );
        decade += 1.0;
    }
    for i in 0..=4 {
        let y = y_hi * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{LEFT}" y2="{:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y:.3}</text>"#,
            LEFT - 5.0,
            py(y),
            py(y),
            LEFT - 8.0,
            py(y) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">eps</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">log_ratio</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    if series.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">no data</text>"#,
            LEFT + plot_w / 2.0,
            TOP + plot_h / 2.0
        );
    }
    for (i, (key, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 14.0 * i as f64 + 10.0;
        let lx = WIDTH - RIGHT + 10.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 18.0,
            lx + 22.0,
            ly + 4.0,
            escape(key)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Render straight from sweep CSV text.
pub fn render_csv(csv: &str) -> Result<String, CliError> {
    Ok(render(&read_csv(csv.as_bytes())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::csv_string;

    fn record(g: &str, eps: f64, ratio: f64) -> SweepRecord {
        SweepRecord {
            family: "jordan".into(),
            n: 4,
            g_id: g.into(),
            eps,
            norm: ratio,
            sup_norm: 1.0,
            log_ratio: ratio,
            sqrtlog_ratio: ratio,
            certificate: 1.0,
            kappa: 0.7,
            kappa_star: 0.7,
        }
    }

    #[test]
    fn rerender_from_csv_is_identical() {
        let rows = vec![record("a<b", 1e-5, 0.1), record("a<b", 1e-2, 0.2), record("c", 1e-5, 0.05)];
        let svg = render(&rows);
        assert_eq!(render_csv(&csv_string(&rows).unwrap()).unwrap(), svg);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b"));
    }

    #[test]
    fn empty_chart() {
        let svg = render(&[]);
        assert!(svg.starts_with("<svg") && svg.contains("no data"));
    }
}
