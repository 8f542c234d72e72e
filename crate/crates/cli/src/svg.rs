//! Single-file SVG rendering of a fan chart: nested bands between the
//! symmetric τ pairs, the central quantile as a line, realized values as dots.

use std::io::{self, Write};

use qgibbs::online::FanChart;

use crate::config::RunConfig;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 48.0;

fn polyline(points: &[(f64, f64)]) -> String {
    points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_fan_chart(out: &mut impl Write, fan: &FanChart, cfg: &RunConfig) -> io::Result<()> {
    let rows = &fan.rows;
    let values = rows
        .iter()
        .flat_map(|r| r.quantiles.iter().copied().chain(r.realized))
        .filter(|v| v.is_finite());
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        lo = if lo.is_finite() { lo - 1.0 } else { -1.0 };
        hi = lo + 2.0;
    }
    let span = (rows.len().max(2) - 1) as f64;
    let x = |i: usize| MARGIN + (WIDTH - 2.0 * MARGIN) * i as f64 / span;
    let y = |v: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v - lo) / (hi - lo);

    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )?;
    writeln!(out, "<!-- run_config={} -->", cfg.to_json().replace("--", "- -"))?;
    writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##)?;
    let k = fan.taus.len();
    let pairs = k / 2;
    for p in 0..pairs {
        let (lower, upper) = (p, k - 1 - p);
        let mut pts: Vec<(f64, f64)> = rows.iter().enumerate().map(|(i, r)| (x(i), y(r.quantiles[upper]))).collect();
        pts.extend(rows.iter().enumerate().rev().map(|(i, r)| (x(i), y(r.quantiles[lower]))));
        let opacity = 0.15 + 0.5 * (p + 1) as f64 / (pairs + 1) as f64;
        writeln!(
            out,
            r##"<polygon points="{}" fill="#c0392b" fill-opacity="{opacity:.3}" stroke="none"><title>tau {} to {}</title></polygon>"##,
            polyline(&pts),
            fan.taus[lower],
            fan.taus[upper]
        )?;
    }
    if k % 2 == 1 {
        let mid: Vec<(f64, f64)> = rows.iter().enumerate().map(|(i, r)| (x(i), y(r.quantiles[k / 2]))).collect();
        writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#7b241c" stroke-width="1.5"/>"##,
            polyline(&mid)
        )?;
    }
    for (i, r) in rows.iter().enumerate() {
        if let Some(v) = r.realized {
            writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#1b2631"/>"##, x(i), y(v))?;
        }
    }
    let axis = HEIGHT - MARGIN;
    writeln!(
        out,
        r##"<line x1="{MARGIN}" y1="{axis}" x2="{}" y2="{axis}" stroke="#555555"/>"##,
        WIDTH - MARGIN
    )?;
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        writeln!(
            out,
            r#"<text x="{MARGIN}" y="{}" font-size="12" font-family="sans-serif">{}</text>"#,
            axis + 18.0,
            first.period
        )?;
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" font-family="sans-serif" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN,
            axis + 18.0,
            last.period
        )?;
    }
    for v in [lo, hi] {
        writeln!(
            out,
            r#"<text x="{}" y="{:.2}" font-size="12" font-family="sans-serif" text-anchor="end">{v:.3}</text>"#,
            MARGIN - 6.0,
            y(v) + 4.0
        )?;
    }
    writeln!(out, "</svg>")
}

#[cfg(test)]
mod tests {
    use super::*;
    use qgibbs::online::ForecastRecord;

    #[test]
    fn one_band_per_symmetric_pair() {
        let mut records = Vec::new();
        for (i, p) in ["2000Q1", "2000Q2", "2000Q3"].iter().enumerate() {
            for (j, tau) in [0.05, 0.25, 0.5, 0.75, 0.95].iter().enumerate() {
                let realized = (i < 2).then_some(0.1 * i as f64);
                records.push(ForecastRecord::new(p.parse().unwrap(), *tau, 1.0, j as f64 + i as f64, realized));
            }
        }
        let fan = FanChart::from_records(&records, true).unwrap();
        let mut buf = Vec::new();
        write_fan_chart(&mut buf, &fan, &RunConfig::default()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("<polygon").count(), 2);
        assert_eq!(text.matches("<polyline").count(), 1);
        assert_eq!(text.matches("<circle").count(), 2);
        assert!(text.trim_end().ends_with("</svg>"));
    }
}
