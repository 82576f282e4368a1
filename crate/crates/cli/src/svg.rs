//! Static SVG 1.1 line chart of CEI series.

use std::fmt::Write;

use cohort_core::{CeiSeries, Peak};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Chart<'a> {
    pub title: String,
    pub series: Vec<(String, &'a CeiSeries)>,
    pub window: Option<(i32, i32)>,
    pub peaks: Vec<Peak>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Round step of roughly `span / target` from the 1-2-5 sequence.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    if !(raw > 0.0) || !raw.is_finite() {
        return 1.0;
    }
    let mag = 10f64.powf(raw.log10().floor());
    let unit = raw / mag;
    let m = if unit <= 1.0 {
        1.0
    } else if unit <= 2.0 {
        2.0
    } else if unit <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn fmt_value(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-2 && v.abs() < 1e4 {
        format!("{}", (v * 1e6).round() / 1e6)
    } else {
        format!("{v:.1e}")
    }
}

impl Chart<'_> {
    pub fn render(&self) -> String {
        let years = self.series.iter().flat_map(|(_, s)| s.iter().map(|(y, _)| y));
        let (mut y0, mut y1) = years.fold((i32::MAX, i32::MIN), |(a, b), y| (a.min(y), b.max(y)));
        if y0 > y1 {
            (y0, y1) = (0, 1);
        }
        if y0 == y1 {
            y1 = y0 + 1;
        }
        let vmax = self.series.iter().flat_map(|(_, s)| s.values()).fold(0.0f64, f64::max);
        let vmax = if vmax > 0.0 { vmax * 1.05 } else { 1.0 };

        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |y: f64| LEFT + (y - y0 as f64) / (y1 - y0) as f64 * pw;
        let sy = |v: f64| TOP + ph - v / vmax * ph;

        let mut out = String::new();
        writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(out, r#"<title>{}</title>"#, escape(&self.title)).unwrap();
        writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();

        if let Some((a, b)) = self.window {
            let (a, b) = (a.max(y0) as f64, b.min(y1) as f64);
            if a <= b {
                writeln!(
                    out,
                    r##"<rect class="window" x="{:.2}" y="{TOP}" width="{:.2}" height="{ph}" fill="#e8e8e8"/>"##,
                    sx(a),
                    sx(b) - sx(a)
                )
                .unwrap();
            }
        }
        for p in &self.peaks {
            let (a, b) = (sx(p.start_year as f64 - 0.5).max(LEFT), sx(p.end_year as f64 + 0.5).min(LEFT + pw));
            writeln!(
                out,
                r##"<rect class="peak" x="{a:.2}" y="{TOP}" width="{:.2}" height="{ph}" fill="#ffd27f" fill-opacity="0.5"/>"##,
                (b - a).max(0.0)
            )
            .unwrap();
            let label = if p.start_year == p.end_year {
                p.start_year.to_string()
            } else {
                format!("{}-{}", p.start_year, p.end_year)
            };
            writeln!(
                out,
                r#"<text class="peak-label" x="{:.2}" y="{:.2}" text-anchor="middle" font-size="10">{label}</text>"#,
                (a + b) / 2.0,
                TOP - 6.0
            )
            .unwrap();
        }

        // axes
        writeln!(
            out,
            r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}"/></g>"#,
            TOP + ph,
            LEFT + pw,
            TOP + ph,
            TOP + ph
        )
        .unwrap();
        let xstep = nice_step((y1 - y0) as f64, 10.0).max(1.0);
        let mut tick = (y0 as f64 / xstep).ceil() * xstep;
        while tick <= y1 as f64 {
            let x = sx(tick);
            writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 18.0,
                tick as i64
            )
            .unwrap();
            tick += xstep;
        }
        let vstep = nice_step(vmax, 5.0);
        let mut tick = 0.0;
        while tick <= vmax * (1.0 + 1e-12) {
            let y = sy(tick);
            writeln!(
                out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                y + 4.0,
                fmt_value(tick)
            )
            .unwrap();
            tick += vstep;
        }
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Birth year</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 10.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">CEI</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0
        )
        .unwrap();

        for (k, (name, s)) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let points: Vec<String> =
                s.iter().map(|(y, e)| format!("{:.2},{:.2}", sx(y as f64), sy(e.cei))).collect();
            writeln!(
                out,
                r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
                points.join(" "),
                escape(name)
            )
            .unwrap();
            let ly = TOP + 14.0 + 16.0 * k as f64;
            writeln!(
                out,
                r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                LEFT + pw - 150.0,
                LEFT + pw - 130.0,
                LEFT + pw - 125.0,
                ly + 4.0,
                escape(name)
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_follow_one_two_five() {
        assert_eq!(nice_step(100.0, 10.0), 10.0);
        assert_eq!(nice_step(0.7, 5.0), 0.2);
        assert_eq!(nice_step(48.0, 10.0), 5.0);
    }

    #[test]
    fn labels_are_escaped() {
        let s = CeiSeries::from_values(1900, &[1.0, 2.0, 1.5]).unwrap();
        let chart = Chart { title: "a<b & c".into(), series: vec![("x\"y".into(), &s)], window: None, peaks: vec![] };
        let svg = chart.render();
        assert!(svg.contains("a&lt;b &amp; c"));
        assert!(svg.contains("x&quot;y"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
