//! Minimal SVG 1.1 line plots with a logarithmic x axis.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const DASHES: [&str; 6] = ["", "8 4", "2 3", "10 3 2 3", "4 4", "1 6"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Dotted horizontal reference line, e.g. the `ħ/2` threshold.
    pub hline: Option<(f64, String)>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    mag * if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Plot {
    fn x_range(&self) -> (f64, f64) {
        let xs = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .filter(|x| *x > 0.0);
        let (lo, hi) = xs.fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(x), b.max(x)));
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        let (lo, hi) = (lo.log10().floor(), hi.log10().ceil());
        (lo, if hi > lo { hi } else { lo + 1.0 })
    }

    fn y_range(&self) -> (f64, f64) {
        let ys = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(self.hline.as_ref().map(|h| h.0))
            .filter(|y| y.is_finite());
        let (lo, hi) = ys.fold((0.0f64, f64::NEG_INFINITY), |(a, b), y| {
            (a.min(y), b.max(y))
        });
        let hi = if hi > lo { hi } else { lo + 1.0 };
        let step = nice_step(hi - lo);
        ((lo / step).floor() * step, (hi / step).ceil() * step)
    }

    pub fn render(&self) -> String {
        let (x0, x1) = self.x_range();
        let (y0, y1) = self.y_range();
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x.log10() - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );

        // Axes frame and ticks.
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for d in (x0 as i32)..=(x1 as i32) {
            let x = sx(10f64.powi(d));
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#,
                TOP + ph,
                TOP + ph + 6.0,
                TOP + ph + 20.0
            );
            if d < x1 as i32 {
                for k in 2..10 {
                    let xm = sx(f64::from(k) * 10f64.powi(d));
                    let _ = writeln!(
                        s,
                        r#"<line x1="{xm:.2}" y1="{:.2}" x2="{xm:.2}" y2="{:.2}" stroke="black"/>"#,
                        TOP + ph,
                        TOP + ph + 3.0
                    );
                }
            }
        }
        let step = nice_step(y1 - y0);
        let ticks = ((y1 - y0) / step).round() as i32;
        for i in 0..=ticks {
            let v = y0 + f64::from(i) * step;
            let y = sy(v);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                LEFT - 9.0,
                y + 4.0,
                trim_tick(v)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        if let Some((v, label)) = &self.hline {
            let y = sy(*v);
            let _ = writeln!(
                s,
                r#"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="1 3"/><text x="{:.2}" y="{:.2}" fill="gray">{}</text>"#,
                LEFT + pw,
                LEFT + pw - 4.0,
                y - 4.0,
                escape(label)
            );
        }

        for (i, series) in self.series.iter().enumerate() {
            let pts: Vec<String> = series
                .points
                .iter()
                .filter(|(x, y)| *x > 0.0 && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let dash = DASHES[i % DASHES.len()];
            let dash_attr = if dash.is_empty() {
                String::new()
            } else {
                format!(r#" stroke-dasharray="{dash}""#)
            };
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="black" stroke-width="1.5"{dash_attr} points="{}"/>"#,
                pts.join(" ")
            );
            let ly = TOP + 16.0 + 20.0 * i as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="black" stroke-width="1.5"{dash_attr}/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 36.0,
                lx + 42.0,
                ly + 4.0,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn trim_tick(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_and_threshold() {
        let plot = Plot {
            title: "t".into(),
            x_label: "κt".into(),
            y_label: "y".into(),
            series: vec![
                Series {
                    label: "b=1".into(),
                    points: vec![(1e-3, 0.1), (1.0, 0.7), (100.0, 0.2)],
                },
                Series {
                    label: "b<2>".into(),
                    points: vec![(1e-3, 0.3), (100.0, 0.0)],
                },
            ],
            hline: Some((0.5, "ħ/2".into())),
        };
        let svg = plot.render();
        assert!(svg.starts_with("<?xml"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("stroke-dasharray=\"8 4\""));
        assert!(svg.contains("b&lt;2&gt;"));
        assert!(svg.contains(">1e-3<") && svg.contains(">1e2<"));
        assert!(svg.contains("stroke-dasharray=\"1 3\""));
        assert_eq!(svg, plot.render());
    }

    #[test]
    fn tick_steps() {
        assert_eq!(nice_step(1.0), 0.2);
        assert_eq!(nice_step(0.7), 0.1);
        assert_eq!(trim_tick(0.5), "0.5");
        assert_eq!(trim_tick(-0.0), "0");
    }
}
