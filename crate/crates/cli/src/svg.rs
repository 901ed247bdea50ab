//! Self-contained SVG line charts: witness versus squeeze parameter
//! with error bars and the unit separability line. No external
//! plotting dependency; the CSV next to the figure carries the data.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 46.0;
const BOTTOM: f64 = 58.0;

pub struct Series {
    pub label: String,
    pub color: &'static str,
    /// `(x, y, y_err)` triples.
    pub points: Vec<(f64, f64, f64)>,
}

struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>, include: Option<f64>) -> Range {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values.chain(include) {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.06 * (hi - lo);
        Range { lo: lo - pad, hi: hi + pad }
    }

    fn span(&self) -> f64 {
        self.hi - self.lo
    }

    /// Round tick step of 1, 2 or 5 times a power of ten, aiming for
    /// about five intervals.
    fn ticks(&self) -> Vec<f64> {
        let raw = self.span() / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let norm = raw / mag;
        let step = if norm <= 1.0 {
            1.0
        } else if norm <= 2.0 {
            2.0
        } else if norm <= 5.0 {
            5.0
        } else {
            10.0
        } * mag;
        let first = (self.lo / step).ceil() * step;
        let mut out = Vec::new();
        let mut v = first;
        while v <= self.hi + 1e-9 * step {
            // Snap values like 0.30000000000000004 back onto the grid.
            out.push((v / step).round() * step);
            v += step;
        }
        out
    }
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if !(1e-3..1e6).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render a line chart with symmetric error bars. When `unity_line` is
/// set, a dashed horizontal line marks the value 1 (the separability /
/// no-steering boundary for every witness plotted here).
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    unity_line: bool,
) -> String {
    let xr = Range::of(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), None);
    let yr = Range::of(
        series.iter().flat_map(|s| {
            s.points.iter().flat_map(|&(_, y, e)| [y - e, y + e])
        }),
        unity_line.then_some(1.0),
    );
    let px = |x: f64| LEFT + (x - xr.lo) / xr.span() * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - (y - yr.lo) / yr.span() * (HEIGHT - TOP - BOTTOM);

    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">"
    )
    .unwrap();
    writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>").unwrap();
    writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        WIDTH / 2.0,
        esc(title)
    )
    .unwrap();

    // Axes and ticks.
    for x in xr.ticks() {
        let xpx = px(x);
        writeln!(
            s,
            "<line x1=\"{xpx:.1}\" y1=\"{:.1}\" x2=\"{xpx:.1}\" y2=\"{:.1}\" stroke=\"#ddd\"/>",
            TOP,
            HEIGHT - BOTTOM
        )
        .unwrap();
        writeln!(
            s,
            "<text x=\"{xpx:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            HEIGHT - BOTTOM + 18.0,
            fmt_num(x)
        )
        .unwrap();
    }
    for y in yr.ticks() {
        let ypx = py(y);
        writeln!(
            s,
            "<line x1=\"{:.1}\" y1=\"{ypx:.1}\" x2=\"{:.1}\" y2=\"{ypx:.1}\" stroke=\"#ddd\"/>",
            LEFT,
            WIDTH - RIGHT
        )
        .unwrap();
        writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            LEFT - 8.0,
            ypx + 4.0,
            fmt_num(y)
        )
        .unwrap();
    }
    writeln!(
        s,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\"/>",
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    )
    .unwrap();
    writeln!(
        s,
        "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - 14.0,
        esc(x_label)
    )
    .unwrap();
    writeln!(
        s,
        "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        esc(y_label)
    )
    .unwrap();

    if unity_line && yr.lo <= 1.0 && 1.0 <= yr.hi {
        let ypx = py(1.0);
        writeln!(
            s,
            "<line x1=\"{LEFT}\" y1=\"{ypx:.1}\" x2=\"{:.1}\" y2=\"{ypx:.1}\" \
             stroke=\"#888\" stroke-dasharray=\"6 4\"/>",
            WIDTH - RIGHT
        )
        .unwrap();
    }

    for (si, ser) in series.iter().enumerate() {
        // Error bars with caps.
        for &(x, y, e) in &ser.points {
            if e > 0.0 {
                let (xpx, y0, y1) = (px(x), py(y - e), py(y + e));
                writeln!(
                    s,
                    "<line x1=\"{xpx:.1}\" y1=\"{y0:.1}\" x2=\"{xpx:.1}\" y2=\"{y1:.1}\" stroke=\"{}\"/>",
                    ser.color
                )
                .unwrap();
                for yc in [y0, y1] {
                    writeln!(
                        s,
                        "<line x1=\"{:.1}\" y1=\"{yc:.1}\" x2=\"{:.1}\" y2=\"{yc:.1}\" stroke=\"{}\"/>",
                        xpx - 3.0,
                        xpx + 3.0,
                        ser.color
                    )
                    .unwrap();
                }
            }
        }
        let path: Vec<String> =
            ser.points.iter().map(|&(x, y, _)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"/>",
            path.join(" "),
            ser.color
        )
        .unwrap();
        for &(x, y, _) in &ser.points {
            writeln!(
                s,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{}\"/>",
                px(x),
                py(y),
                ser.color
            )
            .unwrap();
        }
        // Legend entry.
        let ly = TOP + 16.0 + 18.0 * si as f64;
        let lx = WIDTH - RIGHT - 150.0;
        writeln!(
            s,
            "<line x1=\"{lx}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{}\" stroke-width=\"1.8\"/>",
            lx + 24.0,
            ser.color
        )
        .unwrap();
        writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            lx + 30.0,
            ly + 4.0,
            esc(&ser.label)
        )
        .unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    s
}

/// Palette cycled over representations.
pub fn palette(i: usize) -> &'static str {
    const COLORS: [&str; 4] = ["#1965b0", "#dc050c", "#4eb265", "#f1932d"];
    COLORS[i % COLORS.len()]
}
