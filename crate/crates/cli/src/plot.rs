//! Final against initial values, one series per group.

use std::fmt::Write as _;

use paradoxlens_core::ols::{least_squares, OlsSolution};
use paradoxlens_core::{Dataset, Group, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 560.0;
const MARGIN: f64 = 60.0;
const LEGEND_ROW: f64 = 18.0;
const COLORS: [&str; 2] = ["#d95f02", "#1b9e77"];
const LABELS: [&str; 2] = ["group 0", "group 1"];

struct Frame {
    lo: f64,
    hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.lo) / (self.hi - self.lo) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.lo) / (self.hi - self.lo) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Per-group `w_final ~ intercept + w_initial`; `None` for a group whose
/// initial values cannot support a line.
pub fn group_lines(ds: &Dataset) -> [Option<OlsSolution>; 2] {
    let fit_one = |g: Group| {
        let (x, y): (Vec<f64>, Vec<f64>) = ds
            .observations()
            .iter()
            .filter(|o| o.group == g)
            .map(|o| (o.w_initial, o.w_final))
            .unzip();
        let names = ["intercept".to_string(), "w_initial".to_string()];
        least_squares(&names, &[vec![1.0; x.len()], x], &y, true).ok()
    };
    [fit_one(Group::Zero), fit_one(Group::One)]
}

/// Tick positions and the decimals needed to print them.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

pub fn render_svg(ds: &Dataset) -> Result<String> {
    ds.require_both_groups()?;
    let lines = group_lines(ds);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for o in ds.observations() {
        lo = lo.min(o.w_initial.min(o.w_final));
        hi = hi.max(o.w_initial.max(o.w_final));
    }
    if hi == lo {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let f = Frame { lo: lo - pad, hi: hi + pad };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // axes and ticks
    let (x0, x1) = (f.x(f.lo), f.x(f.hi));
    let (y0, y1) = (f.y(f.lo), f.y(f.hi));
    let _ = writeln!(
        s,
        r#"<g id="axes" stroke="black"><line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/></g>"#
    );
    let _ = writeln!(s, r#"<g id="ticks" text-anchor="middle">"#);
    let (marks, decimals) = ticks(f.lo, f.hi);
    for t in marks {
        let (px, py) = (f.x(t), f.y(t));
        let t = format!("{t:.decimals$}");
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}">{t}</text>"#,
            y0 + 4.0,
            y0 + 16.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#,
            x0 - 4.0,
            x0 - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">initial (w_initial)</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">final (w_final)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    let _ = writeln!(
        s,
        r##"<line id="identity" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="#555555" stroke-dasharray="6 4"/>"##
    );

    for g in Group::BOTH {
        let k = g.index();
        let _ = writeln!(s, r#"<g id="series-{k}" fill="{}" fill-opacity="0.45">"#, COLORS[k]);
        for o in ds.observations().iter().filter(|o| o.group == g) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2"/>"#,
                f.x(o.w_initial),
                f.y(o.w_final)
            );
        }
        let _ = writeln!(s, "</g>");
    }

    for g in Group::BOTH {
        let k = g.index();
        let Some(line) = &lines[k] else { continue };
        let (a, b) = (line.coefficients[0], line.coefficients[1]);
        let xs: Vec<f64> = ds.observations().iter().filter(|o| o.group == g).map(|o| o.w_initial).collect();
        let (xa, xb) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let _ = writeln!(
            s,
            r#"<line id="fit-{k}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2.5"/>"#,
            f.x(xa),
            f.y(a + b * xa),
            f.x(xb),
            f.y(a + b * xb),
            COLORS[k]
        );
    }

    for g in Group::BOTH {
        let k = g.index();
        let n = ds.count(g) as f64;
        let (sx, sy) = ds
            .observations()
            .iter()
            .filter(|o| o.group == g)
            .fold((0.0, 0.0), |(a, b), o| (a + o.w_initial, b + o.w_final));
        let (cx, cy) = (f.x(sx / n), f.y(sy / n));
        let _ = writeln!(
            s,
            r#"<rect id="mean-{k}" x="{:.2}" y="{:.2}" width="10" height="10" fill="{}" stroke="black" transform="rotate(45 {cx:.2} {cy:.2})"/>"#,
            cx - 5.0,
            cy - 5.0,
            COLORS[k]
        );
    }

    let lx = MARGIN + 12.0;
    let ly = MARGIN + 8.0;
    let _ = writeln!(s, r#"<g id="legend">"#);
    for g in Group::BOTH {
        let k = g.index();
        let y = ly + k as f64 * LEGEND_ROW;
        let slope = lines[k]
            .as_ref()
            .map_or_else(String::new, |l| format!(" (slope {:.3})", l.coefficients[1]));
        let _ = writeln!(
            s,
            r#"<circle cx="{lx:.2}" cy="{y:.2}" r="4" fill="{}"/><text x="{:.2}" y="{:.2}">{}{slope}</text>"#,
            COLORS[k],
            lx + 10.0,
            y + 4.0,
            LABELS[k]
        );
    }
    let y = ly + 2.0 * LEGEND_ROW;
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#555555" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">identity (final = initial)</text>"##,
        lx - 6.0,
        lx + 6.0,
        lx + 10.0,
        y + 4.0
    );
    let y = ly + 3.0 * LEGEND_ROW;
    let _ = writeln!(
        s,
        r#"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="white" stroke="black" transform="rotate(45 {lx:.2} {y:.2})"/><text x="{:.2}" y="{:.2}">group means</text>"#,
        lx - 4.0,
        y - 4.0,
        lx + 10.0,
        y + 4.0
    );
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}
