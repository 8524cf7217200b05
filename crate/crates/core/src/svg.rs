//! Static band diagrams: `σ(H₀)` strips behind the guided curves.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::report::ResultBundle;
use crate::spectra::GuidedBandSet;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Frame {
    e_lo: f64,
    e_hi: f64,
}

impl Frame {
    fn x(&self, theta: f64) -> f64 {
        LEFT + (theta + PI) / (2.0 * PI) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, e: f64) -> f64 {
        TOP + (self.e_hi - e) / (self.e_hi - self.e_lo) * (HEIGHT - TOP - BOTTOM)
    }
}

fn energy_range(bundle: &ResultBundle) -> (f64, f64) {
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 0.0;
    if let Some(h0) = &bundle.h0 {
        for b in &h0.bands {
            lo = lo.min(b.lo);
            hi = hi.max(b.hi);
        }
    }
    if let Some(g) = &bundle.guided {
        for b in &g.bands {
            lo = lo.min(b.interval.lo);
            hi = hi.max(b.interval.hi);
        }
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn curves_1d(s: &mut String, f: &Frame, g: &GuidedBandSet) {
    for j in 0..g.bands.len() {
        let color = PALETTE[j % PALETTE.len()];
        // break the polyline wherever the curve is absent
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for c in &g.curves {
            match c.values.get(j) {
                Some(&v) => segments.last_mut().unwrap().push((f.x(c.theta[0]), f.y(v))),
                None if !segments.last().unwrap().is_empty() => segments.push(Vec::new()),
                None => {}
            }
        }
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            );
        }
    }
}

/// Bars spanning the range of `λ_j` over the second angle, per value of
/// the first.
fn strips_2d(s: &mut String, f: &Frame, g: &GuidedBandSet) {
    let n = g.grid.points_per_dim();
    let cell = (WIDTH - LEFT - RIGHT) / n as f64;
    for j in 0..g.bands.len() {
        let color = PALETTE[j % PALETTE.len()];
        for a in 0..n {
            let column = g.curves[a * n..(a + 1) * n]
                .iter()
                .filter_map(|c| c.values.get(j).copied());
            let (lo, hi) = column.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                (l.min(v), h.max(v))
            });
            if !lo.is_finite() {
                continue;
            }
            let x = f.x(g.grid.coordinate(a)) - 0.5 * cell;
            let (y0, y1) = (f.y(hi), f.y(lo));
            let _ = writeln!(
                s,
                r#"<rect x="{x:.3}" y="{y0:.3}" width="{cell:.3}" height="{:.3}" fill="{color}" fill-opacity="0.6"/>"#,
                (y1 - y0).max(1.0)
            );
        }
    }
}

/// SVG 1.1 document for `d = 1` (curves) or `d = 2` (strips); `None`
/// otherwise.
pub fn svg_document(bundle: &ResultBundle) -> Option<String> {
    let d = bundle.guided.as_ref().map_or(1, |g| g.grid.dim());
    if d > 2 {
        return None;
    }
    let (e_lo, e_hi) = energy_range(bundle);
    let f = Frame { e_lo, e_hi };
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    if let Some(h0) = &bundle.h0 {
        for b in &h0.bands {
            let (y0, y1) = (f.y(b.hi), f.y(b.lo));
            let _ = writeln!(
                s,
                r##"<rect x="{LEFT}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="#bbbbbb" fill-opacity="0.5"/>"##,
                WIDTH - LEFT - RIGHT,
                (y1 - y0).max(1.0)
            );
        }
    }
    if let Some(g) = &bundle.guided {
        match d {
            1 => curves_1d(&mut s, &f, g),
            _ => strips_2d(&mut s, &f, g),
        }
    }

    let y0 = f.y(0.0);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{y0:.3}" x2="{:.3}" y2="{y0:.3}" stroke="black" stroke-dasharray="6,4"/>"#,
        WIDTH - RIGHT
    );
    let (axis_y, axis_x) = (HEIGHT - BOTTOM, WIDTH - RIGHT);
    let _ = writeln!(
        s,
        r#"<path d="M {LEFT} {TOP} L {LEFT} {axis_y} L {axis_x} {axis_y}" fill="none" stroke="black"/>"#
    );
    for (theta, label) in [(-PI, "-π"), (0.0, "0"), (PI, "π")] {
        let x = f.x(theta);
        let _ = writeln!(
            s,
            r#"<text x="{x:.3}" y="{:.3}" font-size="12" text-anchor="middle">{label}</text>"#,
            axis_y + 16.0
        );
    }
    for e in [e_lo, 0.0, e_hi] {
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="end">{e:.3}</text>"#,
            LEFT - 6.0,
            f.y(e) + 4.0
        );
    }
    let axis = if d == 1 { "θ" } else { "θ₁" };
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" font-size="14" text-anchor="middle">{axis}</text>"#,
        0.5 * (LEFT + WIDTH - RIGHT),
        HEIGHT - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.3}" font-size="14" text-anchor="middle" transform="rotate(-90 16 {:.3})">energy</text>"#,
        0.5 * HEIGHT,
        0.5 * HEIGHT
    );
    let _ = writeln!(s, "</svg>");
    Some(s)
}

pub fn render_svg(bundle: &ResultBundle, dir: &Path) -> Result<Option<PathBuf>> {
    let Some(doc) = svg_document(bundle) else {
        log::info!("band diagram skipped: only one or two guided directions are drawn");
        return Ok(None);
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("bands.svg");
    fs::write(&path, doc).map_err(|e| Error::io(&path, e))?;
    Ok(Some(path))
}
