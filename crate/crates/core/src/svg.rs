//! Minimal SVG output for polylines and polygons.
//!
//! One `<path>` per curve. The view box is the bounding box plus a 5%
//! margin, the stroke width is 0.2% of the box diagonal, and the y axis is
//! flipped so that the picture has the usual mathematical orientation.

use std::fmt::Write;

/// A drawable path in the plane.
#[derive(Clone, Debug)]
pub struct Path {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
    pub fill: Option<String>,
}

impl Path {
    pub fn line(points: Vec<[f64; 2]>) -> Path {
        Path { points, closed: false, fill: None }
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Renders `paths` into a standalone SVG document.
pub fn render(paths: &[Path]) -> String {
    let pts = paths.iter().flat_map(|p| p.points.iter());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        // flipped
        y0 = y0.min(-p[1]);
        y1 = y1.max(-p[1]);
    }
    if !x0.is_finite() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let (w, h) = ((x1 - x0).max(1e-12), (y1 - y0).max(1e-12));
    let (mx, my) = (0.05 * w, 0.05 * h);
    let (vx, vy, vw, vh) = (x0 - mx, y0 - my, w + 2.0 * mx, h + 2.0 * my);
    let stroke = 0.002 * vw.hypot(vh);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
        fmt_num(vx),
        fmt_num(vy),
        fmt_num(vw),
        fmt_num(vh),
        (800.0 * vh / vw).round().max(1.0)
    )
    .unwrap();
    for p in paths {
        let mut d = String::new();
        for (i, q) in p.points.iter().enumerate() {
            let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, fmt_num(q[0]), fmt_num(-q[1]));
        }
        if p.closed {
            d.push_str(" Z");
        }
        writeln!(
            out,
            r#"  <path d="{d}" fill="{}" stroke="black" stroke-width="{}" stroke-linejoin="round"/>"#,
            p.fill.as_deref().unwrap_or("none"),
            fmt_num(stroke)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
