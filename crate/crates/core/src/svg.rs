//! Static SVG snapshots of a triangulation.

use std::fmt::Write;

use crate::delaunay::Triangulation;

const SIZE: f64 = 480.0;
const PAD: f64 = 24.0;

/// Draws triangles, points and point indices. Output depends only on the
/// triangulation and `title`.
pub fn render_svg(t: &Triangulation, title: &str) -> String {
    let pts: Vec<(usize, f64, f64)> = t
        .config()
        .points()
        .iter()
        .map(|p| (p.index, p.x.to_f64(), p.y.to_f64()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(_, x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let scale = (SIZE - 2.0 * PAD) / (x1 - x0).max(y1 - y0).max(1e-9);
    let map = |x: f64, y: f64| (PAD + (x - x0) * scale, SIZE - PAD - (y - y0) * scale);
    let at = |index: usize| {
        let &(_, x, y) = pts.iter().find(|p| p.0 == index).expect("vertex in configuration");
        map(x, y)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for tri in t.triangles() {
        let corners: Vec<String> = tri
            .vertices()
            .iter()
            .map(|&v| {
                let (x, y) = at(v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="#eef3fb" stroke="#36507a" stroke-width="1"><title>{tri}</title></polygon>"##,
            corners.join(" ")
        );
    }
    for &(index, x, y) in &pts {
        let (sx, sy) = map(x, y);
        let _ = writeln!(out, r##"<circle cx="{sx:.3}" cy="{sy:.3}" r="3" fill="#b0302a"/>"##);
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="11" font-family="monospace">{index}</text>"#,
            sx + 4.0,
            sy - 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
