//! Plain SVG pictures of rhombus configurations and spin slices. Output is
//! deterministic: fixed element order and fixed-precision coordinates.

use std::fmt::Write;

use crate::interface::{PlaneVertex, RConfiguration, Rhombus};
use crate::lattice::SpinConfiguration;
use crate::rcontour::Decomposition;

const SCALE: f64 = 24.0;
const FILL: [&str; 3] = ["#d9e4f2", "#f2dcc6", "#d4ecd2"];

struct Canvas {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
}

impl Canvas {
    fn new() -> Self {
        Canvas { body: String::new(), min: (f64::INFINITY, f64::INFINITY), max: (f64::NEG_INFINITY, f64::NEG_INFINITY) }
    }

    fn pt(&mut self, v: PlaneVertex) -> (f64, f64) {
        let (x, y) = v.xy();
        let p = (x * SCALE, -y * SCALE);
        self.min = (self.min.0.min(p.0), self.min.1.min(p.1));
        self.max = (self.max.0.max(p.0), self.max.1.max(p.1));
        p
    }

    fn polygon(&mut self, vs: &[PlaneVertex], style: &str) {
        let pts: Vec<String> = vs
            .iter()
            .map(|v| {
                let (x, y) = self.pt(*v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(self.body, r#"<polygon points="{}" {style}/>"#, pts.join(" "));
    }

    fn line(&mut self, a: PlaneVertex, b: PlaneVertex, style: &str) {
        let (x1, y1) = self.pt(a);
        let (x2, y2) = self.pt(b);
        let _ = writeln!(self.body, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" {style}/>"#);
    }

    fn finish(self, header: &str) -> String {
        let pad = SCALE;
        let (w, h) = if self.min.0.is_finite() {
            (self.max.0 - self.min.0 + 2.0 * pad, self.max.1 - self.min.1 + 2.0 * pad)
        } else {
            (2.0 * pad, 2.0 * pad)
        };
        let (x0, y0) = if self.min.0.is_finite() { (self.min.0 - pad, self.min.1 - pad) } else { (0.0, 0.0) };
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- {header} -->\n<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0:.3} {y0:.3} {w:.3} {h:.3}\" width=\"{w:.0}\" height=\"{h:.0}\">\n{}</svg>\n",
            self.body
        )
    }
}

/// Rhombi coloured by type.
pub fn tiling_svg(rhombi: &[Rhombus], header: &str) -> String {
    let mut c = Canvas::new();
    for r in rhombi {
        c.polygon(&r.vertices(), &format!(r##"fill="{}" stroke="#333" stroke-width="1""##, FILL[r.tau() as usize]));
    }
    c.finish(header)
}

/// Rhombus configuration with overlapping rhombi hatched translucent and,
/// when a decomposition is given, contour edges drawn in red.
pub fn rconfig_svg(rc: &RConfiguration, dec: Option<&Decomposition>, header: &str) -> String {
    let mut c = Canvas::new();
    for (i, r) in rc.rhombi.iter().enumerate() {
        let op = if rc.overlapping[i] { 0.45 } else { 1.0 };
        c.polygon(
            &r.vertices(),
            &format!(r##"fill="{}" fill-opacity="{op}" stroke="#333" stroke-width="1""##, FILL[r.tau() as usize]),
        );
    }
    if let Some(d) = dec {
        for ct in &d.contours {
            for &e in &ct.edges {
                let p = rc.edges[e].plane;
                c.line(p.from, p.to, r##"stroke="#c0392b" stroke-width="3""##);
            }
            for &f in &ct.faces {
                c.polygon(&rc.rhombi[f].vertices(), r##"fill="none" stroke="#c0392b" stroke-width="2" stroke-dasharray="4 2""##);
            }
        }
    }
    c.finish(header)
}

/// Square-cell picture of the spins in the plane `k[axis] = level`.
pub fn slice_svg(cfg: &SpinConfiguration, axis: usize, level: i64, header: &str) -> String {
    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
    let lo = cfg.volume.lo;
    let d = cfg.volume.dims;
    let cell = 16.0;
    let mut body = String::new();
    for j in 0..d[v] as i64 {
        for i in 0..d[u] as i64 {
            let mut k = [0i64; 3];
            k[axis] = level;
            k[u] = lo[u] + i;
            k[v] = lo[v] + j;
            let s = cfg.get(crate::lattice::Site { k });
            let fill = if s > 0 { "#222" } else { "#eee" };
            let y = (d[v] as i64 - 1 - j) as f64 * cell;
            let _ = writeln!(
                body,
                r##"<rect x="{:.1}" y="{y:.1}" width="{cell}" height="{cell}" fill="{fill}" stroke="#999" stroke-width="0.5"/>"##,
                i as f64 * cell
            );
        }
    }
    let (w, h) = (d[u] as f64 * cell, d[v] as f64 * cell);
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- {header} -->\n<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" width=\"{w}\" height=\"{h}\">\n{body}</svg>\n"
    )
}
