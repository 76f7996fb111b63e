//! Static SVG 1.1 diagram of a meander.
//!
//! `L0` is drawn horizontally with the anchors at its ends, every arc as a
//! semicircle above or below it, crossings labelled with their index and
//! faces with their area.

use std::fmt::Write as _;

use crate::maslov::shape_indices;
use crate::meander::{FaceId, Meander};
use crate::rational::format_rational;
use crate::shape::Side;

const STEP: f64 = 60.0;
const MARGIN: f64 = 40.0;

fn x_of(p: usize) -> f64 {
    MARGIN + STEP * p as f64
}

pub fn render_svg(m: &Meander) -> String {
    let shape = m.shape();
    let n = shape.n();
    let table = shape_indices(shape);
    let width = 2.0 * MARGIN + STEP * (n + 1) as f64;
    let half_height = STEP * (n + 1) as f64 / 2.0 + MARGIN;
    let height = 2.0 * half_height;
    let y0 = half_height;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    out.push_str("<style>path{fill:none;stroke:#1f4e9c;stroke-width:2}line{stroke:#000;stroke-width:1.5}text{font-family:sans-serif;font-size:11px;text-anchor:middle}.face{fill:#555}</style>\n");
    let _ = writeln!(
        out,
        "<line class=\"l0\" x1=\"{:.1}\" y1=\"{y0:.1}\" x2=\"{:.1}\" y2=\"{y0:.1}\"/>",
        x_of(0),
        x_of(n + 1)
    );
    for i in 0..shape.arc_count() {
        let chord = shape.arc_chord(i);
        let (a, b) = (x_of(chord.lo), x_of(chord.hi));
        let r = (b - a) / 2.0;
        // Sweep flag 1 draws clockwise from the left end, which on screen is the upper half.
        let sweep = match shape.arc_side(i) {
            Side::Up => 1,
            Side::Down => 0,
        };
        let _ = writeln!(
            out,
            "<path class=\"arc\" d=\"M {a:.1} {y0:.1} A {r:.1} {r:.1} 0 0 {sweep} {b:.1} {y0:.1}\"/>"
        );
    }
    for k in 1..=n {
        let p = shape.perm[k - 1];
        let _ = writeln!(
            out,
            "<text class=\"crossing\" x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            x_of(p) + 8.0,
            y0 - 4.0,
            table.of(k)
        );
    }
    for (face, area) in m.areas() {
        let (x, y) = match face {
            FaceId::Arc(i) => {
                let chord = shape.arc_chord(*i);
                let r = (x_of(chord.hi) - x_of(chord.lo)) / 2.0;
                let x = (x_of(chord.lo) + x_of(chord.hi)) / 2.0;
                let dy = r - 8.0;
                match shape.arc_side(*i) {
                    Side::Up => (x, y0 - dy + 4.0),
                    Side::Down => (x, y0 + dy),
                }
            }
            FaceId::Outer(Side::Up) => (MARGIN, 16.0),
            FaceId::Outer(Side::Down) => (MARGIN, height - 8.0),
        };
        let _ = writeln!(
            out,
            "<text class=\"face\" x=\"{x:.1}\" y=\"{y:.1}\">{} {}</text>",
            face,
            format_rational(area)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meander::assign_areas;
    use crate::shape::MeanderShape;

    #[test]
    fn element_counts() {
        let m = assign_areas(&MeanderShape::new(vec![1, 4, 3, 2], Side::Up), 1, 100).unwrap();
        let svg = render_svg(&m);
        assert_eq!(svg.matches("<path ").count(), 5);
        assert_eq!(svg.matches("class=\"crossing\"").count(), 4);
        assert_eq!(svg.matches("class=\"face\"").count(), 7);
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg, render_svg(&m));
    }
}
