//! SVG rendering of patches, packings, and shapes. Output is plain text
//! with numbers trimmed to six significant digits so repeated runs are
//! byte-identical.

use std::collections::BTreeSet;

use crate::complex::TileComplex;
use crate::error::{Error, Result};
use crate::geom::{bbox, C};
use crate::packing::{Packing, PackingComplex};
use crate::shape::Shape;

const FILL: &str = "#e6e6e6";
const HIGHLIGHT_FILL: &str = "#7da7d9";
const STROKE: &str = "#333333";

/// Six significant digits, trailing zeros trimmed.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let prec = (5 - exp).max(0) as usize;
    let mut s = format!("{x:.prec$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

struct Canvas {
    body: String,
    lo: C,
    hi: C,
}

impl Canvas {
    fn new() -> Canvas {
        Canvas {
            body: String::new(),
            lo: C::new(f64::INFINITY, f64::INFINITY),
            hi: C::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn cover(&mut self, z: C) {
        self.lo = C::new(self.lo.re.min(z.re), self.lo.im.min(z.im));
        self.hi = C::new(self.hi.re.max(z.re), self.hi.im.max(z.im));
    }

    /// SVG y grows downward; mirror the plane so the drawing matches
    /// mathematical orientation.
    fn path(&mut self, pts: &[C], closed: bool, style: &str) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, &z) in pts.iter().enumerate() {
            self.cover(z);
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{cmd}{} {}", fmt6(z.re), fmt6(-z.im)));
        }
        if closed {
            d.push('Z');
        }
        self.body
            .push_str(&format!("<path d=\"{d}\" {style}/>\n"));
    }

    fn circle(&mut self, center: C, radius: f64, style: &str) {
        self.cover(center + C::new(radius, radius));
        self.cover(center - C::new(radius, radius));
        self.body.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {}/>\n",
            fmt6(center.re),
            fmt6(-center.im),
            fmt6(radius),
            style
        ));
    }

    fn finish(self) -> String {
        let (lo, hi, stroke) = if self.lo.re.is_finite() {
            let span = self.hi - self.lo;
            let margin = 0.03 * span.norm().max(f64::MIN_POSITIVE);
            (
                self.lo - C::new(margin, margin),
                self.hi + C::new(margin, margin),
                (span.norm() * 1.5e-3).max(f64::MIN_POSITIVE),
            )
        } else {
            (C::new(0.0, 0.0), C::new(1.0, 1.0), 1.5e-3)
        };
        let w = hi.re - lo.re;
        let h = hi.im - lo.im;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n<g stroke=\"{}\" stroke-width=\"{}\" stroke-linejoin=\"round\" fill=\"none\">\n{}</g>\n</svg>\n",
            fmt6(lo.re),
            fmt6(-hi.im),
            fmt6(w),
            fmt6(h),
            STROKE,
            fmt6(stroke),
            self.body
        )
    }
}

/// Euclidean drawing of a welded complex; tiles in `highlight` get the
/// accent fill.
pub fn render_complex(complex: &TileComplex, highlight: &BTreeSet<usize>) -> String {
    let mut canvas = Canvas::new();
    for (t, _) in complex.tiles.iter().enumerate() {
        let pts = complex.tile_polygon(t);
        let fill = if highlight.contains(&t) { HIGHLIGHT_FILL } else { FILL };
        canvas.path(&pts, true, &format!("fill=\"{fill}\""));
    }
    canvas.finish()
}

/// Packed drawing: tile outlines traced through the boundary-chain circle
/// centers, the circles themselves, and highlighted tiles filled.
pub fn render_packing(
    pc: &PackingComplex,
    packing: &Packing,
    complex: &TileComplex,
    highlight: &BTreeSet<usize>,
    draw_circles: bool,
) -> Result<String> {
    let circles = packing
        .circles
        .as_ref()
        .ok_or_else(|| Error::Layout("rendering needs a laid-out packing".into()))?;
    let mut canvas = Canvas::new();
    for (t, tile) in complex.tiles.iter().enumerate() {
        let pts = packed_tile_outline(pc, complex, t, &tile.corners, circles)?;
        let fill = if highlight.contains(&t) { HIGHLIGHT_FILL } else { FILL };
        canvas.path(&pts, true, &format!("fill=\"{fill}\""));
    }
    if draw_circles {
        for c in circles {
            canvas.circle(c.center, c.radius, "stroke-opacity=\"0.45\"");
        }
    }
    Ok(canvas.finish())
}

fn packed_tile_outline(
    pc: &PackingComplex,
    complex: &TileComplex,
    _tile: usize,
    corners: &[usize],
    circles: &[crate::packing::Circle],
) -> Result<Vec<C>> {
    let k = corners.len();
    let mut pts = Vec::with_capacity(k << pc.hex_depth);
    for i in 0..k {
        let chain = pc.chain_between(complex, corners[i], corners[(i + 1) % k])?;
        for &v in &chain[..chain.len() - 1] {
            pts.push(circles[v].center);
        }
    }
    Ok(pts)
}

/// Side-by-side panel of shapes (e.g. the normalized aggregate next to its
/// euclidean target), each labeled by stacking order: first shape solid,
/// later ones accent-stroked.
pub fn render_shapes(shapes: &[&Shape], side_by_side: bool) -> String {
    let mut canvas = Canvas::new();
    let mut offset = C::new(0.0, 0.0);
    for (i, shape) in shapes.iter().enumerate() {
        let pts: Vec<C> = shape.points.iter().map(|&z| z + offset).collect();
        let style = if i == 0 {
            format!("fill=\"{FILL}\"")
        } else {
            "stroke=\"#c0504d\" fill=\"none\"".to_string()
        };
        canvas.path(&pts, true, &style);
        for &ci in &shape.corners {
            canvas.circle(pts[ci], 0.012 * shape.diameter().max(f64::MIN_POSITIVE), "fill=\"#c0504d\" stroke=\"none\"");
        }
        if side_by_side {
            let (lo, hi) = bbox(&shape.points);
            offset += C::new((hi.re - lo.re) * 1.15 + 0.1, 0.0);
        }
    }
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::weld;
    use crate::patch::expand_prototile;
    use crate::rules::load_builtin;

    #[test]
    fn numbers_are_trimmed_to_six_significant_digits() {
        assert_eq!(fmt6(0.0), "0");
        assert_eq!(fmt6(1.0), "1");
        assert_eq!(fmt6(-0.125), "-0.125");
        assert_eq!(fmt6(123456.789), "123457");
        assert_eq!(fmt6(0.000123456789), "0.000123457");
        assert_eq!(fmt6(2.0 / 3.0), "0.666667");
    }

    #[test]
    fn complex_svg_contains_all_tiles() {
        let rule = load_builtin("sphinx").unwrap();
        let patch = expand_prototile(&rule, 0, 1).unwrap();
        let complex = weld(&rule, &patch, None).unwrap();
        let svg = render_complex(&complex, &BTreeSet::from([2]));
        assert_eq!(svg.matches("<path").count(), complex.tiles.len());
        assert_eq!(svg.matches(HIGHLIGHT_FILL).count(), 1);
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let rule = load_builtin("penrose").unwrap();
        let patch = expand_prototile(&rule, 0, 2).unwrap();
        let complex = weld(&rule, &patch, None).unwrap();
        let a = render_complex(&complex, &BTreeSet::new());
        let b = render_complex(&complex, &BTreeSet::new());
        assert_eq!(a, b);
    }

    #[test]
    fn empty_highlight_set_is_fine_and_empty_shape_list_renders() {
        let svg = render_shapes(&[], false);
        assert!(svg.contains("viewBox=\"0 -1 1 1\""));
    }
}
