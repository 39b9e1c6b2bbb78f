//! Deterministic SVG rendering of planar bodies, cuts, and closures.
//!
//! Screen coordinates are floats formatted at fixed precision purely for
//! display; every element carries the exact data it was drawn from in
//! `data-*` attributes, so no information is lost to rendering.

use cg_closure::body::ConvexBody;
use cg_closure::cuts::CGCut;
use cg_closure::geometry::Polytope;
use cg_closure::jsonio;
use cg_closure::numeric::{QuadExt, Rational};
use num_traits::ToPrimitive;

/// Rendering failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlotError {
    /// Only 2-dimensional bodies can be drawn.
    #[error("only 2-dimensional bodies can be plotted, got dimension {dim}")]
    NotPlottable {
        /// Ambient dimension of the offending body.
        dim: usize,
    },
}

const CANVAS: f64 = 640.0;

const STYLE: &str = "\
  <style>\n\
    .body { fill: none; stroke: #1f3a5f; stroke-width: 2; }\n\
    .cut { stroke: #a63d3d; stroke-width: 1; }\n\
    .closure { fill: #74a57f; fill-opacity: 0.45; stroke: #2c5e3f; stroke-width: 1.5; }\n\
    .annotation { font: 16px sans-serif; fill: #333333; }\n\
  </style>\n";

/// World-to-screen transform with uniform scale and a flipped y-axis.
struct View {
    wx0: f64,
    wy0: f64,
    wx1: f64,
    wy1: f64,
    scale: f64,
    ox: f64,
    oy: f64,
}

impl View {
    fn new(bounds: &[(Rational, Rational)]) -> View {
        let x0 = rat_f64(&bounds[0].0);
        let x1 = rat_f64(&bounds[0].1);
        let y0 = rat_f64(&bounds[1].0);
        let y1 = rat_f64(&bounds[1].1);
        let pad = 0.6 + 0.1 * (x1 - x0).max(y1 - y0);
        let (wx0, wx1) = (x0 - pad, x1 + pad);
        let (wy0, wy1) = (y0 - pad, y1 + pad);
        let scale = CANVAS / (wx1 - wx0).max(wy1 - wy0);
        let ox = (CANVAS - (wx1 - wx0) * scale) / 2.0;
        let oy = (CANVAS - (wy1 - wy0) * scale) / 2.0;
        View { wx0, wy0, wx1, wy1, scale, ox, oy }
    }

    fn sx(&self, x: f64) -> f64 {
        self.ox + (x - self.wx0) * self.scale
    }

    fn sy(&self, y: f64) -> f64 {
        CANVAS - self.oy - (y - self.wy0) * self.scale
    }
}

fn rat_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

fn quad_f64(q: &QuadExt) -> f64 {
    rat_f64(q.rat_part()) + rat_f64(q.irr_part()) * (q.field_index() as f64).sqrt()
}

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

/// Screen points of a vertex list, ordered counterclockwise around the
/// centroid so they trace the convex outline.
fn outline(view: &View, vertices: &[Vec<QuadExt>]) -> Vec<(f64, f64)> {
    let world: Vec<(f64, f64)> =
        vertices.iter().map(|v| (quad_f64(&v[0]), quad_f64(&v[1]))).collect();
    let n = world.len() as f64;
    let cx = world.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = world.iter().map(|p| p.1).sum::<f64>() / n;
    let mut ordered = world;
    ordered.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.partial_cmp(&tb).expect("finite angles")
    });
    ordered.into_iter().map(|(x, y)| (view.sx(x), view.sy(y))).collect()
}

fn points_attr(pts: &[(f64, f64)]) -> String {
    pts.iter().map(|(x, y)| format!("{},{}", fmt(*x), fmt(*y))).collect::<Vec<_>>().join(" ")
}

/// A polygon, segment, or point marker for a vertex set, tagged with the
/// given class and exact-data attribute.
fn vertex_element(view: &View, vertices: &[Vec<QuadExt>], class: &str, data: &str) -> String {
    let exact: String = serde_json::Value::Array(
        vertices.iter().map(|v| jsonio::quad_vec_to_value(v)).collect(),
    )
    .to_string();
    let pts = outline(view, vertices);
    match pts.len() {
        1 => format!(
            "  <circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"3\" {data}='{exact}'/>\n",
            fmt(pts[0].0),
            fmt(pts[0].1)
        ),
        2 => format!(
            "  <line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {data}='{exact}'/>\n",
            fmt(pts[0].0),
            fmt(pts[0].1),
            fmt(pts[1].0),
            fmt(pts[1].1)
        ),
        _ => format!(
            "  <polygon class=\"{class}\" points=\"{}\" {data}='{exact}'/>\n",
            points_attr(&pts)
        ),
    }
}

/// Clips the line `c.x = rhs` to the world rectangle; `None` when the line
/// misses the view.
fn clip_line(view: &View, c: (f64, f64), rhs: f64) -> Option<((f64, f64), (f64, f64))> {
    let (a, b) = c;
    let eps = 1e-9;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    if b.abs() > eps {
        for x in [view.wx0, view.wx1] {
            let y = (rhs - a * x) / b;
            if y >= view.wy0 - eps && y <= view.wy1 + eps {
                pts.push((x, y));
            }
        }
    }
    if a.abs() > eps {
        for y in [view.wy0, view.wy1] {
            let x = (rhs - b * y) / a;
            if x >= view.wx0 - eps && x <= view.wx1 + eps {
                pts.push((x, y));
            }
        }
    }
    let first = *pts.first()?;
    let second = *pts
        .iter()
        .find(|p| (p.0 - first.0).hypot(p.1 - first.1) > 1e-7)?;
    Some((first, second))
}

/// Renders a 2-dimensional body with its cuts and closure.
///
/// The document always contains one `class="body"` outline element and one
/// `class="cut"` line per visible cut; the closure appears as a shaded
/// `class="closure"` element, or as the annotation text `closure empty`
/// when there is none.  Output bytes depend only on the inputs.
pub fn plot2d(
    body: &ConvexBody,
    cuts: &[CGCut],
    closure: Option<&Polytope>,
) -> Result<String, PlotError> {
    let dim = body.ambient_dim();
    if dim != 2 {
        return Err(PlotError::NotPlottable { dim });
    }
    let view = View::new(&body.bounding_box());
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">\n",
        c = CANVAS as u32
    ));
    out.push_str(STYLE);

    match body {
        ConvexBody::QPolytope(p) | ConvexBody::QuadPolytope(p) => {
            out.push_str(&vertex_element(&view, p.vertices(), "body", "data-vertices"));
        }
        ConvexBody::Ball { center, radius } => {
            let cx = view.sx(rat_f64(&center[0]));
            let cy = view.sy(rat_f64(&center[1]));
            let r = rat_f64(radius) * view.scale;
            out.push_str(&format!(
                "  <circle class=\"body\" cx=\"{}\" cy=\"{}\" r=\"{}\" data-center='{}' data-radius='{}'/>\n",
                fmt(cx),
                fmt(cy),
                fmt(r),
                jsonio::rat_vec_to_value(center),
                jsonio::rat_to_value(radius)
            ));
        }
        ConvexBody::Ellipse2D { center, matrix } => {
            let a = rat_f64(&matrix[0][0]);
            let b = rat_f64(&matrix[0][1]);
            let c = rat_f64(&matrix[1][1]);
            let theta = 0.5 * (2.0 * b).atan2(a - c);
            let root = ((a - c).powi(2) + 4.0 * b * b).sqrt();
            let lam1 = (a + c + root) / 2.0;
            let lam2 = (a + c - root) / 2.0;
            let rx = view.scale / lam1.sqrt();
            let ry = view.scale / lam2.sqrt();
            let cx = view.sx(rat_f64(&center[0]));
            let cy = view.sy(rat_f64(&center[1]));
            let angle = -theta.to_degrees();
            let exact_matrix = serde_json::Value::Array(
                matrix.iter().map(|row| jsonio::rat_vec_to_value(row)).collect(),
            );
            out.push_str(&format!(
                "  <ellipse class=\"body\" cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" \
                 transform=\"rotate({} {} {})\" data-center='{}' data-matrix='{}'/>\n",
                fmt(cx),
                fmt(cy),
                fmt(rx),
                fmt(ry),
                fmt(angle),
                fmt(cx),
                fmt(cy),
                jsonio::rat_vec_to_value(center),
                exact_matrix
            ));
        }
    }

    for cut in cuts {
        let a = cut.c[0].to_f64().unwrap_or(f64::NAN);
        let b = cut.c[1].to_f64().unwrap_or(f64::NAN);
        let rhs = cut.rhs.to_f64().unwrap_or(f64::NAN);
        if !(a.is_finite() && b.is_finite() && rhs.is_finite()) {
            continue;
        }
        if let Some(((x1, y1), (x2, y2))) = clip_line(&view, (a, b), rhs) {
            out.push_str(&format!(
                "  <line class=\"cut\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" data-c='{}' data-rhs='{}'/>\n",
                fmt(view.sx(x1)),
                fmt(view.sy(y1)),
                fmt(view.sx(x2)),
                fmt(view.sy(y2)),
                jsonio::int_vec_to_value(&cut.c),
                jsonio::int_to_value(&cut.rhs)
            ));
        }
    }

    match closure {
        Some(p) => {
            out.push_str(&vertex_element(&view, p.vertices(), "closure", "data-vertices"));
        }
        None => {
            out.push_str(&format!(
                "  <text class=\"annotation\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">closure empty</text>\n",
                fmt(CANVAS / 2.0),
                fmt(CANVAS / 2.0)
            ));
        }
    }

    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use cg_closure::cuts::cg_cut;
    use cg_closure::geometry::Polytope;
    use cg_closure::numeric::Int;

    use super::*;

    fn square15() -> ConvexBody {
        ConvexBody::from_json_str(
            r#"{"type":"polytope","field":1,
                "vertices":[["0","0"],["3/2","0"],["0","3/2"],["3/2","3/2"]]}"#,
        )
        .unwrap()
    }

    fn bound_one_cuts(body: &ConvexBody) -> Vec<CGCut> {
        let mut cuts = Vec::new();
        for a in -1..=1i64 {
            for b in -1..=1i64 {
                if (a, b) != (0, 0) {
                    cuts.push(cg_cut(body, &[Int::from(a), Int::from(b)]).unwrap());
                }
            }
        }
        cuts
    }

    #[test]
    fn the_shrunken_square_renders_one_body_eight_cuts_one_closure() {
        let body = square15();
        let cuts = bound_one_cuts(&body);
        let closure = Polytope::from_box(
            1,
            &[
                (QuadExt::integer(Int::from(0), 1), QuadExt::integer(Int::from(1), 1)),
                (QuadExt::integer(Int::from(0), 1), QuadExt::integer(Int::from(1), 1)),
            ],
        )
        .unwrap();
        let svg = plot2d(&body, &cuts, Some(&closure)).unwrap();
        assert_eq!(svg.matches("class=\"body\"").count(), 1);
        assert_eq!(svg.matches("class=\"cut\"").count(), 8);
        assert_eq!(svg.matches("class=\"closure\"").count(), 1);
        assert!(!svg.contains("closure empty"));
    }

    #[test]
    fn an_empty_closure_is_annotated() {
        let body = square15();
        let svg = plot2d(&body, &[], None).unwrap();
        assert_eq!(svg.matches("class=\"closure\"").count(), 0);
        assert!(svg.contains("closure empty"));
    }

    #[test]
    fn three_dimensional_bodies_are_rejected() {
        let cube = Polytope::from_box(
            1,
            &vec![
                (QuadExt::integer(Int::from(0), 1), QuadExt::integer(Int::from(1), 1));
                3
            ],
        )
        .unwrap();
        let body = ConvexBody::from_polytope(cube).unwrap();
        assert_eq!(plot2d(&body, &[], None), Err(PlotError::NotPlottable { dim: 3 }));
    }

    #[test]
    fn identical_inputs_render_identical_bytes() {
        let body = square15();
        let cuts = bound_one_cuts(&body);
        let first = plot2d(&body, &cuts, None).unwrap();
        let second = plot2d(&body, &cuts, None).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn balls_render_as_circles() {
        let body = ConvexBody::from_json_str(
            r#"{"type":"ball","center":["0","0"],"radius":"3/2"}"#,
        )
        .unwrap();
        let svg = plot2d(&body, &[], None).unwrap();
        assert!(svg.contains("<circle class=\"body\""));
    }
}
