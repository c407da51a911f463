//! Static SVG drawings of planar polytopes.

use std::fmt::Write;

use polyinv_core::{Error, Polytope, Result, SampleSet};

const STROKES: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const CANVAS: f64 = 600.0;

/// Overlays `polytopes` in the given order (first at the bottom) with the
/// unit circle and, optionally, the sample points `x` (grey) and `y` (black).
pub fn render_svg(polytopes: &[Polytope], samples: Option<&SampleSet>) -> Result<String> {
    if polytopes.is_empty() {
        return Err(Error::Argument("nothing to render".into()));
    }
    if let Some(p) = polytopes.iter().find(|p| p.dim() != 2) {
        return Err(Error::Argument(format!(
            "render draws planar sets only; got a polytope of dimension {}",
            p.dim()
        )));
    }
    if let Some(s) = samples.filter(|s| s.dim() != 2) {
        return Err(Error::Argument(format!(
            "render draws planar sets only; got samples of dimension {}",
            s.dim()
        )));
    }

    let mut reach: f64 = 1.0;
    for p in polytopes {
        for v in p.vertices() {
            reach = reach.max(v[0].abs()).max(v[1].abs());
        }
    }
    if let Some(s) = samples {
        for pair in s.pairs() {
            reach = reach.max(pair.y[0].abs()).max(pair.y[1].abs());
        }
    }
    let half = 1.05 * reach;
    let unit = CANVAS / (2.0 * half);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CANVAS}" height="{CANVAS}" viewBox="{} {} {} {}">"#,
        fmt(-half),
        fmt(-half),
        fmt(2.0 * half),
        fmt(2.0 * half)
    );
    let _ = writeln!(svg, r#"<g transform="scale(1,-1)" stroke-width="{}">"#, fmt(1.5 / unit));
    for (i, p) in polytopes.iter().enumerate() {
        let color = STROKES[i % STROKES.len()];
        let path = ordered_boundary(p)
            .iter()
            .enumerate()
            .map(|(k, v)| format!("{}{} {}", if k == 0 { "M" } else { "L" }, fmt(v[0]), fmt(v[1])))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r#"<path d="{path} Z" fill="{color}" fill-opacity="0.15" stroke="{color}"/>"#
        );
    }
    let _ = writeln!(
        svg,
        r##"<circle cx="0" cy="0" r="1" fill="none" stroke="#555555" stroke-dasharray="{} {}"/>"##,
        fmt(4.0 / unit),
        fmt(3.0 / unit)
    );
    if let Some(s) = samples {
        let r = fmt(1.5 / unit);
        for pair in s.pairs() {
            let _ = writeln!(svg, r##"<circle cx="{}" cy="{}" r="{r}" fill="#999999"/>"##, fmt(pair.x[0]), fmt(pair.x[1]));
            let _ = writeln!(svg, r##"<circle cx="{}" cy="{}" r="{r}" fill="#000000"/>"##, fmt(pair.y[0]), fmt(pair.y[1]));
        }
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

/// Vertices in counter-clockwise order; the origin is interior.
fn ordered_boundary(p: &Polytope) -> Vec<Vec<f64>> {
    let mut vs = p.vertices().to_vec();
    vs.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    vs
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}
