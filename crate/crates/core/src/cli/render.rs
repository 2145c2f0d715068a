//! Deterministic SVG pictures of (image) tessellations.

use std::fmt::Write as _;

use crate::geom::{disk_point, BoundaryPoint};

fn coord(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Path data for the geodesic between two points of the unit circle, given in
/// standard (y up) coordinates; the output is in SVG (y down) coordinates.
fn disk_geodesic(p: (f64, f64), q: (f64, f64)) -> String {
    let (x1, y1, x2, y2) = (p.0, -p.1, q.0, -q.1);
    let dot = p.0 * q.0 + p.1 * q.1;
    if 1.0 + dot < 1e-9 {
        return format!("M {} {} L {} {}", coord(x1), coord(y1), coord(x2), coord(y2));
    }
    let cx = (p.0 + q.0) / (1.0 + dot);
    let cy = (p.1 + q.1) / (1.0 + dot);
    let r = (cx * cx + cy * cy - 1.0).max(0.0).sqrt();
    let cross = p.0 * q.1 - p.1 * q.0;
    let sweep = if cross > 0.0 { 0 } else { 1 };
    format!(
        "M {} {} A {} {} 0 0 {} {} {}",
        coord(x1),
        coord(y1),
        coord(r),
        coord(r),
        sweep,
        coord(x2),
        coord(y2)
    )
}

const HEADER_DISK: &str = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.05 -1.05 2.1 2.1\" width=\"800\" height=\"800\">\n";
const HALF_TOP: f64 = 6.0;
const HEADER_HALF: &str = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-6 -6 12 6.5\" width=\"960\" height=\"520\">\n";

/// Geodesics between the given pairs of boundary points, drawn in the disk
/// after the fixed change of model.
pub fn render_disk(edges: &[(BoundaryPoint, BoundaryPoint)]) -> String {
    let mut out = String::from(HEADER_DISK);
    out.push_str("<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.004\"/>\n");
    out.push_str("<g fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"0.002\">\n");
    for (a, b) in edges {
        let _ = writeln!(out, "<path d=\"{}\"/>", disk_geodesic(disk_point(a), disk_point(b)));
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Geodesics in the upper half-plane: semicircles and verticals to `∞`.
pub fn render_halfplane(edges: &[(BoundaryPoint, BoundaryPoint)]) -> String {
    let mut out = String::from(HEADER_HALF);
    out.push_str("<line x1=\"-6\" y1=\"0\" x2=\"6\" y2=\"0\" stroke=\"#000000\" stroke-width=\"0.01\"/>\n");
    out.push_str("<g fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"0.006\">\n");
    for (a, b) in edges {
        let d = match (a, b) {
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(x)) | (BoundaryPoint::Finite(x), BoundaryPoint::Infinity) => {
                let x = coord(x.to_f64());
                format!("M {x} 0.000000 L {x} {}", coord(-HALF_TOP))
            }
            (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) => {
                let (l, r) = {
                    let (x, y) = (x.to_f64(), y.to_f64());
                    if x < y {
                        (x, y)
                    } else {
                        (y, x)
                    }
                };
                let rad = coord((r - l) / 2.0);
                format!("M {} 0.000000 A {rad} {rad} 0 0 1 {} 0.000000", coord(l), coord(r))
            }
            _ => continue,
        };
        let _ = writeln!(out, "<path d=\"{d}\"/>");
    }
    out.push_str("</g>\n</svg>\n");
    out
}
