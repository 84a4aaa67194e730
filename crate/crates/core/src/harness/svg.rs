use std::fmt::Write as _;

use crate::geom::{Aabb, Point2, Polygon};
use crate::routing::CoveragePlan;
use crate::workspace::Workspace;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

/// Margin added on every side of the ROI bounding box: 5% of its larger extent.
pub fn svg_margin(bbox: &Aabb) -> f64 {
    0.05 * bbox.width().max(bbox.height())
}

fn ring_path(out: &mut String, ring: &[Point2]) {
    for (i, p) in ring.iter().enumerate() {
        let _ = write!(out, "{}{:.3} {:.3} ", if i == 0 { "M" } else { "L" }, p.x, -p.y);
    }
    out.push('Z');
}

fn polygon_path(p: &Polygon) -> String {
    let mut d = String::new();
    for ring in p.rings() {
        ring_path(&mut d, ring);
        d.push(' ');
    }
    d.trim_end().to_string()
}

/// Largest 1/2/5 x 10^k not above `x`.
fn nice_length(x: f64) -> f64 {
    let e = 10f64.powf(x.log10().floor());
    [5.0, 2.0, 1.0].into_iter().map(|m| m * e).find(|&v| v <= x).unwrap_or(e)
}

/// Region of interest, shaded exclusion zones, feasible-space boundary,
/// one colored polyline per robot, legend and scale bar. The y axis is
/// flipped so north is up; the view box is the ROI bounding box plus
/// [`svg_margin`].
pub fn render_svg(ws: &Workspace, plans: &[CoveragePlan]) -> String {
    let bb = ws.roi().bbox();
    let m = svg_margin(&bb);
    let (x0, y0) = (bb.min.x - m, -bb.max.y - m);
    let (w, h) = (bb.width() + 2.0 * m, bb.height() + 2.0 * m);
    let ext = w.max(h);
    let stroke = ext / 400.0;
    let font = ext / 40.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.3} {y0:.3} {w:.3} {h:.3}" width="800" height="{:.0}">"#,
        800.0 * h / w
    );
    let _ = writeln!(s, r#"<rect x="{x0:.3}" y="{y0:.3}" width="{w:.3}" height="{h:.3}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<path id="roi" d="{}" fill="#f4f1e8" stroke="#333333" stroke-width="{:.3}" fill-rule="evenodd"/>"##,
        polygon_path(ws.roi()),
        stroke
    );
    for (i, o) in ws.obstacles().iter().enumerate() {
        let _ = writeln!(
            s,
            r##"<path id="nfz{i}" d="{}" fill="#999999" fill-opacity="0.6" stroke="#555555" stroke-width="{:.3}" fill-rule="evenodd"/>"##,
            polygon_path(o),
            stroke
        );
    }
    for (i, c) in ws.feasible().components().iter().enumerate() {
        let _ = writeln!(
            s,
            r##"<path id="feasible{i}" d="{}" fill="none" stroke="#2b8a3e" stroke-width="{:.3}" stroke-dasharray="{:.3}" fill-rule="evenodd"/>"##,
            polygon_path(c),
            stroke,
            4.0 * stroke
        );
    }
    for plan in plans {
        let color = PALETTE[plan.robot_id % PALETTE.len()];
        let pts: Vec<String> = plan.waypoints.iter().map(|p| format!("{:.3},{:.3}", p.x, -p.y)).collect();
        let _ = writeln!(
            s,
            r#"<polyline id="robot{}" points="{}" fill="none" stroke="{color}" stroke-width="{:.3}" stroke-linejoin="round"/>"#,
            plan.robot_id,
            pts.join(" "),
            1.5 * stroke
        );
    }

    // legend, top left inside the margin
    let _ = writeln!(s, r#"<g id="legend" font-family="sans-serif" font-size="{font:.3}">"#);
    for (k, plan) in plans.iter().enumerate() {
        let color = PALETTE[plan.robot_id % PALETTE.len()];
        let y = y0 + m * 0.5 + (k as f64 + 1.0) * font * 1.2;
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="{:.3}"/><text x="{:.3}" y="{:.3}">robot {}</text>"#,
            x0 + m * 0.3,
            y - font * 0.35,
            x0 + m * 0.3 + font * 1.5,
            y - font * 0.35,
            2.0 * stroke,
            x0 + m * 0.3 + font * 2.0,
            y,
            plan.robot_id
        );
    }
    let _ = writeln!(s, "</g>");

    // scale bar, bottom left
    let len = nice_length(bb.width() / 5.0);
    let (sx, sy) = (x0 + m * 0.3, y0 + h - m * 0.35);
    let _ = writeln!(
        s,
        r#"<g id="scale" font-family="sans-serif" font-size="{font:.3}"><line x1="{sx:.3}" y1="{sy:.3}" x2="{:.3}" y2="{sy:.3}" stroke="black" stroke-width="{:.3}"/><text x="{sx:.3}" y="{:.3}">{} m</text></g>"#,
        sx + len,
        2.0 * stroke,
        sy - font * 0.4,
        len
    );
    s.push_str("</svg>\n");
    s
}
