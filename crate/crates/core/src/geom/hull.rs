use super::{Point2, Polygon};
use crate::error::{Error, Result};

/// Convex hull by Andrew's monotone chain.
///
/// The result is strictly convex (collinear boundary points dropped), CCW,
/// and its vertices are a subset of the input.
pub fn convex_hull(points: &[Point2]) -> Result<Polygon> {
    let ring = hull_ring(points)?;
    Ok(Polygon::from_trusted(ring, vec![]).expect("hull of non-collinear points has area"))
}

/// Hull vertices in CCW order, starting from the lowest-x (then lowest-y) point.
pub fn hull_ring(points: &[Point2]) -> Result<Vec<Point2>> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateGeometry("non-finite point".into()));
    }
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "convex hull needs 3 distinct points, got {}",
            pts.len()
        )));
    }

    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateGeometry("all points are collinear".into()));
    }
    Ok(lower)
}
