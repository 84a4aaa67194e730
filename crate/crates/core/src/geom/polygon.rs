use serde::{Deserialize, Serialize};

use super::segment::{segment_intersect, Segment, SegmentIntersection};
use super::{Aabb, Point2, EPS_GEOM};
use crate::error::{Error, Result};

/// Classification of a point against a polygonal region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Inside,
    Outside,
    /// Within `EPS_GEOM` of an edge.
    Boundary,
}

impl Location {
    /// Inside or on the boundary.
    pub fn in_closure(self) -> bool {
        self != Location::Outside
    }
}

/// Shoelace area of a ring; positive when counter-clockwise.
pub fn ring_signed_area(ring: &[Point2]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let p = ring[i];
        let q = ring[(i + 1) % n];
        acc += p.cross(q);
    }
    0.5 * acc
}

pub fn ring_perimeter(ring: &[Point2]) -> f64 {
    ring_edges(ring).map(|s| s.length()).sum()
}

/// Edges of a closed ring (the closing edge included).
pub fn ring_edges(ring: &[Point2]) -> impl Iterator<Item = Segment> + '_ {
    let n = ring.len();
    (0..n).map(move |i| Segment::new(ring[i], ring[(i + 1) % n]))
}

/// Drop an explicit closing vertex and consecutive duplicates.
fn clean_ring(ring: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(ring.len());
    for &p in ring {
        if out.last().is_some_and(|q: &Point2| q.dist(p) <= EPS_GEOM) {
            continue;
        }
        out.push(p);
    }
    while out.len() > 1 && out[0].dist(out[out.len() - 1]) <= EPS_GEOM {
        out.pop();
    }
    out
}

fn check_ring(ring: &[Point2], what: &str) -> Result<()> {
    if ring.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidPolygon(format!("{what} has non-finite coordinates")));
    }
    if ring.len() < 3 {
        return Err(Error::InvalidPolygon(format!(
            "{what} needs at least 3 distinct vertices, got {}",
            ring.len()
        )));
    }
    if ring_signed_area(ring).abs() <= EPS_GEOM {
        return Err(Error::DegenerateGeometry(format!("{what} has zero area")));
    }
    let n = ring.len();
    let edges: Vec<Segment> = ring_edges(ring).collect();
    let boxes: Vec<Aabb> = edges.iter().map(|e| Aabb::from_points([&e.a, &e.b])).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if !boxes_touch(&boxes[i], &boxes[j]) {
                continue;
            }
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let hit = segment_intersect(&edges[i], &edges[j]);
            let bad = if adjacent {
                // Only the shared vertex may be common.
                matches!(hit, SegmentIntersection::Overlap { t, .. } if (t.1 - t.0) * edges[i].length() > EPS_GEOM)
            } else {
                hit.is_some()
            };
            if bad {
                return Err(Error::InvalidPolygon(format!(
                    "{what} is not simple: edges {i} and {j} intersect"
                )));
            }
        }
    }
    Ok(())
}

fn boxes_touch(a: &Aabb, b: &Aabb) -> bool {
    a.min.x <= b.max.x + EPS_GEOM
        && b.min.x <= a.max.x + EPS_GEOM
        && a.min.y <= b.max.y + EPS_GEOM
        && b.min.y <= a.max.y + EPS_GEOM
}

fn rings_cross(r1: &[Point2], r2: &[Point2]) -> bool {
    let b2 = Aabb::from_points(r2);
    for e1 in ring_edges(r1) {
        let bb1 = Aabb::from_points([&e1.a, &e1.b]);
        if !boxes_touch(&bb1, &b2) {
            continue;
        }
        for e2 in ring_edges(r2) {
            if segment_intersect(&e1, &e2).is_some() {
                return true;
            }
        }
    }
    false
}

/// Even-odd ray-cast parity of `p` against a set of rings.
fn even_odd<'a>(p: Point2, rings: impl Iterator<Item = &'a [Point2]>) -> bool {
    let mut inside = false;
    for ring in rings {
        let n = ring.len();
        let mut j = n - 1;
        for i in 0..n {
            let a = ring[j];
            let b = ring[i];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
            j = i;
        }
    }
    inside
}

/// Simple polygon with optional holes: CCW exterior, CW holes strictly inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    exterior: Vec<Point2>,
    holes: Vec<Vec<Point2>>,
}

impl Polygon {
    /// Validate and build a polygon. Ring orientation is normalized
    /// (exterior CCW, holes CW); a repeated closing vertex is accepted.
    pub fn new(exterior: Vec<Point2>, holes: Vec<Vec<Point2>>) -> Result<Self> {
        let mut exterior = clean_ring(&exterior);
        check_ring(&exterior, "exterior ring")?;
        if ring_signed_area(&exterior) < 0.0 {
            exterior.reverse();
        }
        let mut cleaned = Vec::with_capacity(holes.len());
        for (k, h) in holes.iter().enumerate() {
            let mut h = clean_ring(h);
            check_ring(&h, &format!("hole {k}"))?;
            if ring_signed_area(&h) > 0.0 {
                h.reverse();
            }
            if rings_cross(&exterior, &h) {
                return Err(Error::InvalidPolygon(format!("hole {k} touches the exterior ring")));
            }
            if !even_odd(h[0], std::iter::once(exterior.as_slice())) {
                return Err(Error::InvalidPolygon(format!("hole {k} lies outside the exterior ring")));
            }
            for (m, other) in cleaned.iter().enumerate() {
                let other: &Vec<Point2> = other;
                if rings_cross(other, &h)
                    || even_odd(h[0], std::iter::once(other.as_slice()))
                    || even_odd(other[0], std::iter::once(h.as_slice()))
                {
                    return Err(Error::InvalidPolygon(format!("holes {m} and {k} overlap")));
                }
            }
            cleaned.push(h);
        }
        Ok(Self {
            exterior,
            holes: cleaned,
        })
    }

    /// Build from rings produced by trusted boolean operations: orientation
    /// is normalized but simplicity is not re-checked.
    pub(crate) fn from_trusted(exterior: Vec<Point2>, holes: Vec<Vec<Point2>>) -> Option<Self> {
        let mut exterior = clean_ring(&exterior);
        if exterior.len() < 3 || ring_signed_area(&exterior).abs() <= EPS_GEOM {
            return None;
        }
        if ring_signed_area(&exterior) < 0.0 {
            exterior.reverse();
        }
        let holes = holes
            .into_iter()
            .filter_map(|h| {
                let mut h = clean_ring(&h);
                if h.len() < 3 || ring_signed_area(&h).abs() <= EPS_GEOM {
                    return None;
                }
                if ring_signed_area(&h) > 0.0 {
                    h.reverse();
                }
                Some(h)
            })
            .collect();
        Some(Self { exterior, holes })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(
            vec![
                Point2::new(x0, y0),
                Point2::new(x1, y0),
                Point2::new(x1, y1),
                Point2::new(x0, y1),
            ],
            vec![],
        )
    }

    pub fn exterior(&self) -> &[Point2] {
        &self.exterior
    }

    pub fn holes(&self) -> &[Vec<Point2>] {
        &self.holes
    }

    /// Exterior followed by holes.
    pub fn rings(&self) -> impl Iterator<Item = &[Point2]> + '_ {
        std::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        self.rings().flat_map(ring_edges)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Point2> + '_ {
        self.rings().flatten()
    }

    pub fn vertex_count(&self) -> usize {
        self.rings().map(|r| r.len()).sum()
    }

    /// Area with holes subtracted.
    pub fn area(&self) -> f64 {
        signed_area(self)
    }

    pub fn perimeter(&self) -> f64 {
        self.rings().map(ring_perimeter).sum()
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(&self.exterior)
    }

    /// Area centroid, holes accounted for.
    pub fn centroid(&self) -> Point2 {
        let mut a_sum = 0.0;
        let mut c = Point2::ORIGIN;
        for ring in self.rings() {
            let n = ring.len();
            let mut a = 0.0;
            let mut cx = 0.0;
            let mut cy = 0.0;
            for i in 0..n {
                let p = ring[i];
                let q = ring[(i + 1) % n];
                let cr = p.cross(q);
                a += cr;
                cx += (p.x + q.x) * cr;
                cy += (p.y + q.y) * cr;
            }
            a_sum += 0.5 * a;
            c = c + Point2::new(cx / 6.0, cy / 6.0);
        }
        c * (1.0 / a_sum)
    }

    pub fn locate(&self, p: Point2) -> Location {
        point_in_polygon(p, self)
    }

    /// Smallest distance from `p` to any edge.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.edges().map(|e| e.distance_to(p)).fold(f64::INFINITY, f64::min)
    }
}

/// Signed area: positive for a CCW exterior, hole areas subtracted.
pub fn signed_area(poly: &Polygon) -> f64 {
    // holes are CW so their signed areas are already negative
    poly.rings().map(ring_signed_area).sum()
}

/// Even-odd classification with a distinct `Boundary` state for points within
/// `EPS_GEOM` of an edge.
pub fn point_in_polygon(p: Point2, poly: &Polygon) -> Location {
    if poly.edges().any(|e| e.distance_to(p) <= EPS_GEOM) {
        return Location::Boundary;
    }
    if even_odd(p, poly.rings()) {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// A planar region made of disjoint polygons (each possibly with holes).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Region {
    components: Vec<Polygon>,
}

impl Region {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Components are reordered by descending area.
    pub fn new(mut components: Vec<Polygon>) -> Self {
        components.sort_by(|a, b| b.area().total_cmp(&a.area()));
        Self { components }
    }

    pub fn components(&self) -> &[Polygon] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.components.iter().map(Polygon::area).sum()
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point2]> + '_ {
        self.components.iter().flat_map(Polygon::rings)
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        self.rings().flat_map(ring_edges)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Point2> + '_ {
        self.rings().flatten()
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(self.vertices())
    }

    pub fn centroid(&self) -> Point2 {
        let mut a_sum = 0.0;
        let mut c = Point2::ORIGIN;
        for comp in &self.components {
            let a = comp.area();
            a_sum += a;
            c = c + comp.centroid() * a;
        }
        c * (1.0 / a_sum)
    }

    pub fn locate(&self, p: Point2) -> Location {
        if self.edges().any(|e| e.distance_to(p) <= EPS_GEOM) {
            return Location::Boundary;
        }
        if even_odd(p, self.rings()) {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// Index of the component whose closure contains `p`.
    pub fn component_of(&self, p: Point2) -> Option<usize> {
        self.components.iter().position(|c| c.locate(p).in_closure())
    }

    /// Closest point of the boundary to `p`.
    pub fn nearest_boundary_point(&self, p: Point2) -> Option<Point2> {
        self.edges()
            .map(|e| e.closest_point(p))
            .min_by(|a, b| a.dist(p).total_cmp(&b.dist(p)))
    }
}

impl From<Polygon> for Region {
    fn from(p: Polygon) -> Self {
        Region::new(vec![p])
    }
}
