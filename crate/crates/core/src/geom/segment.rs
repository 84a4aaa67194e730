use super::{Point2, EPS_GEOM};

/// Closed line segment `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn dir(&self) -> Point2 {
        self.b - self.a
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn at(&self, t: f64) -> Point2 {
        self.a.lerp(self.b, t)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }

    /// Parameter of the point on the segment closest to `p`, clamped to `[0, 1]`.
    pub fn project_param(&self, p: Point2) -> f64 {
        let d = self.dir();
        let l2 = d.norm_sq();
        if l2 == 0.0 {
            return 0.0;
        }
        ((p - self.a).dot(d) / l2).clamp(0.0, 1.0)
    }

    pub fn closest_point(&self, p: Point2) -> Point2 {
        self.at(self.project_param(p))
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        self.closest_point(p).dist(p)
    }
}

/// Result of intersecting two closed segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentIntersection {
    /// Non-parallel segments that do not meet.
    None,
    /// Parallel segments with no common point (disjoint or on distinct lines).
    Parallel,
    /// A single crossing at `s1(t) = s2(s)`.
    Point { t: f64, s: f64, point: Point2 },
    /// Collinear overlap; `t` and `s` hold the overlap endpoints on each segment.
    Overlap {
        t: (f64, f64),
        s: (f64, f64),
        points: (Point2, Point2),
    },
}

impl SegmentIntersection {
    pub fn is_some(&self) -> bool {
        matches!(self, Self::Point { .. } | Self::Overlap { .. })
    }
}

/// Intersect two segments using the parametric cross-product form
/// `t = (a2 - a1) x d2 / (d1 x d2)`, `s = (a2 - a1) x d1 / (d1 x d2)`.
///
/// Parameters within `EPS_GEOM` (in meters) of the segment ends are accepted
/// and clamped to `[0, 1]`.
pub fn segment_intersect(s1: &Segment, s2: &Segment) -> SegmentIntersection {
    let d1 = s1.dir();
    let d2 = s2.dir();
    let l1 = d1.norm();
    let l2 = d2.norm();
    if l1 == 0.0 || l2 == 0.0 {
        return SegmentIntersection::None;
    }
    let et = EPS_GEOM / l1;
    let es = EPS_GEOM / l2;
    let denom = d1.cross(d2);
    let w = s2.a - s1.a;
    // Collinear when one segment lies within EPS_GEOM of the other's line.
    // Judged by distance rather than angle: a chord between two points of a
    // long edge can differ from it in direction by more than any fixed
    // angular tolerance after rounding.
    let near1 = |p: Point2| ((p - s1.a).cross(d1) / l1).abs() <= EPS_GEOM;
    let near2 = |p: Point2| ((p - s2.a).cross(d2) / l2).abs() <= EPS_GEOM;
    let collinear = (near1(s2.a) && near1(s2.b)) || (near2(s1.a) && near2(s1.b));

    if !collinear && denom.abs() > 1e-14 * l1 * l2 {
        let t = w.cross(d2) / denom;
        let s = w.cross(d1) / denom;
        if t < -et || t > 1.0 + et || s < -es || s > 1.0 + es {
            return SegmentIntersection::None;
        }
        let t = t.clamp(0.0, 1.0);
        let s = s.clamp(0.0, 1.0);
        let p1 = s1.at(t);
        let p2 = s2.at(s);
        let point = Point2::new(0.5 * (p1.x + p2.x), 0.5 * (p1.y + p2.y));
        return SegmentIntersection::Point { t, s, point };
    }

    if !collinear {
        return SegmentIntersection::Parallel;
    }
    let inv = 1.0 / (l1 * l1);
    let ta = w.dot(d1) * inv;
    let tb = (s2.b - s1.a).dot(d1) * inv;
    let lo = ta.min(tb).max(0.0);
    let hi = ta.max(tb).min(1.0);
    if lo > hi + et {
        return SegmentIntersection::Parallel;
    }
    let hi = hi.max(lo);
    let p_lo = s1.at(lo);
    let p_hi = s1.at(hi);
    let proj = |p: Point2| ((p - s2.a).dot(d2) / (l2 * l2)).clamp(0.0, 1.0);
    SegmentIntersection::Overlap {
        t: (lo, hi),
        s: (proj(p_lo), proj(p_hi)),
        points: (p_lo, p_hi),
    }
}
