use super::segment::{segment_intersect, Segment, SegmentIntersection};
use super::{Aabb, Location, Point2, Region, EPS_GEOM};

/// Uniform-grid index over the boundary edges of a [`Region`], answering
/// point classification and "does this segment stay in the closure" queries
/// without scanning every edge.
#[derive(Debug, Clone)]
pub struct BoundaryIndex {
    edges: Vec<Segment>,
    bbox: Aabb,
    origin: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl BoundaryIndex {
    pub fn new(region: &Region) -> Self {
        let edges: Vec<Segment> = region.edges().collect();
        let mut bbox = region.bbox();
        if bbox.is_empty() {
            bbox = Aabb {
                min: Point2::ORIGIN,
                max: Point2::ORIGIN,
            };
        }
        let span = bbox.width().max(bbox.height()).max(1e-6);
        let target = ((edges.len().max(1) * 2) as f64).sqrt().clamp(1.0, 400.0);
        let cell = span / target;
        let origin = Point2::new(bbox.min.x - cell * 0.5, bbox.min.y - cell * 0.5);
        let nx = ((bbox.width() + cell) / cell).ceil().max(1.0) as usize;
        let ny = ((bbox.height() + cell) / cell).ceil().max(1.0) as usize;
        let mut idx = Self {
            edges,
            bbox,
            origin,
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
        };
        let mut scratch = Vec::new();
        for (i, e) in idx.edges.iter().enumerate() {
            scratch.clear();
            idx.cells_along(e.a, e.b, EPS_GEOM * 4.0, &mut scratch);
            for &c in &scratch {
                idx.cells[c].push(i as u32);
            }
        }
        idx
    }

    pub fn edges(&self) -> &[Segment] {
        &self.edges
    }

    fn col(&self, x: f64) -> isize {
        ((x - self.origin.x) / self.cell).floor() as isize
    }

    fn row(&self, y: f64) -> isize {
        ((y - self.origin.y) / self.cell).floor() as isize
    }

    fn clamp_col(&self, c: isize) -> usize {
        c.clamp(0, self.nx as isize - 1) as usize
    }

    fn clamp_row(&self, r: isize) -> usize {
        r.clamp(0, self.ny as isize - 1) as usize
    }

    /// Cells touched by the segment `[a, b]` thickened by `pad`.
    fn cells_along(&self, a: Point2, b: Point2, pad: f64, out: &mut Vec<usize>) {
        let (xa, xb) = (a.x.min(b.x), a.x.max(b.x));
        let c0 = self.clamp_col(self.col(xa - pad));
        let c1 = self.clamp_col(self.col(xb + pad));
        let d = b - a;
        for c in c0..=c1 {
            let sx0 = self.origin.x + c as f64 * self.cell - pad;
            let sx1 = sx0 + self.cell + 2.0 * pad;
            // y-range of the segment within this column slab
            let (ylo, yhi) = if d.x.abs() < 1e-300 {
                (a.y.min(b.y), a.y.max(b.y))
            } else {
                let t0 = ((sx0 - a.x) / d.x).clamp(0.0, 1.0);
                let t1 = ((sx1 - a.x) / d.x).clamp(0.0, 1.0);
                let y0 = a.y + d.y * t0;
                let y1 = a.y + d.y * t1;
                (y0.min(y1), y0.max(y1))
            };
            let r0 = self.clamp_row(self.row(ylo - pad));
            let r1 = self.clamp_row(self.row(yhi + pad));
            for r in r0..=r1 {
                out.push(r * self.nx + c);
            }
        }
    }

    fn candidate_edges(&self, a: Point2, b: Point2, pad: f64) -> Vec<u32> {
        let mut cells = Vec::new();
        self.cells_along(a, b, pad, &mut cells);
        let mut ids: Vec<u32> = cells.iter().flat_map(|&c| self.cells[c].iter().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    fn outside_bbox(&self, p: Point2) -> bool {
        p.x < self.bbox.min.x - EPS_GEOM
            || p.x > self.bbox.max.x + EPS_GEOM
            || p.y < self.bbox.min.y - EPS_GEOM
            || p.y > self.bbox.max.y + EPS_GEOM
    }

    /// Same classification as [`Region::locate`].
    pub fn locate(&self, p: Point2) -> Location {
        if self.edges.is_empty() || self.outside_bbox(p) {
            return Location::Outside;
        }
        for id in self.candidate_edges(p, p, EPS_GEOM * 2.0) {
            if self.edges[id as usize].distance_to(p) <= EPS_GEOM {
                return Location::Boundary;
            }
        }
        // Ray towards +x: only edges in the cells of this row to the right.
        let r = self.clamp_row(self.row(p.y));
        let c0 = self.clamp_col(self.col(p.x));
        let mut ids: Vec<u32> = (c0..self.nx)
            .flat_map(|c| self.cells[r * self.nx + c].iter().copied())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        let mut inside = false;
        for id in ids {
            let e = &self.edges[id as usize];
            let (a, b) = (e.a, e.b);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        if inside {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// True when every point of `[p, q]` lies in the closure of the region.
    ///
    /// Transversal crossings of a boundary edge reject immediately; touches
    /// at vertices and collinear overlaps split the segment into pieces whose
    /// midpoints are classified individually.
    pub fn segment_inside(&self, p: Point2, q: Point2) -> bool {
        if !self.locate(p).in_closure() || !self.locate(q).in_closure() {
            return false;
        }
        self.segment_inside_unchecked(p, q)
    }

    /// As [`segment_inside`](Self::segment_inside) but assumes both endpoints
    /// are already known to lie in the closure.
    pub fn segment_inside_unchecked(&self, p: Point2, q: Point2) -> bool {
        let seg = Segment::new(p, q);
        let len = seg.length();
        if len <= EPS_GEOM {
            return true;
        }
        let et = EPS_GEOM / len;
        let mut breaks: Vec<f64> = vec![0.0, 1.0];
        for id in self.candidate_edges(p, q, EPS_GEOM * 2.0) {
            let e = &self.edges[id as usize];
            match segment_intersect(&seg, e) {
                SegmentIntersection::Point { t, s, .. } => {
                    let es = EPS_GEOM / e.length();
                    let interior_t = t > et && t < 1.0 - et;
                    let interior_s = s > es && s < 1.0 - es;
                    if interior_t && interior_s {
                        return false;
                    }
                    if interior_t {
                        breaks.push(t);
                    }
                }
                SegmentIntersection::Overlap { t, .. } => {
                    breaks.push(t.0);
                    breaks.push(t.1);
                }
                SegmentIntersection::None | SegmentIntersection::Parallel => {}
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= et);
        breaks
            .windows(2)
            .all(|w| self.locate(seg.at(0.5 * (w[0] + w[1]))).in_closure())
    }
}
