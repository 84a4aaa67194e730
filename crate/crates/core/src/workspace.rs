//! Buffered feasible space: the region of interest eroded by the headland
//! width, minus every obstacle dilated by the same width.
//!
//! Offsets are exact Minkowski operations with a polygonal disk `K`: a
//! regular polygon circumscribing the true disk of radius `h`, with edge
//! normals on the coordinate axes. Because `K` contains the disk, dilations
//! cover everything within `h` and erosions stay at least `h` away from the
//! boundary; the excess is bounded by [`arc_tolerance`]. Boolean operations
//! on the resulting polygons are delegated to `geo`.

use geo::{BooleanOps, Coord, LineString, MultiPolygon};

use crate::error::{Error, Result, WorkspaceStep};
use crate::geom::{hull_ring, ring_edges, Point2, Polygon, Region};

// Boolean ops snap to an integer grid scaled to the operands' extent, so
// output vertices carry a relative error near 2^-31 of that extent.

/// Drop boolean-op slivers smaller than this (square meters).
const MIN_COMPONENT_AREA: f64 = 1e-6;

/// Maximum radial excess of the polygonal disk over the true disk.
pub fn arc_tolerance(h: f64) -> f64 {
    (h / 50.0).min(0.01)
}

/// Number of sides of the polygonal disk used for radius `h`: the smallest
/// multiple of four whose circumscribed excess `h (sec(pi/n) - 1)` stays
/// within [`arc_tolerance`].
pub fn disk_sides(h: f64) -> usize {
    if h <= 0.0 {
        return 4;
    }
    let ratio = 1.0 / (1.0 + arc_tolerance(h) / h);
    let n = (std::f64::consts::PI / ratio.acos()).ceil() as usize;
    n.div_ceil(4).max(2) * 4
}

/// Radial excess actually realized for radius `h`.
pub fn disk_excess(h: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    let n = disk_sides(h) as f64;
    h * (1.0 / (std::f64::consts::PI / n).cos() - 1.0)
}

/// Vertices of the circumscribed polygonal disk of radius `h` centered at `c`.
fn disk_vertices(c: Point2, h: f64) -> Vec<Point2> {
    let n = disk_sides(h);
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let r = h / (0.5 * step).cos();
    (0..n)
        .map(|k| c + Point2::from_angle((k as f64 + 0.5) * step) * r)
        .collect()
}

/// Minkowski sum of the segment `[a, b]` with the polygonal disk.
fn capsule(a: Point2, b: Point2, h: f64) -> geo::Polygon<f64> {
    let mut pts = disk_vertices(a, h);
    pts.extend(disk_vertices(b, h));
    let ring = hull_ring(&pts).expect("a capsule has positive area");
    geo::Polygon::new(ring_to_geo(&ring), vec![])
}

fn ring_to_geo(ring: &[Point2]) -> LineString<f64> {
    let mut coords: Vec<Coord<f64>> = ring.iter().map(|p| Coord { x: p.x, y: p.y }).collect();
    if let Some(&first) = coords.first() {
        coords.push(first);
    }
    LineString::new(coords)
}

fn ring_from_geo(ls: &LineString<f64>) -> Vec<Point2> {
    ls.0.iter().map(|c| Point2::new(c.x, c.y)).collect()
}

pub(crate) fn to_geo(poly: &Polygon) -> geo::Polygon<f64> {
    geo::Polygon::new(
        ring_to_geo(poly.exterior()),
        poly.holes().iter().map(|h| ring_to_geo(h)).collect(),
    )
}

fn region_to_geo(region: &Region) -> MultiPolygon<f64> {
    MultiPolygon::new(region.components().iter().map(to_geo).collect())
}

fn region_from_geo(mp: &MultiPolygon<f64>) -> Region {
    let comps = mp
        .0
        .iter()
        .filter_map(|p| {
            Polygon::from_trusted(
                ring_from_geo(p.exterior()),
                p.interiors().iter().map(ring_from_geo).collect(),
            )
        })
        .filter(|p| p.area() > MIN_COMPONENT_AREA)
        .collect();
    Region::new(comps)
}

/// Union of capsules around every boundary edge of `poly`.
fn boundary_band(poly: &Polygon, h: f64) -> MultiPolygon<f64> {
    let caps: Vec<geo::Polygon<f64>> = poly
        .rings()
        .flat_map(ring_edges)
        .map(|e| capsule(e.a, e.b, h))
        .collect();
    geo::unary_union(&caps)
}

/// Erosion `poly ⊖ B_h`: points at distance at least `h` from the complement.
///
/// May be empty or split into several components.
pub fn offset_inward(poly: &Polygon, h: f64) -> Region {
    if h <= 0.0 {
        return Region::from(poly.clone());
    }
    let band = boundary_band(poly, h);
    region_from_geo(&to_geo(poly).difference(&band))
}

/// Dilation `poly ⊕ B_h` with polygonal corner arcs.
pub fn offset_outward(poly: &Polygon, h: f64) -> Polygon {
    if h <= 0.0 {
        return poly.clone();
    }
    let band = boundary_band(poly, h);
    let grown = region_from_geo(&MultiPolygon::new(vec![to_geo(poly)]).union(&band));
    // dilating a connected polygon yields one component
    grown
        .components()
        .first()
        .cloned()
        .expect("dilation of a nonempty polygon is nonempty")
}

/// Region of interest, exclusion zones, and the derived feasible space.
#[derive(Debug, Clone)]
pub struct Workspace {
    roi: Polygon,
    obstacles: Vec<Polygon>,
    headland: f64,
    buffer_scale: Option<f64>,
    eroded_roi: Region,
    inflated_obstacles: Vec<Polygon>,
    feasible: Region,
}

impl Workspace {
    /// Feasible space for headland width `h`:
    /// `(roi ⊖ B_h) \ ⋃ ((o ∩ roi) ⊕ B_h)`.
    pub fn build_feasible(roi: Polygon, obstacles: Vec<Polygon>, h: f64) -> Result<Workspace> {
        if !(h >= 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("headland width must be >= 0, got {h}")));
        }
        let eroded_roi = offset_inward(&roi, h);
        if eroded_roi.is_empty() {
            return Err(Error::InfeasibleWorkspace {
                step: WorkspaceStep::RoiErosion,
            });
        }

        let roi_geo = to_geo(&roi);
        let mut inflated = Vec::new();
        for o in &obstacles {
            let clipped = region_from_geo(&to_geo(o).intersection(&roi_geo));
            for part in clipped.components() {
                inflated.push(offset_outward(part, h));
            }
        }

        let feasible = if inflated.is_empty() {
            eroded_roi.clone()
        } else {
            let geo_inflated: Vec<geo::Polygon<f64>> = inflated.iter().map(to_geo).collect();
            let blocked = geo::unary_union(&geo_inflated);
            region_from_geo(&region_to_geo(&eroded_roi).difference(&blocked))
        };
        if feasible.is_empty() {
            return Err(Error::InfeasibleWorkspace {
                step: WorkspaceStep::ObstacleRemoval,
            });
        }
        Ok(Workspace {
            roi,
            obstacles,
            headland: h,
            buffer_scale: None,
            eroded_roi,
            inflated_obstacles: inflated,
            feasible,
        })
    }

    /// Headland expressed as a multiple of the swath width: `h = scale * w`.
    pub fn with_buffer_scale(roi: Polygon, obstacles: Vec<Polygon>, swath_width: f64, scale: f64) -> Result<Workspace> {
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!("buffer scale must be >= 0, got {scale}")));
        }
        let mut ws = Self::build_feasible(roi, obstacles, scale * swath_width)?;
        ws.buffer_scale = Some(scale);
        Ok(ws)
    }

    pub fn roi(&self) -> &Polygon {
        &self.roi
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub fn headland(&self) -> f64 {
        self.headland
    }

    pub fn buffer_scale(&self) -> Option<f64> {
        self.buffer_scale
    }

    /// `roi ⊖ B_h` before obstacles are removed.
    pub fn eroded_roi(&self) -> &Region {
        &self.eroded_roi
    }

    /// Obstacles clipped to the ROI and dilated by the headland.
    pub fn inflated_obstacles(&self) -> &[Polygon] {
        &self.inflated_obstacles
    }

    /// The feasible space, components by descending area.
    pub fn feasible(&self) -> &Region {
        &self.feasible
    }
}
