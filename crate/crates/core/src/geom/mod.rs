//! Planar primitives shared by every planning stage.

mod hull;
mod index;
mod point;
mod polygon;
mod segment;
mod transform;

pub use hull::{convex_hull, hull_ring};
pub use index::BoundaryIndex;
pub use point::{Aabb, Point2};
pub use polygon::{
    point_in_polygon, ring_edges, ring_perimeter, ring_signed_area, signed_area, Location, Polygon, Region,
};
pub use segment::{segment_intersect, Segment, SegmentIntersection};
pub use transform::{apply_transform, normalize_angle, RigidTransform};

/// Absolute tolerance (meters) for point/edge coincidence.
pub const EPS_GEOM: f64 = 1e-9;
