//! Sweep-frame selection.
//!
//! Every strategy returns a [`SweepFrame`]: the sweep axis `u` along which
//! swaths run, its normal `v = perp(u)`, and the extents of the region in
//! that frame. Frame angles live in `[0, pi)` because `u` and `-u` describe
//! the same sweep; PCA is the exception and keeps `u.x >= 0`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{hull_ring, Point2, Polygon};

/// Default angle-search step (1 degree).
pub const DEFAULT_SCAN_STEP: f64 = PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepFrame {
    /// Sweep (major) axis.
    pub u: Point2,
    /// Normal (minor) axis, `u` rotated by +pi/2.
    pub v: Point2,
    /// Extent along `u`.
    pub width: f64,
    /// Extent along `v`.
    pub height: f64,
    /// Minimum projection onto `u`.
    pub u_min: f64,
    /// Minimum projection onto `v`.
    pub v_min: f64,
    /// Angle of `u` from the +x axis.
    pub angle: f64,
    /// Set when PCA could not pick an axis and fell back to the minimum-area rectangle.
    pub fallback: bool,
}

impl SweepFrame {
    /// Frame with sweep axis at `angle`, extents measured over `points`.
    pub fn at_angle(points: &[Point2], angle: f64) -> SweepFrame {
        let u = Point2::from_angle(angle);
        let v = u.perp();
        let (mut umin, mut umax, mut vmin, mut vmax) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            let pu = p.dot(u);
            let pv = p.dot(v);
            umin = umin.min(pu);
            umax = umax.max(pu);
            vmin = vmin.min(pv);
            vmax = vmax.max(pv);
        }
        SweepFrame {
            u,
            v,
            width: umax - umin,
            height: vmax - vmin,
            u_min: umin,
            v_min: vmin,
            angle,
            fallback: false,
        }
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Coordinates of `p` in this frame: `(p.u, p.v)`.
    pub fn to_frame(&self, p: Point2) -> Point2 {
        Point2::new(p.dot(self.u), p.dot(self.v))
    }

    pub fn from_frame(&self, q: Point2) -> Point2 {
        self.u * q.x + self.v * q.y
    }

    /// The four rectangle corners in world coordinates, CCW.
    pub fn corners(&self) -> [Point2; 4] {
        let (u0, v0) = (self.u_min, self.v_min);
        let (u1, v1) = (u0 + self.width, v0 + self.height);
        [
            self.from_frame(Point2::new(u0, v0)),
            self.from_frame(Point2::new(u1, v0)),
            self.from_frame(Point2::new(u1, v1)),
            self.from_frame(Point2::new(u0, v1)),
        ]
    }
}

/// Fold a direction angle into `[0, pi)`.
pub fn fold_angle(theta: f64) -> f64 {
    let a = theta.rem_euclid(PI);
    if PI - a < 1e-13 {
        0.0
    } else {
        a
    }
}

fn direction_angle(d: Point2) -> f64 {
    fold_angle(d.y.atan2(d.x))
}

/// Relative tolerance used for tie-breaking between equal objective values.
const TIE_TOL: f64 = 1e-9;

fn better(candidate: f64, cand_angle: f64, best: f64, best_angle: f64, scale: f64) -> bool {
    let tol = TIE_TOL * scale.max(1e-300);
    candidate < best - tol || (candidate <= best + tol && cand_angle < best_angle)
}

/// Minimum-area enclosing rectangle by rotating calipers over the convex hull.
///
/// One rectangle side is flush with a hull edge; `u` is the longer side.
pub fn min_area_rect(poly: &Polygon) -> Result<SweepFrame> {
    let hull = hull_ring(poly.exterior())?;
    let n = hull.len();
    let edge = |i: usize| (hull[(i + 1) % n] - hull[i]).normalized().expect("hull edges are nondegenerate");

    // caliper pointers: max along e, max along normal, min along e
    let e0 = edge(0);
    let argext = |f: &dyn Fn(Point2) -> f64| {
        (0..n).max_by(|&a, &b| f(hull[a]).total_cmp(&f(hull[b]))).unwrap()
    };
    let mut right = argext(&|p| p.dot(e0));
    let mut top = argext(&|p| p.dot(e0.perp()));
    let mut left = argext(&|p| -p.dot(e0));

    let scale = {
        let f = SweepFrame::at_angle(&hull, 0.0);
        f.width.max(f.height).powi(2)
    };
    let mut best: Option<(f64, f64)> = None; // (area, angle)
    for i in 0..n {
        let e = edge(i);
        let nrm = e.perp();
        let tol = 1e-12 * scale.sqrt();
        let mut guard = 0;
        while hull[(right + 1) % n].dot(e) > hull[right].dot(e) + tol && guard < n {
            right = (right + 1) % n;
            guard += 1;
        }
        guard = 0;
        while hull[(top + 1) % n].dot(nrm) > hull[top].dot(nrm) + tol && guard < n {
            top = (top + 1) % n;
            guard += 1;
        }
        guard = 0;
        while hull[(left + 1) % n].dot(e) < hull[left].dot(e) - tol && guard < n {
            left = (left + 1) % n;
            guard += 1;
        }
        let along = hull[right].dot(e) - hull[left].dot(e);
        let across = hull[top].dot(nrm) - hull[i].dot(nrm);
        let area = along * across;
        let major = if along >= across { e } else { nrm };
        let angle = direction_angle(major);
        let take = match best {
            None => true,
            Some((ba, bang)) => better(area, angle, ba, bang, scale),
        };
        if take {
            best = Some((area, angle));
        }
    }
    let (_, angle) = best.expect("hull has edges");
    Ok(SweepFrame::at_angle(&hull, angle))
}

/// Orientation minimizing the extent along `v` (the region's width measured
/// across the sweep), via rotating calipers over hull edge / antipodal
/// vertex pairs.
pub fn orientation_min_width(poly: &Polygon) -> Result<SweepFrame> {
    let hull = hull_ring(poly.exterior())?;
    let n = hull.len();
    let scale = SweepFrame::at_angle(&hull, 0.0).width.max(1e-300);
    let mut best: Option<(f64, f64)> = None;
    let mut top = 0usize;
    for i in 0..n {
        let e = (hull[(i + 1) % n] - hull[i]).normalized().expect("nondegenerate hull edge");
        let nrm = e.perp();
        if i == 0 {
            top = (0..n).max_by(|&a, &b| hull[a].dot(nrm).total_cmp(&hull[b].dot(nrm))).unwrap();
        }
        while hull[(top + 1) % n].dot(nrm) > hull[top].dot(nrm) {
            top = (top + 1) % n;
        }
        let width = hull[top].dot(nrm) - hull[i].dot(nrm);
        let angle = direction_angle(e);
        let take = match best {
            None => true,
            Some((bw, ba)) => better(width, angle, bw, ba, scale),
        };
        if take {
            best = Some((width, angle));
        }
    }
    let (_, angle) = best.expect("hull has edges");
    Ok(SweepFrame::at_angle(&hull, angle))
}

/// Criterion minimized by the exhaustive angle search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScanObjective {
    /// Extent along `v` (proxy for the number of swaths).
    ProjectedHeight,
    /// `ceil(height / width)` for the given swath width.
    SwathCount { swath_width: f64 },
    /// Area of the enclosing rectangle at that angle.
    RectArea,
}

impl ScanObjective {
    pub fn evaluate(&self, frame: &SweepFrame) -> f64 {
        match *self {
            ScanObjective::ProjectedHeight => frame.height,
            ScanObjective::SwathCount { swath_width } => (frame.height / swath_width).ceil(),
            ScanObjective::RectArea => frame.area(),
        }
    }
}

/// Scan angles `0, step, 2 step, ...` below `range` (default `pi`) and keep
/// the smallest objective; ties go to the smallest angle.
pub fn orientation_by_scan(poly: &Polygon, step: f64, range: f64, objective: ScanObjective) -> Result<SweepFrame> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!("scan step must be positive, got {step}")));
    }
    let hull = hull_ring(poly.exterior())?;
    let count = ((range / step) - 1e-9).ceil().max(1.0) as usize;
    let mut best: Option<(f64, SweepFrame)> = None;
    for k in 0..count {
        let angle = k as f64 * step;
        let frame = SweepFrame::at_angle(&hull, angle);
        let value = objective.evaluate(&frame);
        let take = match &best {
            None => true,
            Some((bv, _)) => value < *bv - TIE_TOL * bv.abs().max(1e-300),
        };
        if take {
            best = Some((value, frame));
        }
    }
    Ok(best.expect("at least one angle").1)
}

/// Sweep axis along the principal eigenvector of the vertex covariance.
///
/// Isotropic vertex clouds fall back to [`min_area_rect`] with `fallback` set.
pub fn orientation_by_pca(poly: &Polygon) -> Result<SweepFrame> {
    let pts = poly.exterior();
    // rejects collinear input
    hull_ring(pts)?;
    let n = pts.len() as f64;
    let mean = pts.iter().fold(Point2::ORIGIN, |acc, &p| acc + p) * (1.0 / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &p in pts {
        let d = p - mean;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    sxx /= n;
    syy /= n;
    sxy /= n;
    let half_tr = 0.5 * (sxx + syy);
    let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if l1 - l2 < 1e-12 * l1.abs() {
        let mut f = min_area_rect(poly)?;
        f.fallback = true;
        return Ok(f);
    }
    // principal axis angle of a symmetric 2x2 matrix
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut u = Point2::from_angle(theta);
    if u.x < 0.0 || (u.x == 0.0 && u.y < 0.0) {
        u = -u;
    }
    let hull = hull_ring(pts)?;
    Ok(SweepFrame::at_angle(&hull, u.y.atan2(u.x)))
}

/// Sweep-orientation strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrientationStrategy {
    Mar,
    AngleSearch { step: f64, range: f64 },
    Pca,
    #[default]
    MinWidth,
}

impl OrientationStrategy {
    pub fn angle_search() -> Self {
        OrientationStrategy::AngleSearch {
            step: DEFAULT_SCAN_STEP,
            range: PI,
        }
    }

    pub fn all() -> [OrientationStrategy; 4] {
        [
            OrientationStrategy::Mar,
            OrientationStrategy::angle_search(),
            OrientationStrategy::Pca,
            OrientationStrategy::MinWidth,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if let OrientationStrategy::AngleSearch { step, range } = *self {
            if !(step > 0.0 && step <= PI / 36.0 + 1e-15) {
                return Err(Error::InvalidParameter(format!(
                    "angle-search step must lie in (0, pi/36], got {step}"
                )));
            }
            if !(range > 0.0 && range <= PI + 1e-12) {
                return Err(Error::InvalidParameter(format!("angle-search range must lie in (0, pi], got {range}")));
            }
        }
        Ok(())
    }

    pub fn compute(&self, poly: &Polygon) -> Result<SweepFrame> {
        self.validate()?;
        match *self {
            OrientationStrategy::Mar => min_area_rect(poly),
            OrientationStrategy::AngleSearch { step, range } => {
                orientation_by_scan(poly, step, range, ScanObjective::ProjectedHeight)
            }
            OrientationStrategy::Pca => orientation_by_pca(poly),
            OrientationStrategy::MinWidth => orientation_min_width(poly),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OrientationStrategy::Mar => "mar",
            OrientationStrategy::AngleSearch { .. } => "scan",
            OrientationStrategy::Pca => "pca",
            OrientationStrategy::MinWidth => "minwidth",
        }
    }
}

impl fmt::Display for OrientationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrientationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mar" => Ok(OrientationStrategy::Mar),
            "scan" | "angle_search" | "angle-search" => Ok(OrientationStrategy::angle_search()),
            "pca" => Ok(OrientationStrategy::Pca),
            "minwidth" | "min_width" | "min-width" => Ok(OrientationStrategy::MinWidth),
            other => Err(Error::InvalidParameter(format!(
                "unknown orientation strategy {other:?} (expected mar|scan|pca|minwidth)"
            ))),
        }
    }
}
