//! Parallel back-and-forth swaths clipped to the feasible space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point2, Region, EPS_GEOM};
use crate::orientation::SweepFrame;
use crate::workspace::Workspace;

/// Shortest swath kept after clipping: `max(0.1 m, 0.05 w)`.
pub fn min_swath_length(w: f64) -> f64 {
    (0.05 * w).max(0.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Swath {
    pub a: Point2,
    pub b: Point2,
    /// Index of the sweep line this swath lies on, 0-based.
    pub line_index: usize,
    /// Position of the swath among the pieces of its line, 0-based.
    pub segment_index: usize,
    pub length: f64,
    /// Offset of the sweep line along the frame normal.
    pub z: f64,
}

impl Swath {
    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }

    /// The endpoint at which the swath is entered for the given heading.
    pub fn entry(&self, reversed: bool) -> Point2 {
        if reversed {
            self.b
        } else {
            self.a
        }
    }

    pub fn exit(&self, reversed: bool) -> Point2 {
        if reversed {
            self.a
        } else {
            self.b
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwathSet {
    pub swaths: Vec<Swath>,
    pub frame: SweepFrame,
    pub width: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    pub n_lines: usize,
}

impl SwathSet {
    pub fn len(&self) -> usize {
        self.swaths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaths.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.swaths.iter().map(|s| s.length).sum()
    }
}

/// Range of `p . v` over every vertex of the region.
pub fn projection_span(region: &Region, v: Point2) -> (f64, f64) {
    region
        .vertices()
        .map(|p| p.dot(v))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z), hi.max(z)))
}

/// Centers `eta_min + (k - 1/2) w`, `k = 1..=ceil((eta_max - eta_min) / w)`.
pub fn swath_line_centers(eta_min: f64, eta_max: f64, w: f64) -> Result<Vec<f64>> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::InvalidParameter(format!("swath width must be > 0, got {w}")));
    }
    let span = eta_max - eta_min;
    if span <= 0.0 {
        return Ok(vec![eta_min]);
    }
    let n = (span / w).ceil() as usize;
    Ok((1..=n).map(|k| eta_min + (k as f64 - 0.5) * w).collect())
}

/// Pieces of the line `z v + t u` that lie in the closure of `region`,
/// ordered by `t`. Pieces shorter than `min_len` are dropped.
pub fn clip_line_to_region(z: f64, frame: &SweepFrame, region: &Region, line_index: usize, min_len: f64) -> Vec<Swath> {
    let mut ts: Vec<f64> = Vec::new();
    for e in region.edges() {
        let (p0, p1) = (frame.to_frame(e.a), frame.to_frame(e.b));
        let dv = p1.y - p0.y;
        if dv.abs() <= EPS_GEOM * 1e-3 {
            if (p0.y - z).abs() <= EPS_GEOM {
                ts.push(p0.x);
                ts.push(p1.x);
            }
            continue;
        }
        let s = (z - p0.y) / dv;
        if (0.0..=1.0).contains(&s) {
            ts.push(p0.x + s * (p1.x - p0.x));
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() <= EPS_GEOM);

    let at = |t: f64| frame.from_frame(Point2::new(t, z));
    // consecutive pairs whose midpoint is in the closure, merged when touching
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if !region.locate(at(0.5 * (t0 + t1))).in_closure() {
            continue;
        }
        match pieces.last_mut() {
            Some(last) if last.1 == t0 => last.1 = t1,
            _ => pieces.push((t0, t1)),
        }
    }
    pieces
        .into_iter()
        .filter(|(t0, t1)| t1 - t0 > min_len)
        .enumerate()
        .map(|(nu, (t0, t1))| {
            let (a, b) = (at(t0), at(t1));
            Swath {
                a,
                b,
                line_index,
                segment_index: nu,
                length: t1 - t0,
                z,
            }
        })
        .collect()
}

/// All swaths of width `w` over the feasible space, ordered by line then
/// by position along the sweep axis.
pub fn generate_swaths(ws: &Workspace, frame: &SweepFrame, w: f64) -> Result<SwathSet> {
    let region = ws.feasible();
    if region.is_empty() {
        return Err(Error::EmptyPlan("feasible space is empty".into()));
    }
    let (eta_min, eta_max) = projection_span(region, frame.v);
    let centers = swath_line_centers(eta_min, eta_max, w)?;
    let min_len = min_swath_length(w);
    let swaths: Vec<Swath> = centers
        .par_iter()
        .enumerate()
        .map(|(k, &z)| clip_line_to_region(z, frame, region, k, min_len))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    if swaths.is_empty() {
        return Err(Error::EmptyPlan(format!(
            "no swath of width {w} m fits the feasible space"
        )));
    }
    Ok(SwathSet {
        swaths,
        frame: *frame,
        width: w,
        eta_min,
        eta_max,
        n_lines: centers.len(),
    })
}
