//! Per-robot boustrophedon paths: alternating swath headings joined by
//! straight transitions, or visibility-graph detours where the straight
//! connector would leave the feasible space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::geom::{Point2, EPS_GEOM};
use crate::swathgen::{Swath, SwathSet};
use crate::visgraph::VisGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegKind {
    Swath,
    Transition,
    Detour,
}

/// A stretch of the waypoint polyline, `waypoints[start..=end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub kind: LegKind,
    pub start: usize,
    pub end: usize,
    pub length: f64,
    /// Swath id for swath legs.
    pub swath: Option<usize>,
    /// True for transitions that leave or return to the depot.
    pub depot_leg: bool,
}

/// A swath in tour order and whether it is traversed from `b` to `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwathVisit {
    pub swath: usize,
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveragePlan {
    pub robot_id: usize,
    pub waypoints: Vec<Point2>,
    pub legs: Vec<Leg>,
    pub visits: Vec<SwathVisit>,
}

impl CoveragePlan {
    pub fn length(&self) -> f64 {
        self.legs.iter().map(|l| l.length).sum()
    }

    pub fn swath_length(&self) -> f64 {
        self.legs.iter().filter(|l| l.kind == LegKind::Swath).map(|l| l.length).sum()
    }

    /// Length of every non-swath leg, optionally excluding depot legs.
    pub fn transition_length(&self, include_depot: bool) -> f64 {
        self.legs
            .iter()
            .filter(|l| l.kind != LegKind::Swath && (include_depot || !l.depot_leg))
            .map(|l| l.length)
            .sum()
    }

    /// Waypoint index range from the first swath entry to the last swath exit.
    pub fn coverage_span(&self) -> Option<(usize, usize)> {
        let first = self.legs.iter().find(|l| l.kind == LegKind::Swath)?;
        let last = self.legs.iter().rev().find(|l| l.kind == LegKind::Swath)?;
        Some((first.start, last.end))
    }
}

/// Traversal directions for a tour: the first swath is entered at the
/// endpoint nearer the depot (ties enter at `a`); each later swath flips
/// heading, except that consecutive pieces of the same sweep line keep it.
pub fn alternating_waypoints(tour: &[usize], swaths: &[Swath], depot: Point2) -> Vec<SwathVisit> {
    let mut visits: Vec<SwathVisit> = Vec::with_capacity(tour.len());
    for (pos, &m) in tour.iter().enumerate() {
        let s = &swaths[m];
        let reversed = match pos {
            0 => depot.dist(s.b) < depot.dist(s.a),
            _ => {
                let prev = visits[pos - 1];
                if swaths[prev.swath].line_index == s.line_index {
                    prev.reversed
                } else {
                    !prev.reversed
                }
            }
        };
        visits.push(SwathVisit { swath: m, reversed });
    }
    visits
}

struct Builder {
    waypoints: Vec<Point2>,
    legs: Vec<Leg>,
}

impl Builder {
    fn push_leg(&mut self, pts: &[Point2], kind: LegKind, swath: Option<usize>, depot_leg: bool) {
        let start = self.waypoints.len() - 1;
        let mut length = 0.0;
        for &q in &pts[1..] {
            let last = *self.waypoints.last().expect("builder starts with a point");
            let d = last.dist(q);
            if d > EPS_GEOM {
                self.waypoints.push(q);
                length += d;
            }
        }
        let end = self.waypoints.len() - 1;
        if end > start {
            self.legs.push(Leg {
                kind,
                start,
                end,
                length,
                swath,
                depot_leg,
            });
        }
    }
}

/// Connector from `from` to `to`: straight when clear, otherwise the
/// shortest visibility-graph path.
fn connect(g: &VisGraph, from: Point2, to: Point2) -> Result<(Vec<Point2>, LegKind)> {
    if g.visible(from, to) {
        return Ok((vec![from, to], LegKind::Transition));
    }
    let path = g.shortest_path(from, to)?;
    let kind = if path.points.len() > 2 { LegKind::Detour } else { LegKind::Transition };
    Ok((path.points, kind))
}

fn describe(end: Option<usize>) -> String {
    end.map_or("the depot".to_string(), |m| format!("swath {m}"))
}

/// Full plan for one robot: depot, swath legs joined by connectors, depot.
pub fn vg_refine(robot_id: usize, visits: &[SwathVisit], swaths: &[Swath], g: &VisGraph, depot: Point2) -> Result<CoveragePlan> {
    let mut b = Builder {
        waypoints: vec![depot],
        legs: Vec::new(),
    };
    let mut cur = depot;
    let mut cur_id: Option<usize> = None;
    for v in visits {
        let s = &swaths[v.swath];
        let (entry, exit) = (s.entry(v.reversed), s.exit(v.reversed));
        let (pts, kind) = connect(g, cur, entry).map_err(|e| name_ends(e, cur_id, Some(v.swath)))?;
        b.push_leg(&pts, kind, None, cur_id.is_none());
        b.push_leg(&[entry, exit], LegKind::Swath, Some(v.swath), false);
        cur = exit;
        cur_id = Some(v.swath);
    }
    if cur_id.is_some() {
        let (pts, kind) = connect(g, cur, depot).map_err(|e| name_ends(e, cur_id, None))?;
        b.push_leg(&pts, kind, None, true);
    }
    Ok(CoveragePlan {
        robot_id,
        waypoints: b.waypoints,
        legs: b.legs,
        visits: visits.to_vec(),
    })
}

fn name_ends(e: Error, from: Option<usize>, to: Option<usize>) -> Error {
    match e {
        Error::Unreachable { from: a, to: b, detail } => Error::Unreachable {
            from: a,
            to: b,
            detail: format!("{} to {}: {detail}", describe(from), describe(to)),
        },
        other => other,
    }
}

/// One plan per robot, each starting and ending at the depot.
///
/// The allocation cost does not fix a tour's direction, so each tour is
/// routed both ways and the shorter route kept (the given order on ties).
pub fn assemble_plans(alloc: &Allocation, swaths: &SwathSet, g: &VisGraph, depot: Point2) -> Result<Vec<CoveragePlan>> {
    alloc
        .tours
        .par_iter()
        .enumerate()
        .map(|(r, tour)| {
            let route = |t: &[usize]| vg_refine(r, &alternating_waypoints(t, &swaths.swaths, depot), &swaths.swaths, g, depot);
            let fwd = route(tour)?;
            if tour.len() < 2 {
                return Ok(fwd);
            }
            let rev_tour: Vec<usize> = tour.iter().rev().copied().collect();
            let rev = route(&rev_tour)?;
            let (lf, lr) = (fwd.length(), rev.length());
            Ok(if lr < lf - 1e-9 * lf.max(1.0) { rev } else { fwd })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Polygon, Region};

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn sw(a: Point2, b: Point2, line: usize) -> Swath {
        Swath {
            a,
            b,
            line_index: line,
            segment_index: 0,
            length: a.dist(b),
            z: a.y,
        }
    }

    #[test]
    fn first_heading_follows_depot() {
        let s = [sw(p(0.0, 0.0), p(10.0, 0.0), 0)];
        assert!(!alternating_waypoints(&[0], &s, p(-1.0, 0.0))[0].reversed);
        assert!(alternating_waypoints(&[0], &s, p(11.0, 0.0))[0].reversed);
        assert!(!alternating_waypoints(&[0], &s, p(5.0, 3.0))[0].reversed);
    }

    #[test]
    fn alternation_and_same_line_exception() {
        let s = [
            sw(p(0.0, 0.0), p(10.0, 0.0), 0),
            sw(p(0.0, 2.0), p(4.0, 2.0), 1),
            sw(p(6.0, 2.0), p(10.0, 2.0), 1),
            sw(p(0.0, 4.0), p(10.0, 4.0), 2),
        ];
        let v = alternating_waypoints(&[0, 1, 2, 3], &s, p(-1.0, 0.0));
        let r: Vec<bool> = v.iter().map(|x| x.reversed).collect();
        assert_eq!(r, vec![false, true, true, false]);
    }

    #[test]
    fn rectangle_plan_length() {
        let r: Region = Polygon::rect(0.0, 0.0, 100.0, 50.0).unwrap().into();
        let s: Vec<Swath> = (0..5)
            .map(|k| sw(p(0.0, 5.0 + 10.0 * k as f64), p(100.0, 5.0 + 10.0 * k as f64), k))
            .collect();
        let depot = p(0.0, 0.0);
        let mut extra: Vec<Point2> = s.iter().flat_map(|x| [x.a, x.b]).collect();
        extra.push(depot);
        let g = VisGraph::build(&r, &extra, 10.0).unwrap();
        let visits = alternating_waypoints(&[0, 1, 2, 3, 4], &s, depot);
        let plan = vg_refine(0, &visits, &s, &g, depot).unwrap();
        let depot_legs = 5.0 + (100.0f64.powi(2) + 45.0f64.powi(2)).sqrt();
        assert!((plan.length() - (500.0 + 40.0 + depot_legs)).abs() < 1e-9);
        assert_eq!(plan.waypoints.first(), Some(&depot));
        assert_eq!(plan.waypoints.last(), Some(&depot));
        assert!(plan.legs.iter().all(|l| l.kind != LegKind::Detour));
        assert_eq!(plan.legs.iter().filter(|l| l.kind == LegKind::Swath).count(), 5);
    }

    #[test]
    fn blocked_transition_becomes_detour() {
        let r: Region = Polygon::new(
            vec![p(0.0, 0.0), p(20.0, 0.0), p(20.0, 20.0), p(0.0, 20.0)],
            vec![vec![p(8.0, 2.0), p(12.0, 2.0), p(12.0, 18.0), p(8.0, 18.0)]],
        )
        .unwrap()
        .into();
        let s = [sw(p(1.0, 10.0), p(7.0, 10.0), 0), sw(p(13.0, 10.0), p(19.0, 10.0), 0)];
        let depot = p(1.0, 1.0);
        let mut extra: Vec<Point2> = s.iter().flat_map(|x| [x.a, x.b]).collect();
        extra.push(depot);
        let g = VisGraph::build(&r, &extra, 2.0).unwrap();
        let visits = alternating_waypoints(&[0, 1], &s, depot);
        assert!(!visits[0].reversed && !visits[1].reversed);
        let plan = vg_refine(0, &visits, &s, &g, depot).unwrap();
        assert!(plan.legs.iter().any(|l| l.kind == LegKind::Detour));
        for w in plan.waypoints.windows(2) {
            assert!(g.visible(w[0], w[1]));
            assert!(w[0].dist(w[1]) > EPS_GEOM);
        }
    }
}
