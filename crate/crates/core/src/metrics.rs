//! Plan evaluation: lengths, turns, a surrogate energy model, makespan,
//! balance and area coverage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point2, Region};
use crate::routing::{CoveragePlan, LegKind};
use crate::orientation::SweepFrame;
use crate::swathgen::{clip_line_to_region, SwathSet};
use crate::workspace::offset_inward;

/// Heading changes above this count as a turn (degrees).
pub const TURN_THRESHOLD_DEG: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    /// m/s
    pub cruise_speed: f64,
    /// W
    pub cruise_power: f64,
    /// Wh per turn
    pub turn_penalty: f64,
    /// s per turn
    pub turn_time: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        EnergyModel {
            cruise_speed: 5.0,
            cruise_power: 350.0,
            turn_penalty: 0.2,
            turn_time: 3.0,
        }
    }
}

impl EnergyModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("speed", self.cruise_speed),
            ("power", self.cruise_power),
            ("turn_penalty", self.turn_penalty),
            ("turn_time", self.turn_time),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("energy model {name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Wh for `length` meters with `turns` turn events.
    pub fn energy(&self, length: f64, turns: usize) -> f64 {
        self.cruise_power * (length / self.cruise_speed) / 3600.0 + turns as f64 * self.turn_penalty
    }

    /// Seconds for `length` meters with `turns` turn events.
    pub fn duration(&self, length: f64, turns: usize) -> f64 {
        length / self.cruise_speed + turns as f64 * self.turn_time
    }

    /// Apply `key=value` overrides separated by commas, e.g. `speed=4,power=300`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value in energy model, got {part:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("energy model value {v:?} is not a number")))?;
            match k.trim() {
                "speed" | "cruise_speed" => self.cruise_speed = v,
                "power" | "cruise_power" => self.cruise_power = v,
                "turn_penalty" => self.turn_penalty = v,
                "turn_time" => self.turn_time = v,
                other => return Err(Error::InvalidParameter(format!("unknown energy model key {other:?}"))),
            }
        }
        self.validate()?;
        Ok(self)
    }
}

impl FromStr for EnergyModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnergyModel::default().with_overrides(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotMetrics {
    pub robot_id: usize,
    pub swaths: usize,
    pub length_km: f64,
    pub swath_length_km: f64,
    pub transition_length_km: f64,
    pub turns: usize,
    pub energy_wh: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetMetrics {
    pub total_length_km: f64,
    pub total_energy_wh: f64,
    /// Length with depot legs removed.
    pub coverage_only_length_km: f64,
    /// Energy with depot legs removed.
    pub coverage_only_energy_wh: f64,
    pub makespan_s: f64,
    /// Longest robot path over the mean robot path.
    pub balance_ratio: f64,
    /// Area fraction of the feasible space (shrunk by `0.05 w`) within
    /// `w / 2` of any flown leg.
    pub coverage_fraction: f64,
    /// As `coverage_fraction`, counting swath legs only.
    pub swath_coverage_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub robots: Vec<RobotMetrics>,
    pub fleet: FleetMetrics,
}

fn turn_angle(a: Point2, b: Point2, c: Point2) -> f64 {
    let (d0, d1) = (b - a, c - b);
    d0.cross(d1).atan2(d0.dot(d1)).abs()
}

/// Vertices strictly between `start` and `end` whose heading change
/// exceeds the turn threshold.
pub fn count_turns(waypoints: &[Point2], start: usize, end: usize) -> usize {
    let thr = TURN_THRESHOLD_DEG.to_radians();
    ((start + 1)..end)
        .filter(|&k| turn_angle(waypoints[k - 1], waypoints[k], waypoints[k + 1]) > thr)
        .count()
}

/// Turns from the first swath entry to the last swath exit.
pub fn plan_turns(plan: &CoveragePlan) -> usize {
    plan.coverage_span()
        .map_or(0, |(s, e)| count_turns(&plan.waypoints, s, e))
}

/// Merge sorted-by-start closed intervals.
fn merge(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (lo, hi) in iv {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Cells with center `u0 + (k + 1/2) cell` inside `[lo, hi]`.
fn cells_in(lo: f64, hi: f64, u0: f64, cell: f64) -> u64 {
    let k0 = ((lo - u0) / cell - 0.5).ceil();
    let k1 = ((hi - u0) / cell - 0.5).floor();
    if k1 >= k0 {
        (k1 - k0) as u64 + 1
    } else {
        0
    }
}

/// Values of `u` for which `(u, v)` lies within `r` of the segment `[p, q]`
/// (all in frame coordinates). The set is convex, so it is one interval.
fn capsule_row(p: Point2, q: Point2, r: f64, v: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut take = |iv: Option<(f64, f64)>| {
        if let Some((a, b)) = iv {
            if b >= a {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
    };
    let disk = |c: Point2| {
        let dv = v - c.y;
        (dv.abs() <= r).then(|| {
            let h = (r * r - dv * dv).sqrt();
            (c.x - h, c.x + h)
        })
    };
    take(disk(p));
    take(disk(q));
    let d = q - p;
    let l2 = d.norm_sq();
    if l2 > 0.0 {
        let l = l2.sqrt();
        // perpendicular distance |cross(d, X - p)| / l <= r, with X = (u, v)
        // cross = d.x (v - p.y) - d.y (u - p.x)
        let c0 = d.x * (v - p.y) + d.y * p.x;
        let slab = if d.y == 0.0 {
            ((c0).abs() <= r * l).then_some((f64::NEG_INFINITY, f64::INFINITY))
        } else {
            let (a, b) = ((c0 - r * l) / d.y, (c0 + r * l) / d.y);
            Some((a.min(b), a.max(b)))
        };
        // projection parameter (u - p.x) d.x + (v - p.y) d.y in [0, l2]
        let proj = if d.x == 0.0 {
            let t = (v - p.y) * d.y;
            (0.0..=l2).contains(&t).then_some((f64::NEG_INFINITY, f64::INFINITY))
        } else {
            let base = (v - p.y) * d.y;
            let (a, b) = (p.x + (0.0 - base) / d.x, p.x + (l2 - base) / d.x);
            Some((a.min(b), a.max(b)))
        };
        if let (Some(s), Some(t)) = (slab, proj) {
            take(Some((s.0.max(t.0), s.1.min(t.1))));
        }
    }
    (hi >= lo).then_some((lo, hi))
}

/// Fraction of grid cells of `target` (cell centers inside) lying within
/// `r` of at least one of `segments`. The grid is aligned with `frame`.
pub fn coverage_on_grid(target: &Region, frame: &SweepFrame, segments: &[(Point2, Point2)], r: f64, cell: f64) -> f64 {
    if target.is_empty() {
        return 0.0;
    }
    let mut umin = f64::INFINITY;
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for p in target.vertices() {
        let q = frame.to_frame(*p);
        umin = umin.min(q.x);
        vmin = vmin.min(q.y);
        vmax = vmax.max(q.y);
    }
    let segs: Vec<(Point2, Point2)> = segments
        .iter()
        .map(|&(a, b)| (frame.to_frame(a), frame.to_frame(b)))
        .collect();
    let rows = ((vmax - vmin) / cell).ceil() as usize;
    let (mut total, mut hit) = (0u64, 0u64);
    for k in 0..rows {
        let v = vmin + (k as f64 + 0.5) * cell;
        let inside: Vec<(f64, f64)> = clip_line_to_region(v, frame, target, 0, 0.0)
            .iter()
            .map(|s| {
                let (ua, ub) = (frame.to_frame(s.a).x, frame.to_frame(s.b).x);
                (ua.min(ub), ua.max(ub))
            })
            .collect();
        let inside = merge(inside);
        if inside.is_empty() {
            continue;
        }
        let covered = merge(
            segs.iter()
                .filter(|(a, b)| a.y.min(b.y) - r <= v && v <= a.y.max(b.y) + r)
                .filter_map(|&(a, b)| capsule_row(a, b, r, v))
                .collect(),
        );
        for &(lo, hi) in &inside {
            total += cells_in(lo, hi, umin, cell);
            for &(clo, chi) in &covered {
                let (a, b) = (lo.max(clo), hi.min(chi));
                if b >= a {
                    hit += cells_in(a, b, umin, cell);
                }
            }
        }
    }
    if total == 0 {
        return 0.0;
    }
    hit as f64 / total as f64
}

/// The feasible space shrunk by `0.05 w`, the region against which coverage is scored.
pub fn coverage_target(feasible: &Region, w: f64) -> Region {
    let comps: Vec<_> = feasible
        .components()
        .iter()
        .flat_map(|c| offset_inward(c, 0.05 * w).components().to_vec())
        .collect();
    Region::new(comps)
}

/// Coverage of the shrunk feasible space by the swaths alone, each
/// dilated by `w / 2`, on a grid of `w / 20`.
pub fn swath_coverage(feasible: &Region, swaths: &SwathSet) -> f64 {
    let w = swaths.width;
    let segs: Vec<(Point2, Point2)> = swaths.swaths.iter().map(|s| (s.a, s.b)).collect();
    coverage_on_grid(&coverage_target(feasible, w), &swaths.frame, &segs, 0.5 * w, w / 20.0)
}

/// Coverage of the shrunk feasible space by every flown leg (swaths and
/// connectors) dilated by `w / 2`, on a grid of `w / 20`.
pub fn plan_coverage(feasible: &Region, swaths: &SwathSet, plans: &[CoveragePlan]) -> f64 {
    let w = swaths.width;
    let segs: Vec<(Point2, Point2)> = plans
        .iter()
        .flat_map(|p| p.waypoints.windows(2).map(|s| (s[0], s[1])))
        .collect();
    coverage_on_grid(&coverage_target(feasible, w), &swaths.frame, &segs, 0.5 * w, w / 20.0)
}

/// Per-robot and fleet metrics for a set of plans.
pub fn evaluate(plans: &[CoveragePlan], feasible: &Region, swaths: &SwathSet, model: &EnergyModel) -> MetricsReport {
    let robots: Vec<RobotMetrics> = plans
        .iter()
        .map(|p| {
            let turns = plan_turns(p);
            let length = p.length();
            RobotMetrics {
                robot_id: p.robot_id,
                swaths: p.visits.len(),
                length_km: length / 1000.0,
                swath_length_km: p.swath_length() / 1000.0,
                transition_length_km: p.transition_length(true) / 1000.0,
                turns,
                energy_wh: model.energy(length, turns),
                duration_s: model.duration(length, turns),
            }
        })
        .collect();
    let lengths: Vec<f64> = plans.iter().map(CoveragePlan::length).collect();
    let total_length: f64 = lengths.iter().sum();
    let coverage_only: f64 = plans
        .iter()
        .map(|p| {
            p.legs
                .iter()
                .filter(|l| l.kind == LegKind::Swath || !l.depot_leg)
                .map(|l| l.length)
                .sum::<f64>()
        })
        .sum();
    let turns: usize = robots.iter().map(|r| r.turns).sum();
    let mean = if plans.is_empty() { 0.0 } else { total_length / plans.len() as f64 };
    let max = lengths.iter().copied().fold(0.0, f64::max);
    let fleet = FleetMetrics {
        total_length_km: total_length / 1000.0,
        total_energy_wh: robots.iter().map(|r| r.energy_wh).sum(),
        coverage_only_length_km: coverage_only / 1000.0,
        coverage_only_energy_wh: model.energy(coverage_only, turns),
        makespan_s: robots.iter().map(|r| r.duration_s).fold(0.0, f64::max),
        balance_ratio: if mean > 0.0 { max / mean } else { 0.0 },
        coverage_fraction: if plans.is_empty() || swaths.is_empty() {
            0.0
        } else {
            plan_coverage(feasible, swaths, plans)
        },
        swath_coverage_fraction: if swaths.is_empty() { 0.0 } else { swath_coverage(feasible, swaths) },
    };
    MetricsReport { robots, fleet }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub rank: usize,
    pub label: String,
    pub total_energy_wh: f64,
    pub total_length_km: f64,
    pub makespan_s: f64,
    /// Percent above the lowest-energy run.
    pub energy_delta_pct: f64,
    pub length_delta_pct: f64,
}

fn pct(v: f64, best: f64) -> f64 {
    if best > 0.0 {
        100.0 * (v - best) / best
    } else {
        0.0
    }
}

/// Runs ranked by total energy (stable for ties), with deltas to the best.
pub fn compare_runs(runs: &[(String, MetricsReport)]) -> Vec<RankRow> {
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| {
        runs[a]
            .1
            .fleet
            .total_energy_wh
            .total_cmp(&runs[b].1.fleet.total_energy_wh)
    });
    let Some(&best) = order.first() else {
        return Vec::new();
    };
    let (be, bl) = (runs[best].1.fleet.total_energy_wh, runs[best].1.fleet.total_length_km);
    order
        .iter()
        .enumerate()
        .map(|(rank, &i)| {
            let f = &runs[i].1.fleet;
            RankRow {
                rank: rank + 1,
                label: runs[i].0.clone(),
                total_energy_wh: f.total_energy_wh,
                total_length_km: f.total_length_km,
                makespan_s: f.makespan_s,
                energy_delta_pct: pct(f.total_energy_wh, be),
                length_delta_pct: pct(f.total_length_km, bl),
            }
        })
        .collect()
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>5} {:>6} {:>10} {:>10} {:>6} {:>10} {:>10}",
            "robot", "swaths", "length_km", "trans_km", "turns", "energy_wh", "duration_s"
        )?;
        for r in &self.robots {
            writeln!(
                f,
                "{:>5} {:>6} {:>10.3} {:>10.3} {:>6} {:>10.2} {:>10.1}",
                r.robot_id, r.swaths, r.length_km, r.transition_length_km, r.turns, r.energy_wh, r.duration_s
            )?;
        }
        let fl = &self.fleet;
        writeln!(
            f,
            "total {:.3} km, {:.2} Wh (coverage only {:.3} km, {:.2} Wh)",
            fl.total_length_km, fl.total_energy_wh, fl.coverage_only_length_km, fl.coverage_only_energy_wh
        )?;
        write!(
            f,
            "makespan {:.1} s, balance {:.3}, coverage {:.4}",
            fl.makespan_s, fl.balance_ratio, fl.coverage_fraction
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polygon;
    use crate::routing::Leg;
    use crate::swathgen::generate_swaths;
    use crate::workspace::Workspace;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn straight_plan(len: f64) -> CoveragePlan {
        CoveragePlan {
            robot_id: 0,
            waypoints: vec![p(0.0, 0.0), p(len, 0.0)],
            legs: vec![Leg {
                kind: LegKind::Swath,
                start: 0,
                end: 1,
                length: len,
                swath: Some(0),
                depot_leg: false,
            }],
            visits: vec![],
        }
    }

    #[test]
    fn straight_line_energy() {
        let model = EnergyModel {
            cruise_speed: 10.0,
            cruise_power: 500.0,
            ..EnergyModel::default()
        };
        // 360 s at 500 W
        assert!((model.energy(3600.0, 0) - 50.0).abs() < 1e-12);
        assert!((model.duration(3600.0, 2) - 366.0).abs() < 1e-12);
        let plan = straight_plan(3600.0);
        assert_eq!(plan_turns(&plan), 0);
    }

    #[test]
    fn overrides_parse() {
        let m: EnergyModel = "speed=4, power=300,turn_time=2".parse().unwrap();
        assert_eq!((m.cruise_speed, m.cruise_power, m.turn_time, m.turn_penalty), (4.0, 300.0, 2.0, 0.2));
        assert!("speed=0".parse::<EnergyModel>().is_err());
        assert!("mass=3".parse::<EnergyModel>().is_err());
    }

    #[test]
    fn turns_ignore_small_heading_changes() {
        let w = [p(0.0, 0.0), p(10.0, 0.0), p(20.0, 0.5), p(20.0, 10.0), p(10.0, 10.0)];
        // 2.9 degrees at vertex 1, then two large turns
        assert_eq!(count_turns(&w, 0, 4), 2);
        assert_eq!(count_turns(&w, 1, 3), 1);
    }

    #[test]
    fn empty_report_is_zero() {
        let r: Region = Polygon::rect(0.0, 0.0, 10.0, 10.0).unwrap().into();
        let frame = SweepFrame::at_angle(&[p(0.0, 0.0), p(10.0, 10.0)], 0.0);
        let set = SwathSet {
            swaths: vec![],
            frame,
            width: 1.0,
            eta_min: 0.0,
            eta_max: 10.0,
            n_lines: 0,
        };
        let rep = evaluate(&[], &r, &set, &EnergyModel::default());
        assert!(rep.robots.is_empty());
        assert_eq!(rep.fleet.total_energy_wh, 0.0);
        assert_eq!(rep.fleet.balance_ratio, 0.0);
        assert_eq!(rep.fleet.coverage_fraction, 0.0);
    }

    #[test]
    fn rectangle_fully_covered() {
        let ws = Workspace::build_feasible(Polygon::rect(0.0, 0.0, 100.0, 50.0).unwrap(), vec![], 0.0).unwrap();
        let frame = SweepFrame::at_angle(&[p(0.0, 0.0), p(100.0, 50.0)], 0.0);
        let set = generate_swaths(&ws, &frame, 10.0).unwrap();
        let mut segs: Vec<(Point2, Point2)> = set.swaths.iter().map(|s| (s.a, s.b)).collect();
        assert_eq!(coverage_on_grid(ws.feasible(), &frame, &segs, 5.0, 0.5), 1.0);
        segs.remove(2);
        let c = coverage_on_grid(ws.feasible(), &frame, &segs, 5.0, 0.5);
        assert!((c - 0.8).abs() < 1e-12, "{c}");
    }

    #[test]
    fn capsule_rows_match_sampling() {
        let cases = [
            (p(0.0, 0.0), p(10.0, 0.0)),
            (p(0.0, 0.0), p(0.0, 10.0)),
            (p(-3.0, 2.0), p(7.0, 9.0)),
            (p(4.0, 4.0), p(4.0, 4.0)),
            (p(5.0, -1.0), p(-2.0, 6.0)),
        ];
        for (a, b) in cases {
            let seg = crate::geom::Segment::new(a, b);
            for k in 0..60 {
                let v = -4.0 + 0.25 * k as f64;
                let iv = capsule_row(a, b, 2.0, v);
                for j in 0..400 {
                    let u = -8.0 + 0.05 * j as f64;
                    let d = seg.distance_to(p(u, v));
                    if (d - 2.0).abs() < 1e-6 {
                        continue;
                    }
                    let inside = iv.is_some_and(|(lo, hi)| lo <= u && u <= hi);
                    assert_eq!(inside, d < 2.0, "seg {a:?}-{b:?} at ({u}, {v})");
                }
            }
        }
    }

    #[test]
    fn ranking_by_energy() {
        let mk = |e: f64, l: f64| MetricsReport {
            robots: vec![],
            fleet: FleetMetrics {
                total_length_km: l,
                total_energy_wh: e,
                coverage_only_length_km: l,
                coverage_only_energy_wh: e,
                makespan_s: 0.0,
                balance_ratio: 1.0,
                coverage_fraction: 1.0,
                swath_coverage_fraction: 1.0,
            },
        };
        let rows = compare_runs(&[("b".into(), mk(12.0, 2.0)), ("a".into(), mk(10.0, 1.0)), ("c".into(), mk(10.0, 1.0))]);
        let labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, vec!["a", "c", "b"]);
        assert_eq!(rows[1].energy_delta_pct, 0.0);
        assert!((rows[2].energy_delta_pct - 20.0).abs() < 1e-12);
    }
}
