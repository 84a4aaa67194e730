//! Plan files: per-robot GeoJSON and CSV, `metrics.json`, `report.svg`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::metrics::{EnergyModel, MetricsReport};
use crate::routing::CoveragePlan;

use super::pipeline::PipelineResult;
use super::svg::render_svg;

/// One robot's path as a GeoJSON FeatureCollection with a single
/// LineString feature; legs and swath order are feature properties.
pub fn plan_geojson(plan: &CoveragePlan) -> String {
    let coords: Vec<[f64; 2]> = plan.waypoints.iter().map(|p| [p.x, p.y]).collect();
    let legs: Vec<Value> = plan
        .legs
        .iter()
        .map(|l| {
            json!({
                "kind": l.kind,
                "start": l.start,
                "end": l.end,
                "length_m": l.length,
                "swath": l.swath,
                "depot_leg": l.depot_leg,
            })
        })
        .collect();
    let visits: Vec<Value> = plan
        .visits
        .iter()
        .map(|v| json!({"swath": v.swath, "reversed": v.reversed}))
        .collect();
    let doc = json!({
        "type": "FeatureCollection",
        "features": [{
            "type": "Feature",
            "properties": {
                "robot_id": plan.robot_id,
                "length_m": plan.length(),
                "legs": legs,
                "visits": visits,
            },
            "geometry": {"type": "LineString", "coordinates": coords},
        }],
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("plan serializes");
    s.push('\n');
    s
}

/// Waypoints of the first LineString in a plan GeoJSON document.
pub fn read_plan_waypoints(text: &str) -> Result<Vec<Point2>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("plan GeoJSON: {e}")))?;
    let coords = doc
        .pointer("/features/0/geometry/coordinates")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("plan GeoJSON has no LineString coordinates".into()))?;
    coords
        .iter()
        .map(|c| {
            let x = c.get(0).and_then(Value::as_f64);
            let y = c.get(1).and_then(Value::as_f64);
            match (x, y) {
                (Some(x), Some(y)) => Ok(Point2::new(x, y)),
                _ => Err(Error::Parse("plan coordinate is not a number pair".into())),
            }
        })
        .collect()
}

/// `seq,x,y,leg` rows; `leg` is the kind of the leg arriving at the waypoint.
pub fn waypoints_csv(plan: &CoveragePlan) -> String {
    let mut kinds = vec![""; plan.waypoints.len()];
    for l in &plan.legs {
        for k in kinds.iter_mut().take(l.end + 1).skip(l.start + 1) {
            *k = match l.kind {
                crate::routing::LegKind::Swath => "swath",
                crate::routing::LegKind::Transition => "transition",
                crate::routing::LegKind::Detour => "detour",
            };
        }
    }
    let mut out = String::from("seq,x,y,leg\n");
    for (i, p) in plan.waypoints.iter().enumerate() {
        let kind = if i == 0 { "start" } else { kinds[i] };
        let _ = writeln!(out, "{i},{},{},{kind}", p.x, p.y);
    }
    out
}

#[derive(Debug, Serialize)]
struct MetricsDocument<'a> {
    scenario: &'a str,
    n_robots: usize,
    swath_width: f64,
    buffer_scale: f64,
    headland_m: f64,
    orientation: &'a str,
    sweep_angle_deg: f64,
    seed: u64,
    depot: [f64; 2],
    n_swaths: usize,
    n_lines: usize,
    allocation_objective_m: f64,
    energy_model: &'a EnergyModel,
    metrics: &'a MetricsReport,
    warnings: &'a [String],
}

/// Run summary and metrics as pretty JSON. Timings are left out so that
/// repeated runs produce identical bytes.
pub fn metrics_json(r: &PipelineResult) -> String {
    let sc = &r.scenario;
    let doc = MetricsDocument {
        scenario: &sc.name,
        n_robots: sc.n_robots,
        swath_width: sc.swath_width,
        buffer_scale: sc.buffer_scale,
        headland_m: r.workspace.headland(),
        orientation: sc.orientation.name(),
        sweep_angle_deg: r.frame.angle.to_degrees(),
        seed: sc.seed,
        depot: [r.depot.x, r.depot.y],
        n_swaths: r.swaths.len(),
        n_lines: r.swaths.n_lines,
        allocation_objective_m: r.allocation.objective,
        energy_model: &sc.energy,
        metrics: &r.metrics,
        warnings: &r.warnings,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("metrics serialize");
    s.push('\n');
    s
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Write all plan files into `dir`; returns the paths written.
pub fn write_outputs(r: &PipelineResult, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for plan in &r.plans {
        let g = dir.join(format!("plan_{}.geojson", plan.robot_id));
        write_atomic(&g, &plan_geojson(plan))?;
        let c = dir.join(format!("waypoints_{}.csv", plan.robot_id));
        write_atomic(&c, &waypoints_csv(plan))?;
        written.extend([g, c]);
    }
    let m = dir.join("metrics.json");
    write_atomic(&m, &metrics_json(r))?;
    written.push(m);
    if svg {
        let s = dir.join("report.svg");
        write_atomic(&s, &render_svg(&r.workspace, &r.plans))?;
        written.push(s);
    }
    Ok(written)
}
