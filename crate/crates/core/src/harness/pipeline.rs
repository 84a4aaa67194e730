use std::time::Instant;

use crate::allocation::{build_cost_matrix, solve_mtsp, Allocation, SolverConfig};
use crate::error::{Error, Result, Stage};
use crate::geom::{Point2, Region};
use crate::metrics::{evaluate, MetricsReport};
use crate::orientation::SweepFrame;
use crate::routing::{assemble_plans, CoveragePlan};
use crate::swathgen::{generate_swaths, SwathSet};
use crate::visgraph::VisGraph;
use crate::workspace::Workspace;

use super::scenario::Scenario;

/// Everything produced by one end-to-end run.
#[derive(Debug)]
pub struct PipelineResult {
    pub scenario: Scenario,
    pub workspace: Workspace,
    pub frame: SweepFrame,
    pub swaths: SwathSet,
    pub depot: Point2,
    pub allocation: Allocation,
    pub plans: Vec<CoveragePlan>,
    pub metrics: MetricsReport,
    /// Wall-clock seconds per stage, in execution order.
    pub timings: Vec<(Stage, f64)>,
    pub warnings: Vec<String>,
}

impl PipelineResult {
    pub fn total_time(&self) -> f64 {
        self.timings.iter().map(|t| t.1).sum()
    }
}

/// Centroid of the feasible space, or the nearest boundary point when the
/// centroid falls outside it.
pub fn default_depot(feasible: &Region) -> Point2 {
    let c = feasible.centroid();
    if feasible.locate(c).in_closure() {
        c
    } else {
        feasible.nearest_boundary_point(c).unwrap_or(c)
    }
}

fn timed<T>(timings: &mut Vec<(Stage, f64)>, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t0 = Instant::now();
    let out = f().map_err(|e| e.at_stage(stage));
    timings.push((stage, t0.elapsed().as_secs_f64()));
    out
}

/// Workspace, orientation, swaths, visibility graph, allocation, routing
/// and metrics for one scenario.
pub fn run_pipeline(sc: &Scenario) -> Result<PipelineResult> {
    sc.validate()?;
    let mut timings = Vec::new();
    let mut warnings = sc.warnings.clone();
    let w = sc.swath_width;

    let workspace = timed(&mut timings, Stage::Workspace, || {
        Workspace::with_buffer_scale(sc.roi.clone(), sc.obstacles.clone(), w, sc.buffer_scale)
    })?;
    if workspace.feasible().components().len() > 1 {
        warnings.push(format!(
            "feasible space has {} disconnected components",
            workspace.feasible().components().len()
        ));
    }
    let frame = timed(&mut timings, Stage::Orientation, || sc.orientation.compute(&sc.roi))?;
    if frame.fallback {
        warnings.push("principal axes are isotropic; used the minimum-area rectangle".into());
    }
    let swaths = timed(&mut timings, Stage::Swaths, || generate_swaths(&workspace, &frame, w))?;
    let depot = sc.depot.unwrap_or_else(|| default_depot(workspace.feasible()));

    let graph = timed(&mut timings, Stage::VisGraph, || {
        let mut extra: Vec<Point2> = swaths.swaths.iter().flat_map(|s| [s.a, s.b]).collect();
        extra.push(depot);
        VisGraph::build(workspace.feasible(), &extra, sc.vg_spacing.unwrap_or(w))
    })?;
    let allocation = timed(&mut timings, Stage::Allocation, || {
        let inst = build_cost_matrix(&swaths, &graph, depot, sc.n_robots)?;
        solve_mtsp(&inst, &SolverConfig::with_seed(sc.seed))
    })?;
    warnings.extend(allocation.warnings.iter().cloned());
    let plans = timed(&mut timings, Stage::Routing, || assemble_plans(&allocation, &swaths, &graph, depot))?;
    let metrics = timed(&mut timings, Stage::Metrics, || {
        Ok::<_, Error>(evaluate(&plans, workspace.feasible(), &swaths, &sc.energy))
    })?;

    Ok(PipelineResult {
        scenario: sc.clone(),
        workspace,
        frame,
        swaths,
        depot,
        allocation,
        plans,
        metrics,
        timings,
        warnings,
    })
}
