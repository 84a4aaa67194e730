//! Scenario I/O, the end-to-end pipeline, parameter sweeps and rendering.

mod output;
mod pipeline;
mod scenario;
mod svg;
mod sweep;

pub use output::{metrics_json, plan_geojson, read_plan_waypoints, waypoints_csv, write_atomic, write_outputs};
pub use pipeline::{default_depot, run_pipeline, PipelineResult};
pub use scenario::{
    bundled_scenario, bundled_scenario_with, load_scenario, load_scenario_with, parse_geometry, scenario_from_parts,
    sidecar_path, Scenario, ScenarioConfig, BUNDLED,
};
pub use svg::{render_svg, svg_margin};
pub use sweep::{sweep, SweepAxis, SweepReport, SweepRun, SweepSuccess};
