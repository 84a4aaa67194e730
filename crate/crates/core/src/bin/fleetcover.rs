use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fleetcover::geom::Point2;
use fleetcover::harness::{
    bundled_scenario_with, load_scenario_with, run_pipeline, sweep, write_atomic, write_outputs, Scenario,
    ScenarioConfig, SweepAxis,
};
use fleetcover::{Error, Result};

#[derive(Parser)]
#[command(name = "fleetcover", version, about = "Multi-robot coverage planning over polygonal regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan coverage paths for one scenario and write them to a directory.
    Plan {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write report.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Re-run a scenario over several values of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_axis)]
        axis: SweepAxis,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Output directory for sweep.csv.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Load and check a scenario without planning.
    Validate {
        /// Scenario GeoJSON path, or the name of a bundled scenario.
        #[arg(long)]
        scenario: String,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario GeoJSON path, or the name of a bundled scenario.
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    robots: Option<usize>,
    #[arg(long)]
    swath_width: Option<f64>,
    #[arg(long)]
    buffer_scale: Option<f64>,
    /// mar | scan | pca | minwidth
    #[arg(long)]
    orientation: Option<String>,
    /// Depot as x,y.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    depot: Option<Point2>,
    #[arg(long)]
    seed: Option<u64>,
    /// Boundary sample spacing of the visibility graph (meters).
    #[arg(long)]
    vg_spacing: Option<f64>,
    /// Overrides such as speed=5,power=350,turn_penalty=0.2,turn_time=3.
    #[arg(long)]
    energy_model: Option<String>,
}

fn parse_axis(s: &str) -> std::result::Result<SweepAxis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_point(s: &str) -> std::result::Result<Point2, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x in {s:?}"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y in {s:?}"))?;
    Ok(Point2::new(x, y))
}

fn load(spec: &str, overrides: &ScenarioConfig) -> Result<Scenario> {
    let path = Path::new(spec);
    if !path.exists() && fleetcover::harness::BUNDLED.contains(&spec) {
        return bundled_scenario_with(spec, overrides);
    }
    load_scenario_with(path, overrides)
}

impl Common {
    fn scenario(&self) -> Result<Scenario> {
        let overrides = ScenarioConfig {
            swath_width: self.swath_width,
            buffer_scale: self.buffer_scale,
            n_robots: self.robots,
            depot: self.depot.map(|p| [p.x, p.y]),
            orientation: self.orientation.clone(),
            seed: self.seed,
            vg_spacing: self.vg_spacing,
            ..Default::default()
        };
        let mut sc = load(&self.scenario, &overrides)?;
        if let Some(spec) = &self.energy_model {
            sc.energy = sc.energy.with_overrides(spec)?;
        }
        sc.validate()?;
        Ok(sc)
    }
}

/// Runs the command and returns what it prints to stdout.
fn run(cli: Cli) -> Result<String> {
    let mut o = String::new();
    match cli.command {
        Command::Plan { common, out, svg } => {
            let sc = common.scenario()?;
            let r = run_pipeline(&sc)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            let files = write_outputs(&r, &out, svg)?;
            let _ = writeln!(
                o,
                "{}: {} swaths, {} robots, sweep angle {:.2} deg",
                sc.name,
                r.swaths.len(),
                sc.n_robots,
                r.frame.angle.to_degrees()
            );
            let _ = writeln!(o, "{}", r.metrics);
            let stages: Vec<String> = r.timings.iter().map(|(s, t)| format!("{s} {:.3}s", t)).collect();
            let _ = writeln!(o, "timing: {} (total {:.3}s)", stages.join(", "), r.total_time());
            let _ = writeln!(o, "wrote {} files to {}", files.len(), out.display());
        }
        Command::Sweep {
            common,
            axis,
            values,
            out,
        } => {
            let sc = common.scenario()?;
            let report = sweep(&sc, axis, &values)?;
            std::fs::create_dir_all(&out)?;
            write_atomic(&out.join("sweep.csv"), &report.to_csv())?;
            o.push_str(&report.table());
            let _ = writeln!(o, "wrote {}", out.join("sweep.csv").display());
        }
        Command::Validate { scenario } => {
            let sc = load(&scenario, &ScenarioConfig::default())?;
            for w in &sc.warnings {
                eprintln!("warning: {w}");
            }
            let _ = writeln!(
                o,
                "{}: roi area {:.1} m^2, {} exclusion zones, swath width {} m, {} robots",
                sc.name,
                sc.roi.area(),
                sc.obstacles.len(),
                sc.swath_width,
                sc.n_robots
            );
        }
    }
    Ok(o)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
