use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::{compare_runs, MetricsReport, RankRow};
use crate::orientation::OrientationStrategy;

use super::pipeline::run_pipeline;
use super::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Orientation,
    BufferScale,
    Robots,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "orientation" => Ok(SweepAxis::Orientation),
            "buffer" | "buffer_scale" | "buffer-scale" => Ok(SweepAxis::BufferScale),
            "robots" | "n_robots" | "fleet" => Ok(SweepAxis::Robots),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep axis {other:?} (expected orientation|buffer|robots)"
            ))),
        }
    }
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Orientation => "orientation",
            SweepAxis::BufferScale => "buffer_scale",
            SweepAxis::Robots => "n_robots",
        }
    }

    /// Copy of `sc` with this axis set to `value`.
    pub fn apply(self, sc: &Scenario, value: &str) -> Result<Scenario> {
        let mut out = sc.clone();
        match self {
            SweepAxis::Orientation => out.orientation = value.parse::<OrientationStrategy>()?,
            SweepAxis::BufferScale => {
                out.buffer_scale = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("buffer scale {value:?} is not a number")))?
            }
            SweepAxis::Robots => {
                out.n_robots = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("robot count {value:?} is not an integer")))?
            }
        }
        out.validate()?;
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub value: String,
    pub outcome: std::result::Result<SweepSuccess, String>,
}

#[derive(Debug, Clone)]
pub struct SweepSuccess {
    pub metrics: MetricsReport,
    pub n_swaths: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub axis: SweepAxis,
    pub runs: Vec<SweepRun>,
    /// Successful runs ranked by total energy.
    pub ranking: Vec<RankRow>,
}

/// Run the pipeline once per value; failures are recorded, not fatal.
pub fn sweep(sc: &Scenario, axis: SweepAxis, values: &[String]) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    let runs: Vec<SweepRun> = values
        .iter()
        .map(|v| {
            let outcome = axis
                .apply(sc, v)
                .and_then(|s| run_pipeline(&s))
                .map(|r| SweepSuccess {
                    seconds: r.total_time(),
                    n_swaths: r.swaths.len(),
                    metrics: r.metrics,
                })
                .map_err(|e| e.to_string());
            SweepRun {
                value: v.clone(),
                outcome,
            }
        })
        .collect();
    let ok: Vec<(String, MetricsReport)> = runs
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|s| (r.value.clone(), s.metrics.clone())))
        .collect();
    Ok(SweepReport {
        axis,
        ranking: compare_runs(&ok),
        runs,
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl SweepReport {
    /// One row per value in input order; timings excluded.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "{},status,rank,n_swaths,total_length_km,total_energy_wh,coverage_only_energy_wh,makespan_s,balance_ratio,coverage_fraction,energy_delta_pct,error\n",
            self.axis.name()
        );
        for run in &self.runs {
            match &run.outcome {
                Ok(s) => {
                    let f = &s.metrics.fleet;
                    let row = self.ranking.iter().find(|r| r.label == run.value);
                    let _ = writeln!(
                        out,
                        "{},ok,{},{},{},{},{},{},{},{},{},",
                        csv_field(&run.value),
                        row.map_or(0, |r| r.rank),
                        s.n_swaths,
                        f.total_length_km,
                        f.total_energy_wh,
                        f.coverage_only_energy_wh,
                        f.makespan_s,
                        f.balance_ratio,
                        f.coverage_fraction,
                        row.map_or(0.0, |r| r.energy_delta_pct),
                    );
                }
                Err(e) => {
                    let _ = writeln!(out, "{},error,,,,,,,,,,{}", csv_field(&run.value), csv_field(e));
                }
            }
        }
        out
    }

    /// Ranking as an aligned text table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:>4} {:>14} {:>12} {:>10} {:>10} {:>9}\n",
            "rank",
            self.axis.name(),
            "energy_wh",
            "length_km",
            "makespan_s",
            "delta_%"
        );
        for r in &self.ranking {
            let _ = writeln!(
                out,
                "{:>4} {:>14} {:>12.2} {:>10.3} {:>10.1} {:>9.2}",
                r.rank, r.label, r.total_energy_wh, r.total_length_km, r.makespan_s, r.energy_delta_pct
            );
        }
        for run in &self.runs {
            if let Err(e) = &run.outcome {
                let _ = writeln!(out, "   - {:>14} failed: {e}", run.value);
            }
        }
        out
    }
}
