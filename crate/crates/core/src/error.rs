use std::fmt;

use crate::geom::Point2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which workspace construction step emptied the feasible space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkspaceStep {
    RoiErosion,
    ObstacleRemoval,
}

impl fmt::Display for WorkspaceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorkspaceStep::RoiErosion => "inward offset of the region of interest",
            WorkspaceStep::ObstacleRemoval => "removal of inflated obstacles",
        })
    }
}

/// Pipeline stage tag attached to errors surfaced by the end-to-end planner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Workspace,
    Orientation,
    Swaths,
    VisGraph,
    Allocation,
    Routing,
    Metrics,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Workspace => "workspace",
            Stage::Orientation => "orientation",
            Stage::Swaths => "swathgen",
            Stage::VisGraph => "visgraph",
            Stage::Allocation => "allocation",
            Stage::Routing => "routing",
            Stage::Metrics => "metrics",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("infeasible workspace: feasible space is empty after {step}")]
    InfeasibleWorkspace { step: WorkspaceStep },

    #[error("empty plan: {0}")]
    EmptyPlan(String),

    #[error("point ({x}, {y}) lies outside the feasible space", x = .0.x, y = .0.y)]
    InfeasibleNode(Point2),

    #[error(
        "no collision-free path from ({}, {}) to ({}, {}): {detail}",
        from.x, from.y, to.x, to.y
    )]
    Unreachable {
        from: Point2,
        to: Point2,
        detail: String,
    },

    #[error("infeasible allocation instance: swaths {stranded:?} are unreachable from the depot")]
    InfeasibleInstance { stranded: Vec<usize> },

    #[error("instance too large for exhaustive search: {n} swaths (limit {limit})")]
    SizeLimit { n: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_stage(self, stage: Stage) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The error with any stage wrapper removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code used by the CLI: 2 infeasible workspace,
    /// 3 unreachable allocation, 4 parse/validation error, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::InfeasibleWorkspace { .. } | Error::EmptyPlan(_) => 2,
            Error::Unreachable { .. } | Error::InfeasibleInstance { .. } | Error::InfeasibleNode(_) => 3,
            Error::Parse(_) | Error::InvalidPolygon(_) | Error::DegenerateGeometry(_) => 4,
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_see_through_stage_tags() {
        let e = Error::InfeasibleWorkspace {
            step: WorkspaceStep::ObstacleRemoval,
        }
        .at_stage(Stage::Workspace);
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().starts_with("workspace stage failed"));
        assert_eq!(Error::Parse("x".into()).exit_code(), 4);
        assert_eq!(Error::InfeasibleInstance { stranded: vec![1] }.exit_code(), 3);
        assert_eq!(Error::InvalidParameter("w".into()).exit_code(), 1);
    }
}
