//! Scenario files: GeoJSON geometry plus a flat JSON parameter sidecar.
//!
//! The geometry file is a `FeatureCollection`. The first `Polygon` feature
//! with `properties.role = "roi"` is the region of interest; every feature
//! with `role = "nfz"` is an exclusion zone. Parameters are read from
//! `<stem>.config.json` next to the geometry file when it exists.

use std::path::{Path, PathBuf};

use geo::{Area, BooleanOps};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geom::{ring_signed_area, Point2, Polygon};
use crate::metrics::EnergyModel;
use crate::orientation::OrientationStrategy;
use crate::workspace::to_geo;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub roi: Polygon,
    pub obstacles: Vec<Polygon>,
    pub swath_width: f64,
    /// Headland width as a multiple of the swath width.
    pub buffer_scale: f64,
    pub n_robots: usize,
    pub depot: Option<Point2>,
    pub orientation: OrientationStrategy,
    pub seed: u64,
    /// Boundary sample spacing of the visibility graph; the swath width when unset.
    pub vg_spacing: Option<f64>,
    pub energy: EnergyModel,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn new(name: impl Into<String>, roi: Polygon, obstacles: Vec<Polygon>, swath_width: f64, n_robots: usize) -> Self {
        Scenario {
            name: name.into(),
            roi,
            obstacles,
            swath_width,
            buffer_scale: 1.0,
            n_robots,
            depot: None,
            orientation: OrientationStrategy::default(),
            seed: 0,
            vg_spacing: None,
            energy: EnergyModel::default(),
            warnings: Vec::new(),
        }
    }

    pub fn headland(&self) -> f64 {
        self.buffer_scale * self.swath_width
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.swath_width > 0.0) || !self.swath_width.is_finite() {
            return Err(Error::InvalidParameter(format!("swath width must be > 0, got {}", self.swath_width)));
        }
        if self.n_robots == 0 {
            return Err(Error::InvalidParameter("at least one robot is required".into()));
        }
        if !(self.buffer_scale >= 0.0) || !self.buffer_scale.is_finite() {
            return Err(Error::InvalidParameter(format!("buffer scale must be >= 0, got {}", self.buffer_scale)));
        }
        if let Some(s) = self.vg_spacing {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidParameter(format!("visibility-graph spacing must be > 0, got {s}")));
            }
        }
        if let Some(d) = self.depot {
            if !d.is_finite() {
                return Err(Error::InvalidParameter("depot coordinates must be finite".into()));
            }
        }
        self.orientation.validate()?;
        self.energy.validate()
    }
}

/// Parameters from the sidecar file; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: Option<String>,
    pub swath_width: Option<f64>,
    pub buffer_scale: Option<f64>,
    pub n_robots: Option<usize>,
    pub depot: Option<[f64; 2]>,
    pub orientation: Option<String>,
    pub seed: Option<u64>,
    pub vg_spacing: Option<f64>,
    pub energy_model: Option<EnergyModel>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario config: {e}")))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: &ScenarioConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(if other.$f.is_some() { self.$f = other.$f.clone(); })*};
        }
        take!(name, swath_width, buffer_scale, n_robots, depot, orientation, seed, vg_spacing, energy_model);
        self
    }
}

fn parse_point(v: &Value, what: &str) -> Result<Point2> {
    let arr = v
        .as_array()
        .filter(|a| a.len() >= 2)
        .ok_or_else(|| Error::Parse(format!("{what}: position must be an array of two numbers")))?;
    let x = arr[0].as_f64().ok_or_else(|| Error::Parse(format!("{what}: x is not a number")))?;
    let y = arr[1].as_f64().ok_or_else(|| Error::Parse(format!("{what}: y is not a number")))?;
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Parse(format!("{what}: non-finite coordinate")));
    }
    Ok(Point2::new(x, y))
}

fn parse_ring(v: &Value, what: &str) -> Result<Vec<Point2>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{what}: ring must be an array of positions")))?;
    arr.iter()
        .enumerate()
        .map(|(i, p)| parse_point(p, &format!("{what}, position {i}")))
        .collect()
}

/// Polygon of a feature plus whether its exterior was clockwise.
fn parse_polygon(feature: &Value, idx: usize) -> Result<(Polygon, bool)> {
    let what = format!("feature {idx}");
    let geom = feature
        .get("geometry")
        .ok_or_else(|| Error::Parse(format!("{what}: missing geometry")))?;
    match geom.get("type").and_then(Value::as_str) {
        Some("Polygon") => {}
        Some(t) => return Err(Error::Parse(format!("{what}: unsupported geometry type {t:?}, expected Polygon"))),
        None => return Err(Error::Parse(format!("{what}: geometry has no type"))),
    }
    let rings = geom
        .get("coordinates")
        .and_then(Value::as_array)
        .filter(|r| !r.is_empty())
        .ok_or_else(|| Error::Parse(format!("{what}: polygon coordinates must be a non-empty array of rings")))?;
    let exterior = parse_ring(&rings[0], &format!("{what}, exterior ring"))?;
    let holes = rings[1..]
        .iter()
        .enumerate()
        .map(|(i, r)| parse_ring(r, &format!("{what}, hole {i}")))
        .collect::<Result<Vec<_>>>()?;
    let clockwise = ring_signed_area(&exterior) < 0.0;
    let poly = Polygon::new(exterior, holes).map_err(|e| match e {
        Error::InvalidPolygon(m) => Error::InvalidPolygon(format!("{what}: {m}")),
        Error::DegenerateGeometry(m) => Error::DegenerateGeometry(format!("{what}: {m}")),
        other => other,
    })?;
    Ok((poly, clockwise))
}

/// Region of interest, exclusion zones and warnings from GeoJSON text.
pub fn parse_geometry(text: &str) -> Result<(Polygon, Vec<Polygon>, Vec<String>)> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("GeoJSON: {e}")))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::Parse("GeoJSON root must be a FeatureCollection".into()));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("FeatureCollection has no features array".into()))?;
    let mut warnings = Vec::new();
    let mut roi: Option<Polygon> = None;
    let mut nfz: Vec<(usize, Polygon)> = Vec::new();
    for (i, f) in features.iter().enumerate() {
        let role = f.get("properties").and_then(|p| p.get("role")).and_then(Value::as_str);
        match role {
            Some("roi") if roi.is_none() => {
                let (p, cw) = parse_polygon(f, i)?;
                if cw {
                    warnings.push(format!("feature {i}: clockwise exterior ring reoriented counter-clockwise"));
                }
                roi = Some(p);
            }
            Some("roi") => warnings.push(format!("feature {i}: additional roi feature ignored")),
            Some("nfz") => {
                let (p, cw) = parse_polygon(f, i)?;
                if cw {
                    warnings.push(format!("feature {i}: clockwise exterior ring reoriented counter-clockwise"));
                }
                nfz.push((i, p));
            }
            other => warnings.push(format!("feature {i}: role {other:?} ignored")),
        }
    }
    let roi = roi.ok_or_else(|| Error::Parse("no Polygon feature with role \"roi\"".into()))?;
    let roi_geo = to_geo(&roi);
    for (i, o) in &nfz {
        if to_geo(o).intersection(&roi_geo).unsigned_area() <= 1e-9 {
            return Err(Error::InvalidPolygon(format!(
                "feature {i}: exclusion zone does not overlap the region of interest"
            )));
        }
    }
    Ok((roi, nfz.into_iter().map(|(_, p)| p).collect(), warnings))
}

/// Scenario from geometry text and a parameter set.
pub fn scenario_from_parts(default_name: &str, geojson: &str, config: &ScenarioConfig) -> Result<Scenario> {
    let (roi, obstacles, warnings) = parse_geometry(geojson)?;
    let swath_width = config
        .swath_width
        .ok_or_else(|| Error::Parse("swath_width is not set by the scenario config or the caller".into()))?;
    let mut sc = Scenario::new(
        config.name.clone().unwrap_or_else(|| default_name.to_string()),
        roi,
        obstacles,
        swath_width,
        config.n_robots.unwrap_or(1),
    );
    sc.warnings = warnings;
    if let Some(b) = config.buffer_scale {
        sc.buffer_scale = b;
    }
    sc.depot = config.depot.map(|[x, y]| Point2::new(x, y));
    if let Some(o) = &config.orientation {
        sc.orientation = o.parse()?;
    }
    sc.seed = config.seed.unwrap_or(0);
    sc.vg_spacing = config.vg_spacing;
    if let Some(m) = config.energy_model {
        sc.energy = m;
    }
    sc.validate()?;
    Ok(sc)
}

/// `<dir>/<stem>.config.json` for a geometry file `<dir>/<stem>.geojson`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    path.with_file_name(format!("{stem}.config.json"))
}

/// Load a scenario file and its sidecar, then apply `overrides`.
pub fn load_scenario_with(path: &Path, overrides: &ScenarioConfig) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    let side = sidecar_path(path);
    let base = if side.exists() {
        ScenarioConfig::parse(&std::fs::read_to_string(&side)?)?
    } else {
        ScenarioConfig::default()
    };
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    scenario_from_parts(name, &text, &base.overlay(overrides))
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    load_scenario_with(path, &ScenarioConfig::default())
}

macro_rules! bundled {
    ($($name:literal),*) => {
        /// Names of the scenarios compiled into the library.
        pub const BUNDLED: &[&str] = &[$($name),*];

        fn bundled_text(name: &str) -> Option<(&'static str, &'static str)> {
            match name {
                $($name => Some((
                    include_str!(concat!("../../scenarios/", $name, ".geojson")),
                    include_str!(concat!("../../scenarios/", $name, ".config.json")),
                )),)*
                _ => None,
            }
        }
    };
}

bundled!("rect", "simple", "cape", "complex12", "complex22", "island", "wetland");

/// One of the bundled scenarios by name, with `overrides` applied.
pub fn bundled_scenario_with(name: &str, overrides: &ScenarioConfig) -> Result<Scenario> {
    let (geo, cfg) = bundled_text(name).ok_or_else(|| Error::InvalidParameter(format!("no bundled scenario named {name:?}")))?;
    scenario_from_parts(name, geo, &ScenarioConfig::parse(cfg)?.overlay(overrides))
}

pub fn bundled_scenario(name: &str) -> Result<Scenario> {
    bundled_scenario_with(name, &ScenarioConfig::default())
}
