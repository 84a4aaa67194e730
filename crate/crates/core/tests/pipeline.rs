mod common;

use common::p;
use fleetcover::geom::{apply_transform, Point2, Polygon, RigidTransform};
use fleetcover::harness::{
    bundled_scenario, bundled_scenario_with, metrics_json, parse_geometry, plan_geojson, read_plan_waypoints,
    render_svg, run_pipeline, scenario_from_parts, svg_margin, sweep, Scenario, ScenarioConfig, SweepAxis, BUNDLED,
};
use fleetcover::metrics::{compare_runs, evaluate, EnergyModel};
use fleetcover::orientation::SweepFrame;
use fleetcover::routing::LegKind;
use fleetcover::swathgen::SwathSet;
use fleetcover::Error;

fn rect_scenario(robots: usize) -> Scenario {
    let mut sc = Scenario::new("rect100x50", Polygon::rect(0.0, 0.0, 100.0, 50.0).unwrap(), vec![], 10.0, robots);
    sc.buffer_scale = 0.0;
    sc
}

#[test]
fn rectangle_with_three_robots_covers_every_swath_once() {
    let r = run_pipeline(&rect_scenario(3)).unwrap();
    assert_eq!(r.swaths.len(), 5);
    assert_eq!(r.plans.len(), 3);
    let mut seen: Vec<usize> = r.plans.iter().flat_map(|pl| pl.visits.iter().map(|v| v.swath)).collect();
    seen.sort_unstable();
    assert_eq!(seen, vec![0, 1, 2, 3, 4]);
    assert!(r.allocation.tours.iter().all(|t| !t.is_empty()));
    assert!(r.metrics.fleet.coverage_fraction > 0.999);
}

#[test]
fn rectangle_single_robot_matches_closed_form() {
    let r = run_pipeline(&rect_scenario(1)).unwrap();
    // five 100 m lines, four 10 m steps, depot at the centre 20 m off the
    // first and last line ends
    let expect = 540.0 + 2.0 * (50.0f64 * 50.0 + 20.0 * 20.0).sqrt();
    assert!(r.depot.dist(p(50.0, 25.0)) < 1e-9);
    let got = r.plans[0].length();
    assert!((got - expect).abs() / expect < 1e-6, "length {got} vs {expect}");
    assert_eq!(r.metrics.robots[0].turns, 8);
    let m = EnergyModel::default();
    let e = m.energy(expect, 8);
    assert!((r.metrics.fleet.total_energy_wh - e).abs() / e < 1e-6);
    assert!(r.plans[0].legs.iter().all(|l| l.kind != LegKind::Detour));
}

#[test]
fn obstacle_covering_the_roi_is_reported_infeasible() {
    let mut sc = rect_scenario(2);
    sc.obstacles = vec![Polygon::rect(-5.0, -5.0, 105.0, 55.0).unwrap()];
    let err = run_pipeline(&sc).unwrap_err();
    assert!(matches!(err.root(), Error::InfeasibleWorkspace { .. }), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn repeated_runs_write_identical_bytes() {
    for name in ["cape", "wetland"] {
        let sc = bundled_scenario(name).unwrap();
        let (a, b) = (run_pipeline(&sc).unwrap(), run_pipeline(&sc).unwrap());
        assert_eq!(metrics_json(&a), metrics_json(&b));
        for (x, y) in a.plans.iter().zip(&b.plans) {
            assert_eq!(plan_geojson(x), plan_geojson(y));
        }
    }
}

#[test]
fn plan_geojson_round_trips() {
    let r = run_pipeline(&bundled_scenario("island").unwrap()).unwrap();
    for plan in &r.plans {
        let back = read_plan_waypoints(&plan_geojson(plan)).unwrap();
        assert_eq!(back.len(), plan.waypoints.len());
        for (a, b) in back.iter().zip(&plan.waypoints) {
            assert!(a.dist(*b) <= 1e-9);
        }
    }
}

fn attr<'a>(svg: &'a str, tag_start: &str, name: &str) -> Vec<&'a str> {
    svg.match_indices(tag_start)
        .filter_map(|(i, _)| {
            let rest = &svg[i..];
            let end = rest.find('>')?;
            let tag = &rest[..end];
            let key = format!(" {name}=\"");
            let s = tag.find(&key)? + key.len();
            let e = tag[s..].find('"')?;
            Some(&tag[s..s + e])
        })
        .collect()
}

#[test]
fn svg_view_box_is_the_padded_roi_box() {
    let r = run_pipeline(&bundled_scenario("cape").unwrap()).unwrap();
    let svg = render_svg(&r.workspace, &r.plans);
    let vb: Vec<f64> = attr(&svg, "<svg", "viewBox")[0]
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    let bb = r.scenario.roi.bbox();
    let m = svg_margin(&bb);
    assert!((m - 0.05 * bb.width().max(bb.height())).abs() < 1e-12);
    // y is flipped in the drawing
    let expect = [bb.min.x - m, -bb.max.y - m, bb.width() + 2.0 * m, bb.height() + 2.0 * m];
    for (a, b) in vb.iter().zip(expect) {
        assert!((a - b).abs() <= 1e-3, "{vb:?} vs {expect:?}");
    }
}

#[test]
fn svg_gives_each_robot_its_own_color_and_a_legend_entry() {
    let r = run_pipeline(&bundled_scenario("rect").unwrap()).unwrap();
    assert_eq!(r.plans.len(), 3);
    let svg = render_svg(&r.workspace, &r.plans);
    let mut colors = attr(&svg, "<polyline", "stroke");
    assert_eq!(colors.len(), 3);
    colors.sort_unstable();
    colors.dedup();
    assert_eq!(colors.len(), 3);
    for k in 0..3 {
        assert!(svg.contains(&format!(">robot {k}</text>")));
    }
    assert!(svg.contains("id=\"scale\""));
}

fn feature(role: &str, ring: &[[f64; 2]]) -> String {
    let coords: Vec<String> = ring.iter().map(|[x, y]| format!("[{x},{y}]")).collect();
    format!(
        r#"{{"type":"Feature","properties":{{"role":"{role}"}},"geometry":{{"type":"Polygon","coordinates":[[{}]]}}}}"#,
        coords.join(",")
    )
}

fn collection(features: &[String]) -> String {
    format!(r#"{{"type":"FeatureCollection","features":[{}]}}"#, features.join(","))
}

#[test]
fn clockwise_roi_is_accepted_with_a_warning() {
    let cw = [[0.0, 0.0], [0.0, 10.0], [10.0, 10.0], [10.0, 0.0], [0.0, 0.0]];
    let (roi, obs, warnings) = parse_geometry(&collection(&[feature("roi", &cw)])).unwrap();
    assert!(obs.is_empty());
    assert!((roi.area() - 100.0).abs() < 1e-12);
    assert!(warnings.iter().any(|w| w.contains("clockwise")));
}

#[test]
fn malformed_scenarios_are_parse_errors() {
    let sq = [[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0], [0.0, 0.0]];
    let no_roi = collection(&[feature("nfz", &sq)]);
    let not_json = "{\"type\": \"FeatureCollection\", ";
    let wrong_root = r#"{"type":"Feature"}"#;
    for text in [no_roi.as_str(), not_json, wrong_root] {
        let err = parse_geometry(text).unwrap_err();
        assert!(matches!(err, Error::Parse(_)), "{err}");
        assert_eq!(err.exit_code(), 4);
    }
    // self-intersecting ring
    let bow = [[0.0, 0.0], [10.0, 10.0], [10.0, 0.0], [0.0, 10.0], [0.0, 0.0]];
    let err = parse_geometry(&collection(&[feature("roi", &bow)])).unwrap_err();
    assert_eq!(err.exit_code(), 4, "{err}");
    // exclusion zone outside the roi
    let far = [[50.0, 50.0], [60.0, 50.0], [60.0, 60.0], [50.0, 60.0], [50.0, 50.0]];
    let err = parse_geometry(&collection(&[feature("roi", &sq), feature("nfz", &far)])).unwrap_err();
    assert_eq!(err.exit_code(), 4, "{err}");
    // width must come from somewhere
    let err = scenario_from_parts("x", &collection(&[feature("roi", &sq)]), &ScenarioConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Parse(_)));
    assert!(ScenarioConfig::parse(r#"{"swath_widht": 3}"#).is_err());
}

#[test]
fn sweeps_report_one_row_per_value() {
    let sc = bundled_scenario("cape").unwrap();
    let values: Vec<String> = ["0", "0.5", "1"].iter().map(|s| s.to_string()).collect();
    let rep = sweep(&sc, SweepAxis::BufferScale, &values).unwrap();
    assert_eq!(rep.runs.len(), 3);
    assert_eq!(rep.ranking.len(), 3);
    assert_eq!(rep.to_csv().lines().count(), 4);
    let values: Vec<String> = ["mar", "scan", "pca", "minwidth", "bogus"].iter().map(|s| s.to_string()).collect();
    let rep = sweep(&sc, SweepAxis::Orientation, &values).unwrap();
    assert_eq!(rep.runs.len(), 5);
    assert!(rep.runs[4].outcome.is_err());
    assert_eq!(rep.ranking.len(), 4);
    let e: Vec<f64> = rep.ranking.iter().map(|r| r.total_energy_wh).collect();
    assert!(e.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(rep.ranking[0].energy_delta_pct, 0.0);
}

#[test]
fn comparison_ranks_the_lowest_energy_first() {
    let runs: Vec<(String, _)> = [2usize, 3, 4]
        .iter()
        .map(|&n| {
            let sc = bundled_scenario_with(
                "simple",
                &ScenarioConfig {
                    n_robots: Some(n),
                    ..Default::default()
                },
            )
            .unwrap();
            (format!("{n}"), run_pipeline(&sc).unwrap().metrics)
        })
        .collect();
    let rows = compare_runs(&runs);
    let best = runs
        .iter()
        .min_by(|a, b| a.1.fleet.total_energy_wh.total_cmp(&b.1.fleet.total_energy_wh))
        .unwrap();
    assert_eq!(rows[0].label, best.0);
    assert_eq!(rows.iter().map(|r| r.rank).collect::<Vec<_>>(), vec![1, 2, 3]);
}

#[test]
fn empty_plan_set_has_zero_metrics() {
    let r = run_pipeline(&rect_scenario(1)).unwrap();
    let pts: Vec<Point2> = r.workspace.feasible().vertices().copied().collect();
    let empty = SwathSet {
        swaths: vec![],
        frame: SweepFrame::at_angle(&pts, 0.0),
        width: 10.0,
        eta_min: 0.0,
        eta_max: 0.0,
        n_lines: 0,
    };
    let m = evaluate(&[], r.workspace.feasible(), &empty, &EnergyModel::default());
    assert!(m.robots.is_empty());
    let f = m.fleet;
    for v in [
        f.total_length_km,
        f.total_energy_wh,
        f.coverage_only_length_km,
        f.coverage_only_energy_wh,
        f.makespan_s,
        f.coverage_fraction,
        f.swath_coverage_fraction,
    ] {
        assert_eq!(v, 0.0);
    }
}

#[test]
fn energy_does_not_depend_on_where_the_field_is() {
    let sc = bundled_scenario("simple").unwrap();
    let base = run_pipeline(&sc).unwrap();
    // a rotation that keeps the folded sweep angle inside [0, pi); crossing
    // pi flips the line normal and anchors the lines from the other side
    let t = RigidTransform::new(-0.7, p(1234.5, -678.9));
    let mut moved = sc.clone();
    moved.roi = apply_transform(&sc.roi, &t);
    moved.obstacles = sc.obstacles.iter().map(|o| apply_transform(o, &t)).collect();
    moved.depot = Some(t.apply(base.depot));
    let r = run_pipeline(&moved).unwrap();
    assert!((r.frame.angle - (base.frame.angle - 0.7)).abs() < 1e-9);
    assert_eq!(r.swaths.len(), base.swaths.len());
    let (e0, e1) = (base.metrics.fleet.total_energy_wh, r.metrics.fleet.total_energy_wh);
    // the polygonal disk used for rounded offsets does not rotate with the
    // field, so corners differ within the arc tolerance
    assert!((e0 - e1).abs() / e0 < 1e-5, "{e0} vs {e1}");
    assert!((r.allocation.objective - base.allocation.objective).abs() / base.allocation.objective < 1e-5);
}

#[test]
fn every_bundled_scenario_plans() {
    for name in BUNDLED {
        let r = run_pipeline(&bundled_scenario(name).unwrap()).unwrap();
        assert!(!r.plans.is_empty(), "{name}");
        assert!(r.metrics.fleet.total_energy_wh > 0.0);
    }
}
