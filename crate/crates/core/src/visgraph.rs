//! Visibility graph over the feasible space for collision-free transitions.
//!
//! Nodes are the boundary vertices of every component and hole, extra points
//! sampled along each boundary ring, and caller-registered query points
//! (swath endpoints, depot). Two nodes are joined when the straight segment
//! between them stays in the closure of the feasible space.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{ring_edges, BoundaryIndex, Point2, Region, EPS_GEOM};
use crate::workspace::Workspace;

/// Points closer than this are merged into one node.
const MERGE_TOL: f64 = EPS_GEOM;

#[derive(Debug)]
pub struct VisGraph {
    region: Region,
    index: BoundaryIndex,
    nodes: Vec<Point2>,
    adj: Vec<Vec<(u32, f64)>>,
    spacing: f64,
    lookup: HashMap<(i64, i64), Vec<u32>>,
    memo: Mutex<HashMap<PairKey, f64>>,
}

type PairKey = ([u64; 2], [u64; 2]);

fn pair_key(a: Point2, b: Point2) -> PairKey {
    let ka = [a.x.to_bits(), a.y.to_bits()];
    let kb = [b.x.to_bits(), b.y.to_bits()];
    if ka <= kb {
        (ka, kb)
    } else {
        (kb, ka)
    }
}

fn cell_of(p: Point2) -> (i64, i64) {
    const CELL: f64 = 1e-6;
    ((p.x / CELL).floor() as i64, (p.y / CELL).floor() as i64)
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    node: u32,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A computed transition: polyline from start to goal and its length.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub points: Vec<Point2>,
    pub length: f64,
}

impl VisGraph {
    /// Build the graph over `region` with boundary samples every `spacing`
    /// meters and the given query points registered as nodes.
    pub fn build(region: &Region, extra_nodes: &[Point2], spacing: f64) -> Result<VisGraph> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidParameter(format!("sample spacing must be > 0, got {spacing}")));
        }
        if region.is_empty() {
            return Err(Error::InvalidParameter("visibility graph over an empty region".into()));
        }
        let index = BoundaryIndex::new(region);
        let mut g = VisGraph {
            region: region.clone(),
            index,
            nodes: Vec::new(),
            adj: Vec::new(),
            spacing,
            lookup: HashMap::new(),
            memo: Mutex::new(HashMap::new()),
        };
        for ring in region.rings() {
            for e in ring_edges(ring) {
                g.add_node(e.a);
                let n = (e.length() / spacing).ceil() as usize;
                for i in 1..n {
                    g.add_node(e.at(i as f64 / n as f64));
                }
            }
        }
        for &p in extra_nodes {
            if !p.is_finite() || !g.index.locate(p).in_closure() {
                return Err(Error::InfeasibleNode(p));
            }
            g.add_node(p);
        }

        let n = g.nodes.len();
        let upper: Vec<Vec<(u32, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let p = g.nodes[i];
                ((i + 1)..n)
                    .filter(|&j| g.index.segment_inside_unchecked(p, g.nodes[j]))
                    .map(|j| (j as u32, p.dist(g.nodes[j])))
                    .collect()
            })
            .collect();
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (i, row) in upper.into_iter().enumerate() {
            for (j, d) in row {
                adj[i].push((j, d));
                adj[j as usize].push((i as u32, d));
            }
        }
        for row in &mut adj {
            row.sort_by_key(|&(j, _)| j);
        }
        g.adj = adj;
        Ok(g)
    }

    fn add_node(&mut self, p: Point2) -> u32 {
        if let Some(id) = self.find_node(p) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(p);
        self.lookup.entry(cell_of(p)).or_default().push(id);
        id
    }

    /// Id of the node within merge tolerance of `p`, if any.
    pub fn find_node(&self, p: Point2) -> Option<u32> {
        let (cx, cy) = cell_of(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.lookup.get(&(cx + dx, cy + dy)) {
                    for &id in ids {
                        if self.nodes[id as usize].dist(p) <= MERGE_TOL {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn neighbors(&self, i: u32) -> &[(u32, f64)] {
        &self.adj[i as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn index(&self) -> &BoundaryIndex {
        &self.index
    }

    /// True when the straight segment stays in the closure of the region.
    pub fn visible(&self, a: Point2, b: Point2) -> bool {
        self.index.segment_inside(a, b)
    }

    /// Graph nodes visible from `p`, with distances; `p` itself if it is a node.
    fn attach(&self, p: Point2) -> Vec<(u32, f64)> {
        if let Some(id) = self.find_node(p) {
            return vec![(id, 0.0)];
        }
        (0..self.nodes.len() as u32)
            .into_par_iter()
            .filter(|&j| self.index.segment_inside_unchecked(p, self.nodes[j as usize]))
            .map(|j| (j, p.dist(self.nodes[j as usize])))
            .collect()
    }

    /// Single-source distances from a set of seeded nodes.
    fn dijkstra(&self, seeds: &[(u32, f64)]) -> (Vec<f64>, Vec<u32>) {
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![u32::MAX; n];
        let mut heap = BinaryHeap::new();
        for &(s, d) in seeds {
            if d < dist[s as usize] {
                dist[s as usize] = d;
                heap.push(HeapItem { dist: d, node: s });
            }
        }
        while let Some(HeapItem { dist: d, node }) = heap.pop() {
            if d > dist[node as usize] {
                continue;
            }
            for &(j, w) in &self.adj[node as usize] {
                let nd = d + w;
                if nd < dist[j as usize] {
                    dist[j as usize] = nd;
                    prev[j as usize] = node;
                    heap.push(HeapItem { dist: nd, node: j });
                }
            }
        }
        (dist, prev)
    }

    /// Graph distances from registered node `src` to every node.
    pub fn distances_from(&self, src: u32) -> Vec<f64> {
        self.dijkstra(&[(src, 0.0)]).0
    }

    fn unreachable(&self, a: Point2, b: Point2) -> Error {
        let ca = self.region.component_of(a);
        let cb = self.region.component_of(b);
        let detail = match (ca, cb) {
            (Some(i), Some(j)) if i != j => {
                format!("start lies in feasible component {i}, goal in component {j}")
            }
            _ => "no visibility-graph path connects the points".to_string(),
        };
        Error::Unreachable { from: a, to: b, detail }
    }

    /// Shortest collision-free path from `a` to `b`: the straight segment when
    /// it is clear, otherwise the shortest route through graph nodes.
    pub fn shortest_path(&self, a: Point2, b: Point2) -> Result<Path> {
        for p in [a, b] {
            if !p.is_finite() || !self.index.locate(p).in_closure() {
                return Err(Error::InfeasibleNode(p));
            }
        }
        if a.dist(b) <= MERGE_TOL {
            return Ok(Path {
                points: vec![a],
                length: 0.0,
            });
        }
        if self.index.segment_inside_unchecked(a, b) {
            return Ok(Path {
                points: vec![a, b],
                length: a.dist(b),
            });
        }
        let src = self.attach(a);
        let dst = self.attach(b);
        let (dist, prev) = self.dijkstra(&src);
        let best = dst
            .iter()
            .map(|&(j, d)| (j, dist[j as usize] + d))
            .filter(|(_, d)| d.is_finite())
            .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
        let Some((last, length)) = best else {
            return Err(self.unreachable(a, b));
        };
        let mut chain = vec![last];
        let mut cur = last;
        while prev[cur as usize] != u32::MAX {
            cur = prev[cur as usize];
            chain.push(cur);
        }
        chain.reverse();
        let mut points = vec![a];
        points.extend(chain.iter().map(|&i| self.nodes[i as usize]));
        points.push(b);
        points.dedup_by(|p, q| p.dist(*q) <= MERGE_TOL);
        Ok(Path { points, length })
    }

    /// Length of [`shortest_path`](Self::shortest_path), memoized per
    /// unordered pair of points.
    pub fn transition_distance(&self, a: Point2, b: Point2) -> Result<f64> {
        let key = pair_key(a, b);
        if let Some(&d) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(d);
        }
        // canonical direction so the cached value does not depend on query order
        let (p, q) = if [a.x.to_bits(), a.y.to_bits()] == key.0 { (a, b) } else { (b, a) };
        let d = self.shortest_path(p, q)?.length;
        self.memo.lock().expect("memo lock").insert(key, d);
        Ok(d)
    }

    /// Pairwise transition distances between registered points, one
    /// graph search per point. Unreachable pairs are `f64::INFINITY`.
    pub fn distance_matrix(&self, points: &[Point2]) -> Result<Vec<Vec<f64>>> {
        let ids: Vec<u32> = points
            .iter()
            .map(|&p| self.find_node(p).ok_or(Error::InfeasibleNode(p)))
            .collect::<Result<_>>()?;
        let rows: Vec<Vec<f64>> = ids
            .par_iter()
            .map(|&i| {
                let d = self.distances_from(i);
                ids.iter().map(|&j| d[j as usize]).collect()
            })
            .collect();
        // enforce exact symmetry against rounding in different summation orders
        let n = points.len();
        let mut m = rows;
        for i in 0..n {
            m[i][i] = 0.0;
            for j in (i + 1)..n {
                let d = m[i][j].min(m[j][i]);
                m[i][j] = d;
                m[j][i] = d;
            }
        }
        Ok(m)
    }
}

/// Visibility graph over the feasible space of `ws`.
pub fn build_graph(ws: &Workspace, extra_nodes: &[Point2], spacing: f64) -> Result<VisGraph> {
    VisGraph::build(ws.feasible(), extra_nodes, spacing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polygon;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn square_with_hole() -> Region {
        Polygon::new(
            vec![p(-5.0, -5.0), p(6.0, -5.0), p(6.0, 6.0), p(-5.0, 6.0)],
            vec![vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]],
        )
        .unwrap()
        .into()
    }

    #[test]
    fn convex_region_connects_extras_directly() {
        let r: Region = Polygon::rect(0.0, 0.0, 10.0, 10.0).unwrap().into();
        let g = VisGraph::build(&r, &[p(1.0, 1.0), p(9.0, 8.0)], 10.0).unwrap();
        let a = g.find_node(p(1.0, 1.0)).unwrap();
        let b = g.find_node(p(9.0, 8.0)).unwrap();
        assert!(g.neighbors(a).iter().any(|&(j, _)| j == b));
        // complete graph on a convex region
        let n = g.nodes().len();
        assert_eq!(g.edge_count(), n * (n - 1) / 2);
    }

    #[test]
    fn hole_ring_sample_count() {
        let g = VisGraph::build(&square_with_hole(), &[], 0.25).unwrap();
        let on_hole = g
            .nodes()
            .iter()
            .filter(|q| q.x >= -1e-12 && q.x <= 1.0 + 1e-12 && q.y >= -1e-12 && q.y <= 1.0 + 1e-12)
            .count();
        assert_eq!(on_hole, 16);
    }

    #[test]
    fn detour_around_square_obstacle() {
        let g = VisGraph::build(&square_with_hole(), &[], 1.0).unwrap();
        let a = p(-1.0, 0.5);
        let b = p(2.0, 0.5);
        let path = g.shortest_path(a, b).unwrap();
        let expect = 2.0 * (1.0f64 + 0.25).sqrt() + 1.0;
        assert!((path.length - expect).abs() < 1e-12, "{}", path.length);
        assert_eq!(path.points.len(), 4);
        assert_eq!(g.transition_distance(b, a).unwrap(), path.length);
    }

    #[test]
    fn trivial_paths() {
        let g = VisGraph::build(&square_with_hole(), &[], 1.0).unwrap();
        let q = p(3.0, 3.0);
        let same = g.shortest_path(q, q).unwrap();
        assert_eq!(same.points, vec![q]);
        assert_eq!(same.length, 0.0);
        let straight = g.shortest_path(p(-4.0, -4.0), p(5.0, -4.0)).unwrap();
        assert_eq!(straight.points.len(), 2);
        assert!((straight.length - 9.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_outside_nodes_and_split_components() {
        let err = VisGraph::build(&square_with_hole(), &[p(0.5, 0.5)], 1.0).unwrap_err();
        assert!(matches!(err, Error::InfeasibleNode(_)));

        let two: Region = Region::new(vec![
            Polygon::rect(0.0, 0.0, 1.0, 1.0).unwrap(),
            Polygon::rect(3.0, 0.0, 4.0, 1.0).unwrap(),
        ]);
        let g = VisGraph::build(&two, &[], 0.5).unwrap();
        match g.shortest_path(p(0.5, 0.5), p(3.5, 0.5)) {
            Err(Error::Unreachable { detail, .. }) => assert!(detail.contains("component")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn matrix_matches_queries() {
        let pts = [p(-1.0, 0.5), p(2.0, 0.5), p(0.5, -2.0), p(0.5, 3.0)];
        let g = VisGraph::build(&square_with_hole(), &pts, 1.0).unwrap();
        let m = g.distance_matrix(&pts).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let d = g.transition_distance(pts[i], pts[j]).unwrap();
                assert!((m[i][j] - d).abs() < 1e-12);
                assert_eq!(m[i][j], m[j][i]);
            }
        }
    }
}
