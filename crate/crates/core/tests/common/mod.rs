//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's geometry beyond plain types.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use fleetcover::geom::{Point2, Polygon};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

/// Random star-shaped simple polygon around `c`: sorted jittered angles,
/// radii in `[r_min, r_max]`.
pub fn star_polygon(rng: &mut ChaCha8Rng, n: usize, c: Point2, r_min: f64, r_max: f64) -> Polygon {
    loop {
        let step = std::f64::consts::TAU / n as f64;
        let pts: Vec<Point2> = (0..n)
            .map(|k| {
                let a = (k as f64 + rng.random_range(0.1..0.9)) * step;
                let r = rng.random_range(r_min..r_max);
                p(c.x + r * a.cos(), c.y + r * a.sin())
            })
            .collect();
        if let Ok(poly) = Polygon::new(pts, vec![]) {
            return poly;
        }
    }
}

pub fn shoelace(ring: &[Point2]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Hull vertices by the pairwise half-plane test: `(i, j)` is a hull edge
/// when every other point is strictly left of it or strictly between its
/// endpoints. Returned sorted lexicographically.
pub fn hull_oracle(pts: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j || pts[i] == pts[j] {
                continue;
            }
            let (a, b) = (pts[i], pts[j]);
            let edge = pts.iter().all(|&c| {
                if c == a || c == b {
                    return true;
                }
                let o = orient(a, b, c);
                if o > 0.0 {
                    return true;
                }
                if o < 0.0 {
                    return false;
                }
                let t = (c - a).dot(b - a) / (b - a).norm_sq();
                t > 0.0 && t < 1.0
            });
            if edge {
                out.push(a);
                out.push(b);
            }
        }
    }
    sort_points(&mut out);
    out.dedup();
    out
}

pub fn sort_points(v: &mut [Point2]) {
    v.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
}

/// Area of the smallest rectangle with sides at angle `theta` (and
/// `theta + 90 deg`) enclosing `pts`.
pub fn rect_area_at(pts: &[Point2], theta: f64) -> f64 {
    let (c, s) = (theta.cos(), theta.sin());
    let (mut u0, mut u1, mut v0, mut v1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for q in pts {
        let u = q.x * c + q.y * s;
        let v = -q.x * s + q.y * c;
        u0 = u0.min(u);
        u1 = u1.max(u);
        v0 = v0.min(v);
        v1 = v1.max(v);
    }
    (u1 - u0) * (v1 - v0)
}

/// Extent of `pts` along the unit normal of angle `theta`.
pub fn height_at(pts: &[Point2], theta: f64) -> f64 {
    let (c, s) = (theta.cos(), theta.sin());
    let (mut v0, mut v1) = (f64::MAX, f64::MIN);
    for q in pts {
        let v = -q.x * s + q.y * c;
        v0 = v0.min(v);
        v1 = v1.max(v);
    }
    v1 - v0
}

/// Minimum enclosing-rectangle area over `[0, 90)` degrees in steps of `step_deg`.
pub fn scan_min_rect_area(pts: &[Point2], step_deg: f64) -> f64 {
    let n = (90.0 / step_deg).round() as usize;
    (0..n)
        .map(|k| rect_area_at(pts, (k as f64 * step_deg).to_radians()))
        .fold(f64::INFINITY, f64::min)
}

pub fn seg_dist(q: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let l2 = d.norm_sq();
    let t = if l2 == 0.0 { 0.0 } else { ((q - a).dot(d) / l2).clamp(0.0, 1.0) };
    q.dist(a + d * t)
}

fn ring_edges(ring: &[Point2]) -> impl Iterator<Item = (Point2, Point2)> + '_ {
    (0..ring.len()).map(move |i| (ring[i], ring[(i + 1) % ring.len()]))
}

/// Even-odd ray cast over all rings (boundary handling left undefined).
pub fn even_odd(q: Point2, rings: &[Vec<Point2>]) -> bool {
    let mut inside = false;
    for ring in rings {
        for (a, b) in ring_edges(ring) {
            if (a.y > q.y) != (b.y > q.y) {
                let x = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if q.x < x {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

/// Winding number of all rings around `q`.
pub fn winding(q: Point2, rings: &[Vec<Point2>]) -> i32 {
    let mut w = 0;
    for ring in rings {
        for (a, b) in ring_edges(ring) {
            if a.y <= q.y {
                if b.y > q.y && orient(a, b, q) > 0.0 {
                    w += 1;
                }
            } else if b.y <= q.y && orient(a, b, q) < 0.0 {
                w -= 1;
            }
        }
    }
    w
}

pub fn rings_of(poly: &Polygon) -> Vec<Vec<Point2>> {
    poly.rings().map(|r| r.to_vec()).collect()
}

pub fn boundary_dist(q: Point2, rings: &[Vec<Point2>]) -> f64 {
    rings
        .iter()
        .flat_map(|r| ring_edges(r))
        .map(|(a, b)| seg_dist(q, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Signed distance to the boundary of the region bounded by `rings`:
/// positive inside, negative outside.
pub fn signed_dist(q: Point2, rings: &[Vec<Point2>]) -> f64 {
    let d = boundary_dist(q, rings);
    if even_odd(q, rings) {
        d
    } else {
        -d
    }
}

/// Occupancy grid over a rectangle with a boolean per cell center.
pub struct Grid {
    pub x0: f64,
    pub y0: f64,
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
    pub free: Vec<bool>,
}

impl Grid {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64, cell: f64, free: impl Fn(Point2) -> bool) -> Grid {
        let nx = ((x1 - x0) / cell).ceil() as usize;
        let ny = ((y1 - y0) / cell).ceil() as usize;
        let mut g = Grid {
            x0,
            y0,
            cell,
            nx,
            ny,
            free: vec![false; nx * ny],
        };
        for j in 0..ny {
            for i in 0..nx {
                g.free[j * nx + i] = free(g.center(i, j));
            }
        }
        g
    }

    pub fn center(&self, i: usize, j: usize) -> Point2 {
        p(self.x0 + (i as f64 + 0.5) * self.cell, self.y0 + (j as f64 + 0.5) * self.cell)
    }

    pub fn cell_of(&self, q: Point2) -> (usize, usize) {
        let i = ((q.x - self.x0) / self.cell).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = ((q.y - self.y0) / self.cell).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }

    /// Number of 4-connected components of free cells.
    pub fn components(&self) -> usize {
        let mut label = vec![false; self.free.len()];
        let mut count = 0;
        for start in 0..self.free.len() {
            if !self.free[start] || label[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            label[start] = true;
            while let Some(k) = stack.pop() {
                let (i, j) = (k % self.nx, k / self.nx);
                let mut push = |ii: usize, jj: usize| {
                    let kk = jj * self.nx + ii;
                    if self.free[kk] && !label[kk] {
                        label[kk] = true;
                        stack.push(kk);
                    }
                };
                if i > 0 {
                    push(i - 1, j);
                }
                if i + 1 < self.nx {
                    push(i + 1, j);
                }
                if j > 0 {
                    push(i, j - 1);
                }
                if j + 1 < self.ny {
                    push(i, j + 1);
                }
            }
        }
        count
    }
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Any-angle grid search from `a` to `b` over the free cells of `grid`
/// (A* with lazy parent re-linking, as in Lazy Theta*). A node's parent may
/// be any earlier node it can see, so paths are not restricted to the eight
/// grid directions. Returns the path length.
pub fn grid_path_length(grid: &Grid, a: Point2, b: Point2, visible: &dyn Fn(Point2, Point2) -> bool) -> Option<f64> {
    if visible(a, b) {
        return Some(a.dist(b));
    }
    let (ai, aj) = grid.cell_of(a);
    let (bi, bj) = grid.cell_of(b);
    let n = grid.free.len();
    let src = aj * grid.nx + ai;
    let dst = bj * grid.nx + bi;
    let pos = |k: usize| {
        if k == src {
            a
        } else if k == dst {
            b
        } else {
            grid.center(k % grid.nx, k / grid.nx)
        }
    };
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    g[src] = 0.0;
    parent[src] = src;
    heap.push(Item(a.dist(b), src));
    let neighbors = |k: usize| {
        let (i, j) = ((k % grid.nx) as i64, (k / grid.nx) as i64);
        let mut out = Vec::with_capacity(8);
        for (di, dj) in [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)] {
            let (ii, jj) = (i + di, j + dj);
            if ii < 0 || jj < 0 || ii >= grid.nx as i64 || jj >= grid.ny as i64 {
                continue;
            }
            let kk = jj as usize * grid.nx + ii as usize;
            if grid.free[kk] || kk == dst {
                out.push(kk);
            }
        }
        out
    };
    while let Some(Item(_, k)) = heap.pop() {
        if closed[k] {
            continue;
        }
        // lazy check: fall back to the best closed neighbor when the
        // inherited parent turns out not to be visible
        if parent[k] != k && !visible(pos(parent[k]), pos(k)) {
            let mut best = (f64::INFINITY, usize::MAX);
            for m in neighbors(k) {
                if closed[m] {
                    let c = g[m] + pos(m).dist(pos(k));
                    if c < best.0 {
                        best = (c, m);
                    }
                }
            }
            g[k] = best.0;
            parent[k] = best.1;
        }
        closed[k] = true;
        if k == dst {
            return Some(g[dst]);
        }
        let pk = parent[k];
        for m in neighbors(k) {
            if closed[m] {
                continue;
            }
            let c = g[pk] + pos(pk).dist(pos(m));
            if c < g[m] {
                g[m] = c;
                parent[m] = pk;
                heap.push(Item(c + pos(m).dist(b), m));
            }
        }
    }
    None
}

/// Segment visibility by dense sampling against a point predicate.
pub fn sampled_visible(a: Point2, b: Point2, step: f64, inside: &dyn Fn(Point2) -> bool) -> bool {
    let n = (a.dist(b) / step).ceil().max(1.0) as usize;
    (0..=n).all(|k| inside(a.lerp(b, k as f64 / n as f64)))
}

/// Exact single-depot tour optimum by dynamic programming over subsets.
/// `cost` has the depot at index `n`; swath lengths are added once.
pub fn held_karp(cost: &[Vec<f64>], lengths: &[f64]) -> f64 {
    let n = lengths.len();
    let full = 1usize << n;
    let mut dp = vec![vec![f64::INFINITY; n]; full];
    for j in 0..n {
        dp[1 << j][j] = cost[n][j];
    }
    for mask in 1..full {
        for j in 0..n {
            let cur = dp[mask][j];
            if !cur.is_finite() || mask & (1 << j) == 0 {
                continue;
            }
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let nm = mask | (1 << k);
                let v = cur + cost[j][k];
                if v < dp[nm][k] {
                    dp[nm][k] = v;
                }
            }
        }
    }
    let best = (0..n).map(|j| dp[full - 1][j] + cost[j][n]).fold(f64::INFINITY, f64::min);
    best + lengths.iter().sum::<f64>()
}

/// Optimal closed-tour cost (swath lengths included) for every subset of
/// swaths, indexed by bitmask; the empty subset costs 0.
pub fn subset_tour_costs(cost: &[Vec<f64>], lengths: &[f64]) -> Vec<f64> {
    let n = lengths.len();
    let full = 1usize << n;
    let mut dp = vec![vec![f64::INFINITY; n]; full];
    for j in 0..n {
        dp[1 << j][j] = cost[n][j];
    }
    for mask in 1..full {
        for j in 0..n {
            let cur = dp[mask][j];
            if !cur.is_finite() || mask & (1 << j) == 0 {
                continue;
            }
            for k in 0..n {
                if mask & (1 << k) == 0 {
                    let v = cur + cost[j][k];
                    let nm = mask | (1 << k);
                    if v < dp[nm][k] {
                        dp[nm][k] = v;
                    }
                }
            }
        }
    }
    (0..full)
        .map(|mask| {
            if mask == 0 {
                return 0.0;
            }
            let len: f64 = (0..n).filter(|j| mask & (1 << j) != 0).map(|j| lengths[j]).sum();
            (0..n)
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| dp[mask][j] + cost[j][n])
                .fold(f64::INFINITY, f64::min)
                + len
        })
        .collect()
}

/// Exact minimum summed tour cost over every assignment of swaths to
/// `robots` tours with at least `n / robots` swaths each.
pub fn partition_oracle(cost: &[Vec<f64>], lengths: &[f64], robots: usize) -> f64 {
    let n = lengths.len();
    let min_size = n / robots;
    let tour = subset_tour_costs(cost, lengths);
    let mut best = f64::INFINITY;
    let mut label = vec![0usize; n];
    loop {
        let mut masks = vec![0usize; robots];
        for (j, &r) in label.iter().enumerate() {
            masks[r] |= 1 << j;
        }
        if masks.iter().all(|m| m.count_ones() as usize >= min_size) {
            best = best.min(masks.iter().map(|&m| tour[m]).sum());
        }
        // next assignment in base `robots`
        let mut k = 0;
        while k < n && label[k] == robots - 1 {
            label[k] = 0;
            k += 1;
        }
        if k == n {
            return best;
        }
        label[k] += 1;
    }
}

/// Random allocation instance: horizontal segments in a 100 x 100 box,
/// costs as the nearest endpoint distance, depot somewhere in the box.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (Point2, Vec<Vec<f64>>, Vec<f64>) {
    let segs: Vec<(Point2, Point2)> = (0..n)
        .map(|_| {
            let x = rng.random_range(0.0..80.0);
            let y = rng.random_range(0.0..100.0);
            let l = rng.random_range(5.0..20.0);
            (p(x, y), p(x + l, y))
        })
        .collect();
    let depot = p(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0));
    let mut cost = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let (a, b) = segs[i];
                let (c, d) = segs[j];
                cost[i][j] = a.dist(c).min(a.dist(d)).min(b.dist(c)).min(b.dist(d));
            }
        }
        let (a, b) = segs[i];
        cost[i][n] = depot.dist(a).min(depot.dist(b));
        cost[n][i] = cost[i][n];
    }
    let lengths = segs.iter().map(|(a, b)| a.dist(*b)).collect();
    (depot, cost, lengths)
}

/// Random room with one to three separated convex obstacles. Returns the
/// feasible space for a 0.5 m headland.
pub fn random_layout(seed: u64) -> fleetcover::workspace::Workspace {
    let mut r = rng(seed);
    let roi = Polygon::rect(0.0, 0.0, 30.0, 20.0).unwrap();
    let count = r.random_range(1..=3);
    let mut centers: Vec<Point2> = Vec::new();
    let mut obstacles = Vec::new();
    let mut tries = 0;
    while obstacles.len() < count {
        tries += 1;
        if tries % 100 == 0 {
            // earlier picks left no room; start over
            centers.clear();
            obstacles.clear();
        }
        let c = p(r.random_range(6.0..24.0), r.random_range(5.0..15.0));
        if centers.iter().any(|q| q.dist(c) < 9.0) {
            continue;
        }
        let n = r.random_range(3..=5);
        let poly = star_polygon(&mut r, n, c, 1.5, 3.0);
        let hull = fleetcover::geom::convex_hull(poly.exterior()).unwrap();
        centers.push(c);
        obstacles.push(hull);
    }
    fleetcover::workspace::Workspace::build_feasible(roi, obstacles, 0.5).unwrap()
}

/// Point drawn uniformly from the interior of `region`, at least `margin`
/// from its boundary.
pub fn random_interior_point(r: &mut ChaCha8Rng, region: &fleetcover::geom::Region, margin: f64) -> Point2 {
    let bb = region.bbox();
    let rings: Vec<Vec<Point2>> = region.rings().map(|x| x.to_vec()).collect();
    loop {
        let q = p(r.random_range(bb.min.x..bb.max.x), r.random_range(bb.min.y..bb.max.y));
        if even_odd(q, &rings) && boundary_dist(q, &rings) > margin {
            return q;
        }
    }
}

/// Grid-search distance between two points of `region` with cell `cell`.
pub fn region_grid_distance(region: &fleetcover::geom::Region, cell: f64, pairs: &[(Point2, Point2)]) -> Vec<Option<f64>> {
    let rings: Vec<Vec<Point2>> = region.rings().map(|x| x.to_vec()).collect();
    let inside = |q: Point2| even_odd(q, &rings) || boundary_dist(q, &rings) <= 1e-9;
    let bb = region.bbox();
    let grid = Grid::new(bb.min.x, bb.min.y, bb.max.x, bb.max.y, cell, inside);
    let vis = |a: Point2, b: Point2| sampled_visible(a, b, cell / 4.0, &inside);
    pairs.iter().map(|&(a, b)| grid_path_length(&grid, a, b, &vis)).collect()
}
