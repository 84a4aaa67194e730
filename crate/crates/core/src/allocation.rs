//! Swath-to-robot allocation: a single-depot multi-robot TSP over swaths,
//! minimizing the summed tour length subject to a minimum tour size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::swathgen::SwathSet;
use crate::visgraph::VisGraph;

/// Largest instance accepted by [`brute_force_mtsp`].
pub const BRUTE_FORCE_LIMIT: usize = 9;

const IMPROVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationInstance {
    pub depot: Point2,
    pub n_robots: usize,
    pub min_tour_size: usize,
    /// Traversal length of each swath.
    pub lengths: Vec<f64>,
    /// `(n + 1) x (n + 1)` transition costs; index `n` is the depot.
    pub cost: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl AllocationInstance {
    /// Instance from a precomputed cost matrix whose last row/column is the depot.
    pub fn from_matrix(depot: Point2, cost: Vec<Vec<f64>>, lengths: Vec<f64>, n_robots: usize) -> Result<Self> {
        let n = lengths.len();
        if n_robots == 0 {
            return Err(Error::InvalidParameter("at least one robot is required".into()));
        }
        if n == 0 {
            return Err(Error::EmptyPlan("no swaths to allocate".into()));
        }
        if cost.len() != n + 1 || cost.iter().any(|r| r.len() != n + 1) {
            return Err(Error::InvalidParameter(format!(
                "cost matrix must be {0}x{0} for {n} swaths",
                n + 1
            )));
        }
        for i in 0..=n {
            if cost[i][i] != 0.0 {
                return Err(Error::InvalidParameter(format!("cost diagonal entry {i} is not zero")));
            }
            for j in 0..=n {
                if !cost[i][j].is_finite() || cost[i][j] < 0.0 || (cost[i][j] - cost[j][i]).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(format!("cost entry ({i}, {j}) is not a symmetric finite distance")));
                }
            }
        }
        let mut warnings = Vec::new();
        if n < n_robots {
            warnings.push(format!(
                "{n} swaths for {n_robots} robots: minimum tour size relaxed to 0, some robots stay idle"
            ));
        }
        Ok(AllocationInstance {
            depot,
            n_robots,
            min_tour_size: n / n_robots,
            lengths,
            cost,
            warnings,
        })
    }

    pub fn n_swaths(&self) -> usize {
        self.lengths.len()
    }

    pub fn depot_index(&self) -> usize {
        self.lengths.len()
    }

    /// Depot to first, consecutive transitions, swath lengths, last to depot.
    pub fn tour_cost(&self, tour: &[usize]) -> f64 {
        if tour.is_empty() {
            return 0.0;
        }
        let d = self.depot_index();
        let mut total = self.cost[d][tour[0]] + self.cost[tour[tour.len() - 1]][d];
        for w in tour.windows(2) {
            total += self.cost[w[0]][w[1]];
        }
        total + tour.iter().map(|&m| self.lengths[m]).sum::<f64>()
    }

    pub fn objective(&self, tours: &[Vec<usize>]) -> f64 {
        tours.iter().map(|t| self.tour_cost(t)).sum()
    }

    /// Partition and minimum-size check.
    pub fn check(&self, tours: &[Vec<usize>]) -> Result<()> {
        if tours.len() != self.n_robots {
            return Err(Error::InvalidParameter(format!("{} tours for {} robots", tours.len(), self.n_robots)));
        }
        let mut seen = vec![false; self.n_swaths()];
        for (r, t) in tours.iter().enumerate() {
            if t.len() < self.min_tour_size {
                return Err(Error::InvalidParameter(format!(
                    "tour {r} has {} swaths, minimum is {}",
                    t.len(),
                    self.min_tour_size
                )));
            }
            for &m in t {
                if m >= seen.len() || seen[m] {
                    return Err(Error::InvalidParameter(format!("swath {m} assigned twice or out of range")));
                }
                seen[m] = true;
            }
        }
        if let Some(m) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!("swath {m} is not assigned")));
        }
        Ok(())
    }
}

/// Transition costs between swaths: the shortest collision-free distance
/// over the four endpoint pairings; depot costs use the nearer endpoint.
pub fn build_cost_matrix(swaths: &SwathSet, g: &VisGraph, depot: Point2, n_robots: usize) -> Result<AllocationInstance> {
    let n = swaths.len();
    let mut pts: Vec<Point2> = Vec::with_capacity(2 * n + 1);
    for s in &swaths.swaths {
        pts.push(s.a);
        pts.push(s.b);
    }
    pts.push(depot);
    let dm = g.distance_matrix(&pts)?;
    let di = 2 * n;
    let stranded: Vec<usize> = (0..n)
        .filter(|&m| !dm[di][2 * m].is_finite() && !dm[di][2 * m + 1].is_finite())
        .collect();
    if !stranded.is_empty() {
        return Err(Error::InfeasibleInstance { stranded });
    }
    let mut cost = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in (i + 1)..n {
            let c = dm[2 * i][2 * j]
                .min(dm[2 * i][2 * j + 1])
                .min(dm[2 * i + 1][2 * j])
                .min(dm[2 * i + 1][2 * j + 1]);
            cost[i][j] = c;
            cost[j][i] = c;
        }
        let c = dm[di][2 * i].min(dm[di][2 * i + 1]);
        cost[i][n] = c;
        cost[n][i] = c;
    }
    let lengths = swaths.swaths.iter().map(|s| s.length).collect();
    AllocationInstance::from_matrix(depot, cost, lengths, n_robots)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub tours: Vec<Vec<usize>>,
    pub objective: f64,
    /// Best objective after each accepted improvement, non-increasing.
    pub trace: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed: u64,
    /// Improving moves allowed per local search; `None` means `200 * N_S`.
    pub move_budget: Option<usize>,
    /// Perturb-and-descend rounds after the first local optimum; `None`
    /// scales with instance size.
    pub perturbation_rounds: Option<usize>,
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolverConfig {
            seed,
            ..Self::default()
        }
    }
}

struct Search<'a> {
    inst: &'a AllocationInstance,
    tours: Vec<Vec<usize>>,
    min: usize,
    budget: usize,
    moves: usize,
}

impl<'a> Search<'a> {
    fn c(&self, i: usize, j: usize) -> f64 {
        self.inst.cost[i][j]
    }

    /// Node before position `i` of tour `r` (depot at the ends).
    fn before(&self, r: usize, i: usize) -> usize {
        if i == 0 {
            self.inst.depot_index()
        } else {
            self.tours[r][i - 1]
        }
    }

    fn after(&self, r: usize, i: usize) -> usize {
        self.tours[r].get(i + 1).copied().unwrap_or(self.inst.depot_index())
    }

    fn exhausted(&self) -> bool {
        self.moves >= self.budget
    }

    fn two_opt(&mut self) -> bool {
        for r in 0..self.tours.len() {
            let len = self.tours[r].len();
            for i in 0..len {
                for j in (i + 1)..len {
                    let (p, n) = (self.before(r, i), self.after(r, j));
                    let (ti, tj) = (self.tours[r][i], self.tours[r][j]);
                    let delta = self.c(p, tj) + self.c(ti, n) - self.c(p, ti) - self.c(tj, n);
                    if delta < -IMPROVE_TOL {
                        self.tours[r][i..=j].reverse();
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Move a chain of 1..=3 consecutive swaths to any position of any
    /// tour, optionally reversed.
    fn chain_move(&mut self) -> bool {
        let d = self.inst.depot_index();
        for ra in 0..self.tours.len() {
            for k in 1..=3usize {
                let la = self.tours[ra].len();
                if k > la {
                    break;
                }
                for i in 0..=(la - k) {
                    let (p, n) = (self.before(ra, i), self.after(ra, i + k - 1));
                    let (first, last) = (self.tours[ra][i], self.tours[ra][i + k - 1]);
                    let gain = self.c(p, first) + self.c(last, n) - self.c(p, n);
                    if gain <= IMPROVE_TOL {
                        continue;
                    }
                    for rb in 0..self.tours.len() {
                        if rb != ra && la - k < self.min {
                            continue;
                        }
                        // the target sequence with the chain removed when intra-tour
                        let target: Vec<usize> = if rb == ra {
                            let t = &self.tours[ra];
                            t[..i].iter().chain(&t[i + k..]).copied().collect()
                        } else {
                            self.tours[rb].clone()
                        };
                        for g in 0..=target.len() {
                            if rb == ra && g == i {
                                continue;
                            }
                            let x = if g == 0 { d } else { target[g - 1] };
                            let y = target.get(g).copied().unwrap_or(d);
                            let fwd = self.c(x, first) + self.c(last, y) - self.c(x, y);
                            let rev = self.c(x, last) + self.c(first, y) - self.c(x, y);
                            let (ins, reversed) = if rev < fwd { (rev, true) } else { (fwd, false) };
                            if ins - gain < -IMPROVE_TOL {
                                let mut chain: Vec<usize> = self.tours[ra].drain(i..i + k).collect();
                                if reversed {
                                    chain.reverse();
                                }
                                let dest = if rb == ra { &mut self.tours[ra] } else { &mut self.tours[rb] };
                                dest.splice(g..g, chain);
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn swap(&mut self) -> bool {
        let nt = self.tours.len();
        for ra in 0..nt {
            for rb in (ra + 1)..nt {
                for i in 0..self.tours[ra].len() {
                    for j in 0..self.tours[rb].len() {
                        let (x, y) = (self.tours[ra][i], self.tours[rb][j]);
                        let (pa, na) = (self.before(ra, i), self.after(ra, i));
                        let (pb, nb) = (self.before(rb, j), self.after(rb, j));
                        let delta = self.c(pa, y) + self.c(y, na) - self.c(pa, x) - self.c(x, na) + self.c(pb, x)
                            + self.c(x, nb)
                            - self.c(pb, y)
                            - self.c(y, nb);
                        if delta < -IMPROVE_TOL {
                            self.tours[ra][i] = y;
                            self.tours[rb][j] = x;
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Exchange tails between two tours.
    fn two_opt_star(&mut self) -> bool {
        let d = self.inst.depot_index();
        let nt = self.tours.len();
        for ra in 0..nt {
            for rb in (ra + 1)..nt {
                let (la, lb) = (self.tours[ra].len(), self.tours[rb].len());
                for i in 0..=la {
                    for j in 0..=lb {
                        if i + (lb - j) < self.min || j + (la - i) < self.min {
                            continue;
                        }
                        let a0 = if i == 0 { d } else { self.tours[ra][i - 1] };
                        let a1 = self.tours[ra].get(i).copied().unwrap_or(d);
                        let b0 = if j == 0 { d } else { self.tours[rb][j - 1] };
                        let b1 = self.tours[rb].get(j).copied().unwrap_or(d);
                        let delta = self.c(a0, b1) + self.c(b0, a1) - self.c(a0, a1) - self.c(b0, b1);
                        if delta < -IMPROVE_TOL {
                            let tail_a: Vec<usize> = self.tours[ra].split_off(i);
                            let tail_b: Vec<usize> = self.tours[rb].split_off(j);
                            self.tours[ra].extend(tail_b);
                            self.tours[rb].extend(tail_a);
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Descend to a local optimum or until the move budget runs out,
    /// recording the objective after every improving move.
    fn descend(&mut self, trace: &mut Vec<f64>, best: f64) {
        let mut best = best;
        while !self.exhausted() {
            let improved = self.two_opt() || self.chain_move() || self.swap() || self.two_opt_star();
            if !improved {
                break;
            }
            self.moves += 1;
            let obj = self.inst.objective(&self.tours);
            if obj < best {
                best = obj;
                trace.push(obj);
            }
        }
    }
}

/// Contiguous blocks of the z-ordered swath list, sizes differing by at
/// most one, each ordered by nearest neighbor from the depot.
fn seed_tours(inst: &AllocationInstance) -> Vec<Vec<usize>> {
    let n = inst.n_swaths();
    let r = inst.n_robots;
    let d = inst.depot_index();
    let mut tours = Vec::with_capacity(r);
    let mut start = 0;
    for k in 0..r {
        let size = n / r + usize::from(k < n % r);
        let mut pool: Vec<usize> = (start..start + size).collect();
        start += size;
        let mut tour = Vec::with_capacity(size);
        let mut cur = d;
        while !pool.is_empty() {
            let (pi, _) = pool
                .iter()
                .enumerate()
                .min_by(|a, b| inst.cost[cur][*a.1].total_cmp(&inst.cost[cur][*b.1]))
                .expect("pool is non-empty");
            cur = pool.remove(pi);
            tour.push(cur);
        }
        tours.push(tour);
    }
    tours
}

/// Random relocations (exchanges where a relocation would break the
/// minimum tour size), plus a segment reversal, used to escape local optima.
fn perturb(tours: &mut [Vec<usize>], min: usize, rng: &mut ChaCha8Rng) {
    let nt = tours.len();
    let kicks = 2 + rng.random_range(0..3usize);
    for _ in 0..kicks {
        let ra = rng.random_range(0..nt);
        if tours[ra].is_empty() {
            continue;
        }
        let rb = rng.random_range(0..nt);
        let i = rng.random_range(0..tours[ra].len());
        if rb != ra && tours[ra].len() <= min {
            // a relocation would break the size floor; exchange instead
            if !tours[rb].is_empty() {
                let j = rng.random_range(0..tours[rb].len());
                let (x, y) = (tours[ra][i], tours[rb][j]);
                tours[ra][i] = y;
                tours[rb][j] = x;
            }
            continue;
        }
        let m = tours[ra].remove(i);
        let g = rng.random_range(0..=tours[rb].len());
        tours[rb].insert(g, m);
    }
    let r = rng.random_range(0..nt);
    let len = tours[r].len();
    if len >= 2 {
        let i = rng.random_range(0..len - 1);
        let j = rng.random_range(i + 1..len);
        tours[r][i..=j].reverse();
    }
}

/// Heuristic solver: balanced contiguous seeding, local search over
/// 2-opt, chain relocation, swap and tail exchange, then seeded
/// perturbation rounds keeping the best solution found.
pub fn solve_mtsp(inst: &AllocationInstance, config: &SolverConfig) -> Result<Allocation> {
    let n = inst.n_swaths();
    let budget = config.move_budget.unwrap_or(200 * n).max(1);
    let rounds = config
        .perturbation_rounds
        .unwrap_or_else(|| (4000 / n.max(1)).clamp(4, 60));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut search = Search {
        inst,
        tours: seed_tours(inst),
        min: inst.min_tour_size,
        budget,
        moves: 0,
    };
    let mut best_obj = inst.objective(&search.tours);
    let mut trace = vec![best_obj];
    search.descend(&mut trace, best_obj);
    let mut best = search.tours.clone();
    best_obj = inst.objective(&best);

    if inst.n_robots > 1 || n > 3 {
        for _ in 0..rounds {
            let mut cand = best.clone();
            perturb(&mut cand, inst.min_tour_size, &mut rng);
            search.tours = cand;
            search.moves = 0;
            let mut local_trace = Vec::new();
            search.descend(&mut local_trace, f64::INFINITY);
            let obj = inst.objective(&search.tours);
            if obj < best_obj - IMPROVE_TOL {
                best_obj = obj;
                best = search.tours.clone();
                trace.push(obj);
            }
        }
    }
    inst.check(&best)?;
    Ok(Allocation {
        tours: best,
        objective: best_obj,
        trace,
        warnings: inst.warnings.clone(),
    })
}

/// Visit every permutation of `items` (Heap's algorithm).
fn for_each_permutation(items: &mut [usize], f: &mut impl FnMut(&[usize])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Exact optimum by exhaustive enumeration of swath-to-robot labelings
/// and visiting orders. Only for `N_S <= 9`.
pub fn brute_force_mtsp(inst: &AllocationInstance) -> Result<Allocation> {
    let n = inst.n_swaths();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    // best closed tour through each subset
    let full = 1usize << n;
    let mut best_cost = vec![0.0; full];
    let mut best_order: Vec<Vec<usize>> = vec![Vec::new(); full];
    for mask in 1..full {
        let mut items: Vec<usize> = (0..n).filter(|&m| mask >> m & 1 == 1).collect();
        let mut bc = f64::INFINITY;
        let mut bo = Vec::new();
        for_each_permutation(&mut items, &mut |perm| {
            let c = inst.tour_cost(perm);
            if c < bc {
                bc = c;
                bo = perm.to_vec();
            }
        });
        best_cost[mask] = bc;
        best_order[mask] = bo;
    }

    let r = inst.n_robots;
    let mut labels = vec![0usize; n];
    let mut best_total = f64::INFINITY;
    let mut best_masks = vec![0usize; r];
    let mut masks = vec![0usize; r];
    loop {
        masks.iter_mut().for_each(|m| *m = 0);
        for (m, &l) in labels.iter().enumerate() {
            masks[l] |= 1 << m;
        }
        if masks.iter().all(|&m| m.count_ones() as usize >= inst.min_tour_size) {
            let total: f64 = masks.iter().map(|&m| best_cost[m]).sum();
            if total < best_total {
                best_total = total;
                best_masks.copy_from_slice(&masks);
            }
        }
        // next labeling in base r
        let mut k = 0;
        while k < n {
            labels[k] += 1;
            if labels[k] < r {
                break;
            }
            labels[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    let tours: Vec<Vec<usize>> = best_masks.iter().map(|&m| best_order[m].clone()).collect();
    Ok(Allocation {
        objective: inst.objective(&tours),
        tours,
        trace: vec![best_total],
        warnings: inst.warnings.clone(),
    })
}
