//! Exact crossing numbers of small weighted graphs and a planarization
//! heuristic for larger ones.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::drawing::{CombinatorialDrawing, RefineOptions, SeqForm};
use crate::error::{domain, Result};
use crate::graph::{QuotientGraph, WeightedGraph};
use crate::planarity;
use crate::weight::{self, Rat};

#[derive(Clone, Debug, Serialize)]
pub struct Budget {
    /// Search nodes (enumerated crossing sets plus realizability tests).
    pub nodes: u64,
    pub seconds: Option<f64>,
    /// Heuristic restarts used for the incumbent.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { nodes: 3_000_000, seconds: None, restarts: 20, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct CrSolution {
    pub value: f64,
    pub value_exact: Rat,
    pub drawing: CombinatorialDrawing,
    pub exact: bool,
    /// Every crossing set cheaper than this was refuted.
    pub lower: f64,
    pub nodes_explored: u64,
    pub budget: Budget,
}

impl CrSolution {
    fn from_drawing(drawing: CombinatorialDrawing, exact: bool, lower: f64, nodes: u64, budget: Budget) -> Self {
        CrSolution { value: drawing.crossing_weight(), value_exact: drawing.crossing_weight_exact(), drawing, exact, lower, nodes_explored: nodes, budget }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "value_exact": weight::format(&self.value_exact),
            "exact": self.exact,
            "lower": self.lower,
            "nodes_explored": self.nodes_explored,
            "budget": self.budget,
            "drawing": self.drawing.to_json(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct UpperOptions {
    pub restarts: usize,
    pub seed: u64,
    pub refine_sweeps: usize,
    /// Wall-time cap: no new restart and no further refinement after it.
    /// The first restart always draws every edge.
    pub time_limit: Option<Duration>,
}

impl UpperOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        UpperOptions { restarts, seed, refine_sweeps: 1, time_limit: None }
    }
}

/// Greedy maximal planar subgraph in the given edge order.
fn maximal_planar(n: usize, order: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut kept: Vec<(usize, usize)> = Vec::new();
    for &e in order {
        if n >= 3 && kept.len() >= 3 * n - 6 {
            break;
        }
        kept.push(e);
        if !planarity::is_planar(n, &kept) {
            kept.pop();
        }
    }
    kept
}

fn one_start(g: &WeightedGraph, rng: &mut ChaCha8Rng, sweeps: usize, deadline: Option<Instant>) -> CombinatorialDrawing {
    let mut keyed: Vec<(f64, usize, usize)> = g.edges().map(|(u, v, w)| (weight::to_f64(w) * rng.gen_range(0.5..=1.0), u, v)).collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0));
    let order: Vec<(usize, usize)> = keyed.iter().map(|&(_, u, v)| (u, v)).collect();
    let kept = maximal_planar(g.n(), &order);
    let cw = planarity::planar_embedding(g.n(), &kept).expect("greedy subgraph is planar");
    let mut sub = WeightedGraph::new(g.n());
    for &(u, v) in &kept {
        sub.set_weight(u, v, g.weight(u, v)).unwrap();
    }
    let plane = CombinatorialDrawing::from_embedding(&sub, &cw).expect("embedding of the planar subgraph");
    let full = CombinatorialDrawing::empty(g);
    let rot: Vec<Vec<usize>> = (0..g.n())
        .map(|v| {
            plane
                .rotation(v)
                .into_iter()
                .map(|e| {
                    let (a, b) = plane.edges()[e];
                    full.edge_id(a, b).unwrap()
                })
                .collect()
        })
        .collect();
    let mut d = CombinatorialDrawing::from_seqform(g, &SeqForm { vertex_rot: rot, crossings: vec![], seqs: vec![vec![]; g.edge_count()] }).expect("plane drawing");
    let mut rest: Vec<usize> = (0..g.edge_count()).filter(|&e| !d.is_drawn(e)).collect();
    rest.shuffle(rng);
    for e in rest {
        d.insert_edge_mut(e).unwrap();
    }
    if sweeps > 0 {
        d.refine_mut(&RefineOptions { min_gain: 1e-9, max_sweeps: sweeps, deadline });
    }
    d
}

/// Best drawing over seeded restarts of planar-subgraph-plus-insertion.
pub fn crossing_number_upper_with(g: &WeightedGraph, opts: &UpperOptions) -> CrSolution {
    let start = Instant::now();
    let mut best: Option<CombinatorialDrawing> = None;
    let mut done = 0;
    for r in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(r as u64));
        let d = one_start(g, &mut rng, opts.refine_sweeps, opts.time_limit.map(|t| start + t));
        done += 1;
        if best.as_ref().map_or(true, |b| d.crossing_weight() < b.crossing_weight() - 1e-12) {
            best = Some(d);
        }
        if opts.time_limit.map_or(false, |t| start.elapsed() > t) {
            break;
        }
    }
    let mut d = best.unwrap();
    d.push_log(format!("upper restarts={done}/{} seed={}", opts.restarts, opts.seed));
    let budget = Budget { nodes: 0, seconds: opts.time_limit.map(|t| t.as_secs_f64()), restarts: done, seed: opts.seed };
    CrSolution::from_drawing(d, false, 0.0, 0, budget)
}

pub fn crossing_number_upper(g: &WeightedGraph, restarts: usize, seed: u64) -> CrSolution {
    crossing_number_upper_with(g, &UpperOptions::new(restarts, seed))
}

struct Search<'a> {
    g: &'a WeightedGraph,
    pairs: Vec<(usize, usize)>,
    cost: Vec<f64>,
    /// vertices of each pair
    touch: Vec<[usize; 4]>,
    vbound: Vec<f64>,
    euler: usize,
    nodes: u64,
    limit: u64,
    deadline: Option<Instant>,
}

const TOL: f64 = 1e-9;

impl Search<'_> {
    fn out_of_budget(&self) -> bool {
        self.nodes > self.limit || self.deadline.map_or(false, |d| Instant::now() > d)
    }

    fn admissible(&self, set: &[usize]) -> bool {
        if set.len() < self.euler {
            return false;
        }
        for (v, &lb) in self.vbound.iter().enumerate() {
            if lb <= 0.0 {
                continue;
            }
            let rest: f64 = set.iter().filter(|&&p| !self.touch[p].contains(&v)).map(|&p| self.cost[p]).sum();
            if rest < lb - TOL {
                return false;
            }
        }
        true
    }

    /// Collects admissible sets with cost in `[lo, hi)`.
    fn collect(&mut self, from: usize, set: &mut Vec<usize>, c: f64, lo: f64, hi: f64, out: &mut Vec<(f64, Vec<usize>)>) -> bool {
        self.nodes += 1;
        if self.nodes % 4096 == 0 && self.out_of_budget() {
            return false;
        }
        if c >= lo - TOL && self.admissible(set) {
            out.push((c, set.clone()));
        }
        for p in from..self.pairs.len() {
            let nc = c + self.cost[p];
            if nc >= hi - TOL {
                // costs are sorted, later pairs cost at least as much
                break;
            }
            // a simple drawing never crosses the same pair twice, and pairs are
            // independent by construction
            set.push(p);
            let ok = self.collect(p + 1, set, nc, lo, hi, out);
            set.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

fn canonical_key(g: &WeightedGraph) -> (WeightedGraph, Vec<(usize, usize, String)>) {
    let used: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
    let h = g.induced(&used).unwrap();
    let key = h.edges().map(|(u, v, w)| (u, v, weight::format(w))).collect();
    (h, key)
}

fn exact_inner(g: &WeightedGraph, budget: &Budget, memo: &mut HashMap<Vec<(usize, usize, String)>, (f64, bool)>, nodes: &mut u64) -> Result<CrSolution> {
    if let Some(cw) = planarity::planar_embedding(g.n(), &g.edge_pairs()) {
        let d = CombinatorialDrawing::from_embedding(g, &cw)?;
        return Ok(CrSolution::from_drawing(d, true, 0.0, *nodes, budget.clone()));
    }
    let deadline = budget.seconds.map(|s| Instant::now() + Duration::from_secs_f64(s));
    let inc = crossing_number_upper(g, budget.restarts, budget.seed);
    let mut best = inc.drawing;
    let incumbent = best.crossing_weight();
    // lower bounds from vertex deletion
    let mut vbound = vec![0.0; g.n()];
    for v in 0..g.n() {
        if g.degree(v) == 0 {
            continue;
        }
        let h = g.filter_edges(|a, b| a != v && b != v);
        let (hc, key) = canonical_key(&h);
        let lb = match memo.get(&key) {
            Some(&(val, _)) => val,
            None => {
                let sub_budget = Budget { nodes: budget.nodes / 4, ..budget.clone() };
                let s = exact_inner(&hc, &sub_budget, memo, nodes)?;
                let lb = if s.exact { s.value } else { s.lower };
                memo.insert(key, (lb, s.exact));
                lb
            }
        };
        vbound[v] = lb;
    }
    let es = g.edge_pairs();
    let w: Vec<f64> = g.edges().map(|(_, _, w)| weight::to_f64(w)).collect();
    let wr: Vec<Rat> = g.edges().map(|(_, _, w)| w.clone()).collect();
    let mut pairs = Vec::new();
    for a in 0..es.len() {
        for b in a + 1..es.len() {
            let (p, q) = (es[a], es[b]);
            if p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1 {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_by(|x, y| (&wr[x.0] * &wr[x.1]).cmp(&(&wr[y.0] * &wr[y.1])).then(x.cmp(y)));
    let cost: Vec<f64> = pairs.iter().map(|&(a, b)| w[a] * w[b]).collect();
    let touch = pairs.iter().map(|&(a, b)| [es[a].0, es[a].1, es[b].0, es[b].1]).collect();
    let n = g.n();
    let euler = if n >= 3 { (g.edge_count() + 6).saturating_sub(3 * n) } else { 0 };
    let step = cost.first().copied().unwrap_or(1.0).max(1e-6);
    let mut s = Search { g, pairs, cost, touch, vbound, euler, nodes: 0, limit: budget.nodes, deadline };
    let mut lo = 0.0f64;
    let mut exact = true;
    loop {
        if lo >= incumbent - TOL {
            break;
        }
        let hi = (lo + step).min(incumbent);
        let mut cands = Vec::new();
        if !s.collect(0, &mut vec![], 0.0, lo, hi, &mut cands) {
            exact = false;
            break;
        }
        let rat_cost = |set: &[usize]| -> Rat {
            let mut c = Rat::zero();
            for &p in set {
                let (a, b) = s.pairs[p];
                c += &wr[a] * &wr[b];
            }
            c
        };
        let mut keyed: Vec<(Rat, Vec<(usize, usize)>)> = cands.into_iter().map(|(_, set)| (rat_cost(&set), set.iter().map(|&p| s.pairs[p]).collect())).collect();
        keyed.sort();
        let mut found = None;
        for (_, set) in &keyed {
            let mut k = 0u64;
            let remaining = s.limit.saturating_sub(s.nodes);
            let r = crate::drawing::realize_counted(s.g, set, &mut k, remaining)?;
            s.nodes += k;
            if let Some(d) = r {
                found = Some(d);
                break;
            }
            if s.out_of_budget() {
                exact = false;
                break;
            }
        }
        if let Some(d) = found {
            best = d;
            lo = best.crossing_weight();
            break;
        }
        if !exact {
            break;
        }
        lo = hi;
    }
    *nodes += s.nodes;
    best.push_log(format!("exact search nodes={} exact={exact}", s.nodes));
    let lower = if exact { best.crossing_weight() } else { lo };
    Ok(CrSolution::from_drawing(best, exact, lower, *nodes, budget.clone()))
}

/// Searches crossing sets in nondecreasing cost and returns the first
/// realizable one. Falls back to the heuristic bound (with `exact = false`)
/// when the budget runs out.
pub fn crossing_number_exact(g: &WeightedGraph, budget: &Budget) -> Result<CrSolution> {
    if budget.nodes == 0 || budget.seconds.map_or(false, |s| s <= 0.0) {
        return domain("budget must be positive");
    }
    let mut memo = HashMap::new();
    let mut nodes = 0;
    exact_inner(g, budget, &mut memo, &mut nodes)
}

/// Crossing number of the quotient's base graph (the diagonal is ignored):
/// exact when it is small, heuristic otherwise.
pub fn crossing_number_quotient(q: &QuotientGraph, budget: &Budget) -> Result<CrSolution> {
    let g = &q.base;
    if g.n() <= 7 || g.edge_count() <= 16 {
        crossing_number_exact(g, budget)
    } else {
        Ok(crossing_number_upper(g, budget.restarts, budget.seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, complete_bipartite, crossing_lower_bound, grid, quotient, random_graph, VertexPartition};
    use crate::weight::rat;

    fn exact(g: &WeightedGraph) -> CrSolution {
        let s = crossing_number_exact(g, &Budget::default()).unwrap();
        s.drawing.validate().unwrap();
        assert!(s.drawing.is_complete());
        assert_eq!(s.value_exact, s.drawing.crossing_weight_exact());
        s
    }

    /// Zarankiewicz-type value for complete graphs.
    fn formula(n: usize) -> f64 {
        (n / 2 * ((n - 1) / 2) * ((n - 2) / 2) * ((n - 3) / 2)) as f64 / 4.0
    }

    #[test]
    fn small_complete_graphs() {
        for n in 3..=6 {
            let s = exact(&complete(n));
            assert!(s.exact);
            assert_eq!(s.value, formula(n), "K{n}");
            assert!(s.value >= crossing_lower_bound(&complete(n)));
        }
    }

    #[test]
    fn bipartite_cases() {
        let s = exact(&complete_bipartite(3, 3));
        assert!(s.exact);
        assert_eq!(s.value, 1.0);
        assert_eq!(exact(&complete_bipartite(2, 5)).value, 0.0);
    }

    #[test]
    fn scaling_is_exact() {
        for (p, q) in [(1, 2), (2, 3), (3, 7)] {
            let g = complete(5).scaled(&rat(p, q)).unwrap();
            let s = exact(&g);
            assert!(s.exact);
            assert_eq!(s.value_exact, rat(p * p, q * q));
        }
    }

    #[test]
    fn edge_deletion_is_monotone() {
        let g = complete(6);
        let base = exact(&g).value;
        for (u, v) in [(0, 1), (2, 5)] {
            let h = g.filter_edges(|a, b| (a, b) != (u, v));
            assert!(exact(&h).value <= base);
        }
    }

    #[test]
    fn upper_bounds() {
        assert_eq!(crossing_number_upper(&grid(4, 4), 3, 0).value, 0.0);
        let s = crossing_number_upper(&complete(6), 20, 0);
        assert_eq!(s.value, 3.0);
        assert!(!s.exact);
        for seed in 0..3 {
            let g = random_graph(9, 0.6, seed).unwrap();
            let e = exact(&g);
            let u = crossing_number_upper(&g, 5, seed);
            assert!(e.value <= u.value + 1e-9);
            assert!(crossing_lower_bound(&g) <= e.value + 1e-9);
        }
    }

    #[test]
    fn quotient_solver() {
        let q = quotient(&complete(4), &VertexPartition::singletons(4)).unwrap();
        assert_eq!(crossing_number_quotient(&q, &Budget::default()).unwrap().value, 0.0);
        let k = complete_bipartite(4, 4);
        let p = VertexPartition::new(8, vec![(0..4).collect(), (4..8).collect()]).unwrap();
        assert_eq!(crossing_number_quotient(&quotient(&k, &p).unwrap(), &Budget::default()).unwrap().value, 0.0);
        let b = complete(5).blow_up(3).unwrap();
        let q = quotient(&b, &VertexPartition::blow_up_classes(5, 3)).unwrap();
        assert_eq!(crossing_number_quotient(&q, &Budget::default()).unwrap().value, 1.0);
    }

    #[test]
    fn budget_must_be_positive() {
        let b = Budget { nodes: 0, ..Budget::default() };
        assert!(crossing_number_exact(&complete(5), &b).is_err());
    }
}
