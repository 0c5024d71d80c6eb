//! Combinatorial drawings and the operations on them.

mod blowup;
mod geometry;
pub(crate) mod plan;
mod realize;
mod svg;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{domain, structure, Result};
use crate::graph::WeightedGraph;
use crate::planarity;
use crate::weight::{self, Rat};
use plan::{close, NodeKind, Planarization, NIL};

pub use blowup::{blow_up_drawing, blow_up_split, project_random, project_with};
pub use geometry::{convex_position, orient, segments_cross, straight_line_crossings, GeometricDrawing, Point};
pub use realize::realize;
pub(crate) use realize::realize_counted;
pub use svg::{render_svg, render_svg_geometric};

/// A drawing of some or all edges of a weighted graph, kept as a
/// planarization with a rotation at every node.
///
/// Edge ids follow the order of [`WeightedGraph::edges`]; each curve runs
/// from the lower endpoint to the higher one.
#[derive(Clone, Debug)]
pub struct CombinatorialDrawing {
    graph: WeightedGraph,
    edges: Vec<(usize, usize)>,
    weights: Vec<Rat>,
    pub(crate) plan: Planarization,
    log: Vec<String>,
}

/// Curve orders at vertices, signed crossings and per-curve crossing
/// sequences; enough to rebuild a planarization.
#[derive(Clone, Debug, Default)]
pub struct SeqForm {
    pub vertex_rot: Vec<Vec<usize>>,
    pub crossings: Vec<(usize, usize, i8)>,
    pub seqs: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct RefineStep {
    pub edge: (usize, usize),
    pub before: f64,
    pub after: f64,
}

#[derive(Clone, Debug)]
pub struct RefineOptions {
    /// Accept a reroute only if it gains more than this.
    pub min_gain: f64,
    pub max_sweeps: usize,
    /// Stop early (leaving a possibly non-optimal drawing) after this instant.
    pub deadline: Option<std::time::Instant>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { min_gain: 1e-9, max_sweeps: usize::MAX, deadline: None }
    }
}

impl CombinatorialDrawing {
    /// All vertices placed, no edge drawn yet.
    pub fn empty(g: &WeightedGraph) -> Self {
        let edges: Vec<(usize, usize)> = g.edge_pairs();
        let weights: Vec<Rat> = g.edges().into_iter().map(|(_, _, w)| w.clone()).collect();
        let curves = edges.iter().zip(&weights).map(|(&(u, v), w)| (u, v, weight::to_f64(w))).collect();
        CombinatorialDrawing { graph: g.clone(), edges, weights, plan: Planarization::new(g.n(), curves), log: vec![] }
    }

    /// Builds a drawing from a planar rotation system given as clockwise
    /// neighbour lists (as returned by [`planarity::planar_embedding`]).
    pub fn from_embedding(g: &WeightedGraph, cw: &[Vec<usize>]) -> Result<Self> {
        let mut d = Self::empty(g);
        if cw.len() != g.n() {
            return domain("rotation system has the wrong number of vertices");
        }
        let mut rot = Vec::with_capacity(g.n());
        let seqs = vec![vec![]; d.edges.len()];
        for (v, nb) in cw.iter().enumerate() {
            let mut r = Vec::with_capacity(nb.len());
            for &u in nb.iter().rev() {
                match d.edge_id(u, v) {
                    Some(e) => r.push(e),
                    None => return domain(format!("rotation lists non-edge ({v},{u})")),
                }
            }
            rot.push(r);
        }
        d.plan = Planarization::from_sequences(g.n(), d.plan.curves.iter().map(|c| (c.start, c.end, c.weight)).collect(), &rot, &[], &seqs)?;
        Ok(d)
    }

    /// A crossing-free drawing of a planar graph.
    pub fn planar(g: &WeightedGraph) -> Option<Self> {
        let cw = planarity::planar_embedding(g.n(), &g.edge_pairs())?;
        Self::from_embedding(g, &cw).ok()
    }

    /// Wraps a planarization whose curve `c` is edge `c` of `g`.
    pub(crate) fn from_plan(g: &WeightedGraph, plan: Planarization) -> Self {
        let mut d = Self::empty(g);
        d.plan = plan;
        d
    }

    pub fn from_seqform(g: &WeightedGraph, s: &SeqForm) -> Result<Self> {
        let mut d = Self::empty(g);
        let curves = d.plan.curves.iter().map(|c| (c.start, c.end, c.weight)).collect();
        d.plan = Planarization::from_sequences(g.n(), curves, &s.vertex_rot, &s.crossings, &s.seqs)?;
        Ok(d)
    }

    pub fn seqform(&self) -> SeqForm {
        let p = &self.plan;
        let mut fwd = vec![false; p.half_count()];
        let mut seqs = vec![vec![]; self.edges.len()];
        let mut id = vec![NIL; p.node_count()];
        let mut crossings = Vec::new();
        for x in p.crossing_nodes() {
            id[x] = crossings.len();
            crossings.push((0, 0, 0));
        }
        for (c, seq) in seqs.iter_mut().enumerate() {
            let ch = p.chain(c);
            for &h in &ch {
                fwd[h] = true;
            }
            *seq = ch[..ch.len().saturating_sub(1)].iter().map(|&h| id[p.dest(h)]).collect();
        }
        for x in p.crossing_nodes() {
            let k0 = p.node_half[x];
            let a_out = if fwd[k0] { k0 } else { p.opposite(k0) };
            let s = if fwd[p.next[a_out]] { -1 } else { 1 };
            crossings[id[x]] = (p.curve_of[k0], p.curve_of[p.next[k0]], s);
        }
        let vertex_rot = (0..self.graph.n()).map(|v| p.rotation(v).into_iter().map(|h| p.curve_of[h]).collect()).collect();
        SeqForm { vertex_rot, crossings, seqs }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let k = (u.min(v), u.max(v));
        self.edges.binary_search(&k).ok()
    }

    pub fn is_drawn(&self, e: usize) -> bool {
        self.plan.curves[e].first != NIL
    }

    /// True when every edge of the graph is drawn.
    pub fn is_complete(&self) -> bool {
        (0..self.edges.len()).all(|e| self.is_drawn(e))
    }

    pub fn log(&self) -> &[String] {
        &self.log
    }

    pub fn push_log(&mut self, s: impl Into<String>) {
        self.log.push(s.into());
    }

    /// Edge ids around `v`, counterclockwise.
    pub fn rotation(&self, v: usize) -> Vec<usize> {
        self.plan.rotation(v).into_iter().map(|h| self.plan.curve_of[h]).collect()
    }

    /// Edges crossed by `e`, in order from its lower endpoint.
    pub fn crossings(&self, e: usize) -> Vec<usize> {
        self.plan.partners(e)
    }

    /// The crossing multiset as sorted pairs of edge ids.
    pub fn crossing_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .plan
            .crossing_nodes()
            .map(|x| {
                let (a, b) = self.plan.crossing_curves(x);
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn crossing_count(&self) -> usize {
        self.plan.crossing_nodes().count()
    }

    pub fn crossing_weight(&self) -> f64 {
        self.plan
            .crossing_nodes()
            .map(|x| {
                let (a, b) = self.plan.crossing_curves(x);
                self.plan.curves[a].weight * self.plan.curves[b].weight
            })
            .fold(0.0, |s, w| s + w)
    }

    pub fn crossing_weight_exact(&self) -> Rat {
        let mut s = Rat::zero();
        for x in self.plan.crossing_nodes() {
            let (a, b) = self.plan.crossing_curves(x);
            s += &self.weights[a] * &self.weights[b];
        }
        s
    }

    /// Weighted crossings on edge `e`, each counted once.
    pub fn edge_crossing_weight(&self, e: usize) -> f64 {
        let w = self.plan.curves[e].weight;
        self.crossings(e).into_iter().map(|f| w * self.plan.curves[f].weight).sum()
    }

    /// No pair crosses twice and no two adjacent edges cross.
    pub fn is_simple(&self) -> bool {
        let pairs = self.crossing_pairs();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        pairs.iter().all(|&(a, b)| {
            let (p, q) = (self.edges[a], self.edges[b]);
            p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1
        })
    }

    pub fn face_count(&self) -> usize {
        self.plan.faces().count
    }

    /// Checks the planarization and the mutual consistency of the crossing
    /// lists.
    pub fn validate(&self) -> Result<()> {
        self.plan.validate()?;
        let mut count = std::collections::BTreeMap::<(usize, usize), i64>::new();
        for e in 0..self.edges.len() {
            for f in self.crossings(e) {
                *count.entry((e, f)).or_default() += 1;
            }
        }
        for (&(e, f), &k) in &count {
            if count.get(&(f, e)) != Some(&k) {
                return structure(format!("crossing lists of edges {e} and {f} disagree"));
            }
        }
        Ok(())
    }

    fn endpoints_ok(&self, e: usize) -> Result<()> {
        if e >= self.edges.len() {
            return domain(format!("edge id {e} out of range"));
        }
        if self.is_drawn(e) {
            return domain(format!("edge {:?} is already drawn", self.edges[e]));
        }
        Ok(())
    }

    /// Routes undrawn edge `e` along a cheapest dual path. Returns the added
    /// crossing weight.
    pub fn insert_edge_mut(&mut self, e: usize) -> Result<f64> {
        self.insert_tagged(e, 0)
    }

    pub(crate) fn insert_tagged(&mut self, e: usize, tag: u8) -> Result<f64> {
        self.endpoints_ok(e)?;
        let (u, v) = self.edges[e];
        let r = self.plan.route(u, v, NIL);
        self.plan.apply_route(e, &r, tag);
        Ok(r.cost * self.plan.curves[e].weight)
    }

    /// Returns a copy with edge `(u, v)` routed optimally.
    pub fn insert_edge_optimally(&self, u: usize, v: usize) -> Result<CombinatorialDrawing> {
        let e = match self.edge_id(u, v) {
            Some(e) => e,
            None => return domain(format!("({u},{v}) is not an edge of the graph")),
        };
        let mut d = self.clone();
        let added = d.insert_edge_mut(e)?;
        d.log.push(format!("insert {u}-{v} +{added}"));
        Ok(d)
    }

    pub fn remove_edge_mut(&mut self, e: usize) {
        self.plan.remove_curve(e);
    }

    /// Cost of the best reroute of drawn edge `e`, computed without removing it.
    pub fn reroute_cost(&self, e: usize) -> f64 {
        let (u, v) = self.edges[e];
        self.plan.route(u, v, e).cost * self.plan.curves[e].weight
    }

    /// Removes and reinserts edges while that strictly lowers the crossing
    /// weight.
    pub fn refine_mut(&mut self, opts: &RefineOptions) -> Vec<RefineStep> {
        let mut steps = Vec::new();
        let mut sweeps = 0;
        let mut total = self.crossing_weight();
        loop {
            if sweeps >= opts.max_sweeps {
                break;
            }
            sweeps += 1;
            let mut improved = false;
            for e in 0..self.edges.len() {
                if opts.deadline.map_or(false, |d| std::time::Instant::now() > d) {
                    return steps;
                }
                if !self.is_drawn(e) || self.plan.curves[e].weight == 0.0 {
                    continue;
                }
                let old = self.edge_crossing_weight(e);
                if old <= opts.min_gain {
                    continue;
                }
                let new = self.reroute_cost(e);
                if new < old - opts.min_gain && !close(new, old) {
                    self.plan.remove_curve(e);
                    let (u, v) = self.edges[e];
                    let r = self.plan.route(u, v, NIL);
                    self.plan.apply_route(e, &r, 0);
                    let after = total - old + r.cost * self.plan.curves[e].weight;
                    debug_assert!(after < total);
                    steps.push(RefineStep { edge: self.edges[e], before: total, after });
                    total = after;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        if self.plan.kind.iter().filter(|&&k| k == NodeKind::Dead).count() > 0 {
            self.plan.compact();
        }
        steps
    }

    pub fn refine_locally_optimal(&self) -> (CombinatorialDrawing, Vec<RefineStep>) {
        let mut d = self.clone();
        let steps = d.refine_mut(&RefineOptions::default());
        d.log.push(format!("refine steps={}", steps.len()));
        (d, steps)
    }

    /// True if no single edge can be rerouted more cheaply.
    pub fn is_locally_optimal(&self, tol: f64) -> bool {
        (0..self.edges.len()).filter(|&e| self.is_drawn(e)).all(|e| self.reroute_cost(e) >= self.edge_crossing_weight(e) - tol)
    }

    /// Same curves, different weights (graph must have the same edge set).
    pub fn with_graph(&self, g: &WeightedGraph) -> Result<CombinatorialDrawing> {
        if g.n() != self.graph.n() || g.edge_pairs() != self.edges {
            return domain("graph does not match the drawing's edge set");
        }
        let mut d = self.clone();
        d.graph = g.clone();
        d.weights = g.edges().into_iter().map(|(_, _, w)| w.clone()).collect();
        for (c, w) in d.plan.curves.iter_mut().zip(&d.weights) {
            c.weight = weight::to_f64(w);
        }
        Ok(d)
    }

    /// Structured document: rotations, crossing lists, totals and the
    /// operation log.
    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(e, (&(u, v), w))| json!({"id": e, "u": u, "v": v, "weight": weight::format(w), "drawn": self.is_drawn(e), "crossings": self.crossings(e)}))
            .collect();
        let rotations: Vec<Vec<usize>> = (0..self.graph.n()).map(|v| self.rotation(v)).collect();
        json!({
            "n": self.graph.n(),
            "edges": edges,
            "rotations": rotations,
            "crossing_count": self.crossing_count(),
            "crossing_weight": self.crossing_weight(),
            "crossing_weight_exact": weight::format(&self.crossing_weight_exact()),
            "simple": self.is_simple(),
            "log": self.log,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, random_graph};
    use crate::weight::rat;

    pub(crate) fn k5_drawing() -> CombinatorialDrawing {
        let g = complete(5);
        let mut d = CombinatorialDrawing::empty(&g);
        for e in 0..d.edges().len() {
            d.insert_edge_mut(e).unwrap();
        }
        d.refine_mut(&RefineOptions::default());
        d
    }

    #[test]
    fn planar_drawings_have_no_crossings() {
        let d = CombinatorialDrawing::planar(&complete(4)).unwrap();
        d.validate().unwrap();
        assert_eq!(d.crossing_weight(), 0.0);
        assert_eq!(d.face_count(), 4);
        assert!(CombinatorialDrawing::planar(&complete(5)).is_none());
    }

    #[test]
    fn k5_minus_edge_plus_edge_costs_one() {
        let g = complete(5);
        let mut h = g.clone();
        h.set_weight(0, 1, Rat::zero()).unwrap();
        let plane = CombinatorialDrawing::planar(&h).unwrap();
        let mut d = CombinatorialDrawing::empty(&g);
        let cw = planarity::planar_embedding(5, &h.edge_pairs()).unwrap();
        let rot: Vec<Vec<usize>> = cw.iter().enumerate().map(|(v, nb)| nb.iter().rev().map(|&u| d.edge_id(u, v).unwrap()).collect()).collect();
        let seqs = vec![vec![]; 10];
        let curves = d.plan.curves.iter().map(|c| (c.start, c.end, c.weight)).collect();
        d.plan = Planarization::from_sequences(5, curves, &rot, &[], &seqs).unwrap();
        assert_eq!(plane.crossing_count(), 0);
        let d = d.insert_edge_optimally(0, 1).unwrap();
        d.validate().unwrap();
        assert_eq!(d.crossing_count(), 1);
        assert!(d.is_simple());
    }

    #[test]
    fn zero_cost_curves_and_weights() {
        let mut g = complete(5);
        g.set_weight(0, 1, rat(1, 2)).unwrap();
        g.set_weight(2, 3, rat(2, 5)).unwrap();
        let d = k5_drawing().with_graph(&g).unwrap();
        let w = d.crossing_weight_exact();
        assert!(w == rat(1, 1) || w == rat(1, 2) || w == rat(2, 5) || w == rat(1, 5));
    }

    #[test]
    fn greedy_k5_is_locally_optimal_with_one_crossing() {
        let d = k5_drawing();
        d.validate().unwrap();
        assert_eq!(d.crossing_count(), 1);
        assert!(d.is_locally_optimal(1e-9));
        let (again, steps) = d.refine_locally_optimal();
        assert!(steps.is_empty());
        assert_eq!(again.crossing_pairs(), d.crossing_pairs());
    }

    #[test]
    fn seqform_round_trip() {
        for seed in 0..6 {
            let g = random_graph(9, 0.7, seed).unwrap();
            let mut d = CombinatorialDrawing::empty(&g);
            for e in 0..d.edges().len() {
                d.insert_edge_mut(e).unwrap();
            }
            d.validate().unwrap();
            let s = d.seqform();
            let back = CombinatorialDrawing::from_seqform(&g, &s).unwrap();
            assert_eq!(back.crossing_pairs(), d.crossing_pairs());
            assert_eq!(back.face_count(), d.face_count());
            for e in 0..d.edges().len() {
                assert_eq!(back.crossings(e), d.crossings(e));
            }
        }
    }

    #[test]
    fn refinement_decreases_strictly() {
        let g = random_graph(12, 0.6, 3).unwrap();
        let mut d = CombinatorialDrawing::empty(&g);
        for e in (0..d.edges().len()).rev() {
            d.insert_edge_mut(e).unwrap();
        }
        let start = d.crossing_weight();
        let steps = d.refine_mut(&RefineOptions::default());
        d.validate().unwrap();
        let mut last = start;
        for s in &steps {
            assert!(s.after < s.before);
            assert!((s.before - last).abs() < 1e-9);
            last = s.after;
        }
        assert!(d.is_locally_optimal(1e-9));
        assert!(d.crossing_weight() <= start);
    }

    #[test]
    fn isolated_and_disconnected_insertion() {
        let g = cycle(6);
        let mut d = CombinatorialDrawing::empty(&g);
        for e in [0, 3, 5, 1] {
            d.insert_edge_mut(e).unwrap();
            d.validate().unwrap();
        }
        assert!(d.insert_edge_mut(0).is_err());
        d.insert_edge_mut(2).unwrap();
        d.insert_edge_mut(4).unwrap();
        d.validate().unwrap();
        assert_eq!(d.crossing_count(), 0);
    }

    #[test]
    fn json_document_lists_everything() {
        let d = k5_drawing();
        let j = d.to_json();
        assert_eq!(j["edges"].as_array().unwrap().len(), 10);
        assert_eq!(j["crossing_count"], 1);
        assert_eq!(j["simple"], true);
    }

    #[test]
    fn tangled_k4_refines_to_plane() {
        use rand::SeedableRng;
        let g = complete(4);
        let mut hits = 0;
        for seed in 0..200 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut d = CombinatorialDrawing::empty(&g);
            for e in 0..6 {
                let (u, v) = d.edges()[e];
                let r = if d.plan.same_component_pub(u, v) { plan::tests::random_route(&d.plan, u, v, &mut rng) } else { d.plan.route(u, v, NIL) };
                d.plan.apply_route(e, &r, 0);
            }
            d.validate().unwrap();
            let mut pairs = d.crossing_pairs();
            pairs.dedup();
            if pairs.len() < 3 {
                continue;
            }
            hits += 1;
            let (r, steps) = d.refine_locally_optimal();
            r.validate().unwrap();
            assert_eq!(r.crossing_count(), 0, "seed {seed}");
            assert!(!steps.is_empty());
        }
        assert!(hits > 0);
    }

    #[test]
    fn local_optimality_certificate_on_random_graphs() {
        for seed in 0..5 {
            let g = random_graph(14, 0.5, seed).unwrap();
            let mut d = CombinatorialDrawing::empty(&g);
            for e in 0..d.edges().len() {
                d.insert_edge_mut(e).unwrap();
            }
            d.refine_mut(&RefineOptions::default());
            for e in 0..d.edges().len() {
                let mut x = d.clone();
                let before = x.crossing_weight();
                x.remove_edge_mut(e);
                let added = x.insert_edge_mut(e).unwrap();
                assert!(x.crossing_weight() >= before - 1e-9);
                assert!((x.crossing_weight() - (before - d.edge_crossing_weight(e) + added)).abs() < 1e-9);
            }
        }
    }
}
