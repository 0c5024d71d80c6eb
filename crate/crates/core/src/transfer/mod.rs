//! Region subdivision of drawings and transfer of a drawing of one graph
//! to a cut-close graph on the same vertices.

mod regions;
mod triangulation;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cutmetric::cut_distance;
use crate::drawing::plan::{Planarization, NIL};
use crate::drawing::{CombinatorialDrawing, RefineOptions};
use crate::error::{domain, Result};
use crate::graph::{VertexPartition, WeightedGraph};

pub use regions::{subdivide_regions, Region, RegionSubdivision};
pub use triangulation::{cycle_separator, triangulate_collared, triangulate_planarization, NodeRole, Separator, Triangulation};

const MIDDLE: u8 = 1;
const EXTREMAL: u8 = 2;
const SHORT: u8 = 3;
const LONELY: u8 = 4;

#[derive(Clone, Debug)]
pub struct TransferOptions {
    /// Lonely threshold `d`; measured as the cut distance of the two graphs
    /// when unset.
    pub lonely_d: Option<f64>,
    /// Largest n for the exact cut-distance search.
    pub exact_limit: usize,
    pub restarts: usize,
    /// Refinement sweeps run before lonely edges are inserted.
    pub refine_sweeps: usize,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions { lonely_d: None, exact_limit: 16, restarts: 16, refine_sweeps: 3 }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Breakdown {
    pub type1: usize,
    pub type2: usize,
    pub type3: usize,
    pub bad: usize,
    pub lonely: usize,
    pub rerouted: usize,
    pub type1_weight: f64,
    pub type2_weight: f64,
    pub type3_weight: f64,
    pub bad_weight: f64,
    pub lonely_weight: f64,
    pub rerouted_weight: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Representative {
    pub edge: (usize, usize),
    pub rep: (usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferTrace {
    pub d: f64,
    pub d_exact: bool,
    pub lonely_threshold: f64,
    pub lonely_pairs: Vec<(usize, usize)>,
    pub lonely_edges: Vec<(usize, usize)>,
    pub short_edges: Vec<(usize, usize)>,
    pub representatives: Vec<Representative>,
    pub breakdown: Breakdown,
    pub crossing_weight: f64,
}

/// Draws `g2` by following sampled curves of the drawing `d1` of `g1`.
///
/// An edge of `g2` between clusters `i != j` copies the curve of an edge of
/// `g1` between the same clusters, picked with probability proportional to
/// its weight; the ends are then routed to the actual endpoints by cheapest
/// dual paths. Edges inside a cluster, and edges between cluster pairs that
/// carry at most `d n^2` weight in `g1`, are inserted optimally.
pub fn transfer_drawing(
    g1: &WeightedGraph,
    d1: &CombinatorialDrawing,
    g2: &WeightedGraph,
    clusters: &VertexPartition,
    seed: u64,
) -> Result<(CombinatorialDrawing, TransferTrace)> {
    transfer_drawing_with(g1, d1, g2, clusters, seed, &TransferOptions::default())
}

pub fn transfer_drawing_with(
    g1: &WeightedGraph,
    d1: &CombinatorialDrawing,
    g2: &WeightedGraph,
    clusters: &VertexPartition,
    seed: u64,
    opts: &TransferOptions,
) -> Result<(CombinatorialDrawing, TransferTrace)> {
    let n = g2.n();
    if g1.n() != n || clusters.n() != n || d1.graph().n() != n {
        return domain("graphs, drawing and clusters must share one vertex set");
    }
    if d1.graph().edge_pairs() != g1.edge_pairs() {
        return domain("drawing does not draw the first graph");
    }
    if !d1.is_complete() {
        return domain("drawing of the first graph must draw every edge");
    }
    let (d, d_exact) = match opts.lonely_d {
        Some(d) => (d, true),
        None => {
            let w = cut_distance(g1, g2, opts.exact_limit, opts.restarts, seed)?;
            (w.value, w.exact)
        }
    };
    let threshold = d * (n * n) as f64;
    let class = |v: usize| clusters.class_of(v);
    let k = clusters.k();
    let e1 = d1.edges();
    let mut mass = vec![0.0; k * k];
    let mut bucket: Vec<Vec<usize>> = vec![vec![]; k * k];
    for (r, &(x, y)) in e1.iter().enumerate() {
        let (i, j) = (class(x), class(y));
        if i != j {
            let w = g1.weight_f64(x, y);
            mass[i * k + j] += w;
            mass[j * k + i] += w;
            bucket[i.min(j) * k + i.max(j)].push(r);
        }
    }
    let lonely_pair = |i: usize, j: usize| mass[i * k + j] <= threshold + 1e-12;
    let mut lonely_pairs = vec![];
    for i in 0..k {
        for j in i + 1..k {
            if lonely_pair(i, j) {
                lonely_pairs.push((i, j));
            }
        }
    }

    let e2 = g2.edge_pairs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = vec![NIL; e2.len()];
    let mut strands: Vec<Vec<usize>> = vec![vec![]; e1.len()];
    let (mut short, mut lonely, mut reps) = (vec![], vec![], vec![]);
    for (c, &(u, v)) in e2.iter().enumerate() {
        let (i, j) = (class(u), class(v));
        if i == j {
            short.push(c);
        } else if lonely_pair(i, j) {
            lonely.push(c);
        } else {
            let b = &bucket[i.min(j) * k + i.max(j)];
            let ws: Vec<f64> = b.iter().map(|&r| g1.weight_f64(e1[r].0, e1[r].1)).collect();
            let r = b[WeightedIndex::new(&ws).expect("positive mass").sample(&mut rng)];
            rep[c] = r;
            strands[r].push(c);
            reps.push(Representative { edge: (u, v), rep: e1[r] });
        }
    }

    let mut plan = corridors(d1, g2, &rep, &strands)?;
    for h in 0..plan.half_count() {
        if plan.alive(h) && rep[plan.curve_of[h]] != NIL {
            plan.tag[h] = MIDDLE;
        }
    }
    for (c, &(u, v)) in e2.iter().enumerate() {
        let r = rep[c];
        if r == NIL {
            continue;
        }
        let (x, y) = e1[r];
        let (ax, ay) = if class(u) == class(x) { (u, v) } else { (v, u) };
        let ch = plan.chain(c);
        let (hx, hy) = (ch[0], *ch.last().unwrap() ^ 1);
        if ax != x {
            reattach(&mut plan, c, hx, ax, true);
        }
        if ay != y {
            reattach(&mut plan, c, hy, ay, false);
        }
        let cv = &mut plan.curves[c];
        cv.start = u;
        cv.end = v;
        cv.first = NIL;
        let first = plan.rotation(u).into_iter().find(|&h| plan.curve_of[h] == c).expect("curve reaches its endpoint");
        plan.curves[c].first = first;
    }
    let mut out = CombinatorialDrawing::from_plan(g2, plan);
    for &c in &short {
        out.insert_tagged(c, SHORT)?;
    }
    if !lonely.is_empty() {
        out.refine_mut(&RefineOptions { max_sweeps: opts.refine_sweeps, ..Default::default() });
        for &c in &lonely {
            out.insert_tagged(c, LONELY)?;
        }
    }
    out.plan.compact();
    out.validate()?;
    out.push_log(format!("transfer seed={seed} d={d} lonely={} short={}", lonely.len(), short.len()));
    let trace = TransferTrace {
        d,
        d_exact,
        lonely_threshold: threshold,
        lonely_pairs,
        lonely_edges: lonely.iter().map(|&c| e2[c]).collect(),
        short_edges: short.iter().map(|&c| e2[c]).collect(),
        representatives: reps,
        breakdown: breakdown(&out),
        crossing_weight: out.crossing_weight(),
    };
    Ok((out, trace))
}

/// Copies of the curves of `d1` running side by side, one per strand; curve
/// `c` of the result follows curve `rep[c]` of `d1` from its start to end.
fn corridors(d1: &CombinatorialDrawing, g2: &WeightedGraph, rep: &[usize], strands: &[Vec<usize>]) -> Result<Planarization> {
    let e1 = d1.edges();
    let e2 = g2.edge_pairs();
    let n = g2.n();
    let sf = d1.seqform();
    let mut pos = vec![0; e2.len()];
    for s in strands {
        for (p, &c) in s.iter().enumerate() {
            pos[c] = p;
        }
    }
    let mut vertex_rot = vec![vec![]; n];
    for (x, rot) in sf.vertex_rot.iter().enumerate() {
        for &r in rot {
            let s = &strands[r];
            if e1[r].0 == x {
                vertex_rot[x].extend(s.iter().rev());
            } else {
                vertex_rot[x].extend(s.iter());
            }
        }
    }
    // every crossing of d1 becomes a grid of strand crossings
    let mut crossings = vec![];
    let mut grid: Vec<Vec<usize>> = Vec::with_capacity(sf.crossings.len());
    for &(a, b, s) in &sf.crossings {
        let (sa, sb) = (&strands[a], &strands[b]);
        let base = crossings.len();
        for &ca in sa {
            for &cb in sb {
                crossings.push((ca, cb, s));
            }
        }
        grid.push((0..sa.len() * sb.len()).map(|i| base + i).collect());
    }
    let mut seqs = vec![vec![]; e2.len()];
    for (c, seq) in seqs.iter_mut().enumerate() {
        let r = rep[c];
        if r == NIL {
            continue;
        }
        let p = pos[c];
        for &i in &sf.seqs[r] {
            let (a, b, s) = sf.crossings[i];
            let (ka, kb) = (strands[a].len(), strands[b].len());
            if ka == 0 || kb == 0 {
                continue;
            }
            if a == r {
                let order: Vec<usize> = if s > 0 { (0..kb).rev().collect() } else { (0..kb).collect() };
                seq.extend(order.into_iter().map(|pb| grid[i][p * kb + pb]));
            } else {
                let order: Vec<usize> = if s > 0 { (0..ka).collect() } else { (0..ka).rev().collect() };
                seq.extend(order.into_iter().map(|pa| grid[i][pa * kb + p]));
            }
        }
    }
    let curves = e2
        .iter()
        .enumerate()
        .map(|(c, &(u, v))| {
            let w = g2.weight_f64(u, v);
            if rep[c] == NIL {
                (u, v, w)
            } else {
                (e1[rep[c]].0, e1[rep[c]].1, w)
            }
        })
        .collect();
    Planarization::from_sequences(n, curves, &vertex_rot, &crossings, &seqs)
}

/// Moves the end of curve `c` carried by half-edge `h` to vertex `to`,
/// along a cheapest path that does not cross `c` itself.
fn reattach(plan: &mut Planarization, c: usize, h: usize, to: usize, at_start: bool) {
    let t = plan.detach(h);
    if at_start {
        let r = plan.route_avoiding(to, t, NIL, c);
        plan.apply_route_between(c, to, t, &r, EXTREMAL);
    } else {
        let r = plan.route_avoiding(t, to, NIL, c);
        plan.apply_route_between(c, t, to, &r, EXTREMAL);
    }
    plan.dissolve(t, h);
}

fn breakdown(d: &CombinatorialDrawing) -> Breakdown {
    let p = &d.plan;
    let mut b = Breakdown::default();
    for x in p.crossing_nodes() {
        let rot = p.rotation(x);
        let (ca, cb) = (p.curve_of[rot[0]], p.curve_of[rot[1]]);
        let ta = p.tag[rot[0]].max(p.tag[rot[2]]);
        let tb = p.tag[rot[1]].max(p.tag[rot[3]]);
        let w = p.curves[ca].weight * p.curves[cb].weight;
        let (lo, hi) = (ta.min(tb), ta.max(tb));
        let (count, weight) = if hi == LONELY {
            (&mut b.lonely, &mut b.lonely_weight)
        } else if hi == SHORT {
            (&mut b.bad, &mut b.bad_weight)
        } else if lo == 0 {
            (&mut b.rerouted, &mut b.rerouted_weight)
        } else if hi == MIDDLE {
            (&mut b.type1, &mut b.type1_weight)
        } else if lo == MIDDLE {
            (&mut b.type2, &mut b.type2_weight)
        } else {
            (&mut b.type3, &mut b.type3_weight)
        };
        *count += 1;
        *weight += w;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{crossing_number_exact, Budget};
    use crate::graph::{complete, random_graph};
    use crate::weight::rat;

    fn refined(g: &WeightedGraph) -> CombinatorialDrawing {
        let mut d = CombinatorialDrawing::empty(g);
        for e in 0..d.edges().len() {
            d.insert_edge_mut(e).unwrap();
        }
        d.refine_mut(&RefineOptions::default());
        d
    }

    #[test]
    fn identity_transfer_keeps_the_drawing() {
        for seed in 0..6 {
            let g = random_graph(9, 0.6, seed).unwrap();
            let d = refined(&g);
            let p = VertexPartition::singletons(9);
            let opts = TransferOptions { lonely_d: Some(0.0), ..Default::default() };
            let (out, tr) = transfer_drawing_with(&g, &d, &g, &p, seed, &opts).unwrap();
            assert_eq!(out.crossing_weight_exact(), d.crossing_weight_exact());
            assert!(tr.representatives.iter().all(|r| r.edge == r.rep));
            assert!(tr.lonely_edges.is_empty() && tr.short_edges.is_empty());
            assert_eq!(tr.breakdown.type1, d.crossing_count());
        }
    }

    #[test]
    fn reweighted_k5_stays_at_most_one() {
        let g1 = complete(5);
        let d1 = refined(&g1);
        let mut g2 = complete(5);
        g2.set_weight(0, 1, rat(9, 10)).unwrap();
        let exact = crossing_number_exact(&g2, &Budget::default()).unwrap();
        assert_eq!(exact.value_exact, rat(9, 10));
        for seed in 0..10 {
            let (out, _) = transfer_drawing(&g1, &d1, &g2, &VertexPartition::singletons(5), seed).unwrap();
            out.validate().unwrap();
            let w = out.crossing_weight();
            assert!(w <= 1.0 + 1e-12 && w >= 0.9 - 1e-12, "{w}");
        }
    }

    #[test]
    fn clustered_transfer_never_beats_the_optimum() {
        for seed in 0..12 {
            let g1 = random_graph(7, 0.7, seed).unwrap();
            let g2 = random_graph(7, 0.6, seed + 100).unwrap();
            if g2.edge_count() > 14 {
                continue;
            }
            let opt = crossing_number_exact(&g2, &Budget::default()).unwrap();
            assert!(opt.exact);
            let d1 = refined(&g1);
            let p = VertexPartition::equitable(7, 3);
            for s in 0..5 {
                let (out, tr) = transfer_drawing(&g1, &d1, &g2, &p, s).unwrap();
                out.validate().unwrap();
                assert!(out.is_complete());
                assert!(out.crossing_weight() >= opt.value - 1e-9);
                for r in &tr.representatives {
                    let (a, b) = (p.class_of(r.edge.0), p.class_of(r.edge.1));
                    let (x, y) = (p.class_of(r.rep.0), p.class_of(r.rep.1));
                    assert!((a, b) == (x, y) || (a, b) == (y, x));
                }
            }
        }
    }

    #[test]
    fn lonely_pairs_follow_the_threshold() {
        let g1 = random_graph(12, 0.5, 1).unwrap();
        let g2 = random_graph(12, 0.5, 2).unwrap();
        let d1 = refined(&g1);
        let p = VertexPartition::equitable(12, 4);
        let opts = TransferOptions { lonely_d: Some(1.0), ..Default::default() };
        let (out, tr) = transfer_drawing_with(&g1, &d1, &g2, &p, 0, &opts).unwrap();
        out.validate().unwrap();
        assert!(tr.representatives.is_empty());
        assert_eq!(tr.lonely_edges.len() + tr.short_edges.len(), g2.edge_count());
        let (out, tr) = transfer_drawing(&g1, &d1, &g2, &p, 0).unwrap();
        out.validate().unwrap();
        assert!(tr.d_exact && tr.d > 0.0);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let g = complete(5);
        let d = refined(&g);
        assert!(transfer_drawing(&g, &d, &complete(6), &VertexPartition::singletons(6), 0).is_err());
        assert!(transfer_drawing(&complete(4), &d, &g, &VertexPartition::singletons(5), 0).is_err());
    }
}
