//! Blow-up drawings and random projections back to representatives.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::geometry::{orient, Point};
use super::{CombinatorialDrawing, SeqForm};
use crate::error::{domain, Result};
use crate::graph::WeightedGraph;

struct Seg {
    curve: usize,
    from: Point,
    to: Point,
    cluster: usize,
    at_start: bool,
}

fn lerp(a: Point, b: Point, t: f64) -> Point {
    (a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t)
}

/// Crossing parameters of two segments, `None` if they do not meet.
/// `Err` flags a near-degenerate configuration.
fn intersect(a: &Seg, b: &Seg) -> std::result::Result<Option<(f64, f64, i8)>, ()> {
    let (o1, o2) = (orient(a.from, a.to, b.from), orient(a.from, a.to, b.to));
    let (o3, o4) = (orient(b.from, b.to, a.from), orient(b.from, b.to, a.to));
    let eps = 1e-11;
    if o1.abs() < eps || o2.abs() < eps || o3.abs() < eps || o4.abs() < eps {
        return Err(());
    }
    if o1 * o2 > 0.0 || o3 * o4 > 0.0 {
        return Ok(None);
    }
    let ta = o3 / (o3 - o4);
    let tb = o1 / (o1 - o2);
    let da = (a.to.0 - a.from.0, a.to.1 - a.from.1);
    let db = (b.to.0 - b.from.0, b.to.1 - b.from.1);
    let cr = da.0 * db.1 - da.1 * db.0;
    Ok(Some((ta, tb, if cr < 0.0 { 1 } else { -1 })))
}

fn near(p: Point, s: &Seg) -> bool {
    let d = (s.to.0 - s.from.0, s.to.1 - s.from.1);
    let len2 = d.0 * d.0 + d.1 * d.1;
    let t = (((p.0 - s.from.0) * d.0 + (p.1 - s.from.1) * d.1) / len2).clamp(0.0, 1.0);
    let q = lerp(s.from, s.to, t);
    (p.0 - q.0).hypot(p.1 - q.1) < 1e-7
}

/// Draws `G[m]`: each vertex becomes `m` points in a small disk, each edge a
/// corridor of `m²` parallel curves following the original one.
pub fn blow_up_drawing(d: &CombinatorialDrawing, m: usize) -> Result<CombinatorialDrawing> {
    if m == 0 {
        return domain("blow-up factor must be at least 1");
    }
    if !d.is_complete() {
        return domain("blow-up needs every edge drawn");
    }
    if m == 1 {
        let mut out = d.clone();
        out.push_log("blow-up m=1");
        return Ok(out);
    }
    let g = d.graph();
    let big = g.blow_up(m)?;
    let s = d.seqform();
    let edges = d.edges();
    let mm = m * m;
    let big_edges = big.edge_pairs();
    let sid = |e: usize, p: usize| -> usize {
        let (u, v) = edges[e];
        big_edges.binary_search(&(u * m + p / m, v * m + p % m)).unwrap()
    };
    let nb = big_edges.len();
    let mut crossings: Vec<(usize, usize, i8)> = Vec::new();
    let mut head: Vec<Vec<(f64, usize)>> = vec![vec![]; nb];
    let mut tail: Vec<Vec<(f64, usize)>> = vec![vec![]; nb];
    let mut vertex_rot: Vec<Vec<usize>> = vec![vec![]; big.n()];
    for v in 0..g.n() {
        let rot = &s.vertex_rot[v];
        let deg = rot.len();
        if deg == 0 {
            continue;
        }
        let delta = TAU / deg as f64 / (mm + 1) as f64;
        let mut attempt = 0;
        loop {
            let off = 0.17 + 0.113 * attempt as f64;
            let cl: Vec<Point> = (0..m).map(|i| {
                let a = TAU * (i as f64 + 0.31) / m as f64 + off;
                (0.3 * a.cos(), 0.3 * a.sin())
            }).collect();
            let mut segs = Vec::new();
            for (k, &e) in rot.iter().enumerate() {
                let theta = TAU * k as f64 / deg as f64;
                let at_start = edges[e].0 == v;
                for p in 0..mm {
                    let q = if at_start { p } else { mm - 1 - p };
                    let a = theta + ((mm as f64 - 1.0) / 2.0 - q as f64) * delta;
                    let slot = (a.cos(), a.sin());
                    let cluster = if at_start { p / m } else { p % m };
                    let c = sid(e, p);
                    if at_start {
                        segs.push(Seg { curve: c, from: cl[cluster], to: slot, cluster, at_start });
                    } else {
                        segs.push(Seg { curve: c, from: slot, to: cl[cluster], cluster, at_start });
                    }
                }
            }
            let mut bad = segs.iter().any(|sg| (0..m).any(|i| i != sg.cluster && near(cl[i], sg)));
            let mut found = Vec::new();
            'outer: for i in 0..segs.len() {
                if bad {
                    break;
                }
                for j in i + 1..segs.len() {
                    if segs[i].cluster == segs[j].cluster {
                        continue;
                    }
                    match intersect(&segs[i], &segs[j]) {
                        Err(()) => {
                            bad = true;
                            break 'outer;
                        }
                        Ok(Some(x)) => found.push((i, j, x)),
                        Ok(None) => {}
                    }
                }
            }
            if bad {
                attempt += 1;
                if attempt > 50 {
                    return domain("could not place cluster points in general position");
                }
                continue;
            }
            for (i, j, (ti, tj, sign)) in found {
                let id = crossings.len();
                crossings.push((segs[i].curve, segs[j].curve, sign));
                for (k, t) in [(i, ti), (j, tj)] {
                    let list = if segs[k].at_start { &mut head[segs[k].curve] } else { &mut tail[segs[k].curve] };
                    list.push((t, id));
                }
            }
            for i in 0..m {
                let mut around: Vec<(f64, usize)> = segs
                    .iter()
                    .filter(|sg| sg.cluster == i)
                    .map(|sg| {
                        let far = if sg.at_start { sg.to } else { sg.from };
                        ((far.1 - cl[i].1).atan2(far.0 - cl[i].0), sg.curve)
                    })
                    .collect();
                around.sort_by(|a, b| a.0.total_cmp(&b.0));
                vertex_rot[v * m + i] = around.into_iter().map(|x| x.1).collect();
            }
            break;
        }
    }
    // corridor crossings
    let mut at_x: Vec<Vec<Vec<usize>>> = vec![vec![]; s.crossings.len()];
    for (x, &(a, b, sign)) in s.crossings.iter().enumerate() {
        let base = crossings.len();
        for pa in 0..mm {
            for pb in 0..mm {
                crossings.push((sid(a, pa), sid(b, pb), sign));
            }
        }
        let id = |pa: usize, pb: usize| base + pa * mm + pb;
        let mut lists = vec![vec![]; 2 * mm];
        for pa in 0..mm {
            lists[pa] = if sign > 0 { (0..mm).rev().map(|pb| id(pa, pb)).collect() } else { (0..mm).map(|pb| id(pa, pb)).collect() };
        }
        for pb in 0..mm {
            lists[mm + pb] = if sign > 0 { (0..mm).map(|pa| id(pa, pb)).collect() } else { (0..mm).rev().map(|pa| id(pa, pb)).collect() };
        }
        at_x[x] = lists;
    }
    let mut seqs = vec![vec![]; nb];
    for (e, seq) in s.seqs.iter().enumerate() {
        for p in 0..mm {
            let c = sid(e, p);
            let mut out = Vec::new();
            let mut h = std::mem::take(&mut head[c]);
            h.sort_by(|a, b| a.0.total_cmp(&b.0));
            out.extend(h.into_iter().map(|x| x.1));
            for &x in seq {
                let (a, _, _) = s.crossings[x];
                let lists = &at_x[x];
                out.extend_from_slice(if a == e { &lists[p] } else { &lists[mm + p] });
            }
            let mut t = std::mem::take(&mut tail[c]);
            t.sort_by(|a, b| a.0.total_cmp(&b.0));
            out.extend(t.into_iter().map(|x| x.1));
            seqs[c] = out;
        }
    }
    let mut out = CombinatorialDrawing::from_seqform(&big, &SeqForm { vertex_rot, crossings, seqs })?;
    out.log = d.log.clone();
    out.push_log(format!("blow-up m={m}"));
    Ok(out)
}

/// Splits the crossings of a drawing of `G[m]` into good ones (four distinct
/// original vertices) and bad ones.
pub fn blow_up_split(d: &CombinatorialDrawing, m: usize) -> (usize, usize) {
    let es = d.edges();
    let mut good = 0;
    let mut bad = 0;
    for (a, b) in d.crossing_pairs() {
        let mut vs = [es[a].0 / m, es[a].1 / m, es[b].0 / m, es[b].1 / m];
        vs.sort_unstable();
        if vs.windows(2).all(|w| w[0] != w[1]) {
            good += 1;
        } else {
            bad += 1;
        }
    }
    (good, bad)
}

impl CombinatorialDrawing {
    /// The sub-drawing induced by `vertices` (distinct); vertex `vertices[i]`
    /// becomes `i`.
    pub fn restrict(&self, vertices: &[usize]) -> Result<CombinatorialDrawing> {
        let g = self.graph();
        let sub: WeightedGraph = g.induced(vertices)?;
        let mut new_id = vec![usize::MAX; g.n()];
        for (i, &v) in vertices.iter().enumerate() {
            new_id[v] = i;
        }
        let mut d = self.transplant(&sub, &new_id)?;
        d.push_log(format!("restrict to {} vertices", vertices.len()));
        Ok(d)
    }

    /// Carries the drawing onto `target`, vertex `v` becoming `map[v]`
    /// (`usize::MAX` drops it). Curves whose image is not an edge of `target` are dropped;
    /// target edges without a preimage stay undrawn.
    pub fn transplant(&self, target: &WeightedGraph, map: &[usize]) -> Result<CombinatorialDrawing> {
        let g = self.graph();
        if map.len() != g.n() {
            return domain("vertex map length differs from the vertex count");
        }
        let mut pre = vec![usize::MAX; target.n()];
        for (v, &w) in map.iter().enumerate() {
            if w == usize::MAX {
                continue;
            }
            if w >= target.n() || pre[w] != usize::MAX {
                return domain("vertex map must be injective into the target");
            }
            pre[w] = v;
        }
        let s = self.seqform();
        let old = self.edges();
        let sub_edges = target.edge_pairs();
        // old curve -> (new curve, reversed)
        let mut emap = vec![None; old.len()];
        for (e, &(u, v)) in old.iter().enumerate() {
            if map[u] != usize::MAX && map[v] != usize::MAX && self.is_drawn(e) {
                let (a, b) = (map[u], map[v]);
                if let Ok(k) = sub_edges.binary_search(&(a.min(b), a.max(b))) {
                    emap[e] = Some((k, a > b));
                }
            }
        }
        let mut cid = vec![usize::MAX; s.crossings.len()];
        let mut crossings = Vec::new();
        for (x, &(a, b, sign)) in s.crossings.iter().enumerate() {
            if let (Some((na, ra)), Some((nb, rb))) = (emap[a], emap[b]) {
                cid[x] = crossings.len();
                let flip = if ra != rb { -1 } else { 1 };
                crossings.push((na, nb, sign * flip));
            }
        }
        let mut seqs = vec![vec![]; sub_edges.len()];
        for (e, seq) in s.seqs.iter().enumerate() {
            if let Some((k, rev)) = emap[e] {
                let mut q: Vec<usize> = seq.iter().filter(|&&x| cid[x] != usize::MAX).map(|&x| cid[x]).collect();
                if rev {
                    q.reverse();
                }
                seqs[k] = q;
            }
        }
        let vertex_rot = pre
            .iter()
            .map(|&v| if v == usize::MAX { vec![] } else { s.vertex_rot[v].iter().filter_map(|&e| emap[e].map(|x| x.0)).collect() })
            .collect();
        let mut d = CombinatorialDrawing::from_seqform(target, &SeqForm { vertex_rot, crossings, seqs })?;
        d.log = self.log().to_vec();
        Ok(d)
    }
}

/// Keeps vertex `v * m + reps[v]` of every cluster.
pub fn project_with(d: &CombinatorialDrawing, m: usize, reps: &[usize]) -> Result<CombinatorialDrawing> {
    let n = d.graph().n();
    if m == 0 || n % m != 0 {
        return domain("drawing is not of an m-fold blow-up");
    }
    if reps.len() != n / m || reps.iter().any(|&r| r >= m) {
        return domain("one representative index below m per cluster required");
    }
    let vs: Vec<usize> = reps.iter().enumerate().map(|(v, &r)| v * m + r).collect();
    d.restrict(&vs)
}

/// One uniformly random representative per cluster.
pub fn project_random(d: &CombinatorialDrawing, m: usize, seed: u64) -> Result<CombinatorialDrawing> {
    let n = d.graph().n();
    if m == 0 || n % m != 0 {
        return domain("drawing is not of an m-fold blow-up");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reps: Vec<usize> = (0..n / m).map(|_| rng.gen_range(0..m)).collect();
    project_with(d, m, &reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::tests::k5_drawing;
    use crate::graph::{complete, cycle};

    #[test]
    fn k5_blow_up_counts() {
        let d = k5_drawing();
        for m in [2, 3] {
            let b = blow_up_drawing(&d, m).unwrap();
            b.validate().unwrap();
            let (good, bad) = blow_up_split(&b, m);
            assert_eq!(good, m.pow(4));
            assert!(good + bad <= m.pow(4) + 125 * m.pow(4));
            if m == 2 {
                assert!(good + bad <= 16 + 5 * 45);
            }
        }
    }

    #[test]
    fn plane_blow_up_has_only_bad_crossings() {
        let d = CombinatorialDrawing::planar(&cycle(5)).unwrap();
        let b = blow_up_drawing(&d, 2).unwrap();
        b.validate().unwrap();
        assert_eq!(blow_up_split(&b, 2).0, 0);
        assert_eq!(blow_up_drawing(&d, 1).unwrap().crossing_pairs(), d.crossing_pairs());
    }

    #[test]
    fn projections_recover_the_base_drawing() {
        let d = k5_drawing();
        let b = blow_up_drawing(&d, 2).unwrap();
        let mut total = 0usize;
        let mut count = 0usize;
        for code in 0..32usize {
            let reps: Vec<usize> = (0..5).map(|v| (code >> v) & 1).collect();
            let p = project_with(&b, 2, &reps).unwrap();
            p.validate().unwrap();
            assert!(p.is_simple());
            assert_eq!(p.graph().edge_pairs(), complete(5).edge_pairs());
            total += p.crossing_count();
            count += 1;
        }
        assert!(total * 16 <= b.crossing_count() * count);
        assert!(project_random(&b, 3, 0).is_err());
    }

    #[test]
    fn restrict_handles_reversed_curves() {
        let d = k5_drawing();
        let r = d.restrict(&[4, 3, 2, 1, 0]).unwrap();
        r.validate().unwrap();
        assert_eq!(r.crossing_count(), 1);
    }
}
