//! Turning a crossing multiset into a drawing.

use std::collections::HashMap;

use super::plan::{NodeKind, Planarization, NIL};
use super::CombinatorialDrawing;
use crate::error::{domain, Result};
use crate::graph::WeightedGraph;
use crate::planarity;

fn check_pairs(g: &WeightedGraph, pairs: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
    let edges = g.edge_pairs();
    let mut out: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    for &(a, b) in &out {
        if b >= edges.len() {
            return domain(format!("edge id {b} out of range"));
        }
        let (p, q) = (edges[a], edges[b]);
        if a == b || p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1 {
            return domain(format!("edges {p:?} and {q:?} are not independent"));
        }
    }
    out.sort_unstable();
    if out.windows(2).any(|w| w[0] == w[1]) {
        return domain("repeated crossing pair");
    }
    Ok(out)
}

/// Node paths of the curves with a dummy node `n + i` for pair `i`.
fn paths(g: &WeightedGraph, orders: &[Vec<usize>]) -> Vec<Vec<usize>> {
    g.edge_pairs()
        .into_iter()
        .zip(orders)
        .map(|((u, v), ord)| {
            let mut p = vec![u];
            p.extend(ord.iter().map(|&i| g.n() + i));
            p.push(v);
            p
        })
        .collect()
}

fn next_perm(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        a.reverse();
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn build(g: &WeightedGraph, paths: &[Vec<usize>], extra: usize, cw: &[Vec<usize>]) -> Planarization {
    let curves = g.edges().into_iter().map(|(u, v, w)| (u, v, crate::weight::to_f64(&w))).collect();
    let mut p = Planarization::new(g.n(), curves);
    for _ in 0..extra {
        p.add_node(NodeKind::Crossing);
    }
    let mut half = HashMap::new();
    for (c, path) in paths.iter().enumerate() {
        for w in path.windows(2) {
            let h = p.add_pair(w[0], w[1], c, 0);
            half.insert((w[0], w[1]), h);
            half.insert((w[1], w[0]), h ^ 1);
        }
        p.curves[c].first = half[&(path[0], path[1])];
    }
    for (x, nb) in cw.iter().enumerate() {
        let mut last = NIL;
        for &y in nb.iter().rev() {
            let h = half[&(x, y)];
            p.link_after(h, last);
            last = h;
        }
    }
    p
}

/// Searches per-edge crossing orders for a planar configuration. Returns a
/// drawing whose crossings form a subset of `pairs` (touchings are
/// dropped), or `None` if no order is planar. `nodes` counts planarity
/// tests.
pub(crate) fn realize_counted(g: &WeightedGraph, pairs: &[(usize, usize)], nodes: &mut u64, limit: u64) -> Result<Option<CombinatorialDrawing>> {
    let mut pairs = check_pairs(g, pairs)?;
    let m = g.edge_count();
    let mut orders: Vec<Vec<usize>> = vec![vec![]; m];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        orders[a].push(i);
        orders[b].push(i);
    }
    let movable: Vec<usize> = (0..m).filter(|&e| orders[e].len() > 1).collect();
    let found = loop {
        *nodes += 1;
        if *nodes > limit {
            return Ok(None);
        }
        let ps = paths(g, &orders);
        let mut es = Vec::new();
        for p in &ps {
            es.extend(p.windows(2).map(|w| (w[0], w[1])));
        }
        if let Some(cw) = planarity::planar_embedding(g.n() + pairs.len(), &es) {
            break Some(cw);
        }
        let mut k = 0;
        while k < movable.len() && !next_perm(&mut orders[movable[k]]) {
            k += 1;
        }
        if k == movable.len() {
            break None;
        }
    };
    let Some(mut cw) = found else {
        return Ok(None);
    };
    loop {
        let ps = paths(g, &orders);
        let n = g.n();
        // a dummy is a touching when a curve's two neighbours are adjacent
        let mut touching = vec![false; pairs.len()];
        for (i, &(a, _)) in pairs.iter().enumerate() {
            let x = n + i;
            let pa = &ps[a];
            let at = pa.iter().position(|&y| y == x).unwrap();
            let (p0, p1) = (pa[at - 1], pa[at + 1]);
            let rot = &cw[x];
            let i0 = rot.iter().position(|&y| y == p0).unwrap();
            let i1 = rot.iter().position(|&y| y == p1).unwrap();
            touching[i] = (i0 + 4 - i1) % 4 != 2;
        }
        if !touching.iter().any(|&t| t) {
            let mut d = CombinatorialDrawing::empty(g);
            d.plan = build(g, &ps, pairs.len(), &cw);
            d.plan.validate()?;
            return Ok(Some(d));
        }
        let keep: Vec<usize> = (0..pairs.len()).filter(|&i| !touching[i]).collect();
        let mut remap = vec![usize::MAX; pairs.len()];
        for (j, &i) in keep.iter().enumerate() {
            remap[i] = j;
        }
        for o in &mut orders {
            o.retain(|&i| !touching[i]);
            for i in o.iter_mut() {
                *i = remap[*i];
            }
        }
        pairs = keep.iter().map(|&i| pairs[i]).collect();
        let ps = paths(g, &orders);
        let mut es = Vec::new();
        for p in &ps {
            es.extend(p.windows(2).map(|w| (w[0], w[1])));
        }
        cw = planarity::planar_embedding(g.n() + pairs.len(), &es).expect("removing touchings keeps planarity");
    }
}

/// Finds a drawing whose crossing multiset is contained in `pairs` (edge
/// ids), or `None` if the multiset cannot be realized.
pub fn realize(g: &WeightedGraph, pairs: &[(usize, usize)]) -> Result<Option<CombinatorialDrawing>> {
    let mut nodes = 0;
    realize_counted(g, pairs, &mut nodes, u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, complete_bipartite};

    #[test]
    fn permutations_cycle() {
        let mut a = vec![0, 1, 2];
        let mut seen = vec![a.clone()];
        while next_perm(&mut a) {
            seen.push(a.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(a, vec![0, 1, 2]);
    }

    #[test]
    fn kuratowski_cases() {
        assert!(realize(&complete(4), &[]).unwrap().is_some());
        assert!(realize(&complete(5), &[]).unwrap().is_none());
        let g = complete(5);
        let es = g.edge_pairs();
        let mut ok = 0;
        for a in 0..es.len() {
            for b in a + 1..es.len() {
                let (p, q) = (es[a], es[b]);
                if p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1 {
                    assert!(realize(&g, &[(a, b)]).is_err());
                    continue;
                }
                if let Some(d) = realize(&g, &[(a, b)]).unwrap() {
                    d.validate().unwrap();
                    assert_eq!(d.crossing_pairs(), vec![(a, b)]);
                    ok += 1;
                }
            }
        }
        // every independent pair of K5 can be the single crossing
        assert_eq!(ok, 15);
    }

    #[test]
    fn touchings_are_dropped() {
        let g = complete(4);
        // 0-1 and 2-3 are independent; K4 is planar so the crossing is removable
        let d = realize(&g, &[(0, 5)]).unwrap().unwrap();
        d.validate().unwrap();
        assert!(d.crossing_pairs().len() <= 1);
    }

    #[test]
    fn k33_single_crossing() {
        let g = complete_bipartite(3, 3);
        assert!(realize(&g, &[]).unwrap().is_none());
        let es = g.edge_pairs();
        let a = es.iter().position(|&e| e == (0, 3)).unwrap();
        let b = es.iter().position(|&e| e == (1, 4)).unwrap();
        let d = realize(&g, &[(a, b)]).unwrap().unwrap();
        assert_eq!(d.crossing_count(), 1);
        assert!(realize(&g, &[(0, 9), (0, 9)]).is_err());
    }
}
