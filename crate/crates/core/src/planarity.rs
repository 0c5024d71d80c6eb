//! Left-right planarity test with embedding extraction.
//!
//! Input is a simple undirected graph given by its edge list. On success the
//! result lists, for every vertex, its neighbours in clockwise order.

use std::collections::HashMap;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
struct Interval {
    low: usize,
    high: usize,
}

impl Interval {
    fn none() -> Self {
        Interval { low: NONE, high: NONE }
    }
    fn empty(&self) -> bool {
        self.low == NONE && self.high == NONE
    }
}

#[derive(Clone, Copy, Debug)]
struct ConflictPair {
    left: Interval,
    right: Interval,
    id: usize,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

/// Rotation system under construction: circular doubly linked lists of
/// neighbours per vertex.
struct Embedding {
    cw: HashMap<(usize, usize), usize>,
    ccw: HashMap<(usize, usize), usize>,
    first: Vec<usize>,
}

impl Embedding {
    fn new(n: usize) -> Self {
        Embedding { cw: HashMap::new(), ccw: HashMap::new(), first: vec![NONE; n] }
    }

    fn add_cw(&mut self, start: usize, end: usize, reference: usize) {
        if reference == NONE {
            self.cw.insert((start, end), end);
            self.ccw.insert((start, end), end);
            self.first[start] = end;
            return;
        }
        let after = self.cw[&(start, reference)];
        self.cw.insert((start, reference), end);
        self.cw.insert((start, end), after);
        self.ccw.insert((start, after), end);
        self.ccw.insert((start, end), reference);
    }

    fn add_ccw(&mut self, start: usize, end: usize, reference: usize) {
        if reference == NONE {
            self.add_cw(start, end, NONE);
            return;
        }
        let before = self.ccw[&(start, reference)];
        self.add_cw(start, end, before);
        if self.first[start] == reference {
            self.first[start] = end;
        }
    }

    fn add_first(&mut self, start: usize, end: usize) {
        let f = self.first[start];
        if f == NONE {
            self.add_cw(start, end, NONE);
        } else {
            self.add_ccw(start, end, f);
        }
        self.first[start] = end;
    }

    fn order(&self, v: usize) -> Vec<usize> {
        let f = self.first[v];
        if f == NONE {
            return vec![];
        }
        let mut out = vec![f];
        let mut x = self.cw[&(v, f)];
        while x != f {
            out.push(x);
            x = self.cw[&(v, x)];
        }
        out
    }
}

struct Lr<'a> {
    adj: &'a [Vec<(usize, usize)>],
    src: Vec<usize>,
    dst: Vec<usize>,
    oriented: Vec<bool>,
    out: Vec<Vec<usize>>,
    height: Vec<usize>,
    parent_edge: Vec<usize>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting: Vec<i64>,
    ordered: Vec<Vec<usize>>,
    refs: Vec<usize>,
    side: Vec<i64>,
    stack: Vec<ConflictPair>,
    stack_bottom: Vec<usize>,
    lowpt_edge: Vec<usize>,
    left_ref: Vec<usize>,
    right_ref: Vec<usize>,
    next_id: usize,
}

impl<'a> Lr<'a> {
    fn top_id(&self) -> usize {
        self.stack.last().map_or(NONE, |p| p.id)
    }

    fn new_pair(&mut self) -> ConflictPair {
        self.next_id += 1;
        ConflictPair { left: Interval::none(), right: Interval::none(), id: self.next_id }
    }

    fn conflicting(&self, i: &Interval, b: usize) -> bool {
        !i.empty() && self.lowpt[i.high] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.left.empty() {
            return self.lowpt[p.right.low];
        }
        if p.right.empty() {
            return self.lowpt[p.left.low];
        }
        self.lowpt[p.left.low].min(self.lowpt[p.right.low])
    }

    fn orientation(&mut self, v: usize) {
        let e = self.parent_edge[v];
        for &(w, id) in &self.adj[v] {
            if self.oriented[id] {
                continue;
            }
            self.oriented[id] = true;
            self.src[id] = v;
            self.dst[id] = w;
            self.out[v].push(id);
            self.lowpt[id] = self.height[v];
            self.lowpt2[id] = self.height[v];
            if self.height[w] == NONE {
                self.parent_edge[w] = id;
                self.height[w] = self.height[v] + 1;
                self.orientation(w);
            } else {
                self.lowpt[id] = self.height[w];
            }
            self.nesting[id] = 2 * self.lowpt[id] as i64;
            if self.lowpt2[id] < self.height[v] {
                self.nesting[id] += 1;
            }
            if e != NONE {
                if self.lowpt[id] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[id]);
                    self.lowpt[e] = self.lowpt[id];
                } else if self.lowpt[id] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[id]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[id]);
                }
            }
        }
    }

    fn testing(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        let ordered = self.ordered[v].clone();
        for (i, &ei) in ordered.iter().enumerate() {
            let w = self.dst[ei];
            self.stack_bottom[ei] = self.top_id();
            if ei == self.parent_edge[w] {
                if !self.testing(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = ei;
                let mut p = self.new_pair();
                p.right = Interval { low: ei, high: ei };
                self.stack.push(p);
            }
            if self.lowpt[ei] < self.height[v] {
                if i == 0 {
                    if e != NONE {
                        self.lowpt_edge[e] = self.lowpt_edge[ei];
                    }
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if e != NONE {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = self.new_pair();
        loop {
            let mut q = self.stack.pop().expect("conflict stack underflow");
            if !q.left.empty() {
                q.swap();
            }
            if !q.left.empty() {
                return false;
            }
            if self.lowpt[q.right.low] > self.lowpt[e] {
                if p.right.empty() {
                    p.right = q.right;
                } else {
                    self.refs[p.right.low] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.refs[q.right.low] = self.lowpt_edge[e];
            }
            if self.top_id() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last().copied() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if p.right.low != NONE {
                self.refs[p.right.low] = q.right.high;
            }
            if q.right.low != NONE {
                p.right.low = q.right.low;
            }
            if p.left.empty() {
                p.left = q.left;
            } else {
                self.refs[p.left.low] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.empty() && p.right.empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.src[e];
        while let Some(top) = self.stack.last().copied() {
            if self.lowest(&top) != self.height[u] {
                break;
            }
            let p = self.stack.pop().unwrap();
            if p.left.low != NONE {
                self.side[p.left.low] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while p.left.high != NONE && self.dst[p.left.high] == u {
                p.left.high = self.refs[p.left.high];
            }
            if p.left.high == NONE && p.left.low != NONE {
                self.refs[p.left.low] = p.right.low;
                self.side[p.left.low] = -1;
                p.left.low = NONE;
            }
            while p.right.high != NONE && self.dst[p.right.high] == u {
                p.right.high = self.refs[p.right.high];
            }
            if p.right.high == NONE && p.right.low != NONE {
                self.refs[p.right.low] = p.left.low;
                self.side[p.right.low] = -1;
                p.right.low = NONE;
            }
            self.stack.push(p);
        }
        if self.lowpt[e] < self.height[u] {
            let top = *self.stack.last().expect("return edge implies a conflict pair");
            let (hl, hr) = (top.left.high, top.right.high);
            if hl != NONE && (hr == NONE || self.lowpt[hl] > self.lowpt[hr]) {
                self.refs[e] = hl;
            } else {
                self.refs[e] = hr;
            }
        }
    }

    fn sign(&mut self, e: usize) -> i64 {
        // iterative version of the recursive sign resolution
        let mut chain = vec![e];
        while self.refs[*chain.last().unwrap()] != NONE {
            let r = self.refs[*chain.last().unwrap()];
            chain.push(r);
        }
        let mut acc = self.side[*chain.last().unwrap()];
        for &x in chain.iter().rev().skip(1) {
            self.side[x] *= acc;
            self.refs[x] = NONE;
            acc = self.side[x];
        }
        self.side[e]
    }

    fn embed(&mut self, emb: &mut Embedding, v: usize) {
        let ordered = self.ordered[v].clone();
        for ei in ordered {
            let w = self.dst[ei];
            if ei == self.parent_edge[w] {
                emb.add_first(w, v);
                self.left_ref[v] = w;
                self.right_ref[v] = w;
                self.embed(emb, w);
            } else if self.side[ei] == 1 {
                emb.add_cw(w, v, self.right_ref[w]);
            } else {
                emb.add_ccw(w, v, self.left_ref[w]);
                self.left_ref[w] = v;
            }
        }
    }
}

/// Returns clockwise neighbour orders if the graph is planar.
pub fn planar_embedding(n: usize, edges: &[(usize, usize)]) -> Option<Vec<Vec<usize>>> {
    let m = edges.len();
    if n > 2 && m > 3 * n - 6 {
        return None;
    }
    let mut adj = vec![Vec::new(); n];
    for (id, &(u, v)) in edges.iter().enumerate() {
        debug_assert!(u != v);
        adj[u].push((v, id));
        adj[v].push((u, id));
    }
    let mut lr = Lr {
        adj: &adj,
        src: vec![NONE; m],
        dst: vec![NONE; m],
        oriented: vec![false; m],
        out: vec![Vec::new(); n],
        height: vec![NONE; n],
        parent_edge: vec![NONE; n],
        lowpt: vec![0; m],
        lowpt2: vec![0; m],
        nesting: vec![0; m],
        ordered: vec![Vec::new(); n],
        refs: vec![NONE; m],
        side: vec![1; m],
        stack: Vec::new(),
        stack_bottom: vec![NONE; m],
        lowpt_edge: vec![NONE; m],
        left_ref: vec![NONE; n],
        right_ref: vec![NONE; n],
        next_id: 0,
    };
    let mut roots = Vec::new();
    for v in 0..n {
        if lr.height[v] == NONE {
            lr.height[v] = 0;
            roots.push(v);
            lr.orientation(v);
        }
    }
    for v in 0..n {
        let mut o = lr.out[v].clone();
        o.sort_by_key(|&e| lr.nesting[e]);
        lr.ordered[v] = o;
    }
    for &r in &roots {
        if !lr.testing(r) {
            return None;
        }
    }
    for e in 0..m {
        let s = lr.sign(e);
        lr.nesting[e] *= s;
    }
    let mut emb = Embedding::new(n);
    for v in 0..n {
        let mut o = lr.out[v].clone();
        o.sort_by_key(|&e| lr.nesting[e]);
        let mut prev = NONE;
        for &e in &o {
            emb.add_cw(v, lr.dst[e], prev);
            prev = lr.dst[e];
        }
        lr.ordered[v] = o;
    }
    for &r in &roots {
        lr.embed(&mut emb, r);
    }
    Some((0..n).map(|v| emb.order(v)).collect())
}

pub fn is_planar(n: usize, edges: &[(usize, usize)]) -> bool {
    planar_embedding(n, edges).is_some()
}

/// Number of faces of a rotation system (clockwise neighbour lists), summed
/// over components.
pub fn count_faces(rot: &[Vec<usize>]) -> usize {
    let mut pos: HashMap<(usize, usize), usize> = HashMap::new();
    for (v, r) in rot.iter().enumerate() {
        for (i, &w) in r.iter().enumerate() {
            pos.insert((v, w), i);
        }
    }
    let mut seen: HashMap<(usize, usize), bool> = HashMap::new();
    let mut faces = 0;
    for (v, r) in rot.iter().enumerate() {
        for &w in r {
            if seen.contains_key(&(v, w)) {
                continue;
            }
            faces += 1;
            let (mut a, mut b) = (v, w);
            while !seen.contains_key(&(a, b)) {
                seen.insert((a, b), true);
                // next dart: at b, the neighbour after a in clockwise order
                let rb = &rot[b];
                let i = pos[&(b, a)];
                let c = rb[(i + 1) % rb.len()];
                a = b;
                b = c;
            }
        }
    }
    faces
}

/// Checks Euler's formula per component for a rotation system.
pub fn is_valid_embedding(n: usize, edges: &[(usize, usize)], rot: &[Vec<usize>]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let mut roots = std::collections::HashSet::new();
    for &(u, _) in edges {
        roots.insert(find(&mut parent, u));
    }
    let active = (0..n).filter(|&v| !rot[v].is_empty()).count();
    let f = count_faces(rot);
    active as i64 - edges.len() as i64 + f as i64 == 2 * roots.len() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn complete(n: usize) -> Vec<(usize, usize)> {
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
    }

    fn k33() -> Vec<(usize, usize)> {
        (0..3).flat_map(|u| (3..6).map(move |v| (u, v))).collect()
    }

    fn check(n: usize, e: &[(usize, usize)]) -> bool {
        match planar_embedding(n, e) {
            Some(rot) => {
                assert!(is_valid_embedding(n, e, &rot), "invalid embedding for {e:?}");
                true
            }
            None => false,
        }
    }

    #[test]
    fn kuratowski() {
        assert!(check(4, &complete(4)));
        assert!(!check(5, &complete(5)));
        assert!(!check(6, &k33()));
        let mut k5e = complete(5);
        k5e.pop();
        assert!(check(5, &k5e));
        let mut k33e = k33();
        k33e.pop();
        assert!(check(6, &k33e));
    }

    #[test]
    fn petersen_is_nonplanar() {
        let e = vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9), (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)];
        assert!(!check(10, &e));
    }

    #[test]
    fn grids_and_forests() {
        let mut e = Vec::new();
        for r in 0..6 {
            for c in 0..6 {
                let v = r * 6 + c;
                if c < 5 {
                    e.push((v, v + 1));
                }
                if r < 5 {
                    e.push((v, v + 6));
                }
            }
        }
        assert!(check(36, &e));
        assert!(check(7, &[(0, 1), (1, 2), (4, 5)]));
        assert!(check(3, &[]));
    }

    /// Subdivided K5 / K33 stay nonplanar; random planar triangulations of
    /// point sets stay planar.
    #[test]
    fn subdivisions() {
        let mut e = Vec::new();
        let mut next = 5;
        for (u, v) in complete(5) {
            e.push((u, next));
            e.push((next, v));
            next += 1;
        }
        assert!(!check(next, &e));
    }

    /// Random graphs: planarity agrees with an independent criterion on small
    /// cases (Euler bound plus edge-removal consistency).
    #[test]
    fn random_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let n = rng.gen_range(3..10);
            let e: Vec<_> = complete(n).into_iter().filter(|_| rng.gen_bool(0.45)).collect();
            let planar = check(n, &e);
            if planar {
                // every subgraph of a planar graph is planar
                for skip in 0..e.len() {
                    let sub: Vec<_> = e.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                    assert!(check(n, &sub));
                }
            } else {
                assert!(e.len() >= 9);
            }
        }
    }

    /// Brute force: some rotation system has Euler genus 0.
    fn planar_by_rotations(n: usize, e: &[(usize, usize)]) -> Option<bool> {
        let mut nb = vec![Vec::new(); n];
        for &(u, v) in e {
            nb[u].push(v);
            nb[v].push(u);
        }
        let fact = |d: usize| (1..d.max(1)).product::<usize>();
        let total: usize = nb.iter().map(|x| fact(x.len())).product();
        if total > 50_000 {
            return None;
        }
        fn perms(first: usize, rest: &[usize]) -> Vec<Vec<usize>> {
            if rest.is_empty() {
                return vec![vec![first]];
            }
            let mut out = Vec::new();
            for i in 0..rest.len() {
                let mut r = rest.to_vec();
                let x = r.remove(i);
                for mut p in perms(x, &r) {
                    p.insert(0, first);
                    out.push(p);
                }
            }
            out
        }
        let choices: Vec<Vec<Vec<usize>>> = nb
            .iter()
            .map(|x| if x.is_empty() { vec![vec![]] } else { perms(x[0], &x[1..]) })
            .collect();
        let mut idx = vec![0usize; n];
        loop {
            let rot: Vec<Vec<usize>> = (0..n).map(|v| choices[v][idx[v]].clone()).collect();
            if is_valid_embedding(n, e, &rot) {
                return Some(true);
            }
            let mut v = 0;
            while v < n {
                idx[v] += 1;
                if idx[v] < choices[v].len() {
                    break;
                }
                idx[v] = 0;
                v += 1;
            }
            if v == n {
                return Some(false);
            }
        }
    }

    #[test]
    fn agrees_with_rotation_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 60 {
            let n = rng.gen_range(5..7);
            let e: Vec<_> = complete(n).into_iter().filter(|_| rng.gen_bool(0.7)).collect();
            if let Some(expect) = planar_by_rotations(n, &e) {
                assert_eq!(check(n, &e), expect, "{e:?}");
                checked += 1;
            }
        }
        assert_eq!(planar_by_rotations(6, &k33()), Some(false));
    }

    /// Incremental maximal planar subgraphs of K_n have exactly 3n - 6 edges.
    #[test]
    fn maximal_planar_subgraph_size() {
        for n in 3..12 {
            let mut kept = Vec::new();
            for e in complete(n) {
                kept.push(e);
                if !check(n, &kept) {
                    kept.pop();
                }
            }
            assert_eq!(kept.len(), 3 * n - 6, "n = {n}");
        }
    }
}
