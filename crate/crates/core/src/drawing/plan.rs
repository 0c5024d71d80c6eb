//! Half-edge planarization: graph vertices plus degree-4 crossing nodes, with
//! a counterclockwise rotation at every node.
//!
//! Half-edges come in pairs `h`, `h ^ 1`. The face to the left of `h` is
//! traced by `h -> prev[h ^ 1]`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{structure, Result};

pub(crate) const NIL: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum NodeKind {
    Vertex,
    Crossing,
    /// Helper node added by triangulation or transfer surgery.
    Aux,
    Dead,
}

#[derive(Clone, Debug)]
pub(crate) struct Curve {
    pub start: usize,
    pub end: usize,
    /// Half-edge leaving `start`, or `NIL` while the curve is not drawn.
    pub first: usize,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Planarization {
    pub kind: Vec<NodeKind>,
    pub node_half: Vec<usize>,
    pub origin: Vec<usize>,
    pub next: Vec<usize>,
    pub prev: Vec<usize>,
    pub curve_of: Vec<usize>,
    pub tag: Vec<u8>,
    pub curves: Vec<Curve>,
    dead: usize,
}

/// A dual path: leave `start` after half-edge `src` (or anywhere if `NIL`),
/// cross the segments `crossed` (each entered from its left face), and reach
/// `end` after half-edge `dst`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Route {
    pub src: usize,
    pub crossed: Vec<usize>,
    pub dst: usize,
    /// Sum of weights of crossed curves.
    pub cost: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Faces {
    pub face_of: Vec<usize>,
    pub count: usize,
}

#[derive(Clone, Copy, PartialEq)]
struct Key(f64, usize, usize);

struct FaceRec {
    first: usize,
    dist: (f64, usize),
    done: bool,
    /// smallest half-edge of the source / target vertex on this face
    src: usize,
    dst: usize,
}

#[derive(Default)]
struct Scratch {
    epoch: u32,
    stamp: Vec<u32>,
    local: Vec<u32>,
    faces: Vec<FaceRec>,
}

impl Scratch {
    fn prepare(&mut self, halves: usize) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        if self.stamp.len() < halves {
            self.stamp.resize(halves, 0);
            self.local.resize(halves, 0);
        }
        self.faces.clear();
    }
}

thread_local! {
    static SCRATCH: std::cell::RefCell<Scratch> = std::cell::RefCell::new(Scratch::default());
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, o: &Self) -> Ordering {
        // min-heap on (cost, hops, face)
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1)).then(o.2.cmp(&self.2))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub(crate) fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

impl Planarization {
    pub fn new(vertices: usize, curves: Vec<(usize, usize, f64)>) -> Self {
        Planarization {
            kind: vec![NodeKind::Vertex; vertices],
            node_half: vec![NIL; vertices],
            origin: vec![],
            next: vec![],
            prev: vec![],
            curve_of: vec![],
            tag: vec![],
            curves: curves.into_iter().map(|(start, end, weight)| Curve { start, end, first: NIL, weight }).collect(),
            dead: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.kind.len()
    }

    pub fn half_count(&self) -> usize {
        self.origin.len()
    }

    #[inline]
    pub fn alive(&self, h: usize) -> bool {
        self.origin[h] != NIL
    }

    #[inline]
    pub fn dest(&self, h: usize) -> usize {
        self.origin[h ^ 1]
    }

    #[inline]
    pub fn face_next(&self, h: usize) -> usize {
        self.prev[h ^ 1]
    }

    pub fn add_node(&mut self, k: NodeKind) -> usize {
        self.kind.push(k);
        self.node_half.push(NIL);
        self.kind.len() - 1
    }

    /// New unlinked pair `a -> b`; returns the half leaving `a`.
    pub fn add_pair(&mut self, a: usize, b: usize, curve: usize, tag: u8) -> usize {
        let h = self.origin.len();
        self.origin.extend([a, b]);
        self.next.extend([h, h + 1]);
        self.prev.extend([h, h + 1]);
        self.curve_of.extend([curve, curve]);
        self.tag.extend([tag, tag]);
        h
    }

    /// Links `h` into the rotation of its origin right after `after`
    /// (counterclockwise), or as the only half-edge when `after` is `NIL`.
    pub fn link_after(&mut self, h: usize, after: usize) {
        let x = self.origin[h];
        if after == NIL {
            debug_assert_eq!(self.node_half[x], NIL);
            self.next[h] = h;
            self.prev[h] = h;
            self.node_half[x] = h;
            return;
        }
        debug_assert_eq!(self.origin[after], x);
        let nx = self.next[after];
        self.next[after] = h;
        self.prev[h] = after;
        self.next[h] = nx;
        self.prev[nx] = h;
    }

    pub fn unlink(&mut self, h: usize) {
        let x = self.origin[h];
        let (p, n) = (self.prev[h], self.next[h]);
        if n == h {
            self.node_half[x] = NIL;
        } else {
            self.next[p] = n;
            self.prev[n] = p;
            if self.node_half[x] == h {
                self.node_half[x] = n;
            }
        }
        self.next[h] = h;
        self.prev[h] = h;
    }

    /// Puts `new` where `old` sits in the rotation of `old`'s origin.
    fn replace_in_rotation(&mut self, old: usize, new: usize) {
        let x = self.origin[old];
        self.origin[new] = x;
        if self.next[old] == old {
            self.next[new] = new;
            self.prev[new] = new;
        } else {
            let (p, n) = (self.prev[old], self.next[old]);
            self.next[p] = new;
            self.prev[new] = p;
            self.next[new] = n;
            self.prev[n] = new;
        }
        if self.node_half[x] == old {
            self.node_half[x] = new;
        }
        self.next[old] = old;
        self.prev[old] = old;
    }

    fn kill_pair(&mut self, h: usize) {
        let h = h & !1;
        for x in [h, h + 1] {
            self.origin[x] = NIL;
            self.curve_of[x] = NIL;
            self.next[x] = x;
            self.prev[x] = x;
        }
        self.dead += 2;
    }

    pub fn rotation(&self, x: usize) -> Vec<usize> {
        let f = self.node_half[x];
        if f == NIL {
            return vec![];
        }
        let mut out = vec![f];
        let mut h = self.next[f];
        while h != f {
            out.push(h);
            h = self.next[h];
        }
        out
    }

    /// Continues a curve through a crossing node: the half-edge opposite `h`.
    #[inline]
    pub fn opposite(&self, h: usize) -> usize {
        self.next[self.next[h]]
    }

    /// Half-edges of curve `c` from its start, empty if undrawn.
    pub fn chain(&self, c: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut h = self.curves[c].first;
        if h == NIL {
            return out;
        }
        loop {
            out.push(h);
            let x = self.dest(h);
            if self.kind[x] != NodeKind::Crossing {
                break;
            }
            h = self.opposite(h ^ 1);
            debug_assert_eq!(self.curve_of[h], c);
        }
        out
    }

    /// Curves crossing at node `x`, as `(first, second)` in rotation order.
    pub fn crossing_curves(&self, x: usize) -> (usize, usize) {
        let h = self.node_half[x];
        (self.curve_of[h], self.curve_of[self.next[h]])
    }

    pub fn crossing_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.kind.len()).filter(|&x| self.kind[x] == NodeKind::Crossing)
    }

    /// Crossing partners of `c` in order along the curve.
    pub fn partners(&self, c: usize) -> Vec<usize> {
        let ch = self.chain(c);
        ch[..ch.len().saturating_sub(1)].iter().map(|&h| {
            let x = self.dest(h);
            let (a, b) = self.crossing_curves(x);
            if a == c {
                b
            } else {
                a
            }
        }).collect()
    }

    pub fn faces(&self) -> Faces {
        let mut face_of = vec![NIL; self.origin.len()];
        let mut count = 0;
        for h in 0..self.origin.len() {
            if !self.alive(h) || face_of[h] != NIL {
                continue;
            }
            let mut g = h;
            while face_of[g] == NIL {
                face_of[g] = count;
                g = self.face_next(g);
            }
            count += 1;
        }
        Faces { face_of, count }
    }

    /// Union-find component label per node.
    pub fn components(&self) -> Vec<usize> {
        let mut p: Vec<usize> = (0..self.kind.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for h in (0..self.origin.len()).step_by(2) {
            if self.alive(h) {
                let (a, b) = (find(&mut p, self.origin[h]), find(&mut p, self.origin[h + 1]));
                if a != b {
                    p[a.max(b)] = a.min(b);
                }
            }
        }
        (0..self.kind.len()).map(|x| find(&mut p, x)).collect()
    }

    #[cfg(test)]
    pub fn same_component_pub(&self, a: usize, b: usize) -> bool {
        self.same_component(a, b)
    }

    #[cfg(test)]
    fn same_component(&self, a: usize, b: usize) -> bool {
        if self.node_half[a] == NIL || self.node_half[b] == NIL {
            return false;
        }
        let mut seen = vec![false; self.kind.len()];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(x) = stack.pop() {
            if x == b {
                return true;
            }
            for h in self.rotation(x) {
                let y = self.dest(h);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }

    /// Cheapest dual path from `u` to `v`. Crossing curve `free` costs
    /// nothing (used to price a reroute without removing the curve). Ties:
    /// fewer crossings, then smallest face in discovery order.
    pub fn route(&self, u: usize, v: usize, free: usize) -> Route {
        self.route_avoiding(u, v, free, NIL)
    }

    /// As [`route`](Self::route), never crossing curve `forbid`.
    pub fn route_avoiding(&self, u: usize, v: usize, free: usize, forbid: usize) -> Route {
        let direct = Route { src: self.node_half[u], crossed: vec![], dst: self.node_half[v], cost: 0.0 };
        if self.node_half[u] == NIL || self.node_half[v] == NIL {
            return direct;
        }
        SCRATCH.with(|cell| {
            let mut sc = cell.borrow_mut();
            sc.prepare(self.origin.len());
            self.dijkstra(&mut sc, u, v, free, forbid).unwrap_or(direct)
        })
    }

    fn discover(&self, sc: &mut Scratch, h: usize, u: usize, v: usize) -> usize {
        if sc.stamp[h] == sc.epoch {
            return sc.local[h] as usize;
        }
        let id = sc.faces.len();
        let mut rec = FaceRec { first: h, dist: (f64::INFINITY, usize::MAX), done: false, src: NIL, dst: NIL };
        let mut g = h;
        loop {
            sc.stamp[g] = sc.epoch;
            sc.local[g] = id as u32;
            let o = self.origin[g];
            if o == u && g < rec.src {
                rec.src = g;
            }
            if o == v && g < rec.dst {
                rec.dst = g;
            }
            g = self.face_next(g);
            if g == h {
                break;
            }
        }
        sc.faces.push(rec);
        id
    }

    fn dijkstra(&self, sc: &mut Scratch, u: usize, v: usize, free: usize, forbid: usize) -> Option<Route> {
        let cost_of = |h: usize| {
            let c = self.curve_of[h];
            if c == free {
                0.0
            } else {
                self.curves[c].weight
            }
        };
        let mut heap = BinaryHeap::new();
        for h in self.rotation(v) {
            let f = self.discover(sc, h, u, v);
            if sc.faces[f].dist.1 != 0 {
                sc.faces[f].dist = (0.0, 0);
                heap.push(Key(0.0, 0, f));
            }
        }
        let mut best: Option<(f64, usize)> = None;
        let mut cands = Vec::new();
        while let Some(Key(d, k, f)) = heap.pop() {
            if sc.faces[f].done || (d, k) != sc.faces[f].dist {
                continue;
            }
            if let Some((bd, bk)) = best {
                if !(close(d, bd) && k == bk) {
                    break;
                }
            }
            sc.faces[f].done = true;
            if sc.faces[f].src != NIL {
                best.get_or_insert((d, k));
                cands.push(f);
            }
            let first = sc.faces[f].first;
            let mut h = first;
            loop {
                if self.curve_of[h] != forbid {
                    let g = self.discover(sc, h ^ 1, u, v);
                    let nd = (d + cost_of(h), k + 1);
                    let cur = sc.faces[g].dist;
                    if !sc.faces[g].done && (nd.0 < cur.0 && !close(nd.0, cur.0) || close(nd.0, cur.0) && nd.1 < cur.1) {
                        sc.faces[g].dist = nd;
                        heap.push(Key(nd.0, nd.1, g));
                    }
                }
                h = self.face_next(h);
                if h == first {
                    break;
                }
            }
        }
        let mut f = *cands.iter().min()?;
        let src = sc.faces[f].src;
        let total = sc.faces[f].dist.0;
        let mut crossed = Vec::new();
        while sc.faces[f].dist.1 > 0 {
            let (d, k) = sc.faces[f].dist;
            let mut pick: Option<(usize, usize)> = None;
            let first = sc.faces[f].first;
            let mut h = first;
            loop {
                if self.curve_of[h] != forbid && sc.stamp[h ^ 1] == sc.epoch {
                    let g = sc.local[h ^ 1] as usize;
                    let gd = sc.faces[g].dist;
                    if sc.faces[g].done && gd.1 + 1 == k && close(gd.0 + cost_of(h), d) && pick.map_or(true, |p| (g, h) < p) {
                        pick = Some((g, h));
                    }
                }
                h = self.face_next(h);
                if h == first {
                    break;
                }
            }
            let (g, h) = pick.expect("shortest-path predecessor exists");
            crossed.push(h);
            f = g;
        }
        Some(Route { src, crossed, dst: sc.faces[f].dst, cost: total })
    }

    /// Splits segment `h` at crossing node `x`; returns the new half-edge
    /// `x -> dest(h)`. Afterwards `h` ends at `x` and `h ^ 1` leaves `x`.
    fn split(&mut self, h: usize, x: usize) -> usize {
        let t = h ^ 1;
        let q = self.origin[t];
        let c = self.curve_of[h];
        let tag = self.tag[h];
        let g = self.add_pair(x, q, c, tag);
        self.replace_in_rotation(t, g + 1);
        self.origin[t] = x;
        if self.curves[c].first == t {
            self.curves[c].first = g + 1;
        }
        g
    }

    /// Draws undrawn curve `c` along `r`.
    pub fn apply_route(&mut self, c: usize, r: &Route, tag: u8) {
        let (u, v) = (self.curves[c].start, self.curves[c].end);
        debug_assert_eq!(self.curves[c].first, NIL);
        let segs = self.apply_route_between(c, u, v, r, tag);
        self.curves[c].first = segs[0];
    }

    /// Draws a piece of curve `c` from node `u` to node `v` along `r`;
    /// returns its segments in order. Curve bookkeeping is left to the caller.
    pub fn apply_route_between(&mut self, c: usize, u: usize, v: usize, r: &Route, tag: u8) -> Vec<usize> {
        let xs: Vec<usize> = r.crossed.iter().map(|_| self.add_node(NodeKind::Crossing)).collect();
        let mut nodes = vec![u];
        nodes.extend(&xs);
        nodes.push(v);
        let segs: Vec<usize> = nodes.windows(2).map(|w| self.add_pair(w[0], w[1], c, tag)).collect();
        self.link_after(segs[0], r.src);
        self.link_after(*segs.last().unwrap() ^ 1, r.dst);
        for (i, &h) in r.crossed.iter().enumerate() {
            let x = xs[i];
            let g = self.split(h, x);
            // ccw at x: towards dest(h), back along c, towards origin(h), on along c
            let back = segs[i] ^ 1;
            let fwd = segs[i + 1];
            self.link_after(g, NIL);
            self.link_after(back, g);
            self.link_after(h ^ 1, back);
            self.link_after(fwd, h ^ 1);
        }
        segs
    }

    /// Moves the end of half-edge `h` at its origin onto a new helper node,
    /// which is returned.
    pub fn detach(&mut self, h: usize) -> usize {
        self.unlink(h);
        let t = self.add_node(NodeKind::Aux);
        self.origin[h] = t;
        self.link_after(h, NIL);
        t
    }

    /// Removes a degree-2 helper node, joining its two segments into the
    /// pair of `keep` (a half-edge leaving `x`).
    pub fn dissolve(&mut self, x: usize, keep: usize) {
        let rot = self.rotation(x);
        debug_assert_eq!(rot.len(), 2);
        let b = keep;
        let a = if rot[0] == keep { rot[1] } else { rot[0] };
        let c = self.curve_of[a];
        self.unlink(a);
        self.unlink(b);
        let far = a ^ 1;
        self.origin[b] = self.origin[far];
        self.replace_in_rotation(far, b);
        if self.curves[c].first == far {
            self.curves[c].first = b;
        }
        self.kill_pair(a);
        self.kind[x] = NodeKind::Dead;
        self.node_half[x] = NIL;
    }

    /// Erases curve `c`, merging the segments it used to cross.
    pub fn remove_curve(&mut self, c: usize) {
        let ch = self.chain(c);
        if ch.is_empty() {
            return;
        }
        self.unlink(ch[0]);
        self.unlink(*ch.last().unwrap() ^ 1);
        for i in 0..ch.len() - 1 {
            let x = self.dest(ch[i]);
            let rot = self.rotation(x);
            let others: Vec<usize> = rot.iter().copied().filter(|&h| self.curve_of[h] != c).collect();
            debug_assert_eq!(others.len(), 2);
            let (k1, k2) = (others[0], others[1]);
            let f = self.curve_of[k1];
            // keep pair k1 (now q -> p), drop pair k2
            for &h in &rot {
                self.unlink(h);
            }
            let q_side = k2 ^ 1;
            self.origin[k1] = self.origin[q_side];
            self.replace_in_rotation(q_side, k1);
            if self.curves[f].first == q_side {
                self.curves[f].first = k1;
            }
            self.kill_pair(k2);
            self.kind[x] = NodeKind::Dead;
            self.node_half[x] = NIL;
        }
        for &h in &ch {
            self.kill_pair(h);
        }
        self.curves[c].first = NIL;
        if self.dead > 64 && self.dead * 2 > self.origin.len() {
            self.compact();
        }
    }

    /// Drops dead half-edges and nodes, keeping relative order.
    pub fn compact(&mut self) {
        let mut hmap = vec![NIL; self.origin.len()];
        let mut k = 0;
        for h in (0..self.origin.len()).step_by(2) {
            if self.alive(h) {
                hmap[h] = k;
                hmap[h + 1] = k + 1;
                k += 2;
            }
        }
        let mut nmap = vec![NIL; self.kind.len()];
        let mut m = 0;
        for x in 0..self.kind.len() {
            if self.kind[x] != NodeKind::Dead {
                nmap[x] = m;
                m += 1;
            }
        }
        let mh = |h: usize| if h == NIL { NIL } else { hmap[h] };
        let mut origin = vec![0; k];
        let mut next = vec![0; k];
        let mut prev = vec![0; k];
        let mut curve_of = vec![0; k];
        let mut tag = vec![0; k];
        for h in 0..self.origin.len() {
            if hmap[h] != NIL {
                let i = hmap[h];
                origin[i] = nmap[self.origin[h]];
                next[i] = hmap[self.next[h]];
                prev[i] = hmap[self.prev[h]];
                curve_of[i] = self.curve_of[h];
                tag[i] = self.tag[h];
            }
        }
        let mut kind = Vec::with_capacity(m);
        let mut node_half = Vec::with_capacity(m);
        for x in 0..self.kind.len() {
            if nmap[x] != NIL {
                kind.push(self.kind[x]);
                node_half.push(mh(self.node_half[x]));
            }
        }
        for c in &mut self.curves {
            c.first = mh(c.first);
            c.start = nmap[c.start];
            c.end = nmap[c.end];
        }
        self.origin = origin;
        self.next = next;
        self.prev = prev;
        self.curve_of = curve_of;
        self.tag = tag;
        self.kind = kind;
        self.node_half = node_half;
        self.dead = 0;
    }

    /// Builds a planarization from curve endpoints, counterclockwise curve
    /// orders at the vertices, and per-curve crossing sequences. Crossing
    /// `i` is `(a, b, s)`: curve `b` passes from the left of `a` to its right
    /// when `s > 0`, both oriented start to end.
    pub fn from_sequences(
        vertices: usize,
        curves: Vec<(usize, usize, f64)>,
        vertex_rot: &[Vec<usize>],
        crossings: &[(usize, usize, i8)],
        seqs: &[Vec<usize>],
    ) -> Result<Self> {
        let mut p = Planarization::new(vertices, curves);
        let xs: Vec<usize> = crossings.iter().map(|_| p.add_node(NodeKind::Crossing)).collect();
        // at each crossing: (in, out) half-edges per participating curve
        let mut at: Vec<[[usize; 2]; 2]> = vec![[[NIL; 2]; 2]; crossings.len()];
        let mut ends = vec![(NIL, NIL); p.curves.len()];
        for (c, seq) in seqs.iter().enumerate() {
            if seq.is_empty() && vertex_rot.iter().all(|r| !r.contains(&c)) {
                continue;
            }
            let (s, e) = (p.curves[c].start, p.curves[c].end);
            let mut nodes = vec![s];
            nodes.extend(seq.iter().map(|&i| xs[i]));
            nodes.push(e);
            let segs: Vec<usize> = nodes.windows(2).map(|w| p.add_pair(w[0], w[1], c, 0)).collect();
            for (j, &i) in seq.iter().enumerate() {
                let (a, b, _) = crossings[i];
                let slot = if a == c {
                    0
                } else if b == c {
                    1
                } else {
                    return structure(format!("crossing {i} does not involve curve {c}"));
                };
                if at[i][slot][0] != NIL {
                    return structure(format!("curve {c} visits crossing {i} twice"));
                }
                at[i][slot] = [segs[j] ^ 1, segs[j + 1]];
            }
            p.curves[c].first = segs[0];
            ends[c] = (segs[0], *segs.last().unwrap() ^ 1);
        }
        for (v, rot) in vertex_rot.iter().enumerate() {
            let mut last = NIL;
            for &c in rot {
                let (a, b) = ends[c];
                let h = if p.curves[c].start == v { a } else { b };
                if h == NIL || p.origin[h] != v {
                    return structure(format!("curve {c} listed at vertex {v} but does not end there"));
                }
                p.link_after(h, last);
                last = h;
            }
        }
        for (i, &(_, _, s)) in crossings.iter().enumerate() {
            let [[a_in, a_out], [b_in, b_out]] = at[i];
            if a_in == NIL || b_in == NIL {
                return structure(format!("crossing {i} not visited by both curves"));
            }
            let order = if s > 0 { [a_out, b_in, a_in, b_out] } else { [a_out, b_out, a_in, b_in] };
            let mut last = NIL;
            for h in order {
                p.link_after(h, last);
                last = h;
            }
        }
        p.validate()?;
        Ok(p)
    }

    /// Structural checks plus Euler's formula per component.
    pub fn validate(&self) -> Result<()> {
        for h in 0..self.origin.len() {
            if !self.alive(h) {
                continue;
            }
            if !self.alive(h ^ 1) {
                return structure(format!("half-edge {h} has a dead twin"));
            }
            if self.origin[self.next[h]] != self.origin[h] || self.prev[self.next[h]] != h {
                return structure(format!("rotation links broken at half-edge {h}"));
            }
        }
        for x in 0..self.kind.len() {
            let rot = self.rotation(x);
            if rot.iter().any(|&h| self.origin[h] != x) {
                return structure(format!("node {x} rotation contains foreign half-edges"));
            }
            if self.kind[x] == NodeKind::Crossing {
                if rot.len() != 4 {
                    return structure(format!("crossing node {x} has degree {}", rot.len()));
                }
                let c: Vec<usize> = rot.iter().map(|&h| self.curve_of[h]).collect();
                if c[0] != c[2] || c[1] != c[3] || c[0] == c[1] {
                    return structure(format!("crossing node {x} is not a proper crossing"));
                }
            }
        }
        let live = (0..self.origin.len()).filter(|&h| self.alive(h)).count();
        let mut seen = vec![false; self.origin.len()];
        for x in 0..self.kind.len() {
            for h in self.rotation(x) {
                seen[h] = true;
            }
        }
        if seen.iter().filter(|&&s| s).count() != live {
            return structure("some half-edges are not in any rotation");
        }
        let comp = self.components();
        let mut active = std::collections::BTreeMap::<usize, (i64, i64)>::new();
        for x in 0..self.kind.len() {
            if self.node_half[x] != NIL {
                active.entry(comp[x]).or_default().0 += 1;
            }
        }
        for h in (0..self.origin.len()).step_by(2) {
            if self.alive(h) {
                active.entry(comp[self.origin[h]]).or_default().1 += 1;
            }
        }
        let faces = self.faces();
        let (vs, es): (i64, i64) = active.values().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        if vs - es + faces.count as i64 != 2 * active.len() as i64 {
            return structure(format!(
                "Euler check failed: v={vs} e={es} f={} components={}",
                faces.count,
                active.len()
            ));
        }
        for (c, cv) in self.curves.iter().enumerate() {
            if cv.first == NIL {
                continue;
            }
            if self.origin[cv.first] != cv.start || self.curve_of[cv.first] != c {
                return structure(format!("curve {c} does not start at its start vertex"));
            }
            let ch = self.chain(c);
            if self.dest(*ch.last().unwrap()) != cv.end {
                return structure(format!("curve {c} does not reach its end vertex"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Plane K4: vertex 3 in the middle of triangle 0,1,2 (ccw).
    fn plane_k4() -> Planarization {
        // curves: 0:(0,1) 1:(0,2) 2:(0,3) 3:(1,2) 4:(1,3) 5:(2,3)
        let curves = vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)];
        let rot = vec![vec![0, 2, 1], vec![3, 4, 0], vec![1, 5, 3], vec![2, 4, 5]];
        Planarization::from_sequences(4, curves, &rot, &[], &vec![vec![]; 6]).unwrap()
    }

    #[test]
    fn plane_k4_has_four_faces() {
        let p = plane_k4();
        assert_eq!(p.faces().count, 4);
        assert_eq!(p.crossing_nodes().count(), 0);
    }

    #[test]
    fn wrong_rotation_fails_euler() {
        let curves = vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)];
        let rot = vec![vec![0, 1, 2], vec![3, 4, 0], vec![1, 5, 3], vec![2, 4, 5]];
        assert!(Planarization::from_sequences(4, curves, &rot, &[], &vec![vec![]; 6]).is_err());
    }

    #[test]
    fn convex_k4_with_one_crossing() {
        // square 0,1,2,3 ccw; diagonals 0-2 and 1-3 cross
        // curves: 0:(0,1) 1:(1,2) 2:(2,3) 3:(0,3) 4:(0,2) 5:(1,3)
        let curves = vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0), (0, 2, 1.0), (1, 3, 1.0)];
        let rot = vec![vec![0, 4, 3], vec![1, 5, 0], vec![2, 4, 1], vec![3, 5, 2]];
        // diagonal 0->2 runs north-east; 1->3 runs north-west and crosses it
        // from its right to its left
        let p = Planarization::from_sequences(4, curves.clone(), &rot, &[(4, 5, -1)], &[vec![], vec![], vec![], vec![], vec![0], vec![0]]).unwrap();
        assert_eq!(p.partners(4), vec![5]);
        assert!(Planarization::from_sequences(4, curves, &rot, &[(4, 5, 1)], &[vec![], vec![], vec![], vec![], vec![0], vec![0]]).is_err());
    }

    #[test]
    fn route_insert_remove_round_trip() {
        let mut p = plane_k4();
        // add a fifth vertex outside, joined to 0, 1, 2 and then to 3
        p.kind.push(NodeKind::Vertex);
        p.node_half.push(NIL);
        for (a, b) in [(0, 4), (1, 4), (2, 4), (3, 4)] {
            p.curves.push(Curve { start: a, end: b, first: NIL, weight: 1.0 });
            let c = p.curves.len() - 1;
            let r = p.route(a, b, NIL);
            p.apply_route(c, &r, 0);
            p.validate().unwrap();
        }
        let total = p.crossing_nodes().count();
        assert!(total >= 1);
        let c = p.curves.len() - 1;
        let own = p.partners(c).len();
        let faces = p.faces().count;
        p.remove_curve(c);
        p.validate().unwrap();
        assert_eq!(p.crossing_nodes().count(), total - own);
        let r = p.route(3, 4, NIL);
        assert!(r.cost <= own as f64);
        assert_eq!(r.crossed.len() as f64, r.cost);
        p.apply_route(c, &r, 0);
        p.validate().unwrap();
        assert_eq!(p.crossing_nodes().count(), total - own + r.crossed.len());
        assert_eq!(p.faces().count, faces - own + r.crossed.len());
        p.compact();
        p.validate().unwrap();
    }

    /// Cheapest route by enumerating every simple path in the face graph.
    fn brute_cost(p: &Planarization, u: usize, v: usize) -> f64 {
        let f = p.faces();
        let targets: Vec<usize> = p.rotation(v).iter().map(|&h| f.face_of[h]).collect();
        let mut best = f64::INFINITY;
        fn dfs(p: &Planarization, f: &Faces, x: usize, cost: f64, seen: &mut Vec<bool>, targets: &[usize], best: &mut f64) {
            if targets.contains(&x) {
                *best = best.min(cost);
            }
            for h in 0..p.half_count() {
                if p.alive(h) && f.face_of[h] == x {
                    let y = f.face_of[h ^ 1];
                    if !seen[y] {
                        seen[y] = true;
                        dfs(p, f, y, cost + p.curves[p.curve_of[h]].weight, seen, targets, best);
                        seen[y] = false;
                    }
                }
            }
        }
        for h in p.rotation(u) {
            let mut seen = vec![false; f.count];
            seen[f.face_of[h]] = true;
            dfs(p, &f, f.face_of[h], 0.0, &mut seen, &targets, &mut best);
        }
        best
    }

    /// A self-avoiding random dual walk from `u` to `v`.
    pub(crate) fn random_route(p: &Planarization, u: usize, v: usize, rng: &mut impl rand::Rng) -> Route {
        let f = p.faces();
        loop {
            let rot = p.rotation(u);
            let src = rot[rng.gen_range(0..rot.len())];
            let mut x = f.face_of[src];
            let mut seen = vec![false; f.count];
            seen[x] = true;
            let mut crossed = Vec::new();
            let mut cost = 0.0;
            loop {
                if let Some(&dst) = p.rotation(v).iter().find(|&&h| f.face_of[h] == x) {
                    if crossed.len() >= 2 || rng.gen_bool(0.3) {
                        return Route { src, crossed, dst, cost };
                    }
                }
                let opts: Vec<usize> = (0..p.half_count()).filter(|&h| p.alive(h) && f.face_of[h] == x && !seen[f.face_of[h ^ 1]]).collect();
                if opts.is_empty() {
                    break;
                }
                let h = opts[rng.gen_range(0..opts.len())];
                crossed.push(h);
                cost += p.curves[p.curve_of[h]].weight;
                x = f.face_of[h ^ 1];
                seen[x] = true;
            }
        }
    }

    #[test]
    fn route_matches_exhaustive_dual_paths() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        for _ in 0..300 {
            let n = 5;
            let mut p = Planarization::new(n, vec![]);
            let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            for i in (1..pairs.len()).rev() {
                pairs.swap(i, rng.gen_range(0..=i));
            }
            for &(a, b) in &pairs[..7] {
                p.curves.push(Curve { start: a, end: b, first: NIL, weight: [0.0, 0.5, 1.0][rng.gen_range(0..3)] });
                let c = p.curves.len() - 1;
                let r = if rng.gen_bool(0.5) || !p.same_component(a, b) { p.route(a, b, NIL) } else { random_route(&p, a, b, &mut rng) };
                p.apply_route(c, &r, 0);
                p.validate().unwrap();
            }
            let (a, b) = pairs[7];
            if !p.same_component(a, b) || p.faces().count > 8 {
                continue;
            }
            let r = p.route(a, b, NIL);
            assert!(close(r.cost, brute_cost(&p, a, b)), "route {} brute {}", r.cost, brute_cost(&p, a, b));
            checked += 1;
        }
        assert!(checked >= 30, "only {checked} instances");
    }

    #[test]
    fn zero_weight_curves_cost_nothing() {
        let mut p = plane_k4();
        for c in &mut p.curves {
            c.weight = 0.0;
        }
        p.kind.push(NodeKind::Vertex);
        p.node_half.push(NIL);
        for (a, b) in [(0, 4), (1, 4), (2, 4), (3, 4)] {
            p.curves.push(Curve { start: a, end: b, first: NIL, weight: 1.0 });
            let c = p.curves.len() - 1;
            let r = p.route(a, b, NIL);
            if (a, b) == (3, 4) {
                assert_eq!(r.cost, 0.0);
            }
            p.apply_route(c, &r, 0);
        }
        p.validate().unwrap();
    }
}
