//! Plane triangulations built on top of a drawing's planarization, and
//! fundamental-cycle separators.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::drawing::plan::{NodeKind, Planarization, NIL};
use crate::drawing::CombinatorialDrawing;
use crate::error::{domain, structure, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeRole {
    /// A vertex of the drawn graph.
    Vertex(usize),
    Crossing,
    /// Subdivision point on a curve next to a vertex.
    Collar,
    /// Leaf added so that a vertex has degree at least three.
    Pendant,
    /// Centre of a face that could not be fanned.
    Star,
}

/// A connected plane multigraph with counterclockwise rotations; after
/// [`triangulate_planarization`] every face has three sides.
#[derive(Clone, Debug)]
pub struct Triangulation {
    role: Vec<NodeRole>,
    node_half: Vec<usize>,
    origin: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    /// per pair: part of a drawn curve (false for added edges)
    segment: Vec<bool>,
    curves: Vec<usize>,
}

impl Triangulation {
    fn from_plan(p: &Planarization, vertices: usize) -> Self {
        let mut p = p.clone();
        p.compact();
        let role = (0..p.node_count())
            .map(|x| match p.kind[x] {
                NodeKind::Vertex if x < vertices => NodeRole::Vertex(x),
                NodeKind::Crossing => NodeRole::Crossing,
                _ => NodeRole::Star,
            })
            .collect();
        let segs = p.half_count() / 2;
        Triangulation {
            role,
            node_half: p.node_half.clone(),
            origin: p.origin.clone(),
            next: p.next.clone(),
            prev: p.prev.clone(),
            segment: vec![true; segs],
            curves: (0..segs).map(|i| p.curve_of[2 * i]).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.role.len()
    }

    pub fn edge_count(&self) -> usize {
        self.origin.len() / 2
    }

    pub fn role(&self, x: usize) -> NodeRole {
        self.role[x]
    }

    /// Nodes that stand for graph vertices, indexed by vertex.
    pub fn vertex_nodes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (x, r) in self.role.iter().enumerate() {
            if let NodeRole::Vertex(v) = *r {
                if out.len() <= v {
                    out.resize(v + 1, NIL);
                }
                out[v] = x;
            }
        }
        out
    }

    pub fn origin(&self, h: usize) -> usize {
        self.origin[h]
    }

    pub fn dest(&self, h: usize) -> usize {
        self.origin[h ^ 1]
    }

    pub fn face_next(&self, h: usize) -> usize {
        self.prev[h ^ 1]
    }

    /// Whether edge `h / 2` is a piece of a drawn curve, and which one.
    pub fn curve(&self, h: usize) -> Option<usize> {
        self.segment[h / 2].then(|| self.curves[h / 2])
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

    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        self.rotation(x).into_iter().map(|h| self.dest(h)).collect()
    }

    /// Face id of every half-edge (the face on its left) and the face count.
    pub fn faces(&self) -> (Vec<usize>, usize) {
        let mut face_of = vec![NIL; self.origin.len()];
        let mut count = 0;
        for h in 0..self.origin.len() {
            if face_of[h] != NIL {
                continue;
            }
            let mut g = h;
            while face_of[g] == NIL {
                face_of[g] = count;
                g = self.face_next(g);
            }
            count += 1;
        }
        (face_of, count)
    }

    pub fn face_count(&self) -> usize {
        self.faces().1
    }

    pub fn is_triangulated(&self) -> bool {
        (0..self.origin.len()).all(|h| {
            let a = self.face_next(h);
            let b = self.face_next(a);
            self.face_next(b) == h && a != h && b != h
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in self.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Rotation consistency plus Euler's formula for a connected plane graph.
    pub fn validate(&self) -> Result<()> {
        for h in 0..self.origin.len() {
            if self.origin[self.next[h]] != self.origin[h] || self.prev[self.next[h]] != h {
                return structure(format!("rotation broken at half-edge {h}"));
            }
        }
        for x in 0..self.node_count() {
            let h = self.node_half[x];
            if h != NIL && self.origin[h] != x {
                return structure(format!("node {x} points at a foreign half-edge"));
            }
        }
        if !self.is_connected() {
            return structure("triangulation is disconnected");
        }
        let (v, e, f) = (self.node_count() as i64, self.edge_count() as i64, self.face_count() as i64);
        if self.node_count() > 1 && v - e + f != 2 {
            return structure(format!("Euler check failed: {v} - {e} + {f} != 2"));
        }
        Ok(())
    }

    fn add_node(&mut self, r: NodeRole) -> usize {
        self.role.push(r);
        self.node_half.push(NIL);
        self.role.len() - 1
    }

    fn add_pair(&mut self, a: usize, b: usize) -> usize {
        let h = self.origin.len();
        self.origin.extend([a, b]);
        self.next.extend([h, h + 1]);
        self.prev.extend([h, h + 1]);
        self.segment.push(false);
        self.curves.push(NIL);
        h
    }

    fn link_after(&mut self, h: usize, after: usize) {
        let x = self.origin[h];
        if after == NIL {
            self.next[h] = h;
            self.prev[h] = h;
            self.node_half[x] = h;
            return;
        }
        let nx = self.next[after];
        self.next[after] = h;
        self.prev[h] = after;
        self.next[h] = nx;
        self.prev[nx] = h;
    }

    /// Adds an edge through the face whose boundary leaves `origin(a)` by
    /// `a` and `origin(b)` by `b`; returns the half leaving `origin(a)`.
    fn chord(&mut self, a: usize, b: usize) -> usize {
        let c = self.add_pair(self.origin[a], self.origin[b]);
        self.link_after(c, a);
        self.link_after(c + 1, b);
        c
    }

    /// Puts a new node `c` in the middle of edge `h`; `h` then ends at `c`.
    fn subdivide(&mut self, h: usize, r: NodeRole) -> usize {
        let c = self.add_node(r);
        let t = h ^ 1;
        let q = self.origin[t];
        let g = self.add_pair(c, q);
        self.segment[g / 2] = self.segment[h / 2];
        self.curves[g / 2] = self.curves[h / 2];
        // g ^ 1 takes t's place around q
        let (p, n) = (self.prev[t], self.next[t]);
        if n == t {
            self.next[g + 1] = g + 1;
            self.prev[g + 1] = g + 1;
        } else {
            self.next[p] = g + 1;
            self.prev[g + 1] = p;
            self.next[g + 1] = n;
            self.prev[n] = g + 1;
        }
        if self.node_half[q] == t {
            self.node_half[q] = g + 1;
        }
        self.origin[t] = c;
        self.link_after(t, NIL);
        self.link_after(g, t);
        c
    }

    /// Joins all components inside one face of the largest.
    fn bridge(&mut self) {
        let n = self.node_count();
        let mut comp = vec![NIL; n];
        let mut reps = Vec::new();
        for s in 0..n {
            if comp[s] != NIL {
                continue;
            }
            let id = reps.len();
            let mut size = 0;
            let mut stack = vec![s];
            comp[s] = id;
            while let Some(x) = stack.pop() {
                size += 1;
                for y in self.neighbors(x) {
                    if comp[y] == NIL {
                        comp[y] = id;
                        stack.push(y);
                    }
                }
            }
            reps.push((s, size));
        }
        if reps.len() <= 1 {
            return;
        }
        let (root_comp, &(r, _)) = reps.iter().enumerate().max_by_key(|&(i, &(_, s))| (s, usize::MAX - i)).unwrap();
        let mut after = self.node_half[r];
        for (i, &(x, _)) in reps.iter().enumerate() {
            if i == root_comp {
                continue;
            }
            let c = self.add_pair(r, x);
            self.link_after(c, after);
            let hx = self.node_half[x];
            self.link_after(c + 1, hx);
            after = c;
        }
    }

    /// Triangulates every face with more than three sides: a fan from a
    /// corner whose chords are all new, else a star on a new centre node.
    fn triangulate_faces(&mut self) {
        let mut adj: HashSet<(usize, usize)> = HashSet::new();
        for h in (0..self.origin.len()).step_by(2) {
            let (a, b) = (self.origin[h], self.origin[h + 1]);
            adj.insert((a.min(b), a.max(b)));
        }
        let (face_of, count) = self.faces();
        let mut start = vec![NIL; count];
        for (h, &f) in face_of.iter().enumerate() {
            if start[f] == NIL {
                start[f] = h;
            }
        }
        for f in 0..count {
            let mut walk = vec![start[f]];
            let mut g = self.face_next(start[f]);
            while g != start[f] {
                walk.push(g);
                g = self.face_next(g);
            }
            let k = walk.len();
            if k == 3 {
                continue;
            }
            let nodes: Vec<usize> = walk.iter().map(|&h| self.origin[h]).collect();
            let distinct = nodes.iter().collect::<HashSet<_>>().len() == k;
            let apex = if distinct && k > 3 {
                (0..k).find(|&i| {
                    (2..k - 1).all(|d| {
                        let (a, b) = (nodes[i], nodes[(i + d) % k]);
                        !adj.contains(&(a.min(b), a.max(b)))
                    })
                })
            } else {
                None
            };
            match apex {
                Some(i) => {
                    let mut cur = walk[i];
                    for d in 2..k - 1 {
                        let b = walk[(i + d) % k];
                        let c = self.chord(cur, b);
                        let (x, y) = (nodes[i], nodes[(i + d) % k]);
                        adj.insert((x.min(y), x.max(y)));
                        cur = c;
                    }
                }
                None => {
                    let s = self.add_node(NodeRole::Star);
                    let mut last = NIL;
                    for &h in &walk {
                        let c = self.add_pair(s, self.origin[h]);
                        self.link_after(c, last);
                        self.link_after(c + 1, h);
                        last = c;
                        adj.insert((s.min(self.origin[h]), s.max(self.origin[h])));
                    }
                }
            }
        }
    }

    /// Subdivides every edge at every graph vertex and closes the corners,
    /// so each vertex sits inside a ring of triangles whose other corners
    /// are its own collar nodes. Low-degree vertices first get pendants.
    fn add_collars(&mut self) {
        let verts: Vec<usize> = (0..self.node_count()).filter(|&x| matches!(self.role[x], NodeRole::Vertex(_))).collect();
        for &v in &verts {
            while self.rotation(v).len() < 3 {
                let p = self.add_node(NodeRole::Pendant);
                let c = self.add_pair(v, p);
                let after = self.node_half[v];
                self.link_after(c, after);
                self.link_after(c + 1, NIL);
            }
        }
        for &v in &verts {
            for h in self.rotation(v) {
                self.subdivide(h, NodeRole::Collar);
            }
        }
        for &v in &verts {
            let rot = self.rotation(v);
            let d = rot.len();
            for i in 0..d {
                let (hp, hi) = (rot[(i + d - 1) % d], rot[i]);
                let g = self.face_next(hp);
                self.chord(hi ^ 1, g);
            }
        }
    }
}

fn base(d: &CombinatorialDrawing) -> Result<Triangulation> {
    if !d.is_complete() {
        return domain("triangulation needs every edge drawn");
    }
    let mut t = Triangulation::from_plan(&d.plan, d.graph().n());
    t.bridge();
    Ok(t)
}

/// Adds edges inside the faces of the drawing's planarization (joining
/// components first) until every face is a triangle.
pub fn triangulate_planarization(d: &CombinatorialDrawing) -> Result<Triangulation> {
    let mut t = base(d)?;
    if t.edge_count() > 0 {
        t.triangulate_faces();
    }
    Ok(t)
}

/// Triangulation in which every graph vertex is surrounded by its own
/// collar, so regions can be reshaped around a vertex without touching
/// any other vertex.
pub fn triangulate_collared(d: &CombinatorialDrawing) -> Result<Triangulation> {
    let mut t = base(d)?;
    if t.node_count() > 0 {
        t.add_collars();
        t.triangulate_faces();
    }
    Ok(t)
}

/// Cycle found by [`cycle_separator`].
#[derive(Clone, Debug, Serialize)]
pub struct Separator {
    /// Nodes in order around the cycle.
    pub cycle: Vec<usize>,
    /// Faces on one side; the other side is every remaining face.
    pub inside: Vec<usize>,
    pub inside_weight: f64,
    pub outside_weight: f64,
    pub cycle_weight: f64,
    pub balanced: bool,
}

/// Spanning tree of a triangulation plus the complementary dual tree;
/// every non-tree edge closes a fundamental cycle.
pub(crate) struct Trees {
    pub face_of: Vec<usize>,
    pub faces: usize,
    parent: Vec<usize>,
    depth: Vec<usize>,
    nontree: Vec<usize>,
    /// per non-tree half: the face on its left is the child side
    child: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    order: Vec<usize>,
}

impl Trees {
    pub fn new(t: &Triangulation) -> Self {
        let n = t.node_count();
        let (face_of, faces) = t.faces();
        let mut parent = vec![NIL; n];
        let mut depth = vec![0; n];
        let mut tree_edge = vec![false; t.edge_count()];
        let mut seen = vec![false; n];
        let mut q = VecDeque::new();
        if n > 0 {
            seen[0] = true;
            q.push_back(0);
        }
        while let Some(x) = q.pop_front() {
            for h in t.rotation(x) {
                let y = t.dest(h);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = h ^ 1;
                    depth[y] = depth[x] + 1;
                    tree_edge[h / 2] = true;
                    q.push_back(y);
                }
            }
        }
        // dual tree over the non-tree edges
        let mut dual: Vec<Vec<(usize, usize)>> = vec![vec![]; faces];
        let mut nontree = Vec::new();
        for e in 0..t.edge_count() {
            if !tree_edge[e] {
                let h = 2 * e;
                nontree.push(h);
                dual[face_of[h]].push((face_of[h ^ 1], h));
                dual[face_of[h ^ 1]].push((face_of[h], h ^ 1));
            }
        }
        let mut tin = vec![NIL; faces];
        let mut tout = vec![0; faces];
        let mut order = Vec::with_capacity(faces);
        let mut child = vec![NIL; t.origin.len()];
        if faces > 0 {
            // iterative dfs; `via` is the half whose right face is the parent
            let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
            tin[0] = 0;
            order.push(0);
            while let Some(top) = stack.last_mut() {
                let f = top.0;
                if top.1 < dual[f].len() {
                    let (g, h) = dual[f][top.1];
                    top.1 += 1;
                    if tin[g] == NIL {
                        tin[g] = order.len();
                        order.push(g);
                        // h has f on its left, so h ^ 1 has the child g on its left
                        child[h / 2 * 2] = h ^ 1;
                        stack.push((g, 0));
                    }
                } else {
                    tout[f] = order.len();
                    stack.pop();
                }
            }
        }
        Trees { face_of, faces, parent, depth, nontree, child, tin, tout, order }
    }

    pub fn in_subtree(&self, root: usize, f: usize) -> bool {
        self.tin[f] >= self.tin[root] && self.tin[f] < self.tout[root]
    }

    /// Nodes of the fundamental cycle of non-tree half `h`, from
    /// `origin(h)` through the tree to `dest(h)`.
    pub fn cycle(&self, t: &Triangulation, h: usize) -> Vec<usize> {
        let (mut a, mut b) = (t.origin(h), t.dest(h));
        let mut left = vec![];
        let mut right = vec![];
        while self.depth[a] > self.depth[b] {
            left.push(a);
            a = t.dest(self.parent[a]);
        }
        while self.depth[b] > self.depth[a] {
            right.push(b);
            b = t.dest(self.parent[b]);
        }
        while a != b {
            left.push(a);
            right.push(b);
            a = t.dest(self.parent[a]);
            b = t.dest(self.parent[b]);
        }
        left.push(a);
        left.extend(right.into_iter().rev());
        left
    }
}

pub(crate) struct Candidate {
    /// root of the dual subtree on one side
    pub side: usize,
    pub cycle: Vec<usize>,
    pub inside: f64,
    pub outside: f64,
    pub on_cycle: f64,
}

/// Best-balanced fundamental cycle for node weights `w`; ties go to the
/// shorter cycle, then the lower edge.
pub(crate) fn best_cycle(t: &Triangulation, tr: &Trees, w: &[f64]) -> Option<Candidate> {
    let total: f64 = w.iter().sum();
    // a node's weight is booked on the face left of its first half-edge
    let mut face_w = vec![0.0; tr.faces];
    let mut rep = vec![NIL; t.node_count()];
    for x in 0..t.node_count() {
        let h = t.node_half[x];
        if h != NIL {
            rep[x] = tr.face_of[h];
            face_w[rep[x]] += w[x];
        }
    }
    // subtree sums through the Euler-tour intervals
    let mut prefix = vec![0.0; tr.faces + 1];
    for (i, &f) in tr.order.iter().enumerate() {
        prefix[i + 1] = prefix[i] + face_w[f];
    }
    let sub: Vec<f64> = (0..tr.faces).map(|f| prefix[tr.tout[f]] - prefix[tr.tin[f]]).collect();
    let mut best: Option<(f64, usize, usize, Candidate)> = None;
    for &h in &tr.nontree {
        let hc = tr.child[h];
        if hc == NIL {
            continue;
        }
        let side = tr.face_of[hc];
        let cyc = tr.cycle(t, h);
        let mut on = 0.0;
        let mut on_inside = 0.0;
        for &x in &cyc {
            on += w[x];
            if rep[x] != NIL && tr.in_subtree(side, rep[x]) {
                on_inside += w[x];
            }
        }
        let inside = sub[side] - on_inside;
        let outside = total - inside - on;
        let key = inside.max(outside);
        let better = match &best {
            None => true,
            Some((k, len, e, _)) => {
                key < k - 1e-12 || ((key - k).abs() <= 1e-12 && (cyc.len(), h) < (*len, *e))
            }
        };
        if better {
            let len = cyc.len();
            best = Some((key, len, h, Candidate { side, cycle: cyc, inside, outside, on_cycle: on }));
        }
    }
    best.map(|b| b.3)
}

/// Fundamental-cycle separator: both sides carry at most 2/3 of the weight
/// when any fundamental cycle of the BFS tree achieves it; otherwise the
/// best one found, flagged unbalanced.
pub fn cycle_separator(t: &Triangulation, weights: &[f64]) -> Result<Separator> {
    if weights.len() != t.node_count() {
        return domain(format!("expected {} weights, got {}", t.node_count(), weights.len()));
    }
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return domain("weights must be finite and nonnegative");
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return domain(format!("weights sum to {total}, expected 1"));
    }
    if !t.is_triangulated() {
        return domain("input is not triangulated");
    }
    let tr = Trees::new(t);
    let c = match best_cycle(t, &tr, weights) {
        Some(c) => c,
        None => return structure("triangulation has no cycle"),
    };
    let inside: Vec<usize> = (0..tr.faces).filter(|&f| tr.in_subtree(c.side, f)).collect();
    let limit = 2.0 / 3.0 + 1e-9;
    Ok(Separator {
        cycle: c.cycle,
        inside,
        inside_weight: c.inside,
        outside_weight: c.outside,
        cycle_weight: c.on_cycle,
        balanced: c.inside <= limit && c.outside <= limit,
    })
}
