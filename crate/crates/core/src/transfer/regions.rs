//! Separator-based subdivision of a drawing into regions holding few
//! vertices each, with no vertex on any region boundary.

use std::collections::BTreeSet;

use serde::Serialize;

use super::triangulation::{best_cycle, triangulate_collared, NodeRole, Trees, Triangulation};
use crate::drawing::plan::NIL;
use crate::drawing::CombinatorialDrawing;
use crate::error::{domain, structure, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Region {
    /// Triangles of the collared triangulation.
    pub faces: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Closed walks of triangulation nodes around the region.
    pub boundary: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionSubdivision {
    pub regions: Vec<Region>,
    pub vertex_assignment: Vec<usize>,
    pub epsilon: f64,
    /// Vertex cap per region.
    pub cap: usize,
    /// Meetings of region boundaries with drawn curves.
    pub boundary_incidences: usize,
    /// Length of every separator cycle used.
    pub separator_lengths: Vec<usize>,
    /// Splits where no balanced cycle existed and a single vertex was cut off.
    pub fallback_splits: usize,
    /// Curves with fewer than `epsilon * n^2 / 16` crossings.
    pub light_edges: usize,
    pub light_threshold: f64,
    #[serde(skip)]
    pub triangulation: Triangulation,
    #[serde(skip)]
    pub face_region: Vec<usize>,
}

struct Work<'a> {
    t: &'a Triangulation,
    face_of: Vec<usize>,
    face_half: Vec<usize>,
    /// faces around each graph vertex
    fans: Vec<Vec<usize>>,
    vnode: Vec<usize>,
    region: Vec<usize>,
    verts: Vec<Vec<usize>>,
}

impl Work<'_> {
    fn face_neighbors(&self, f: usize) -> [usize; 3] {
        let h = self.face_half[f];
        let a = self.t.face_next(h);
        let b = self.t.face_next(a);
        [self.face_of[h ^ 1], self.face_of[a ^ 1], self.face_of[b ^ 1]]
    }

    /// Splits `faces` into edge-connected pieces according to `label`.
    fn pieces(&self, faces: &[usize], label: &[u8]) -> Vec<Vec<usize>> {
        let mut member = vec![NIL; self.face_of.len().max(1)];
        for (i, &f) in faces.iter().enumerate() {
            member[f] = i;
        }
        let mut seen = vec![false; faces.len()];
        let mut out = Vec::new();
        for s in 0..faces.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![faces[s]];
            let mut i = 0;
            while i < comp.len() {
                let f = comp[i];
                i += 1;
                for g in self.face_neighbors(f) {
                    let j = member[g];
                    if j != NIL && !seen[j] && label[j] == label[member[f]] {
                        seen[j] = true;
                        comp.push(g);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn vertices_in(&self, faces: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = faces.iter().copied().collect();
        (0..self.fans.len()).filter(|&v| set.contains(&self.fans[v][0])).collect()
    }

    fn faces_of(&self, r: usize) -> Vec<usize> {
        (0..self.region.len()).filter(|&f| self.region[f] == r).collect()
    }

    /// Replaces region `r` by the given pieces.
    fn install(&mut self, r: usize, pieces: Vec<Vec<usize>>) {
        for (i, piece) in pieces.into_iter().enumerate() {
            let id = if i == 0 {
                r
            } else {
                self.verts.push(vec![]);
                self.verts.len() - 1
            };
            for &f in &piece {
                self.region[f] = id;
            }
            self.verts[id] = self.vertices_in(&piece);
        }
    }

    fn split(&mut self, r: usize, tr: &Trees, lengths: &mut Vec<usize>) -> bool {
        let rv = self.verts[r].clone();
        let nr = rv.len();
        let mut w = vec![0.0; self.t.node_count()];
        for &v in &rv {
            w[self.vnode[v]] = 1.0 / nr as f64;
        }
        let faces = self.faces_of(r);
        let Some(c) = best_cycle(self.t, tr, &w) else {
            return false;
        };
        lengths.push(c.cycle.len());
        let mut label: Vec<u8> = faces.iter().map(|&f| tr.in_subtree(c.side, f) as u8).collect();
        let on: BTreeSet<usize> = c.cycle.iter().copied().collect();
        let (mut inside, mut outside) = (0usize, 0usize);
        let mut pending = Vec::new();
        let mut side = vec![0u8; self.fans.len()];
        for &v in &rv {
            if on.contains(&self.vnode[v]) {
                pending.push(v);
            } else if tr.in_subtree(c.side, self.fans[v][0]) {
                side[v] = 1;
                inside += 1;
            } else {
                outside += 1;
            }
        }
        let limit = 2 * nr / 3;
        for v in pending {
            let to_inside = if inside < limit {
                true
            } else if outside < limit {
                false
            } else {
                inside <= outside
            };
            if to_inside {
                side[v] = 1;
                inside += 1;
            } else {
                outside += 1;
            }
        }
        let pos: std::collections::HashMap<usize, usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        for &v in &rv {
            for &f in &self.fans[v] {
                label[pos[&f]] = side[v];
            }
        }
        let mut parts = self.pieces(&faces, &label);
        if parts.iter().any(|p| self.vertices_in(p).len() == nr) {
            return false;
        }
        parts.sort_by_key(|p| p[0]);
        self.install(r, parts);
        true
    }

    /// Cuts the fan of one vertex off region `r`.
    fn peel(&mut self, r: usize) {
        let v = self.verts[r][0];
        let faces = self.faces_of(r);
        let fan: BTreeSet<usize> = self.fans[v].iter().copied().collect();
        let label: Vec<u8> = faces.iter().map(|f| fan.contains(f) as u8).collect();
        let mut parts = self.pieces(&faces, &label);
        parts.sort_by_key(|p| p[0]);
        self.install(r, parts);
    }

    /// Merges regions without vertices into a neighbouring region.
    fn absorb_empty(&mut self) {
        loop {
            let Some(r) = (0..self.verts.len()).find(|&r| self.verts[r].is_empty() && self.region.contains(&r)) else {
                break;
            };
            let mut target = NIL;
            for f in self.faces_of(r) {
                for g in self.face_neighbors(f) {
                    let s = self.region[g];
                    if s != r && (target == NIL || s < target) {
                        target = s;
                    }
                }
            }
            if target == NIL {
                break;
            }
            for f in 0..self.region.len() {
                if self.region[f] == r {
                    self.region[f] = target;
                }
            }
        }
    }
}

/// Splits the plane around drawing `d` into connected regions with at most
/// `ceil(epsilon^2 n)` vertices each and no vertex on a boundary.
pub fn subdivide_regions(d: &CombinatorialDrawing, epsilon: f64) -> Result<RegionSubdivision> {
    if !(epsilon > 0.0 && epsilon < 1.0 || epsilon == 1.0) {
        return domain(format!("epsilon must lie in (0, 1], got {epsilon}"));
    }
    let n = d.graph().n();
    let t = triangulate_collared(d)?;
    let (face_of, faces) = t.faces();
    let mut face_half = vec![NIL; faces];
    for (h, &f) in face_of.iter().enumerate() {
        if face_half[f] == NIL {
            face_half[f] = h;
        }
    }
    let vnode = t.vertex_nodes();
    let fans: Vec<Vec<usize>> = (0..n).map(|v| t.rotation(vnode[v]).iter().map(|&h| face_of[h]).collect()).collect();
    let cap = ((epsilon * epsilon * n as f64) - 1e-9).ceil().max(1.0) as usize;
    let mut w = Work { t: &t, face_of, face_half, fans, vnode, region: vec![0; faces], verts: vec![(0..n).collect()] };
    let mut lengths = Vec::new();
    let mut fallback = 0;
    let trivial = n > 0 && epsilon <= 1.0 / (n as f64).sqrt();
    if trivial {
        let mut region = vec![n; faces];
        for v in 0..n {
            for &f in &w.fans[v] {
                region[f] = v;
            }
        }
        w.region = region;
        w.verts = (0..n).map(|v| vec![v]).collect();
        w.verts.push(vec![]);
        let rest = w.faces_of(n);
        let label = vec![0; rest.len()];
        let parts = w.pieces(&rest, &label);
        w.install(n, parts);
    } else if faces > 0 {
        let tr = Trees::new(&t);
        while let Some(r) = (0..w.verts.len()).find(|&r| w.verts[r].len() > cap) {
            if !w.split(r, &tr, &mut lengths) {
                fallback += 1;
                w.peel(r);
            }
        }
        w.absorb_empty();
    }
    // renumber regions in order of first face
    let mut ids = vec![NIL; w.verts.len().max(n + 1)];
    let mut next = 0;
    for f in 0..faces {
        let r = w.region[f];
        if ids[r] == NIL {
            ids[r] = next;
            next += 1;
        }
    }
    let face_region: Vec<usize> = w.region.iter().map(|&r| ids[r]).collect();
    let mut regions: Vec<Region> = (0..next).map(|_| Region { faces: vec![], vertices: vec![], boundary: vec![] }).collect();
    for (f, &r) in face_region.iter().enumerate() {
        regions[r].faces.push(f);
    }
    let mut assignment = vec![0; n];
    for v in 0..n {
        if let Some(&f) = w.fans[v].first() {
            assignment[v] = face_region[f];
            regions[face_region[f]].vertices.push(v);
        }
    }
    if faces == 0 && n > 0 {
        regions.push(Region { faces: vec![], vertices: (0..n).collect(), boundary: vec![] });
    }
    // boundary walks
    let mut used = vec![false; w.face_of.len()];
    let mut on_boundary = BTreeSet::new();
    for h in 0..w.face_of.len() {
        let r = face_region[w.face_of[h]];
        if used[h] || face_region[w.face_of[h ^ 1]] == r {
            continue;
        }
        let mut walk = vec![];
        let mut g = h;
        while !used[g] {
            used[g] = true;
            walk.push(t.origin(g));
            on_boundary.insert(t.origin(g));
            let mut k = t.face_next(g);
            while face_region[w.face_of[k ^ 1]] == r {
                k = t.face_next(k ^ 1);
            }
            g = k;
        }
        regions[r].boundary.push(walk);
    }
    let boundary_incidences = on_boundary
        .iter()
        .map(|&x| match t.role(x) {
            NodeRole::Crossing => 2,
            NodeRole::Collar => t.rotation(x).iter().any(|&h| t.curve(h).is_some()) as usize,
            _ => 0,
        })
        .sum();
    let light_threshold = epsilon * (n * n) as f64 / 16.0;
    let light_edges = (0..d.edges().len()).filter(|&e| (d.crossings(e).len() as f64) < light_threshold).count();
    let out = RegionSubdivision {
        regions,
        vertex_assignment: assignment,
        epsilon,
        cap,
        boundary_incidences,
        separator_lengths: lengths,
        fallback_splits: fallback,
        light_edges,
        light_threshold,
        face_region,
        triangulation: t.clone(),
    };
    out.check()?;
    Ok(out)
}

impl RegionSubdivision {
    /// Region count times `epsilon^2`: the measured constant in the
    /// `O(1/epsilon^2)` region bound.
    pub fn constant(&self) -> f64 {
        self.regions.len() as f64 * self.epsilon * self.epsilon
    }

    /// Every vertex strictly inside one region, caps respected, faces
    /// partitioned into connected regions.
    pub fn check(&self) -> Result<()> {
        let t = &self.triangulation;
        let (face_of, faces) = t.faces();
        if self.face_region.len() != faces {
            return structure("face labels do not cover the triangulation");
        }
        let mut halves = vec![vec![]; faces];
        for (h, &f) in face_of.iter().enumerate() {
            halves[f].push(h);
        }
        let vnode = t.vertex_nodes();
        for (v, &r) in self.vertex_assignment.iter().enumerate() {
            for h in t.rotation(vnode[v]) {
                if self.face_region[face_of[h]] != r {
                    return structure(format!("vertex {v} lies on a region boundary"));
                }
            }
        }
        for (i, reg) in self.regions.iter().enumerate() {
            if reg.vertices.len() > self.cap {
                return structure(format!("region {i} holds {} vertices, cap {}", reg.vertices.len(), self.cap));
            }
            if reg.faces.is_empty() {
                continue;
            }
            let set: BTreeSet<usize> = reg.faces.iter().copied().collect();
            let mut seen = BTreeSet::from([reg.faces[0]]);
            let mut stack = vec![reg.faces[0]];
            while let Some(f) = stack.pop() {
                for &h in &halves[f] {
                    let g = face_of[h ^ 1];
                    if set.contains(&g) && seen.insert(g) {
                        stack.push(g);
                    }
                }
            }
            if seen.len() != set.len() {
                return structure(format!("region {i} is not connected"));
            }
        }
        Ok(())
    }
}
