//! Weighted simple graphs and the structural operators on them.

mod generators;
mod io;
mod partition;

pub use generators::{complete, complete_bipartite, cycle, grid, path, random_graph};
pub use partition::{averaged, quotient, QuotientGraph, VertexPartition};

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{domain, Result};
use crate::weight::{self, Rat};

/// Simple undirected graph with weights in `[0, 1]`. Pairs that are not
/// stored have weight zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    w: BTreeMap<(usize, usize), Rat>,
}

#[inline]
fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph { n, w: BTreeMap::new() }
    }

    pub fn from_unit_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = WeightedGraph::new(n);
        for &(u, v) in edges {
            g.set_weight(u, v, Rat::one())?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of pairs with positive weight.
    pub fn edge_count(&self) -> usize {
        self.w.len()
    }

    pub fn set_weight(&mut self, u: usize, v: usize, w: Rat) -> Result<()> {
        if u >= self.n || v >= self.n {
            return domain(format!("edge ({u},{v}) outside vertex range 0..{}", self.n));
        }
        if u == v {
            return domain(format!("loop at vertex {u}"));
        }
        if w.is_negative() || w > Rat::one() {
            return domain(format!("weight {} of edge ({u},{v}) outside [0,1]", weight::format(&w)));
        }
        if w.is_zero() {
            self.w.remove(&key(u, v));
        } else {
            self.w.insert(key(u, v), w);
        }
        Ok(())
    }

    pub fn weight(&self, u: usize, v: usize) -> Rat {
        self.w.get(&key(u, v)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn weight_f64(&self, u: usize, v: usize) -> f64 {
        self.w.get(&key(u, v)).map(weight::to_f64).unwrap_or(0.0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.w.contains_key(&key(u, v))
    }

    /// Edges with positive weight, sorted by `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Rat)> + '_ {
        self.w.iter().map(|(&(u, v), w)| (u, v, w))
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.w.keys().copied().collect()
    }

    pub fn total_weight(&self) -> Rat {
        self.w.values().fold(Rat::zero(), |a, b| a + b)
    }

    pub fn total_weight_f64(&self) -> f64 {
        self.w.values().map(weight::to_f64).sum()
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.w.values().all(|w| w.is_one())
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in self.w.keys() {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.w.keys().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Row-major `n × n` matrix of weights as `f64`.
    pub fn matrix_f64(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for (&(u, v), w) in &self.w {
            let x = weight::to_f64(w);
            m[u * n + v] = x;
            m[v * n + u] = x;
        }
        m
    }

    /// `e_G(S, T)`: sum of `w(s, t)` over ordered pairs, so pairs inside
    /// `S ∩ T` count twice.
    pub fn e_between(&self, s: &[usize], t: &[usize]) -> Rat {
        let mut in_t = vec![false; self.n];
        for &x in t {
            in_t[x] = true;
        }
        let mut in_s = vec![false; self.n];
        for &x in s {
            in_s[x] = true;
        }
        let mut acc = Rat::zero();
        for (&(u, v), w) in &self.w {
            let c = (in_s[u] && in_t[v]) as i64 + (in_s[v] && in_t[u]) as i64;
            if c > 0 {
                acc += w * Rat::from_integer(c.into());
            }
        }
        acc
    }

    /// `G[m]`: vertex `v` becomes `v*m .. v*m+m`.
    pub fn blow_up(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return domain("blow-up factor must be positive");
        }
        let mut g = WeightedGraph::new(self.n * m);
        for (&(u, v), w) in &self.w {
            for i in 0..m {
                for j in 0..m {
                    g.w.insert(key(u * m + i, v * m + j), w.clone());
                }
            }
        }
        Ok(g)
    }

    /// Subgraph induced by `xs`; vertex `xs[i]` becomes `i`.
    pub fn induced(&self, xs: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &x) in xs.iter().enumerate() {
            if x >= self.n {
                return domain(format!("vertex {x} not in graph of order {}", self.n));
            }
            if pos[x] != usize::MAX {
                return domain(format!("vertex {x} listed twice"));
            }
            pos[x] = i;
        }
        let mut g = WeightedGraph::new(xs.len());
        for (&(u, v), w) in &self.w {
            if pos[u] != usize::MAX && pos[v] != usize::MAX {
                g.w.insert(key(pos[u], pos[v]), w.clone());
            }
        }
        Ok(g)
    }

    /// Renames vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n {
            return domain("permutation length differs from vertex count");
        }
        for &p in perm {
            if p >= self.n || seen[p] {
                return domain("not a permutation");
            }
            seen[p] = true;
        }
        let mut g = WeightedGraph::new(self.n);
        for (&(u, v), w) in &self.w {
            g.w.insert(key(perm[u], perm[v]), w.clone());
        }
        Ok(g)
    }

    /// Multiplies every weight by `alpha ∈ [0, 1]`.
    pub fn scaled(&self, alpha: &Rat) -> Result<Self> {
        let mut g = WeightedGraph::new(self.n);
        for (&(u, v), w) in &self.w {
            g.set_weight(u, v, w * alpha)?;
        }
        Ok(g)
    }

    /// Same vertex set, edges restricted by a predicate.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Self {
        let w = self.w.iter().filter(|(&(u, v), _)| keep(u, v)).map(|(k, w)| (*k, w.clone())).collect();
        WeightedGraph { n: self.n, w }
    }
}

/// Crossing lemma and Euler bound on the total weight.
pub fn crossing_lower_bound(g: &WeightedGraph) -> f64 {
    let m = g.total_weight_f64();
    let n = g.n() as f64;
    let mut best = 0.0f64;
    if g.n() >= 3 {
        best = best.max(m - 3.0 * n + 6.0);
    }
    if n > 0.0 && m >= 4.0 * n {
        best = best.max(m * m * m / (64.0 * n * n));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::rat;

    #[test]
    fn set_weight_checks() {
        let mut g = WeightedGraph::new(3);
        assert!(g.set_weight(0, 1, rat(3, 2)).is_err());
        assert!(g.set_weight(0, 0, rat(1, 2)).is_err());
        assert!(g.set_weight(0, 3, rat(1, 2)).is_err());
        g.set_weight(2, 0, rat(1, 2)).unwrap();
        assert_eq!(g.weight(0, 2), rat(1, 2));
        g.set_weight(0, 2, rat(0, 1)).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn e_between_double_counts() {
        let k4 = complete(4);
        let all: Vec<usize> = (0..4).collect();
        assert_eq!(k4.e_between(&all, &all), rat(12, 1));
        assert_eq!(k4.e_between(&[0], &[1, 2]), rat(2, 1));
        assert_eq!(k4.e_between(&[0, 1], &[0, 1]), rat(2, 1));
    }

    #[test]
    fn blow_up_examples() {
        let e = WeightedGraph::from_unit_edges(2, &[(0, 1)]).unwrap();
        let b = e.blow_up(2).unwrap();
        assert_eq!(b.n(), 4);
        assert_eq!(b.edge_pairs(), vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_eq!(e.blow_up(1).unwrap(), e);
        let mut h = WeightedGraph::new(2);
        h.set_weight(0, 1, rat(1, 2)).unwrap();
        let b3 = h.blow_up(3).unwrap();
        assert_eq!(b3.edge_count(), 9);
        assert!(b3.edges().all(|(_, _, w)| *w == rat(1, 2)));
        assert!(e.blow_up(0).is_err());
    }

    #[test]
    fn blow_up_composes() {
        let g = random_graph(5, 0.5, 3).unwrap();
        let ab = g.blow_up(2).unwrap().blow_up(3).unwrap();
        let direct = g.blow_up(6).unwrap();
        // vertex (v*2+i)*3+j of the iterated blow-up is v*6 + (i*3+j)
        assert_eq!(ab, direct);
    }

    #[test]
    fn induced_examples() {
        let k5 = complete(5);
        assert_eq!(k5.induced(&[0, 2, 4]).unwrap(), complete(3));
        assert_eq!(k5.induced(&[0, 1, 2, 3, 4]).unwrap(), k5);
        assert_eq!(k5.induced(&[]).unwrap().n(), 0);
        assert!(k5.induced(&[7]).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(crossing_lower_bound(&grid(4, 4)), 0.0);
        assert_eq!(crossing_lower_bound(&complete(10)), 21.0);
        assert_eq!(crossing_lower_bound(&WeightedGraph::new(5)), 0.0);
        let k = complete(40);
        let m = 780.0f64;
        assert!((crossing_lower_bound(&k) - m.powi(3) / (64.0 * 1600.0)).abs() < 1e-9);
    }

    #[test]
    fn relabel_and_scale() {
        let g = path(3);
        let r = g.relabel(&[2, 1, 0]).unwrap();
        assert!(r.has_edge(2, 1) && r.has_edge(1, 0));
        assert!(g.relabel(&[0, 0, 1]).is_err());
        let s = complete(3).scaled(&rat(1, 2)).unwrap();
        assert_eq!(s.total_weight(), rat(3, 2));
    }
}
