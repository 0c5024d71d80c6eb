use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::WeightedGraph;
use crate::error::{structure, Result};
use crate::weight::Rat;

/// Ordered list of nonempty disjoint classes covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPartition {
    classes: Vec<Vec<usize>>,
    #[serde(skip)]
    class_of: Vec<usize>,
}

impl VertexPartition {
    pub fn new(n: usize, classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut class_of = vec![usize::MAX; n];
        for (i, c) in classes.iter().enumerate() {
            if c.is_empty() {
                return structure(format!("class {i} is empty"));
            }
            for &v in c {
                if v >= n {
                    return structure(format!("vertex {v} outside 0..{n}"));
                }
                if class_of[v] != usize::MAX {
                    return structure(format!("vertex {v} in two classes"));
                }
                class_of[v] = i;
            }
        }
        if let Some(v) = class_of.iter().position(|&c| c == usize::MAX) {
            return structure(format!("vertex {v} not covered"));
        }
        let classes = classes
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        Ok(VertexPartition { classes, class_of })
    }

    pub fn singletons(n: usize) -> Self {
        VertexPartition::new(n, (0..n).map(|v| vec![v]).collect()).unwrap()
    }

    pub fn trivial(n: usize) -> Self {
        if n == 0 {
            return VertexPartition { classes: vec![], class_of: vec![] };
        }
        VertexPartition::new(n, vec![(0..n).collect()]).unwrap()
    }

    /// `k` consecutive blocks, the first `n mod k` one larger.
    pub fn equitable(n: usize, k: usize) -> Self {
        let k = k.clamp(1, n.max(1));
        if n == 0 {
            return VertexPartition::trivial(0);
        }
        let (q, r) = (n / k, n % k);
        let mut classes = Vec::with_capacity(k);
        let mut start = 0;
        for i in 0..k {
            let len = q + usize::from(i < r);
            classes.push((start..start + len).collect());
            start += len;
        }
        VertexPartition::new(n, classes).unwrap()
    }

    /// Classes `{v*m .. v*m+m}` of a blow-up.
    pub fn blow_up_classes(n: usize, m: usize) -> Self {
        VertexPartition::new(n * m, (0..n).map(|v| (v * m..v * m + m).collect()).collect()).unwrap()
    }

    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    pub fn is_equitable(&self) -> bool {
        let s = self.sizes();
        match (s.iter().min(), s.iter().max()) {
            (Some(a), Some(b)) => b - a <= 1,
            _ => true,
        }
    }

    /// Classes reordered by smallest member.
    pub fn canonical(&self) -> Self {
        let mut c = self.classes.clone();
        c.sort_by_key(|x| x[0]);
        VertexPartition::new(self.n(), c).unwrap()
    }

}

/// `G/P`: one vertex per class, weights are class-pair densities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGraph {
    pub base: WeightedGraph,
    /// `e_G(V_i, V_i) / |V_i|²`, kept for reconstruction only.
    pub diagonal: Vec<Rat>,
    pub class_sizes: Vec<usize>,
}

/// Class-pair masses `e_G(V_i, V_j)` as a dense `k × k` table.
fn class_masses(g: &WeightedGraph, p: &VertexPartition) -> Result<Vec<Rat>> {
    if p.n() != g.n() {
        return structure(format!("partition covers {} vertices, graph has {}", p.n(), g.n()));
    }
    let k = p.k();
    let mut e = vec![Rat::zero(); k * k];
    for (u, v, w) in g.edges() {
        let (a, b) = (p.class_of(u), p.class_of(v));
        if a == b {
            e[a * k + a] += w * Rat::from_integer(BigInt::from(2));
        } else {
            e[a * k + b] += w;
            e[b * k + a] += w;
        }
    }
    Ok(e)
}

fn density(mass: &Rat, a: usize, b: usize) -> Rat {
    mass / Rat::from_integer(BigInt::from(a * b))
}

pub fn quotient(g: &WeightedGraph, p: &VertexPartition) -> Result<QuotientGraph> {
    let e = class_masses(g, p)?;
    let k = p.k();
    let sizes = p.sizes();
    let mut base = WeightedGraph::new(k);
    for i in 0..k {
        for j in i + 1..k {
            base.set_weight(i, j, density(&e[i * k + j], sizes[i], sizes[j]))?;
        }
    }
    let diagonal = (0..k).map(|i| density(&e[i * k + i], sizes[i], sizes[i])).collect();
    Ok(QuotientGraph { base, diagonal, class_sizes: sizes })
}

/// `G_P` on the original vertex set; distinct same-class pairs get the
/// class self-density.
pub fn averaged(g: &WeightedGraph, p: &VertexPartition) -> Result<WeightedGraph> {
    let e = class_masses(g, p)?;
    let k = p.k();
    let sizes = p.sizes();
    let mut d = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            d.push(density(&e[i * k + j], sizes[i], sizes[j]));
        }
    }
    let mut out = WeightedGraph::new(g.n());
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let w = &d[p.class_of(u) * k + p.class_of(v)];
            if !w.is_zero() {
                out.set_weight(u, v, w.clone())?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, random_graph};
    use crate::weight::rat;

    #[test]
    fn partition_validation() {
        assert!(VertexPartition::new(3, vec![vec![0], vec![1]]).is_err());
        assert!(VertexPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(VertexPartition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
        let p = VertexPartition::equitable(10, 3);
        assert_eq!(p.sizes(), vec![4, 3, 3]);
        assert!(p.is_equitable());
    }

    #[test]
    fn quotient_k4_pairs() {
        let p = VertexPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let q = quotient(&complete(4), &p).unwrap();
        assert_eq!(q.base.weight(0, 1), rat(1, 1));
        assert_eq!(q.diagonal, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn quotient_trivial_cases() {
        let g = random_graph(6, 0.5, 9).unwrap();
        let q = quotient(&g, &VertexPartition::singletons(6)).unwrap();
        assert_eq!(q.base, g);
        assert!(q.diagonal.iter().all(Zero::is_zero));
        let e = WeightedGraph::new(5);
        let q = quotient(&e, &VertexPartition::equitable(5, 2)).unwrap();
        assert_eq!(q.base.edge_count(), 0);
        assert!(quotient(&e, &VertexPartition::equitable(4, 2)).is_err());
    }

    #[test]
    fn averaged_k4_pairs() {
        let p = VertexPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let a = averaged(&complete(4), &p).unwrap();
        assert_eq!(a.weight(0, 2), rat(1, 1));
        assert_eq!(a.weight(0, 1), rat(1, 2));
        assert_eq!(a.weight(2, 3), rat(1, 2));
    }

    #[test]
    fn averaged_idempotent_and_quotient_compatible() {
        let g = random_graph(11, 0.4, 5).unwrap();
        let p = VertexPartition::equitable(11, 3);
        let a = averaged(&g, &p).unwrap();
        let aa = averaged(&a, &p).unwrap();
        let cross = |x: &WeightedGraph| x.filter_edges(|u, v| p.class_of(u) != p.class_of(v));
        assert_eq!(cross(&aa), cross(&a));
        assert_eq!(quotient(&a, &p).unwrap().base, quotient(&g, &p).unwrap().base);
        // self-pairs are zeroed, so the within-class density shrinks by (s-1)/s
        let s0 = p.sizes()[0] as i64;
        assert_eq!(aa.weight(0, 1), a.weight(0, 1) * rat(s0 - 1, s0));
        assert_eq!(averaged(&g, &VertexPartition::singletons(11)).unwrap(), g);
    }

    #[test]
    fn quotient_of_blow_up_recovers_graph() {
        let mut g = random_graph(5, 0.6, 2).unwrap();
        g.set_weight(0, 4, rat(3, 7)).unwrap();
        let b = g.blow_up(3).unwrap();
        let q = quotient(&b, &VertexPartition::blow_up_classes(5, 3)).unwrap();
        assert_eq!(q.base, g);
    }
}
