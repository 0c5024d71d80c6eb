//! Labeled cut distance and weak-regularity partitions.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graph::{averaged, VertexPartition, WeightedGraph};
use crate::weight::{self, Rat};

pub const DEFAULT_EXACT_LIMIT: usize = 24;

/// Sets `S`, `T` and the discrepancy `|e_1(S,T) − e_2(S,T)| / n²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutWitness {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub value: f64,
    /// Exact value when both graphs have a manageable common denominator.
    #[serde(serialize_with = "ser_opt_rat")]
    pub exact_value: Option<Rat>,
    /// True when produced by the exhaustive search.
    pub exact: bool,
}

fn ser_opt_rat<S: serde::Serializer>(r: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&weight::format(r)),
        None => s.serialize_none(),
    }
}

impl CutWitness {
    /// Recomputes the witness value from the sets.
    pub fn recompute(&self, g1: &WeightedGraph, g2: &WeightedGraph) -> Rat {
        let n = g1.n();
        if n == 0 {
            return Rat::zero();
        }
        let d = g1.e_between(&self.s, &self.t) - g2.e_between(&self.s, &self.t);
        let d = if d < Rat::zero() { -d } else { d };
        d / Rat::from_integer(BigInt::from(n * n))
    }
}

/// Difference matrix in whichever arithmetic is exact enough.
enum Diff {
    Int { m: Vec<i64>, scale: BigInt },
    Float(Vec<f64>),
}

fn diff_matrix(g1: &WeightedGraph, g2: &WeightedGraph) -> Diff {
    let n = g1.n();
    let limit = BigInt::from(1u64 << 40);
    let ws = g1.edges().map(|e| e.2).chain(g2.edges().map(|e| e.2));
    if let Some(scale) = weight::common_denominator(ws, &limit) {
        let mut m = vec![0i64; n * n];
        let sc = Rat::from_integer(scale.clone());
        for (sign, g) in [(1i64, g1), (-1, g2)] {
            for (u, v, w) in g.edges() {
                let x = (w * &sc).to_integer().to_i64().unwrap() * sign;
                m[u * n + v] += x;
                m[v * n + u] += x;
            }
        }
        Diff::Int { m, scale }
    } else {
        let a = g1.matrix_f64();
        let b = g2.matrix_f64();
        Diff::Float(a.iter().zip(&b).map(|(x, y)| x - y).collect())
    }
}

trait Num: Copy + PartialOrd + Default + std::ops::AddAssign + std::ops::SubAssign + std::ops::Neg<Output = Self> {
    fn zero() -> Self {
        Self::default()
    }
    /// `a > b` beyond rounding noise.
    fn above(a: Self, b: Self) -> bool;
}

impl Num for i64 {
    fn above(a: Self, b: Self) -> bool {
        a > b
    }
}

impl Num for f64 {
    fn above(a: Self, b: Self) -> bool {
        a > b + 1e-9
    }
}

fn check_pair(g1: &WeightedGraph, g2: &WeightedGraph) -> Result<()> {
    if g1.n() != g2.n() {
        return domain(format!("vertex sets differ: {} vs {}", g1.n(), g2.n()));
    }
    Ok(())
}

fn mask_to_vec(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Exhaustive search. Ties go to the smallest `S` bitmask (vertex 0 is the
/// least significant bit), then the smallest `T` bitmask.
fn exact_search<T: Num>(m: &[T], n: usize) -> (T, u32, u32) {
    let mut col = vec![T::zero(); n];
    let mut best = (T::zero(), 0u32, 0u32);
    let mut s: u32 = 0;
    let consider = |val: T, sm: u32, tm: u32, best: &mut (T, u32, u32)| {
        if T::above(val, best.0) || (!T::above(best.0, val) && (sm, tm) < (best.1, best.2)) {
            *best = (val, sm, tm);
        }
    };
    for i in 1u64..(1u64 << n) {
        let b = i.trailing_zeros() as usize;
        s ^= 1 << b;
        let row = &m[b * n..b * n + n];
        if s >> b & 1 == 1 {
            for (c, &x) in col.iter_mut().zip(row) {
                *c += x;
            }
        } else {
            for (c, &x) in col.iter_mut().zip(row) {
                *c -= x;
            }
        }
        let (mut pos, mut neg) = (T::zero(), T::zero());
        let (mut tp, mut tn) = (0u32, 0u32);
        for (t, &c) in col.iter().enumerate() {
            if c > T::zero() {
                pos += c;
                tp |= 1 << t;
            } else if c < T::zero() {
                neg -= c;
                tn |= 1 << t;
            }
        }
        if T::above(pos, neg) || (!T::above(neg, pos) && tp <= tn) {
            consider(pos, s, tp, &mut best);
        } else {
            consider(neg, s, tn, &mut best);
        }
    }
    best
}

pub fn cut_distance_exact(g1: &WeightedGraph, g2: &WeightedGraph) -> Result<CutWitness> {
    cut_distance_exact_with_limit(g1, g2, DEFAULT_EXACT_LIMIT)
}

pub fn cut_distance_exact_with_limit(g1: &WeightedGraph, g2: &WeightedGraph, limit: usize) -> Result<CutWitness> {
    check_pair(g1, g2)?;
    let n = g1.n();
    if n > limit.min(30) {
        return Err(Error::Budget(format!("n = {n} exceeds the exact cut-distance limit {limit}; use the heuristic")));
    }
    if n == 0 {
        return Ok(CutWitness { s: vec![], t: vec![], value: 0.0, exact_value: Some(Rat::zero()), exact: true });
    }
    let nn = (n * n) as f64;
    Ok(match diff_matrix(g1, g2) {
        Diff::Int { m, scale } => {
            let (v, s, t) = exact_search(&m, n);
            let ev = Rat::new(BigInt::from(v), scale * BigInt::from(n * n));
            CutWitness { s: mask_to_vec(s, n), t: mask_to_vec(t, n), value: weight::to_f64(&ev), exact_value: Some(ev), exact: true }
        }
        Diff::Float(m) => {
            let (v, s, t) = exact_search(&m, n);
            CutWitness { s: mask_to_vec(s, n), t: mask_to_vec(t, n), value: v / nn, exact_value: None, exact: true }
        }
    })
}

/// Best response: members `x` whose summed difference against `other` has
/// the requested sign.
fn best_response<T: Num>(m: &[T], n: usize, other: &[bool], positive: bool) -> (Vec<bool>, T) {
    let mut out = vec![false; n];
    let mut total = T::zero();
    for x in 0..n {
        let mut acc = T::zero();
        let row = &m[x * n..x * n + n];
        for (y, &o) in other.iter().enumerate() {
            if o {
                acc += row[y];
            }
        }
        let take = if positive { acc > T::zero() } else { acc < T::zero() };
        if take {
            out[x] = true;
            if positive {
                total += acc;
            } else {
                total -= acc;
            }
        }
    }
    (out, total)
}

fn alternate<T: Num>(m: &[T], n: usize, start: Vec<bool>, positive: bool) -> (T, Vec<bool>, Vec<bool>) {
    let mut s = start;
    let (mut t, mut val) = best_response(m, n, &s, positive);
    for _ in 0..1000 {
        let (s2, v2) = best_response(m, n, &t, positive);
        if !T::above(v2, val) {
            break;
        }
        s = s2;
        val = v2;
        let (t2, v3) = best_response(m, n, &s, positive);
        if !T::above(v3, val) {
            break;
        }
        t = t2;
        val = v3;
    }
    (val, s, t)
}

fn heuristic_search<T: Num>(m: &[T], n: usize, restarts: usize, seed: u64) -> (T, Vec<bool>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (T::zero(), vec![false; n], vec![false; n]);
    for r in 0..restarts.max(1) {
        let start: Vec<bool> = if r == 0 { vec![true; n] } else { (0..n).map(|_| rng.gen_bool(0.5)).collect() };
        for positive in [true, false] {
            let cand = alternate(m, n, start.clone(), positive);
            if T::above(cand.0, best.0) {
                best = cand;
            }
        }
    }
    best
}

fn bools_to_vec(b: &[bool]) -> Vec<usize> {
    b.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i).collect()
}

/// Alternating maximization; always a valid witness, hence a lower bound.
pub fn cut_distance_heuristic(g1: &WeightedGraph, g2: &WeightedGraph, restarts: usize, seed: u64) -> Result<CutWitness> {
    check_pair(g1, g2)?;
    let n = g1.n();
    if n == 0 {
        return Ok(CutWitness { s: vec![], t: vec![], value: 0.0, exact_value: Some(Rat::zero()), exact: false });
    }
    let nn = (n * n) as f64;
    Ok(match diff_matrix(g1, g2) {
        Diff::Int { m, scale } => {
            let (v, s, t) = heuristic_search(&m, n, restarts, seed);
            let ev = Rat::new(BigInt::from(v), scale * BigInt::from(n * n));
            CutWitness { s: bools_to_vec(&s), t: bools_to_vec(&t), value: weight::to_f64(&ev), exact_value: Some(ev), exact: false }
        }
        Diff::Float(m) => {
            let (v, s, t) = heuristic_search(&m, n, restarts, seed);
            CutWitness { s: bools_to_vec(&s), t: bools_to_vec(&t), value: v / nn, exact_value: None, exact: false }
        }
    })
}

/// Exact when `n ≤ limit`, heuristic otherwise.
pub fn cut_distance(g1: &WeightedGraph, g2: &WeightedGraph, limit: usize, restarts: usize, seed: u64) -> Result<CutWitness> {
    if g1.n() <= limit {
        cut_distance_exact_with_limit(g1, g2, limit)
    } else {
        cut_distance_heuristic(g1, g2, restarts, seed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegularityStatus {
    Certified,
    Heuristic,
    Budget,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub partition: VertexPartition,
    pub epsilon: f64,
    pub defect: f64,
    pub class_count: usize,
    pub iterations: usize,
    pub status: RegularityStatus,
    pub witness: CutWitness,
    /// Mean-square index of each partition visited, before and after every split.
    pub index_trace: Vec<IndexStep>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IndexStep {
    pub before: f64,
    pub after_split: f64,
    pub after_rebalance: f64,
}

#[derive(Clone, Debug)]
pub struct FkOptions {
    pub epsilon: f64,
    pub max_classes: usize,
    pub seed: u64,
    /// Size of the starting equitable partition.
    pub initial_classes: usize,
    pub exact_limit: usize,
    pub restarts: usize,
}

impl FkOptions {
    pub fn new(epsilon: f64, max_classes: usize, seed: u64) -> Self {
        FkOptions { epsilon, max_classes, seed, initial_classes: 1, exact_limit: DEFAULT_EXACT_LIMIT, restarts: 20 }
    }
}

/// `Σ d_ij² |V_i||V_j| / n²` with `d_ij = e(V_i,V_j)/(|V_i||V_j|)`.
pub fn partition_index(g: &WeightedGraph, p: &VertexPartition) -> f64 {
    let k = p.k();
    let n = g.n() as f64;
    if k == 0 {
        return 0.0;
    }
    let mut e = vec![0.0f64; k * k];
    for (u, v, w) in g.edges() {
        let (a, b) = (p.class_of(u), p.class_of(v));
        let x = weight::to_f64(w);
        e[a * k + b] += x;
        e[b * k + a] += x;
    }
    let s = p.sizes();
    let mut q = 0.0;
    for i in 0..k {
        for j in 0..k {
            let ab = (s[i] * s[j]) as f64;
            q += e[i * k + j] * e[i * k + j] / ab;
        }
    }
    q / (n * n)
}

pub fn verify_regularity(g: &WeightedGraph, p: &VertexPartition, limit: usize, seed: u64) -> Result<CutWitness> {
    let a = averaged(g, p)?;
    cut_distance(g, &a, limit, 20, seed)
}

fn split(p: &VertexPartition, s: &[usize], t: &[usize]) -> Vec<Vec<usize>> {
    let n = p.n();
    let mut in_s = vec![false; n];
    let mut in_t = vec![false; n];
    s.iter().for_each(|&x| in_s[x] = true);
    t.iter().for_each(|&x| in_t[x] = true);
    let mut parts = Vec::new();
    for c in p.classes() {
        let mut four = [vec![], vec![], vec![], vec![]];
        for &v in c {
            let idx = match (in_s[v], in_t[v]) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
            four[idx].push(v);
        }
        parts.extend(four.into_iter().filter(|x| !x.is_empty()));
    }
    parts
}

/// Equitable sizes with the fewest moves; surplus vertices leave their part
/// lowest index first.
fn rebalance(mut parts: Vec<Vec<usize>>, n: usize) -> Vec<Vec<usize>> {
    let k = parts.len();
    let (q, r) = (n / k, n % k);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| parts[b].len().cmp(&parts[a].len()).then(a.cmp(&b)));
    let mut target = vec![q; k];
    for &i in order.iter().take(r) {
        target[i] += 1;
    }
    let mut pool = Vec::new();
    for (i, part) in parts.iter_mut().enumerate() {
        if part.len() > target[i] {
            let surplus = part.len() - target[i];
            pool.extend(part.drain(..surplus));
        }
    }
    pool.reverse();
    for (i, part) in parts.iter_mut().enumerate() {
        while part.len() < target[i] {
            part.push(pool.pop().expect("sizes add up"));
        }
        part.sort_unstable();
    }
    parts
}

pub fn fk_partition(g: &WeightedGraph, epsilon: f64, max_classes: usize, seed: u64) -> Result<RegularityReport> {
    fk_partition_with(g, &FkOptions::new(epsilon, max_classes, seed))
}

pub fn fk_partition_with(g: &WeightedGraph, o: &FkOptions) -> Result<RegularityReport> {
    if !(o.epsilon > 0.0 && o.epsilon <= 1.0) {
        return domain(format!("epsilon {} outside (0, 1]", o.epsilon));
    }
    let n = g.n();
    let mut p = VertexPartition::equitable(n, o.initial_classes.clamp(1, o.max_classes.max(1)));
    let mut trace = Vec::new();
    let mut iterations = 0;
    let exact = n <= o.exact_limit;
    loop {
        let w = verify_regularity(g, &p, o.exact_limit, o.seed.wrapping_add(iterations as u64))?;
        let done = |status| RegularityReport {
            class_count: p.k(),
            partition: p.clone(),
            epsilon: o.epsilon,
            defect: w.value,
            iterations,
            status,
            witness: w.clone(),
            index_trace: trace.clone(),
        };
        if w.value <= o.epsilon {
            return Ok(done(if exact { RegularityStatus::Certified } else { RegularityStatus::Heuristic }));
        }
        let parts = split(&p, &w.s, &w.t);
        if parts.len() > o.max_classes || parts.len() == p.k() {
            return Ok(done(RegularityStatus::Budget));
        }
        let before = partition_index(g, &p);
        let split_p = VertexPartition::new(n, parts.clone())?;
        let after_split = partition_index(g, &split_p);
        let next = VertexPartition::new(n, rebalance(parts, n))?;
        let after_rebalance = partition_index(g, &next);
        trace.push(IndexStep { before, after_split, after_rebalance });
        p = next;
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, complete_bipartite, random_graph};
    use crate::weight::rat;

    fn random_weighted(n: usize, seed: u64) -> WeightedGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = WeightedGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.6) {
                    g.set_weight(u, v, rat(rng.gen_range(1..=100), 100)).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn self_distance_is_zero() {
        let g = random_weighted(9, 1);
        let w = cut_distance_exact(&g, &g).unwrap();
        assert_eq!(w.value, 0.0);
        assert!(w.s.is_empty() && w.t.is_empty());
        assert_eq!(cut_distance_heuristic(&g, &g, 5, 1).unwrap().value, 0.0);
    }

    #[test]
    fn k4_against_edgeless() {
        let (k4, e) = (complete(4), WeightedGraph::new(4));
        let w = cut_distance_exact(&k4, &e).unwrap();
        assert_eq!(w.exact_value, Some(rat(3, 4)));
        assert_eq!((w.s.clone(), w.t.clone()), (vec![0, 1, 2, 3], vec![0, 1, 2, 3]));
        for seed in 0..5 {
            assert_eq!(cut_distance_heuristic(&k4, &e, 3, seed).unwrap().exact_value, Some(rat(3, 4)));
        }
    }

    #[test]
    fn single_differing_edge() {
        let n = 7;
        let mut a = random_weighted(n, 3);
        let mut b = a.clone();
        a.set_weight(2, 5, rat(9, 10)).unwrap();
        b.set_weight(2, 5, rat(3, 10)).unwrap();
        let w = cut_distance_exact(&a, &b).unwrap();
        assert_eq!(w.exact_value, Some(rat(2 * 6, 10 * 49)));
        assert_eq!((w.s, w.t), (vec![2, 5], vec![2, 5]));
    }

    #[test]
    fn witness_recomputes() {
        for seed in 0..10 {
            let (a, b) = (random_weighted(8, seed), random_weighted(8, seed + 100));
            let w = cut_distance_exact(&a, &b).unwrap();
            assert_eq!(w.recompute(&a, &b), w.exact_value.clone().unwrap());
            let h = cut_distance_heuristic(&a, &b, 10, seed).unwrap();
            assert_eq!(h.recompute(&a, &b), h.exact_value.clone().unwrap());
            assert!(h.value <= w.value);
        }
    }

    #[test]
    fn heuristic_usually_exact() {
        let mut hits = 0;
        for seed in 0..100 {
            let (a, b) = (random_weighted(16, seed), random_weighted(16, seed + 1000));
            let w = cut_distance_exact(&a, &b).unwrap();
            let h = cut_distance_heuristic(&a, &b, 20, seed).unwrap();
            assert!(h.exact_value <= w.exact_value);
            hits += usize::from(h.exact_value == w.exact_value);
        }
        assert!(hits >= 90, "{hits}");
    }

    #[test]
    fn triangle_inequality() {
        for seed in 0..20 {
            let g: Vec<_> = (0..3).map(|i| random_weighted(7, seed * 3 + i)).collect();
            let d = |x: usize, y: usize| cut_distance_exact(&g[x], &g[y]).unwrap().exact_value.unwrap();
            assert!(d(0, 2) <= d(0, 1) + d(1, 2));
        }
    }

    #[test]
    fn float_fallback_matches() {
        let mut a = WeightedGraph::new(5);
        let mut b = WeightedGraph::new(5);
        // denominators too large for the integer path
        a.set_weight(0, 1, crate::weight::parse("0.1234567890123456789").unwrap()).unwrap();
        b.set_weight(2, 3, rat(1, 3)).unwrap();
        let w = cut_distance_exact(&a, &b).unwrap();
        assert!(w.exact_value.is_none());
        assert!((w.value - 2.0 / 3.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn exact_limit_enforced() {
        let g = WeightedGraph::new(30);
        assert!(matches!(cut_distance_exact(&g, &g), Err(Error::Budget(_))));
        assert!(cut_distance_exact(&g, &WeightedGraph::new(29)).is_err());
    }

    #[test]
    fn fk_epsilon_one_is_trivial() {
        let r = fk_partition(&random_graph(12, 0.5, 1).unwrap(), 1.0, 16, 0).unwrap();
        assert_eq!(r.class_count, 1);
        assert!(r.defect <= 1.0);
        assert!(fk_partition(&complete(3), 0.0, 4, 0).is_err());
    }

    #[test]
    fn fk_bipartite_reaches_zero() {
        let g = complete_bipartite(8, 8);
        let r = fk_partition(&g, 0.1, 16, 0).unwrap();
        assert_eq!(r.status, RegularityStatus::Certified);
        assert_eq!(r.defect, 0.0);
        for c in r.partition.classes() {
            assert!(c.iter().all(|&v| v < 8) || c.iter().all(|&v| v >= 8));
        }
    }

    #[test]
    fn fk_random_certified() {
        let g = random_graph(16, 0.5, 7).unwrap();
        let r = fk_partition(&g, 0.25, 32, 7).unwrap();
        assert_eq!(r.status, RegularityStatus::Certified);
        assert!(r.defect <= 0.25);
        let w = verify_regularity(&g, &r.partition, DEFAULT_EXACT_LIMIT, 0).unwrap();
        assert!(w.value <= 0.25);
    }

    #[test]
    fn fk_index_grows_on_split() {
        for seed in 0..6 {
            let g = random_weighted(14, seed);
            let r = fk_partition(&g, 0.02, 64, seed).unwrap();
            assert!(r.partition.is_equitable());
            for s in &r.index_trace {
                assert!(s.after_split >= s.before - 1e-12);
                assert!(s.after_split <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn verify_regularity_examples() {
        let g = random_graph(10, 0.5, 2).unwrap();
        assert_eq!(verify_regularity(&g, &VertexPartition::singletons(10), 24, 0).unwrap().value, 0.0);
        let w = verify_regularity(&complete(4), &VertexPartition::trivial(4), 24, 0).unwrap();
        assert_eq!(w.exact_value, Some(rat(3, 16)));
        assert_eq!(w.s, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rebalance_is_equitable_and_minimal() {
        let parts = vec![vec![0, 1, 2, 3, 4, 5], vec![6], vec![7, 8]];
        let out = rebalance(parts, 9);
        let sizes: Vec<_> = out.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 3, 3]);
        assert_eq!(out[0], vec![3, 4, 5]);
    }
}
