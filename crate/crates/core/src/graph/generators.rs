use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::WeightedGraph;
use crate::error::{domain, Result};
use crate::weight::Rat;

fn unit(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    for (u, v) in edges {
        g.set_weight(u, v, Rat::one()).expect("generator edge in range");
    }
    g
}

pub fn complete(n: usize) -> WeightedGraph {
    unit(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> WeightedGraph {
    unit(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
}

pub fn path(n: usize) -> WeightedGraph {
    unit(n, (1..n).map(|v| (v - 1, v)))
}

pub fn cycle(n: usize) -> WeightedGraph {
    let mut g = path(n);
    if n >= 3 {
        g.set_weight(n - 1, 0, Rat::one()).unwrap();
    }
    g
}

/// `rows × cols` grid, vertex `(r, c)` is `r*cols + c`.
pub fn grid(rows: usize, cols: usize) -> WeightedGraph {
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                e.push((v, v + 1));
            }
            if r + 1 < rows {
                e.push((v, v + cols));
            }
        }
    }
    unit(rows * cols, e)
}

/// `G(n, p)` with unit weights; pairs are visited in lexicographic order.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<WeightedGraph> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("edge probability {p} outside [0,1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                e.push((u, v));
            }
        }
    }
    Ok(unit(n, e))
}
