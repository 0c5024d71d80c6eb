//! Straight-line drawings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::graph::WeightedGraph;

pub type Point = (f64, f64);

/// Twice the signed area of `abc`; positive for a left turn.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Proper crossing of segments `ab` and `cd` (shared endpoints don't count).
pub fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Four points are in convex position iff some pairing of them into two
/// segments crosses.
pub fn convex_position(p: [Point; 4]) -> bool {
    segments_cross(p[0], p[1], p[2], p[3]) || segments_cross(p[0], p[2], p[1], p[3]) || segments_cross(p[0], p[3], p[1], p[2])
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometricDrawing {
    pub points: Vec<Point>,
    pub polylines: Vec<((usize, usize), Vec<Point>)>,
}

impl GeometricDrawing {
    pub fn straight(g: &WeightedGraph, points: &[Point]) -> Result<Self> {
        if points.len() != g.n() {
            return domain("need one point per vertex");
        }
        let polylines = g.edge_pairs().into_iter().map(|(u, v)| ((u, v), vec![points[u], points[v]])).collect();
        Ok(GeometricDrawing { points: points.to_vec(), polylines })
    }

    pub fn is_consistent(&self) -> bool {
        self.polylines.iter().all(|((u, v), pl)| pl.len() >= 2 && pl[0] == self.points[*u] && pl[pl.len() - 1] == self.points[*v])
    }
}

fn degenerate(p: &[Point]) -> bool {
    let n = p.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let scale = 1.0 + p[i].0.abs() + p[i].1.abs() + p[j].0.abs() + p[j].1.abs();
                if orient(p[i], p[j], p[k]).abs() <= 1e-12 * scale * scale {
                    return true;
                }
            }
        }
    }
    false
}

/// Weighted count of properly crossing independent edge pairs when every
/// edge is a straight segment. Collinear triples are perturbed away first.
pub fn straight_line_crossings(points: &[Point], g: &WeightedGraph) -> Result<f64> {
    if points.len() != g.n() {
        return domain("need one point per vertex");
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return domain("duplicate points");
    }
    let mut pts = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut tries = 0;
    while degenerate(&pts) {
        tries += 1;
        if tries > 20 {
            return domain("could not perturb points into general position");
        }
        let span = pts.iter().fold(1.0f64, |m, p| m.max(p.0.abs()).max(p.1.abs()));
        for (q, p) in pts.iter_mut().zip(points) {
            *q = (p.0 + rng.gen_range(-1.0..1.0) * 1e-7 * span, p.1 + rng.gen_range(-1.0..1.0) * 1e-7 * span);
        }
    }
    let edges: Vec<(usize, usize, f64)> = g.edges().into_iter().map(|(u, v, w)| (u, v, crate::weight::to_f64(&w))).collect();
    let mut total = 0.0;
    for i in 0..edges.len() {
        let (a, b, wa) = edges[i];
        for &(c, d, wc) in &edges[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_cross(pts[a], pts[b], pts[c], pts[d]) {
                total += wa * wc;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete;
    use proptest::prelude::{prop_assert_eq, prop_assume, proptest};

    #[test]
    fn k4_convex_and_nested() {
        let g = complete(4);
        let sq = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        assert_eq!(straight_line_crossings(&sq, &g).unwrap(), 1.0);
        let tri = [(0.0, 0.0), (4.0, 0.0), (0.0, 4.0), (1.0, 1.0)];
        assert_eq!(straight_line_crossings(&tri, &g).unwrap(), 0.0);
        assert!(convex_position(sq));
        assert!(!convex_position(tri));
    }

    #[test]
    fn duplicates_rejected_collinear_perturbed() {
        let g = complete(3);
        assert!(straight_line_crossings(&[(0.0, 0.0), (0.0, 0.0), (1.0, 1.0)], &g).is_err());
        let line = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)];
        let c = straight_line_crossings(&line, &complete(4)).unwrap();
        assert!(c <= 1.0);
    }

    #[test]
    fn k5_always_crosses() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let p: Vec<Point> = (0..5).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
            assert!(straight_line_crossings(&p, &complete(5)).unwrap() >= 1.0);
        }
    }

    proptest! {
        #[test]
        fn affine_invariance(seed in 0u64..1000, a in 0.2f64..3.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in 0.2f64..3.0, tx in -5.0f64..5.0) {
            prop_assume!((a * d - b * c).abs() > 0.1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p: Vec<Point> = (0..7).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
            let q: Vec<Point> = p.iter().map(|&(x, y)| (a * x + b * y + tx, c * x + d * y - tx)).collect();
            let g = complete(7);
            prop_assert_eq!(straight_line_crossings(&p, &g).unwrap(), straight_line_crossings(&q, &g).unwrap());
        }
    }
}
