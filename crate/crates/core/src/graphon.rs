//! Step graphons, crossing-density sandwiches and Monte Carlo probes of
//! four-point convex position.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::beta::beta_reg;

use crate::drawing::{convex_position, straight_line_crossings, Point};
use crate::error::{domain, structure, Error, Result};
use crate::exact::{crossing_number_exact, crossing_number_upper, Budget};
use crate::graph::{complete, WeightedGraph};
use crate::weight::{self, Rat};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepGraphon {
    pub k: usize,
    pub values: Vec<Vec<f64>>,
    pub lengths: Vec<f64>,
}

impl StepGraphon {
    pub fn new(values: Vec<Vec<f64>>, lengths: Vec<f64>) -> Result<Self> {
        let k = lengths.len();
        if k == 0 {
            return domain("a step graphon needs at least one block");
        }
        if values.len() != k || values.iter().any(|r| r.len() != k) {
            return domain("values must be a k x k matrix");
        }
        if lengths.iter().any(|&l| !(l > 0.0)) || (lengths.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return domain("block lengths must be positive and sum to 1");
        }
        for i in 0..k {
            for j in 0..k {
                let x = values[i][j];
                if !(0.0..=1.0).contains(&x) {
                    return domain(format!("value {x} outside [0, 1]"));
                }
                if x != values[j][i] {
                    return domain("values must be symmetric");
                }
            }
        }
        Ok(StepGraphon { k, values, lengths })
    }

    /// The constant graphon `p`.
    pub fn constant(p: f64) -> Result<Self> {
        Self::new(vec![vec![p]], vec![1.0])
    }

    /// `∫ W`.
    pub fn mass(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.k {
            for j in 0..self.k {
                s += self.lengths[i] * self.lengths[j] * self.values[i][j];
            }
        }
        s
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|r| r.iter().map(|x| x * alpha).collect()).collect(), self.lengths.clone())
    }
}

pub fn step_from_graph(g: &WeightedGraph) -> StepGraphon {
    let n = g.n().max(1);
    let mut values = vec![vec![0.0; n]; n];
    for (u, v, w) in g.edges() {
        let x = weight::to_f64(w);
        values[u][v] = x;
        values[v][u] = x;
    }
    StepGraphon { k: n, values, lengths: vec![1.0 / n as f64; n] }
}

/// Length-weighted averages over the groups of `merge`, which must partition the blocks.
pub fn average_step(w: &StepGraphon, merge: &[Vec<usize>]) -> Result<StepGraphon> {
    let mut seen = vec![false; w.k];
    for &b in merge.iter().flatten() {
        if b >= w.k || seen[b] {
            return structure(format!("block {b} missing from range or grouped twice"));
        }
        seen[b] = true;
    }
    if seen.iter().any(|&s| !s) || merge.iter().any(|g| g.is_empty()) {
        return structure("grouping must cover every block with nonempty groups");
    }
    let len: Vec<f64> = merge.iter().map(|g| g.iter().map(|&b| w.lengths[b]).sum()).collect();
    let m = merge.len();
    let mut values = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in a..m {
            let mut s = 0.0;
            for &i in &merge[a] {
                for &j in &merge[b] {
                    s += w.lengths[i] * w.lengths[j] * w.values[i][j];
                }
            }
            let x = (s / (len[a] * len[b])).clamp(0.0, 1.0);
            values[a][b] = x;
            values[b][a] = x;
        }
    }
    let total: f64 = len.iter().sum();
    Ok(StepGraphon { k: m, values, lengths: len.iter().map(|l| l / total).collect() })
}

#[derive(Clone, Debug, Serialize)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
    #[serde(serialize_with = "crate::weight::ser_rat")]
    pub lower_exact: Rat,
    /// Vertex count of the graph whose step graphon is sandwiched.
    pub n: usize,
    pub crossing_weight: f64,
    pub exact: bool,
    pub note: &'static str,
}

/// The graph on `refinement · k` vertices whose step graphon is the average of `w`
/// over equal intervals, with the diagonal cells cleared.
pub fn refinement_graph(w: &StepGraphon, refinement: usize) -> Result<WeightedGraph> {
    if refinement == 0 {
        return domain("refinement must be at least 1");
    }
    let n = refinement * w.k;
    let h = 1.0 / n as f64;
    let mut ends = Vec::with_capacity(w.k);
    let mut acc = 0.0;
    for &l in &w.lengths {
        acc += l;
        ends.push(acc);
    }
    // overlaps[s] = (block, measure) of interval s
    let overlaps: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|s| {
            let (a, b) = (s as f64 * h, (s + 1) as f64 * h);
            let mut out = vec![];
            let mut lo = 0.0;
            for (i, &hi) in ends.iter().enumerate() {
                let x = (b.min(hi) - a.max(lo)).max(0.0);
                if x > 1e-12 * h {
                    out.push((i, x));
                }
                lo = hi;
            }
            out
        })
        .collect();
    let mut g = WeightedGraph::new(n);
    for s in 0..n {
        for t in s + 1..n {
            let x = match (&overlaps[s][..], &overlaps[t][..]) {
                ([(i, _)], [(j, _)]) => w.values[*i][*j],
                (os, ot) => {
                    let mut v = 0.0;
                    let (ms, mt): (f64, f64) = (os.iter().map(|o| o.1).sum(), ot.iter().map(|o| o.1).sum());
                    for &(i, a) in os {
                        for &(j, b) in ot {
                            v += a * b * w.values[i][j];
                        }
                    }
                    (v / (ms * mt)).clamp(0.0, 1.0)
                }
            };
            g.set_weight(s, t, weight::from_f64(x))?;
        }
    }
    Ok(g)
}

/// `(cd(G_N), cd(G_N) + 1/N)` for the refinement graph `G_N`. The crossing number is exact
/// when the solver finishes within `budget`, otherwise a heuristic value flagged by `exact = false`.
pub fn cd_sandwich(w: &StepGraphon, refinement: usize, budget: &Budget, seed: u64) -> Result<Sandwich> {
    let g = refinement_graph(w, refinement)?;
    let n = g.n();
    let sol = if n <= 7 || g.edge_count() <= 16 {
        crossing_number_exact(&g, budget)?
    } else {
        crossing_number_upper(&g, budget.restarts, seed)
    };
    let n4 = Rat::from_integer((n as u64).pow(4).into());
    let lower_exact = &sol.value_exact / &n4;
    let lower = weight::to_f64(&lower_exact);
    Ok(Sandwich {
        lower,
        upper: lower + 1.0 / n as f64,
        lower_exact,
        n,
        crossing_weight: sol.value,
        exact: sol.exact,
        note: "brackets cd of the refinement graph's step graphon; closeness to cd(W) is not certified",
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlanarRegion {
    /// `[0,1]²`
    Square,
    /// Unit disk.
    Disk,
    /// Triangle `(0,0), (1,0), (0,1)`.
    Triangle,
    /// Unit disk minus the concentric disk of radius `inner`.
    Annulus { inner: f64 },
    /// Union of axis-parallel boxes `[x0,x1] × [y0,y1]`.
    Boxes { boxes: Vec<[f64; 4]> },
    /// Image of `base` under `p ↦ M p + t`, `M = [[a, b], [c, d]]`.
    Affine { base: Box<PlanarRegion>, m: [f64; 4], t: [f64; 2] },
}

impl PlanarRegion {
    pub fn contains(&self, p: Point) -> bool {
        let (x, y) = p;
        match self {
            PlanarRegion::Square => (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y),
            PlanarRegion::Disk => x * x + y * y <= 1.0,
            PlanarRegion::Triangle => x >= 0.0 && y >= 0.0 && x + y <= 1.0,
            PlanarRegion::Annulus { inner } => {
                let r = x * x + y * y;
                r <= 1.0 && r >= inner * inner
            }
            PlanarRegion::Boxes { boxes } => boxes.iter().any(|b| x >= b[0] && x <= b[2] && y >= b[1] && y <= b[3]),
            PlanarRegion::Affine { base, m, t } => {
                let det = m[0] * m[3] - m[1] * m[2];
                let (u, v) = (x - t[0], y - t[1]);
                base.contains(((m[3] * u - m[1] * v) / det, (-m[2] * u + m[0] * v) / det))
            }
        }
    }

    /// `(x0, y0, x1, y1)`
    pub fn bbox(&self) -> [f64; 4] {
        match self {
            PlanarRegion::Square | PlanarRegion::Triangle => [0.0, 0.0, 1.0, 1.0],
            PlanarRegion::Disk | PlanarRegion::Annulus { .. } => [-1.0, -1.0, 1.0, 1.0],
            PlanarRegion::Boxes { boxes } => boxes.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |a, b| {
                [a[0].min(b[0]), a[1].min(b[1]), a[2].max(b[2]), a[3].max(b[3])]
            }),
            PlanarRegion::Affine { base, m, t } => {
                let b = base.bbox();
                let mut r = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
                for (x, y) in [(b[0], b[1]), (b[2], b[1]), (b[0], b[3]), (b[2], b[3])] {
                    let (u, v) = (m[0] * x + m[1] * y + t[0], m[2] * x + m[3] * y + t[1]);
                    r = [r[0].min(u), r[1].min(v), r[2].max(u), r[3].max(v)];
                }
                r
            }
        }
    }

    /// Midpoint-rule area on a `res × res` grid over the bounding box.
    pub fn area_quadrature(&self, res: usize) -> f64 {
        let b = self.bbox();
        let (w, h) = (b[2] - b[0], b[3] - b[1]);
        if !(w > 0.0 && h > 0.0) || res == 0 {
            return 0.0;
        }
        let mut hits = 0usize;
        for i in 0..res {
            for j in 0..res {
                let p = (b[0] + (i as f64 + 0.5) * w / res as f64, b[1] + (j as f64 + 0.5) * h / res as f64);
                if self.contains(p) {
                    hits += 1;
                }
            }
        }
        w * h * hits as f64 / (res * res) as f64
    }

    pub fn area(&self) -> f64 {
        match self {
            PlanarRegion::Square => 1.0,
            PlanarRegion::Disk => PI,
            PlanarRegion::Triangle => 0.5,
            PlanarRegion::Annulus { inner } => PI * (1.0 - inner * inner),
            PlanarRegion::Affine { base, m, .. } => base.area() * (m[0] * m[3] - m[1] * m[2]).abs(),
            PlanarRegion::Boxes { boxes } => {
                let axis = |a: usize, b: usize| {
                    let mut v: Vec<f64> = boxes.iter().flat_map(|x| [x[a], x[b]]).collect();
                    v.sort_by(f64::total_cmp);
                    v.dedup();
                    v
                };
                let (xs, ys) = (axis(0, 2), axis(1, 3));
                let mut s = 0.0;
                for x in xs.windows(2) {
                    for y in ys.windows(2) {
                        if self.contains((0.5 * (x[0] + x[1]), 0.5 * (y[0] + y[1]))) {
                            s += (x[1] - x[0]) * (y[1] - y[0]);
                        }
                    }
                }
                s
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PlanarRegion::Annulus { inner } if !(0.0..1.0).contains(inner) => return region(format!("annulus inner radius {inner} outside [0, 1)")),
            PlanarRegion::Boxes { boxes } if boxes.iter().any(|b| !(b[2] > b[0] && b[3] > b[1])) || boxes.is_empty() => {
                return region("boxes need x0 < x1 and y0 < y1")
            }
            PlanarRegion::Affine { base, m, .. } => {
                if (m[0] * m[3] - m[1] * m[2]).abs() < 1e-12 {
                    return region("affine map is singular");
                }
                base.validate()?;
            }
            _ => {}
        }
        let b = self.bbox();
        if self.area_quadrature(256) <= 0.0 {
            return region("region has no area");
        }
        if self.area() / ((b[2] - b[0]) * (b[3] - b[1])) < 1e-4 {
            return region("rejection acceptance rate below 1e-4");
        }
        Ok(())
    }

    /// `square`, `disk`, `triangle`, `annulus:INNER`, `boxes:x0,y0,x1,y1;...`,
    /// `parallelogram:a,b,c,d` (the square under that linear map).
    pub fn parse(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        let nums = |t: &str| -> Result<Vec<f64>> {
            t.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| Error::Domain(format!("bad number {x:?} in region {s:?}")))).collect()
        };
        let r = match name.trim() {
            "square" => PlanarRegion::Square,
            "disk" => PlanarRegion::Disk,
            "triangle" => PlanarRegion::Triangle,
            "annulus" => PlanarRegion::Annulus { inner: arg.trim().parse().map_err(|_| Error::Domain(format!("annulus needs an inner radius, got {arg:?}")))? },
            "boxes" => {
                let boxes = arg
                    .split(';')
                    .map(|b| {
                        let v = nums(b)?;
                        if v.len() != 4 {
                            return domain("each box needs x0,y0,x1,y1");
                        }
                        Ok([v[0], v[1], v[2], v[3]])
                    })
                    .collect::<Result<Vec<_>>>()?;
                PlanarRegion::Boxes { boxes }
            }
            "parallelogram" => {
                let v = nums(arg)?;
                if v.len() != 4 {
                    return domain("parallelogram needs a,b,c,d");
                }
                PlanarRegion::Affine { base: Box::new(PlanarRegion::Square), m: [v[0], v[1], v[2], v[3]], t: [0.0, 0.0] }
            }
            other => return domain(format!("unknown region {other:?}")),
        };
        r.validate()?;
        Ok(r)
    }

    /// Uniform point by rejection from the bounding box.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<Point> {
        let b = self.bbox();
        for _ in 0..1_000_000 {
            let p = (rng.gen_range(b[0]..b[2]), rng.gen_range(b[1]..b[3]));
            if self.contains(p) {
                return Ok(p);
            }
        }
        region("no point accepted in 10^6 proposals")
    }
}

fn region<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Region(msg.into()))
}

/// Two-sided Clopper–Pearson interval for `x` successes in `n` trials.
pub fn clopper_pearson(x: u64, n: u64, confidence: f64) -> (f64, f64) {
    let alpha = 1.0 - confidence;
    let solve = |f: &dyn Fn(f64) -> f64, target: f64| {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let (xf, nf) = (x as f64, n as f64);
    let lower = if x == 0 { 0.0 } else { solve(&|p| beta_reg(xf, nf - xf + 1.0, p), alpha / 2.0) };
    let upper = if x == n { 1.0 } else { solve(&|p| beta_reg(xf + 1.0, nf - xf, p), 1.0 - alpha / 2.0) };
    (lower, upper)
}

#[derive(Clone, Debug, Serialize)]
pub struct SylvesterEstimate {
    pub estimate: f64,
    /// Largest distance from the estimate to the ends of the 99% interval.
    pub radius: f64,
    pub interval: (f64, f64),
    pub convex: u64,
    pub samples: u64,
}

const CHUNK: u64 = 1 << 14;

/// Fraction of uniform 4-point samples from `r` in convex position. Samples come in fixed
/// chunks, chunk `c` drawn from stream `c` of the seeded generator, so results do not
/// depend on `threads`.
pub fn sylvester_convex_probability(r: &PlanarRegion, samples: u64, seed: u64, threads: usize) -> Result<SylvesterEstimate> {
    if samples == 0 {
        return domain("at least one sample required");
    }
    r.validate()?;
    let chunks = samples.div_ceil(CHUNK);
    let threads = threads.max(1).min(chunks as usize);
    let counts = std::thread::scope(|sc| -> Result<Vec<u64>> {
        let hs: Vec<_> = (0..threads)
            .map(|w| {
                sc.spawn(move || -> Result<u64> {
                    let mut hits = 0;
                    let mut c = w as u64;
                    while c < chunks {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(c);
                        let len = CHUNK.min(samples - c * CHUNK);
                        for _ in 0..len {
                            let p = [r.sample(&mut rng)?, r.sample(&mut rng)?, r.sample(&mut rng)?, r.sample(&mut rng)?];
                            hits += convex_position(p) as u64;
                        }
                        c += threads as u64;
                    }
                    Ok(hits)
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("sampling worker panicked")).collect()
    })?;
    let convex: u64 = counts.iter().sum();
    let estimate = convex as f64 / samples as f64;
    let interval = clopper_pearson(convex, samples, 0.99);
    Ok(SylvesterEstimate { estimate, radius: (estimate - interval.0).max(interval.1 - estimate), interval, convex, samples })
}

#[derive(Clone, Debug, Serialize)]
pub struct RectilinearUpper {
    pub n: usize,
    pub best: f64,
    /// `best / C(n,4)`
    pub ratio: f64,
    pub points: Vec<Point>,
    /// `(sample index, value)` at every improvement of the running minimum.
    pub trace: Vec<(u64, f64)>,
}

/// Fewest straight-line crossings of `K_n` over random point sets from `r`.
pub fn rectilinear_density_upper(n: usize, samples: u64, seed: u64, r: &PlanarRegion) -> Result<RectilinearUpper> {
    if n < 4 {
        return domain("need n >= 4");
    }
    if samples == 0 {
        return domain("at least one sample required");
    }
    r.validate()?;
    let g = complete(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut points = vec![];
    let mut trace = vec![];
    for i in 0..samples {
        let p: Vec<Point> = (0..n).map(|_| r.sample(&mut rng)).collect::<Result<_>>()?;
        let c = match straight_line_crossings(&p, &g) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if c < best {
            best = c;
            points = p;
            trace.push((i, c));
            if c == 0.0 {
                break;
            }
        }
    }
    let choose4 = (n * (n - 1) * (n - 2) * (n - 3) / 24) as f64;
    Ok(RectilinearUpper { n, best, ratio: best / choose4, points, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_graph;
    use crate::weight::rat;

    #[test]
    fn step_of_k2_and_edgeless() {
        let w = step_from_graph(&complete(2));
        assert_eq!(w.values, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(w.lengths, vec![0.5, 0.5]);
        let e = step_from_graph(&WeightedGraph::new(3));
        assert!(e.values.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn blow_up_step_is_a_refinement() {
        let g = random_graph(5, 0.5, 2).unwrap();
        let (w, b) = (step_from_graph(&g), step_from_graph(&g.blow_up(3).unwrap()));
        for s in 0..15 {
            for t in 0..15 {
                assert_eq!(b.values[s][t], w.values[s / 3][t / 3]);
            }
        }
        let groups: Vec<Vec<usize>> = (0..5).map(|i| (3 * i..3 * i + 3).collect()).collect();
        let m = average_step(&b, &groups).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((m.values[i][j] - w.values[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn averaging_rules() {
        let k2 = step_from_graph(&complete(2));
        let one = average_step(&k2, &[vec![0, 1]]).unwrap();
        assert_eq!(one.values, vec![vec![0.5]]);
        assert_eq!(average_step(&k2, &[vec![0], vec![1]]).unwrap(), k2);
        let c = StepGraphon::new(vec![vec![0.3; 4]; 4], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let a = average_step(&c, &[vec![2, 0], vec![1, 3]]).unwrap();
        assert!(a.values.iter().flatten().all(|&x| (x - 0.3).abs() < 1e-15));
        let g = random_graph(6, 0.5, 7).unwrap();
        let w = StepGraphon { lengths: vec![0.05, 0.1, 0.15, 0.2, 0.2, 0.3], ..step_from_graph(&g) };
        let merge = vec![vec![0, 5], vec![1, 2, 3], vec![4]];
        let a = average_step(&w, &merge).unwrap();
        assert!((a.mass() - w.mass()).abs() < 1e-12);
        let aa = average_step(&a, &[vec![0], vec![1], vec![2]]).unwrap();
        for (x, y) in aa.values.iter().flatten().zip(a.values.iter().flatten()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(average_step(&w, &[vec![0, 1], vec![1, 2, 3, 4, 5]]).is_err());
        assert!(average_step(&w, &[vec![0, 1, 2]]).is_err());
        assert!(average_step(&w, &[vec![0, 1, 2, 3, 4, 9]]).is_err());
    }

    #[test]
    fn graphon_validation() {
        assert!(StepGraphon::new(vec![vec![0.0, 0.2], vec![0.3, 0.0]], vec![0.5, 0.5]).is_err());
        assert!(StepGraphon::new(vec![vec![1.5]], vec![1.0]).is_err());
        assert!(StepGraphon::new(vec![vec![0.5]], vec![0.9]).is_err());
    }

    #[test]
    fn sandwiches() {
        let b = Budget::default();
        let z = cd_sandwich(&StepGraphon::constant(0.0).unwrap(), 5, &b, 0).unwrap();
        assert_eq!((z.lower, z.upper), (0.0, 0.2));
        let k5 = cd_sandwich(&step_from_graph(&complete(5)), 1, &b, 0).unwrap();
        assert!(k5.exact);
        assert_eq!(k5.lower_exact, rat(1, 625));
        assert_eq!(k5.upper, 1.0 / 625.0 + 0.2);
        let k6 = step_from_graph(&complete(6));
        let half = cd_sandwich(&k6.scaled(0.5).unwrap(), 1, &b, 0).unwrap();
        let full = cd_sandwich(&k6, 1, &b, 0).unwrap();
        assert!(half.exact && full.exact);
        assert_eq!(half.lower_exact * rat(4, 1), full.lower_exact);
        assert!(half.lower <= half.upper);
    }

    #[test]
    fn constant_one_refined_to_seven_vertices() {
        let s = cd_sandwich(&StepGraphon::constant(1.0).unwrap(), 7, &Budget { nodes: 200_000, ..Budget::default() }, 0).unwrap();
        assert_eq!(s.n, 7);
        // cr(K_7) = 9, and every drawing has at least that many crossings
        assert!(s.lower >= 9.0 / 2401.0 - 1e-15);
        if s.exact {
            assert_eq!(s.lower_exact, rat(9, 2401));
        }
        assert!(24.0 * 9.0 / 2401.0 <= 3.0 / 8.0);
    }

    #[test]
    fn uneven_blocks_average_into_the_refinement() {
        let w = StepGraphon::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.25, 0.75]).unwrap();
        let g = refinement_graph(&w, 3).unwrap();
        // six intervals of 1/6: the second straddles 1/4
        let x = weight::to_f64(&g.weight(1, 4));
        assert!((x - 0.5).abs() < 1e-12);
        assert_eq!(g.weight(0, 5), rat(1, 1));
        assert_eq!(g.weight(3, 5), rat(0, 1));
    }

    fn binom_tail_ge(x: u64, n: u64, p: f64) -> f64 {
        let mut s = 0.0;
        for k in x..=n {
            let mut c = 1.0;
            for i in 0..k {
                c *= (n - i) as f64 / (i + 1) as f64;
            }
            s += c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
        }
        s
    }

    #[test]
    fn clopper_pearson_matches_binomial_tails() {
        for (x, n) in [(7u64, 20u64), (1, 10), (19, 25)] {
            let (lo, hi) = clopper_pearson(x, n, 0.99);
            assert!((binom_tail_ge(x, n, lo) - 0.005).abs() < 1e-9);
            assert!((1.0 - binom_tail_ge(x + 1, n, hi) - 0.005).abs() < 1e-9);
        }
        assert_eq!(clopper_pearson(0, 10, 0.99).0, 0.0);
        assert_eq!(clopper_pearson(10, 10, 0.99).1, 1.0);
        let (lo, hi) = clopper_pearson(694_444, 1_000_000, 0.99);
        let normal = 2.5758 * (0.694444f64 * 0.305556 / 1e6).sqrt();
        assert!(((hi - lo) / 2.0 - normal).abs() < 2e-5);
    }

    /// Efron: P(convex) = 1 − 4 E[area of a random triangle] / area.
    #[test]
    fn square_oracle_by_quadrature() {
        let m = 9;
        let c = |i: usize| (i as f64 + 0.5) / m as f64;
        let mut s = 0.0;
        for a in 0..m * m {
            for b in 0..m * m {
                for d in 0..m * m {
                    let (p, q, r) = ((c(a / m), c(a % m)), (c(b / m), c(b % m)), (c(d / m), c(d % m)));
                    s += crate::drawing::orient(p, q, r).abs() / 2.0;
                }
            }
        }
        let mean = s / (m as f64).powi(6);
        assert!((1.0 - 4.0 * mean - 25.0 / 36.0).abs() < 0.01);
    }

    #[test]
    fn sylvester_hits_known_values() {
        for (r, v) in [(PlanarRegion::Square, 25.0 / 36.0), (PlanarRegion::Triangle, 2.0 / 3.0), (PlanarRegion::Disk, 1.0 - 35.0 / (12.0 * PI * PI))] {
            let e = sylvester_convex_probability(&r, 200_000, 11, 4).unwrap();
            assert!((e.estimate - v).abs() <= e.radius, "{r:?} {} vs {v}", e.estimate);
            assert!(e.estimate >= 0.379972 - e.radius);
        }
    }

    #[test]
    fn sylvester_is_thread_independent_and_affine_invariant() {
        let a = sylvester_convex_probability(&PlanarRegion::Square, 50_000, 3, 1).unwrap();
        let b = sylvester_convex_probability(&PlanarRegion::Square, 50_000, 3, 5).unwrap();
        assert_eq!(a.convex, b.convex);
        let p = PlanarRegion::parse("parallelogram:2,1,0.5,1.5").unwrap();
        let c = sylvester_convex_probability(&p, 50_000, 4, 2).unwrap();
        assert!((a.estimate - c.estimate).abs() <= a.radius + c.radius);
    }

    #[test]
    fn regions_parse_and_validate() {
        assert_eq!(PlanarRegion::parse("disk").unwrap(), PlanarRegion::Disk);
        let an = PlanarRegion::parse("annulus:0.5").unwrap();
        assert!((an.area_quadrature(400) - an.area()).abs() < 0.01);
        let bx = PlanarRegion::parse("boxes:0,0,1,1;2,0,3,1").unwrap();
        assert!((bx.area() - 2.0).abs() < 1e-9);
        assert!(!bx.contains((1.5, 0.5)));
        assert!(PlanarRegion::parse("annulus:1").is_err());
        assert!(PlanarRegion::parse("boxes:0,0,0,1").is_err());
        assert!(PlanarRegion::parse("hexagon").is_err());
        let thin = PlanarRegion::Boxes { boxes: vec![[0.0, 0.0, 1e-6, 1e-6], [0.0, 0.0, 1.0, 1.0]] };
        assert!(thin.validate().is_ok());
        let sparse = PlanarRegion::Boxes { boxes: vec![[0.0, 0.0, 1e-3, 1e-3], [999.0, 999.0, 1000.0, 1000.0]] };
        assert!(matches!(sparse.validate(), Err(Error::Region(_))));
    }

    #[test]
    fn rectilinear_small_complete_graphs() {
        for (n, want) in [(4, 0.0), (5, 1.0), (6, 3.0)] {
            let r = rectilinear_density_upper(n, 100_000, 1, &PlanarRegion::Square).unwrap();
            assert_eq!(r.best, want);
            assert_eq!(straight_line_crossings(&r.points, &complete(n)).unwrap(), want);
            assert!(r.trace.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
        }
        assert!(rectilinear_density_upper(3, 10, 0, &PlanarRegion::Square).is_err());
    }
}
