//! Crossing-number estimation through a weakly regular partition, and a
//! drawing of the input obtained by blowing up the quotient drawing.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use statrs::statistics::Statistics;

use crate::cutmetric::{fk_partition_with, FkOptions, RegularityStatus};
use crate::drawing::{blow_up_drawing, CombinatorialDrawing, RefineOptions};
use crate::error::{domain, Result};
use crate::exact::{crossing_number_quotient, Budget, CrSolution};
use crate::graph::{quotient, VertexPartition, WeightedGraph};
use crate::transfer::{transfer_drawing_with, TransferOptions, TransferTrace};
use crate::weight::{self, Rat};

/// Each weight moved to the nearest multiple of `1/q`, ties toward zero.
/// Edges rounded to zero disappear.
pub fn round_weights(g: &WeightedGraph, q: u64) -> Result<WeightedGraph> {
    if q == 0 {
        return domain("rounding resolution 1/q needs q >= 1");
    }
    let qb = BigInt::from(q);
    let mut out = WeightedGraph::new(g.n());
    for (u, v, w) in g.edges() {
        let x = w * Rat::from_integer(qb.clone());
        let fl = x.floor();
        let up = &x - &fl > Rat::new(1.into(), 2.into());
        let k = if up { fl + Rat::one() } else { fl };
        out.set_weight(u, v, k / Rat::from_integer(qb.clone()))?;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorTerms {
    /// `k n³`, the cost of trimming the blow-up to `n` vertices.
    pub blow_up: f64,
    /// `M̂ defect^{1/4} n⁴`.
    pub closeness: f64,
    pub m_hat: f64,
    pub total: f64,
}

#[derive(Clone, Debug)]
pub struct EstimateReport {
    pub n: usize,
    pub estimate: f64,
    pub estimate_exact: Rat,
    pub normalized: f64,
    pub epsilon: f64,
    pub k: usize,
    pub quotient_cr: CrSolution,
    pub defect: f64,
    pub status: RegularityStatus,
    pub error_terms: ErrorTerms,
    pub exact_quotient: bool,
    pub partition: VertexPartition,
}

impl EstimateReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "estimate": self.estimate,
            "estimate_exact": weight::format(&self.estimate_exact),
            "normalized": self.normalized,
            "epsilon": self.epsilon,
            "k": self.k,
            "quotient_cr": self.quotient_cr.to_json(),
            "defect": self.defect,
            "status": self.status,
            "error_terms": self.error_terms,
            "exact_quotient": self.exact_quotient,
            "classes": self.partition.classes(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct EstimateOptions {
    pub epsilon: f64,
    pub max_classes: usize,
    /// Size of the starting equitable partition (capped by `n` and `max_classes`).
    pub min_classes: usize,
    pub budget: Budget,
    pub seed: u64,
    pub m_hat: f64,
}

impl EstimateOptions {
    pub fn new(epsilon: f64, max_classes: usize, seed: u64) -> Self {
        EstimateOptions { epsilon, max_classes, min_classes: 6, budget: Budget { seed, ..Budget::default() }, seed, m_hat: 1.0 }
    }
}

pub fn estimate_cr(g: &WeightedGraph, epsilon: f64, max_classes: usize, budget: &Budget, seed: u64) -> Result<EstimateReport> {
    let o = EstimateOptions { budget: budget.clone(), ..EstimateOptions::new(epsilon, max_classes, seed) };
    estimate_cr_with(g, &o)
}

pub fn estimate_cr_with(g: &WeightedGraph, o: &EstimateOptions) -> Result<EstimateReport> {
    if !(o.epsilon > 0.0 && o.epsilon <= 1.0) {
        return domain(format!("epsilon {} outside (0, 1]", o.epsilon));
    }
    if o.max_classes == 0 {
        return domain("at least one class required");
    }
    let n = g.n();
    if n == 0 {
        return domain("empty graph");
    }
    let fk = FkOptions { initial_classes: o.min_classes.min(n).max(1), ..FkOptions::new(o.epsilon, o.max_classes.min(n), o.seed) };
    let reg = fk_partition_with(g, &fk)?;
    let p = reg.partition.canonical();
    let q = quotient(g, &p)?;
    let sol = crossing_number_quotient(&q, &o.budget)?;
    let k = p.k();
    let scale = Rat::new(BigInt::from(n), BigInt::from(k));
    let estimate_exact = &sol.value_exact * &scale * &scale * &scale * &scale;
    let estimate = weight::to_f64(&estimate_exact);
    let nf = n as f64;
    let blow_up = k as f64 * nf.powi(3);
    let closeness = o.m_hat * reg.defect.max(0.0).powf(0.25) * nf.powi(4);
    Ok(EstimateReport {
        n,
        estimate,
        estimate_exact,
        normalized: estimate / nf.powi(4),
        epsilon: o.epsilon,
        k,
        exact_quotient: sol.exact,
        quotient_cr: sol,
        defect: reg.defect,
        status: reg.status,
        error_terms: ErrorTerms { blow_up, closeness, m_hat: o.m_hat, total: blow_up + closeness },
        partition: p,
    })
}

#[derive(Clone, Debug)]
pub struct DrawOptions {
    pub estimate: EstimateOptions,
    pub q: u64,
    pub refine_sweeps: usize,
    pub final_sweeps: usize,
    /// Deadline for each refinement phase.
    pub time_limit: Option<Duration>,
}

impl DrawOptions {
    pub fn new(epsilon: f64, q: u64, seed: u64) -> Self {
        DrawOptions { estimate: EstimateOptions::new(epsilon, 16, seed), q, refine_sweeps: 2, final_sweeps: 1, time_limit: None }
    }
}

#[derive(Clone, Debug)]
pub struct DrawReport {
    pub estimate: EstimateReport,
    pub copies: usize,
    pub leftover: usize,
    pub blown_up_weight: f64,
    pub refined_weight: f64,
    pub refine_steps: usize,
    pub transfer: TransferTrace,
    pub final_steps: usize,
    pub crossing_weight: f64,
    pub crossing_weight_exact: Rat,
    pub normalized: f64,
}

impl DrawReport {
    pub fn to_json(&self) -> Value {
        json!({
            "estimate": self.estimate.to_json(),
            "copies": self.copies,
            "leftover": self.leftover,
            "blown_up_weight": self.blown_up_weight,
            "refined_weight": self.refined_weight,
            "refine_steps": self.refine_steps,
            "transfer": self.transfer,
            "final_steps": self.final_steps,
            "crossing_weight": self.crossing_weight,
            "crossing_weight_exact": weight::format(&self.crossing_weight_exact),
            "normalized": self.normalized,
        })
    }
}

pub fn draw_cr(g: &WeightedGraph, epsilon: f64, q: u64, budget: &Budget, seed: u64) -> Result<(CombinatorialDrawing, DrawReport)> {
    let mut o = DrawOptions::new(epsilon, q, seed);
    o.estimate.budget = budget.clone();
    draw_cr_with(g, &o)
}

pub fn draw_cr_with(g: &WeightedGraph, o: &DrawOptions) -> Result<(CombinatorialDrawing, DrawReport)> {
    if o.q == 0 {
        return domain("rounding resolution 1/q needs q >= 1");
    }
    let est = estimate_cr_with(g, &o.estimate)?;
    let n = g.n();
    let p = &est.partition;
    let k = p.k();
    let m = n / k;
    let qd = &est.quotient_cr.drawing;
    let rounded = round_weights(qd.graph(), o.q)?;
    let ident: Vec<usize> = (0..k).collect();
    let small = qd.transplant(&rounded, &ident)?;
    let big = blow_up_drawing(&small, m)?;

    let classes = p.classes();
    let mut g1 = WeightedGraph::new(n);
    let mut map = vec![usize::MAX; k * m];
    for (i, c) in classes.iter().enumerate() {
        for a in 0..m {
            map[i * m + a] = c[a];
        }
    }
    for (i, j, w) in rounded.edges() {
        for a in 0..m {
            for b in 0..m {
                g1.set_weight(classes[i][a], classes[j][b], w.clone())?;
            }
        }
    }
    let mut d1 = big.transplant(&g1, &map)?;
    d1.push_log(format!("blow-up of the rounded quotient, {m} copies"));
    let blown_up_weight = d1.crossing_weight();
    let deadline = || o.time_limit.map(|t| Instant::now() + t);
    let qf = o.q as f64;
    let steps = d1.refine_mut(&RefineOptions { min_gain: 0.5 / (qf * qf), max_sweeps: o.refine_sweeps, deadline: deadline() });
    let refined_weight = d1.crossing_weight();

    let topts = TransferOptions { lonely_d: Some(0.0), ..TransferOptions::default() };
    let (mut d, trace) = transfer_drawing_with(&g1, &d1, g, p, o.estimate.seed, &topts)?;
    let fin = d.refine_mut(&RefineOptions { min_gain: 1e-9, max_sweeps: o.final_sweeps, deadline: deadline() });
    d.validate()?;
    let crossing_weight = d.crossing_weight();
    let report = DrawReport {
        copies: m,
        leftover: n - k * m,
        blown_up_weight,
        refined_weight,
        refine_steps: steps.len(),
        transfer: trace,
        final_steps: fin.len(),
        crossing_weight,
        crossing_weight_exact: d.crossing_weight_exact(),
        normalized: crossing_weight / (n as f64).powi(4),
        estimate: est,
    };
    Ok((d, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeStats {
    pub sample_size: usize,
    pub trials: usize,
    pub samples: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// `std / mean`, zero when the mean is zero.
    pub relative_std: f64,
}

pub fn estimability_probe(g: &WeightedGraph, k: usize, trials: usize, seed: u64) -> Result<ProbeStats> {
    estimability_probe_with(g, k, trials, seed, &EstimateOptions::new(0.25, 16, seed), 1)
}

/// Samples are drawn sequentially from one seeded stream; estimates run on up to `threads` workers.
pub fn estimability_probe_with(g: &WeightedGraph, k: usize, trials: usize, seed: u64, o: &EstimateOptions, threads: usize) -> Result<ProbeStats> {
    let n = g.n();
    if k == 0 || k > n {
        return domain(format!("sample size {k} outside 1..={n}"));
    }
    let trials = if k == n { trials.min(1) } else { trials };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets: Vec<Vec<usize>> = (0..trials)
        .map(|_| {
            let mut s = rand::seq::index::sample(&mut rng, n, k).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    let threads = threads.max(1).min(sets.len().max(1));
    let mut samples = vec![0.0; sets.len()];
    let chunk = sets.len().div_ceil(threads).max(1);
    std::thread::scope(|sc| -> Result<()> {
        let handles: Vec<_> = sets
            .chunks(chunk)
            .zip(samples.chunks_mut(chunk))
            .map(|(ss, out)| {
                sc.spawn(move || -> Result<()> {
                    for (s, slot) in ss.iter().zip(out.iter_mut()) {
                        *slot = estimate_cr_with(&g.induced(s)?, o)?.normalized;
                    }
                    Ok(())
                })
            })
            .collect();
        for h in handles {
            h.join().expect("probe worker panicked")?;
        }
        Ok(())
    })?;
    let (mean, std) = match samples.len() {
        0 => (0.0, 0.0),
        1 => (samples[0], 0.0),
        _ => (samples.iter().mean(), samples.iter().std_dev()),
    };
    let relative_std = if mean.abs() > 0.0 { std / mean } else { 0.0 };
    Ok(ProbeStats { sample_size: k, trials: samples.len(), samples, mean, std, relative_std })
}
