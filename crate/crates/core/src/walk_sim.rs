//! Lazy random walks on regular graphs: exact distribution propagation or many sampled
//! trajectories, with total-variation distance to uniform at every step.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{ensure, Budgets};
use crate::error::{invalid, Error, Result};
use crate::graphs::SparseGraph;
use crate::rng::SplitMix64;

const DRIFT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MixMode {
    Exact,
    Sampled,
}

impl std::str::FromStr for MixMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MixMode::Exact),
            "sampled" => Ok(MixMode::Sampled),
            other => Err(invalid(format!("unknown mode {other}; expected exact or sampled"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MixPoint {
    pub step: usize,
    pub tv: f64,
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingCurve {
    pub mode: MixMode,
    pub lazy: f64,
    pub start: usize,
    pub start_label: Vec<u64>,
    pub n: usize,
    pub trajectories: Option<u64>,
    /// `(1 + λ/d) / 2` when a spectral report was supplied.
    pub lambda_hat: Option<f64>,
    pub points: Vec<MixPoint>,
    /// Largest `|Σ p - 1|` seen in exact mode.
    pub max_drift: f64,
}

impl MixingCurve {
    pub fn bound_holds(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.bound.is_none_or(|b| p.tv <= b + 1e-12))
    }

    pub fn monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].tv <= w[0].tv + 1e-12)
    }

    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.points.iter().find(|p| p.tv < threshold).map(|p| p.step)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,tv,bound\n");
        for p in &self.points {
            let bound = p.bound.map_or(String::new(), |b| format!("{b:.12e}"));
            let _ = writeln!(out, "{},{:.12e},{bound}", p.step, p.tv);
        }
        out
    }
}

pub struct MixOptions {
    pub steps: usize,
    pub mode: MixMode,
    pub lazy: f64,
    pub start: usize,
    pub trajectories: u64,
    pub seed: u64,
    /// `λ / d` of the graph, used for the bound column.
    pub lambda_ratio: Option<f64>,
}

impl Default for MixOptions {
    fn default() -> Self {
        MixOptions {
            steps: 50,
            mode: MixMode::Exact,
            lazy: 0.5,
            start: 0,
            trajectories: 100_000,
            seed: 0,
            lambda_ratio: None,
        }
    }
}

fn tv_to_uniform(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * p.iter().map(|x| (x - u).abs()).sum::<f64>()
}

pub fn mixing_curve(g: &SparseGraph, opts: &MixOptions, budgets: &Budgets) -> Result<MixingCurve> {
    let n = g.n();
    if n == 0 || opts.start >= n {
        return Err(invalid(format!("start vertex {} outside 0..{n}", opts.start)));
    }
    if !(0.0..=1.0).contains(&opts.lazy) {
        return Err(invalid(format!("lazy = {} outside [0, 1]", opts.lazy)));
    }
    let d = g.regular_degree()?;
    if d == 0 {
        return Err(invalid("walk on a graph without edges"));
    }
    let lambda_hat = opts.lambda_ratio.map(|l| opts.lazy + (1.0 - opts.lazy) * l);
    let bound = |m: usize| lambda_hat.map(|h| (n as f64).sqrt() * h.powi(m as i32));
    let mut curve = MixingCurve {
        mode: opts.mode,
        lazy: opts.lazy,
        start: opts.start,
        start_label: g.labels[opts.start].clone(),
        n,
        trajectories: None,
        lambda_hat,
        points: Vec::with_capacity(opts.steps + 1),
        max_drift: 0.0,
    };
    match opts.mode {
        MixMode::Exact => {
            ensure("exact walk vertices", n as u128, budgets.max_vertices)?;
            let mut p = vec![0.0; n];
            p[opts.start] = 1.0;
            let move_w = (1.0 - opts.lazy) / d as f64;
            for step in 0..=opts.steps {
                if step > 0 {
                    let ap = g.matvec(&p);
                    p = ap
                        .iter()
                        .zip(&p)
                        .map(|(a, x)| move_w * a + opts.lazy * x)
                        .collect();
                }
                let drift = (p.iter().sum::<f64>() - 1.0).abs();
                curve.max_drift = curve.max_drift.max(drift);
                if drift > DRIFT_TOL {
                    return Err(invalid(format!("probability mass drifted by {drift:e} at step {step}")));
                }
                curve.points.push(MixPoint {
                    step,
                    tv: tv_to_uniform(&p),
                    bound: bound(step),
                });
            }
        }
        MixMode::Sampled => {
            let walkers = opts.trajectories.max(1);
            ensure("sampled trajectories", walkers as u128, budgets.max_tuples.max(1 << 20))?;
            curve.trajectories = Some(walkers);
            let mut rngs: Vec<SplitMix64> = (0..walkers).map(|i| SplitMix64::stream(opts.seed, i)).collect();
            let mut pos = vec![opts.start as u32; walkers as usize];
            let mut hist = vec![0u64; n];
            for step in 0..=opts.steps {
                if step > 0 {
                    pos.par_iter_mut().zip(rngs.par_iter_mut()).for_each(|(v, rng)| {
                        if opts.lazy > 0.0 && rng.unit_f64() < opts.lazy {
                            return;
                        }
                        let mut pick = rng.below(d);
                        for &(w, m) in g.neighbors(*v as usize) {
                            if pick < m {
                                *v = w;
                                return;
                            }
                            pick -= m;
                        }
                    });
                }
                hist.fill(0);
                for &v in &pos {
                    hist[v as usize] += 1;
                }
                let u = 1.0 / n as f64;
                let tv = 0.5
                    * hist
                        .iter()
                        .map(|&c| (c as f64 / walkers as f64 - u).abs())
                        .sum::<f64>();
                curve.points.push(MixPoint {
                    step,
                    tv,
                    bound: bound(step),
                });
            }
        }
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> SparseGraph {
        let labels = (0..n as u64).map(|i| vec![i]).collect();
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1)));
        SparseGraph::from_edges(labels, edges.collect::<Vec<_>>())
    }

    fn cycle(n: usize) -> SparseGraph {
        let labels = (0..n as u64).map(|i| vec![i]).collect();
        SparseGraph::from_edges(labels, (0..n).map(|i| (i, (i + 1) % n, 1)))
    }

    #[test]
    fn step_zero_and_complete_graph() {
        let g = complete(10);
        let opts = MixOptions {
            steps: 1,
            lazy: 0.0,
            ..MixOptions::default()
        };
        let c = mixing_curve(&g, &opts, &Budgets::default()).unwrap();
        assert!((c.points[0].tv - 0.9).abs() < 1e-15);
        // one step spreads the mass evenly over the other n - 1 vertices
        assert!((c.points[1].tv - 0.1).abs() < 1e-15);
    }

    #[test]
    fn lazy_walk_is_monotone_and_bounded() {
        let g = cycle(15);
        // nontrivial eigenvalues of the cycle are 2 cos(2 pi j / n)
        let lambda = (2.0 * std::f64::consts::PI / 15.0).cos();
        let opts = MixOptions {
            steps: 200,
            lambda_ratio: Some(lambda),
            ..MixOptions::default()
        };
        let c = mixing_curve(&g, &opts, &Budgets::default()).unwrap();
        assert!(c.monotone());
        assert!(c.bound_holds());
        assert!(c.max_drift <= 1e-12);
        assert!(c.first_below(0.01).is_some());
    }

    #[test]
    fn sampled_tracks_exact() {
        let g = cycle(12);
        let exact = mixing_curve(
            &g,
            &MixOptions {
                steps: 30,
                ..MixOptions::default()
            },
            &Budgets::default(),
        )
        .unwrap();
        let sampled = mixing_curve(
            &g,
            &MixOptions {
                steps: 30,
                mode: MixMode::Sampled,
                trajectories: 200_000,
                seed: 3,
                ..MixOptions::default()
            },
            &Budgets::default(),
        )
        .unwrap();
        for (a, b) in exact.points.iter().zip(&sampled.points) {
            assert!((a.tv - b.tv).abs() < 0.01, "step {}: {} vs {}", a.step, a.tv, b.tv);
        }
    }

    #[test]
    fn sampled_is_thread_independent() {
        let g = cycle(9);
        let opts = MixOptions {
            steps: 10,
            mode: MixMode::Sampled,
            trajectories: 5000,
            seed: 11,
            ..MixOptions::default()
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mixing_curve(&g, &opts, &Budgets::default()).unwrap());
        let b = four.install(|| mixing_curve(&g, &opts, &Budgets::default()).unwrap());
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn rejects_bad_input() {
        let g = cycle(5);
        let bad = MixOptions {
            lazy: 1.5,
            ..MixOptions::default()
        };
        assert!(mixing_curve(&g, &bad, &Budgets::default()).is_err());
        let bad = MixOptions {
            start: 9,
            ..MixOptions::default()
        };
        assert!(mixing_curve(&g, &bad, &Budgets::default()).is_err());
        assert!("fast".parse::<MixMode>().is_err());
    }
}
