//! Spectral gaps: exact Walsh spectra for Cayley graphs, and a registry of graph eigensolvers.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::budget::Budgets;
use crate::construction::Hypergraph;
use crate::error::{invalid, Error, Result};
use crate::gf2::{cayley_spectrum_exact, GeneratorMultiset, GeneratorSet};
use crate::graphs::{dual_edge_graph, incidence_matrix, walk_graph, IntMatrix, SparseGraph};
use crate::rng::SplitMix64;

pub const ITERATIVE_TOLERANCE: f64 = 1e-6;
pub const ITERATIVE_RESTARTS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub degree: u64,
    /// Largest absolute value of a nontrivial eigenvalue.
    pub lambda: f64,
    pub epsilon: f64,
    pub method: String,
    pub tolerance: f64,
    pub iterations: usize,
}

impl SpectralReport {
    fn new(n: usize, degree: u64, lambda: f64, method: &str, tolerance: f64, iterations: usize) -> Self {
        let epsilon = if degree == 0 { 0.0 } else { 1.0 - lambda / degree as f64 };
        SpectralReport {
            n,
            degree,
            lambda,
            epsilon,
            method: method.to_string(),
            tolerance,
            iterations,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
    pub dense_cap: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: ITERATIVE_TOLERANCE,
            restarts: ITERATIVE_RESTARTS,
            seed: 0x5eed,
            dense_cap: Budgets::default().dense_cap,
        }
    }
}

pub trait EigenSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn report(&self, g: &SparseGraph, opts: &SolverOptions) -> Result<SpectralReport>;
}

pub struct Dense;
pub struct PowerIteration;

impl EigenSolver for Dense {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn report(&self, g: &SparseGraph, opts: &SolverOptions) -> Result<SpectralReport> {
        if g.n() > opts.dense_cap {
            return Err(Error::ResourceLimit {
                what: "dense eigensolver vertices".into(),
                needed: g.n() as u128,
                budget: opts.dense_cap as u128,
            });
        }
        let d = g.regular_degree()?;
        let eigs = dense_spectrum(g);
        let lambda = nontrivial(&eigs, d as f64)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(SpectralReport::new(g.n(), d, lambda, self.name(), 0.0, 0))
    }
}

impl EigenSolver for PowerIteration {
    fn name(&self) -> &'static str {
        "iterative"
    }

    /// Power iteration on `A - (d/n) J`, estimating `|lambda|` as `||M v||` for unit `v`.
    fn report(&self, g: &SparseGraph, opts: &SolverOptions) -> Result<SpectralReport> {
        let d = g.regular_degree()?;
        let n = g.n();
        if n <= 1 {
            return Ok(SpectralReport::new(n, d, 0.0, self.name(), opts.tolerance, 0));
        }
        let shift = d as f64 / n as f64;
        let apply = |v: &[f64]| -> Vec<f64> {
            let total: f64 = v.iter().sum();
            g.matvec(v).into_iter().map(|x| x - shift * total).collect()
        };
        let max_iter = 10 * n;
        let mut best: Option<f64> = None;
        let mut converged = false;
        let mut iterations = 0;
        for restart in 0..opts.restarts.max(1) {
            let mut rng = SplitMix64::stream(opts.seed, restart as u64);
            let mut v: Vec<f64> = (0..n).map(|_| 2.0 * rng.unit_f64() - 1.0).collect();
            normalise(&mut v);
            let mut prev = 0.0;
            for it in 0..max_iter {
                let mut w = apply(&v);
                let est = norm(&w);
                iterations += 1;
                if est == 0.0 {
                    converged = true;
                    best = Some(best.map_or(0.0, |b: f64| b.max(0.0)));
                    break;
                }
                w.iter_mut().for_each(|x| *x /= est);
                v = w;
                if it > 0 && (est - prev).abs() <= opts.tolerance * est {
                    converged = true;
                    best = Some(best.map_or(est, |b| b.max(est)));
                    break;
                }
                prev = est;
                if it + 1 == max_iter {
                    best = Some(best.map_or(est, |b| b.max(est)));
                }
            }
        }
        let lambda = best.unwrap_or(0.0);
        if !converged {
            return Err(Error::NoConvergence {
                estimate: lambda,
                iterations,
            });
        }
        Ok(SpectralReport::new(n, d, lambda, self.name(), opts.tolerance, iterations))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalise(v: &mut [f64]) {
    let s = norm(v);
    v.iter_mut().for_each(|x| *x /= s);
}

/// Solvers by name.
pub fn solvers() -> BTreeMap<&'static str, Box<dyn EigenSolver>> {
    let mut map: BTreeMap<&'static str, Box<dyn EigenSolver>> = BTreeMap::new();
    for s in [Box::new(Dense) as Box<dyn EigenSolver>, Box::new(PowerIteration)] {
        map.insert(s.name(), s);
    }
    map
}

/// `auto` picks `dense` up to the dense cap and `iterative` above it.
pub fn lambda_max_nontrivial(g: &SparseGraph, mode: &str, budgets: &Budgets) -> Result<SpectralReport> {
    let name = match mode {
        "auto" if g.n() <= budgets.dense_cap => "dense",
        "auto" => "iterative",
        other => other,
    };
    let mut registry = solvers();
    let solver = registry
        .remove(name)
        .ok_or_else(|| invalid(format!("unknown spectral mode {mode:?}")))?;
    let opts = SolverOptions {
        dense_cap: budgets.dense_cap,
        ..SolverOptions::default()
    };
    solver.report(g, &opts)
}

/// All eigenvalues of the adjacency matrix, ascending.
pub fn dense_spectrum(g: &SparseGraph) -> Vec<f64> {
    let mut eigs: Vec<f64> = g.to_dense().symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Removes one copy of the eigenvalue closest to `d`.
pub fn nontrivial(eigs: &[f64], d: f64) -> Vec<f64> {
    let mut out = eigs.to_vec();
    if let Some((i, _)) = out
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - d).abs().total_cmp(&(b.1 - d).abs()))
    {
        out.remove(i);
    }
    out
}

pub fn cayley_report(multiset: &GeneratorMultiset, budgets: &Budgets) -> Result<SpectralReport> {
    let spec = cayley_spectrum_exact(multiset, budgets)?;
    let d = multiset.degree();
    let lambda = spec[1..].iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    Ok(SpectralReport::new(spec.len(), d, lambda as f64, "exact-walsh", 0.0, 0))
}

/// Computes `epsilon` of `Cay(F_2^t, S)` exactly and stores it in the certificate.
pub fn certify_epsilon(set: &mut GeneratorSet, budgets: &Budgets) -> Result<SpectralReport> {
    let report = cayley_report(&set.multiset(), budgets)?;
    set.cert.epsilon = Some(report.epsilon);
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualCheck {
    pub k: usize,
    pub walk_vertices: usize,
    pub dual_vertices: usize,
    /// Number of `(k+1)`-faces on every `k`-face.
    pub face_degree: u64,
    pub dual_identity: bool,
    pub walk_identity: bool,
    pub spectra: Option<DualSpectra>,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualSpectra {
    pub nonzero_count: usize,
    pub max_nonzero_gap: f64,
    pub interval_low: f64,
    pub interval_high: f64,
    pub walk_min: f64,
    pub walk_max_nontrivial: f64,
    pub interval_holds: bool,
}

impl DualCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.dual_identity
            && self.walk_identity
            && self
                .spectra
                .as_ref()
                .is_none_or(|s| s.max_nonzero_gap <= tol && s.interval_holds)
    }
}

const ZERO: f64 = 1e-6;

/// Checks `A_{G'} + (k+1) I = B^T B` and `A_walk + D_k I = B B^T` exactly, then compares
/// the nonzero spectra of both products and the resulting eigenvalue interval.
pub fn dual_spectra_check(h: &Hypergraph, k: usize, budgets: &Budgets, tol: f64) -> Result<DualCheck> {
    let inc = incidence_matrix(h, k)?;
    let walk = walk_graph(h, k)?;
    let dual = dual_edge_graph(h, k)?;
    let row_cols = inc.row_cols();
    let face_degree = row_cols.first().map_or(0, |c| c.len() as u64);
    if let Some((i, c)) = row_cols
        .iter()
        .enumerate()
        .find(|(_, c)| c.len() as u64 != face_degree)
    {
        return Err(Error::NonRegular {
            vertex: i,
            degree: c.len() as u64,
            expected: face_degree,
        });
    }
    let shifted = |g: &SparseGraph, c: i64| g.to_int_matrix().add(&IntMatrix::identity(g.n()).scale(c));
    let dual_identity = shifted(&dual, k as i64 + 1) == inc.bt_b();
    let walk_identity = shifted(&walk, face_degree as i64) == inc.b_bt();
    let mut check = DualCheck {
        k,
        walk_vertices: walk.n(),
        dual_vertices: dual.n(),
        face_degree,
        dual_identity,
        walk_identity,
        spectra: None,
        skipped: None,
    };
    if walk.n().max(dual.n()) > budgets.dense_cap {
        check.skipped = Some(format!(
            "spectral comparison needs {} vertices, dense cap is {}",
            walk.n().max(dual.n()),
            budgets.dense_cap
        ));
        return Ok(check);
    }
    let dface = face_degree as f64;
    let walk_eigs = dense_spectrum(&walk);
    let dual_eigs = dense_spectrum(&dual);
    let nonzero = |eigs: &[f64], shift: f64| -> Vec<f64> {
        eigs.iter().map(|e| e + shift).filter(|v| v.abs() > ZERO).collect()
    };
    let a = nonzero(&walk_eigs, dface);
    let b = nonzero(&dual_eigs, k as f64 + 1.0);
    let max_nonzero_gap = if a.len() == b.len() {
        a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let walk_nt = nontrivial(&walk_eigs, k as f64 * dface);
    let dual_nt = nontrivial(&dual_eigs, (k as f64 + 1.0) * (dface - 1.0));
    let dual_max = dual_nt.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let interval_low = -dface;
    let interval_high = dual_max + k as f64 + 1.0 - dface;
    let walk_min = walk_nt.iter().copied().fold(f64::INFINITY, f64::min);
    let walk_max_nontrivial = walk_nt.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    check.spectra = Some(DualSpectra {
        nonzero_count: a.len(),
        max_nonzero_gap,
        interval_low,
        interval_high,
        walk_min,
        walk_max_nontrivial,
        interval_holds: walk_min >= interval_low - tol && walk_max_nontrivial <= interval_high + tol,
    });
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_hypergraph;
    use crate::gf2::sample_generators;
    use crate::graphs::cayley_graph;

    fn graph(n: usize, edges: &[(usize, usize)]) -> SparseGraph {
        SparseGraph::from_edges((0..n as u64).map(|i| vec![i]).collect(), edges.iter().map(|&(a, b)| (a, b, 1)))
    }

    #[test]
    fn complete_graph_k4() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let r = lambda_max_nontrivial(&g, "dense", &Budgets::default()).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-12);
        assert!((r.epsilon - 2.0 / 3.0).abs() < 1e-12);
        let it = lambda_max_nontrivial(&g, "iterative", &Budgets::default()).unwrap();
        assert!((it.lambda - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_triangles_have_no_gap() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let r = lambda_max_nontrivial(&g, "auto", &Budgets::default()).unwrap();
        assert_eq!(r.method, "dense");
        assert!((r.lambda - 2.0).abs() < 1e-12);
        assert!(r.epsilon.abs() < 1e-12);
    }

    #[test]
    fn hypercube_is_bipartite() {
        // the -t eigenvalue is nontrivial, so the absolute gap closes
        for t in 2..=6u32 {
            let ms = GeneratorMultiset::from_words(t, (0..t).map(|i| 1u64 << i));
            let r = cayley_report(&ms, &Budgets::default()).unwrap();
            assert_eq!(r.lambda, t as f64);
            assert_eq!(r.epsilon, 0.0);
            let spec = cayley_spectrum_exact(&ms, &Budgets::default()).unwrap();
            let second = spec[1..].iter().copied().max().unwrap();
            assert_eq!(second, t as i64 - 2);
        }
    }

    #[test]
    fn all_nonzero_generators() {
        let t = 5;
        let ms = GeneratorMultiset::from_words(t, 1..1u64 << t);
        let r = cayley_report(&ms, &Budgets::default()).unwrap();
        assert_eq!(r.lambda, 1.0);
        assert!((r.epsilon - (1.0 - 1.0 / 31.0)).abs() < 1e-15);
    }

    #[test]
    fn walsh_agrees_with_dense() {
        let b = Budgets::default();
        for seed in 0..4 {
            let set = sample_generators(8, 7, 3, seed, &b).unwrap();
            let ms = set.multiset();
            let mut walsh: Vec<f64> = cayley_spectrum_exact(&ms, &b).unwrap().iter().map(|&v| v as f64).collect();
            walsh.sort_by(f64::total_cmp);
            let dense = dense_spectrum(&cayley_graph(&ms, &b).unwrap());
            for (a, d) in walsh.iter().zip(&dense) {
                assert!((a - d).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn registry_names() {
        let names: Vec<&str> = solvers().keys().copied().collect();
        assert_eq!(names, vec!["dense", "iterative"]);
        let g = graph(2, &[(0, 1)]);
        assert!(lambda_max_nontrivial(&g, "nope", &Budgets::default()).is_err());
    }

    #[test]
    fn dual_check_small() {
        let b = Budgets::default();
        let set = sample_generators(5, 5, 3, 2, &b).unwrap();
        let h = build_hypergraph(&set, 3, &b).unwrap();
        for k in 1..=2 {
            let c = dual_spectra_check(&h, k, &b, 1e-7).unwrap();
            assert!(c.passed(1e-7), "{c:?}");
        }
    }
}
