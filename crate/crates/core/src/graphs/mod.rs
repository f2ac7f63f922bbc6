//! Multigraphs with opaque vertex labels, plus the graph families built from hypergraphs.

mod auxiliary;
mod cayley;
mod matrix;
mod walk;

pub(crate) use auxiliary::{auxiliary_vertices, lower_vertices};
pub use auxiliary::{auxiliary_graph, coordinate_classes, graph_from_tuples, lower_graph, CoordinateClasses};
pub use cayley::cayley_graph;
pub use matrix::IntMatrix;
pub use walk::{dual_edge_graph, incidence_matrix, walk_graph, FaceIndex, Incidence};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Symmetric multigraph; `adj[u]` holds `(v, multiplicity)` sorted by `v`.
///
/// A loop at `u` contributes its multiplicity once to `A[u][u]` and to the degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseGraph {
    pub labels: Vec<Vec<u64>>,
    adj: Vec<Vec<(u32, u64)>>,
}

impl SparseGraph {
    /// Accumulates `(u, v, m)` into both `A[u][v]` and `A[v][u]` (once for `u == v`).
    pub fn from_edges(labels: Vec<Vec<u64>>, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Self {
        let n = labels.len();
        let mut rows: Vec<BTreeMap<u32, u64>> = vec![BTreeMap::new(); n];
        for (u, v, m) in edges {
            *rows[u].entry(v as u32).or_insert(0) += m;
            if u != v {
                *rows[v].entry(u as u32).or_insert(0) += m;
            }
        }
        SparseGraph {
            labels,
            adj: rows.into_iter().map(|r| r.into_iter().collect()).collect(),
        }
    }

    /// Adjacency rows given directly; the caller guarantees symmetry.
    pub(crate) fn from_rows(labels: Vec<Vec<u64>>, adj: Vec<Vec<(u32, u64)>>) -> Self {
        SparseGraph { labels, adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, u: usize) -> &[(u32, u64)] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> u64 {
        self.adj[u].iter().map(|&(_, m)| m).sum()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        self.adj[u]
            .binary_search_by_key(&(v as u32), |&(w, _)| w)
            .map_or(0, |i| self.adj[u][i].1)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n()).all(|u| {
            self.adj[u]
                .iter()
                .all(|&(v, m)| self.multiplicity(v as usize, u) == m)
        })
    }

    pub fn regular_degree(&self) -> Result<u64> {
        let d = if self.n() == 0 { 0 } else { self.degree(0) };
        for u in 0..self.n() {
            let du = self.degree(u);
            if du != d {
                return Err(Error::NonRegular {
                    vertex: u,
                    degree: du,
                    expected: d,
                });
            }
        }
        Ok(d)
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.adj
            .iter()
            .flat_map(|row| row.iter().map(|&(_, m)| m))
            .max()
            .unwrap_or(0)
    }

    /// `y = A x`; each row is summed sequentially so the result is thread-count independent.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.adj
            .par_iter()
            .map(|row| row.iter().map(|&(v, m)| m as f64 * x[v as usize]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for (u, row) in self.adj.iter().enumerate() {
            for &(v, mult) in row {
                m[(u, v as usize)] = mult as f64;
            }
        }
        m
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(
            self.adj
                .iter()
                .map(|row| row.iter().map(|&(v, m)| (v, m as i64)).collect())
                .collect(),
        )
    }

    /// Component id of every vertex, numbered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    if comp[v as usize] == usize::MAX {
                        comp[v as usize] = next;
                        stack.push(v as usize);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Graph file: `# G n= d=` then `u v m` for every `u < v`; loops are written as `u u m`.
    pub fn to_graph_file(&self) -> String {
        let d = self.regular_degree().map_or("irregular".to_string(), |d| d.to_string());
        let mut out = format!("# G n={} d={}\n", self.n(), d);
        for (u, row) in self.adj.iter().enumerate() {
            for &(v, m) in row {
                if u <= v as usize {
                    let _ = writeln!(out, "{u} {v} {m}");
                }
            }
        }
        out
    }

    /// Companion label file: line `i` holds the hex words of vertex `i`.
    pub fn to_label_file(&self, t: u32) -> String {
        let mut out = String::new();
        for label in &self.labels {
            let words: Vec<String> = label.iter().map(|&w| crate::gf2::to_hex(w, t)).collect();
            let _ = writeln!(out, "{}", words.join(" "));
        }
        out
    }
}
