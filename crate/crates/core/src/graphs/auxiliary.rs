use std::cmp::Ordering;

use rustc_hash::FxHashSet;

use super::SparseGraph;
use crate::budget::{ensure, Budgets};
use crate::construction::{build_index_family, enumerate_t_prime, for_each_tuple, ordered_tuple_count};
use crate::error::{invalid, Result};
use crate::gf2::GeneratorSet;

/// For each coordinate position, vertices grouped by agreement in every other coordinate.
#[derive(Clone, Debug)]
pub struct CoordinateClasses {
    pub width: usize,
    /// `groups[l]` partitions the vertex indices.
    pub groups: Vec<Vec<Vec<u32>>>,
}

impl CoordinateClasses {
    /// Size of the class of vertex `v` at position `l`, `v` included.
    pub fn class_sizes(&self, n: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0u32; self.width]; n];
        for (l, groups) in self.groups.iter().enumerate() {
            for g in groups {
                for &v in g {
                    out[v as usize][l] = g.len() as u32;
                }
            }
        }
        out
    }
}

fn cmp_skipping(a: &[u64], b: &[u64], skip: usize) -> Ordering {
    for i in 0..a.len() {
        if i != skip {
            match a[i].cmp(&b[i]) {
                Ordering::Equal => {}
                other => return other,
            }
        }
    }
    Ordering::Equal
}

/// Groups the rows of `tuples` (stride `width`) by their values off each position.
pub fn coordinate_classes(tuples: &[u64], width: usize) -> CoordinateClasses {
    let n = tuples.len() / width;
    let row = |i: u32| &tuples[i as usize * width..(i as usize + 1) * width];
    let groups = (0..width)
        .map(|l| {
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_by(|&a, &b| cmp_skipping(row(a), row(b), l).then(a.cmp(&b)));
            let mut out: Vec<Vec<u32>> = Vec::new();
            for v in order {
                match out.last_mut() {
                    Some(g) if cmp_skipping(row(g[0]), row(v), l) == Ordering::Equal => g.push(v),
                    _ => out.push(vec![v]),
                }
            }
            out
        })
        .collect();
    CoordinateClasses { width, groups }
}

/// Vertices are rows of `tuples`; two are adjacent when they differ in exactly one coordinate.
pub fn graph_from_tuples(labels: Vec<Vec<u64>>, tuples: &[u64], width: usize) -> SparseGraph {
    let classes = coordinate_classes(tuples, width);
    let mut edges = Vec::new();
    for (l, groups) in classes.groups.iter().enumerate() {
        for g in groups {
            for (i, &a) in g.iter().enumerate() {
                for &b in &g[i + 1..] {
                    let (ra, rb) = (a as usize * width + l, b as usize * width + l);
                    if tuples[ra] != tuples[rb] {
                        edges.push((a as usize, b as usize, 1));
                    }
                }
            }
        }
    }
    SparseGraph::from_edges(labels, edges)
}

/// `k = 0`: the graph on `F_2^t x T`, labels `[x, s...]`.
/// `k > 0`: the graph on distinct `(r-k)`-prefixes of ordered edges, labels the prefixes.
pub fn auxiliary_graph(set: &GeneratorSet, r: u32, k: u32, budgets: &Budgets) -> Result<SparseGraph> {
    let (labels, tuples, width) = auxiliary_vertices(set, r, k, budgets)?;
    Ok(graph_from_tuples(labels, &tuples, width))
}

pub(crate) fn auxiliary_vertices(
    set: &GeneratorSet,
    r: u32,
    k: u32,
    budgets: &Budgets,
) -> Result<(Vec<Vec<u64>>, Vec<u64>, usize)> {
    let family = build_index_family(r)?;
    if k + 2 > r && k != 0 {
        return Err(invalid(format!("prefix order r - k = {} below 2", r as i64 - k as i64)));
    }
    let total = ordered_tuple_count(set.t, set.len(), &family);
    ensure("ordered tuples (x, s)", total, budgets.max_tuples)?;
    let width = (r - k) as usize;
    let mut labels = Vec::new();
    let mut tuples = Vec::new();
    if k == 0 {
        ensure("auxiliary graph vertices", total, budgets.max_vertices)?;
        for x in 0..1u64 << set.t {
            for_each_tuple(set.words(), family.len(), |s| {
                let mut label = vec![x];
                label.extend_from_slice(s);
                labels.push(label);
                tuples.extend(family.edge(x, s));
            });
        }
    } else {
        let mut seen: FxHashSet<Vec<u64>> = FxHashSet::default();
        let mut prefixes = Vec::new();
        for x in 0..1u64 << set.t {
            for_each_tuple(set.words(), family.len(), |s| {
                let mut e = family.edge(x, s);
                e.truncate(width);
                if seen.insert(e.clone()) {
                    prefixes.push(e);
                }
            });
        }
        ensure("prefix graph vertices", prefixes.len() as u128, budgets.max_vertices)?;
        prefixes.sort_unstable();
        tuples = prefixes.concat();
        labels = prefixes;
    }
    Ok((labels, tuples, width))
}

/// `G_{r-k, t, 2^k S'}[U]` with `U = F_2^t x T'`; labels `[y, t'...]`.
pub fn lower_graph(set: &GeneratorSet, r: u32, k: u32, budgets: &Budgets) -> Result<SparseGraph> {
    let (labels, tuples, width) = lower_vertices(set, r, k, budgets)?;
    Ok(graph_from_tuples(labels, &tuples, width))
}

pub(crate) fn lower_vertices(
    set: &GeneratorSet,
    r: u32,
    k: u32,
    budgets: &Budgets,
) -> Result<(Vec<Vec<u64>>, Vec<u64>, usize)> {
    let tp = enumerate_t_prime(set.words(), r, k, budgets)?;
    let n = (tp.len() as u128) << set.t;
    ensure("lower graph vertices", n, budgets.max_vertices)?;
    let width = tp.lower.r as usize;
    let mut labels = Vec::with_capacity(n as usize);
    let mut tuples = Vec::with_capacity(n as usize * width);
    for y in 0..1u64 << set.t {
        for t in tp.tuples() {
            let mut label = vec![y];
            label.extend_from_slice(t);
            labels.push(label);
            tuples.extend(tp.lower.edge(y, t));
        }
    }
    Ok((labels, tuples, width))
}
