use std::fmt::Write as _;
use std::ops::Range;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{all_tuples, build_index_family, ordered_tuple_count, IndexFamily};
use crate::budget::{ensure, factorial, Budgets};
use crate::error::{invalid, Error, Result};
use crate::gf2::{to_hex, GeneratorSet};

pub const MAX_R: usize = 8;

type Key = [u64; MAX_R];

/// An `r`-uniform hypergraph on `F_2^t`; edges are sorted, stored flat and in sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    pub r: u32,
    pub t: u32,
    flat: Vec<u64>,
}

impl Hypergraph {
    pub fn from_edges(r: u32, t: u32, edges: impl IntoIterator<Item = Vec<u64>>) -> Result<Self> {
        let mut all: Vec<Vec<u64>> = Vec::new();
        for mut e in edges {
            if e.len() != r as usize {
                return Err(invalid(format!("edge of size {} in {r}-uniform hypergraph", e.len())));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid("edge with a repeated vertex"));
            }
            all.push(e);
        }
        all.sort();
        all.dedup();
        Ok(Hypergraph {
            r,
            t,
            flat: all.concat(),
        })
    }

    pub fn edge_count(&self) -> usize {
        self.flat.len() / self.r as usize
    }

    pub fn edge(&self, i: usize) -> &[u64] {
        let r = self.r as usize;
        &self.flat[i * r..(i + 1) * r]
    }

    pub fn edges(&self) -> std::slice::ChunksExact<'_, u64> {
        self.flat.chunks_exact(self.r as usize)
    }

    /// All `k`-subsets of edges, sorted and deduplicated, flat with stride `k`.
    pub fn faces(&self, k: usize) -> Vec<u64> {
        assert!(k >= 1 && k <= self.r as usize);
        if k == self.r as usize {
            return self.flat.clone();
        }
        let mut subsets: Vec<Vec<u64>> = Vec::new();
        let mut idx: Vec<usize> = (0..k).collect();
        for e in self.edges() {
            idx.iter_mut().enumerate().for_each(|(i, v)| *v = i);
            loop {
                subsets.push(idx.iter().map(|&i| e[i]).collect());
                if !crate::gf2::next_combination(&mut idx, e.len()) {
                    break;
                }
            }
        }
        subsets.sort_unstable();
        subsets.dedup();
        subsets.concat()
    }

    /// Edge-list format: a header line, then one edge per line as ascending hex vertices.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# H r={} t={} m={}\n", self.r, self.t, self.edge_count());
        for e in self.edges() {
            let line: Vec<String> = e.iter().map(|&v| to_hex(v, self.t)).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|h| h.strip_prefix("# H "))
            .ok_or_else(|| Error::Parse("missing '# H' header".into()))?;
        let mut fields = std::collections::HashMap::new();
        for f in header.split_whitespace() {
            let (k, v) = f
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {f:?}")))?;
            let v: u64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad header value {f:?}")))?;
            fields.insert(k.to_string(), v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("header lacks {k}")))
        };
        let (r, t, m) = (get("r")? as u32, get("t")? as u32, get("m")? as usize);
        let edges = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|w| {
                        u64::from_str_radix(w, 16)
                            .map_err(|_| Error::Parse(format!("bad vertex {w:?}")))
                    })
                    .collect::<Result<Vec<u64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let h = Hypergraph::from_edges(r, t, edges)?;
        if h.edge_count() != m {
            return Err(Error::Parse(format!("header says m={m}, found {}", h.edge_count())));
        }
        Ok(h)
    }
}

fn sorted_key(x: u64, offsets: &[u64]) -> Key {
    let mut key = [0u64; MAX_R];
    let r = offsets.len();
    for i in 0..r {
        let v = x ^ offsets[i];
        let mut j = i;
        while j > 0 && key[j - 1] > v {
            key[j] = key[j - 1];
            j -= 1;
        }
        key[j] = v;
    }
    key
}

fn count_chunk(xs: Range<u64>, offsets: &[u64], r: usize) -> Vec<(Key, u32)> {
    let mut local: FxHashMap<Key, u32> = FxHashMap::default();
    for x in xs {
        for o in offsets.chunks_exact(r) {
            *local.entry(sorted_key(x, o)).or_insert(0) += 1;
        }
    }
    local.into_iter().collect()
}

/// Builds `H_{r,t,S}` and checks that every edge arises from exactly `r!` ordered tuples.
///
/// Work is split over ranges of `x`; partial counts are merged in range order.
pub fn build_hypergraph(set: &GeneratorSet, r: u32, budgets: &Budgets) -> Result<Hypergraph> {
    let family = build_index_family(r)?;
    if r as usize > MAX_R {
        return Err(invalid(format!("r = {r} exceeds {MAX_R}")));
    }
    let (multiplicities, _) = edge_multiplicities(set, &family, budgets)?;
    let expected = factorial(r as u128) as u32;
    if let Some((key, count)) = multiplicities
        .iter()
        .filter(|(_, &c)| c != expected)
        .min_by_key(|(k, _)| **k)
    {
        return Err(Error::MultiplicityViolation {
            edge: key[..r as usize].to_vec(),
            count: *count as u64,
            expected: expected as u64,
        });
    }
    let mut keys: Vec<Key> = multiplicities.into_keys().collect();
    keys.sort_unstable();
    let flat = keys
        .iter()
        .flat_map(|k| k[..r as usize].iter().copied())
        .collect();
    Ok(Hypergraph {
        r,
        t: set.t,
        flat,
    })
}

/// How many ordered tuples produce each unordered edge, plus the number of tuples enumerated.
pub(crate) fn edge_multiplicities(
    set: &GeneratorSet,
    family: &IndexFamily,
    budgets: &Budgets,
) -> Result<(FxHashMap<Key, u32>, u128)> {
    let r = family.r as usize;
    let total = ordered_tuple_count(set.t, set.len(), family);
    ensure("ordered tuples (x, s)", total, budgets.max_tuples)?;
    let tuples = all_tuples(set.words(), family, budgets)?;
    let mut offsets = vec![0u64; tuples.len() / family.len() * r];
    for (s, o) in tuples
        .chunks_exact(family.len())
        .zip(offsets.chunks_exact_mut(r))
    {
        family.offsets_into(s, o);
    }
    let n_x = 1u64 << set.t;
    let per_chunk = (n_x / 1024).max(1);
    let ranges: Vec<Range<u64>> = (0..n_x)
        .step_by(per_chunk as usize)
        .map(|a| a..(a + per_chunk).min(n_x))
        .collect();
    let batch = 4 * rayon::current_num_threads();
    let mut global: FxHashMap<Key, u32> = FxHashMap::default();
    for group in ranges.chunks(batch) {
        let partial: Vec<Vec<(Key, u32)>> = group
            .par_iter()
            .map(|range| count_chunk(range.clone(), &offsets, r))
            .collect();
        for part in partial {
            for (k, c) in part {
                *global.entry(k).or_insert(0) += c;
            }
        }
    }
    Ok((global, total))
}
