//! The index family `P`, generator tuples and ordered edges.

mod hypergraph;
mod lower;

pub use hypergraph::{build_hypergraph, Hypergraph, MAX_R};
pub use lower::{
    enumerate_t_prime, phi, psi_phi, t_prime_count, LowerImage, LowerTuples,
};

use crate::budget::{ensure, falling, Budgets};
use crate::error::{invalid, Result};

/// Subsets of `[r]` are bitmasks: bit `i - 1` stands for element `i`.
pub type IndexSet = u32;

pub fn set_elements(set: IndexSet) -> Vec<u32> {
    (0..32).filter(|b| set >> b & 1 == 1).map(|b| b + 1).collect()
}

pub fn set_from_elements(elements: &[u32]) -> IndexSet {
    elements.iter().fold(0, |acc, &e| acc | 1 << (e - 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexFamily {
    pub r: u32,
    /// Ordered by size, then lexicographically.
    pub sets: Vec<IndexSet>,
    containing: Vec<Vec<usize>>,
}

pub fn build_index_family(r: u32) -> Result<IndexFamily> {
    if r < 3 {
        return Err(invalid(format!("r = {r} < 3")));
    }
    IndexFamily::with_arity(r)
}

impl IndexFamily {
    /// Also accepts `r = 2`, which appears as the target of the lower-order maps.
    pub fn with_arity(r: u32) -> Result<Self> {
        if !(2..=20).contains(&r) {
            return Err(invalid(format!("r = {r} outside 2..=20")));
        }
        let full: u32 = (1 << r) - 1;
        let mut sets: Vec<IndexSet> = (1..=full)
            .filter(|&s| {
                let size = s.count_ones();
                2 * size < r || (2 * size == r && s & 1 == 1)
            })
            .collect();
        sets.sort_by_key(|&s| (s.count_ones(), set_elements(s)));
        let containing = (0..r)
            .map(|i| {
                sets.iter()
                    .enumerate()
                    .filter(|(_, &s)| s >> i & 1 == 1)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        Ok(IndexFamily {
            r,
            sets,
            containing,
        })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn index_of(&self, set: IndexSet) -> Option<usize> {
        self.sets.iter().position(|&s| s == set)
    }

    pub fn contains(&self, set: IndexSet) -> bool {
        self.index_of(set).is_some()
    }

    /// Positions (into `sets`) of the members containing coordinate `i` (1-based).
    pub fn containing(&self, i: u32) -> &[usize] {
        &self.containing[(i - 1) as usize]
    }

    /// `o_i(s) = sum of s_I over I containing i`, so that `e_i(x, s) = x + o_i(s)`.
    pub fn offsets_into(&self, s: &[u64], out: &mut [u64]) {
        for (o, members) in out.iter_mut().zip(&self.containing) {
            *o = members.iter().fold(0, |acc, &j| acc ^ s[j]);
        }
    }

    pub fn offsets(&self, s: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.r as usize];
        self.offsets_into(s, &mut out);
        out
    }

    /// `e(x, s)` without validating `s`.
    pub fn edge(&self, x: u64, s: &[u64]) -> Vec<u64> {
        self.offsets(s).into_iter().map(|o| x ^ o).collect()
    }
}

/// `e(x, s)` after checking that `s` is a tuple of distinct words of the right length.
pub fn edge_tuple(x: u64, s: &[u64], family: &IndexFamily) -> Result<Vec<u64>> {
    if s.len() != family.len() {
        return Err(invalid(format!(
            "tuple has {} coordinates, family has {}",
            s.len(),
            family.len()
        )));
    }
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("tuple coordinates are not distinct"));
    }
    Ok(family.edge(x, s))
}

/// Calls `f` with every ordered tuple of `len` distinct elements, lexicographic in indices.
pub fn for_each_tuple(elements: &[u64], len: usize, mut f: impl FnMut(&[u64])) {
    fn rec(
        elements: &[u64],
        len: usize,
        used: &mut [bool],
        buf: &mut Vec<u64>,
        f: &mut dyn FnMut(&[u64]),
    ) {
        if buf.len() == len {
            f(buf);
            return;
        }
        for i in 0..elements.len() {
            if !used[i] {
                used[i] = true;
                buf.push(elements[i]);
                rec(elements, len, used, buf, f);
                buf.pop();
                used[i] = false;
            }
        }
    }
    if len > elements.len() {
        return;
    }
    let mut used = vec![false; elements.len()];
    let mut buf = Vec::with_capacity(len);
    rec(elements, len, &mut used, &mut buf, &mut f);
}

/// Number of ordered pairs `(x, s)`, i.e. `2^t * |S|^(falling |P|)`.
pub fn ordered_tuple_count(t: u32, set_size: usize, family: &IndexFamily) -> u128 {
    falling(set_size as u128, family.len() as u128).saturating_mul(1u128 << t)
}

/// Flat list of all tuples in `T`, stride `|P|`.
pub fn all_tuples(elements: &[u64], family: &IndexFamily, budgets: &Budgets) -> Result<Vec<u64>> {
    let count = falling(elements.len() as u128, family.len() as u128);
    ensure("generator tuples", count, budgets.max_tuples)?;
    let mut flat = Vec::with_capacity(count as usize * family.len());
    for_each_tuple(elements, family.len(), |s| flat.extend_from_slice(s));
    Ok(flat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn family_for_r4_in_canonical_order() {
        let f = build_index_family(4).unwrap();
        let expected: Vec<IndexSet> = [
            vec![1],
            vec![2],
            vec![3],
            vec![4],
            vec![1, 2],
            vec![1, 3],
            vec![1, 4],
        ]
        .iter()
        .map(|e| set_from_elements(e))
        .collect();
        assert_eq!(f.sets, expected);
    }

    #[test]
    fn family_sizes_and_complements() {
        for r in 3..=8u32 {
            let f = build_index_family(r).unwrap();
            assert_eq!(f.len(), (1 << (r - 1)) - 1);
            let full = (1u32 << r) - 1;
            // exactly one of each complementary pair of nonempty proper subsets
            for s in 1..full {
                let c = full & !s;
                assert!(f.contains(s) ^ f.contains(c), "r = {r}, set {s:b}");
            }
            for &s in &f.sets {
                // closed under taking nonempty subsets
                let mut sub = (s - 1) & s;
                while sub > 0 {
                    assert!(f.contains(sub));
                    sub = (sub - 1) & s;
                }
            }
        }
        assert!(build_index_family(2).is_err());
        assert_eq!(IndexFamily::with_arity(2).unwrap().sets, vec![1]);
    }

    #[test]
    fn edge_of_r3_tuple() {
        let f = build_index_family(3).unwrap();
        let e = edge_tuple(0b1000, &[1, 2, 4], &f).unwrap();
        assert_eq!(e, vec![0b1001, 0b1010, 0b1100]);
        assert!(edge_tuple(0, &[1, 1, 4], &f).is_err());
        assert!(edge_tuple(0, &[1, 2], &f).is_err());
    }

    #[test]
    fn tuple_enumeration_counts() {
        let s = [1u64, 2, 4, 8, 16];
        let mut seen = HashSet::new();
        let mut n = 0;
        for_each_tuple(&s, 3, |t| {
            n += 1;
            assert!(seen.insert(t.to_vec()));
        });
        assert_eq!(n, 60);
        let f = build_index_family(3).unwrap();
        assert_eq!(ordered_tuple_count(6, 5, &f), 64 * 60);
    }
}
