//! Lower-order tuples `T'` and the maps `psi`, `phi` relating prefixes to them.

use super::{IndexFamily, IndexSet};
use crate::budget::{ensure, factorial, falling, Budgets};
use crate::error::{invalid, Result};
use crate::gf2::next_combination;

/// `phi(J)`: whichever of `J ∩ [m]` and `[m] \ J` lies in `P_m ∪ {∅}`.
pub fn phi(j: IndexSet, lower: &IndexFamily) -> IndexSet {
    let full = (1u32 << lower.r) - 1;
    let low = j & full;
    if low == 0 || lower.contains(low) {
        low
    } else {
        full & !low
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerImage {
    /// First `m` coordinates of `e(x, s)`.
    pub prefix: Vec<u64>,
    pub y: u64,
    /// Indexed by `P_m`.
    pub t: Vec<u64>,
    /// For each member of `P_m`, the generators summed into it.
    pub witnesses: Vec<Vec<u64>>,
}

/// `psi` and `phi` applied to `(x, s)` for `m = r - k`.
pub fn psi_phi(x: u64, s: &[u64], upper: &IndexFamily, lower: &IndexFamily) -> LowerImage {
    let m = lower.r as usize;
    let full = (1u32 << lower.r) - 1;
    let prefix = upper.edge(x, s)[..m].to_vec();
    let mut y = x;
    let mut t = vec![0u64; lower.len()];
    let mut witnesses = vec![Vec::new(); lower.len()];
    for (&j, &sj) in upper.sets.iter().zip(s) {
        let low = j & full;
        if low != 0 && !lower.contains(low) {
            y ^= sj;
        }
        let image = phi(j, lower);
        if image != 0 {
            let pos = lower.index_of(image).expect("phi lands in P_m");
            t[pos] ^= sj;
            witnesses[pos].push(sj);
        }
    }
    LowerImage {
        prefix,
        y,
        t,
        witnesses,
    }
}

/// `|T'|` when all witness sets give distinct sums.
pub fn t_prime_count(set_size: usize, lower: &IndexFamily, k: u32) -> u128 {
    let w = 1u128 << k;
    let slots = w * lower.len() as u128;
    let per = factorial(w);
    let mut denom: u128 = 1;
    for _ in 0..lower.len() {
        denom = denom.saturating_mul(per);
    }
    falling(set_size as u128, slots) / denom
}

/// The tuples of `T'` for `m = r - k`: coordinate `I` is a sum of `2^k` generators and
/// all witnesses across coordinates are distinct.
#[derive(Clone, Debug)]
pub struct LowerTuples {
    pub lower: IndexFamily,
    pub k: u32,
    flat: Vec<u64>,
}

impl LowerTuples {
    pub fn len(&self) -> usize {
        self.flat.len() / self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn tuples(&self) -> std::slice::ChunksExact<'_, u64> {
        self.flat.chunks_exact(self.lower.len())
    }
}

pub fn enumerate_t_prime(elements: &[u64], r: u32, k: u32, budgets: &Budgets) -> Result<LowerTuples> {
    if k + 2 > r {
        return Err(invalid(format!("need r - k >= 2, got r = {r}, k = {k}")));
    }
    let lower = IndexFamily::with_arity(r - k)?;
    ensure(
        "lower-order tuples",
        t_prime_count(elements.len(), &lower, k),
        budgets.max_tuples,
    )?;
    let width = 1usize << k;
    let mut flat = Vec::new();
    let mut used = vec![false; elements.len()];
    let mut current = Vec::with_capacity(lower.len());
    fill(elements, width, lower.len(), &mut used, &mut current, &mut flat);
    Ok(LowerTuples { lower, k, flat })
}

fn fill(
    elements: &[u64],
    width: usize,
    slots: usize,
    used: &mut [bool],
    current: &mut Vec<u64>,
    out: &mut Vec<u64>,
) {
    if current.len() == slots {
        out.extend_from_slice(current);
        return;
    }
    let free: Vec<usize> = (0..elements.len()).filter(|&i| !used[i]).collect();
    if free.len() < width {
        return;
    }
    let mut idx: Vec<usize> = (0..width).collect();
    loop {
        let chosen: Vec<usize> = idx.iter().map(|&i| free[i]).collect();
        chosen.iter().for_each(|&i| used[i] = true);
        current.push(chosen.iter().fold(0, |a, &i| a ^ elements[i]));
        fill(elements, width, slots, used, current, out);
        current.pop();
        chosen.iter().for_each(|&i| used[i] = false);
        if !next_combination(&mut idx, free.len()) {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_index_family, for_each_tuple};
    use crate::gf2::sample_generators;
    use std::collections::HashSet;

    #[test]
    fn fibers_have_size_two_to_the_k() {
        for r in 3..=7u32 {
            let upper = build_index_family(r).unwrap();
            for k in 1..=r - 2 {
                let lower = IndexFamily::with_arity(r - k).unwrap();
                let mut domain = upper.sets.clone();
                domain.push(0);
                let mut targets = lower.sets.clone();
                targets.push(0);
                for &target in &targets {
                    let fiber = domain.iter().filter(|&&j| phi(j, &lower) == target).count();
                    assert_eq!(fiber, 1 << k, "r = {r}, k = {k}, target {target:b}");
                }
            }
        }
    }

    #[test]
    fn image_reproduces_prefix() {
        let set = sample_generators(9, 8, 4, 4, &Budgets::default()).unwrap();
        let upper = build_index_family(4).unwrap();
        for k in 1..=2u32 {
            let lower = IndexFamily::with_arity(4 - k).unwrap();
            let mut n = 0;
            for_each_tuple(set.words(), upper.len(), |s| {
                n += 1;
                if n % 97 != 0 {
                    return;
                }
                let img = psi_phi(0b1_0110_1001, s, &upper, &lower);
                assert_eq!(lower.edge(img.y, &img.t), img.prefix);
                for (w, &ti) in img.witnesses.iter().zip(&img.t) {
                    assert_eq!(w.len(), 1 << k);
                    assert_eq!(w.iter().fold(0, |a, b| a ^ b), ti);
                }
            });
        }
    }

    /// Oracle: choose witness sets for every slot by brute force over all index subsets.
    fn naive_t_prime(elements: &[u64], slots: usize, width: usize) -> HashSet<Vec<u64>> {
        let n = elements.len();
        let subsets: Vec<u32> = (0u32..1 << n).filter(|m| m.count_ones() as usize == width).collect();
        let mut out = HashSet::new();
        let mut stack: Vec<(u32, Vec<u64>)> = vec![(0, Vec::new())];
        while let Some((used, tuple)) = stack.pop() {
            if tuple.len() == slots {
                out.insert(tuple);
                continue;
            }
            for &sub in &subsets {
                if sub & used == 0 {
                    let sum = (0..n).filter(|i| sub >> i & 1 == 1).fold(0, |a, i| a ^ elements[i]);
                    let mut next = tuple.clone();
                    next.push(sum);
                    stack.push((used | sub, next));
                }
            }
        }
        out
    }

    #[test]
    fn t_prime_matches_oracle() {
        let b = Budgets::default();
        let set = sample_generators(8, 6, 3, 8, &b).unwrap();
        let tp = enumerate_t_prime(set.words(), 3, 1, &b).unwrap();
        assert_eq!(tp.len(), 15);
        assert_eq!(t_prime_count(6, &tp.lower, 1), 15);

        let set = sample_generators(8, 7, 4, 8, &b).unwrap();
        let tp = enumerate_t_prime(set.words(), 4, 1, &b).unwrap();
        let oracle = naive_t_prime(set.words(), 3, 2);
        let got: HashSet<Vec<u64>> = tp.tuples().map(|t| t.to_vec()).collect();
        assert_eq!(got.len(), tp.len());
        assert_eq!(got, oracle);
        assert_eq!(tp.len() as u128, t_prime_count(7, &tp.lower, 1));
        assert_eq!(tp.len(), 630);
    }
}
