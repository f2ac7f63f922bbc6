//! Set partitions of `{0, ..., n-1}` via restricted-growth strings, with Möbius values.

use crate::budget::Budgets;
use crate::error::{Error, Result};

/// Blocks are sorted by their smallest element; each block is sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    fn from_growth(rgs: &[usize]) -> Self {
        let count = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        SetPartition {
            n: rgs.len(),
            blocks,
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `(-1)^(n - |P|) * prod (|b| - 1)!`, the Möbius value from the partition to the finest one.
    pub fn moebius(&self) -> i128 {
        let sign = if (self.n - self.blocks.len()).is_multiple_of(2) { 1 } else { -1 };
        sign * self.moebius_abs() as i128
    }

    pub fn moebius_abs(&self) -> u128 {
        self.blocks
            .iter()
            .map(|b| (1..b.len() as u128).product::<u128>())
            .product()
    }

    pub fn even_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| b.len() % 2 == 0).count()
    }

    pub fn odd_blocks(&self) -> usize {
        self.blocks.len() - self.even_blocks()
    }
}

/// All partitions of an `n`-set in restricted-growth order.
pub fn enumerate_partitions(n: usize, budgets: &Budgets) -> Result<Vec<SetPartition>> {
    if n > budgets.max_partition_n {
        return Err(Error::ResourceLimit {
            what: "partition enumeration size".into(),
            needed: n as u128,
            budget: budgets.max_partition_n as u128,
        });
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(SetPartition {
            n: 0,
            blocks: Vec::new(),
        });
        return Ok(out);
    }
    let mut rgs = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        out.push(SetPartition::from_growth(&rgs));
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            if rgs[i] <= maxes[i - 1] {
                rgs[i] += 1;
                let top = maxes[i - 1].max(rgs[i]);
                maxes[i] = top;
                for j in i + 1..n {
                    rgs[j] = 0;
                    maxes[j] = top;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// `sum |mu(P)|` over partitions of an `m`-set with exactly `m - a` blocks.
pub fn moebius_abs_sum(m: usize, a: usize, budgets: &Budgets) -> Result<u128> {
    Ok(enumerate_partitions(m, budgets)?
        .iter()
        .filter(|p| p.len() + a == m)
        .map(SetPartition::moebius_abs)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_by_recurrence(n: usize) -> u128 {
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![*row.last().unwrap()];
            for v in &row {
                let last = *next.last().unwrap();
                next.push(last + v);
            }
            row = next;
        }
        row[0]
    }

    fn stirling2(n: usize, k: usize) -> u128 {
        if n == 0 && k == 0 {
            return 1;
        }
        if n == 0 || k == 0 {
            return 0;
        }
        k as u128 * stirling2(n - 1, k) + stirling2(n - 1, k - 1)
    }

    #[test]
    fn bell_numbers() {
        let b = Budgets::default();
        for n in 0..=9 {
            let parts = enumerate_partitions(n, &b).unwrap();
            assert_eq!(parts.len() as u128, bell_by_recurrence(n), "n = {n}");
            let mut dedup = parts.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), parts.len());
        }
        assert!(enumerate_partitions(10, &b).is_err());
    }

    #[test]
    fn block_counts_follow_stirling() {
        let b = Budgets::default();
        for n in 1..=8 {
            let parts = enumerate_partitions(n, &b).unwrap();
            for k in 1..=n {
                let c = parts.iter().filter(|p| p.len() == k).count() as u128;
                assert_eq!(c, stirling2(n, k));
            }
        }
    }

    #[test]
    fn moebius_sums_vanish() {
        // sum over all partitions of mu(P, finest) is 0 for n >= 2
        let b = Budgets::default();
        for n in 2..=8 {
            let total: i128 = enumerate_partitions(n, &b)
                .unwrap()
                .iter()
                .map(SetPartition::moebius)
                .sum();
            assert_eq!(total, 0, "n = {n}");
        }
    }

    #[test]
    fn abs_moebius_is_unsigned_stirling_first_kind() {
        // sum over partitions with k blocks of |mu| = c(n, k)
        fn c1(n: usize, k: usize) -> u128 {
            if n == 0 && k == 0 {
                return 1;
            }
            if n == 0 || k == 0 {
                return 0;
            }
            (n as u128 - 1) * c1(n - 1, k) + c1(n - 1, k - 1)
        }
        let b = Budgets::default();
        for m in 1..=8 {
            for a in 0..m {
                assert_eq!(moebius_abs_sum(m, a, &b).unwrap(), c1(m, m - a));
            }
        }
    }

    #[test]
    fn block_parities() {
        let p = SetPartition::from_growth(&[0, 0, 1, 2, 2, 2]);
        assert_eq!(p.even_blocks(), 1);
        assert_eq!(p.odd_blocks(), 2);
        assert_eq!(p.moebius(), -2);
    }
}
