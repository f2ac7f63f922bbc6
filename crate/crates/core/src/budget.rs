//! Resource budgets for enumeration-heavy operations.

use crate::error::{Error, Result};

pub const OVERRIDE_VAR: &str = "EXPANDER_FORGE_BUDGET_OVERRIDE";

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Budgets {
    /// Ordered tuples `(x, s)` enumerated when building a hypergraph.
    pub max_tuples: u128,
    pub max_vertices: u128,
    /// Largest graph handed to the dense eigensolver.
    pub dense_cap: usize,
    /// Largest `t` accepted by the Walsh–Hadamard transform.
    pub walsh_max_t: u32,
    pub subset_sums: u128,
    pub max_partition_n: usize,
    pub max_attempts: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_tuples: 1 << 22,
            max_vertices: 1 << 20,
            dense_cap: 3000,
            walsh_max_t: 24,
            subset_sums: 1 << 26,
            max_partition_n: 9,
            max_attempts: 10_000,
        }
    }
}

impl Budgets {
    /// Raises the counting budgets to the value of `EXPANDER_FORGE_BUDGET_OVERRIDE` if set.
    pub fn with_env_override(mut self) -> Self {
        if let Some(v) = std::env::var(OVERRIDE_VAR)
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
        {
            self.max_tuples = self.max_tuples.max(v);
            self.max_vertices = self.max_vertices.max(v);
            self.subset_sums = self.subset_sums.max(v);
        }
        self
    }

    /// A budget large enough for every desk-scale acceptance instance.
    pub fn generous() -> Self {
        Budgets {
            max_tuples: 1 << 27,
            max_vertices: 1 << 26,
            subset_sums: 1 << 28,
            ..Budgets::default()
        }
    }
}

pub(crate) fn ensure(what: &str, needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::ResourceLimit {
            what: what.to_string(),
            needed,
            budget,
        });
    }
    Ok(())
}

/// `n (n-1) ... (n-k+1)`, saturating at `u128::MAX`.
pub fn falling(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i);
    }
    acc
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u128) -> u128 {
    falling(n, n)
}
