use super::SparseGraph;
use crate::budget::{ensure, Budgets};
use crate::error::Result;
use crate::gf2::GeneratorMultiset;

/// `Cay(F_2^t, M)`: `A[x][x + s] = m(s)`; vertex `x` has label `[x]`.
pub fn cayley_graph(multiset: &GeneratorMultiset, budgets: &Budgets) -> Result<SparseGraph> {
    ensure("Cayley graph vertices", 1u128 << multiset.t, budgets.max_vertices)?;
    let n = 1usize << multiset.t;
    let labels = (0..n as u64).map(|x| vec![x]).collect();
    let adj = (0..n as u64)
        .map(|x| {
            let mut row: Vec<(u32, u64)> = multiset
                .counts
                .iter()
                .map(|(&s, &m)| ((x ^ s) as u32, m))
                .collect();
            row.sort_unstable();
            row
        })
        .collect();
    Ok(SparseGraph::from_rows(labels, adj))
}
