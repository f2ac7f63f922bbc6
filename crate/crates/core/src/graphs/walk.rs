use super::{IntMatrix, SparseGraph};
use crate::construction::Hypergraph;
use crate::error::{invalid, Result};

/// Sorted, deduplicated `k`-faces stored flat, searchable by vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceIndex {
    pub k: usize,
    flat: Vec<u64>,
}

impl FaceIndex {
    pub fn of(h: &Hypergraph, k: usize) -> Self {
        FaceIndex {
            k,
            flat: h.faces(k),
        }
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u64] {
        &self.flat[i * self.k..(i + 1) * self.k]
    }

    pub fn find(&self, face: &[u64]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(face) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn labels(&self) -> Vec<Vec<u64>> {
        self.flat.chunks_exact(self.k).map(<[u64]>::to_vec).collect()
    }
}

/// Incidence between `k`-faces (rows) and `(k+1)`-faces (columns).
#[derive(Clone, Debug)]
pub struct Incidence {
    pub rows: FaceIndex,
    pub cols: FaceIndex,
    /// For each column, the `k + 1` rows it contains.
    pub col_rows: Vec<Vec<u32>>,
}

impl Incidence {
    pub fn row_cols(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.rows.len()];
        for (c, rows) in self.col_rows.iter().enumerate() {
            for &r in rows {
                out[r as usize].push(c as u32);
            }
        }
        out
    }

    /// `B B^T`, indexed by rows.
    pub fn b_bt(&self) -> IntMatrix {
        let entries = self.col_rows.iter().flat_map(|rows| {
            rows.iter()
                .flat_map(move |&a| rows.iter().map(move |&b| (a as usize, b as usize, 1)))
        });
        IntMatrix::from_entries(self.rows.len(), entries)
    }

    /// `B^T B`, indexed by columns.
    pub fn bt_b(&self) -> IntMatrix {
        let row_cols = self.row_cols();
        let entries = row_cols.into_iter().flat_map(|cols| {
            let cols2 = cols.clone();
            cols.into_iter()
                .flat_map(move |a| cols2.clone().into_iter().map(move |b| (a as usize, b as usize, 1)))
        });
        IntMatrix::from_entries(self.cols.len(), entries)
    }
}

fn check_order(h: &Hypergraph, k: usize) -> Result<()> {
    if k == 0 || k >= h.r as usize {
        return Err(invalid(format!("order k = {k} outside 1..{}", h.r)));
    }
    Ok(())
}

pub fn incidence_matrix(h: &Hypergraph, k: usize) -> Result<Incidence> {
    check_order(h, k)?;
    let rows = FaceIndex::of(h, k);
    let cols = FaceIndex::of(h, k + 1);
    let mut col_rows = Vec::with_capacity(cols.len());
    for c in 0..cols.len() {
        let face = cols.get(c);
        let mut members = Vec::with_capacity(k + 1);
        for skip in 0..=k {
            let sub: Vec<u64> = face
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            let row = rows.find(&sub).expect("every subface is a face");
            members.push(row as u32);
        }
        members.sort_unstable();
        col_rows.push(members);
    }
    Ok(Incidence {
        rows,
        cols,
        col_rows,
    })
}

/// Order-`k` walk graph: `k`-faces, joined once per common `(k+1)`-face.
pub fn walk_graph(h: &Hypergraph, k: usize) -> Result<SparseGraph> {
    let inc = incidence_matrix(h, k)?;
    let edges = inc.col_rows.iter().flat_map(|rows| {
        rows.iter().enumerate().flat_map(move |(i, &a)| {
            rows[i + 1..].iter().map(move |&b| (a as usize, b as usize, 1))
        })
    });
    let g = SparseGraph::from_edges(inc.rows.labels(), edges.collect::<Vec<_>>());
    g.regular_degree()?;
    Ok(g)
}

/// `(k+1)`-faces, joined once per shared `k`-face.
pub fn dual_edge_graph(h: &Hypergraph, k: usize) -> Result<SparseGraph> {
    let inc = incidence_matrix(h, k)?;
    let row_cols = inc.row_cols();
    let edges: Vec<(usize, usize, u64)> = row_cols
        .iter()
        .flat_map(|cols| {
            cols.iter().enumerate().flat_map(move |(i, &a)| {
                cols[i + 1..].iter().map(move |&b| (a as usize, b as usize, 1))
            })
        })
        .collect();
    let g = SparseGraph::from_edges(inc.cols.labels(), edges);
    g.regular_degree()?;
    Ok(g)
}
