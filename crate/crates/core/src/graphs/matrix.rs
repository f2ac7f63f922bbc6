use std::collections::BTreeMap;

/// Square sparse integer matrix for exact identities between adjacency matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: Vec<Vec<(u32, i64)>>,
}

impl IntMatrix {
    /// Rows must be sorted by column with no zero entries.
    pub fn from_rows(rows: Vec<Vec<(u32, i64)>>) -> Self {
        let mut m = IntMatrix { rows };
        m.normalise();
        m
    }

    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut rows: Vec<BTreeMap<u32, i64>> = vec![BTreeMap::new(); n];
        for (i, j, v) in entries {
            *rows[i].entry(j as u32).or_insert(0) += v;
        }
        IntMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix {
            rows: (0..n).map(|i| vec![(i as u32, 1)]).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        IntMatrix {
            rows: vec![Vec::new(); n],
        }
    }

    fn normalise(&mut self) {
        for row in &mut self.rows {
            row.retain(|&(_, v)| v != 0);
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i]
            .binary_search_by_key(&(j as u32), |&(c, _)| c)
            .map_or(0, |k| self.rows[i][k].1)
    }

    pub fn row(&self, i: usize) -> &[(u32, i64)] {
        &self.rows[i]
    }

    pub fn scale(&self, c: i64) -> Self {
        IntMatrix::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|&(j, v)| (j, v * c)).collect())
                .collect(),
        )
    }

    pub fn add(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.n(), other.n());
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut acc: BTreeMap<u32, i64> = a.iter().copied().collect();
                for &(j, v) in b {
                    *acc.entry(j).or_insert(0) += v;
                }
                acc.into_iter().collect()
            })
            .collect();
        IntMatrix::from_rows(rows)
    }

    pub fn sub(&self, other: &IntMatrix) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn mul(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.n(), other.n());
        let n = self.n();
        let rows = self
            .rows
            .iter()
            .map(|a| {
                let mut dense = vec![0i64; n];
                let mut touched = Vec::new();
                for &(k, x) in a {
                    for &(j, y) in &other.rows[k as usize] {
                        if dense[j as usize] == 0 {
                            touched.push(j);
                        }
                        dense[j as usize] += x * y;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                touched
                    .into_iter()
                    .map(|j| (j, dense[j as usize]))
                    .filter(|&(_, v)| v != 0)
                    .collect()
            })
            .collect();
        IntMatrix { rows }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = IntMatrix::identity(self.n());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// First entry where the two matrices differ.
    pub fn first_difference(&self, other: &IntMatrix) -> Option<(usize, usize, i64, i64)> {
        let diff = self.sub(other);
        diff.rows.iter().enumerate().find_map(|(i, row)| {
            row.first()
                .map(|&(j, _)| (i, j as usize, self.get(i, j as usize), other.get(i, j as usize)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_against_dense() {
        let a = IntMatrix::from_entries(3, [(0, 1, 2), (1, 0, 2), (1, 2, 1), (2, 1, 1), (2, 2, 3)]);
        let dense = |m: &IntMatrix| -> Vec<Vec<i64>> {
            (0..3).map(|i| (0..3).map(|j| m.get(i, j)).collect()).collect()
        };
        let d = dense(&a);
        let mut sq = vec![vec![0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                sq[i][j] = (0..3).map(|k| d[i][k] * d[k][j]).sum();
            }
        }
        assert_eq!(dense(&a.mul(&a)), sq);
        assert_eq!(a.pow(2), a.mul(&a));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.add(&IntMatrix::identity(3)).get(0, 0), 1);
        assert_eq!(a.first_difference(&a.scale(2)), Some((0, 1, 2, 4)));
    }
}
