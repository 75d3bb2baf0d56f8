//! Exact sparse row reduction over ℚ.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::gradedalg::Scalar;

/// Sparse vector: `(column, value)` pairs sorted by column, no zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

#[derive(Clone, Debug)]
struct PivotRow {
    row: SparseVec,
    combo: SparseVec,
}

/// Incremental semi-echelon basis of a row space. Every stored row has a
/// leading entry of one in a column no other stored row leads in.
///
/// With tracking enabled each stored row also carries its expression in
/// terms of the inserted vectors, so dependent insertions yield kernel
/// vectors.
#[derive(Clone, Debug, Default)]
pub struct RowReducer {
    pivots: BTreeMap<usize, PivotRow>,
    track: bool,
    inserted: usize,
}

fn axpy(acc: &mut BTreeMap<usize, Scalar>, c: &Scalar, row: &SparseVec) {
    for (k, v) in row {
        let entry = acc.entry(*k).or_insert_with(Scalar::zero);
        *entry -= c * v;
        if entry.is_zero() {
            acc.remove(k);
        }
    }
}

impl RowReducer {
    pub fn new() -> Self {
        RowReducer::default()
    }

    pub fn tracking() -> Self {
        RowReducer {
            track: true,
            ..RowReducer::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Adds a vector to the span. Returns `None` when it was independent;
    /// otherwise the dependency among inserted vectors (by insertion index,
    /// including the new one) when tracking, or an empty vector when not.
    pub fn insert(&mut self, v: SparseVec) -> Option<SparseVec> {
        let index = self.inserted;
        self.inserted += 1;
        let mut acc: BTreeMap<usize, Scalar> = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let mut combo: BTreeMap<usize, Scalar> = BTreeMap::new();
        if self.track {
            combo.insert(index, Scalar::one());
        }
        while let Some((&col, lead)) = acc.iter().next() {
            match self.pivots.get(&col) {
                Some(p) => {
                    let c = lead.clone();
                    axpy(&mut acc, &c, &p.row);
                    if self.track {
                        axpy(&mut combo, &c, &p.combo);
                    }
                }
                None => {
                    let inv = lead.recip();
                    let row = acc.into_iter().map(|(k, x)| (k, x * &inv)).collect();
                    let combo = combo.into_iter().map(|(k, x)| (k, x * &inv)).collect();
                    self.pivots.insert(col, PivotRow { row, combo });
                    return None;
                }
            }
        }
        Some(combo.into_iter().collect())
    }

    /// Normal form of `v` modulo the span: the unique vector in `v + span`
    /// vanishing on every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Scalar> = v.iter().filter(|(_, c)| !c.is_zero()).cloned().collect();
        let mut cursor = 0usize;
        loop {
            let next = acc
                .range(cursor..)
                .find(|(k, _)| self.pivots.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            match next {
                Some((col, c)) => {
                    axpy(&mut acc, &c, &self.pivots[&col].row);
                    cursor = col + 1;
                }
                None => break,
            }
        }
        acc.into_iter().collect()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Reduced row echelon form of the span, rows ordered by pivot column.
    pub fn rref(&self) -> Vec<SparseVec> {
        let mut done: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (&col, p) in self.pivots.iter().rev() {
            let mut acc: BTreeMap<usize, Scalar> = p.row.iter().cloned().collect();
            let targets: Vec<(usize, Scalar)> = acc
                .range(col + 1..)
                .filter(|(k, _)| done.contains_key(k))
                .map(|(k, c)| (*k, c.clone()))
                .collect();
            for (k, c) in targets {
                axpy(&mut acc, &c, &done[&k]);
            }
            done.insert(col, acc.into_iter().collect());
        }
        done.into_values().collect()
    }
}

/// Rank of a list of sparse rows.
pub fn rank(rows: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut r = RowReducer::new();
    for row in rows {
        r.insert(row);
    }
    r.rank()
}

/// Kernel of the map sending basis vector `i` to `images[i]`, as reduced
/// row echelon vectors over the source basis.
pub fn kernel(images: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut r = RowReducer::tracking();
    let mut kernel = RowReducer::new();
    for img in images {
        if let Some(dep) = r.insert(img) {
            kernel.insert(dep);
        }
    }
    kernel.rref()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradedalg::scalar;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|(k, x)| (*k, scalar(*x))).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![v(&[(0, 1), (1, 2)]), v(&[(0, 2), (1, 4)]), v(&[(2, 1)])];
        assert_eq!(rank(rows), 2);
    }

    #[test]
    fn kernel_of_repeated_column() {
        // b3 -> t, z3 -> t
        let k = kernel(vec![v(&[(0, 1)]), v(&[(0, 1)])]);
        assert_eq!(k, vec![v(&[(0, 1), (1, -1)])]);
    }

    #[test]
    fn normal_form_is_canonical() {
        let mut r = RowReducer::new();
        r.insert(v(&[(0, 1), (1, 1), (2, 1)]));
        assert_eq!(r.reduce(&v(&[(0, 1)])), v(&[(1, -1), (2, -1)]));
        assert!(r.contains(&v(&[(0, 3), (1, 3), (2, 3)])));
    }

    #[test]
    fn rref_back_substitutes() {
        let mut r = RowReducer::new();
        r.insert(v(&[(0, 1), (1, 1)]));
        r.insert(v(&[(1, 2), (2, 2)]));
        assert_eq!(r.rref(), vec![v(&[(0, 1), (2, -1)]), v(&[(1, 1), (2, 1)])]);
    }

    #[test]
    fn matches_dense_elimination() {
        // independent dense reference on a small integer matrix
        let m = [[2i64, 4, -2, 0], [1, 2, -1, 3], [0, 0, 0, 1], [3, 6, -3, 4]];
        let mut dense: Vec<Vec<Scalar>> = m.iter().map(|r| r.iter().map(|&x| scalar(x)).collect()).collect();
        let mut rank_dense = 0;
        for col in 0..4 {
            if let Some(p) = (rank_dense..4).find(|&i| !dense[i][col].is_zero()) {
                dense.swap(rank_dense, p);
                for i in 0..4 {
                    if i != rank_dense && !dense[i][col].is_zero() {
                        let f = &dense[i][col] / &dense[rank_dense][col];
                        let pivot = dense[rank_dense].clone();
                        for (x, y) in dense[i].iter_mut().zip(&pivot) {
                            *x -= &f * y;
                        }
                    }
                }
                rank_dense += 1;
            }
        }
        let rows = m.iter().map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, x)| **x != 0)
                .map(|(k, x)| (k, scalar(*x)))
                .collect()
        });
        assert_eq!(rank(rows), rank_dense);
    }
}
