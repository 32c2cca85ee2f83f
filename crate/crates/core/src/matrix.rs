//! Dense square matrices over `Z[v, v^-1]`.

use std::ops::{Index, IndexMut};

use crate::laurent::LaurentPoly;

/// A square matrix of Laurent polynomials, row-major.
///
/// Operators act on column vectors: column `j` holds the image of basis vector
/// `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    dim: usize,
    entries: Vec<LaurentPoly>,
}

impl PolyMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![LaurentPoly::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = LaurentPoly::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> Vec<LaurentPoly> {
        (0..self.dim).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, col: Vec<LaurentPoly>) {
        for (i, p) in col.into_iter().enumerate() {
            self[(i, j)] = p;
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &LaurentPoly)> + '_ {
        self.entries.iter().enumerate().map(move |(k, p)| ((k / self.dim, k % self.dim), p))
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = ((usize, usize), &LaurentPoly)> + '_ {
        self.entries().filter(|(_, p)| !p.is_zero())
    }

    pub fn bar(&self) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(LaurentPoly::bar).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, vec: &[LaurentPoly]) -> Vec<LaurentPoly> {
        assert_eq!(self.dim, vec.len(), "dimension mismatch");
        (0..self.dim)
            .map(|i| {
                let mut acc = LaurentPoly::zero();
                for (j, x) in vec.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &PolyMatrix) -> PolyMatrix {
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect();
        PolyMatrix { dim: self.dim, entries }
    }

    pub fn sub(&self, rhs: &PolyMatrix) -> PolyMatrix {
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect();
        PolyMatrix { dim: self.dim, entries }
    }

    /// `self -= c * rhs` for an integer `c`.
    pub fn sub_scaled_assign(&mut self, c: i64, rhs: &PolyMatrix) {
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            if !b.is_zero() {
                *a -= b.scale_i64(c);
            }
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> PolyMatrix {
        PolyMatrix { dim: self.dim, entries: self.entries.iter().map(|a| a * c).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.entries().all(|((i, j), p)| if i == j { p.is_one() } else { p.is_zero() })
    }
}

impl Index<(usize, usize)> for PolyMatrix {
    type Output = LaurentPoly;
    fn index(&self, (i, j): (usize, usize)) -> &LaurentPoly {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for PolyMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut LaurentPoly {
        &mut self.entries[i * self.dim + j]
    }
}

/// A sparse operator stored column by column: `cols[j]` lists the nonzero
/// `(row, entry)` pairs of the image of basis vector `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseOperator {
    pub cols: Vec<Vec<(usize, LaurentPoly)>>,
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn to_dense(&self) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(self.dim());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, p) in col {
                m[(*i, j)] += p;
            }
        }
        m
    }

    /// `self * rhs` with `rhs` dense.
    pub fn mul_dense(&self, rhs: &PolyMatrix) -> PolyMatrix {
        let n = self.dim();
        let mut out = PolyMatrix::zeros(n);
        for (k, col) in self.cols.iter().enumerate() {
            for j in 0..n {
                let b = &rhs[(k, j)];
                if b.is_zero() {
                    continue;
                }
                for (i, a) in col {
                    out[(*i, j)] += a * b;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_and_dense_products_agree() {
        let v = LaurentPoly::v();
        let op = SparseOperator {
            cols: vec![vec![(0, v.clone()), (1, LaurentPoly::one())], vec![(1, -LaurentPoly::v().bar())]],
        };
        let mut m = PolyMatrix::identity(2);
        m[(0, 1)] = LaurentPoly::v_minus_inv();
        assert_eq!(op.mul_dense(&m), op.to_dense().mul(&m));
        assert!(PolyMatrix::identity(3).is_identity());
        assert!(!m.is_identity());
        assert_eq!(m.transpose().transpose(), m);
    }
}
