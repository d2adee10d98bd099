//! Dense exact rational matrices and cohomology of finite cochain complexes.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::format_rational;

#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("complex has no differentials")]
    EmptyComplex,
    #[error("differential {k} is {rows}x{cols} but the next one expects {expected} columns")]
    ShapeMismatch {
        k: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("d{next} * d{k} is not the zero matrix")]
    CompositionNotZero { k: usize, next: usize },
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|&v| BigRational::from_integer(BigInt::from(v)))
                        .collect()
                })
                .collect(),
        )
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigRational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let pv = m.get(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &f * pv;
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the nullspace, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    /// Some `X` with `self * X = rhs`, or `None` if the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, rhs: &QMatrix) -> Option<QMatrix> {
        assert_eq!(self.rows, rhs.rows, "right-hand side row count");
        let mut aug = Self::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                aug.set(i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, r.get(row, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Entries as `"p/q"` strings, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.to_strings())
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMatrix{:?}", self.to_strings())
    }
}

/// Free-function form of [`QMatrix::rank`].
pub fn rank(m: &QMatrix) -> usize {
    m.rank()
}

/// Free-function form of [`QMatrix::kernel_basis`].
pub fn kernel_basis(m: &QMatrix) -> Vec<Vec<BigRational>> {
    m.kernel_basis()
}

/// Checks that the differentials chain up and compose to zero.
/// `d[k]` maps `C^k` (its columns) to `C^{k+1}` (its rows).
pub fn check_complex(d: &[QMatrix]) -> Result<(), LinalgError> {
    if d.is_empty() {
        return Err(LinalgError::EmptyComplex);
    }
    for k in 0..d.len() - 1 {
        if d[k].rows() != d[k + 1].cols() {
            return Err(LinalgError::ShapeMismatch {
                k: k + 1,
                rows: d[k + 1].rows(),
                cols: d[k + 1].cols(),
                expected: d[k].rows(),
            });
        }
        if !d[k + 1].mul(&d[k]).is_zero() {
            return Err(LinalgError::CompositionNotZero { k, next: k + 1 });
        }
    }
    Ok(())
}

/// Cohomology dimensions of `C^0 -> C^1 -> ... -> C^N`, where `C^N` is the
/// target of the last differential. Composition to zero is verified first.
pub fn cohomology_dims(d: &[QMatrix]) -> Result<Vec<usize>, LinalgError> {
    check_complex(d)?;
    let ranks: Vec<usize> = d.iter().map(QMatrix::rank).collect();
    let mut dims: Vec<usize> = d.iter().map(QMatrix::cols).collect();
    dims.push(d.last().unwrap().rows());
    Ok(dims
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let out = ranks.get(k).copied().unwrap_or(0);
            let inc = if k == 0 { 0 } else { ranks[k - 1] };
            c - out - inc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn small_ranks() {
        assert_eq!(QMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(QMatrix::identity(4).rank(), 4);
        assert!(QMatrix::identity(2).kernel_basis().is_empty());
        assert_eq!(QMatrix::zeros(1, 3).kernel_basis().len(), 3);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = QMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        let v = QMatrix::from_columns(3, &k);
        assert!(m.mul(&v).is_zero());
    }

    #[test]
    fn solve_recovers_solution() {
        let a = QMatrix::from_i64(&[&[2, 1], &[1, 3], &[0, 1]]);
        let x = QMatrix::from_i64(&[&[1], &[-2]]);
        let b = a.mul(&x);
        assert_eq!(a.solve(&b).unwrap(), x);
        assert!(a.solve(&QMatrix::from_i64(&[&[1], &[0], &[0]])).is_none());
    }

    #[test]
    fn zero_complex_dims() {
        let d = vec![QMatrix::zeros(2, 1), QMatrix::zeros(1, 2)];
        assert_eq!(cohomology_dims(&d).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn composition_must_vanish() {
        let d = vec![QMatrix::identity(1), QMatrix::identity(1)];
        assert_eq!(
            cohomology_dims(&d),
            Err(LinalgError::CompositionNotZero { k: 0, next: 1 })
        );
        assert!(matches!(cohomology_dims(&[]), Err(LinalgError::EmptyComplex)));
    }

    #[test]
    fn json_strings() {
        let m = QMatrix::from_rows(vec![vec![BigRational::new(q(1).to_integer(), BigInt::from(2)), q(-3)]]);
        assert_eq!(m.to_json(), serde_json::json!([["1/2", "-3"]]));
    }

    fn small_matrix() -> impl Strategy<Value = QMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
                QMatrix::from_rows(v.chunks(c).map(|row| row.iter().map(|&x| q(x)).collect()).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn rank_of_transpose(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_nullity(m in small_matrix()) {
            prop_assert_eq!(m.rank() + m.kernel_basis().len(), m.cols());
        }

        #[test]
        fn euler_characteristic(a in small_matrix(), extra in 0usize..3) {
            // Build a two-step complex B*A with B chosen from the cokernel of A.
            let left = a.transpose().kernel_basis();
            let mut rows: Vec<Vec<BigRational>> = left.into_iter().take(extra + 1).collect();
            if rows.is_empty() {
                rows.push(vec![BigRational::zero(); a.rows()]);
            }
            let b = QMatrix::from_rows(rows);
            let d = vec![a.clone(), b.clone()];
            let h = cohomology_dims(&d).unwrap();
            let c = [a.cols() as i64, a.rows() as i64, b.rows() as i64];
            let chi_c = c[0] - c[1] + c[2];
            let chi_h = h[0] as i64 - h[1] as i64 + h[2] as i64;
            prop_assert_eq!(chi_c, chi_h);
        }
    }
}
