//! Finite-dimensional Lie algebras given by structure constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::linalg::QMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("bracket index out of range 1..={dim}")]
    IndexOutOfRange { dim: usize },
    #[error("[e{i},e{j}] = -[e{j},e{i}] fails")]
    NotAntisymmetric { i: usize, j: usize },
    #[error("Jacobi identity fails for (e{i}, e{j}, e{k})")]
    Jacobi { i: usize, j: usize, k: usize },
}

/// `c^k_{ij}` with `[e_i, e_j] = c^k_{ij} e_k` (zero-based indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    pub dim: usize,
    c: Vec<BigRational>,
}

impl StructureConstants {
    pub fn zero(dim: usize) -> Self {
        StructureConstants {
            dim,
            c: vec![BigRational::zero(); dim * dim * dim],
        }
    }

    fn slot(&self, k: usize, i: usize, j: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &BigRational {
        &self.c[self.slot(k, i, j)]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: BigRational) {
        let s = self.slot(k, i, j);
        self.c[s] = v;
    }

    /// Builds constants from one-based entries `(i, j, k, coeff)` meaning
    /// `[e_i, e_j] = coeff e_k`; the antisymmetric partner is implied.
    pub fn from_brackets(dim: usize, entries: &[(usize, usize, usize, BigRational)]) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(dim);
        for (i, j, k, coeff) in entries {
            if [*i, *j, *k].iter().any(|&v| v == 0 || v > dim) {
                return Err(AlgebraError::IndexOutOfRange { dim });
            }
            let (i, j, k) = (i - 1, j - 1, k - 1);
            let v = out.get(k, i, j) + coeff;
            out.set(k, i, j, v.clone());
            out.set(k, j, i, -v);
        }
        Ok(out)
    }

    pub fn bracket(&self, u: &[BigRational], v: &[BigRational]) -> Vec<BigRational> {
        let n = self.dim;
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let uv = &u[i] * &v[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.get(k, i, j);
                    if !c.is_zero() {
                        *o += c * &uv;
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if *self.get(k, i, j) != -self.get(k, j, i) {
                        return Err(AlgebraError::NotAntisymmetric { i: i + 1, j: j + 1 });
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for b in 0..n {
                        let mut s = BigRational::zero();
                        for a in 0..n {
                            s += self.get(a, i, j) * self.get(b, a, k)
                                + self.get(a, j, k) * self.get(b, a, i)
                                + self.get(a, k, i) * self.get(b, a, j);
                        }
                        if !s.is_zero() {
                            return Err(AlgebraError::Jacobi {
                                i: i + 1,
                                j: j + 1,
                                k: k + 1,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Constants in the basis `f_a = P^i_a e_i`, where the columns of `p`
    /// are the new basis vectors.
    pub fn change_basis(&self, p: &QMatrix) -> Option<StructureConstants> {
        let n = self.dim;
        let cols: Vec<Vec<BigRational>> = (0..n).map(|a| p.column(a)).collect();
        let mut images = Vec::new();
        for a in 0..n {
            for b in 0..n {
                images.push(self.bracket(&cols[a], &cols[b]));
            }
        }
        let rhs = QMatrix::from_columns(n, &images);
        let coords = p.solve(&rhs)?;
        if p.rank() < n {
            return None;
        }
        let mut out = Self::zero(n);
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    out.set(k, a, b, coords.get(k, a * n + b).clone());
                }
            }
        }
        Some(out)
    }

    /// Adjoint matrices `ad(e_i)^k_j = c^k_{ij}`.
    pub fn adjoint(&self) -> Vec<QMatrix> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                let mut m = QMatrix::zeros(n, n);
                for k in 0..n {
                    for j in 0..n {
                        m.set(k, j, self.get(k, i, j).clone());
                    }
                }
                m
            })
            .collect()
    }

    /// One-based `(i, j, k, coeff)` entries with `i < j`, for display.
    pub fn entries(&self) -> Vec<(usize, usize, usize, BigRational)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = self.get(k, i, j);
                    if !c.is_zero() {
                        out.push((i + 1, j + 1, k + 1, c.clone()));
                    }
                }
            }
        }
        out
    }
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
