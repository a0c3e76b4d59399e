//! Dense matrices over F_q.

use crate::error::{Error, Result};
use crate::ff::{FieldDesc, Felt};
use crate::geom::FVector;

/// Row-major matrix of field elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Felt>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Felt::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Felt::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[FVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.dim());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.dim() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.dim(),
                });
            }
            data.extend_from_slice(r.coords());
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Felt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, fd: &FieldDesc, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Felt::ZERO;
                for k in 0..self.cols {
                    acc = fd.add(acc, fd.mul(self[(i, k)], other[(k, j)]));
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, fd: &FieldDesc, v: &FVector) -> Result<FVector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.dim(),
            });
        }
        Ok(FVector::new(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.coords())
                        .fold(Felt::ZERO, |acc, (&a, &b)| fd.add(acc, fd.mul(a, b)))
                })
                .collect(),
        ))
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self, fd: &FieldDesc) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(piv) = (rank..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, piv);
            let inv = fd.inv(m[(rank, col)]).expect("pivot is nonzero");
            for r in 0..m.rows {
                if r != rank && !m[(r, col)].is_zero() {
                    let factor = fd.mul(m[(r, col)], inv);
                    for c in col..m.cols {
                        let sub = fd.mul(factor, m[(rank, c)]);
                        m[(r, c)] = fd.sub(m[(r, c)], sub);
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Determinant by fraction-free (Bareiss) elimination, pivoting on the
    /// first nonzero entry of each column.
    pub fn det(&self, fd: &FieldDesc) -> Result<Felt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Felt::ONE);
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = Felt::ONE;
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(piv) = (k + 1..n).find(|&r| !m[(r, k)].is_zero()) else {
                    return Ok(Felt::ZERO);
                };
                m.swap_rows(k, piv);
                negate = !negate;
            }
            let prev_inv = fd.inv(prev)?;
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = fd.sub(
                        fd.mul(m[(k, k)], m[(i, j)]),
                        fd.mul(m[(i, k)], m[(k, j)]),
                    );
                    m[(i, j)] = fd.mul(t, prev_inv);
                }
                m[(i, k)] = Felt::ZERO;
            }
            prev = m[(k, k)];
        }
        let d = m[(n - 1, n - 1)];
        Ok(if negate { fd.neg(d) } else { d })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Felt;

    fn index(&self, (i, j): (usize, usize)) -> &Felt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Felt {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank of a list of vectors.
pub fn rank(fd: &FieldDesc, vectors: &[FVector]) -> Result<usize> {
    Ok(Matrix::from_rows(vectors)?.rank(fd))
}
