use crate::error::{Error, Result};

/// Dense square matrix of `f64`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n.max(1),
                col: pos % n.max(1),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(n, data)
    }

    /// Builds a matrix from an entry generator.
    ///
    /// Panics if the generator yields a non-finite value; generators in this
    /// crate are closed-form trigonometric expressions.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
                data.push(v);
            }
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { 0.0 })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out = &mut data[i * n..(i + 1) * n];
                for (o, b) in out.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Left-to-right product of a chain of equally sized matrices.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a RealMatrix>) -> Result<Self> {
        let mut iter = factors.into_iter();
        let first = iter
            .next()
            .ok_or(Error::InvalidSize {
                size: 0,
                reason: "empty product",
            })?
            .clone();
        iter.try_fold(first, |acc, m| acc.matmul(m))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(self
            .rows()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self · selfᵀ`
    pub fn gram(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b).sum();
                out.data[i * n + j] = v;
                out.data[j * n + i] = v;
            }
        }
        out
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self::from_fn(self.n, |i, j| alpha * self.get(i, j))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_fn(self.n, |i, j| self.get(i, j) - other.get(i, j)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_fn(self.n, |i, j| self.get(i, j) + other.get(i, j)))
    }

    /// Multiplies row `i` by `factors[i]` (left multiplication by a diagonal).
    pub fn scale_rows(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: factors.len(),
            });
        }
        Ok(Self::from_fn(self.n, |i, j| factors[i] * self.get(i, j)))
    }

    pub fn block_diag(blocks: &[&RealMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut out = Self::zeros(n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    out.data[(off + i) * n + off + j] = b.get(i, j);
                }
            }
            off += b.n;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).abs() <= tol))
    }

    /// Exactly one entry per row and per column with magnitude above `tol`.
    pub fn is_generalized_permutation(&self, tol: f64) -> bool {
        let nz = |i: usize, j: usize| self.get(i, j).abs() > tol;
        (0..self.n).all(|i| (0..self.n).filter(|&j| nz(i, j)).count() == 1)
            && (0..self.n).all(|j| (0..self.n).filter(|&i| nz(i, j)).count() == 1)
    }

    /// Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        let tol = 1e-13 * self.max_abs().max(1.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
                .expect("non-empty pivot range");
            if a[pivot * n + col].abs() <= tol {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= p;
                inv[col * n + j] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[col * n + j];
                    inv[r * n + j] -= f * inv[col * n + j];
                }
            }
        }
        Self::from_vec(n, inv).map_err(|_| Error::Singular)
    }
}

/// `sqrt(Σ (a_ij − b_ij)²)`
pub fn frobenius_distance(a: &RealMatrix, b: &RealMatrix) -> Result<f64> {
    Ok(a.sub(b)?.frobenius_norm())
}

pub fn is_diagonal(m: &RealMatrix, tol: f64) -> bool {
    m.is_diagonal(tol)
}

/// `sqrt(diag(m⁻¹))` as a diagonal matrix.
///
/// The full inverse is formed first, so for a non-diagonal `m` this is not
/// the same as `diag(m)^(-1/2)`.
pub fn diag_inv_sqrt(m: &RealMatrix) -> Result<RealMatrix> {
    let inv = m.inverse()?;
    let mut d = Vec::with_capacity(m.n());
    for (k, v) in inv.diag().into_iter().enumerate() {
        if v <= 0.0 {
            return Err(Error::NonPositiveDiagonal { index: k, value: v });
        }
        d.push(v.sqrt());
    }
    Ok(RealMatrix::diagonal(&d))
}
