//! Factored transforms: multiplierless application and addition/shift
//! cost accounting.

use std::ops::{Add, AddAssign};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matkit::{DyadicMatrix, DyadicRational, Matrix, Permutation, RealMatrix};

/// Arithmetic cost. `multiplications` counts non-dyadic products and is
/// zero for every multiplierless factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Cost {
    pub adds: u64,
    pub shifts: u64,
    pub multiplications: u64,
}

impl Cost {
    pub const ZERO: Cost = Cost {
        adds: 0,
        shifts: 0,
        multiplications: 0,
    };

    pub fn new(adds: u64, shifts: u64) -> Self {
        Self {
            adds,
            shifts,
            multiplications: 0,
        }
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost {
            adds: self.adds + rhs.adds,
            shifts: self.shifts + rhs.shifts,
            multiplications: self.multiplications + rhs.multiplications,
        }
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

/// Direct row-by-row cost of a dyadic matrix: `nonzeros − 1` additions per
/// row and one shift per entry of magnitude other than 0 or 1.
pub fn count_dense_dyadic(m: &DyadicMatrix) -> Cost {
    let adds = m
        .rows()
        .map(|r| r.iter().filter(|v| !v.is_zero()).count().saturating_sub(1) as u64)
        .sum();
    let shifts = m.entries().iter().filter(|v| !v.is_trivial()).count() as u64;
    Cost::new(adds, shifts)
}

fn count_dense_real(m: &RealMatrix) -> Cost {
    let adds = m
        .rows()
        .map(|r| r.iter().filter(|v| **v != 0.0).count().saturating_sub(1) as u64)
        .sum();
    let mut cost = Cost::new(adds, 0);
    for v in m.as_slice() {
        match DyadicRational::from_f64_exact(*v) {
            Some(d) if d.is_trivial() => {}
            Some(d) if d.is_signed_power_of_two() => cost.shifts += 1,
            _ => cost.multiplications += 1,
        }
    }
    cost
}

/// One stage of a factored transform. A list of factors denotes their
/// matrix product, so the rightmost factor is applied first.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Identity(usize),
    Permutation(Permutation),
    /// Dyadic diagonal. When `folded_into_normalization` is set its shifts
    /// are charged to the final row scaling and cost nothing here.
    Diagonal {
        entries: Vec<DyadicRational>,
        folded_into_normalization: bool,
    },
    /// `[[I, Ī], [Ī, −I]]` of size `2 * half`.
    Butterfly { half: usize },
    Sparse(DyadicMatrix),
    /// Non-dyadic matrix, e.g. the exact `B_N`, `G_N` or an exact DCT input.
    Dense(RealMatrix),
    BlockDiag(Vec<Factor>),
    Product(Vec<Factor>),
    /// Block whose cost comes from a published fast algorithm rather than
    /// from its entries. Application uses `matrix`.
    Leaf { matrix: DyadicMatrix, declared: Cost },
}

impl Factor {
    pub fn size(&self) -> usize {
        match self {
            Factor::Identity(n) => *n,
            Factor::Permutation(p) => p.len(),
            Factor::Diagonal { entries, .. } => entries.len(),
            Factor::Butterfly { half } => 2 * half,
            Factor::Sparse(m) | Factor::Leaf { matrix: m, .. } => m.n(),
            Factor::Dense(m) => m.n(),
            Factor::BlockDiag(blocks) => blocks.iter().map(Factor::size).sum(),
            Factor::Product(fs) => fs.first().map_or(0, Factor::size),
        }
    }

    pub fn cost(&self) -> Cost {
        match self {
            Factor::Identity(_) | Factor::Permutation(_) => Cost::ZERO,
            Factor::Diagonal {
                entries,
                folded_into_normalization,
            } => {
                if *folded_into_normalization {
                    Cost::ZERO
                } else {
                    Cost::new(0, entries.iter().filter(|v| !v.is_trivial()).count() as u64)
                }
            }
            Factor::Butterfly { half } => Cost::new(2 * *half as u64, 0),
            Factor::Sparse(m) => count_dense_dyadic(m),
            Factor::Dense(m) => count_dense_real(m),
            Factor::BlockDiag(fs) | Factor::Product(fs) => fs.iter().map(Factor::cost).sum(),
            Factor::Leaf { declared, .. } => *declared,
        }
    }

    pub fn is_dyadic(&self) -> bool {
        match self {
            Factor::Dense(_) => false,
            Factor::BlockDiag(fs) | Factor::Product(fs) => fs.iter().all(Factor::is_dyadic),
            _ => true,
        }
    }

    /// The matrix this factor denotes, exact when every part is dyadic.
    pub fn to_matrix(&self) -> Result<Matrix> {
        Ok(match self {
            Factor::Identity(n) => DyadicMatrix::identity(*n).into(),
            Factor::Permutation(p) => p.to_dyadic().into(),
            Factor::Diagonal { entries, .. } => DyadicMatrix::diagonal(entries).into(),
            Factor::Butterfly { half } => crate::exact::butterfly(*half).into(),
            Factor::Sparse(m) | Factor::Leaf { matrix: m, .. } => m.clone().into(),
            Factor::Dense(m) => m.clone().into(),
            Factor::BlockDiag(fs) => {
                let parts = fs.iter().map(Factor::to_matrix).collect::<Result<Vec<_>>>()?;
                if parts.iter().all(Matrix::is_dyadic) {
                    let refs: Vec<&DyadicMatrix> = parts.iter().filter_map(Matrix::as_dyadic).collect();
                    DyadicMatrix::block_diag(&refs).into()
                } else {
                    let reals: Vec<RealMatrix> = parts.iter().map(Matrix::to_real).collect();
                    let refs: Vec<&RealMatrix> = reals.iter().collect();
                    RealMatrix::block_diag(&refs).into()
                }
            }
            Factor::Product(fs) => {
                let mut it = fs.iter();
                let mut acc = it
                    .next()
                    .ok_or(Error::InvalidSize {
                        size: 0,
                        reason: "empty product",
                    })?
                    .to_matrix()?;
                for f in it {
                    acc = acc.mul(&f.to_matrix()?)?;
                }
                acc
            }
        })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.size() {
            return Err(Error::DimensionMismatch {
                expected: self.size(),
                actual: len,
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok(match self {
            Factor::Identity(_) => x.to_vec(),
            Factor::Permutation(p) => p.apply(x)?,
            Factor::Diagonal { entries, .. } => {
                x.iter().zip(entries).map(|(v, d)| v * d.to_f64()).collect()
            }
            Factor::Butterfly { half } => {
                let h = *half;
                let mut y = vec![0.0; 2 * h];
                for i in 0..h {
                    y[i] = x[i] + x[2 * h - 1 - i];
                    y[h + i] = x[h - 1 - i] - x[h + i];
                }
                y
            }
            Factor::Sparse(m) | Factor::Leaf { matrix: m, .. } => m.to_real().mul_vec(x)?,
            Factor::Dense(m) => m.mul_vec(x)?,
            Factor::BlockDiag(fs) => {
                let mut y = Vec::with_capacity(x.len());
                let mut off = 0;
                for f in fs {
                    let n = f.size();
                    y.extend(f.apply(&x[off..off + n])?);
                    off += n;
                }
                y
            }
            Factor::Product(fs) => {
                let mut v = x.to_vec();
                for f in fs.iter().rev() {
                    v = f.apply(&v)?;
                }
                v
            }
        })
    }

    /// Exact application over dyadic rationals; fails on non-dyadic factors.
    pub fn apply_exact(&self, x: &[DyadicRational]) -> Result<Vec<DyadicRational>> {
        self.check_len(x.len())?;
        Ok(match self {
            Factor::Identity(_) => x.to_vec(),
            Factor::Permutation(p) => p.apply(x)?,
            Factor::Diagonal { entries, .. } => x
                .iter()
                .zip(entries)
                .map(|(v, d)| v.checked_mul(*d))
                .collect::<Result<_>>()?,
            Factor::Butterfly { half } => {
                let h = *half;
                let mut y = vec![DyadicRational::ZERO; 2 * h];
                for i in 0..h {
                    y[i] = x[i].checked_add(x[2 * h - 1 - i])?;
                    y[h + i] = x[h - 1 - i].checked_sub(x[h + i])?;
                }
                y
            }
            Factor::Sparse(m) | Factor::Leaf { matrix: m, .. } => m.mul_vec(x)?,
            Factor::Dense(_) => return Err(Error::NotDyadic("dense real factor")),
            Factor::BlockDiag(fs) => {
                let mut y = Vec::with_capacity(x.len());
                let mut off = 0;
                for f in fs {
                    let n = f.size();
                    y.extend(f.apply_exact(&x[off..off + n])?);
                    off += n;
                }
                y
            }
            Factor::Product(fs) => {
                let mut v = x.to_vec();
                for f in fs.iter().rev() {
                    v = f.apply_exact(&v)?;
                }
                v
            }
        })
    }

    pub fn describe(&self) -> Value {
        let cost = self.cost();
        let (kind, extra) = match self {
            Factor::Identity(_) => ("identity", Value::Null),
            Factor::Permutation(p) => ("permutation", json!(p.map())),
            Factor::Diagonal {
                entries,
                folded_into_normalization,
            } => (
                "diagonal",
                json!({"entries": entries, "folded_into_normalization": folded_into_normalization}),
            ),
            Factor::Butterfly { .. } => ("butterfly", Value::Null),
            Factor::Sparse(m) => ("sparse", dyadic_rows(m)),
            Factor::Dense(m) => ("dense", json!(m.to_rows())),
            Factor::BlockDiag(fs) => ("block_diag", Value::Array(fs.iter().map(Factor::describe).collect())),
            Factor::Product(fs) => ("product", Value::Array(fs.iter().map(Factor::describe).collect())),
            Factor::Leaf { matrix, .. } => ("leaf", dyadic_rows(matrix)),
        };
        let mut obj = json!({"kind": kind, "size": self.size(), "cost": cost});
        if !extra.is_null() {
            obj["payload"] = extra;
        }
        obj
    }
}

fn dyadic_rows(m: &DyadicMatrix) -> Value {
    json!(m.rows().map(|r| r.to_vec()).collect::<Vec<_>>())
}

/// A transform written as an ordered product of factors.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredTransform {
    size: usize,
    factors: Vec<Factor>,
}

impl FactoredTransform {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        let size = factors.first().map_or(0, Factor::size);
        if size == 0 {
            return Err(Error::InvalidSize {
                size: 0,
                reason: "a factored transform needs at least one nonempty factor",
            });
        }
        if let Some(f) = factors.iter().find(|f| f.size() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                actual: f.size(),
            });
        }
        Ok(Self { size, factors })
    }

    /// Wraps a single block whose cost is taken as given.
    pub fn leaf(matrix: DyadicMatrix, declared: Cost) -> Self {
        Self {
            size: matrix.n(),
            factors: vec![Factor::Leaf { matrix, declared }],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn into_factor(self) -> Factor {
        if self.factors.len() == 1 {
            self.factors.into_iter().next().expect("one factor")
        } else {
            Factor::Product(self.factors)
        }
    }

    pub fn as_factor(&self) -> Factor {
        self.clone().into_factor()
    }

    pub fn cost(&self) -> Cost {
        self.factors.iter().map(Factor::cost).sum()
    }

    pub fn is_dyadic(&self) -> bool {
        self.factors.iter().all(Factor::is_dyadic)
    }

    /// Product of the factors.
    pub fn dense(&self) -> Result<Matrix> {
        Factor::Product(self.factors.clone()).to_matrix()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut v = x.to_vec();
        if v.len() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                actual: v.len(),
            });
        }
        for f in self.factors.iter().rev() {
            v = f.apply(&v)?;
        }
        Ok(v)
    }

    pub fn apply_exact(&self, x: &[DyadicRational]) -> Result<Vec<DyadicRational>> {
        if x.len() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                actual: x.len(),
            });
        }
        let mut v = x.to_vec();
        for f in self.factors.iter().rev() {
            v = f.apply_exact(&v)?;
        }
        Ok(v)
    }

    pub fn apply_int(&self, x: &[i64]) -> Result<Vec<DyadicRational>> {
        let x = x
            .iter()
            .map(|v| DyadicRational::integer(*v))
            .collect::<Result<Vec<_>>>()?;
        self.apply_exact(&x)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "size": self.size,
            "cost": self.cost(),
            "factors": self.factors.iter().map(Factor::describe).collect::<Vec<_>>(),
        })
    }
}
