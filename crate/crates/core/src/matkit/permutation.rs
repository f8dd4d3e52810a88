use super::dyadic::{DyadicMatrix, DyadicRational};
use super::real::RealMatrix;
use crate::error::{Error, Result};

/// Permutation matrix stored as `map[n]` = row of the unit entry in column `n`.
///
/// Applied to a vector this sends `x[n]` to position `map[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &p in &map {
            if p >= map.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation);
            }
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    /// Perfect shuffle of size `2 * half`: even outputs take the first half
    /// of the input, odd outputs the second half.
    pub fn perfect_shuffle(half: usize) -> Self {
        let size = 2 * half;
        let map = (0..size)
            .map(|n| if n < half { 2 * n } else { (2 * n) % size + 1 })
            .collect();
        Self { map }
    }

    /// Bit-reversal ordering; `n` must be a power of two.
    pub fn bit_reversal(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidSize {
                size: n,
                reason: "bit reversal needs a power of two",
            });
        }
        let bits = n.trailing_zeros();
        let map = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Ok(Self { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Self {
            map: other.map.iter().map(|&q| self.map[q]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (n, &p) in self.map.iter().enumerate() {
            inv[p] = n;
        }
        Self { map: inv }
    }

    /// Same as `inverse`; permutation matrices are orthogonal.
    pub fn transpose(&self) -> Self {
        self.inverse()
    }

    /// `blockdiag(self, other)`
    pub fn direct_sum(&self, other: &Self) -> Self {
        let off = self.len();
        let map = self
            .map
            .iter()
            .copied()
            .chain(other.map.iter().map(|&p| p + off))
            .collect();
        Self { map }
    }

    pub fn apply<T: Clone>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: x.len(),
            });
        }
        let mut out = x.to_vec();
        for (n, v) in x.iter().enumerate() {
            out[self.map[n]] = v.clone();
        }
        Ok(out)
    }

    pub fn to_dyadic(&self) -> DyadicMatrix {
        DyadicMatrix::from_fn(self.len(), |i, j| {
            if self.map[j] == i {
                DyadicRational::ONE
            } else {
                DyadicRational::ZERO
            }
        })
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix::from_fn(self.len(), |i, j| if self.map[j] == i { 1.0 } else { 0.0 })
    }
}
