use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::real::RealMatrix;
use crate::error::{Error, Result};

/// Numerators are kept strictly below 2^62 in magnitude.
const MAX_NUMERATOR: i64 = 1 << 62;
const MAX_SHIFT: u32 = 62;

/// `numerator / 2^shift`, canonical (odd numerator, or zero with zero shift).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct DyadicRational {
    numerator: i64,
    shift: u32,
}

impl DyadicRational {
    pub const ZERO: Self = Self {
        numerator: 0,
        shift: 0,
    };
    pub const ONE: Self = Self {
        numerator: 1,
        shift: 0,
    };
    pub const NEG_ONE: Self = Self {
        numerator: -1,
        shift: 0,
    };
    pub const HALF: Self = Self {
        numerator: 1,
        shift: 1,
    };
    pub const TWO: Self = Self {
        numerator: 2,
        shift: 0,
    };

    pub fn new(numerator: i64, shift: u32) -> Result<Self> {
        if numerator.unsigned_abs() >= MAX_NUMERATOR as u64 {
            return Err(Error::Overflow);
        }
        let (mut num, mut sh) = (numerator, shift);
        if num == 0 {
            return Ok(Self::ZERO);
        }
        let tz = num.trailing_zeros().min(sh);
        num >>= tz;
        sh -= tz;
        if sh > MAX_SHIFT {
            return Err(Error::Overflow);
        }
        Ok(Self {
            numerator: num,
            shift: sh,
        })
    }

    pub fn integer(v: i64) -> Result<Self> {
        Self::new(v, 0)
    }

    /// Exact conversion when `x` is a dyadic rational with shift ≤ 62.
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let mut v = x;
        for shift in 0..=MAX_SHIFT {
            if v.fract() == 0.0 {
                if v.abs() >= MAX_NUMERATOR as f64 {
                    return None;
                }
                return Self::new(v as i64, shift).ok();
            }
            v *= 2.0;
        }
        None
    }

    #[inline]
    pub fn numerator(self) -> i64 {
        self.numerator
    }

    #[inline]
    pub fn shift(self) -> u32 {
        self.shift
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.numerator == 0
    }

    /// `|value| == 1`
    #[inline]
    pub fn is_unit(self) -> bool {
        self.shift == 0 && self.numerator.abs() == 1
    }

    /// Free under shift-add cost accounting: 0 or ±1.
    #[inline]
    pub fn is_trivial(self) -> bool {
        self.is_zero() || self.is_unit()
    }

    /// True for `±2^k`, i.e. a single shift.
    pub fn is_signed_power_of_two(self) -> bool {
        self.numerator != 0 && self.numerator.unsigned_abs().is_power_of_two()
    }

    pub fn to_f64(self) -> f64 {
        // exact for |numerator| < 2^53
        self.numerator as f64 * 2f64.powi(-(self.shift as i32))
    }

    pub fn abs(self) -> Self {
        Self {
            numerator: self.numerator.abs(),
            shift: self.shift,
        }
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        let shift = self.shift.max(rhs.shift);
        let a = align(self.numerator, shift - self.shift)?;
        let b = align(rhs.numerator, shift - rhs.shift)?;
        Self::new(a.checked_add(b).ok_or(Error::Overflow)?, shift)
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.checked_add(-rhs)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        let num = self
            .numerator
            .checked_mul(rhs.numerator)
            .ok_or(Error::Overflow)?;
        Self::new(num, self.shift + rhs.shift)
    }
}

fn align(num: i64, by: u32) -> Result<i64> {
    if by >= 63 {
        return if num == 0 { Ok(0) } else { Err(Error::Overflow) };
    }
    num.checked_mul(1i64 << by).ok_or(Error::Overflow)
}

impl std::ops::Neg for DyadicRational {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            numerator: -self.numerator,
            shift: self.shift,
        }
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, 1u64 << self.shift)
        }
    }
}

impl FromStr for DyadicRational {
    type Err = Error;

    /// Accepts `p`, `p/q` with `q` a power of two, or `p/2^k`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid dyadic literal `{s}`"));
        let s = s.trim();
        match s.split_once('/') {
            None => Self::integer(s.parse().map_err(|_| bad())?),
            Some((num, den)) => {
                let num: i64 = num.trim().parse().map_err(|_| bad())?;
                let den = den.trim();
                let shift = if let Some(k) = den.strip_prefix("2^") {
                    k.parse::<u32>().map_err(|_| bad())?
                } else {
                    let q: u64 = den.parse().map_err(|_| bad())?;
                    if !q.is_power_of_two() {
                        return Err(bad());
                    }
                    q.trailing_zeros()
                };
                Self::new(num, shift)
            }
        }
    }
}

impl From<DyadicRational> for String {
    fn from(v: DyadicRational) -> Self {
        v.to_string()
    }
}

impl TryFrom<String> for DyadicRational {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Square matrix of dyadic rationals; every product is exact or an error.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicMatrix {
    n: usize,
    entries: Vec<DyadicRational>,
}

impl DyadicMatrix {
    pub fn from_rows(rows: Vec<Vec<DyadicRational>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| DyadicRational::integer(v)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::from_rows(rows)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> DyadicRational) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    /// Exact conversion; fails if any entry is not dyadic.
    pub fn try_from_real(m: &RealMatrix) -> Result<Self> {
        let entries = m
            .as_slice()
            .iter()
            .map(|&v| DyadicRational::from_f64_exact(v).ok_or(Error::NotDyadic("non-dyadic entry")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: m.n(), entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| DyadicRational::ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![DyadicRational::ONE; n])
    }

    /// Ones on the anti-diagonal.
    pub fn counter_identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| {
            if i + j + 1 == n {
                DyadicRational::ONE
            } else {
                DyadicRational::ZERO
            }
        })
    }

    pub fn diagonal(d: &[DyadicRational]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { DyadicRational::ZERO })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> DyadicRational {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[DyadicRational] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[DyadicRational]> {
        self.entries.chunks(self.n.max(1))
    }

    pub fn entries(&self) -> &[DyadicRational] {
        &self.entries
    }

    pub fn diag(&self) -> Vec<DyadicRational> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|&v| -v).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        let n = self.n;
        let mut entries = vec![DyadicRational::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let e = &mut entries[i * n + j];
                    *e = e.checked_add(a.checked_mul(b)?)?;
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn product<'a>(factors: impl IntoIterator<Item = &'a DyadicMatrix>) -> Result<Self> {
        let mut iter = factors.into_iter();
        let first = iter
            .next()
            .ok_or(Error::InvalidSize {
                size: 0,
                reason: "empty product",
            })?
            .clone();
        iter.try_fold(first, |acc, m| acc.checked_mul(m))
    }

    pub fn gram(&self) -> Result<Self> {
        self.checked_mul(&self.transpose())
    }

    pub fn block_diag(blocks: &[&DyadicMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut entries = vec![DyadicRational::ZERO; n * n];
        let mut off = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    entries[(off + i) * n + off + j] = b.get(i, j);
                }
            }
            off += b.n;
        }
        Self { n, entries }
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix::from_fn(self.n, |i, j| self.get(i, j).to_f64())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Exactly one nonzero entry per row and per column.
    pub fn is_generalized_permutation(&self) -> bool {
        (0..self.n).all(|i| self.row(i).iter().filter(|v| !v.is_zero()).count() == 1)
            && (0..self.n).all(|j| (0..self.n).filter(|&i| !self.get(i, j).is_zero()).count() == 1)
    }

    pub fn max_shift(&self) -> u32 {
        self.entries.iter().map(|v| v.shift()).max().unwrap_or(0)
    }

    pub fn mul_vec(&self, x: &[DyadicRational]) -> Result<Vec<DyadicRational>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        self.rows()
            .map(|r| {
                r.iter().zip(x).try_fold(DyadicRational::ZERO, |acc, (a, b)| {
                    if a.is_zero() || b.is_zero() {
                        Ok(acc)
                    } else {
                        acc.checked_add(a.checked_mul(*b)?)
                    }
                })
            })
            .collect()
    }

    /// Parses the catalog text format: a size line, then `n` rows of `n`
    /// dyadic literals. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("missing size line".into()))?
            .parse()
            .map_err(|_| Error::Parse("size line is not an integer".into()))?;
        let rows = lines
            .map(|l| {
                l.split_whitespace()
                    .map(str::parse)
                    .collect::<Result<Vec<DyadicRational>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != n {
            return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
        }
        Self::from_rows(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>5}")).collect();
            out.push_str(cells.join(" ").trim_start());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> DyadicRational {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form() {
        let v = DyadicRational::new(4, 3).unwrap();
        assert_eq!((v.numerator(), v.shift()), (1, 1));
        let z = DyadicRational::new(0, 7).unwrap();
        assert_eq!((z.numerator(), z.shift()), (0, 0));
        let big = DyadicRational::new(12, 0).unwrap();
        assert_eq!((big.numerator(), big.shift()), (12, 0));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(d("1/2"), DyadicRational::HALF);
        assert_eq!(d("-2"), DyadicRational::new(-2, 0).unwrap());
        assert_eq!(d("3/2^3").to_string(), "3/8");
        assert_eq!(d("2/4"), DyadicRational::HALF);
        assert!("1/3".parse::<DyadicRational>().is_err());
        assert!("x".parse::<DyadicRational>().is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(d("1/2").checked_add(d("1/4")).unwrap(), d("3/4"));
        assert_eq!(d("1/2").checked_mul(d("-2")).unwrap(), DyadicRational::NEG_ONE);
        assert_eq!(d("3/8").checked_sub(d("3/8")).unwrap(), DyadicRational::ZERO);
    }

    #[test]
    fn overflow_is_an_error() {
        let big = DyadicRational::integer(1 << 40).unwrap();
        assert_eq!(big.checked_mul(big), Err(Error::Overflow));
        assert_eq!(DyadicRational::integer(i64::MAX), Err(Error::Overflow));
    }

    #[test]
    fn trivial_and_shift_entries() {
        assert!(DyadicRational::NEG_ONE.is_trivial());
        assert!(DyadicRational::ZERO.is_trivial());
        assert!(!DyadicRational::HALF.is_trivial());
        assert!(DyadicRational::TWO.is_signed_power_of_two());
    }

    #[test]
    fn parse_matrix_with_comments() {
        let m = DyadicMatrix::parse("# header\n2\n1 1/2 # row\n-2 0\n").unwrap();
        assert_eq!(m.get(0, 1), DyadicRational::HALF);
        assert_eq!(m.get(1, 0), d("-2"));
        assert!(DyadicMatrix::parse("2\n1 1\n").is_err());
        assert!(DyadicMatrix::parse("2\n1 1\n1\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = DyadicMatrix::parse("2\n1 -1/2\n2 0\n").unwrap();
        assert_eq!(DyadicMatrix::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn counter_identity_is_generalized_permutation() {
        assert!(DyadicMatrix::counter_identity(8).is_generalized_permutation());
        let full = DyadicMatrix::from_fn(3, |_, _| DyadicRational::ONE);
        assert!(!full.is_generalized_permutation());
    }
}
