//! The parametric `N → 2N` scaling map and its method registry.
//!
//! One level builds
//! `T_2N = P_2N · blockdiag(I, B̂) · blockdiag(T, T) · blockdiag(I, Ĝ) · butterfly`
//! with the overall `√2/2` dropped, since the final row normalization
//! removes any constant factor.

use std::fmt;
use std::str::FromStr;

use crate::catalog::{self, ApproximationEntry};
use crate::error::{Error, Result};
use crate::exact;
use crate::fastpath::{Cost, Factor, FactoredTransform};
use crate::matkit::{DyadicMatrix, Matrix, Permutation, RealMatrix, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalingMethod {
    Jam,
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    Exact,
}

impl ScalingMethod {
    pub const ALL: [ScalingMethod; 9] = [
        ScalingMethod::Jam,
        ScalingMethod::I,
        ScalingMethod::II,
        ScalingMethod::III,
        ScalingMethod::IV,
        ScalingMethod::V,
        ScalingMethod::VI,
        ScalingMethod::VII,
        ScalingMethod::Exact,
    ];

    /// The multiplierless methods, in table order.
    pub const APPROXIMATE: [ScalingMethod; 8] = [
        ScalingMethod::Jam,
        ScalingMethod::I,
        ScalingMethod::II,
        ScalingMethod::III,
        ScalingMethod::IV,
        ScalingMethod::V,
        ScalingMethod::VI,
        ScalingMethod::VII,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScalingMethod::Jam => "JAM",
            ScalingMethod::I => "I",
            ScalingMethod::II => "II",
            ScalingMethod::III => "III",
            ScalingMethod::IV => "IV",
            ScalingMethod::V => "V",
            ScalingMethod::VI => "VI",
            ScalingMethod::VII => "VII",
            ScalingMethod::Exact => "EXACT",
        }
    }

    fn b_kind(self) -> BKind {
        use ScalingMethod::*;
        match self {
            Jam | IV => BKind::Identity,
            I | V => BKind::Counter,
            II | VI => BKind::NegCounterJ,
            III | VII => BKind::NegCounterZJ,
            Exact => BKind::Exact,
        }
    }

    fn g_alternating(self) -> bool {
        use ScalingMethod::*;
        matches!(self, IV | V | VI | VII)
    }

    /// `B̂_N` as a factor.
    pub fn b_hat(self, n: usize) -> Result<Factor> {
        nonzero(n)?;
        Ok(match self.b_kind() {
            BKind::Identity => Factor::Identity(n),
            BKind::Counter => Factor::Permutation(counter_permutation(n)),
            BKind::NegCounterJ => Factor::Sparse(neg_counter_j(n)?),
            // −Ī·Z·J = (−Ī·J)·Z because Z and J are both diagonal
            BKind::NegCounterZJ => Factor::Product(vec![
                Factor::Sparse(neg_counter_j(n)?),
                Factor::Diagonal {
                    entries: exact::half_first(n).diag(),
                    folded_into_normalization: true,
                },
            ]),
            BKind::Exact => Factor::Dense(exact::b_matrix(n)?),
        })
    }

    /// `Ĝ_N` as a factor.
    pub fn g_hat(self, n: usize) -> Result<Factor> {
        nonzero(n)?;
        Ok(if self == ScalingMethod::Exact {
            Factor::Dense(exact::g_matrix(n)?)
        } else if self.g_alternating() {
            Factor::Diagonal {
                entries: exact::alternating_signs(n).diag(),
                folded_into_normalization: false,
            }
        } else {
            Factor::Identity(n)
        })
    }

    pub fn b_hat_matrix(self, n: usize) -> Result<Matrix> {
        self.b_hat(n)?.to_matrix()
    }

    pub fn g_hat_matrix(self, n: usize) -> Result<Matrix> {
        self.g_hat(n)?.to_matrix()
    }
}

impl fmt::Display for ScalingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScalingMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        ScalingMethod::ALL
            .into_iter()
            .find(|m| m.name() == upper)
            .ok_or_else(|| Error::Unknown {
                kind: "scaling method",
                name: s.to_string(),
            })
    }
}

enum BKind {
    Identity,
    Counter,
    NegCounterJ,
    NegCounterZJ,
    Exact,
}

fn nonzero(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize {
            size: 0,
            reason: "size must be at least 1",
        });
    }
    Ok(())
}

fn counter_permutation(n: usize) -> Permutation {
    Permutation::from_map((0..n).rev().collect()).expect("reversal is a bijection")
}

fn neg_counter_j(n: usize) -> Result<DyadicMatrix> {
    DyadicMatrix::counter_identity(n)
        .neg()
        .checked_mul(&exact::alternating_signs(n))
}

/// A scaled transform before and after row normalization.
#[derive(Clone, Debug)]
pub struct ScaledTransform {
    /// Low-complexity `T_2N`, exact when the input and method are dyadic.
    pub dense: Matrix,
    pub factored: FactoredTransform,
    pub sigma: RealMatrix,
    pub c_hat: RealMatrix,
}

impl ScaledTransform {
    fn finish(factored: FactoredTransform) -> Result<Self> {
        let dense = factored.dense()?;
        let o = catalog::orthogonalize(&dense)?;
        Ok(Self {
            dense,
            factored,
            sigma: o.sigma,
            c_hat: o.c_hat,
        })
    }

    pub fn size(&self) -> usize {
        self.factored.size()
    }

    pub fn cost(&self) -> Cost {
        self.factored.cost()
    }

    /// `‖Ĉ − C‖_F` against the exact DCT-II of the same size.
    pub fn frobenius_error(&self) -> Result<f64> {
        crate::matkit::frobenius_distance(&self.c_hat, &exact::dct2(self.size())?)
    }
}

/// Wraps a matrix as a factored transform whose cost is its direct cost.
pub fn input_transform(t: &Matrix) -> FactoredTransform {
    let f = match t {
        Matrix::Dyadic(m) => Factor::Sparse(m.clone()),
        Matrix::Real(m) => Factor::Dense(m.clone()),
    };
    FactoredTransform::new(vec![f]).expect("matrix has positive size")
}

/// Wraps a catalog entry with its published cost.
pub fn entry_transform(entry: &ApproximationEntry) -> FactoredTransform {
    FactoredTransform::leaf(
        entry.matrix.clone(),
        Cost::new(entry.baseline_adds, entry.baseline_shifts),
    )
}

/// One application of the scaling map, without normalization.
pub fn scale_once(t: &FactoredTransform, method: ScalingMethod) -> Result<FactoredTransform> {
    let n = t.size();
    let block = t.as_factor();
    FactoredTransform::new(vec![
        Factor::Permutation(Permutation::perfect_shuffle(n)),
        Factor::BlockDiag(vec![Factor::Identity(n), method.b_hat(n)?]),
        Factor::BlockDiag(vec![block.clone(), block]),
        Factor::BlockDiag(vec![Factor::Identity(n), method.g_hat(n)?]),
        Factor::Butterfly { half: n },
    ])
}

/// One scaling level followed by normalization.
pub fn scale(t: &Matrix, method: ScalingMethod) -> Result<ScaledTransform> {
    scale_levels(&input_transform(t), &[method])
}

/// Applies `methods[k]` at level `k`, normalizing only at the end.
pub fn scale_levels(t: &FactoredTransform, methods: &[ScalingMethod]) -> Result<ScaledTransform> {
    if methods.is_empty() {
        return Err(Error::InvalidSize {
            size: t.size(),
            reason: "at least one scaling level is required",
        });
    }
    let mut cur = t.clone();
    for &m in methods {
        cur = scale_once(&cur, m)?;
    }
    ScaledTransform::finish(cur)
}

/// Number of doublings from `n` to `target`.
pub fn levels_between(n: usize, target: usize) -> Result<usize> {
    if n == 0 || target <= n || !target.is_multiple_of(n) || !(target / n).is_power_of_two() {
        return Err(Error::InvalidSize {
            size: target,
            reason: "target must be a power-of-two multiple of the input size",
        });
    }
    Ok((target / n).trailing_zeros() as usize)
}

/// Scales `t` up to `target` points with the same method at every level.
pub fn scale_to(t: &Matrix, target: usize, method: ScalingMethod) -> Result<ScaledTransform> {
    scale_factored_to(&input_transform(t), target, method)
}

pub fn scale_factored_to(
    t: &FactoredTransform,
    target: usize,
    method: ScalingMethod,
) -> Result<ScaledTransform> {
    let levels = levels_between(t.size(), target)?;
    scale_levels(t, &vec![method; levels])
}

/// Scales a catalog entry, charging its 8-point blocks their published cost.
pub fn scale_entry(
    entry: &ApproximationEntry,
    target: usize,
    method: ScalingMethod,
) -> Result<ScaledTransform> {
    scale_factored_to(&entry_transform(entry), target, method)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrthogonalityReport {
    /// `T·Tᵀ` is diagonal.
    pub cond_i: bool,
    /// `Ĝ·Ĝᵀ` is a scalar multiple of the identity.
    pub cond_ii: bool,
    /// `B̂` is a generalized permutation.
    pub cond_iii: bool,
    /// All three hold, which is sufficient for an orthogonal result.
    pub orthogonal: bool,
}

pub fn check_orthogonality(t: &Matrix, method: ScalingMethod) -> Result<OrthogonalityReport> {
    let n = t.n();
    let cond_i = match t {
        Matrix::Dyadic(m) => m.gram()?.is_diagonal(),
        Matrix::Real(m) => m.gram().is_diagonal(DEFAULT_TOL),
    };
    let g = method.g_hat_matrix(n)?.to_real();
    let gg = g.gram();
    let a = gg.get(0, 0);
    let cond_ii = a > 0.0
        && gg
            .max_abs_diff(&RealMatrix::identity(n).scale(a))
            .map(|e| e <= DEFAULT_TOL)
            .unwrap_or(false);
    let cond_iii = method.b_hat_matrix(n)?.is_generalized_permutation();
    Ok(OrthogonalityReport {
        cond_i,
        cond_ii,
        cond_iii,
        orthogonal: cond_i && cond_ii && cond_iii,
    })
}
