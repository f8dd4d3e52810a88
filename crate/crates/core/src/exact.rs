//! Exact transform matrices, the structural factors used by the 2N-point
//! factorization, and numerical verification of the identities tying them
//! together.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matkit::{DyadicMatrix, DyadicRational, Matrix, Permutation, RealMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Dct2,
    Dct4,
    Dst4,
}

impl FromStr for TransformKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dct2" | "dct-ii" => Ok(Self::Dct2),
            "dct4" | "dct-iv" => Ok(Self::Dct4),
            "dst4" | "dst-iv" => Ok(Self::Dst4),
            _ => Err(Error::Unknown {
                kind: "transform",
                name: s.to_string(),
            }),
        }
    }
}

fn require_nonzero(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidSize {
            size: 0,
            reason: "size must be at least 1",
        })
    } else {
        Ok(())
    }
}

/// Orthonormal `n`-point DCT-II, DCT-IV or DST-IV matrix.
pub fn transform_matrix(kind: TransformKind, n: usize) -> Result<RealMatrix> {
    require_nonzero(n)?;
    let norm = (2.0 / n as f64).sqrt();
    let nf = n as f64;
    let m = match kind {
        TransformKind::Dct2 => RealMatrix::from_fn(n, |k, i| {
            let beta = if k == 0 { FRAC_1_SQRT_2 } else { 1.0 };
            norm * beta * ((k * (2 * i + 1)) as f64 * PI / (2.0 * nf)).cos()
        }),
        TransformKind::Dct4 => RealMatrix::from_fn(n, |k, i| {
            norm * (((2 * k + 1) * (2 * i + 1)) as f64 * PI / (4.0 * nf)).cos()
        }),
        TransformKind::Dst4 => RealMatrix::from_fn(n, |k, i| {
            norm * (((2 * k + 1) * (2 * i + 1)) as f64 * PI / (4.0 * nf)).sin()
        }),
    };
    Ok(m)
}

pub fn dct2(n: usize) -> Result<RealMatrix> {
    transform_matrix(TransformKind::Dct2, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StructuralKind {
    /// `diag((-1)^n)`
    J,
    /// Counter-identity.
    IBar,
    /// `diag(1/2, 1, …, 1)`
    Z,
    A,
    D,
    B,
    G,
    PerfectShuffle,
    BitReversal,
    /// `[[I, Ī], [Ī, -I]]` of size `2N`.
    Butterfly,
}

impl FromStr for StructuralKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "J" | "j" => Self::J,
            "Ibar" | "ibar" | "IBAR" => Self::IBar,
            "Z" | "z" => Self::Z,
            "A" | "a" => Self::A,
            "D" | "d" => Self::D,
            "B" | "b" => Self::B,
            "G" | "g" => Self::G,
            "shuffle" | "perfect-shuffle" | "P" => Self::PerfectShuffle,
            "bitrev" | "bit-reversal" | "R" => Self::BitReversal,
            "butterfly" => Self::Butterfly,
            _ => {
                return Err(Error::Unknown {
                    kind: "structural matrix",
                    name: s.to_string(),
                })
            }
        })
    }
}

pub fn alternating_signs(n: usize) -> DyadicMatrix {
    let d: Vec<_> = (0..n)
        .map(|i| if i % 2 == 0 { DyadicRational::ONE } else { DyadicRational::NEG_ONE })
        .collect();
    DyadicMatrix::diagonal(&d)
}

pub fn counter_identity(n: usize) -> DyadicMatrix {
    DyadicMatrix::counter_identity(n)
}

pub fn half_first(n: usize) -> DyadicMatrix {
    let d: Vec<_> = (0..n)
        .map(|i| if i == 0 { DyadicRational::HALF } else { DyadicRational::ONE })
        .collect();
    DyadicMatrix::diagonal(&d)
}

/// Butterfly of size `2 * half`.
pub fn butterfly(half: usize) -> DyadicMatrix {
    let i = DyadicMatrix::identity(half);
    let ibar = DyadicMatrix::counter_identity(half);
    let n = 2 * half;
    DyadicMatrix::from_fn(n, |r, c| {
        let (br, bc) = (r / half.max(1), c / half.max(1));
        let (rr, cc) = (r % half.max(1), c % half.max(1));
        match (br, bc) {
            (0, 0) => i.get(rr, cc),
            (0, 1) | (1, 0) => ibar.get(rr, cc),
            _ => -i.get(rr, cc),
        }
    })
}

/// Lower-triangular part of `u_N · [√2/2, u_{N-1}ᵀ]`: ones below and on the
/// diagonal, except the first column which holds √2/2.
fn tril_u(n: usize) -> RealMatrix {
    RealMatrix::from_fn(n, |i, j| match (j <= i, j == 0) {
        (false, _) => 0.0,
        (true, true) => FRAC_1_SQRT_2,
        (true, false) => 1.0,
    })
}

/// `A_N = J · tril(U_N) · J`
pub fn a_matrix(n: usize) -> Result<RealMatrix> {
    require_nonzero(n)?;
    let j = alternating_signs(n).to_real();
    RealMatrix::product([&j, &tril_u(n), &j])
}

/// `D_N = diag(2 cos((2n+1)π / 4N))`
pub fn d_matrix(n: usize) -> Result<RealMatrix> {
    require_nonzero(n)?;
    let d: Vec<f64> = (0..n)
        .map(|i| 2.0 * ((2 * i + 1) as f64 * PI / (4.0 * n as f64)).cos())
        .collect();
    Ok(RealMatrix::diagonal(&d))
}

/// `B_N = -Ī · tril(U_N) · J`
pub fn b_matrix(n: usize) -> Result<RealMatrix> {
    require_nonzero(n)?;
    let ibar = counter_identity(n).to_real().scale(-1.0);
    let j = alternating_signs(n).to_real();
    RealMatrix::product([&ibar, &tril_u(n), &j])
}

/// `G_N = diag(2 (-1)^n cos((2n+1)π / 4N))`
pub fn g_matrix(n: usize) -> Result<RealMatrix> {
    require_nonzero(n)?;
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * 2.0 * ((2 * i + 1) as f64 * PI / (4.0 * n as f64)).cos()
        })
        .collect();
    Ok(RealMatrix::diagonal(&d))
}

/// Generates the named structural matrix. For `PerfectShuffle` and
/// `Butterfly`, `n` is the half size and the result is `2n × 2n`.
pub fn structural_matrix(kind: StructuralKind, n: usize) -> Result<Matrix> {
    require_nonzero(n)?;
    Ok(match kind {
        StructuralKind::J => alternating_signs(n).into(),
        StructuralKind::IBar => counter_identity(n).into(),
        StructuralKind::Z => half_first(n).into(),
        StructuralKind::A => a_matrix(n)?.into(),
        StructuralKind::D => d_matrix(n)?.into(),
        StructuralKind::B => b_matrix(n)?.into(),
        StructuralKind::G => g_matrix(n)?.into(),
        StructuralKind::PerfectShuffle => Permutation::perfect_shuffle(n).to_dyadic().into(),
        StructuralKind::BitReversal => Permutation::bit_reversal(n)?.to_dyadic().into(),
        StructuralKind::Butterfly => butterfly(n).into(),
    })
}

/// The identities used to derive the 2N-point factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `S⁴_N = Ī · C⁴_N · J`
    Dst4FromDct4,
    /// `C⁴_N · Ī = J · S⁴_N`
    Dct4CounterIdentity,
    /// `C⁴_N = A_N · C²_N · D_N`
    Dct4FromDct2,
    /// `C²_2N = √2/2 · P · blockdiag(C²_N, C⁴_N · Ī) · butterfly`
    ChenSimplified,
    /// `P_2N = R_2N · blockdiag(R_N, R_N)`
    ShuffleBitReversal,
    /// `C²_2N = √2/2 · P · blockdiag(C²_N, J · S⁴_N) · butterfly`
    OddEvenScaling,
    /// `C²_2N = √2/2 · P · blockdiag(I, B) · blockdiag(C²_N, C²_N) · blockdiag(I, G) · butterfly`
    Prop1Factorization,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::Dst4FromDct4,
        Identity::Dct4CounterIdentity,
        Identity::Dct4FromDct2,
        Identity::ChenSimplified,
        Identity::ShuffleBitReversal,
        Identity::OddEvenScaling,
        Identity::Prop1Factorization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Dst4FromDct4 => "dst4-from-dct4",
            Identity::Dct4CounterIdentity => "dct4-counter-identity",
            Identity::Dct4FromDct2 => "dct4-from-dct2",
            Identity::ChenSimplified => "chen-simplified",
            Identity::ShuffleBitReversal => "shuffle-bitrev",
            Identity::OddEvenScaling => "odd-even-scaling",
            Identity::Prop1Factorization => "prop1-factorization",
        }
    }

    /// Whether `n` is a valid size for this identity.
    pub fn accepts(self, n: usize) -> bool {
        match self {
            _ if n == 0 => false,
            Identity::ShuffleBitReversal => n.is_power_of_two(),
            // J·Ī = -Ī·J only for even N
            Identity::Prop1Factorization => n.is_multiple_of(2),
            _ => true,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "identity",
                name: s.to_string(),
            })
    }
}

/// Maximum absolute entrywise residual between both sides of `id`.
///
/// `n` is the transform size for single-size identities and the half size
/// `N` for identities relating `2N`-point and `N`-point matrices.
pub fn verify_identity(id: Identity, n: usize) -> Result<f64> {
    if !id.accepts(n) {
        return Err(Error::InvalidSize {
            size: n,
            reason: match id {
                Identity::ShuffleBitReversal => "bit reversal needs a power of two",
                Identity::Prop1Factorization => "factorization holds for even N only",
                _ => "size must be at least 1",
            },
        });
    }
    let c2 = || transform_matrix(TransformKind::Dct2, n);
    let c4 = || transform_matrix(TransformKind::Dct4, n);
    let s4 = || transform_matrix(TransformKind::Dst4, n);
    let j = alternating_signs(n).to_real();
    let ibar = counter_identity(n).to_real();
    let shuffle = Permutation::perfect_shuffle(n).to_real();
    let bfly = butterfly(n).to_real();
    let half = FRAC_1_SQRT_2;

    match id {
        Identity::Dst4FromDct4 => {
            let rhs = RealMatrix::product([&ibar, &c4()?, &j])?;
            s4()?.max_abs_diff(&rhs)
        }
        Identity::Dct4CounterIdentity => {
            let lhs = c4()?.matmul(&ibar)?;
            lhs.max_abs_diff(&j.matmul(&s4()?)?)
        }
        Identity::Dct4FromDct2 => {
            let rhs = RealMatrix::product([&a_matrix(n)?, &c2()?, &d_matrix(n)?])?;
            c4()?.max_abs_diff(&rhs)
        }
        Identity::ChenSimplified => {
            let lower = c4()?.matmul(&ibar)?;
            let mid = RealMatrix::block_diag(&[&c2()?, &lower]);
            let rhs = RealMatrix::product([&shuffle, &mid, &bfly])?.scale(half);
            dct2(2 * n)?.max_abs_diff(&rhs)
        }
        Identity::ShuffleBitReversal => {
            let r = Permutation::bit_reversal(n)?;
            let rhs = Permutation::bit_reversal(2 * n)?.compose(&r.direct_sum(&r))?;
            let lhs = Permutation::perfect_shuffle(n);
            // integer comparison of the two permutation matrices
            let diff = lhs
                .map()
                .iter()
                .zip(rhs.map())
                .filter(|(a, b)| a != b)
                .count();
            Ok(if diff == 0 { 0.0 } else { 1.0 })
        }
        Identity::OddEvenScaling => {
            let lower = j.matmul(&s4()?)?;
            let mid = RealMatrix::block_diag(&[&c2()?, &lower]);
            let rhs = RealMatrix::product([&shuffle, &mid, &bfly])?.scale(half);
            dct2(2 * n)?.max_abs_diff(&rhs)
        }
        Identity::Prop1Factorization => {
            let eye = RealMatrix::identity(n);
            let c = c2()?;
            let rhs = RealMatrix::product([
                &shuffle,
                &RealMatrix::block_diag(&[&eye, &b_matrix(n)?]),
                &RealMatrix::block_diag(&[&c, &c]),
                &RealMatrix::block_diag(&[&eye, &g_matrix(n)?]),
                &bfly,
            ])?
            .scale(half);
            dct2(2 * n)?.max_abs_diff(&rhs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn dct2_small_sizes() {
        let c1 = dct2(1).unwrap();
        assert!((c1.get(0, 0) - 1.0).abs() < 1e-15);
        let c2 = dct2(2).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = RealMatrix::from_rows(&[vec![h, h], vec![h, -h]]).unwrap();
        assert!(c2.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn zero_size_rejected() {
        assert!(transform_matrix(TransformKind::Dct4, 0).is_err());
        assert!(structural_matrix(StructuralKind::G, 0).is_err());
    }

    #[test]
    fn all_transforms_orthonormal() {
        for kind in [TransformKind::Dct2, TransformKind::Dct4, TransformKind::Dst4] {
            for n in 1..=64 {
                let m = transform_matrix(kind, n).unwrap();
                let err = m.gram().max_abs_diff(&RealMatrix::identity(n)).unwrap();
                assert!(err < 1e-12, "{kind:?} n={n}: {err}");
            }
        }
    }

    #[test]
    fn dst4_from_dct4_at_eight() {
        assert!(verify_identity(Identity::Dst4FromDct4, 8).unwrap() < 1e-12);
    }

    #[test]
    fn shuffle_map_at_two() {
        let p = structural_matrix(StructuralKind::PerfectShuffle, 2).unwrap();
        let expected = Permutation::from_map(vec![0, 2, 1, 3]).unwrap().to_dyadic();
        assert_eq!(p.as_dyadic().unwrap(), &expected);
    }

    #[test]
    fn b_at_two() {
        let b = b_matrix(2).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = RealMatrix::from_rows(&[vec![-h, 1.0], vec![-h, 0.0]]).unwrap();
        assert!(b.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn g_at_one() {
        assert!((g_matrix(1).unwrap().get(0, 0) - SQRT_2).abs() < 1e-15);
        let _ = FRAC_1_SQRT_2;
    }

    #[test]
    fn b_structure() {
        for n in [2, 4, 8, 16] {
            let b = b_matrix(n).unwrap();
            for i in 0..n {
                assert!((b.get(i, 0) + FRAC_1_SQRT_2).abs() < 1e-15);
                // anti-lower-triangular: row i has n - i nonzeros
                let nz = b.row(i).iter().filter(|v| **v != 0.0).count();
                assert_eq!(nz, n - i);
            }
            assert!(!Matrix::Real(b).is_generalized_permutation());
        }
    }

    #[test]
    fn g_entries() {
        for n in [1, 2, 4, 8, 32] {
            let g = g_matrix(n).unwrap();
            for i in 0..n {
                let v = g.get(i, i);
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(v.signum(), sign);
                // 2cos(θ) for θ ∈ (0, π/2)
                assert!(v.abs() < 2.0 && v.abs() > 0.0);
            }
        }
    }

    #[test]
    fn b_equals_j_ibar_a() {
        for n in [2, 4, 8, 16] {
            let j = alternating_signs(n).to_real();
            let ibar = counter_identity(n).to_real();
            let rhs = RealMatrix::product([&j, &ibar, &a_matrix(n).unwrap()]).unwrap();
            assert!(b_matrix(n).unwrap().max_abs_diff(&rhs).unwrap() < 1e-15);
        }
    }

    #[test]
    fn dct4_counter_identity_through_b_and_g() {
        for n in [2, 4, 8, 16, 32] {
            let lhs = transform_matrix(TransformKind::Dct4, n)
                .unwrap()
                .matmul(&counter_identity(n).to_real())
                .unwrap();
            let rhs = RealMatrix::product([
                &b_matrix(n).unwrap(),
                &dct2(n).unwrap(),
                &g_matrix(n).unwrap(),
            ])
            .unwrap();
            assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn all_identities_small_powers_of_two() {
        for id in Identity::ALL {
            for n in [2, 4, 8, 16, 32] {
                let r = verify_identity(id, n).unwrap();
                assert!(r <= 1e-10, "{id} n={n}: {r}");
            }
        }
        assert_eq!(verify_identity(Identity::ShuffleBitReversal, 8).unwrap(), 0.0);
    }

    #[test]
    fn prop1_fails_for_odd_sizes() {
        assert!(verify_identity(Identity::Prop1Factorization, 3).is_err());
        assert!(verify_identity(Identity::ShuffleBitReversal, 6).is_err());
        // non power-of-two sizes are fine for the other identities
        assert!(verify_identity(Identity::ChenSimplified, 6).unwrap() < 1e-12);
    }

    #[test]
    fn unknown_identity_name() {
        assert!("nope".parse::<Identity>().is_err());
        for id in Identity::ALL {
            assert_eq!(id.name().parse::<Identity>().unwrap(), id);
        }
    }
}
