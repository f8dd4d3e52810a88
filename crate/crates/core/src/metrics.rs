//! Figures of merit for an approximate transform against the exact one.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::fastpath::Cost;
use crate::matkit::{frobenius_distance, RealMatrix};
use crate::scaler::ScaledTransform;

pub const DEFAULT_RHO: f64 = 0.95;

/// First-order Markov source with `[R_x]_ij = rho^|i−j|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignalModel {
    rho: f64,
    size: usize,
}

impl SignalModel {
    pub fn new(rho: f64, size: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::Parse(format!("correlation {rho} outside [0, 1)")));
        }
        if size == 0 {
            return Err(Error::InvalidSize {
                size,
                reason: "size must be at least 1",
            });
        }
        Ok(Self { rho, size })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn covariance(&self) -> RealMatrix {
        RealMatrix::from_fn(self.size, |i, j| self.rho.powi(i.abs_diff(j) as i32))
    }

    fn check(&self, m: &RealMatrix) -> Result<()> {
        if m.n() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                actual: m.n(),
            });
        }
        Ok(())
    }
}

/// `1 − ‖diag(M)‖² / ‖M‖²_F` with `M = Ĉ·Ĉᵀ`.
pub fn deviation_from_orthogonality(c_hat: &RealMatrix) -> Result<f64> {
    let m = c_hat.gram();
    let total: f64 = m.as_slice().iter().map(|v| v * v).sum();
    if total == 0.0 {
        return Err(Error::Singular);
    }
    let diag: f64 = m.diag().iter().map(|v| v * v).sum();
    Ok(1.0 - diag / total)
}

/// `π · ‖C − Ĉ‖_F`.
pub fn total_error_energy(c_hat: &RealMatrix, c: &RealMatrix) -> Result<f64> {
    Ok(PI * frobenius_distance(c_hat, c)?)
}

/// `(1/N) · trace((C − Ĉ)·R_x·(C − Ĉ)ᵀ)`.
pub fn mse(c_hat: &RealMatrix, c: &RealMatrix, model: &SignalModel) -> Result<f64> {
    model.check(c_hat)?;
    let d = c.sub(c_hat)?;
    let r = d.matmul(&model.covariance())?.matmul(&d.transpose())?;
    Ok(r.diag().iter().sum::<f64>() / c.n() as f64)
}

/// `10·log10 ∏ (A_k·B_k)^(−1/N)` with `A_k = [Ĉ·R_x·Ĉᵀ]_kk` and `B_k` the
/// squared norm of row `k` of `Ĉ⁻¹`.
pub fn coding_gain(c_hat: &RealMatrix, model: &SignalModel) -> Result<f64> {
    model.check(c_hat)?;
    let n = c_hat.n();
    let ry = output_covariance(c_hat, model)?;
    let inv = c_hat.inverse()?;
    let mut sum_log = 0.0;
    for (k, a) in ry.diag().into_iter().enumerate() {
        let b: f64 = inv.row(k).iter().map(|v| v * v).sum();
        sum_log += (a * b).log10();
    }
    Ok(-10.0 * sum_log / n as f64)
}

/// Percentage of `|R_Y|` mass on the diagonal, `R_Y = Ĉ·R_x·Ĉᵀ`.
pub fn transform_efficiency(c_hat: &RealMatrix, model: &SignalModel) -> Result<f64> {
    model.check(c_hat)?;
    let ry = output_covariance(c_hat, model)?;
    let diag: f64 = ry.diag().iter().map(|v| v.abs()).sum();
    let total: f64 = ry.as_slice().iter().map(|v| v.abs()).sum();
    Ok(100.0 * diag / total)
}

fn output_covariance(c_hat: &RealMatrix, model: &SignalModel) -> Result<RealMatrix> {
    c_hat.matmul(&model.covariance())?.matmul(&c_hat.transpose())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub d: f64,
    pub epsilon: f64,
    pub mse: f64,
    pub cg: f64,
    pub eta: f64,
    pub frob: f64,
    pub adds: u64,
    pub shifts: u64,
}

/// All metrics of `c_hat` against the exact DCT-II of the same size.
pub fn evaluate_matrix(c_hat: &RealMatrix, cost: Cost, rho: f64) -> Result<MetricReport> {
    let n = c_hat.n();
    let model = SignalModel::new(rho, n)?;
    let c = exact::dct2(n)?;
    Ok(MetricReport {
        d: deviation_from_orthogonality(c_hat)?,
        epsilon: total_error_energy(c_hat, &c)?,
        mse: mse(c_hat, &c, &model)?,
        cg: coding_gain(c_hat, &model)?,
        eta: transform_efficiency(c_hat, &model)?,
        frob: frobenius_distance(c_hat, &c)?,
        adds: cost.adds,
        shifts: cost.shifts,
    })
}

pub fn evaluate(st: &ScaledTransform, rho: f64) -> Result<MetricReport> {
    evaluate_matrix(&st.c_hat, st.cost(), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matkit::Permutation;
    use crate::scaler::{scale_entry, ScalingMethod};
    use proptest::prelude::*;

    fn model(n: usize) -> SignalModel {
        SignalModel::new(DEFAULT_RHO, n).unwrap()
    }

    #[test]
    fn exact_transform_is_perfect() {
        let c = exact::dct2(16).unwrap();
        assert!(deviation_from_orthogonality(&c).unwrap().abs() < 1e-14);
        assert_eq!(total_error_energy(&c, &c).unwrap(), 0.0);
        assert_eq!(mse(&c, &c, &model(16)).unwrap(), 0.0);
    }

    #[test]
    fn coding_gain_of_exact_dct8() {
        let cg = coding_gain(&exact::dct2(8).unwrap(), &model(8)).unwrap();
        assert!((cg - 8.8259).abs() < 5e-5, "{cg}");
    }

    /// Independent oracle: for orthonormal Ĉ the trace of R_Y is N, so the
    /// gain is the ratio of arithmetic to geometric mean of the output
    /// variances.
    #[test]
    fn coding_gain_matches_mean_ratio_for_orthonormal() {
        for n in [4, 8, 16, 32] {
            let c = exact::dct2(n).unwrap();
            let r = model(n).covariance();
            let vars: Vec<f64> = (0..n)
                .map(|k| {
                    let row = c.row(k);
                    (0..n)
                        .flat_map(|i| (0..n).map(move |j| (i, j)))
                        .map(|(i, j)| row[i] * r.get(i, j) * row[j])
                        .sum()
                })
                .collect();
            let am = vars.iter().sum::<f64>() / n as f64;
            let gm = vars.iter().map(|v| v.ln()).sum::<f64>() / n as f64;
            let oracle = 10.0 * (am.ln() - gm) / std::f64::consts::LN_10;
            let cg = coding_gain(&c, &model(n)).unwrap();
            assert!((cg - oracle).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn identity_efficiency_below_hundred() {
        let n = 8;
        let m = model(n);
        let eta = transform_efficiency(&RealMatrix::identity(n), &m).unwrap();
        let total: f64 = m.covariance().as_slice().iter().sum();
        assert!((eta - 100.0 * n as f64 / total).abs() < 1e-12);
        assert!(eta < 100.0);
    }

    #[test]
    fn zero_matrix_deviation_is_error() {
        assert!(deviation_from_orthogonality(&RealMatrix::zeros(3)).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(SignalModel::new(1.0, 4).is_err());
        assert!(SignalModel::new(-0.1, 4).is_err());
        assert!(SignalModel::new(0.5, 0).is_err());
        let c = exact::dct2(8).unwrap();
        assert!(mse(&c, &c, &model(4)).is_err());
    }

    #[test]
    fn spot_values() {
        let rdct = catalog::load("rdct").unwrap();
        let r = evaluate(&scale_entry(&rdct, 16, ScalingMethod::Jam).unwrap(), DEFAULT_RHO).unwrap();
        assert!(r.d.abs() < 0.005);
        assert!((r.epsilon - 12.93).abs() < 0.05, "{}", r.epsilon);
        assert!((r.mse - 0.12).abs() < 0.01);
        assert!((r.cg - 8.43).abs() < 0.01);
        assert!((r.eta - 72.23).abs() < 0.05);
        let sdct = catalog::load("sdct").unwrap();
        let r = evaluate(&scale_entry(&sdct, 16, ScalingMethod::Jam).unwrap(), DEFAULT_RHO).unwrap();
        assert!((r.d - 0.20).abs() < 0.005, "{}", r.d);
    }

    #[test]
    fn orthonormal_inverse_rows_are_unit() {
        let rdct = catalog::load("rdct").unwrap();
        let s = scale_entry(&rdct, 16, ScalingMethod::VI).unwrap();
        let inv = s.c_hat.inverse().unwrap();
        for k in 0..16 {
            let b: f64 = inv.row(k).iter().map(|v| v * v).sum();
            assert!((b - 1.0).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn metrics_invariant_under_row_permutation(
            map in Just((0..16).collect::<Vec<usize>>()).prop_shuffle(),
            which in 0usize..10,
        ) {
            let entry = catalog::load(catalog::IDS[which]).unwrap();
            let c_hat = scale_entry(&entry, 16, ScalingMethod::V).unwrap().c_hat;
            let c = exact::dct2(16).unwrap();
            let p = Permutation::from_map(map).unwrap().to_real();
            let pc_hat = p.matmul(&c_hat).unwrap();
            let pc = p.matmul(&c).unwrap();
            let m = model(16);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs());
            prop_assert!(close(deviation_from_orthogonality(&pc_hat).unwrap(), deviation_from_orthogonality(&c_hat).unwrap()));
            prop_assert!(close(total_error_energy(&pc_hat, &pc).unwrap(), total_error_energy(&c_hat, &c).unwrap()));
            prop_assert!(close(mse(&pc_hat, &pc, &m).unwrap(), mse(&c_hat, &c, &m).unwrap()));
            prop_assert!(close(coding_gain(&pc_hat, &m).unwrap(), coding_gain(&c_hat, &m).unwrap()));
            prop_assert!(close(transform_efficiency(&pc_hat, &m).unwrap(), transform_efficiency(&c_hat, &m).unwrap()));
        }

        #[test]
        fn deviation_zero_iff_gram_diagonal(
            which in 0usize..10,
            m in proptest::sample::select(ScalingMethod::APPROXIMATE.to_vec()),
        ) {
            let entry = catalog::load(catalog::IDS[which]).unwrap();
            let s = scale_entry(&entry, 16, m).unwrap();
            let d = deviation_from_orthogonality(&s.c_hat).unwrap();
            prop_assert_eq!(d.abs() <= 1e-10, s.c_hat.gram().is_diagonal(1e-10));
        }
    }
}
