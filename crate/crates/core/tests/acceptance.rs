//! Exit criteria. Each test prints one `PASS` or `FAIL` line and then asserts.

use std::time::{Duration, Instant};

use dct_scaling::analysis::{self, Golden, LinearFit};
use dct_scaling::catalog::{self, Registry};
use dct_scaling::exact::{self, Identity};
use dct_scaling::matkit::{DyadicRational, Matrix, Permutation, RealMatrix};
use dct_scaling::metrics::{self, DEFAULT_RHO};
use dct_scaling::scaler::{self, scale_entry, ScalingMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IDENTITY_TOL: f64 = 1e-10;
const IDENTITY_BUDGET: Duration = Duration::from_secs(1);
const SCALING_TOL: f64 = 0.001;
const SCALING_BUDGET: Duration = Duration::from_secs(5);
const ORTHO_TOL: f64 = 1e-10;
const PAIR_TOL: f64 = 1e-12;
const FIT_TOL: f64 = 0.01;
const BREAK_TOL: f64 = 0.01;
const STAT_REL_TOL: f64 = 0.10;
const CG_TOL: f64 = 0.01;
const ETA_TOL: f64 = 0.05;
const D_TOL: f64 = 0.005;
const MSE_TOL: f64 = 0.01;
const EPS_TOL: f64 = 0.05;
const APPLY_REL_TOL: f64 = 1e-9;
const VECTORS_PER_CASE: usize = 100;
const RANGE_TOL: f64 = 0.005;
const SEED: u64 = 0x5eed_0dc7;

fn report(criterion: &str, failures: &[String], detail: &str) {
    if failures.is_empty() {
        println!("PASS {criterion}: {detail}");
    } else {
        println!("FAIL {criterion}: {detail}");
        for f in failures {
            println!("     {f}");
        }
    }
    assert!(failures.is_empty(), "{criterion}: {} failure(s)", failures.len());
}

fn golden() -> Golden {
    Golden::embedded().unwrap()
}

fn registry() -> Registry {
    Registry::embedded().unwrap()
}

#[test]
fn exactness_identities() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut worst = 0.0f64;
    for id in Identity::ALL {
        for n in [2, 4, 8, 16, 32] {
            if !id.accepts(n) {
                continue;
            }
            checked += 1;
            match exact::verify_identity(id, n) {
                Ok(r) => {
                    worst = worst.max(r);
                    if r > IDENTITY_TOL {
                        failures.push(format!("{} at {n}: residual {r:e}", id.name()));
                    }
                }
                Err(e) => failures.push(format!("{} at {n}: {e}", id.name())),
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= IDENTITY_BUDGET {
        failures.push(format!("runtime {elapsed:?} exceeds {IDENTITY_BUDGET:?}"));
    }
    report(
        "exactness",
        &failures,
        &format!("{checked} checks, worst residual {worst:.1e}, {elapsed:.2?}"),
    );
}

#[test]
fn scaling_family_errors() {
    let g = golden();
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cells = 0;
    for row in &g.scaling {
        let method: ScalingMethod = row.method.parse().unwrap();
        for (n, printed) in [(8, row.n8), (16, row.n16), (32, row.n32)] {
            cells += 1;
            let c = Matrix::Real(exact::dct2(n).unwrap());
            let got = scaler::scale(&c, method).unwrap().frobenius_error().unwrap();
            if (got - printed).abs() > SCALING_TOL {
                failures.push(format!("{method}/{n}: {got:.4} vs {printed}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= SCALING_BUDGET {
        failures.push(format!("runtime {elapsed:?} exceeds {SCALING_BUDGET:?}"));
    }
    report(
        "scaling-family errors",
        &failures,
        &format!("{cells} cells within ±{SCALING_TOL}, {elapsed:.2?}"),
    );
}

#[test]
fn orthogonality() {
    let g = golden();
    let mut failures = Vec::new();
    let mut cases = 0;
    for e in registry().entries().iter().filter(|e| e.orthogonal) {
        for m in ScalingMethod::APPROXIMATE {
            for size in [16, 32] {
                cases += 1;
                let c_hat = scale_entry(e, size, m).unwrap().c_hat;
                let dev = c_hat
                    .matmul(&c_hat.transpose())
                    .unwrap()
                    .max_abs_diff(&RealMatrix::identity(size))
                    .unwrap();
                if dev > ORTHO_TOL {
                    failures.push(format!("{} {m} at {size}: {dev:e}", e.id));
                }
            }
        }
    }
    for row in &g.scaling {
        let method: ScalingMethod = row.method.parse().unwrap();
        for n in [8, 16, 32] {
            let c = Matrix::Real(exact::dct2(n).unwrap());
            let c_hat = scaler::scale(&c, method).unwrap().c_hat;
            let ok = catalog::is_orthonormal(&c_hat, ORTHO_TOL);
            if ok != (row.orthogonal == "yes") {
                failures.push(format!("exact {method}/{n}: orthonormal = {ok}"));
            }
        }
    }
    report(
        "orthogonality",
        &failures,
        &format!("{cases} catalog cases and 24 exact-input cases"),
    );
}

#[test]
fn method_pairs_coincide() {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for e in registry().entries() {
        for size in [16, 32] {
            for (a, b) in [
                (ScalingMethod::II, ScalingMethod::III),
                (ScalingMethod::VI, ScalingMethod::VII),
            ] {
                let ca = scale_entry(e, size, a).unwrap().c_hat;
                let cb = scale_entry(e, size, b).unwrap().c_hat;
                let diff = ca.max_abs_diff(&cb).unwrap();
                worst = worst.max(diff);
                if diff > PAIR_TOL {
                    failures.push(format!("{} {a}/{b} at {size}: {diff:e}", e.id));
                }
            }
        }
    }
    report(
        "method pairs",
        &failures,
        &format!("II = III and VI = VII, worst entry difference {worst:.1e}"),
    );
}

fn fits(reg: &Registry) -> Vec<(ScalingMethod, LinearFit)> {
    ScalingMethod::APPROXIMATE
        .iter()
        .map(|&m| (m, analysis::fit_method(reg, m).unwrap()))
        .collect()
}

fn rel_miss(got: f64, printed: f64) -> bool {
    (got - printed).abs() > STAT_REL_TOL * printed.abs()
}

#[test]
fn regression_fits() {
    let g = golden();
    let fits = fits(&registry());
    let mut failures = Vec::new();
    for (m, f) in &fits {
        let row = g.regression.iter().find(|r| r.method == m.name()).unwrap();
        if (f.m_hat - row.slope).abs() > FIT_TOL {
            failures.push(format!("{m} slope {:.4} vs {}", f.m_hat, row.slope));
        }
        if (f.b_hat - row.intercept).abs() > FIT_TOL {
            failures.push(format!("{m} intercept {:.4} vs {}", f.b_hat, row.intercept));
        }
        if rel_miss(f.chi2, row.chi2) {
            failures.push(format!("{m} chi2 {:.4e} vs {:e}", f.chi2, row.chi2));
        }
        if rel_miss(f.rmse, row.rmse) {
            failures.push(format!("{m} rmse {:.4e} vs {:e}", f.rmse, row.rmse));
        }
    }
    report(
        "regression fits",
        &failures,
        &format!("slope and intercept within ±{FIT_TOL}, SSE and RMSE(n-2) within 10%"),
    );
}

/// The alternative goodness-of-fit definitions do not reproduce the printed
/// statistics, which is why residual sum of squares and `n − 2` RMSE are used.
#[test]
fn regression_fallback_statistics_rejected() {
    let g = golden();
    let fits = fits(&registry());
    let mut failures = Vec::new();
    let mut misses = [0usize; 3];
    for (m, f) in &fits {
        let row = g.regression.iter().find(|r| r.method == m.name()).unwrap();
        misses[0] += rel_miss(f.chi2_pearson, row.chi2) as usize;
        misses[1] += rel_miss(f.chi2_scaled, row.chi2) as usize;
        misses[2] += rel_miss(f.rmse_n, row.rmse) as usize;
    }
    for (name, k) in ["pearson chi2", "scaled chi2", "rmse over n"].iter().zip(misses) {
        if k == 0 {
            failures.push(format!("{name} also reproduces every row"));
        }
    }
    report(
        "regression statistic definitions",
        &failures,
        &format!(
            "rows missed: pearson {}, scaled {}, rmse/n {}",
            misses[0], misses[1], misses[2]
        ),
    );
}

#[test]
fn break_points() {
    let g = golden();
    let fits = fits(&registry());
    let jam = fits[0].1.rounded(3);
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for row in &g.break_points {
        let method: ScalingMethod = row.method.parse().unwrap();
        let (_, f) = fits.iter().find(|(m, _)| *m == method).unwrap();
        let x = analysis::break_point(&jam, &f.rounded(3)).unwrap();
        lines.push(format!("{method} {x:.3}"));
        if (x - row.value).abs() > BREAK_TOL {
            failures.push(format!("{method}: {x:.3} vs {}", row.value));
        }
    }
    report("break points", &failures, &lines.join(", "));
}

#[test]
fn metric_tables() {
    let g = golden();
    let mut failures = Vec::new();
    let mut rows = 0;
    for e in registry().entries() {
        for m in ScalingMethod::APPROXIMATE {
            let Some(row) = g.metric(&e.id, m.name()) else {
                failures.push(format!("{} {m}: no printed row", e.id));
                continue;
            };
            rows += 1;
            let r = metrics::evaluate(&scale_entry(e, 16, m).unwrap(), DEFAULT_RHO).unwrap();
            for (col, got, printed, tol) in [
                ("d", r.d, row.d, D_TOL),
                ("eps", r.epsilon, row.eps, EPS_TOL),
                ("mse", r.mse, row.mse, MSE_TOL),
                ("cg", r.cg, row.cg, CG_TOL),
                ("eta", r.eta, row.eta, ETA_TOL),
            ] {
                if (got - printed).abs() > tol + 1e-12 {
                    failures.push(format!("{} {m} {col}: {got:.4} vs {printed}", e.id));
                }
            }
        }
    }
    report("metric tables", &failures, &format!("{rows} rows, five metrics each"));
}

#[test]
fn complexity_counts() {
    let g = golden();
    let mut failures = Vec::new();
    for e in registry().entries() {
        for m in ScalingMethod::APPROXIMATE {
            let row = g.metric(&e.id, m.name()).unwrap();
            for k in 1..=3u32 {
                let size = 8usize << k;
                let c = scale_entry(e, size, m).unwrap().cost();
                // every B̂ and Ĝ is free, so only the butterflies add cost
                let adds = (1u64 << k) * e.baseline_adds + u64::from(k) * (1u64 << (k + 3));
                let shifts = (1u64 << k) * e.baseline_shifts;
                if (c.adds, c.shifts) != (adds, shifts) {
                    failures.push(format!(
                        "{} {m} at {size}: ({}, {}) vs recurrence ({adds}, {shifts})",
                        e.id, c.adds, c.shifts
                    ));
                }
                if size == 16 && (c.adds, c.shifts) != (row.adds, row.shifts) {
                    failures.push(format!(
                        "{} {m}: ({}, {}) vs printed ({}, {})",
                        e.id, c.adds, c.shifts, row.adds, row.shifts
                    ));
                }
            }
        }
    }
    report("complexity counts", &failures, "80 printed pairs, recurrence at 16, 32 and 64");
}

/// Builds `T_2N` from plain dense products, independent of the factor tree.
fn dense_oracle(t: &RealMatrix, m: ScalingMethod) -> RealMatrix {
    let n = t.n();
    let id = RealMatrix::identity(n);
    let b = m.b_hat_matrix(n).unwrap().to_real();
    let g = m.g_hat_matrix(n).unwrap().to_real();
    let butterfly = RealMatrix::from_fn(2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (ii, jj) = (i % n, j % n);
        match (bi, bj) {
            (0, 0) if ii == jj => 1.0,
            (1, 1) if ii == jj => -1.0,
            (0, 1) | (1, 0) if ii + jj == n - 1 => 1.0,
            _ => 0.0,
        }
    });
    RealMatrix::product([
        &Permutation::perfect_shuffle(n).to_real(),
        &RealMatrix::block_diag(&[&id, &b]),
        &RealMatrix::block_diag(&[t, t]),
        &RealMatrix::block_diag(&[&id, &g]),
        &butterfly,
    ])
    .unwrap()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

#[test]
fn factored_apply_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut vectors = 0;
    for e in registry().entries() {
        let t8 = e.matrix.to_real();
        for m in ScalingMethod::APPROXIMATE {
            let t16 = dense_oracle(&t8, m);
            let t32 = dense_oracle(&t16, m);
            for (size, dense) in [(16, t16), (32, t32)] {
                let st = scale_entry(e, size, m).unwrap();
                let exact_dense = st.dense.as_dyadic().cloned();
                for _ in 0..VECTORS_PER_CASE {
                    vectors += 1;
                    let x: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let err = rel_err(&st.factored.apply(&x).unwrap(), &dense.mul_vec(&x).unwrap());
                    worst = worst.max(err);
                    if err > APPLY_REL_TOL {
                        failures.push(format!("{} {m} at {size}: relative error {err:e}", e.id));
                    }
                    let xi: Vec<i64> = (0..size).map(|_| rng.gen_range(-128..=127)).collect();
                    let got = st.factored.apply_int(&xi).unwrap();
                    let want = match &exact_dense {
                        Some(d) => {
                            let xd: Vec<DyadicRational> =
                                xi.iter().map(|&v| DyadicRational::integer(v).unwrap()).collect();
                            d.mul_vec(&xd).unwrap()
                        }
                        None => {
                            failures.push(format!("{} {m} at {size}: dense form not dyadic", e.id));
                            continue;
                        }
                    };
                    if got != want {
                        failures.push(format!("{} {m} at {size}: integer outputs differ", e.id));
                    }
                }
            }
        }
    }
    failures.dedup();
    report(
        "oracle equivalence",
        &failures,
        &format!("{vectors} real and {vectors} integer vectors, worst relative error {worst:.1e}"),
    );
}

#[test]
fn eight_point_error_range() {
    let g = golden();
    let (lo, hi) = (g.range.lower - RANGE_TOL, g.range.upper + RANGE_TOL);
    let mut failures = Vec::new();
    let mut values = Vec::new();
    for e in registry().entries() {
        let x = catalog::frobenius_error(e).unwrap();
        values.push(format!("{} {x:.3}", e.id));
        if !(lo..=hi).contains(&x) {
            failures.push(format!("{}: {x:.3} outside [{}, {}]", e.id, g.range.lower, g.range.upper));
        }
    }
    report("8-point error range", &failures, &values.join(", "));
}
