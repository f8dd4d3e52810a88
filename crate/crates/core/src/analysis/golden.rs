//! Printed values from the published tables, shipped as CSV.

use serde::Deserialize;

use crate::error::{Error, Result};

const SCALING: &str = include_str!("../../golden/scaling_families.csv");
const REGRESSION: &str = include_str!("../../golden/regression.csv");
const BREAK_POINTS: &str = include_str!("../../golden/break_points.csv");
const METRICS: &str = include_str!("../../golden/metrics.csv");
const RANGE: &str = include_str!("../../golden/range.csv");
const TOLERANCES: &str = include_str!("../../golden/tolerances.csv");

#[derive(Clone, Debug, Deserialize)]
pub struct ScalingRow {
    pub method: String,
    pub n8: f64,
    pub n16: f64,
    pub n32: f64,
    pub orthogonal: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct RegressionRow {
    pub method: String,
    pub slope: f64,
    pub intercept: f64,
    pub chi2: f64,
    pub rmse: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct BreakPointRow {
    pub method: String,
    pub value: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct MetricRow {
    pub approx: String,
    pub method: String,
    pub d: f64,
    pub eps: f64,
    pub mse: f64,
    pub cg: f64,
    pub eta: f64,
    pub adds: u64,
    pub shifts: u64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
pub struct RangeClaim {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceKind {
    Abs,
    Rel,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Tolerance {
    pub table: String,
    pub column: String,
    pub tolerance: f64,
    pub kind: ToleranceKind,
}

impl Tolerance {
    pub fn accepts(&self, computed: f64, printed: f64) -> bool {
        let delta = (computed - printed).abs();
        match self.kind {
            ToleranceKind::Abs => delta <= self.tolerance + 1e-12,
            ToleranceKind::Rel => delta <= self.tolerance * printed.abs(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Golden {
    pub scaling: Vec<ScalingRow>,
    pub regression: Vec<RegressionRow>,
    pub break_points: Vec<BreakPointRow>,
    pub metrics: Vec<MetricRow>,
    pub range: RangeClaim,
    pub tolerances: Vec<Tolerance>,
}

fn read<T: for<'de> Deserialize<'de>>(name: &str, text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::Parse(format!("golden {name}: {e}")))
}

impl Golden {
    pub fn embedded() -> Result<Self> {
        let range = read::<RangeClaim>("range", RANGE)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Parse("golden range: empty".into()))?;
        Ok(Self {
            scaling: read("scaling_families", SCALING)?,
            regression: read("regression", REGRESSION)?,
            break_points: read("break_points", BREAK_POINTS)?,
            metrics: read("metrics", METRICS)?,
            range,
            tolerances: read("tolerances", TOLERANCES)?,
        })
    }

    pub fn tolerance(&self, table: &str, column: &str) -> Result<&Tolerance> {
        self.tolerances
            .iter()
            .find(|t| t.table == table && t.column == column)
            .ok_or_else(|| Error::Unknown {
                kind: "tolerance",
                name: format!("{table}/{column}"),
            })
    }

    pub fn metric(&self, approx: &str, method: &str) -> Option<&MetricRow> {
        self.metrics
            .iter()
            .find(|r| r.approx == approx && r.method == method)
    }
}
