//! Recomputes each published table and compares it cell by cell with the
//! printed values.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map};

use super::golden::Golden;
use super::{break_point, error_points, fit};
use crate::catalog::{self, Registry};
use crate::error::{Error, Result};
use crate::exact;
use crate::metrics::{evaluate, DEFAULT_RHO};
use crate::scaler::{scale, scale_entry, ScalingMethod};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Value {
    fn render(&self, decimals: usize) -> String {
        match self {
            Value::Num(v) => format!("{v:.decimals$}"),
            Value::Int(v) => v.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            Value::Text(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub column: String,
    pub computed: Value,
    pub printed: Option<Value>,
    pub delta: Option<f64>,
    pub within: Option<bool>,
    #[serde(skip)]
    pub decimals: usize,
}

impl Cell {
    fn plain(column: &str, computed: Value, decimals: usize) -> Self {
        Self {
            column: column.to_string(),
            computed,
            printed: None,
            delta: None,
            within: None,
            decimals,
        }
    }

    fn compared(column: &str, computed: Value, printed: Value, within: bool, decimals: usize) -> Self {
        let delta = match (computed.as_f64(), printed.as_f64()) {
            (Some(c), Some(p)) => Some(c - p),
            _ => None,
        };
        Self {
            column: column.to_string(),
            computed,
            printed: Some(printed),
            delta,
            within: Some(within),
            decimals,
        }
    }

    fn text(&self) -> String {
        let c = self.computed.render(self.decimals);
        match (&self.printed, self.within) {
            (Some(p), Some(ok)) => {
                let mark = if ok { "ok" } else { "FAIL" };
                match self.delta {
                    Some(d) => format!("{c} ({}, Δ {d:+.prec$}, {mark})", p.render(self.decimals), prec = self.decimals.max(1)),
                    None => format!("{c} ({}, {mark})", p.render(self.decimals)),
                }
            }
            _ => c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub label: String,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableDoc {
    pub id: String,
    pub title: String,
    pub rows: Vec<Row>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Markdown,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Unknown {
                kind: "format",
                name: s.to_string(),
            }),
        }
    }
}

impl TableDoc {
    pub fn columns(&self) -> Vec<&str> {
        self.rows
            .first()
            .map(|r| r.cells.iter().map(|c| c.column.as_str()).collect())
            .unwrap_or_default()
    }

    /// `(row label, column)` of every compared cell outside tolerance.
    pub fn failures(&self) -> Vec<(String, String)> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.cells
                    .iter()
                    .filter(|c| c.within == Some(false))
                    .map(move |c| (r.label.clone(), c.column.clone()))
            })
            .collect()
    }

    pub fn compared_cells(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| &r.cells)
            .filter(|c| c.within.is_some())
            .count()
    }

    pub fn all_within(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn cell(&self, row: &str, column: &str) -> Option<&Cell> {
        self.rows
            .iter()
            .find(|r| r.label == row)?
            .cells
            .iter()
            .find(|c| c.column == column)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Markdown => self.to_markdown(),
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }

    fn to_markdown(&self) -> String {
        let mut out = format!("## {} (`{}`)\n\n", self.title, self.id);
        let cols = self.columns();
        let _ = writeln!(out, "| row | {} |", cols.join(" | "));
        let _ = writeln!(out, "|---|{}", "---|".repeat(cols.len()));
        for r in &self.rows {
            let cells: Vec<String> = r.cells.iter().map(Cell::text).collect();
            let _ = writeln!(out, "| {} | {} |", r.label, cells.join(" | "));
        }
        let compared = self.compared_cells();
        if compared > 0 {
            let failed = self.failures().len();
            let _ = writeln!(out, "\n{} of {compared} compared cells within tolerance", compared - failed);
        }
        out
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |v: Option<String>| v.unwrap_or_default();
        w.write_record(["table", "row", "column", "computed", "printed", "delta", "within"])
            .expect("in-memory write");
        for r in &self.rows {
            for c in &r.cells {
                w.write_record([
                    self.id.clone(),
                    r.label.clone(),
                    c.column.clone(),
                    c.computed.render(c.decimals),
                    opt(c.printed.as_ref().map(|p| p.render(c.decimals))),
                    opt(c.delta.map(|d| format!("{d:+.prec$}", prec = c.decimals.max(1) + 1))),
                    opt(c.within.map(|b| b.to_string())),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = Map::new();
                for c in &r.cells {
                    cells.insert(
                        c.column.clone(),
                        json!({
                            "computed": c.computed,
                            "printed": c.printed,
                            "delta": c.delta,
                            "within": c.within,
                        }),
                    );
                }
                json!({"label": r.label, "cells": cells})
            })
            .collect();
        json!({"id": self.id, "title": self.title, "rows": rows})
    }
}

/// Every registered table id, in output order.
pub fn table_ids() -> Vec<String> {
    let mut ids = vec![
        "scaling-families".to_string(),
        "regression".to_string(),
        "break-point".to_string(),
    ];
    ids.extend(catalog::IDS.iter().map(|id| format!("metrics-{id}")));
    ids.extend(["error-points", "range", "complexity"].map(String::from));
    ids
}

pub fn reproduce_table(id: &str) -> Result<TableDoc> {
    let golden = Golden::embedded()?;
    let registry = Registry::embedded()?;
    match id {
        "scaling-families" => scaling_families(&golden),
        "regression" => regression(&golden, &registry),
        "break-point" => break_points(&golden, &registry),
        "error-points" => error_point_table(&registry),
        "range" => range(&golden, &registry),
        "complexity" => complexity(&golden, &registry),
        _ => match id.strip_prefix("metrics-") {
            Some(approx) if catalog::IDS.contains(&approx) => metrics_table(&golden, &registry, approx),
            _ => Err(Error::Unknown {
                kind: "table",
                name: id.to_string(),
            }),
        },
    }
}

/// All tables, computed in parallel and returned in `table_ids` order.
pub fn reproduce_all() -> Result<Vec<TableDoc>> {
    table_ids().par_iter().map(|id| reproduce_table(id)).collect()
}

fn method_by_name(name: &str) -> Result<ScalingMethod> {
    name.parse()
}

fn scaling_families(golden: &Golden) -> Result<TableDoc> {
    let tol = golden.tolerance("scaling-families", "error")?;
    let mut rows = Vec::new();
    for g in &golden.scaling {
        let m = method_by_name(&g.method)?;
        let mut cells = Vec::new();
        let mut orthogonal = true;
        for (n, printed) in [(8, g.n8), (16, g.n16), (32, g.n32)] {
            let s = scale(&exact::dct2(n)?.into(), m)?;
            let e = s.frobenius_error()?;
            orthogonal &= catalog::is_orthonormal(&s.c_hat, 1e-10);
            cells.push(Cell::compared(
                &format!("N={n}"),
                Value::Num(e),
                Value::Num(printed),
                tol.accepts(e, printed),
                3,
            ));
        }
        let orth = if orthogonal { "yes" } else { "no" };
        cells.push(Cell::compared(
            "orthogonal",
            Value::Text(orth.into()),
            Value::Text(g.orthogonal.clone()),
            orth == g.orthogonal,
            0,
        ));
        rows.push(Row {
            label: g.method.clone(),
            cells,
        });
    }
    Ok(TableDoc {
        id: "scaling-families".into(),
        title: "Frobenius error of one scaling step applied to the exact N-point DCT-II".into(),
        rows,
    })
}

fn regression(golden: &Golden, registry: &Registry) -> Result<TableDoc> {
    let mut rows = Vec::new();
    for g in &golden.regression {
        let f = fit(&error_points(registry, method_by_name(&g.method)?)?)?;
        let cells = [
            ("slope", f.m_hat, g.slope, 3),
            ("intercept", f.b_hat, g.intercept, 3),
            ("chi2", f.chi2, g.chi2, 5),
            ("rmse", f.rmse, g.rmse, 5),
        ]
        .into_iter()
        .map(|(col, c, p, dec)| {
            let tol = golden.tolerance("regression", col)?;
            Ok(Cell::compared(col, Value::Num(c), Value::Num(p), tol.accepts(c, p), dec))
        })
        .collect::<Result<Vec<_>>>()?;
        rows.push(Row {
            label: g.method.clone(),
            cells,
        });
    }
    Ok(TableDoc {
        id: "regression".into(),
        title: "Least-squares fit of 16-point error against 8-point error".into(),
        rows,
    })
}

fn break_points(golden: &Golden, registry: &Registry) -> Result<TableDoc> {
    let tol = golden.tolerance("break-point", "value")?;
    let jam = fit(&error_points(registry, ScalingMethod::Jam)?)?;
    let mut rows = Vec::new();
    for g in &golden.break_points {
        let other = fit(&error_points(registry, method_by_name(&g.method)?)?)?;
        let rounded = break_point(&jam.rounded(3), &other.rounded(3))?;
        let full = break_point(&jam, &other)?;
        rows.push(Row {
            label: g.method.clone(),
            cells: vec![
                Cell::compared(
                    "x* (fits at 3 decimals)",
                    Value::Num(rounded),
                    Value::Num(g.value),
                    tol.accepts(rounded, g.value),
                    3,
                ),
                Cell::plain("x* (full precision)", Value::Num(full), 3),
            ],
        });
    }
    Ok(TableDoc {
        id: "break-point".into(),
        title: "8-point error below which each method beats JAM".into(),
        rows,
    })
}

fn metrics_table(golden: &Golden, registry: &Registry, approx: &str) -> Result<TableDoc> {
    let entry = registry.get(approx)?;
    let mut rows = Vec::new();
    for m in ScalingMethod::APPROXIMATE {
        let g = golden.metric(approx, m.name()).ok_or_else(|| Error::Unknown {
            kind: "golden metric row",
            name: format!("{approx}/{m}"),
        })?;
        let r = evaluate(&scale_entry(entry, 16, m)?, DEFAULT_RHO)?;
        let mut cells = Vec::new();
        for (col, c, p, dec) in [
            ("d", r.d, g.d, 2),
            ("eps", r.epsilon, g.eps, 3),
            ("mse", r.mse, g.mse, 2),
            ("cg", r.cg, g.cg, 2),
            ("eta", r.eta, g.eta, 2),
        ] {
            let tol = golden.tolerance("metrics", col)?;
            cells.push(Cell::compared(col, Value::Num(c), Value::Num(p), tol.accepts(c, p), dec));
        }
        for (col, c, p) in [("adds", r.adds, g.adds), ("shifts", r.shifts, g.shifts)] {
            cells.push(Cell::compared(col, Value::Int(c), Value::Int(p), c == p, 0));
        }
        rows.push(Row {
            label: m.name().into(),
            cells,
        });
    }
    Ok(TableDoc {
        id: format!("metrics-{approx}"),
        title: format!("Metrics of the 16-point scaled {approx}"),
        rows,
    })
}

fn error_point_table(registry: &Registry) -> Result<TableDoc> {
    let per_method = ScalingMethod::APPROXIMATE
        .iter()
        .map(|&m| error_points(registry, m))
        .collect::<Result<Vec<_>>>()?;
    let rows = registry
        .entries()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut cells = vec![Cell::plain("x", Value::Num(per_method[0][i].x), 3)];
            for (m, pts) in ScalingMethod::APPROXIMATE.iter().zip(&per_method) {
                cells.push(Cell::plain(&format!("y {m}"), Value::Num(pts[i].y), 3));
            }
            Row {
                label: e.id.clone(),
                cells,
            }
        })
        .collect();
    Ok(TableDoc {
        id: "error-points".into(),
        title: "8-point and 16-point Frobenius errors per catalog member".into(),
        rows,
    })
}

fn range(golden: &Golden, registry: &Registry) -> Result<TableDoc> {
    let tol = golden.tolerance("range", "error")?.tolerance;
    let (lo, hi) = (golden.range.lower, golden.range.upper);
    let printed = format!("[{lo:.2}, {hi:.2}]");
    let rows = registry
        .entries()
        .iter()
        .map(|e| {
            let x = catalog::frobenius_error(e)?;
            let mut cell = Cell::compared("x", Value::Num(x), Value::Text(printed.clone()), x >= lo - tol && x <= hi + tol, 3);
            cell.delta = Some(if x < lo { x - lo } else if x > hi { x - hi } else { 0.0 });
            Ok(Row {
                label: e.id.clone(),
                cells: vec![cell],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TableDoc {
        id: "range".into(),
        title: "8-point Frobenius errors against the stated literature range".into(),
        rows,
    })
}

fn complexity(golden: &Golden, registry: &Registry) -> Result<TableDoc> {
    let mut rows = Vec::new();
    for e in registry.entries() {
        for m in ScalingMethod::APPROXIMATE {
            let g = golden.metric(&e.id, m.name());
            let mut cells = Vec::new();
            let mut prev = crate::fastpath::Cost::new(e.baseline_adds, e.baseline_shifts);
            let mut recurrence_ok = true;
            for size in [16usize, 32, 64] {
                let c = scale_entry(e, size, m)?.cost();
                let half = size / 2;
                let b = m.b_hat(half)?.cost();
                let gh = m.g_hat(half)?.cost();
                recurrence_ok &= c.adds == 2 * prev.adds + b.adds + gh.adds + size as u64
                    && c.shifts == 2 * prev.shifts + b.shifts + gh.shifts;
                prev = c;
                match (size, g) {
                    (16, Some(g)) => {
                        cells.push(Cell::compared("A16", Value::Int(c.adds), Value::Int(g.adds), c.adds == g.adds, 0));
                        cells.push(Cell::compared("S16", Value::Int(c.shifts), Value::Int(g.shifts), c.shifts == g.shifts, 0));
                    }
                    _ => {
                        cells.push(Cell::plain(&format!("A{size}"), Value::Int(c.adds), 0));
                        cells.push(Cell::plain(&format!("S{size}"), Value::Int(c.shifts), 0));
                    }
                }
            }
            let status = if recurrence_ok { "holds" } else { "violated" };
            cells.push(Cell::compared(
                "recurrence",
                Value::Text(status.into()),
                Value::Text("holds".into()),
                recurrence_ok,
                0,
            ));
            rows.push(Row {
                label: format!("{} {m}", e.id),
                cells,
            });
        }
    }
    Ok(TableDoc {
        id: "complexity".into(),
        title: "Additions and shifts at 16, 32 and 64 points".into(),
        rows,
    })
}
