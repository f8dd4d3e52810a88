//! Command-line front end. `run` returns the complete output or an error,
//! never a partial result.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{self, Format as TableFormat};
use crate::catalog::Registry;
use crate::error::{Error, Result};
use crate::exact::{self, Identity, StructuralKind, TransformKind};
use crate::fastpath::FactoredTransform;
use crate::matkit::{DyadicRational, Matrix, RealMatrix};
use crate::metrics::{self, DEFAULT_RHO};
use crate::scaler::{self, ScaledTransform, ScalingMethod};

/// Largest residual `verify` accepts.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "dct-scaling", version, about = "Scaled multiplierless DCT-II approximations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print an exact transform or structural matrix.
    Gen(GenArgs),
    /// Scale an 8-point approximation (or the exact DCT) and report its error.
    Scale(ScaleArgs),
    /// Evaluate the metric suite for a scaled transform.
    Metrics(MetricsArgs),
    /// Apply a scaled transform to vectors read from a file.
    Apply(ApplyArgs),
    /// Recompute published tables and compare with the printed values.
    Tables(TablesArgs),
    /// Check every exact identity numerically.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// dct2, dct4, dst4, A, B, D, G, J, Ibar, Z, shuffle, bitrev or butterfly.
    #[arg(long)]
    pub kind: String,
    /// Matrix size; the half size for shuffle and butterfly.
    #[arg(long)]
    pub size: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args, Clone)]
pub struct Target {
    /// Catalog id, or `exact` for the exact DCT-II.
    #[arg(long)]
    pub approx: String,
    /// JAM, I–VII or exact.
    #[arg(long)]
    pub method: String,
    /// Output size.
    #[arg(long, default_value_t = 16)]
    pub size: usize,
    /// Input size for `--approx exact`; defaults to one level below `--size`.
    #[arg(long)]
    pub input_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    #[command(flatten)]
    pub target: Target,
    /// Print the normalized Ĉ instead of the low-complexity T.
    #[arg(long)]
    pub orthogonalize: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long, default_value_t = DEFAULT_RHO)]
    pub rho: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[command(flatten)]
    pub target: Target,
    /// One whitespace-separated vector per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Inputs are integers; use exact dyadic arithmetic.
    #[arg(long = "int")]
    pub integer: bool,
    /// Apply the final row normalization as well.
    #[arg(long, conflicts_with = "integer")]
    pub orthogonalize: bool,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Table id or `all`.
    #[arg(long)]
    pub id: String,
    /// markdown, csv or json.
    #[arg(long, default_value = "markdown")]
    pub format: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest N checked; sizes are the powers of two from 2.
    #[arg(long, default_value_t = 64)]
    pub max_size: usize,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(e.to_string()),
                _ => Err(Error::Parse(first_line(&e.to_string()))),
            };
        }
    };
    execute(&cli.command)
}

fn first_line(s: &str) -> String {
    s.lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("invalid arguments")
        .trim_start_matches("error: ")
        .to_string()
}

pub fn execute(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Scale(a) => scale_cmd(a),
        Command::Metrics(a) => metrics_cmd(a),
        Command::Apply(a) => apply_cmd(a),
        Command::Tables(a) => tables_cmd(a),
        Command::Verify(a) => verify_cmd(a),
    }
}

fn gen(a: &GenArgs) -> Result<String> {
    let m: Matrix = match a.kind.parse::<TransformKind>() {
        Ok(kind) => exact::transform_matrix(kind, a.size)?.into(),
        Err(_) => exact::structural_matrix(a.kind.parse::<StructuralKind>()?, a.size)?,
    };
    Ok(format_matrix(&m, a.format))
}

fn build(target: &Target) -> Result<ScaledTransform> {
    let method: ScalingMethod = target.method.parse()?;
    if target.approx.eq_ignore_ascii_case("exact") {
        let input = target.input_size.unwrap_or(target.size / 2);
        scaler::levels_between(input, target.size)?;
        let c = exact::dct2(input)?;
        scaler::scale_to(&c.into(), target.size, method)
    } else {
        if target.input_size.is_some_and(|n| n != 8) {
            return Err(Error::InvalidSize {
                size: target.input_size.unwrap_or(0),
                reason: "catalog approximations are 8-point",
            });
        }
        let registry = Registry::embedded()?;
        scaler::scale_entry(registry.get(&target.approx)?, target.size, method)
    }
}

fn scale_cmd(a: &ScaleArgs) -> Result<String> {
    let s = build(&a.target)?;
    let err = s.frobenius_error()?;
    let m: Matrix = if a.orthogonalize {
        s.c_hat.clone().into()
    } else {
        s.dense.clone()
    };
    Ok(match a.format {
        OutputFormat::Json => {
            let mut v = matrix_json(&m);
            v["frobenius_error"] = json!(round(err, 3));
            v["orthogonalized"] = json!(a.orthogonalize);
            v["adds"] = json!(s.cost().adds);
            v["shifts"] = json!(s.cost().shifts);
            pretty(&v)
        }
        OutputFormat::Csv => format_matrix(&m, OutputFormat::Csv),
        OutputFormat::Text => {
            let mut out = format_matrix(&m, OutputFormat::Text);
            let _ = writeln!(out, "frobenius_error {err:.3}");
            out
        }
    })
}

fn metrics_cmd(a: &MetricsArgs) -> Result<String> {
    let s = build(&a.target)?;
    let r = metrics::evaluate(&s, a.rho)?;
    let method: ScalingMethod = a.target.method.parse()?;
    let approx = a.target.approx.to_ascii_lowercase();
    let size = a.target.size;
    Ok(match a.format {
        OutputFormat::Json => pretty(&json!({
            "approx": approx,
            "method": method.name(),
            "size": size,
            "rho": a.rho,
            "d": round(r.d, 2),
            "eps": round(r.epsilon, 3),
            "mse": round(r.mse, 2),
            "cg": round(r.cg, 2),
            "eta": round(r.eta, 2),
            "frob": round(r.frob, 3),
            "adds": r.adds,
            "shifts": r.shifts,
        })),
        OutputFormat::Csv | OutputFormat::Text => {
            let sep = if a.format == OutputFormat::Csv { "," } else { " " };
            let header = ["approx", "method", "size", "d", "eps", "mse", "cg", "eta", "frob", "adds", "shifts"];
            let row = [
                approx,
                method.name().to_string(),
                size.to_string(),
                format!("{:.2}", r.d),
                format!("{:.3}", r.epsilon),
                format!("{:.2}", r.mse),
                format!("{:.2}", r.cg),
                format!("{:.2}", r.eta),
                format!("{:.3}", r.frob),
                r.adds.to_string(),
                r.shifts.to_string(),
            ];
            format!("{}\n{}\n", header.join(sep), row.join(sep))
        }
    })
}

fn read_vectors(path: &PathBuf, size: usize) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let fields: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != size {
            return Err(Error::Parse(format!(
                "line {}: expected {size} values, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        out.push(fields);
    }
    Ok(out)
}

fn apply_cmd(a: &ApplyArgs) -> Result<String> {
    let s = build(&a.target)?;
    let ft: &FactoredTransform = &s.factored;
    let vectors = read_vectors(&a.input, ft.size())?;
    let mut out = String::new();
    for (i, fields) in vectors.iter().enumerate() {
        let bad = |f: &str| Error::Parse(format!("vector {}: `{f}` is not a number", i + 1));
        let line: Vec<String> = if a.integer {
            let x = fields
                .iter()
                .map(|f| f.parse::<i64>().map_err(|_| bad(f)))
                .collect::<Result<Vec<_>>>()?;
            ft.apply_int(&x)?.iter().map(DyadicRational::to_string).collect()
        } else {
            let x = fields
                .iter()
                .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(f)))
                .collect::<Result<Vec<_>>>()?;
            let mut y = ft.apply(&x)?;
            if a.orthogonalize {
                y = s.sigma.mul_vec(&y)?;
            }
            y.iter().map(|v| format!("{v:.6}")).collect()
        };
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

fn tables_cmd(a: &TablesArgs) -> Result<String> {
    let format: TableFormat = a.format.parse()?;
    let docs = if a.id == "all" {
        analysis::reproduce_all()?
    } else {
        vec![analysis::reproduce_table(&a.id)?]
    };
    Ok(match format {
        TableFormat::Json if docs.len() > 1 => {
            let parts: Vec<serde_json::Value> = docs
                .iter()
                .map(|d| serde_json::from_str(&d.render(TableFormat::Json)).expect("valid json"))
                .collect();
            pretty(&serde_json::Value::Array(parts))
        }
        TableFormat::Csv => {
            let mut out = String::new();
            for (i, d) in docs.iter().enumerate() {
                let csv = d.render(TableFormat::Csv);
                // one header for the concatenated long-format output
                out.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |x| x.1) });
            }
            out
        }
        _ => docs
            .iter()
            .map(|d| d.render(format))
            .collect::<Vec<_>>()
            .join("\n"),
    })
}

fn verify_cmd(a: &VerifyArgs) -> Result<String> {
    if a.max_size < 2 {
        return Err(Error::InvalidSize {
            size: a.max_size,
            reason: "max size must be at least 2",
        });
    }
    let sizes: Vec<usize> = (1..).map(|k| 1usize << k).take_while(|&n| n <= a.max_size).collect();
    let mut out = String::new();
    let mut worst: f64 = 0.0;
    for id in Identity::ALL {
        let mut max = 0.0f64;
        for &n in &sizes {
            max = max.max(exact::verify_identity(id, n)?);
        }
        worst = worst.max(max);
        let _ = writeln!(out, "{:<24} {:.3e}", id.name(), max);
    }
    let _ = writeln!(out, "max residual {worst:.3e} over N in {sizes:?}");
    if worst > VERIFY_TOLERANCE {
        return Err(Error::Parse(format!("identity residual {worst:.3e} exceeds {VERIFY_TOLERANCE:e}")));
    }
    Ok(out)
}

fn round(v: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (v * f).round() / f
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn cell_strings(m: &Matrix) -> Vec<Vec<String>> {
    match m {
        Matrix::Dyadic(d) => d.rows().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
        Matrix::Real(r) => real_rows(r),
    }
}

fn real_rows(r: &RealMatrix) -> Vec<Vec<String>> {
    r.rows()
        .map(|row| {
            row.iter()
                .map(|v| {
                    // avoid printing "-0.000000"
                    let s = format!("{v:.6}");
                    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
                        s.trim_start_matches('-').to_string()
                    } else {
                        s
                    }
                })
                .collect()
        })
        .collect()
}

fn matrix_json(m: &Matrix) -> serde_json::Value {
    match m {
        Matrix::Dyadic(d) => json!({
            "size": d.n(),
            "dyadic": true,
            "rows": d.rows().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        Matrix::Real(r) => json!({"size": r.n(), "dyadic": false, "rows": r.to_rows()}),
    }
}

fn format_matrix(m: &Matrix, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => pretty(&matrix_json(m)),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in cell_strings(m) {
                w.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
        }
        OutputFormat::Text => {
            let rows = cell_strings(m);
            let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
            let mut out = String::new();
            for row in rows {
                let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        let mut argv = vec!["dct-scaling"];
        argv.extend_from_slice(args);
        run(argv).unwrap()
    }

    #[test]
    fn scale_exact_vi() {
        let out = run_ok(&["scale", "--approx", "exact", "--method", "VI", "--size", "16"]);
        assert!(out.ends_with("frobenius_error 1.954\n"), "{out}");
    }

    #[test]
    fn gen_shuffle() {
        let out = run_ok(&["gen", "--kind", "shuffle", "--size", "2", "--format", "csv"]);
        assert_eq!(out, "1,0,0,0\n0,0,1,0\n0,1,0,0\n0,0,0,1\n");
    }

    #[test]
    fn bad_method_is_one_line_error() {
        let err = run(["dct-scaling", "scale", "--approx", "rdct", "--method", "IX"]).unwrap_err();
        assert!(!err.to_string().contains('\n'));
        let err = run(["dct-scaling", "frobnicate"]).unwrap_err();
        assert!(!err.to_string().contains('\n'));
    }

    #[test]
    fn verify_small() {
        let out = run_ok(&["verify", "--max-size", "8"]);
        assert_eq!(out.lines().count(), 8);
    }

    #[test]
    fn help_is_not_an_error() {
        assert!(run_ok(&["--help"]).contains("Usage"));
    }
}
