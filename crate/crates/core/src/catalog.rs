//! Registry of published 8-point DCT-II approximations and the
//! orthogonalization operator.

use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact;
use crate::matkit::{DyadicMatrix, DyadicRational, Matrix, RealMatrix};

/// Catalog ids in table order.
pub const IDS: [&str; 10] = [
    "bas1", "bas2", "bas3", "bas4", "rdct", "mrdct", "abdct", "sdct", "lodct", "imrdct",
];

const MANIFEST: &str = include_str!("../catalog/manifest.toml");

fn embedded_file(name: &str) -> Option<&'static str> {
    Some(match name {
        "bas1.txt" => include_str!("../catalog/bas1.txt"),
        "bas2.txt" => include_str!("../catalog/bas2.txt"),
        "bas3.txt" => include_str!("../catalog/bas3.txt"),
        "bas4.txt" => include_str!("../catalog/bas4.txt"),
        "mrdct.txt" => include_str!("../catalog/mrdct.txt"),
        "imrdct.txt" => include_str!("../catalog/imrdct.txt"),
        "lodct.txt" => include_str!("../catalog/lodct.txt"),
        "abdct.txt" => include_str!("../catalog/abdct.txt"),
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationEntry {
    pub id: String,
    pub matrix: DyadicMatrix,
    pub baseline_adds: u64,
    pub baseline_shifts: u64,
    pub source: String,
    /// Whether `matrix · matrixᵀ` is declared diagonal.
    pub orthogonal: bool,
}

#[derive(Clone, Debug, Deserialize)]
struct ManifestRecord {
    id: String,
    #[serde(default)]
    file: Option<String>,
    #[serde(default)]
    sha256: Option<String>,
    #[serde(default)]
    generated: bool,
    source: String,
    orthogonal: bool,
    baseline_adds: u64,
    baseline_shifts: u64,
}

#[derive(Debug, Deserialize)]
struct Manifest {
    approximation: Vec<ManifestRecord>,
}

/// Validated catalog contents. Immutable once built.
#[derive(Clone, Debug)]
pub struct Registry {
    entries: Vec<ApproximationEntry>,
}

impl Registry {
    /// The registry shipped with the crate.
    pub fn embedded() -> Result<Self> {
        Self::parse(MANIFEST, |name| {
            embedded_file(name)
                .map(str::to_string)
                .ok_or_else(|| Error::Io(format!("no embedded catalog file `{name}`")))
        })
    }

    /// Reads `manifest.toml` and its data files from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let manifest = std::fs::read_to_string(dir.join("manifest.toml"))?;
        Self::parse(&manifest, |name| Ok(std::fs::read_to_string(dir.join(name))?))
    }

    pub fn parse(manifest: &str, read: impl Fn(&str) -> Result<String>) -> Result<Self> {
        let manifest: Manifest =
            toml::from_str(manifest).map_err(|e| Error::Parse(format!("catalog manifest: {e}")))?;
        let mut entries = Vec::with_capacity(manifest.approximation.len());
        for rec in manifest.approximation {
            let matrix = if rec.generated {
                generated_matrix(&rec.id)?
            } else {
                let (file, expected) = match (&rec.file, &rec.sha256) {
                    (Some(f), Some(s)) => (f, s),
                    _ => {
                        return Err(Error::Catalog {
                            id: rec.id,
                            reason: "data entries need `file` and `sha256`".into(),
                        })
                    }
                };
                let text = read(file)?;
                let actual = hex::encode(Sha256::digest(text.as_bytes()));
                if !actual.eq_ignore_ascii_case(expected) {
                    return Err(Error::Checksum {
                        id: rec.id,
                        expected: expected.clone(),
                        actual,
                    });
                }
                DyadicMatrix::parse(&text)?
            };
            let entry = ApproximationEntry {
                id: rec.id,
                matrix,
                baseline_adds: rec.baseline_adds,
                baseline_shifts: rec.baseline_shifts,
                source: rec.source,
                orthogonal: rec.orthogonal,
            };
            validate(&entry)?;
            entries.push(entry);
        }
        Ok(Self { entries })
    }

    pub fn get(&self, id: &str) -> Result<&ApproximationEntry> {
        let key = id.to_ascii_lowercase();
        self.entries
            .iter()
            .find(|e| e.id == key)
            .ok_or_else(|| Error::Unknown {
                kind: "approximation",
                name: id.to_string(),
            })
    }

    pub fn entries(&self) -> &[ApproximationEntry] {
        &self.entries
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }
}

/// Loads one entry from the embedded registry.
pub fn load(id: &str) -> Result<ApproximationEntry> {
    Registry::embedded()?.get(id).cloned()
}

/// Sign of the exact 8-point DCT-II, with zero where the cosine vanishes.
pub fn signed_dct(n: usize) -> Result<DyadicMatrix> {
    let c = exact::dct2(n)?;
    Ok(DyadicMatrix::from_fn(n, |i, j| {
        let v = c.get(i, j);
        if v.abs() < 1e-12 {
            DyadicRational::ZERO
        } else if v > 0.0 {
            DyadicRational::ONE
        } else {
            DyadicRational::NEG_ONE
        }
    }))
}

/// `round(2 · C)` of the exact DCT-II.
pub fn rounded_dct(n: usize) -> Result<DyadicMatrix> {
    let c = exact::dct2(n)?;
    let rounded = RealMatrix::from_fn(n, |i, j| (2.0 * c.get(i, j)).round());
    DyadicMatrix::try_from_real(&rounded)
}

fn generated_matrix(id: &str) -> Result<DyadicMatrix> {
    match id {
        "sdct" => signed_dct(8),
        "rdct" => rounded_dct(8),
        _ => Err(Error::Catalog {
            id: id.to_string(),
            reason: "no generator for this id".into(),
        }),
    }
}

fn allowed_entry(v: DyadicRational) -> bool {
    let a = v.abs();
    a.is_zero() || a == DyadicRational::HALF || a == DyadicRational::ONE || a == DyadicRational::TWO
}

fn validate(e: &ApproximationEntry) -> Result<()> {
    let fail = |reason: String| {
        Err(Error::Catalog {
            id: e.id.clone(),
            reason,
        })
    };
    if e.matrix.n() != 8 {
        return fail(format!("expected 8x8, found {0}x{0}", e.matrix.n()));
    }
    if let Some(v) = e.matrix.entries().iter().find(|v| !allowed_entry(**v)) {
        return fail(format!("entry {v} outside {{0, ±1/2, ±1, ±2}}"));
    }
    let diagonal = e.matrix.gram()?.is_diagonal();
    if diagonal != e.orthogonal {
        return fail(format!(
            "declared orthogonal = {} but the Gram matrix is {}diagonal",
            e.orthogonal,
            if diagonal { "" } else { "not " }
        ));
    }
    let needs_shifts = e.matrix.entries().iter().any(|v| !v.is_trivial());
    if needs_shifts != (e.baseline_shifts > 0) {
        return fail(format!(
            "declared {} shifts but the matrix {} non-unit entries",
            e.baseline_shifts,
            if needs_shifts { "has" } else { "has no" }
        ));
    }
    let dense_adds: u64 = e
        .matrix
        .rows()
        .map(|r| r.iter().filter(|v| !v.is_zero()).count().saturating_sub(1) as u64)
        .sum();
    if e.baseline_adds > dense_adds {
        return fail(format!(
            "declared {} additions exceeds the direct cost {dense_adds}",
            e.baseline_adds
        ));
    }
    Ok(())
}

/// How the diagonal normalization `Σ` is formed from `T`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SigmaRule {
    /// `Σ = diag(T·Tᵀ)^(-1/2)`: every row of `T` scaled to unit norm.
    #[default]
    RowNorm,
    /// `Σ = sqrt(diag((T·Tᵀ)⁻¹))`.
    InverseGram,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orthogonalized {
    pub sigma: RealMatrix,
    pub c_hat: RealMatrix,
}

/// Orthogonalizes `t` with the default [`SigmaRule`].
pub fn orthogonalize(t: &Matrix) -> Result<Orthogonalized> {
    orthogonalize_with(t, SigmaRule::default())
}

/// `Ĉ = Σ · T`. Both rules agree whenever `T·Tᵀ` is diagonal.
pub fn orthogonalize_with(t: &Matrix, rule: SigmaRule) -> Result<Orthogonalized> {
    let t = t.to_real();
    let gram = t.gram();
    let inv = gram.inverse()?;
    let d: Vec<f64> = match rule {
        SigmaRule::RowNorm => gram.diag(),
        SigmaRule::InverseGram => inv.diag().iter().map(|v| 1.0 / v).collect(),
    };
    let mut sigma = Vec::with_capacity(d.len());
    for (index, value) in d.into_iter().enumerate() {
        if value <= 0.0 {
            return Err(Error::NonPositiveDiagonal { index, value });
        }
        sigma.push(1.0 / value.sqrt());
    }
    let c_hat = t.scale_rows(&sigma)?;
    Ok(Orthogonalized {
        sigma: RealMatrix::diagonal(&sigma),
        c_hat,
    })
}

/// `‖Ĉ − C‖_F` for an 8-point entry after orthogonalization.
pub fn frobenius_error(entry: &ApproximationEntry) -> Result<f64> {
    let o = orthogonalize(&Matrix::Dyadic(entry.matrix.clone()))?;
    crate::matkit::frobenius_distance(&o.c_hat, &exact::dct2(entry.matrix.n())?)
}

/// Whether `c_hat · c_hatᵀ` is the identity within `tol`.
pub fn is_orthonormal(c_hat: &RealMatrix, tol: f64) -> bool {
    c_hat
        .gram()
        .max_abs_diff(&RealMatrix::identity(c_hat.n()))
        .map(|e| e <= tol)
        .unwrap_or(false)
}
