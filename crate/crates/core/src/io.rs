//! JSON instance files and report envelopes.
//!
//! Instance layout:
//!
//! ```json
//! {
//!   "ambient_dim": 3,
//!   "subspaces": [
//!     { "basis": [[1, 0], [0, 1], [0, [0.0, 1.0]]], "weight": 1.0 }
//!   ],
//!   "operator": [[1, 0, 0], [0, 1, 0], [0, 0, 0]]
//! }
//! ```
//!
//! Matrices are lists of rows. An entry is a real number or a `[re, im]`
//! pair. Basis columns are generators; they are orthonormalized on load.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fusion_frames::WeightedFamily;
use crate::numerics::{self, c64, Matrix, Tolerance, C64};
use crate::subspaces::Subspace;

/// Serde helper for values that may be `±inf` (written as the strings
/// `"inf"` / `"-inf"`).
pub mod extended_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!(
                    "expected number or inf, got {other:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Real(re) => c64(re, 0.0),
            Entry::Complex([re, im]) => c64(re, im),
        }
    }

    fn from_value(z: C64) -> Self {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Complex([z.re, z.im])
        }
    }
}

pub type Rows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceEntry {
    pub basis: Rows,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub ambient_dim: usize,
    pub subspaces: Vec<SubspaceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<Rows>,
}

/// A parsed and validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub family: WeightedFamily,
    pub operator: Option<Matrix>,
    /// Non-fatal notes, e.g. bases that were materially re-orthonormalized.
    pub warnings: Vec<String>,
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

fn rows_to_matrix(rows: &Rows, expected_rows: usize, path: &str) -> Result<Matrix> {
    if rows.len() != expected_rows {
        return Err(parse_err(
            path,
            format!("expected {expected_rows} rows, found {}", rows.len()),
        ));
    }
    let cols = rows.first().map_or(0, Vec::len);
    let mut m = Matrix::zeros(expected_rows, cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(parse_err(
                format!("{path}[{i}]"),
                format!("expected {cols} entries, found {}", row.len()),
            ));
        }
        for (j, e) in row.iter().enumerate() {
            let z = e.value();
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(parse_err(
                    format!("{path}[{i}][{j}]"),
                    "entry is not finite",
                ));
            }
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

pub fn matrix_to_rows(m: &Matrix) -> Rows {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| Entry::from_value(m[(i, j)]))
                .collect()
        })
        .collect()
}

// re-orthonormalization counts as material above this residual
const MATERIAL_CHANGE: f64 = 1e-8;

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            parse_err(
                if path.is_empty() {
                    "$".to_string()
                } else {
                    path
                },
                e.into_inner().to_string(),
            )
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_parts(family: &WeightedFamily, operator: Option<&Matrix>) -> Self {
        Self {
            ambient_dim: family.ambient_dim(),
            subspaces: family
                .items()
                .iter()
                .map(|it| SubspaceEntry {
                    basis: if it.subspace.is_zero() {
                        Vec::new()
                    } else {
                        matrix_to_rows(it.subspace.basis())
                    },
                    weight: it.weight,
                })
                .collect(),
            operator: operator.map(matrix_to_rows),
        }
    }

    /// Validates the file and builds the family and operator.
    pub fn load(&self, tol: &Tolerance) -> Result<Instance> {
        let n = self.ambient_dim;
        if n == 0 {
            return Err(parse_err("ambient_dim", "must be positive"));
        }
        if self.subspaces.is_empty() {
            return Err(parse_err("subspaces", "family has no subspaces"));
        }
        let mut family = WeightedFamily::new(n);
        let mut warnings = Vec::new();
        for (idx, entry) in self.subspaces.iter().enumerate() {
            let path = format!("subspaces[{idx}]");
            if !(entry.weight.is_finite() && entry.weight > 0.0) {
                return Err(parse_err(
                    format!("{path}.weight"),
                    "weight must be positive and finite",
                ));
            }
            let subspace = if entry.basis.is_empty() {
                Subspace::zero(n)
            } else {
                let gens = rows_to_matrix(&entry.basis, n, &format!("{path}.basis"))?;
                let s = Subspace::from_generators(&gens, tol)?;
                let gram = gens.adjoint() * &gens;
                let defect = (gram - Matrix::identity(gens.ncols(), gens.ncols())).norm();
                if defect > MATERIAL_CHANGE || s.dim() != gens.ncols() {
                    warnings.push(format!(
                        "{path}.basis: orthonormalized {} generators to a {}-dimensional basis (defect {defect:.3e})",
                        gens.ncols(),
                        s.dim()
                    ));
                }
                s
            };
            family.push(subspace, entry.weight)?;
        }
        let operator = match &self.operator {
            Some(rows) => {
                let m = rows_to_matrix(rows, n, "operator")?;
                if m.ncols() != n {
                    return Err(parse_err(
                        "operator",
                        format!("expected {n} columns, found {}", m.ncols()),
                    ));
                }
                Some(m)
            }
            None => None,
        };
        Ok(Instance {
            family,
            operator,
            warnings,
        })
    }
}

pub fn load_instance(path: &Path, tol: &Tolerance) -> Result<(Instance, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| parse_err(path.display().to_string(), e.to_string()))?;
    let inst = InstanceFile::parse(&text)?.load(tol)?;
    Ok((inst, sha256_hex(text.as_bytes())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Envelope shared by every command's JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report<T> {
    pub command: String,
    pub input_sha256: Option<String>,
    pub tolerance: Tolerance,
    pub passed: bool,
    pub result: T,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Checks a matrix for the entries-are-finite invariant and squareness.
pub fn check_square_operator(m: &Matrix, n: usize) -> Result<()> {
    numerics::check_finite(m)?;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "operator",
            expected: n,
            actual: m.nrows().max(m.ncols()),
        });
    }
    Ok(())
}
