//! JSON file formats.
//!
//! A matrix is a list of rows; each entry is either `[re, im]` or a bare real
//! number. Matrices are always written in the `[re, im]` form.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::block::BlockMatrix;
use crate::context::PsdContext;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::operator::Operator;
use crate::radii;
use crate::tolerance::ToleranceConfig;

/// Serde wrapper for a complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixJson(pub CMatrix);

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl Serialize for MatrixJson {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.0;
        let rows: Vec<Vec<[f64; 2]>> =
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatrixJson {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Entry>>::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(serde::de::Error::custom(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let m = CMatrix::from_fn(rows.len(), cols, |i, j| match rows[i][j] {
            Entry::Pair([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        });
        Ok(MatrixJson(m))
    }
}

impl From<CMatrix> for MatrixJson {
    fn from(m: CMatrix) -> Self {
        MatrixJson(m)
    }
}

/// `{"a": matrix}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContextFile {
    pub a: MatrixJson,
}

impl ContextFile {
    pub fn into_context(self, tol: &ToleranceConfig) -> Result<PsdContext> {
        PsdContext::new(self.a.0, tol)
    }
}

/// `{"d", "n", "blocks": row-major list of d*d matrices, "a": matrix}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockMatrixFile {
    pub d: usize,
    pub n: usize,
    pub blocks: Vec<MatrixJson>,
    pub a: MatrixJson,
}

impl BlockMatrixFile {
    pub fn from_block_matrix(bm: &BlockMatrix) -> Self {
        let d = bm.d();
        let blocks = (0..d * d).map(|k| MatrixJson(bm.block(k / d, k % d).clone())).collect();
        BlockMatrixFile { d, n: bm.n(), blocks, a: MatrixJson(bm.base_context().source().clone()) }
    }

    pub fn into_block_matrix(self, tol: &ToleranceConfig) -> Result<BlockMatrix> {
        if self.blocks.len() != self.d * self.d {
            return Err(Error::RaggedBlocks(format!(
                "expected {} blocks for d = {}, found {}",
                self.d * self.d,
                self.d,
                self.blocks.len()
            )));
        }
        if self.a.0.nrows() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: self.a.0.nrows() });
        }
        let ctx = Arc::new(PsdContext::new(self.a.0, tol)?);
        let mut blocks = self.blocks.into_iter().map(|b| b.0);
        let grid = (0..self.d).map(|_| blocks.by_ref().take(self.d).collect()).collect();
        BlockMatrix::assemble(grid, ctx)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a matrix stored either bare or as the field `key` of an object.
pub fn read_matrix(path: &Path, key: &str) -> Result<CMatrix> {
    let value: serde_json::Value = read_json(path)?;
    let value = match value {
        serde_json::Value::Object(mut map) => map
            .remove(key)
            .ok_or_else(|| Error::Parse(format!("{}: missing field `{key}`", path.display())))?,
        other => other,
    };
    let m: MatrixJson =
        serde_json::from_value(value).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(m.0)
}

/// Single-operator quantities. Fields that do not exist for the operator
/// (no `A`-adjoint, not `A`-bounded) are `null`.
#[derive(Clone, Debug, Serialize)]
pub struct OperatorSummary {
    pub a_norm: Option<f64>,
    pub a_bounded: bool,
    pub in_ba: bool,
    #[serde(rename = "omega_A")]
    pub omega_a: Option<f64>,
    #[serde(rename = "r_A")]
    pub r_a: Option<f64>,
    pub sharp: Option<MatrixJson>,
}

impl OperatorSummary {
    pub fn compute(op: &Operator, tol: &ToleranceConfig) -> Result<Self> {
        let norm = op.a_op_norm(tol);
        let in_ba = op.in_ba(tol);
        let (omega_a, r_a) = if norm.a_bounded {
            (Some(radii::a_numerical_radius(op, tol)?), Some(radii::a_spectral_radius(op, tol)?))
        } else {
            (None, None)
        };
        let sharp = if in_ba { Some(MatrixJson(op.a_adjoint(tol)?.into_matrix())) } else { None };
        Ok(OperatorSummary {
            a_norm: norm.a_bounded.then_some(norm.value),
            a_bounded: norm.a_bounded,
            in_ba,
            omega_a,
            r_a,
            sharp,
        })
    }
}
