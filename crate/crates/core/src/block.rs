//! `d x d` block operator matrices over the lifted context `diag(A, ..., A)`.
//!
//! Blocks are stored row-major; block `(i, j)` occupies rows `i*n .. (i+1)*n`
//! and columns `j*n .. (j+1)*n` of the flattened `dn x dn` matrix. Every
//! conversion goes through [`tile_origin`].

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::context::PsdContext;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::operator::Operator;
use crate::radii;
use crate::tolerance::ToleranceConfig;

/// Top-left corner of block `(i, j)` in the flattened matrix.
pub fn tile_origin(i: usize, j: usize, n: usize) -> (usize, usize) {
    (i * n, j * n)
}

#[derive(Clone, Debug)]
pub struct BlockMatrix {
    d: usize,
    n: usize,
    blocks: Vec<CMatrix>,
    base: Arc<PsdContext>,
    lifted: Arc<PsdContext>,
}

/// Placement of the entries for [`structured_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `diag(T_1, ..., T_d)`
    Diagonal,
    /// `T_1` in the top-right corner down to `T_d` in the bottom-left.
    Antidiagonal,
}

impl BlockMatrix {
    /// Builds a block matrix from a `d x d` grid of `n x n` blocks.
    pub fn assemble(grid: Vec<Vec<CMatrix>>, base: Arc<PsdContext>) -> Result<Self> {
        let d = grid.len();
        if d == 0 {
            return Err(Error::RaggedBlocks("empty block grid".into()));
        }
        let n = base.dim();
        let mut blocks = Vec::with_capacity(d * d);
        for (i, row) in grid.into_iter().enumerate() {
            if row.len() != d {
                return Err(Error::RaggedBlocks(format!("row {i} has {} blocks, expected {d}", row.len())));
            }
            for (j, block) in row.into_iter().enumerate() {
                if block.shape() != (n, n) {
                    return Err(Error::RaggedBlocks(format!(
                        "block ({i}, {j}) is {}x{}, expected {n}x{n}",
                        block.nrows(),
                        block.ncols()
                    )));
                }
                blocks.push(block);
            }
        }
        Ok(Self::from_parts(d, blocks, base))
    }

    fn from_parts(d: usize, blocks: Vec<CMatrix>, base: Arc<PsdContext>) -> Self {
        let lifted = Arc::new(base.lift(d));
        Self { d, n: base.dim(), blocks, base, lifted }
    }

    fn with_blocks(&self, blocks: Vec<CMatrix>) -> Self {
        Self { d: self.d, n: self.n, blocks, base: Arc::clone(&self.base), lifted: Arc::clone(&self.lifted) }
    }

    /// Splits a `dn x dn` matrix into tiles. Inverse of [`BlockMatrix::flatten`].
    pub fn split(m: &CMatrix, d: usize, base: Arc<PsdContext>) -> Result<Self> {
        let n = base.dim();
        if d == 0 || m.shape() != (d * n, d * n) {
            return Err(Error::RaggedBlocks(format!(
                "{}x{} matrix cannot be split into {d}x{d} tiles of size {n}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut blocks = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                blocks.push(m.view(tile_origin(i, j, n), (n, n)).clone_owned());
            }
        }
        Ok(Self::from_parts(d, blocks, base))
    }

    pub fn zeros(d: usize, base: Arc<PsdContext>) -> Self {
        let n = base.dim();
        Self::from_parts(d, vec![CMatrix::zeros(n, n); d * d], base)
    }

    /// `diag(T_1, ..., T_d)` or its antidiagonal counterpart.
    pub fn structured(entries: &[CMatrix], shape: Shape, base: Arc<PsdContext>) -> Result<Self> {
        let d = entries.len();
        let n = base.dim();
        let mut grid = vec![vec![CMatrix::zeros(n, n); d]; d];
        for (k, entry) in entries.iter().enumerate() {
            let (i, j) = match shape {
                Shape::Diagonal => (k, k),
                Shape::Antidiagonal => (k, d - 1 - k),
            };
            grid[i][j] = entry.clone();
        }
        Self::assemble(grid, base)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Size of each block.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self, i: usize, j: usize) -> &CMatrix {
        &self.blocks[i * self.d + j]
    }

    /// Block `(i, j)` as an operator on the base context.
    pub fn block_op(&self, i: usize, j: usize) -> Operator {
        Operator::new(self.block(i, j).clone(), Arc::clone(&self.base)).expect("block shape checked at assembly")
    }

    pub fn base_context(&self) -> &Arc<PsdContext> {
        &self.base
    }

    pub fn lifted_context(&self) -> &Arc<PsdContext> {
        &self.lifted
    }

    /// The `dn x dn` operator against the lifted context.
    pub fn flatten(&self) -> Operator {
        let (d, n) = (self.d, self.n);
        let mut m = CMatrix::zeros(d * n, d * n);
        for i in 0..d {
            for j in 0..d {
                m.view_mut(tile_origin(i, j, n), (n, n)).copy_from(self.block(i, j));
            }
        }
        Operator::new(m, Arc::clone(&self.lifted)).expect("lifted context has matching dimension")
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.with_blocks(self.blocks.iter().map(|b| b * linalg::C64::new(c, 0.0)).collect())
    }

    /// Verifies that every block admits an `A`-adjoint.
    pub fn check_blocks_in_ba(&self, tol: &ToleranceConfig) -> Result<()> {
        for i in 0..self.d {
            for j in 0..self.d {
                if !self.block_op(i, j).in_ba(tol) {
                    return Err(Error::BlockNotInBA { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Blockwise `A`-adjoint: block `(i, j)` of the result is `T_{ji}^{#_A}`.
    pub fn block_sharp(&self, tol: &ToleranceConfig) -> Result<Self> {
        let d = self.d;
        let mut blocks = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let sharp = self
                    .block_op(j, i)
                    .a_adjoint(tol)
                    .map_err(|_| Error::BlockNotInBA { row: j, col: i })?;
                blocks.push(sharp.into_matrix());
            }
        }
        Ok(self.with_blocks(blocks))
    }

    /// `(||T_ij||_A)`, a nonnegative `d x d` matrix.
    pub fn hat_matrix(&self, tol: &ToleranceConfig) -> Result<DMatrix<f64>> {
        let d = self.d;
        let mut hat = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                hat[(i, j)] = self
                    .block_op(i, j)
                    .try_a_op_norm(tol)
                    .map_err(|_| Error::BlockNotABounded { row: i, col: j })?;
            }
        }
        Ok(hat)
    }
}

/// The block permutation `U_k`: identities on the antidiagonal of the leading
/// `k x k` corner and on the trailing diagonal. Entries are exact zeros and ones.
pub fn u_k(k: usize, d: usize, base: Arc<PsdContext>) -> Result<BlockMatrix> {
    if k < 2 || k > d {
        return Err(Error::BadIndex { k, d });
    }
    let n = base.dim();
    let mut grid = vec![vec![CMatrix::zeros(n, n); d]; d];
    for i in 0..k {
        grid[i][k - 1 - i] = linalg::identity(n);
    }
    for (i, row) in grid.iter_mut().enumerate().skip(k) {
        row[i] = linalg::identity(n);
    }
    BlockMatrix::assemble(grid, base)
}

/// `diag(P, ..., P)` with `P` the range projection of the base context.
pub fn lifted_projection(bm: &BlockMatrix) -> Operator {
    Operator::range_projection(Arc::clone(bm.lifted_context()))
}

/// `max_i ||T_i||_A`, the `A`-seminorm of the diagonal or antidiagonal block
/// matrix built from `entries`.
pub fn structured_norm(entries: &[Operator], _shape: Shape, tol: &ToleranceConfig) -> Result<f64> {
    entries.iter().try_fold(0.0_f64, |acc, t| Ok(acc.max(t.try_a_op_norm(tol)?)))
}

/// `max_i w_A(T_i)`, the `A`-numerical radius of `diag(T_1, ..., T_d)`.
pub fn structured_omega(entries: &[Operator], tol: &ToleranceConfig) -> Result<f64> {
    entries.iter().try_fold(0.0_f64, |acc, t| Ok(acc.max(radii::a_numerical_radius(t, tol)?)))
}
