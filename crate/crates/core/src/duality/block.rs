use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, re, singular_values, Mat};

/// Operator between direct sums, `⊕_i F^{col_dims[i]} → ⊕_j F^{row_dims[j]}`,
/// stored as one dense matrix partitioned into a grid of blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOp {
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
    mat: Mat,
}

/// Structure of a duality operator `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QClass {
    General,
    BlockDiagonal,
    ComponentPreserving,
}

impl std::fmt::Display for QClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            QClass::General => "general",
            QClass::BlockDiagonal => "block_diagonal",
            QClass::ComponentPreserving => "component_preserving",
        })
    }
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .scan(0, |acc, &n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect()
}

impl BlockOp {
    pub fn new(row_dims: Vec<usize>, col_dims: Vec<usize>, mat: Mat) -> Result<Self> {
        let rows: usize = row_dims.iter().sum();
        let cols: usize = col_dims.iter().sum();
        if mat.shape() != (rows, cols) {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}×{} but block dimensions give {}×{}",
                mat.nrows(),
                mat.ncols(),
                rows,
                cols
            )));
        }
        Ok(Self {
            row_dims,
            col_dims,
            mat,
        })
    }

    pub fn zeros(row_dims: &[usize], col_dims: &[usize]) -> Self {
        let rows = row_dims.iter().sum();
        let cols = col_dims.iter().sum();
        Self {
            row_dims: row_dims.to_vec(),
            col_dims: col_dims.to_vec(),
            mat: Mat::zeros(rows, cols),
        }
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n = dims.iter().sum();
        Self {
            row_dims: dims.to_vec(),
            col_dims: dims.to_vec(),
            mat: Mat::identity(n, n),
        }
    }

    /// Block-diagonal operator with the given diagonal blocks.
    pub fn block_diagonal(row_dims: &[usize], col_dims: &[usize], blocks: Vec<Mat>) -> Result<Self> {
        if row_dims.len() != col_dims.len() || blocks.len() != row_dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} diagonal blocks for a {}×{} block grid",
                blocks.len(),
                row_dims.len(),
                col_dims.len()
            )));
        }
        let mut op = Self::zeros(row_dims, col_dims);
        for (i, b) in blocks.iter().enumerate() {
            op.set_block(i, i, b)?;
        }
        Ok(op)
    }

    /// The 0/1 diagonal selector `M_J` on blocks of the given sizes.
    pub fn selector(dims: &[usize], selected: &[usize]) -> Self {
        let mut op = Self::zeros(dims, dims);
        let offs = offsets(dims);
        for &i in selected {
            for k in 0..dims[i] {
                op.mat[(offs[i] + k, offs[i] + k)] = re(1.0);
            }
        }
        op
    }

    /// Block-diagonal operator acting on block `i` as `factors[i]·I`.
    pub fn scalar_diagonal(dims: &[usize], factors: &[f64]) -> Self {
        let mut op = Self::zeros(dims, dims);
        let offs = offsets(dims);
        for (i, &n) in dims.iter().enumerate() {
            for k in 0..n {
                op.mat[(offs[i] + k, offs[i] + k)] = re(factors[i]);
            }
        }
        op
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn col_dims(&self) -> &[usize] {
        &self.col_dims
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    pub fn into_matrix(self) -> Mat {
        self.mat
    }

    pub fn block(&self, j: usize, i: usize) -> Mat {
        let ro = offsets(&self.row_dims)[j];
        let co = offsets(&self.col_dims)[i];
        self.mat
            .view((ro, co), (self.row_dims[j], self.col_dims[i]))
            .into_owned()
    }

    pub fn set_block(&mut self, j: usize, i: usize, block: &Mat) -> Result<()> {
        let shape = (self.row_dims[j], self.col_dims[i]);
        if block.shape() != shape {
            return Err(Error::ShapeMismatch(format!(
                "block ({j},{i}) must be {}×{}, got {}×{}",
                shape.0,
                shape.1,
                block.nrows(),
                block.ncols()
            )));
        }
        let ro = offsets(&self.row_dims)[j];
        let co = offsets(&self.col_dims)[i];
        self.mat.view_mut((ro, co), shape).copy_from(block);
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            row_dims: self.col_dims.clone(),
            col_dims: self.row_dims.clone(),
            mat: self.mat.adjoint(),
        }
    }

    /// Composition `self ∘ rhs`.
    pub fn compose(&self, rhs: &BlockOp) -> Result<Self> {
        if self.col_dims != rhs.row_dims {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose: source blocks {:?} against target blocks {:?}",
                self.col_dims, rhs.row_dims
            )));
        }
        Ok(Self {
            row_dims: self.row_dims.clone(),
            col_dims: rhs.col_dims.clone(),
            mat: &self.mat * &rhs.mat,
        })
    }

    /// Largest Frobenius norm among off-diagonal blocks.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.row_dims.len() {
            for i in 0..self.col_dims.len() {
                if i != j {
                    worst = worst.max(frobenius_norm(&self.block(j, i)));
                }
            }
        }
        worst
    }

    pub fn is_block_diagonal(&self, tol: f64) -> bool {
        self.row_dims.len() == self.col_dims.len() && self.off_diagonal_norm() <= tol
    }

    /// Whether the diagonal block `(j, j)` is onto its target block.
    fn diagonal_block_onto(&self, j: usize, tol: f64) -> bool {
        let n = self.row_dims[j];
        if n == 0 {
            return true;
        }
        let s = singular_values(&self.block(j, j));
        let scale = s.first().copied().unwrap_or(0.0).max(1.0);
        s.iter().filter(|&&x| x > tol * scale).count() == n
    }

    pub fn classify(&self, tol: f64) -> QClass {
        if !self.is_block_diagonal(tol) {
            QClass::General
        } else if (0..self.row_dims.len()).all(|j| self.diagonal_block_onto(j, tol)) {
            QClass::ComponentPreserving
        } else {
            QClass::BlockDiagonal
        }
    }
}

/// Structure of `q` at tolerance `tol`.
pub fn classify_q(q: &BlockOp, tol: f64) -> QClass {
    q.classify(tol)
}
