//! Q-dual fusion frames.
//!
//! `(V, v)` is a dual of `(W, w)` when some `Q: ⊕W_i → ⊕V_j` satisfies
//! `T_{V,v} Q T_{W,w}^* = I`. All operators are taken in the block coordinates
//! fixed by the stored subspace bases.

mod block;

pub use block::{classify_q, BlockOp, QClass};

use crate::error::{Error, Result};
use crate::fusion::FusionFrame;
use crate::linalg::{
    frobenius_norm, intersect, orth_complement_within, re, span, span_union, Mat, Subspace, Vector, RANK_TOL,
};

/// Default certification tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Principal-angle tolerance used to detect nontrivial intersections.
pub const INTERSECTION_TOL: f64 = 1e-8;

/// A certified pair `(W, w)`, `(V, v)` together with its `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QDualPair {
    pub primal: FusionFrame,
    pub dual: FusionFrame,
    pub q: BlockOp,
    pub residual: f64,
    pub tol: f64,
}

impl QDualPair {
    /// `T_{V,v} Q`, the left inverse of `T_{W,w}^*` realized by the pair.
    pub fn left_inverse(&self) -> Mat {
        self.dual.synthesis_matrix() * self.q.matrix()
    }

    /// `T_{V,v} Q T_{W,w}^*`, the identity up to `residual`.
    pub fn reconstruction_operator(&self) -> Mat {
        self.left_inverse() * self.primal.analysis_matrix()
    }

    /// `Σ_j v_j (Q(w_i π_{W_i} f)_i)_j`.
    pub fn reconstruct(&self, f: &Vector) -> Vector {
        let coords = self.primal.analysis(f).to_flat();
        self.dual.synthesis_matrix() * (self.q.matrix() * coords)
    }

    pub fn q_class(&self, tol: f64) -> QClass {
        self.q.classify(tol)
    }

    /// The reversed pair: `(W, w)` is a `Q^*`-dual of `(V, v)`.
    pub fn swapped(&self) -> Result<QDualPair> {
        is_q_dual(&self.dual, &self.primal, &self.q.adjoint(), self.tol)
    }
}

fn duality_residual(w: &FusionFrame, v: &FusionFrame, q: &BlockOp) -> Result<f64> {
    if w.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: w.ambient_dim(),
            found: v.ambient_dim(),
        });
    }
    if q.col_dims() != w.dims().as_slice() || q.row_dims() != v.dims().as_slice() {
        return Err(Error::ShapeMismatch(format!(
            "Q maps blocks {:?} to {:?}, expected {:?} to {:?}",
            q.col_dims(),
            q.row_dims(),
            w.dims(),
            v.dims()
        )));
    }
    let d = w.ambient_dim();
    let r = v.synthesis_matrix() * q.matrix() * w.analysis_matrix();
    Ok(frobenius_norm(&(r - Mat::identity(d, d))))
}

/// Certifies `T_{V,v} Q T_{W,w}^* = I` within `tol` (Frobenius residual).
pub fn is_q_dual(w: &FusionFrame, v: &FusionFrame, q: &BlockOp, tol: f64) -> Result<QDualPair> {
    let residual = duality_residual(w, v, q)?;
    if residual > tol {
        return Err(Error::NotDual { residual, tol });
    }
    Ok(QDualPair {
        primal: w.clone(),
        dual: v.clone(),
        q: q.clone(),
        residual,
        tol,
    })
}

fn check_weights(w: &FusionFrame, v: &[f64]) -> Result<()> {
    if v.len() != w.len() {
        return Err(Error::LengthMismatch(format!(
            "{} dual weights for {} subspaces",
            v.len(),
            w.len()
        )));
    }
    for (index, &value) in v.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidWeight { index, value });
        }
    }
    Ok(())
}

/// Columns of block `i` of a `d × Σn_i` matrix.
pub(crate) fn column_block(a: &Mat, offset: usize, n: usize) -> Mat {
    a.columns(offset, n).into_owned()
}

/// Builds the dual `(span A_i, v)` with diagonal `Q` blocks `(1/v_i) C_i^* A_i`,
/// where `A_i` are the column blocks of `a` and `C_i` the new bases.
fn dual_from_blocks(w: &FusionFrame, a_blocks: &[Mat], v: &[f64], tol: f64) -> Result<QDualPair> {
    let subspaces: Vec<Subspace> = a_blocks.iter().map(|b| span(b, RANK_TOL)).collect();
    let q_blocks: Vec<Mat> = subspaces
        .iter()
        .zip(a_blocks)
        .zip(v)
        .map(|((s, b), &vi)| s.basis().adjoint() * b * re(1.0 / vi))
        .collect();
    let dual = FusionFrame::with_ambient_dim(w.ambient_dim(), subspaces, v.to_vec())?;
    let q = BlockOp::block_diagonal(&dual.dims(), &w.dims(), q_blocks)?;
    is_q_dual(w, &dual, &q, tol)
}

fn split_columns(w: &FusionFrame, a: &Mat) -> Vec<Mat> {
    w.offsets()
        .iter()
        .zip(w.dims())
        .map(|(&o, n)| column_block(a, o, n))
        .collect()
}

/// The canonical dual `(S^{-1}W, v)` with `Q` blocks `(w_i/v_i) C_i^* S^{-1} B_i`.
pub fn canonical_dual(w: &FusionFrame, v: &[f64]) -> Result<QDualPair> {
    check_weights(w, v)?;
    let s_inv = w.fusion_operator_inverse()?;
    let blocks: Vec<Mat> = w
        .subspaces()
        .iter()
        .zip(w.weights())
        .map(|(s, &wi)| &s_inv * s.basis() * re(wi))
        .collect();
    dual_from_blocks(w, &blocks, v, DEFAULT_TOL)
}

/// `𝔏_{T^*} = { A_0 + Z P }`, the left inverses of the analysis operator.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFamily {
    /// `S^{-1} T`.
    pub a0: Mat,
    /// Orthogonal projector onto `ker T`.
    pub p: Mat,
    /// Orthonormal basis of `ker T` (`P = K K^*`).
    pub kernel: Mat,
}

impl AffineFamily {
    pub fn member(&self, z: &Mat) -> Mat {
        &self.a0 + z * &self.p
    }

    /// `A_0 + Y K^*`, with `Y` of size `d × dim ker T`.
    pub fn member_from_coordinates(&self, y: &Mat) -> Mat {
        &self.a0 + y * self.kernel.adjoint()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.ncols()
    }
}

/// Orthonormal basis of the kernel of `t`.
pub(crate) fn kernel_basis(t: &Mat) -> Mat {
    let n = t.ncols();
    let row_space = span(&t.adjoint(), RANK_TOL);
    let complement = Mat::identity(n, n) - row_space.projector();
    // a projector: singular values are ≈1 on the kernel and ≈0 elsewhere
    let dec = crate::linalg::svd(&complement);
    let k = dec.singular_values.iter().filter(|&&s| s > 0.5).count();
    span(&dec.u.columns(0, k).into_owned(), 0.5).basis().clone()
}

/// Parametrizes every left inverse of an injective adjoint `t^*`.
pub(crate) fn left_inverse_family(t: &Mat, s_inv: &Mat) -> AffineFamily {
    let kernel = kernel_basis(t);
    AffineFamily {
        a0: s_inv * t,
        p: &kernel * kernel.adjoint(),
        kernel,
    }
}

pub fn left_inverses_parametrization(w: &FusionFrame) -> Result<AffineFamily> {
    let s_inv = w.fusion_operator_inverse()?;
    Ok(left_inverse_family(&w.synthesis_matrix(), &s_inv))
}

/// `‖A T_{W,w}^* − I‖_F`.
pub fn left_inverse_residual(w: &FusionFrame, a: &Mat) -> Result<f64> {
    let d = w.ambient_dim();
    if a.shape() != (d, w.total_dim()) {
        return Err(Error::ShapeMismatch(format!(
            "left inverse must be {}×{}, got {}×{}",
            d,
            w.total_dim(),
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(frobenius_norm(&(a * w.analysis_matrix() - Mat::identity(d, d))))
}

/// The component preserving dual `(A M_i W, v)` with `Q = Q_{A,v}`.
pub fn dual_from_left_inverse(w: &FusionFrame, a: &Mat, v: &[f64], tol: f64) -> Result<QDualPair> {
    check_weights(w, v)?;
    let residual = left_inverse_residual(w, a)?;
    if residual > tol {
        return Err(Error::NotLeftInverse { residual, tol });
    }
    dual_from_blocks(w, &split_columns(w, a), v, tol)
}

/// A dual that differs from every canonical dual, obtained by shrinking the
/// first subspace that meets the span of the others.
pub fn noncanonical_dual(w: &FusionFrame, tol: f64) -> Result<(QDualPair, usize)> {
    if let Some(index) = w.subspaces().iter().position(Subspace::is_zero) {
        return Err(Error::TrivialSubspace { index });
    }
    if !w.is_fusion_frame() || w.is_riesz() {
        return Err(Error::NotOvercomplete);
    }
    let d = w.ambient_dim();
    let m = w.len();
    let mut found = None;
    for i0 in 0..m {
        let others = w
            .subspaces()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != i0)
            .try_fold(Subspace::zero(d), |acc, (_, s)| span_union(&acc, s, RANK_TOL))?;
        let z = intersect(w.subspace(i0), &others, INTERSECTION_TOL)?;
        if !z.is_zero() {
            found = Some((i0, z));
            break;
        }
    }
    let (i0, z) = found.ok_or(Error::NotOvercomplete)?;
    let shrunk = orth_complement_within(w.subspace(i0), &z, 1e-6)?;
    let mut reduced = w.subspaces().to_vec();
    reduced[i0] = shrunk;
    let w_tilde = FusionFrame::with_ambient_dim(d, reduced, w.weights().to_vec())?;
    let s_inv = w_tilde.fusion_operator_inverse()?;

    let mut dual_subspaces = Vec::with_capacity(m);
    let mut blocks = Vec::with_capacity(m);
    for i in 0..m {
        let bt = w_tilde.subspace(i).basis();
        let vi = span(&(&s_inv * bt), RANK_TOL);
        blocks.push(vi.basis().adjoint() * &s_inv * bt * bt.adjoint() * w.subspace(i).basis());
        dual_subspaces.push(vi);
    }
    let dual = FusionFrame::with_ambient_dim(d, dual_subspaces, w.weights().to_vec())?;
    let q = BlockOp::block_diagonal(&dual.dims(), &w.dims(), blocks)?;
    Ok((is_q_dual(w, &dual, &q, tol)?, i0))
}

/// For a Riesz fusion basis and a block-diagonal dual: `S^{-1} W_i ⊆ V_i` for all `i`.
pub fn riesz_dual_containment_check(w: &FusionFrame, pair: &QDualPair, tol: f64) -> Result<bool> {
    if !w.is_riesz() {
        return Err(Error::NotRiesz);
    }
    if !pair.q.is_block_diagonal(tol) {
        return Err(Error::NotBlockDiagonal);
    }
    let s_inv = w.fusion_operator_inverse()?;
    Ok(w.subspaces()
        .iter()
        .zip(pair.dual.subspaces())
        .all(|(wi, vi)| vi.contains(&wi.image(&s_inv, RANK_TOL), tol)))
}

/// Converts an alternate dual, `f = Σ w_i v_i π_{V_i} S^{-1} π_{W_i} f`, into a
/// component preserving Q-dual with subspaces `π_{V_i} S^{-1} W_i`.
pub fn alternate_dual_to_q_dual(w: &FusionFrame, v: &FusionFrame, tol: f64) -> Result<QDualPair> {
    if v.len() != w.len() || v.ambient_dim() != w.ambient_dim() {
        return Err(Error::LengthMismatch(format!(
            "{} dual subspaces for {} subspaces",
            v.len(),
            w.len()
        )));
    }
    let s_inv = w.fusion_operator_inverse()?;
    let blocks: Vec<Mat> = w
        .subspaces()
        .iter()
        .zip(v.subspaces())
        .zip(v.weights())
        .map(|((wi, vi), &vw)| vi.projector() * &s_inv * wi.basis() * re(vw))
        .collect();
    let a = crate::linalg::hstack(w.ambient_dim(), &blocks.iter().collect::<Vec<_>>());
    let residual = left_inverse_residual(w, &a)?;
    if residual > tol {
        return Err(Error::NotAlternateDual { residual, tol });
    }
    dual_from_left_inverse(w, &a, v.weights(), tol)
}
