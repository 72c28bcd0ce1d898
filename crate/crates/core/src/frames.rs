//! Classical finite frames: synthesis, analysis and frame operators, optimal
//! frame bounds and dual frames.

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, hermitian_eigenvalues, inverse_hpd, pinv, rank, Mat, Subspace, RANK_TOL};

/// A finite family of vectors in `F^d`, stored as the columns of a `d × m` matrix.
///
/// Zero vectors are allowed; whether the family spans is a rank question.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    vectors: Mat,
    label: Option<String>,
}

impl Frame {
    pub fn from_matrix(ambient_dim: usize, vectors: Mat) -> Self {
        assert_eq!(vectors.nrows(), ambient_dim, "frame vectors must have length d");
        Self { vectors, label: None }
    }

    pub fn from_columns(ambient_dim: usize, columns: &[crate::linalg::Vector]) -> Self {
        let mut m = Mat::zeros(ambient_dim, columns.len());
        for (j, c) in columns.iter().enumerate() {
            m.set_column(j, c);
        }
        Self::from_matrix(ambient_dim, m)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vectors(&self) -> &Mat {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> crate::linalg::Vector {
        self.vectors.column(i).into_owned()
    }

    /// `T_F`, the `d × m` matrix with the frame vectors as columns.
    pub fn synthesis(&self) -> Mat {
        self.vectors.clone()
    }

    /// `T_F^*`.
    pub fn analysis(&self) -> Mat {
        self.vectors.adjoint()
    }

    /// `S_F = T_F T_F^*`.
    pub fn frame_operator(&self) -> Mat {
        &self.vectors * self.vectors.adjoint()
    }

    pub fn rank(&self) -> usize {
        rank(&self.vectors, RANK_TOL)
    }

    pub fn is_frame(&self) -> bool {
        self.rank() == self.ambient_dim()
    }

    /// The subspace spanned by the vectors.
    pub fn span(&self) -> Subspace {
        crate::linalg::span(&self.vectors, RANK_TOL)
    }

    fn require_frame(&self) -> Result<()> {
        let r = self.rank();
        if r < self.ambient_dim() {
            return Err(Error::NotAFrame {
                rank: r,
                dim: self.ambient_dim(),
            });
        }
        Ok(())
    }

    /// Optimal frame bounds `(λ_min(S_F), λ_max(S_F))`.
    pub fn frame_bounds(&self) -> Result<(f64, f64)> {
        self.require_frame()?;
        let ev = hermitian_eigenvalues(&self.frame_operator());
        Ok((ev[0], ev[ev.len() - 1]))
    }

    /// Optimal bounds of the family as a frame for its own span: extreme nonzero
    /// eigenvalues of `S_F`.
    pub fn frame_bounds_on_span(&self) -> Option<(f64, f64)> {
        let r = self.rank();
        if r == 0 {
            return None;
        }
        let ev = hermitian_eigenvalues(&self.frame_operator());
        let top = &ev[ev.len() - r..];
        Some((top[0], top[r - 1]))
    }

    /// The canonical dual `{S_F^{-1} f_i}`.
    pub fn canonical_dual(&self) -> Result<Frame> {
        self.require_frame()?;
        let s_inv = inverse_hpd(&self.frame_operator()).ok_or(Error::NotAFrame {
            rank: self.rank(),
            dim: self.ambient_dim(),
        })?;
        Ok(Frame::from_matrix(self.ambient_dim(), s_inv * &self.vectors))
    }

    /// Canonical dual of the family as a frame for its span: `{S_F^† f_i}`.
    pub fn canonical_dual_on_span(&self) -> Frame {
        let s_pinv = pinv(&self.frame_operator(), RANK_TOL);
        Frame::from_matrix(self.ambient_dim(), s_pinv * &self.vectors)
    }

    /// Scales every vector by `factor`.
    pub fn scaled(&self, factor: f64) -> Frame {
        Frame {
            vectors: &self.vectors * crate::linalg::re(factor),
            label: self.label.clone(),
        }
    }
}

fn check_lengths(f: &Frame, g: &Frame) -> Result<()> {
    if f.ambient_dim() != g.ambient_dim() || f.len() != g.len() {
        return Err(Error::LengthMismatch(format!(
            "frames of shape {}×{} and {}×{}",
            f.ambient_dim(),
            f.len(),
            g.ambient_dim(),
            g.len()
        )));
    }
    Ok(())
}

/// `‖T_G T_F^* − I‖_F`.
pub fn dual_residual(f: &Frame, g: &Frame) -> Result<f64> {
    check_lengths(f, g)?;
    let d = f.ambient_dim();
    Ok(frobenius_norm(&(g.synthesis() * f.analysis() - Mat::identity(d, d))))
}

/// Whether `G` is a dual frame of `F`: `‖T_G T_F^* − I‖_F ≤ tol`.
pub fn is_dual_frame(f: &Frame, g: &Frame, tol: f64) -> Result<bool> {
    Ok(dual_residual(f, g)? <= tol)
}

/// Residual of duality inside a subspace `W` containing both families:
/// `max(‖T_G T_F^* − π_W‖_F, ‖(I − π_W) T_G‖_F)`.
pub fn local_dual_residual(f: &Frame, g: &Frame, w: &Subspace) -> Result<f64> {
    check_lengths(f, g)?;
    let d = f.ambient_dim();
    let p = w.projector();
    let recon = frobenius_norm(&(g.synthesis() * f.analysis() - &p));
    let outside = frobenius_norm(&((Mat::identity(d, d) - &p) * g.vectors()));
    Ok(recon.max(outside))
}
