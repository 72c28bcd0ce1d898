//! Weighted families of subspaces and their operators.
//!
//! An element of the direct sum `W = W_1 ⊕ … ⊕ W_m` is held in coordinates:
//! block `i` is a vector of length `dim W_i` relative to the orthonormal basis
//! `B_i` stored in the `i`-th [`Subspace`]. With that convention the synthesis
//! operator is the `d × Σn_i` matrix `[w_1 B_1 | … | w_m B_m]`.

use serde::Serialize;

use crate::duality::BlockOp;
use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_norm, hermitian_eigenvalues, inverse_hpd, rank, re, spectral_norm, Mat, Subspace, Vector, RANK_TOL,
};

/// Relative tolerance of the tightness and Parseval tests.
pub const TIGHT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct FusionFrame {
    ambient_dim: usize,
    subspaces: Vec<Subspace>,
    weights: Vec<f64>,
}

/// A vector of `W = ⊕W_i` in block coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    pub blocks: Vec<Vector>,
}

impl BlockVector {
    pub fn zeros(dims: &[usize]) -> Self {
        Self {
            blocks: dims.iter().map(|&n| Vector::zeros(n)).collect(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Splits a stacked coordinate vector into blocks of the given sizes.
    pub fn from_flat(flat: &Vector, dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().sum();
        if flat.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: flat.len(),
            });
        }
        let mut offset = 0;
        let blocks = dims
            .iter()
            .map(|&n| {
                let b = flat.rows(offset, n).into_owned();
                offset += n;
                b
            })
            .collect();
        Ok(Self { blocks })
    }

    pub fn to_flat(&self) -> Vector {
        let total: usize = self.blocks.iter().map(|b| b.len()).sum();
        let mut out = Vector::zeros(total);
        let mut offset = 0;
        for b in &self.blocks {
            out.rows_mut(offset, b.len()).copy_from(b);
            offset += b.len();
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }
}

/// Structural flags of a fusion frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub ambient_dim: usize,
    pub subspace_count: usize,
    pub dims: Vec<usize>,
    pub total_dim: usize,
    pub rank: usize,
    pub bounds: Option<(f64, f64)>,
    pub is_fusion_frame: bool,
    pub is_tight: bool,
    pub is_parseval: bool,
    pub is_riesz: bool,
    pub is_orthonormal_basis: bool,
    pub is_overcomplete: bool,
    /// Common weight if all weights agree.
    pub uniform_weight: Option<f64>,
    /// Common dimension if all subspaces have the same dimension.
    pub equi_dimension: Option<usize>,
}

impl FusionFrame {
    /// Builds a Bessel fusion sequence. The subspaces need not span; use
    /// [`FusionFrame::is_fusion_frame`] or [`FusionFrame::fusion_bounds`] for that.
    pub fn new(subspaces: Vec<Subspace>, weights: Vec<f64>) -> Result<Self> {
        let d = subspaces
            .first()
            .map(Subspace::ambient_dim)
            .ok_or_else(|| Error::LengthMismatch("a fusion frame needs at least one subspace".into()))?;
        Self::with_ambient_dim(d, subspaces, weights)
    }

    pub fn with_ambient_dim(ambient_dim: usize, subspaces: Vec<Subspace>, weights: Vec<f64>) -> Result<Self> {
        if subspaces.len() != weights.len() {
            return Err(Error::LengthMismatch(format!(
                "{} subspaces but {} weights",
                subspaces.len(),
                weights.len()
            )));
        }
        for s in &subspaces {
            if s.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: s.ambient_dim(),
                });
            }
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        Ok(Self {
            ambient_dim,
            subspaces,
            weights,
        })
    }

    /// Same subspaces, new weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        Self::with_ambient_dim(self.ambient_dim, self.subspaces.clone(), weights.to_vec())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn subspace(&self, i: usize) -> &Subspace {
        &self.subspaces[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subspaces.iter().map(Subspace::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.subspaces.iter().map(Subspace::dim).sum()
    }

    /// Start of each block inside a stacked coordinate vector.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.subspaces
            .iter()
            .map(|s| {
                let o = acc;
                acc += s.dim();
                o
            })
            .collect()
    }

    /// `T_{W,w} = [w_1 B_1 | … | w_m B_m]`.
    pub fn synthesis_matrix(&self) -> Mat {
        let mut t = Mat::zeros(self.ambient_dim, self.total_dim());
        let mut offset = 0;
        for (s, &w) in self.subspaces.iter().zip(&self.weights) {
            t.view_mut((0, offset), (self.ambient_dim, s.dim()))
                .copy_from(&(s.basis() * re(w)));
            offset += s.dim();
        }
        t
    }

    /// `T_{W,w}^*`, which sends `f` to the coordinates of `(w_i π_{W_i} f)_i`.
    pub fn analysis_matrix(&self) -> Mat {
        self.synthesis_matrix().adjoint()
    }

    pub fn analysis(&self, f: &Vector) -> BlockVector {
        let blocks = self
            .subspaces
            .iter()
            .zip(&self.weights)
            .map(|(s, &w)| s.basis().adjoint() * f * re(w))
            .collect();
        BlockVector { blocks }
    }

    pub fn synthesis(&self, x: &BlockVector) -> Result<Vector> {
        if x.dims() != self.dims() {
            return Err(Error::ShapeMismatch(format!(
                "block vector of shape {:?} for subspaces of dimensions {:?}",
                x.dims(),
                self.dims()
            )));
        }
        let mut out = Vector::zeros(self.ambient_dim);
        for ((s, &w), b) in self.subspaces.iter().zip(&self.weights).zip(&x.blocks) {
            out += s.basis() * b * re(w);
        }
        Ok(out)
    }

    /// `S_{W,w} = Σ w_i² π_{W_i}`.
    pub fn fusion_operator(&self) -> Mat {
        let d = self.ambient_dim;
        self.subspaces
            .iter()
            .zip(&self.weights)
            .fold(Mat::zeros(d, d), |acc, (s, &w)| acc + s.projector() * re(w * w))
    }

    pub fn rank(&self) -> usize {
        rank(&self.synthesis_matrix(), RANK_TOL)
    }

    pub fn is_fusion_frame(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    fn require_fusion_frame(&self) -> Result<()> {
        let r = self.rank();
        if r < self.ambient_dim {
            return Err(Error::NotAFusionFrame {
                rank: r,
                dim: self.ambient_dim,
            });
        }
        Ok(())
    }

    /// Optimal fusion frame bounds `(λ_min, λ_max)` of `S_{W,w}`.
    pub fn fusion_bounds(&self) -> Result<(f64, f64)> {
        self.require_fusion_frame()?;
        let ev = hermitian_eigenvalues(&self.fusion_operator());
        Ok((ev[0], ev[ev.len() - 1]))
    }

    pub fn fusion_operator_inverse(&self) -> Result<Mat> {
        self.require_fusion_frame()?;
        inverse_hpd(&self.fusion_operator()).ok_or(Error::NotAFusionFrame {
            rank: self.rank(),
            dim: self.ambient_dim,
        })
    }

    pub fn is_riesz(&self) -> bool {
        self.total_dim() == self.ambient_dim && self.is_fusion_frame()
    }

    pub fn classify(&self) -> ClassificationReport {
        let rank = self.rank();
        let is_fusion_frame = rank == self.ambient_dim;
        let bounds = if is_fusion_frame {
            self.fusion_bounds().ok()
        } else {
            None
        };
        let (is_tight, is_parseval) = match bounds {
            Some((a, b)) => {
                let tight = (b - a).abs() <= TIGHT_TOL * b;
                (
                    tight,
                    tight && (a - 1.0).abs() <= TIGHT_TOL && (b - 1.0).abs() <= TIGHT_TOL,
                )
            }
            None => (false, false),
        };
        let is_riesz = is_fusion_frame && self.total_dim() == self.ambient_dim;
        let mutually_orthogonal = (0..self.len()).all(|i| {
            (i + 1..self.len()).all(|j| {
                let cross = self.subspaces[i].basis().adjoint() * self.subspaces[j].basis();
                frobenius_norm(&cross) <= TIGHT_TOL
            })
        });
        let unit_weights = self.weights.iter().all(|&w| (w - 1.0).abs() <= TIGHT_TOL);
        let w0 = self.weights.first().copied();
        let uniform_weight = w0.filter(|&w0| self.weights.iter().all(|&w| (w - w0).abs() <= TIGHT_TOL * w0));
        let dims = self.dims();
        let equi_dimension = dims.first().copied().filter(|&n| dims.iter().all(|&k| k == n));
        ClassificationReport {
            ambient_dim: self.ambient_dim,
            subspace_count: self.len(),
            total_dim: self.total_dim(),
            dims,
            rank,
            bounds,
            is_fusion_frame,
            is_tight,
            is_parseval,
            is_riesz,
            is_orthonormal_basis: is_riesz && mutually_orthogonal && unit_weights,
            is_overcomplete: is_fusion_frame && !is_riesz,
            uniform_weight,
            equi_dimension,
        }
    }

    /// Unitary change of block coordinates from the stored bases to the bases
    /// of `other`, which must consist of the same subspaces. Coordinates `x`
    /// relative to `self` become `U·x` relative to `other`.
    pub fn change_of_basis(&self, other: &FusionFrame, tol: f64) -> Result<BlockOp> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(format!(
                "{} subspaces against {}",
                self.len(),
                other.len()
            )));
        }
        let mut blocks = Vec::with_capacity(self.len());
        for (a, b) in self.subspaces.iter().zip(&other.subspaces) {
            if a.dim() != b.dim() || spectral_norm(&(a.projector() - b.projector())) > tol {
                return Err(Error::ShapeMismatch(
                    "change of basis between different subspaces".into(),
                ));
            }
            blocks.push(b.basis().adjoint() * a.basis());
        }
        BlockOp::block_diagonal(&other.dims(), &self.dims(), blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{orthonormalize, real_columns, real_matrix};
    use crate::sampling::{random_fusion_frame, random_matrix, random_uniform_parseval, seeded};

    fn example_6_3(w1: f64, w2: f64) -> FusionFrame {
        let w1s = orthonormalize(&real_columns(3, &[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]), RANK_TOL).unwrap();
        let w2s = orthonormalize(&real_columns(3, &[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]), RANK_TOL).unwrap();
        FusionFrame::new(vec![w1s, w2s], vec![w1, w2]).unwrap()
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let s = Subspace::full(2);
        assert_eq!(
            FusionFrame::new(vec![s.clone(), s], vec![1.0, 0.0]),
            Err(Error::InvalidWeight { index: 1, value: 0.0 })
        );
    }

    #[test]
    fn example_6_3_synthesis_columns() {
        let ff = example_6_3(2.0, 3.0);
        let t = ff.synthesis_matrix();
        let expected = real_matrix(3, 4, &[0.0, 0.0, 3.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 3.0]);
        assert!(frobenius_norm(&(t - expected)) < 1e-14);
    }

    #[test]
    fn example_6_3_fusion_operator_is_diagonal() {
        let (w1, w2) = (1.5, 0.7);
        let ff = example_6_3(w1, w2);
        let s = ff.fusion_operator();
        let expected = real_matrix(
            3,
            3,
            &[w2 * w2, 0.0, 0.0, 0.0, w1 * w1, 0.0, 0.0, 0.0, w1 * w1 + w2 * w2],
        );
        assert!(frobenius_norm(&(s - expected)) < 1e-14);
        let c = ff.classify();
        assert!(c.is_overcomplete && !c.is_riesz);
        assert_eq!(c.equi_dimension, Some(2));
        let (a, b) = c.bounds.unwrap();
        assert!((a - w2 * w2).abs() < 1e-12 && (b - (w1 * w1 + w2 * w2)).abs() < 1e-12);
    }

    #[test]
    fn three_coordinate_lines_form_orthonormal_basis() {
        let lines = (0..3)
            .map(|k| Subspace::from_orthonormal_basis(Mat::identity(3, 3).columns(k, 1).into_owned(), 1e-12).unwrap())
            .collect();
        let ff = FusionFrame::new(lines, vec![1.0; 3]).unwrap();
        let t = ff.synthesis_matrix();
        assert!(frobenius_norm(&(&t * t.adjoint() - Mat::identity(3, 3))) < 1e-14);
        let c = ff.classify();
        assert!(c.is_orthonormal_basis && c.is_parseval && c.is_riesz);
        assert_eq!(c.uniform_weight, Some(1.0));
    }

    #[test]
    fn non_spanning_family_has_no_bounds() {
        let s = orthonormalize(&real_columns(3, &[vec![1.0, 0.0, 0.0]]), RANK_TOL).unwrap();
        let ff = FusionFrame::new(vec![s], vec![1.0]).unwrap();
        assert_eq!(ff.fusion_bounds(), Err(Error::NotAFusionFrame { rank: 1, dim: 3 }));
        assert!(!ff.classify().is_fusion_frame);
    }

    #[test]
    fn synthesis_times_analysis_is_fusion_operator() {
        let mut rng = seeded(11);
        for complex in [false, true] {
            let ff = random_fusion_frame(&mut rng, 5, 4, complex);
            let t = ff.synthesis_matrix();
            assert!(frobenius_norm(&(&t * t.adjoint() - ff.fusion_operator())) < 1e-12);
            let ev = hermitian_eigenvalues(&ff.fusion_operator());
            let (a, b) = ff.fusion_bounds().unwrap();
            assert_eq!((a, b), (ev[0], ev[4]));
        }
    }

    #[test]
    fn riesz_iff_square_invertible_synthesis() {
        let mut rng = seeded(12);
        for _ in 0..20 {
            let ff = random_fusion_frame(&mut rng, 4, 3, true);
            let t = ff.synthesis_matrix();
            let square_invertible = t.ncols() == 4 && rank(&t, RANK_TOL) == 4;
            assert_eq!(ff.classify().is_riesz, square_invertible);
        }
    }

    #[test]
    fn analysis_then_synthesis_applies_fusion_operator() {
        let mut rng = seeded(13);
        let ff = random_fusion_frame(&mut rng, 4, 3, true);
        let f = random_matrix(&mut rng, 4, 1, true).column(0).into_owned();
        let x = ff.analysis(&f);
        let back = ff.synthesis(&x).unwrap();
        assert!((back - ff.fusion_operator() * &f).norm() < 1e-12);
        let flat = x.to_flat();
        assert_eq!(BlockVector::from_flat(&flat, &ff.dims()).unwrap(), x);
    }

    #[test]
    fn uniform_parseval_has_unit_bounds() {
        let mut rng = seeded(14);
        let ff = random_uniform_parseval(&mut rng, 6, 2, 3, true);
        let c = ff.classify();
        assert!(c.is_parseval);
        assert_eq!(c.equi_dimension, Some(2));
        assert!(c.uniform_weight.is_some());
    }

    #[test]
    fn change_of_basis_is_unitary_and_intertwines_synthesis() {
        let mut rng = seeded(15);
        let ff = random_fusion_frame(&mut rng, 4, 3, true);
        let rotated: Vec<Subspace> = ff
            .subspaces()
            .iter()
            .map(|s| {
                let n = s.dim();
                let u = crate::linalg::svd(&random_matrix(&mut rng, n, n, true)).u;
                Subspace::from_orthonormal_basis(s.basis() * u, 1e-10).unwrap()
            })
            .collect();
        let other = FusionFrame::new(rotated, ff.weights().to_vec()).unwrap();
        let u = ff.change_of_basis(&other, 1e-9).unwrap();
        let lhs = other.synthesis_matrix() * u.matrix();
        assert!(frobenius_norm(&(lhs - ff.synthesis_matrix())) < 1e-12);
    }
}
