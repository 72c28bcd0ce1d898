//! Fusion frame systems `(W, w, F)`, the coupling operator `C_F`, dual
//! fusion frame systems and projective reconstruction systems.

use crate::duality::{is_q_dual, left_inverse_residual, BlockOp, QDualPair};
use crate::error::{Error, Result};
use crate::frames::{dual_residual, local_dual_residual, Frame};
use crate::fusion::FusionFrame;
use crate::linalg::{
    frobenius_norm, hstack, inverse_hpd, re, singular_values, span, spectral_norm, Mat, Subspace, Vector, RANK_TOL,
};

/// Relative projectivity tolerance: `‖T_i^* T_i − w_i² I‖_F ≤ PROJECTIVE_TOL·w_i²`.
pub const PROJECTIVE_TOL: f64 = 1e-8;

/// A fusion frame together with a local frame for each subspace.
///
/// Local frame vectors are ambient `d`-vectors; their coordinates in the
/// stored basis `B_i` are `B_i^* f_i^l`.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionFrameSystem {
    ff: FusionFrame,
    local_frames: Vec<Frame>,
}

impl FusionFrameSystem {
    /// Checks that every `F_i` lies in `W_i` (within `tol`, relative to the
    /// vector length) and spans it.
    pub fn new(ff: FusionFrame, local_frames: Vec<Frame>, tol: f64) -> Result<Self> {
        if local_frames.len() != ff.len() {
            return Err(Error::InvalidSystem(format!(
                "{} local frames for {} subspaces",
                local_frames.len(),
                ff.len()
            )));
        }
        let d = ff.ambient_dim();
        for (i, (w, f)) in ff.subspaces().iter().zip(&local_frames).enumerate() {
            if f.ambient_dim() != d {
                return Err(Error::InvalidSystem(format!(
                    "local frame {i} lives in dimension {}",
                    f.ambient_dim()
                )));
            }
            let outside = (Mat::identity(d, d) - w.projector()) * f.vectors();
            for (l, col) in outside.column_iter().enumerate() {
                let scale = f.vectors().column(l).norm().max(1.0);
                if col.norm() > tol * scale {
                    return Err(Error::InvalidSystem(format!(
                        "vector {l} of local frame {i} leaves its subspace (distance {:.3e})",
                        col.norm()
                    )));
                }
            }
            let r = crate::linalg::rank(&(w.basis().adjoint() * f.vectors()), RANK_TOL);
            if r != w.dim() {
                return Err(Error::InvalidSystem(format!(
                    "local frame {i} has rank {r} but its subspace has dimension {}",
                    w.dim()
                )));
            }
        }
        Ok(Self { ff, local_frames })
    }

    /// The system with `W_i = span F_i`.
    pub fn from_local_frames(local_frames: Vec<Frame>, weights: Vec<f64>) -> Result<Self> {
        let d = local_frames
            .first()
            .map(Frame::ambient_dim)
            .ok_or_else(|| Error::InvalidSystem("no local frames".into()))?;
        let subspaces = local_frames.iter().map(|f| span(f.vectors(), RANK_TOL)).collect();
        let ff = FusionFrame::with_ambient_dim(d, subspaces, weights)?;
        Self::new(ff, local_frames, 1e-9)
    }

    pub fn fusion_frame(&self) -> &FusionFrame {
        &self.ff
    }

    pub fn local_frames(&self) -> &[Frame] {
        &self.local_frames
    }

    pub fn weights(&self) -> &[f64] {
        self.ff.weights()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ff.ambient_dim()
    }

    /// `|L_i|` for each block.
    pub fn local_sizes(&self) -> Vec<usize> {
        self.local_frames.iter().map(Frame::len).collect()
    }

    pub fn total_vectors(&self) -> usize {
        self.local_frames.iter().map(Frame::len).sum()
    }

    /// Same subspaces and local frames, new weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        Ok(Self {
            ff: self.ff.with_weights(weights)?,
            local_frames: self.local_frames.clone(),
        })
    }

    /// The global frame `wF = {w_i f_i^l}`.
    pub fn weighted_frame(&self) -> Frame {
        let parts: Vec<Mat> = self
            .local_frames
            .iter()
            .zip(self.ff.weights())
            .map(|(f, &w)| f.vectors() * re(w))
            .collect();
        Frame::from_matrix(
            self.ambient_dim(),
            hstack(self.ambient_dim(), &parts.iter().collect::<Vec<_>>()),
        )
    }

    /// The unweighted global family `F = {f_i^l}`.
    pub fn global_frame(&self) -> Frame {
        let parts: Vec<&Mat> = self.local_frames.iter().map(Frame::vectors).collect();
        Frame::from_matrix(self.ambient_dim(), hstack(self.ambient_dim(), &parts))
    }

    /// `C_F`: block `(i, i)` is `B_i^* [f_i^1 … f_i^{|L_i|}]`.
    pub fn coupling(&self) -> BlockOp {
        let blocks = self
            .ff
            .subspaces()
            .iter()
            .zip(&self.local_frames)
            .map(|(w, f)| w.basis().adjoint() * f.vectors())
            .collect();
        BlockOp::block_diagonal(&self.ff.dims(), &self.local_sizes(), blocks).expect("block sizes follow the system")
    }
}

pub fn coupling(system: &FusionFrameSystem) -> BlockOp {
    system.coupling()
}

fn check_compatible(ws: &FusionFrameSystem, vs: &FusionFrameSystem) -> Result<()> {
    if ws.local_sizes() != vs.local_sizes() || ws.ambient_dim() != vs.ambient_dim() {
        return Err(Error::LengthMismatch(format!(
            "local frame sizes {:?} against {:?}",
            ws.local_sizes(),
            vs.local_sizes()
        )));
    }
    Ok(())
}

/// Certifies that `(V, v, G)` is a dual system of `(W, w, F)`, i.e. that
/// `Q = C_G C_F^*` makes `(V, v)` a Q-dual of `(W, w)`.
pub fn is_dual_system(ws: &FusionFrameSystem, vs: &FusionFrameSystem, tol: f64) -> Result<QDualPair> {
    check_compatible(ws, vs)?;
    let q = vs.coupling().compose(&ws.coupling().adjoint())?;
    is_q_dual(ws.fusion_frame(), vs.fusion_frame(), &q, tol)
}

/// `(wF and vG are dual frames, (V, v, G) is a dual system of (W, w, F))`.
pub fn dual_system_iff_dual_frames(ws: &FusionFrameSystem, vs: &FusionFrameSystem, tol: f64) -> Result<(bool, bool)> {
    check_compatible(ws, vs)?;
    let frames = dual_residual(&ws.weighted_frame(), &vs.weighted_frame())? <= tol;
    let system = match is_dual_system(ws, vs, tol) {
        Ok(_) => true,
        Err(Error::NotDual { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok((frames, system))
}

/// Canonical duals `{S_{F_i}^† f_i^l}` of the local frames inside their subspaces.
pub fn canonical_local_duals(ws: &FusionFrameSystem) -> Vec<Frame> {
    ws.local_frames().iter().map(Frame::canonical_dual_on_span).collect()
}

/// Dual system built from a left inverse `A` of `T_{W,w}^*` and local duals
/// `F̃_i`: `g_i^l = (1/v_i) A χ_i(f̃_i^l)`.
pub fn dual_system_from_left_inverse_of_fusion(
    ws: &FusionFrameSystem,
    a: &Mat,
    v: &[f64],
    local_duals: &[Frame],
    tol: f64,
) -> Result<FusionFrameSystem> {
    let ff = ws.fusion_frame();
    let residual = left_inverse_residual(ff, a)?;
    if residual > tol {
        return Err(Error::NotLeftInverse { residual, tol });
    }
    if local_duals.len() != ff.len() || v.len() != ff.len() {
        return Err(Error::LengthMismatch(format!(
            "{} local duals and {} weights for {} subspaces",
            local_duals.len(),
            v.len(),
            ff.len()
        )));
    }
    let d = ff.ambient_dim();
    let mut frames = Vec::with_capacity(ff.len());
    for (i, ((f, g), (w, &offset))) in ws
        .local_frames()
        .iter()
        .zip(local_duals)
        .zip(ff.subspaces().iter().zip(&ff.offsets()))
        .enumerate()
    {
        let residual = local_dual_residual(f, g, w)?;
        if residual > tol {
            return Err(Error::NotLocalDual { index: i, residual });
        }
        let a_i = a.columns(offset, w.dim());
        frames.push(Frame::from_matrix(
            d,
            a_i * w.basis().adjoint() * g.vectors() * re(1.0 / v[i]),
        ));
    }
    let subspaces = frames.iter().map(|g| span(g.vectors(), RANK_TOL)).collect();
    let vff = FusionFrame::with_ambient_dim(d, subspaces, v.to_vec())?;
    let vs = FusionFrameSystem::new(vff, frames, 1e-8)?;
    is_dual_system(ws, &vs, tol)?;
    Ok(vs)
}

/// Interval guaranteed to contain the frame bounds of each `G_i` produced by
/// [`dual_system_from_left_inverse_of_fusion`]:
/// `[σ_min⁺(A_i)² α̃_i / v_i², ‖A‖² β̃_i / v_i²]`, where `A_i` is the `i`-th
/// column block of `A` and `α̃_i, β̃_i` are the bounds of `F̃_i` on `W_i`.
pub fn left_inverse_bound_interval(
    ws: &FusionFrameSystem,
    a: &Mat,
    v: &[f64],
    local_duals: &[Frame],
) -> Vec<(f64, f64)> {
    let ff = ws.fusion_frame();
    let a_norm2 = spectral_norm(a).powi(2);
    ff.subspaces()
        .iter()
        .zip(ff.offsets())
        .zip(local_duals)
        .zip(v)
        .map(|(((w, offset), g), &vi)| {
            let (alpha, beta) = g.frame_bounds_on_span().unwrap_or((0.0, 0.0));
            let s = singular_values(&a.columns(offset, w.dim()).into_owned());
            let smax = s.first().copied().unwrap_or(0.0);
            let smin_pos = s
                .iter()
                .copied()
                .filter(|&x| x > RANK_TOL * smax)
                .fold(f64::INFINITY, f64::min);
            let smin_pos = if smin_pos.is_finite() { smin_pos } else { 0.0 };
            (smin_pos * smin_pos * alpha / (vi * vi), a_norm2 * beta / (vi * vi))
        })
        .collect()
}

/// Dual system built from a left inverse `A` of `T_{wF}^*`: `g_i^l = (1/v_i) A e_i^l`.
pub fn dual_system_from_left_inverse_of_frame(
    ws: &FusionFrameSystem,
    a: &Mat,
    v: &[f64],
    tol: f64,
) -> Result<FusionFrameSystem> {
    let d = ws.ambient_dim();
    let wf = ws.weighted_frame();
    if a.shape() != (d, wf.len()) {
        return Err(Error::ShapeMismatch(format!(
            "left inverse must be {}×{}, got {}×{}",
            d,
            wf.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    if v.len() != ws.fusion_frame().len() {
        return Err(Error::LengthMismatch(format!(
            "{} weights for {} subspaces",
            v.len(),
            ws.fusion_frame().len()
        )));
    }
    let residual = frobenius_norm(&(a * wf.analysis() - Mat::identity(d, d)));
    if residual > tol {
        return Err(Error::NotLeftInverse { residual, tol });
    }
    let mut frames = Vec::new();
    let mut offset = 0;
    for (i, n) in ws.local_sizes().into_iter().enumerate() {
        frames.push(Frame::from_matrix(d, a.columns(offset, n) * re(1.0 / v[i])));
        offset += n;
    }
    let subspaces = frames.iter().map(|g| span(g.vectors(), RANK_TOL)).collect();
    let vff = FusionFrame::with_ambient_dim(d, subspaces, v.to_vec())?;
    let vs = FusionFrameSystem::new(vff, frames, 1e-8)?;
    is_dual_system(ws, &vs, tol)?;
    Ok(vs)
}

/// Centralized reconstruction: `Σ ⟨f, w_i f_i^l⟩ S_{wF}^{-1} w_i f_i^l`.
pub fn reconstruct_centralized(ws: &FusionFrameSystem, f: &Vector) -> Result<Vector> {
    let wf = ws.weighted_frame();
    let dual = wf.canonical_dual()?;
    Ok(dual.synthesis() * (wf.analysis() * f))
}

/// Distributed reconstruction: `Σ w_i² S_{W,w}^{-1} Σ_l ⟨π_{W_i} f, f_i^l⟩ f̃_i^l`
/// with the canonical local duals.
pub fn reconstruct_distributed(ws: &FusionFrameSystem, f: &Vector) -> Result<Vector> {
    let ff = ws.fusion_frame();
    let s_inv = ff.fusion_operator_inverse()?;
    let mut local = Vector::zeros(ff.ambient_dim());
    for ((w, fi), (g, &wi)) in ff
        .subspaces()
        .iter()
        .zip(ws.local_frames())
        .zip(canonical_local_duals(ws).iter().zip(ff.weights()))
    {
        let coeffs = fi.analysis() * (w.projector() * f);
        local += g.synthesis() * coeffs * re(wi * wi);
    }
    Ok(s_inv * local)
}

/// General reconstruction with a dual system: `Σ ⟨f, w_i f_i^l⟩ v_i g_i^l`.
pub fn reconstruct_general(ws: &FusionFrameSystem, vs: &FusionFrameSystem, f: &Vector) -> Result<Vector> {
    check_compatible(ws, vs)?;
    Ok(vs.weighted_frame().synthesis() * (ws.weighted_frame().analysis() * f))
}

/// A reconstruction system `(T_i)`, `T_i: F^{n_i} → F^d`, with no structure assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionSystem {
    pub ops: Vec<Mat>,
}

impl ReconstructionSystem {
    pub fn new(ops: Vec<Mat>) -> Result<Self> {
        let d = ops
            .first()
            .map(Mat::nrows)
            .ok_or_else(|| Error::InvalidSystem("no operators".into()))?;
        if ops.iter().any(|t| t.nrows() != d) {
            return Err(Error::InvalidSystem(
                "operators have different target dimensions".into(),
            ));
        }
        Ok(Self { ops })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ops[0].nrows()
    }

    /// `Σ T_i T_i^*`.
    pub fn frame_operator(&self) -> Mat {
        let d = self.ambient_dim();
        self.ops.iter().fold(Mat::zeros(d, d), |acc, t| acc + t * t.adjoint())
    }

    /// `(T̃_i) = (S^{-1} T_i)`.
    pub fn canonical_dual(&self) -> Result<Self> {
        let s_inv = inverse_hpd(&self.frame_operator()).ok_or(Error::NotAFusionFrame {
            rank: crate::linalg::rank(&self.frame_operator(), RANK_TOL),
            dim: self.ambient_dim(),
        })?;
        Ok(Self {
            ops: self.ops.iter().map(|t| &s_inv * t).collect(),
        })
    }

    /// `(‖T_i‖, ‖T_i^* T_i − ‖T_i‖² I‖_F)` for each operator.
    pub fn projectivity(&self) -> Vec<(f64, f64)> {
        self.ops
            .iter()
            .map(|t| {
                let w = spectral_norm(t);
                let n = t.ncols();
                let dev = frobenius_norm(&(t.adjoint() * t - Mat::identity(n, n) * re(w * w)));
                (w, dev)
            })
            .collect()
    }

    pub fn into_projective(self) -> Result<ProjectiveRS> {
        ProjectiveRS::new(self.ops)
    }
}

/// Projective reconstruction system: `T_i^* T_i = w_i² I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveRS {
    ops: Vec<Mat>,
    weights: Vec<f64>,
}

impl ProjectiveRS {
    pub fn new(ops: Vec<Mat>) -> Result<Self> {
        let rs = ReconstructionSystem::new(ops)?;
        let mut weights = Vec::new();
        for (index, (w, dev)) in rs.projectivity().into_iter().enumerate() {
            if w.is_nan() || w <= 0.0 || dev > PROJECTIVE_TOL * w * w {
                return Err(Error::NotProjective { index, deviation: dev });
            }
            weights.push(w);
        }
        Ok(Self { ops: rs.ops, weights })
    }

    pub fn ops(&self) -> &[Mat] {
        &self.ops
    }

    /// `w_i = ‖T_i‖`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(R(T_i), ‖T_i‖, {T_i e_l / ‖T_i‖})`.
    pub fn to_system(&self) -> Result<FusionFrameSystem> {
        let d = self.ops[0].nrows();
        let subspaces: Vec<Subspace> = self.ops.iter().map(|t| span(t, RANK_TOL)).collect();
        let frames = self
            .ops
            .iter()
            .zip(&self.weights)
            .map(|(t, &w)| Frame::from_matrix(d, t * re(1.0 / w)))
            .collect();
        let ff = FusionFrame::with_ambient_dim(d, subspaces, self.weights.clone())?;
        FusionFrameSystem::new(ff, frames, 1e-8)
    }
}

/// `‖Σ T̃_i T_i^* − I‖_F`.
pub fn reconstruction_dual_residual(rs: &ReconstructionSystem, rs_dual: &ReconstructionSystem) -> Result<f64> {
    if rs.ops.len() != rs_dual.ops.len() || rs.ambient_dim() != rs_dual.ambient_dim() {
        return Err(Error::LengthMismatch(
            "reconstruction systems of different shape".into(),
        ));
    }
    let d = rs.ambient_dim();
    let mut sum = Mat::zeros(d, d);
    for (t, td) in rs.ops.iter().zip(&rs_dual.ops) {
        if t.ncols() != td.ncols() {
            return Err(Error::LengthMismatch("operator block sizes differ".into()));
        }
        sum += td * t.adjoint();
    }
    Ok(frobenius_norm(&(sum - Mat::identity(d, d))))
}

/// For projective systems: `(the induced fusion frame systems are dual,
/// Σ T̃_i T_i^* = I)`. Both answers always agree.
pub fn projective_rs_bridge(rs: &ProjectiveRS, rs_dual: &ProjectiveRS, tol: f64) -> Result<(bool, bool)> {
    let ws = rs.to_system()?;
    let vs = rs_dual.to_system()?;
    let system = match is_dual_system(&ws, &vs, tol) {
        Ok(_) => true,
        Err(Error::NotDual { .. }) => false,
        Err(e) => return Err(e),
    };
    let direct = reconstruction_dual_residual(
        &ReconstructionSystem::new(rs.ops.clone())?,
        &ReconstructionSystem::new(rs_dual.ops.clone())?,
    )? <= tol;
    Ok((system, direct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::{canonical_dual, left_inverses_parametrization, QClass};
    use crate::linalg::{orthonormalize, real_columns, real_matrix};
    use crate::sampling::{random_fusion_frame, random_matrix, random_system, random_weights, seeded};

    fn example_6_2() -> (FusionFrameSystem, FusionFrameSystem) {
        let f1 = real_columns(
            4,
            &[
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0, 0.0],
            ],
        );
        let f2 = real_columns(
            4,
            &[
                vec![0.0, 1.0, 0.0, -1.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
        );
        let g1 = real_columns(
            4,
            &[
                vec![0.5, 0.5, -0.5, 0.0],
                vec![0.0, 1.0, 0.0, 1.0],
                vec![0.5, -0.5, 0.5, 0.0],
            ],
        );
        let g2 = real_columns(
            4,
            &[
                vec![0.0, 0.0, 0.0, -1.0],
                vec![0.5, -0.5, 0.5, 0.0],
                vec![-0.5, 0.5, 0.5, 0.0],
            ],
        );
        let ws = FusionFrameSystem::from_local_frames(
            vec![Frame::from_matrix(4, f1), Frame::from_matrix(4, f2)],
            vec![1.0, 1.0],
        )
        .unwrap();
        let vs = FusionFrameSystem::from_local_frames(
            vec![Frame::from_matrix(4, g1), Frame::from_matrix(4, g2)],
            vec![1.0, 1.0],
        )
        .unwrap();
        (ws, vs)
    }

    #[test]
    fn example_6_2_is_a_block_diagonal_dual_system() {
        let (ws, vs) = example_6_2();
        assert!(ws.fusion_frame().classify().is_riesz);
        let pair = is_dual_system(&ws, &vs, 1e-10).unwrap();
        assert_eq!(pair.q_class(1e-9), QClass::BlockDiagonal);
        assert_eq!(pair.dual.dims(), vec![3, 3]);
        assert_eq!(dual_system_iff_dual_frames(&ws, &vs, 1e-10).unwrap(), (true, true));
    }

    #[test]
    fn example_6_2_q_acts_as_displayed() {
        let (ws, vs) = example_6_2();
        let pair = is_dual_system(&ws, &vs, 1e-10).unwrap();
        // ((x1, x2, 0, 0), (0, y2, y3, -y2)) ↦ ((x1, x2, 0, x2), (0, 0, y3, -2 y2))
        let (x1, x2, y2, y3) = (0.3, -1.1, 0.7, 2.0);
        let a = ws.fusion_frame().subspace(0).basis().adjoint() * crate::linalg::real_vector(&[x1, x2, 0.0, 0.0]);
        let b = ws.fusion_frame().subspace(1).basis().adjoint() * crate::linalg::real_vector(&[0.0, y2, y3, -y2]);
        let out = pair.q.matrix() * crate::fusion::BlockVector { blocks: vec![a, b] }.to_flat();
        let out = crate::fusion::BlockVector::from_flat(&out, &pair.dual.dims()).unwrap();
        let v0 = pair.dual.subspace(0).basis() * &out.blocks[0];
        let v1 = pair.dual.subspace(1).basis() * &out.blocks[1];
        assert!((v0 - crate::linalg::real_vector(&[x1, x2, 0.0, x2])).norm() < 1e-12);
        assert!((v1 - crate::linalg::real_vector(&[0.0, 0.0, y3, -2.0 * y2])).norm() < 1e-12);
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let (ws, _) = example_6_2();
        let short = FusionFrameSystem::from_local_frames(
            vec![
                Frame::from_matrix(
                    4,
                    real_columns(4, &[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]]),
                ),
                Frame::from_matrix(
                    4,
                    real_columns(4, &[vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]]),
                ),
            ],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(
            is_dual_system(&ws, &short, 1e-9),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn invalid_local_frames_are_rejected() {
        let w = orthonormalize(&real_columns(3, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]), RANK_TOL).unwrap();
        let ff = FusionFrame::new(vec![w.clone(), Subspace::full(3)], vec![1.0, 1.0]).unwrap();
        let outside = Frame::from_matrix(3, real_columns(3, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]]));
        let full = Frame::from_matrix(3, Mat::identity(3, 3));
        assert!(matches!(
            FusionFrameSystem::new(ff.clone(), vec![outside, full.clone()], 1e-9),
            Err(Error::InvalidSystem(_))
        ));
        let thin = Frame::from_matrix(3, real_columns(3, &[vec![1.0, 0.0, 0.0]]));
        assert!(matches!(
            FusionFrameSystem::new(ff, vec![thin, full], 1e-9),
            Err(Error::InvalidSystem(_))
        ));
    }

    #[test]
    fn coupling_factors_weighted_synthesis() {
        let mut rng = seeded(31);
        let ff = random_fusion_frame(&mut rng, 5, 3, true);
        let sys = random_system(&mut rng, &ff, 2, true);
        let lhs = sys.weighted_frame().synthesis();
        let rhs = ff.synthesis_matrix() * sys.coupling().matrix();
        assert!(frobenius_norm(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn orthonormal_local_bases_give_identity_coupling() {
        let mut rng = seeded(32);
        let ff = random_fusion_frame(&mut rng, 4, 3, false);
        let frames = ff
            .subspaces()
            .iter()
            .map(|s| Frame::from_matrix(4, s.basis().clone()))
            .collect();
        let sys = FusionFrameSystem::new(ff.clone(), frames, 1e-9).unwrap();
        assert!(
            frobenius_norm(&(sys.coupling().into_matrix() - Mat::identity(ff.total_dim(), ff.total_dim()))) < 1e-12
        );
    }

    #[test]
    fn local_dual_couplings_are_left_inverses() {
        let mut rng = seeded(33);
        let ff = random_fusion_frame(&mut rng, 4, 3, true);
        let sys = random_system(&mut rng, &ff, 2, true);
        let duals = FusionFrameSystem::new(ff.clone(), canonical_local_duals(&sys), 1e-9).unwrap();
        let prod = duals.coupling().compose(&sys.coupling().adjoint()).unwrap();
        assert!(frobenius_norm(&(prod.into_matrix() - Mat::identity(ff.total_dim(), ff.total_dim()))) < 1e-10);
    }

    #[test]
    fn canonical_construction_is_distributed_reconstruction() {
        let mut rng = seeded(34);
        let ff = random_fusion_frame(&mut rng, 4, 3, true);
        let ws = random_system(&mut rng, &ff, 2, true);
        let fam = left_inverses_parametrization(&ff).unwrap();
        let v = random_weights(&mut rng, 3);
        let vs = dual_system_from_left_inverse_of_fusion(&ws, &fam.a0, &v, &canonical_local_duals(&ws), 1e-9).unwrap();
        let canonical = canonical_dual(&ff, &v).unwrap();
        for (a, b) in vs.fusion_frame().subspaces().iter().zip(canonical.dual.subspaces()) {
            assert!(a.distance(b) < 1e-10);
        }
        let f = random_matrix(&mut rng, 4, 1, true).column(0).into_owned();
        let general = reconstruct_general(&ws, &vs, &f).unwrap();
        let distributed = reconstruct_distributed(&ws, &f).unwrap();
        assert!((&general - &f).norm() < 1e-9);
        assert!((general - distributed).norm() < 1e-9);
    }

    #[test]
    fn frame_left_inverse_gives_centralized_reconstruction() {
        let mut rng = seeded(35);
        let ff = random_fusion_frame(&mut rng, 4, 3, false);
        let ws = random_system(&mut rng, &ff, 1, false);
        let wf = ws.weighted_frame();
        let a = wf.canonical_dual().unwrap().synthesis();
        let v = random_weights(&mut rng, 3);
        let vs = dual_system_from_left_inverse_of_frame(&ws, &a, &v, 1e-9).unwrap();
        let f = random_matrix(&mut rng, 4, 1, false).column(0).into_owned();
        let general = reconstruct_general(&ws, &vs, &f).unwrap();
        let central = reconstruct_centralized(&ws, &f).unwrap();
        assert!((&general - &f).norm() < 1e-9);
        assert!((general - central).norm() < 1e-9);
    }

    #[test]
    fn bad_local_dual_is_reported() {
        let mut rng = seeded(36);
        let ff = random_fusion_frame(&mut rng, 3, 2, false);
        let ws = random_system(&mut rng, &ff, 1, false);
        let fam = left_inverses_parametrization(&ff).unwrap();
        let wrong: Vec<Frame> = ws.local_frames().iter().map(|f| f.scaled(2.0)).collect();
        assert!(matches!(
            dual_system_from_left_inverse_of_fusion(&ws, &fam.a0, &[1.0, 1.0], &wrong, 1e-9),
            Err(Error::NotLocalDual { index: 0, .. })
        ));
    }

    #[test]
    fn example_6_2b_canonical_dual_is_not_projective() {
        let h = 1.0 / 2f64.sqrt();
        let t1 = real_matrix(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let t2 = real_matrix(4, 2, &[0.0, 0.0, 0.0, h, 1.0, 0.0, 0.0, -h]);
        let rs = ReconstructionSystem::new(vec![t1, t2]).unwrap();
        let dual = rs.canonical_dual().unwrap();
        assert!(reconstruction_dual_residual(&rs, &dual).unwrap() < 1e-12);
        assert!(rs.clone().into_projective().is_ok());
        assert!(matches!(dual.into_projective(), Err(Error::NotProjective { .. })));
    }

    #[test]
    fn orthonormal_blocks_are_self_dual() {
        let t1 = real_matrix(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        let t2 = real_matrix(3, 1, &[1.0, 0.0, 0.0]);
        let rs = ProjectiveRS::new(vec![t1, t2]).unwrap();
        let dual = ReconstructionSystem::new(rs.ops().to_vec())
            .unwrap()
            .canonical_dual()
            .unwrap()
            .into_projective()
            .unwrap();
        assert_eq!(projective_rs_bridge(&rs, &dual, 1e-9).unwrap(), (true, true));
    }
}
