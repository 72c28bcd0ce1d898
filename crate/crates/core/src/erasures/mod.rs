//! Reconstruction error under erasures and optimal duals.
//!
//! Losing the subspaces in `J` leaves the error operator `T_{V,v} Q M_J T^*`.
//! It splits as a sum over the erased components,
//! `Σ_{i∈J} (T_{V,v} Q)_i w_i B_i^*`, so every pattern costs one sum of
//! precomputed `d × d` matrices. Local erasures work the same way with
//! the rank-one terms `(v_i g_i^l)(w_i f_i^l)^*`.

mod minimax;

pub use minimax::{solve, MinimaxProblem, MinimaxSolution, SolverConfig, SolverDiagnostics};

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::duality::{
    canonical_dual, dual_from_left_inverse, kernel_basis, left_inverses_parametrization, BlockOp, QDualPair,
    DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::fusion::FusionFrame;
use crate::linalg::{frobenius_norm, inverse_hpd, re, span, Mat, RANK_TOL};
use crate::sampling::random_matrix;
use crate::systems::{is_dual_system, FusionFrameSystem};

/// Largest number of erasure patterns enumerated at one level.
pub const PATTERN_LIMIT: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PNorm {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl PNorm {
    pub fn aggregate(self, values: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            PNorm::Two => values.into_iter().map(|x| x * x).sum::<f64>().sqrt(),
            PNorm::Inf => values.into_iter().fold(0.0, f64::max),
        }
    }
}

impl std::fmt::Display for PNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PNorm::Two => "2",
            PNorm::Inf => "inf",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErasurePattern {
    /// Indices of the lost subspaces.
    Subspace(Vec<usize>),
    /// For each subspace, indices of its lost local vectors.
    Local(Vec<Vec<usize>>),
}

impl ErasurePattern {
    pub fn r(&self) -> usize {
        match self {
            ErasurePattern::Subspace(j) => j.len(),
            ErasurePattern::Local(js) => js.iter().map(Vec::len).sum(),
        }
    }
}

impl std::fmt::Display for ErasurePattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErasurePattern::Subspace(j) => write!(f, "{{{}}}", j.iter().map(|i| (i + 1).to_string()).join(",")),
            ErasurePattern::Local(js) => {
                let items = js
                    .iter()
                    .enumerate()
                    .flat_map(|(i, j)| j.iter().map(move |l| format!("({},{})", i + 1, l + 1)));
                write!(f, "{{{}}}", items.format(","))
            }
        }
    }
}

/// Errors of every pattern of one size, with their `p`-norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorLevel {
    pub r: usize,
    pub errors: Vec<(ErasurePattern, f64)>,
    pub aggregate: f64,
}

/// Where a certified claim comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backing {
    /// A closed-form statement whose hypotheses were checked numerically.
    Theorem,
    /// Evidence from random competitors only.
    Sampled,
    /// A direct numerical check.
    Computed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    pub backing: Backing,
}

impl Claim {
    /// Passes when `value ≤ tol`.
    pub fn at_most(name: &str, value: f64, tol: f64, backing: Backing) -> Self {
        Self {
            name: name.into(),
            value,
            tol,
            pass: value <= tol,
            backing,
        }
    }

    /// Passes when `value ≥ bound`; the bound is stored as `tol`.
    pub fn at_least(name: &str, value: f64, bound: f64, backing: Backing) -> Self {
        Self {
            name: name.into(),
            value,
            tol: bound,
            pass: value >= bound,
            backing,
        }
    }

    pub fn flag(name: &str, holds: bool, backing: Backing) -> Self {
        Self {
            name: name.into(),
            value: if holds { 1.0 } else { 0.0 },
            tol: 0.0,
            pass: holds,
            backing,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ErasureReport {
    pub p: PNorm,
    pub levels: Vec<ErrorLevel>,
    pub optimal_dual: QDualPair,
    /// For local erasures, the optimal dual fusion frame system.
    pub optimal_system: Option<FusionFrameSystem>,
    /// `‖T_{V,v} Q − T_{S^{-1}W,v} Q_can‖_F` against the canonical dual with the same weights.
    pub canonical_gap: f64,
    pub certificate: Vec<Claim>,
    pub solver: Option<SolverDiagnostics>,
}

impl ErasureReport {
    /// Largest level computed.
    pub fn r(&self) -> usize {
        self.levels.last().map_or(0, |l| l.r)
    }

    pub fn level(&self, r: usize) -> Option<&ErrorLevel> {
        self.levels.iter().find(|l| l.r == r)
    }

    pub fn certified(&self) -> bool {
        self.certificate.iter().all(|c| c.pass)
    }
}

pub fn pattern_count(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Norms of `Σ_{i∈J} K_i` over all `|J| = r`, in lexicographic order of `J`.
pub fn pattern_errors(ks: &[Mat], r: usize) -> Result<Vec<(Vec<usize>, f64)>> {
    let n = ks.len();
    if r == 0 || r > n {
        return Err(Error::BadR { r, max: n });
    }
    let count = pattern_count(n, r);
    if count > PATTERN_LIMIT {
        return Err(Error::TooManyPatterns {
            count,
            limit: PATTERN_LIMIT,
        });
    }
    let patterns: Vec<Vec<usize>> = (0..n).combinations(r).collect();
    Ok(patterns
        .into_par_iter()
        .map(|j| {
            let mut sum = ks[j[0]].clone();
            for &i in &j[1..] {
                sum += &ks[i];
            }
            let e = frobenius_norm(&sum);
            (j, e)
        })
        .collect())
}

/// `K_i = (T_{V,v} Q)_i · w_i B_i^*`, the error contribution of subspace `i`.
pub fn subspace_error_operators(pair: &QDualPair) -> Vec<Mat> {
    let a = pair.left_inverse();
    let w = &pair.primal;
    w.subspaces()
        .iter()
        .zip(w.weights())
        .zip(w.offsets())
        .map(|((s, &wi), o)| a.columns(o, s.dim()) * s.basis().adjoint() * re(wi))
        .collect()
}

/// `‖T_{V,v} Q M_J T_{W,w}^*‖_F` for every `J` of size `r`.
pub fn error_vector(pair: &QDualPair, r: usize) -> Result<Vec<(ErasurePattern, f64)>> {
    Ok(pattern_errors(&subspace_error_operators(pair), r)?
        .into_iter()
        .map(|(j, e)| (ErasurePattern::Subspace(j), e))
        .collect())
}

/// `K_i^l = (v_i g_i^l)(w_i f_i^l)^*`, flattened block by block.
pub fn local_error_operators(ws: &FusionFrameSystem, vs: &FusionFrameSystem) -> Result<Vec<Mat>> {
    if ws.local_sizes() != vs.local_sizes() {
        return Err(Error::LengthMismatch(format!(
            "local frame sizes {:?} against {:?}",
            ws.local_sizes(),
            vs.local_sizes()
        )));
    }
    let f = ws.weighted_frame();
    let g = vs.weighted_frame();
    Ok((0..f.len())
        .map(|j| g.vectors().column(j) * f.vectors().column(j).adjoint())
        .collect())
}

fn unflatten(sizes: &[usize], flat: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); sizes.len()];
    for &k in flat {
        let mut rest = k;
        for (i, &n) in sizes.iter().enumerate() {
            if rest < n {
                out[i].push(rest);
                break;
            }
            rest -= n;
        }
    }
    out
}

/// `‖T_{V,v} C_G M_𝒥 C_F^* T_{W,w}^*‖_F` for every pattern of `r` lost local vectors.
pub fn local_error_vector(
    ws: &FusionFrameSystem,
    vs: &FusionFrameSystem,
    r: usize,
) -> Result<Vec<(ErasurePattern, f64)>> {
    let sizes = ws.local_sizes();
    Ok(pattern_errors(&local_error_operators(ws, vs)?, r)?
        .into_iter()
        .map(|(j, e)| (ErasurePattern::Local(unflatten(&sizes, &j)), e))
        .collect())
}

fn subspace_levels(pair: &QDualPair, max_r: usize, p: PNorm) -> Result<Vec<ErrorLevel>> {
    (1..=max_r)
        .map(|r| {
            let errors = error_vector(pair, r)?;
            let aggregate = p.aggregate(errors.iter().map(|e| e.1));
            Ok(ErrorLevel { r, errors, aggregate })
        })
        .collect()
}

fn local_levels(ws: &FusionFrameSystem, vs: &FusionFrameSystem, max_r: usize, p: PNorm) -> Result<Vec<ErrorLevel>> {
    (1..=max_r)
        .map(|r| {
            let errors = local_error_vector(ws, vs, r)?;
            let aggregate = p.aggregate(errors.iter().map(|e| e.1));
            Ok(ErrorLevel { r, errors, aggregate })
        })
        .collect()
}

fn check_dual_weights(w: &FusionFrame, v: &[f64]) -> Result<()> {
    if v.len() != w.len() {
        return Err(Error::LengthMismatch(format!(
            "{} dual weights for {} subspaces",
            v.len(),
            w.len()
        )));
    }
    Ok(())
}

/// The `(r, 2)`-loss optimal dual: subspaces `S_D^{-1} W_i` with
/// `S_D = Σ π_{W_i}` and `Q_D` blocks `(1/(w_j v_j)) C_j^* S_D^{-1} B_j`.
pub fn mse_optimal_dual(w: &FusionFrame, v: &[f64], max_r: usize) -> Result<ErasureReport> {
    check_dual_weights(w, v)?;
    let d = w.ambient_dim();
    let unit = w.with_weights(&vec![1.0; w.len()])?;
    let sd_inv = unit.fusion_operator_inverse()?;
    let blocks: Vec<Mat> = w
        .subspaces()
        .iter()
        .zip(w.weights())
        .map(|(s, &wi)| &sd_inv * s.basis() * re(1.0 / wi))
        .collect();
    let a = crate::linalg::hstack(d, &blocks.iter().collect::<Vec<_>>());
    let pair = dual_from_left_inverse(w, &a, v, DEFAULT_TOL)?;

    // Σ_i w_i² (A − A_D) M_i (A_D M_i)^* vanishes for every left inverse A:
    // equivalently P · diag(w_i²) · A_D^* = 0.
    let fam = left_inverses_parametrization(w)?;
    let squares: Vec<f64> = w.weights().iter().map(|x| x * x).collect();
    let omega = BlockOp::scalar_diagonal(&w.dims(), &squares);
    let cross = frobenius_norm(&(&fam.p * omega.matrix() * pair.left_inverse().adjoint()));
    let canonical = canonical_dual(w, v)?;
    let levels = subspace_levels(&pair, max_r, PNorm::Two)?;
    Ok(ErasureReport {
        p: PNorm::Two,
        canonical_gap: frobenius_norm(&(pair.left_inverse() - canonical.left_inverse())),
        certificate: vec![
            Claim::at_most("duality residual", pair.residual, DEFAULT_TOL, Backing::Computed),
            Claim::at_most("orthogonality cross term", cross, DEFAULT_TOL, Backing::Computed),
            Claim::flag("unique (r,2)-optimal component preserving dual", true, Backing::Theorem),
        ],
        levels,
        optimal_dual: pair,
        optimal_system: None,
        solver: None,
    })
}

fn uniform_condition(values: &[f64]) -> bool {
    let max = values.iter().cloned().fold(0.0, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min <= 1e-9 * max.max(1e-300)
}

/// The worst-case (`r = 1`, `p = ∞`) optimal component preserving dual,
/// minimizing `max_i w_i ‖A M_i‖_F` over left inverses `A` of `T_{W,w}^*`.
pub fn worst_case_optimal_dual(w: &FusionFrame, v: &[f64], solver: &SolverConfig) -> Result<ErasureReport> {
    check_dual_weights(w, v)?;
    let fam = left_inverses_parametrization(w)?;
    let groups = w
        .offsets()
        .into_iter()
        .zip(w.dims())
        .zip(w.weights())
        .map(|((o, n), &wi)| (o, n, wi))
        .collect();
    let problem = MinimaxProblem {
        a0: fam.a0.clone(),
        kernel: fam.kernel.clone(),
        groups,
    };
    let sol = solve(&problem, solver)?;
    let pair = dual_from_left_inverse(w, &sol.a, v, DEFAULT_TOL)?;
    let canonical = canonical_dual(w, v)?;
    let canonical_phi = problem.objective(&fam.a0);

    let s_inv = w.fusion_operator_inverse()?;
    let uniform_values: Vec<f64> = w
        .subspaces()
        .iter()
        .zip(w.weights())
        .map(|(s, &wi)| wi * wi * frobenius_norm(&(&s_inv * s.projector())))
        .collect();
    let uniform = uniform_condition(&uniform_values);
    let mut certificate = vec![
        Claim::at_most("duality residual", pair.residual, DEFAULT_TOL, Backing::Computed),
        Claim::at_most(
            "objective not above canonical",
            sol.phi - canonical_phi,
            1e-12 * canonical_phi.max(1.0),
            Backing::Computed,
        ),
        Claim::flag("solver converged", sol.diagnostics.converged, Backing::Computed),
    ];
    if uniform {
        certificate.push(Claim::at_most(
            "uniform condition: minimizer equals S^{-1}T",
            frobenius_norm(&(&sol.a - &fam.a0)),
            1e-4 * frobenius_norm(&fam.a0).max(1.0),
            Backing::Theorem,
        ));
    }
    let levels = subspace_levels(&pair, 1, PNorm::Inf)?;
    Ok(ErasureReport {
        p: PNorm::Inf,
        canonical_gap: frobenius_norm(&(pair.left_inverse() - canonical.left_inverse())),
        certificate,
        levels,
        optimal_dual: pair,
        optimal_system: None,
        solver: Some(sol.diagnostics),
    })
}

fn check_unit_norm(ws: &FusionFrameSystem) -> Result<()> {
    for (block, f) in ws.local_frames().iter().enumerate() {
        for (index, col) in f.vectors().column_iter().enumerate() {
            let norm = col.norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::NotUnitNorm { block, index, norm });
            }
        }
    }
    Ok(())
}

fn system_from_vectors(d: usize, a: &Mat, sizes: &[usize], v: &[f64]) -> Result<FusionFrameSystem> {
    let mut frames = Vec::with_capacity(sizes.len());
    let mut offset = 0;
    for (i, &n) in sizes.iter().enumerate() {
        frames.push(Frame::from_matrix(d, a.columns(offset, n) * re(1.0 / v[i])));
        offset += n;
    }
    let subspaces = frames.iter().map(|g| span(g.vectors(), RANK_TOL)).collect();
    let ff = FusionFrame::with_ambient_dim(d, subspaces, v.to_vec())?;
    FusionFrameSystem::new(ff, frames, 1e-8)
}

fn system_report(
    ws: &FusionFrameSystem,
    vs: FusionFrameSystem,
    v: &[f64],
    p: PNorm,
    max_r: usize,
    mut certificate: Vec<Claim>,
    solver: Option<SolverDiagnostics>,
) -> Result<ErasureReport> {
    let pair = is_dual_system(ws, &vs, DEFAULT_TOL)?;
    let canonical = canonical_dual(ws.fusion_frame(), v)?;
    certificate.insert(
        0,
        Claim::at_most("duality residual", pair.residual, DEFAULT_TOL, Backing::Computed),
    );
    let levels = local_levels(ws, &vs, max_r, p)?;
    Ok(ErasureReport {
        p,
        canonical_gap: frobenius_norm(&(pair.left_inverse() - canonical.left_inverse())),
        certificate,
        levels,
        optimal_dual: pair,
        optimal_system: Some(vs),
        solver,
    })
}

/// The `(r, 2)`-loss optimal dual system of a system with unit-norm local
/// frames: `g_i^l = (1/(w_i v_i)) S_F^{-1} f_i^l`.
pub fn local_mse_optimal_system(ws: &FusionFrameSystem, v: &[f64], max_r: usize) -> Result<ErasureReport> {
    check_dual_weights(ws.fusion_frame(), v)?;
    check_unit_norm(ws)?;
    let d = ws.ambient_dim();
    let f = ws.global_frame();
    let s_inv = inverse_hpd(&f.frame_operator()).ok_or(Error::NotAFrame { rank: f.rank(), dim: d })?;
    let mut a = &s_inv * f.vectors();
    let mut offset = 0;
    for (n, &wi) in ws.local_sizes().into_iter().zip(ws.weights()) {
        let mut cols = a.columns_mut(offset, n);
        cols *= re(1.0 / wi);
        offset += n;
    }
    // columns of `a` are v_i g_i^l
    let vs = system_from_vectors(d, &a, &ws.local_sizes(), v)?;
    let certificate = vec![Claim::flag(
        "unique (r,2)-optimal component preserving dual system",
        true,
        Backing::Theorem,
    )];
    system_report(ws, vs, v, PNorm::Two, max_r, certificate, None)
}

/// The worst-case (`r = 1`, `p = ∞`) optimal dual system for local erasures:
/// minimizes `max w_i ‖f_i^l‖ ‖A e_i^l‖` over left inverses `A` of `T_{wF}^*`,
/// then sets `g_i^l = (1/v_i) A e_i^l`.
pub fn local_worst_case_optimal_system(
    ws: &FusionFrameSystem,
    v: &[f64],
    solver: &SolverConfig,
) -> Result<ErasureReport> {
    check_dual_weights(ws.fusion_frame(), v)?;
    for (block, f) in ws.local_frames().iter().enumerate() {
        for (index, col) in f.vectors().column_iter().enumerate() {
            if col.norm() == 0.0 {
                return Err(Error::NullVector { block, index });
            }
        }
    }
    let d = ws.ambient_dim();
    let wf = ws.weighted_frame();
    let t = wf.synthesis();
    let s_inv = inverse_hpd(&wf.frame_operator()).ok_or(Error::NotAFrame {
        rank: wf.rank(),
        dim: d,
    })?;
    let a0 = &s_inv * &t;
    let groups: Vec<(usize, usize, f64)> = t.column_iter().enumerate().map(|(j, c)| (j, 1, c.norm())).collect();
    let problem = MinimaxProblem {
        a0: a0.clone(),
        kernel: kernel_basis(&t),
        groups,
    };
    let sol = solve(&problem, solver)?;
    let vs = system_from_vectors(d, &sol.a, &ws.local_sizes(), v)?;

    let uniform_values: Vec<f64> = t.column_iter().map(|c| (&s_inv * c).norm()).collect();
    let canonical_phi = problem.objective(&a0);
    let mut certificate = vec![
        Claim::at_most(
            "objective not above canonical",
            sol.phi - canonical_phi,
            1e-12 * canonical_phi.max(1.0),
            Backing::Computed,
        ),
        Claim::flag("solver converged", sol.diagnostics.converged, Backing::Computed),
    ];
    if uniform_condition(&uniform_values) {
        certificate.push(Claim::at_most(
            "uniform condition: minimizer equals S_wF^{-1} T_wF",
            frobenius_norm(&(&sol.a - &a0)),
            1e-4 * frobenius_norm(&a0).max(1.0),
            Backing::Theorem,
        ));
    }
    system_report(ws, vs, v, PNorm::Inf, 1, certificate, Some(sol.diagnostics))
}

/// Level-by-level comparison of one optimizer against sampled competitors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierarchyLevel {
    pub r: usize,
    pub optimizer: f64,
    /// Competitors still tied with the optimizer on all lower levels.
    pub surviving: usize,
    pub best_competitor: Option<f64>,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierarchyReport {
    pub p: PNorm,
    pub competitors: usize,
    pub levels: Vec<HierarchyLevel>,
    /// The optimizer stays optimal at every level against every survivor.
    pub constant: bool,
}

/// Checks the inductive hierarchy of optimal duals by sampling.
///
/// `optimal` and each entry of `competitors` are error operators as returned
/// by [`subspace_error_operators`] or [`local_error_operators`]. At level 1 the
/// optimizer must not be beaten; at level `r` only competitors tied with it on
/// levels `1..r` are admissible, and none of them may beat it.
pub fn hierarchical_optimal(
    optimal: &[Mat],
    competitors: &[Vec<Mat>],
    max_r: usize,
    p: PNorm,
    tol: f64,
) -> Result<HierarchyReport> {
    let value =
        |ks: &[Mat], r: usize| -> Result<f64> { Ok(p.aggregate(pattern_errors(ks, r)?.into_iter().map(|e| e.1))) };
    let mut alive: Vec<usize> = (0..competitors.len()).collect();
    let mut levels = Vec::with_capacity(max_r);
    for r in 1..=max_r {
        let opt = value(optimal, r)?;
        let scale = tol * opt.max(1.0);
        let values: Vec<f64> = alive
            .iter()
            .map(|&c| value(&competitors[c], r))
            .collect::<Result<_>>()?;
        let best = values.iter().cloned().reduce(f64::min);
        let consistent = best.is_none_or(|b| opt <= b + scale);
        levels.push(HierarchyLevel {
            r,
            optimizer: opt,
            surviving: alive.len(),
            best_competitor: best,
            consistent,
        });
        alive = alive
            .into_iter()
            .zip(values)
            .filter(|&(_, x)| (x - opt).abs() <= scale)
            .map(|(c, _)| c)
            .collect();
    }
    let constant = levels.iter().all(|l| l.consistent);
    Ok(HierarchyReport {
        p,
        competitors: competitors.len(),
        levels,
        constant,
    })
}

/// Component preserving duals from random left inverses `A_0 + Z P`, with
/// Gaussian `Z` of entry scale `scale`.
pub fn sample_competitor_duals<R: Rng>(
    w: &FusionFrame,
    v: &[f64],
    count: usize,
    scale: f64,
    rng: &mut R,
) -> Result<Vec<QDualPair>> {
    let fam = left_inverses_parametrization(w)?;
    let complex = crate::linalg::max_imag(&w.synthesis_matrix()) > 0.0;
    (0..count)
        .map(|_| {
            let z = random_matrix(rng, w.ambient_dim(), w.total_dim(), complex) * re(scale);
            dual_from_left_inverse(w, &fam.member(&z), v, 1e-8)
        })
        .collect()
}

/// Dual systems from random left inverses of `T_{wF}^*`.
pub fn sample_competitor_systems<R: Rng>(
    ws: &FusionFrameSystem,
    v: &[f64],
    count: usize,
    scale: f64,
    rng: &mut R,
) -> Result<Vec<FusionFrameSystem>> {
    let d = ws.ambient_dim();
    let wf = ws.weighted_frame();
    let t = wf.synthesis();
    let s_inv = inverse_hpd(&wf.frame_operator()).ok_or(Error::NotAFrame {
        rank: wf.rank(),
        dim: d,
    })?;
    let a0 = &s_inv * &t;
    let k = kernel_basis(&t);
    let complex = crate::linalg::max_imag(&t) > 0.0;
    (0..count)
        .map(|_| {
            let y = random_matrix(rng, d, k.ncols(), complex) * re(scale);
            system_from_vectors(d, &(&a0 + y * k.adjoint()), &ws.local_sizes(), v)
        })
        .collect()
}
