//! Seeded random instances: matrices, subspaces, fusion frames and systems.
//!
//! Used by the property suites and by the sampling-based certificates in
//! [`crate::erasures`].

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::frames::Frame;
use crate::fusion::FusionFrame;
use crate::linalg::{orthonormalize, span, Mat, Subspace, C64, RANK_TOL};
use crate::systems::FusionFrameSystem;

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, complex: bool) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
        C64::new(re, im)
    })
}

/// A uniformly distributed `n`-dimensional subspace of `F^d`.
pub fn random_subspace<R: Rng>(rng: &mut R, d: usize, n: usize, complex: bool) -> Subspace {
    loop {
        let s = span(&random_matrix(rng, d, n, complex), RANK_TOL);
        if s.dim() == n {
            return s;
        }
    }
}

pub fn random_weights<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(0.5..2.0)).collect()
}

/// Random fusion frame with `m` nontrivial subspaces of `F^d`. Dimensions are
/// drawn so that the subspaces span; the fusion operator is kept reasonably
/// conditioned.
pub fn random_fusion_frame<R: Rng>(rng: &mut R, d: usize, m: usize, complex: bool) -> FusionFrame {
    loop {
        let mut dims: Vec<usize> = (0..m).map(|_| rng.random_range(1..=d)).collect();
        let mut total: usize = dims.iter().sum();
        let mut i = 0;
        while total < d {
            if dims[i % m] < d {
                dims[i % m] += 1;
                total += 1;
            }
            i += 1;
        }
        let subspaces = dims.iter().map(|&n| random_subspace(rng, d, n, complex)).collect();
        let weights = random_weights(rng, m);
        if let Ok(ff) = FusionFrame::new(subspaces, weights) {
            if let Ok((lo, hi)) = ff.fusion_bounds() {
                if lo > 1e-3 * hi {
                    return ff;
                }
            }
        }
    }
}

/// Random fusion frame that is not a Riesz fusion basis (`Σ dim W_i > d`).
pub fn random_overcomplete_fusion_frame<R: Rng>(rng: &mut R, d: usize, m: usize, complex: bool) -> FusionFrame {
    assert!(m >= 2 || d == 0, "an overcomplete fusion frame needs m ≥ 2");
    loop {
        let ff = random_fusion_frame(rng, d, m, complex);
        if ff.total_dim() > d {
            return ff;
        }
    }
}

/// Random Riesz fusion basis with the given block dimensions (summing to `d`).
pub fn random_riesz_basis<R: Rng>(rng: &mut R, dims: &[usize], complex: bool) -> FusionFrame {
    let d: usize = dims.iter().sum();
    loop {
        let m = random_matrix(rng, d, d, complex);
        if crate::linalg::rank(&m, 1e-6) < d {
            continue;
        }
        let mut offset = 0;
        let mut subspaces = Vec::new();
        for &n in dims {
            let cols = m.columns(offset, n).into_owned();
            subspaces.push(orthonormalize(&cols, RANK_TOL).expect("full rank block"));
            offset += n;
        }
        let weights = random_weights(rng, dims.len());
        let ff = FusionFrame::new(subspaces, weights).expect("valid Riesz basis");
        if let Ok((lo, hi)) = ff.fusion_bounds() {
            if lo > 1e-3 * hi {
                return ff;
            }
        }
    }
}

/// Uniform-weight `n`-equi-dimensional Parseval fusion frame: `copies` random
/// orthonormal bases of `F^d`, each cut into blocks of `n` vectors, with weight
/// `1/√copies`. Requires `n | d`.
pub fn random_uniform_parseval<R: Rng>(rng: &mut R, d: usize, n: usize, copies: usize, complex: bool) -> FusionFrame {
    assert!(n > 0 && d.is_multiple_of(n));
    let mut subspaces = Vec::new();
    for _ in 0..copies {
        // left singular vectors of a Gaussian matrix: a random unitary
        let basis = crate::linalg::svd(&random_matrix(rng, d, d, complex)).u;
        for b in 0..d / n {
            let cols = basis.columns(b * n, n).into_owned();
            subspaces.push(orthonormalize(&cols, RANK_TOL).expect("orthonormal block"));
        }
    }
    let m = subspaces.len();
    let w = 1.0 / (copies as f64).sqrt();
    FusionFrame::new(subspaces, vec![w; m]).expect("Parseval fusion frame")
}

/// Attaches random local frames: `dim W_i + extra_i` vectors per subspace with
/// `extra_i ∈ 0..=max_extra`, each with frame bound ratio above `1e-3` on `W_i`.
pub fn random_system<R: Rng>(rng: &mut R, ff: &FusionFrame, max_extra: usize, complex: bool) -> FusionFrameSystem {
    let d = ff.ambient_dim();
    let frames: Vec<Frame> = ff
        .subspaces()
        .iter()
        .map(|w| {
            let n = w.dim();
            let count = n + rng.random_range(0..=max_extra);
            loop {
                let coeffs = random_matrix(rng, n, count, complex);
                let vectors = w.basis() * coeffs;
                let frame = Frame::from_matrix(d, vectors);
                if let Some((lo, hi)) = frame.frame_bounds_on_span() {
                    if frame.rank() == n && lo > 1e-3 * hi {
                        return frame;
                    }
                }
            }
        })
        .collect();
    FusionFrameSystem::new(ff.clone(), frames, 1e-9).expect("random local frames are valid")
}

/// Like [`random_system`] with every local vector normalized to unit length.
pub fn random_unit_system<R: Rng>(rng: &mut R, ff: &FusionFrame, max_extra: usize, complex: bool) -> FusionFrameSystem {
    let sys = random_system(rng, ff, max_extra, complex);
    let frames = sys
        .local_frames()
        .iter()
        .map(|f| {
            let mut v = f.vectors().clone();
            for mut col in v.column_iter_mut() {
                let n = col.norm();
                col /= C64::new(n, 0.0);
            }
            Frame::from_matrix(ff.ambient_dim(), v)
        })
        .collect();
    FusionFrameSystem::new(ff.clone(), frames, 1e-9).expect("normalized local frames are valid")
}
