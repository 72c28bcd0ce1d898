//! Dense linear algebra over ℝ or ℂ.
//!
//! Every operator in the crate is carried by a complex [`Mat`]; real problems
//! simply have zero imaginary parts. Subspaces always store an orthonormal
//! basis so that the orthogonal projector is `B·B*` exactly by construction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Default relative threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Tolerance used when checking orthonormality of stored bases.
pub const ORTHO_TOL: f64 = 1e-10;

/// Scalar field of a problem instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Builds a matrix from real entries given in row-major order.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> Mat {
    assert_eq!(data.len(), rows * cols);
    Mat::from_fn(rows, cols, |i, j| re(data[i * cols + j]))
}

/// Builds a matrix whose columns are the given real vectors.
pub fn real_columns(dim: usize, columns: &[Vec<f64>]) -> Mat {
    Mat::from_fn(dim, columns.len(), |i, j| re(columns[j][i]))
}

pub fn real_vector(data: &[f64]) -> Vector {
    Vector::from_iterator(data.len(), data.iter().map(|&x| re(x)))
}

/// Largest imaginary magnitude among the entries.
pub fn max_imag(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

/// Concatenates matrices with equal row counts side by side.
pub fn hstack(rows: usize, parts: &[&Mat]) -> Mat {
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut offset = 0;
    for p in parts {
        assert_eq!(p.nrows(), rows, "hstack: row count mismatch");
        out.view_mut((0, offset), (rows, p.ncols())).copy_from(*p);
        offset += p.ncols();
    }
    out
}

pub fn frobenius_norm(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn spectral_norm(m: &Mat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Thin SVD with singular values sorted in decreasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat,
    pub singular_values: Vec<f64>,
    pub v_t: Mat,
}

pub fn svd(m: &Mat) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            u: Mat::zeros(rows, 0),
            singular_values: Vec::new(),
            v_t: Mat::zeros(0, cols),
        };
    }
    let fm = faer::Mat::<C64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let dec = fm.thin_svd().expect("SVD of a finite matrix converges");
    let (u, s, v) = (dec.U(), dec.S().column_vector(), dec.V());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    Svd {
        u: Mat::from_fn(rows, k, |i, c| u[(i, order[c])]),
        singular_values: order.iter().map(|&c| s[c].re).collect(),
        v_t: Mat::from_fn(k, cols, |r, j| v[(j, order[r])].conj()),
    }
}

pub fn singular_values(m: &Mat) -> Vec<f64> {
    svd(m).singular_values
}

/// Numerical rank: singular values strictly above `tol·σ_max`.
pub fn rank(m: &Mat, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > tol * smax).count(),
        _ => 0,
    }
}

/// Moore–Penrose pseudoinverse; singular values `≤ tol·σ_max` are treated as zero.
pub fn pinv(m: &Mat, tol: f64) -> Mat {
    let (rows, cols) = m.shape();
    let dec = svd(m);
    let mut out = Mat::zeros(cols, rows);
    let smax = dec.singular_values.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return out;
    }
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s > tol * smax {
            let vk = dec.v_t.row(k).adjoint();
            let uk = dec.u.column(k);
            out += vk * uk.adjoint() * re(1.0 / s);
        }
    }
    out
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()) * re(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Inverse of a Hermitian positive definite matrix.
pub fn inverse_hpd(m: &Mat) -> Option<Mat> {
    let h = (m + m.adjoint()) * re(0.5);
    let chol = h.cholesky()?;
    let inv = chol.inverse();
    Some((&inv + inv.adjoint()) * re(0.5))
}

/// Orthonormal basis of the range of a projector, built by column-pivoted
/// Gram–Schmidt on the projector's own columns. The result depends only on the
/// subspace, not on how it was spanned.
fn basis_from_projector(proj: &Mat, r: usize) -> Mat {
    let d = proj.nrows();
    let mut residual = proj.clone();
    let mut q = Mat::zeros(d, r);
    for k in 0..r {
        let norms: Vec<f64> = (0..d).map(|j| residual.column(j).norm()).collect();
        let max = norms.iter().cloned().fold(0.0, f64::max);
        let pivot = norms.iter().position(|&n| n >= max * (1.0 - 1e-9)).unwrap_or(0);
        let mut col = residual.column(pivot).into_owned();
        for _ in 0..2 {
            for prev in 0..k {
                let qp = q.column(prev);
                let coef = qp.dotc(&col);
                col -= qp * coef;
            }
        }
        let n = col.norm();
        if n == 0.0 {
            break;
        }
        col /= re(n);
        let proj_coef = col.adjoint() * &residual;
        residual -= &col * proj_coef;
        q.set_column(k, &col);
    }
    q
}

/// A subspace of `F^d` held through an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: Mat,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: Mat::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            basis: Mat::identity(ambient_dim, ambient_dim),
        }
    }

    /// Wraps a basis that is already orthonormal (checked within `tol`).
    pub fn from_orthonormal_basis(basis: Mat, tol: f64) -> Result<Self> {
        let n = basis.ncols();
        let gram = basis.adjoint() * &basis;
        let dev = frobenius_norm(&(gram - Mat::identity(n, n)));
        if dev > tol {
            return Err(Error::ShapeMismatch(format!(
                "basis columns are not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn projector(&self) -> Mat {
        &self.basis * self.basis.adjoint()
    }

    /// Spectral norm of `π_self·π_other − π_other`; zero iff `other ⊆ self`.
    pub fn containment_deviation(&self, other: &Subspace) -> f64 {
        let p = self.projector();
        let q = other.projector();
        spectral_norm(&(&p * &q - &q))
    }

    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        self.containment_deviation(other) <= tol
    }

    /// Projector distance `‖π_self − π_other‖_sp` (sine of the largest principal angle
    /// for equal dimensions, 1 when dimensions differ).
    pub fn distance(&self, other: &Subspace) -> f64 {
        spectral_norm(&(self.projector() - other.projector()))
    }

    /// The subspace `op(self)`.
    pub fn image(&self, op: &Mat, tol: f64) -> Subspace {
        span(&(op * &self.basis), tol)
    }
}

/// Column space of `spanning`, possibly the zero subspace.
pub fn span(spanning: &Mat, tol: f64) -> Subspace {
    let d = spanning.nrows();
    if spanning.ncols() == 0 || d == 0 {
        return Subspace::zero(d);
    }
    let dec = svd(spanning);
    let smax = dec.singular_values[0];
    if smax == 0.0 {
        return Subspace::zero(d);
    }
    let r = dec.singular_values.iter().filter(|&&s| s > tol * smax).count();
    let ur = dec.u.columns(0, r).into_owned();
    let proj = &ur * ur.adjoint();
    Subspace {
        basis: basis_from_projector(&proj, r),
    }
}

/// Orthonormal basis for the column space of `spanning`.
pub fn orthonormalize(spanning: &Mat, tol: f64) -> Result<Subspace> {
    let s = span(spanning, tol);
    if s.is_zero() {
        Err(Error::ZeroSubspace)
    } else {
        Ok(s)
    }
}

/// `U ∩ V` via principal angles: directions whose cosine is at least `1 − tol`.
pub fn intersect(u: &Subspace, v: &Subspace, tol: f64) -> Result<Subspace> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim(),
            found: v.ambient_dim(),
        });
    }
    let d = u.ambient_dim();
    if u.is_zero() || v.is_zero() {
        return Ok(Subspace::zero(d));
    }
    let cross = u.basis().adjoint() * v.basis();
    let dec = svd(&cross);
    let r = dec.singular_values.iter().filter(|&&s| s >= 1.0 - tol).count();
    if r == 0 {
        return Ok(Subspace::zero(d));
    }
    let dirs = u.basis() * dec.u.columns(0, r);
    Ok(span(&dirs, 0.5))
}

/// `U + V`.
pub fn span_union(u: &Subspace, v: &Subspace, tol: f64) -> Result<Subspace> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim(),
            found: v.ambient_dim(),
        });
    }
    Ok(span(&hstack(u.ambient_dim(), &[u.basis(), v.basis()]), tol))
}

/// Orthogonal complement of `Z` inside `U`; requires `Z ⊆ U` within `tol`.
pub fn orth_complement_within(u: &Subspace, z: &Subspace, tol: f64) -> Result<Subspace> {
    if u.ambient_dim() != z.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim(),
            found: z.ambient_dim(),
        });
    }
    let deviation = u.containment_deviation(z);
    if deviation > tol {
        return Err(Error::NotContained { deviation });
    }
    if z.is_zero() {
        return Ok(u.clone());
    }
    let d = u.ambient_dim();
    let residual = (Mat::identity(d, d) - z.projector()) * u.basis();
    // singular values are ≈1 (complement directions) or ≈0 (directions of Z)
    let dec = svd(&residual);
    let r = dec.singular_values.iter().filter(|&&s| s > 0.5).count();
    let dirs = dec.u.columns(0, r).into_owned();
    Ok(span(&dirs, 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_matrix, seeded};

    #[test]
    fn svd_of_rank_three_projector() {
        #[rustfmt::skip]
        let c = real_matrix(5, 5, &[
            0.7577105776040932, -0.09093657576258311, -0.26412117886261954, -0.1057670406664911, -0.3071955946370547,
            -0.09093657576258311, 0.5858825713958116, 0.0316984826423962, -0.48165410391342234, 0.036868055285669235,
            -0.26412117886261954, 0.0316984826423962, 0.6670356371307399, 0.036868055285669735, -0.38726612490917733,
            -0.1057670406664911, -0.48165410391342234, 0.036868055285669735, 0.43979494753799064, 0.04288071185871851,
            -0.3071955946370547, 0.036868055285669235, -0.38726612490917733, 0.04288071185871851, 0.5495762663313646,
        ]);
        let dec = svd(&c);
        let sigma = Mat::from_diagonal(&Vector::from_iterator(5, dec.singular_values.iter().map(|&s| re(s))));
        assert!(frobenius_norm(&(&dec.u * sigma * &dec.v_t - &c)) < 1e-12);
        for (k, s) in dec.singular_values.iter().enumerate() {
            let expected = if k < 3 { 1.0 } else { 0.0 };
            assert!((s - expected).abs() < 1e-12, "{:?}", dec.singular_values);
        }
        assert_eq!(rank(&c, RANK_TOL), 3);
    }

    fn e(d: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    /// Classical Gram–Schmidt, used only as an independent oracle.
    fn gram_schmidt(m: &Mat) -> Mat {
        let mut q: Vec<Vector> = Vec::new();
        for j in 0..m.ncols() {
            let mut v = m.column(j).into_owned();
            for qk in &q {
                let c = qk.dotc(&v);
                v -= qk * c;
            }
            let n = v.norm();
            if n > 1e-10 {
                q.push(v / re(n));
            }
        }
        let mut out = Mat::zeros(m.nrows(), q.len());
        for (j, c) in q.iter().enumerate() {
            out.set_column(j, c);
        }
        out
    }

    #[test]
    fn collinear_columns_give_a_line() {
        let m = real_columns(3, &[vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]]);
        let s = orthonormalize(&m, RANK_TOL).unwrap();
        assert_eq!(s.dim(), 1);
        assert!((s.basis()[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthogonal_complement_of_first_axis_has_dim_two() {
        let m = real_columns(3, &[e(3, 1), e(3, 2)]);
        let s = orthonormalize(&m, RANK_TOL).unwrap();
        assert_eq!(s.dim(), 2);
        // basis is exactly (e2, e3)
        let expected = real_columns(3, &[e(3, 1), e(3, 2)]);
        assert!(frobenius_norm(&(s.basis() - expected)) < 1e-14);
    }

    #[test]
    fn zero_spanning_set_is_rejected() {
        let m = Mat::zeros(3, 2);
        assert_eq!(orthonormalize(&m, RANK_TOL), Err(Error::ZeroSubspace));
    }

    #[test]
    fn random_full_rank_matches_gram_schmidt_column_space() {
        let mut rng = seeded(11);
        for complex in [false, true] {
            let m = random_matrix(&mut rng, 4, 3, complex);
            let s = orthonormalize(&m, RANK_TOL).unwrap();
            assert_eq!(s.dim(), 3);
            let gram = s.basis().adjoint() * s.basis();
            assert!(frobenius_norm(&(gram - Mat::identity(3, 3))) < 1e-12);
            let q = gram_schmidt(&m);
            let oracle = &q * q.adjoint();
            assert!(frobenius_norm(&(s.projector() - oracle)) < 1e-12);
        }
    }

    #[test]
    fn pinv_examples() {
        let i3 = Mat::identity(3, 3);
        assert!(frobenius_norm(&(pinv(&i3, RANK_TOL) - &i3)) < 1e-14);
        let d = real_matrix(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let expected = real_matrix(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        assert!(frobenius_norm(&(pinv(&d, RANK_TOL) - expected)) < 1e-14);
        assert_eq!(pinv(&Mat::zeros(2, 3), RANK_TOL), Mat::zeros(3, 2));
        let mut rng = seeded(3);
        let m = random_matrix(&mut rng, 5, 3, true);
        let left = pinv(&m, RANK_TOL) * &m;
        assert!(frobenius_norm(&(left - Mat::identity(3, 3))) < 1e-10);
    }

    #[test]
    fn norm_examples() {
        let i4 = Mat::identity(4, 4);
        assert!((frobenius_norm(&i4) - 2.0).abs() < 1e-15);
        assert!((spectral_norm(&i4) - 1.0).abs() < 1e-14);
        let d = real_matrix(2, 2, &[3.0, 0.0, 0.0, 4.0]);
        assert!((frobenius_norm(&d) - 5.0).abs() < 1e-14);
        assert!((spectral_norm(&d) - 4.0).abs() < 1e-14);
        let mut rng = seeded(5);
        let m = random_matrix(&mut rng, 6, 4, true);
        let s2: f64 = singular_values(&m).iter().map(|s| s * s).sum();
        assert!((frobenius_norm(&m).powi(2) - s2).abs() < 1e-10);
    }

    #[test]
    fn intersect_examples() {
        let u = orthonormalize(&real_columns(3, &[e(3, 0), e(3, 1)]), RANK_TOL).unwrap();
        let v = orthonormalize(&real_columns(3, &[e(3, 1), e(3, 2)]), RANK_TOL).unwrap();
        let uu = intersect(&u, &u, 1e-8).unwrap();
        assert!(uu.distance(&u) < 1e-12);
        let uv = intersect(&u, &v, 1e-8).unwrap();
        let e2 = orthonormalize(&real_columns(3, &[e(3, 1)]), RANK_TOL).unwrap();
        assert_eq!(uv.dim(), 1);
        assert!(uv.distance(&e2) < 1e-12);
        let w = Subspace::zero(4);
        assert!(matches!(intersect(&u, &w, 1e-8), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn complement_examples() {
        let u = Subspace::full(2);
        let z = orthonormalize(&real_columns(2, &[e(2, 0)]), RANK_TOL).unwrap();
        let c = orth_complement_within(&u, &z, 1e-10).unwrap();
        let e2 = orthonormalize(&real_columns(2, &[e(2, 1)]), RANK_TOL).unwrap();
        assert!(c.distance(&e2) < 1e-12);
        let same = orth_complement_within(&u, &Subspace::zero(2), 1e-10).unwrap();
        assert!(same.distance(&u) < 1e-14);

        let line = orthonormalize(&real_columns(3, &[e(3, 0)]), RANK_TOL).unwrap();
        let other = orthonormalize(&real_columns(3, &[e(3, 1)]), RANK_TOL).unwrap();
        assert!(matches!(
            orth_complement_within(&line, &other, 1e-10),
            Err(Error::NotContained { .. })
        ));
    }

    #[test]
    fn random_complement_projectors_add_up() {
        let mut rng = seeded(17);
        for complex in [false, true] {
            let u = orthonormalize(&random_matrix(&mut rng, 5, 3, complex), RANK_TOL).unwrap();
            let coeffs = random_matrix(&mut rng, 3, 1, complex);
            let z = orthonormalize(&(u.basis() * coeffs), RANK_TOL).unwrap();
            let c = orth_complement_within(&u, &z, 1e-10).unwrap();
            assert_eq!(c.dim(), 2);
            let sum = c.projector() + z.projector();
            assert!(frobenius_norm(&(sum - u.projector())) < 1e-10);
        }
    }

    #[test]
    fn hpd_inverse_and_eigenvalues() {
        let m = real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        let inv = inverse_hpd(&m).unwrap();
        assert!(frobenius_norm(&(inv * &m - Mat::identity(2, 2))) < 1e-14);
        assert!(inverse_hpd(&real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])).is_none());
    }
}
