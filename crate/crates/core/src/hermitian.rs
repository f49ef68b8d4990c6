//! Dense complex self-adjoint matrices.
//!
//! [`HermitianMatrix`] is the carrier for every operator in the crate: the
//! target `T`, the members `E_i`, the orthonormal directions `F_i` and the
//! simplex directions `R_i`. Spectra come from a cyclic complex Jacobi
//! solver, which is more than fast enough for the dimensions involved
//! (a few dozen at most) and has no external dependencies.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::MatrixJson;

/// Relative asymmetry accepted when loading a matrix.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Jacobi stops once the off-diagonal Frobenius mass drops below this
/// fraction of the Hilbert-Schmidt norm.
pub const JACOBI_REL_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Gram-Schmidt discards a candidate whose projected norm falls below this
/// fraction of `(pre-projection norm + 1)`.
pub const GS_DROP_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A `d x d` complex self-adjoint matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Validates hermiticity (see [`HERMITICITY_TOL`]) and symmetrizes the
    /// entries as `(A + A*) / 2`.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != dim * dim {
            return Err(Error::BadShape {
                expected: dim * dim,
                got: data.len(),
            });
        }
        let max_entry = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut asymmetry: f64 = 0.0;
        for j in 0..dim {
            for k in j..dim {
                let diff = data[j * dim + k] - data[k * dim + j].conj();
                asymmetry = asymmetry.max(diff.norm());
            }
        }
        let allowed = HERMITICITY_TOL * (1.0 + max_entry);
        if !(asymmetry <= allowed) {
            return Err(Error::NotHermitian { asymmetry, allowed });
        }
        Ok(Self::symmetrized(dim, data))
    }

    /// Builds from rows of complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::BadShape {
                expected: dim,
                got: bad.len(),
            });
        }
        Self::new(dim, rows.concat())
    }

    /// Builds from a real symmetric row-major array.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub(crate) fn symmetrized(dim: usize, mut data: Vec<Complex64>) -> Self {
        for j in 0..dim {
            data[j * dim + j].im = 0.0;
            for k in (j + 1)..dim {
                let avg = (data[j * dim + k] + data[k * dim + j].conj()) * 0.5;
                data[j * dim + k] = avg;
                data[k * dim + j] = avg.conj();
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (j, &v) in values.iter().enumerate() {
            m.data[j * dim + j] = Complex64::new(v, 0.0);
        }
        m
    }

    /// The rank-one operator `v v*`.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut data = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for k in 0..dim {
                data.push(v[j] * v[k].conj());
            }
        }
        Self::symmetrized(dim, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|j| self.data[j * self.dim + j].re).sum()
    }

    /// `Tr[self * other]`, real for self-adjoint arguments.
    ///
    /// Panics on a dimension mismatch; use [`hs_inner`] for checked access.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(
            self.dim, other.dim,
            "Hilbert-Schmidt product of mismatched dimensions"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * c;
        }
    }

    /// `self^2`, which stays self-adjoint.
    pub fn square(&self) -> Self {
        let p = self.product(self);
        Self::symmetrized(self.dim, p.data)
    }

    /// General (not necessarily self-adjoint) product `self * other`.
    pub fn product(&self, other: &Self) -> SquareMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        SquareMatrix { dim: d, data }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, x.len());
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn as_square(&self) -> SquareMatrix {
        SquareMatrix {
            dim: self.dim,
            data: self.data.clone(),
        }
    }

    /// Sum of a nonempty list of matrices.
    pub fn sum<'a, I: IntoIterator<Item = &'a Self>>(dim: usize, items: I) -> Self {
        let mut acc = Self::zeros(dim);
        for m in items {
            acc.add_scaled(1.0, m);
        }
        acc
    }

    /// A GUE-distributed sample: real Gaussian diagonal, complex Gaussian
    /// off-diagonal with unit total variance.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for j in 0..dim {
            data[j * dim + j] = Complex64::new(rng.sample(StandardNormal), 0.0);
            for k in (j + 1)..dim {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let z = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
                data[j * dim + k] = z;
                data[k * dim + j] = z.conj();
            }
        }
        Self { dim, data }
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

/// A general square complex matrix, produced by products of self-adjoint
/// operators such as `T E_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|| self - h ||_HS`
    pub fn distance_to(&self, h: &HermitianMatrix) -> f64 {
        assert_eq!(self.dim, h.dim);
        self.data
            .iter()
            .zip(&h.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Checked Hilbert-Schmidt inner product `Tr[AB]`.
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    Ok(a.dot(b))
}

/// Eigen-decomposition of a self-adjoint matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl Spectrum {
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self
            .eigenvalues
            .last()
            .expect("spectrum of a nonempty matrix")
    }

    /// Largest eigenvalue in absolute value.
    pub fn spectral_norm(&self) -> f64 {
        self.lambda_max().abs().max(self.lambda_min().abs())
    }

    /// `sum_k lambda_k v_k v_k*`
    pub fn reconstruct(&self) -> HermitianMatrix {
        let dim = self.eigenvalues.len();
        let mut acc = HermitianMatrix::zeros(dim);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            acc.add_scaled(*lambda, &HermitianMatrix::outer(v));
        }
        acc
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the classical real Jacobi rotation, so every
/// step is a unitary similarity `A <- G* A G`.
pub fn eig_sa(a: &HermitianMatrix) -> Result<Spectrum> {
    let d = a.dim;
    let mut m = a.data.clone();
    let mut v = vec![ZERO; d * d];
    for j in 0..d {
        v[j * d + j] = ONE;
    }
    let norm = a.hs_norm();
    let threshold = JACOBI_REL_TOL * norm;

    let off_mass = |m: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for j in 0..d {
            for k in 0..d {
                if j != k {
                    s += m[j * d + k].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_mass(&m);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[p * d + q];
                let abs = apq.norm();
                if abs == 0.0 {
                    continue;
                }
                let phase = apq / abs;
                let alpha = m[p * d + p].re;
                let gamma = m[q * d + q].re;
                let theta = (gamma - alpha) / (2.0 * abs);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = mkp * g_pp + mkq * g_qp;
                    m[k * d + q] = mkp * g_pq + mkq * g_qq;
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = vkp * g_pp + vkq * g_qp;
                    v[k * d + q] = vkp * g_pq + vkq * g_qq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = g_pp.conj() * mpk + g_qp.conj() * mqk;
                    m[q * d + k] = g_pq.conj() * mpk + g_qq.conj() * mqk;
                }
                m[p * d + q] = ZERO;
                m[q * d + p] = ZERO;
                m[p * d + p].im = 0.0;
                m[q * d + q].im = 0.0;
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    // stable: ties keep Jacobi order
    order.sort_by(|&i, &j| m[j * d + j].re.total_cmp(&m[i * d + i].re));
    let eigenvalues = order.iter().map(|&k| m[k * d + k].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| (0..d).map(|row| v[row * d + k]).collect())
        .collect();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

pub fn lambda_min(a: &HermitianMatrix) -> Result<f64> {
    Ok(eig_sa(a)?.lambda_min())
}

pub fn lambda_max(a: &HermitianMatrix) -> Result<f64> {
    Ok(eig_sa(a)?.lambda_max())
}

/// `lambda_min(A) >= -tol * (1 + ||A||_inf)`
pub fn is_psd(a: &HermitianMatrix, tol: f64) -> Result<bool> {
    let spec = eig_sa(a)?;
    Ok(spec.lambda_min() >= -tol * (1.0 + spec.spectral_norm()))
}

/// Orthonormalizes `seeds` in the Hilbert-Schmidt geometry after projecting
/// out `span(orthogonal_to)`.
///
/// Candidates that collapse under projection (see [`GS_DROP_TOL`]) are
/// dropped, so the output is a maximal orthonormal family for the projected
/// span. Projection is done twice per candidate to keep the output
/// orthogonal to working precision.
pub fn gram_schmidt_operators(
    seeds: &[HermitianMatrix],
    orthogonal_to: &[HermitianMatrix],
) -> Vec<HermitianMatrix> {
    let constraints = orthonormalize_against(orthogonal_to, &[]);
    orthonormalize_against(seeds, &constraints)
}

fn orthonormalize_against(
    seeds: &[HermitianMatrix],
    fixed: &[HermitianMatrix],
) -> Vec<HermitianMatrix> {
    let mut out: Vec<HermitianMatrix> = Vec::new();
    for seed in seeds {
        let before = seed.hs_norm();
        let mut v = seed.clone();
        for _ in 0..2 {
            for q in fixed.iter().chain(out.iter()) {
                let c = v.dot(q);
                v.add_scaled(-c, q);
            }
        }
        let after = v.hs_norm();
        if after < GS_DROP_TOL * (before + 1.0) {
            continue;
        }
        out.push(v.scale(1.0 / after));
    }
    out
}

/// The `d^2` matrices `E_jj`, then `(E_jk + E_kj)/sqrt 2` for `j < k`, then
/// `i(E_jk - E_kj)/sqrt 2` for `j < k`. Orthonormal in the HS product.
pub fn canonical_hermitian_basis(dim: usize) -> Vec<HermitianMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        let mut m = HermitianMatrix::zeros(dim);
        m.data[j * dim + j] = ONE;
        basis.push(m);
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut m = HermitianMatrix::zeros(dim);
            m.data[j * dim + k] = Complex64::new(r, 0.0);
            m.data[k * dim + j] = Complex64::new(r, 0.0);
            basis.push(m);
        }
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut m = HermitianMatrix::zeros(dim);
            m.data[j * dim + k] = Complex64::new(0.0, r);
            m.data[k * dim + j] = Complex64::new(0.0, -r);
            basis.push(m);
        }
    }
    basis
}

/// Hilbert-Schmidt Gram matrix `G_ij = Tr[M_i M_j]`.
pub fn gram_matrix(members: &[HermitianMatrix]) -> Vec<Vec<f64>> {
    let n = members.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = members[i].dot(&members[j]);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> HermitianMatrix {
        HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }
    fn sigma_y() -> HermitianMatrix {
        HermitianMatrix::new(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
    }
    fn sigma_z() -> HermitianMatrix {
        HermitianMatrix::diagonal(&[1.0, -1.0])
    }

    #[test]
    fn hs_inner_examples() {
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), 2.0);
        assert_eq!(hs_inner(&sigma_x(), &sigma_z()).unwrap(), 0.0);
        let u: f64 = 2.0;
        let t = HermitianMatrix::diagonal(&[1.0, u]);
        let f3 = HermitianMatrix::diagonal(&[u, -1.0]).scale(1.0 / 5f64.sqrt());
        assert!(hs_inner(&f3, &t).unwrap().abs() < 1e-15);
        assert!(matches!(
            hs_inner(&i2, &HermitianMatrix::identity(3)),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn load_rejects_asymmetric_and_symmetrizes_noise() {
        let bad = HermitianMatrix::from_real(2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(bad, Err(Error::NotHermitian { .. })));
        let noisy = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0 + 1e-12, 0.0]).unwrap();
        assert_eq!(noisy.get(0, 1), noisy.get(1, 0).conj());
        assert!(matches!(
            HermitianMatrix::new(2, vec![ONE; 3]),
            Err(Error::BadShape {
                expected: 4,
                got: 3
            })
        ));
    }

    #[test]
    fn eig_examples() {
        let s = eig_sa(&HermitianMatrix::diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0, 2.0, 1.0]);
        let s = eig_sa(&sigma_x()).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-15);
        let s = eig_sa(&sigma_y()).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        let recon = s.reconstruct();
        assert!((&recon - &sigma_y()).hs_norm() < 1e-14);
    }

    #[test]
    fn extreme_eigenvalues_and_psd() {
        let i3 = HermitianMatrix::identity(3);
        assert_eq!(lambda_min(&i3).unwrap(), 1.0);
        assert_eq!(lambda_max(&i3).unwrap(), 1.0);
        let t = HermitianMatrix::diagonal(&[1.0, 2.0]);
        assert_eq!(lambda_min(&t).unwrap(), 1.0);
        assert_eq!(lambda_max(&t).unwrap(), 2.0);
        assert!(is_psd(&t, 1e-8).unwrap());
        assert!(!is_psd(&sigma_z(), 1e-8).unwrap());
        assert!(is_psd(&HermitianMatrix::diagonal(&[1.0, -1e-12]), 1e-8).unwrap());
    }

    #[test]
    fn zero_matrix_has_zero_spectrum() {
        let s = eig_sa(&HermitianMatrix::zeros(4)).unwrap();
        assert!(s.eigenvalues.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn random_spectra_match_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=16 {
            let a = HermitianMatrix::random(d, &mut rng);
            let s = eig_sa(&a).unwrap();
            let scale = 1e-10 * d as f64 * s.spectral_norm().max(1e-300);
            let sum: f64 = s.eigenvalues.iter().sum();
            let sum_sq: f64 = s.eigenvalues.iter().map(|x| x * x).sum();
            assert!((sum - a.trace()).abs() <= scale);
            assert!((sum_sq - a.dot(&a)).abs() <= scale * s.spectral_norm());
            assert!((&s.reconstruct() - &a).hs_norm() <= 1e-10 * a.hs_norm());
            for j in 0..d {
                for k in 0..d {
                    let ip: Complex64 = s.eigenvectors[j]
                        .iter()
                        .zip(&s.eigenvectors[k])
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    let expect = if j == k { 1.0 } else { 0.0 };
                    assert!((ip - expect).norm() < 1e-12);
                }
            }
            assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn canonical_basis_is_orthonormal() {
        for d in 1..=4 {
            let b = canonical_hermitian_basis(d);
            assert_eq!(b.len(), d * d);
            let g = gram_matrix(&b);
            for (i, row) in g.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn gram_schmidt_traceless_qubit_basis() {
        let out = gram_schmidt_operators(
            &canonical_hermitian_basis(2),
            &[HermitianMatrix::identity(2)],
        );
        assert_eq!(out.len(), 3);
        for m in &out {
            assert!(m.trace().abs() < 1e-14);
            assert!((m.hs_norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gram_schmidt_recovers_diagonal_direction() {
        for &u in &[1.0, 2.0, 3.5] {
            let t = HermitianMatrix::diagonal(&[1.0, u]);
            let seeds = [sigma_x(), sigma_y(), HermitianMatrix::diagonal(&[1.0, 0.0])];
            let out = gram_schmidt_operators(&seeds, &[t]);
            assert_eq!(out.len(), 3);
            let expect = HermitianMatrix::diagonal(&[u, -1.0]).scale(1.0 / (u * u + 1.0).sqrt());
            assert!((&out[2] - &expect).hs_norm() < 1e-14);
        }
    }

    #[test]
    fn gram_schmidt_drops_duplicates() {
        let seeds = [sigma_x(), sigma_z(), sigma_x()];
        assert_eq!(gram_schmidt_operators(&seeds, &[]).len(), 2);
        let seeds = [sigma_x(), sigma_z(), sigma_x().scale(1.0 + 1e-13)];
        assert_eq!(gram_schmidt_operators(&seeds, &[]).len(), 2);
    }
}
