#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use symdec::hermitian::{eig_sa, HermitianMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector<R: Rng>(d: usize, rng: &mut R) -> Vec<Complex64> {
    (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn normalize(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / n).collect()
}

/// Columns of a Haar-ish random unitary: the eigenvectors of a GUE sample.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    eig_sa(&HermitianMatrix::random(d, rng))
        .unwrap()
        .eigenvectors
}

/// `U v` for `U` given by its columns.
pub fn apply_unitary(u: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    let d = v.len();
    (0..d)
        .map(|row| (0..d).map(|k| u[k][row] * v[k]).sum())
        .collect()
}

/// Positive definite target with spectrum inside `[0.2, 3]`.
pub fn random_positive_target<R: Rng>(d: usize, rng: &mut R) -> HermitianMatrix {
    let u = random_unitary(d, rng);
    let mut t = HermitianMatrix::zeros(d);
    for col in &u {
        t.add_scaled(rng.random_range(0.2..3.0), &HermitianMatrix::outer(col));
    }
    t
}

/// Random positive operator of random rank with `Tr[E^2] = 1`.
pub fn random_unit_positive<R: Rng>(d: usize, rng: &mut R) -> HermitianMatrix {
    let rank = rng.random_range(1..=d);
    let mut e = HermitianMatrix::zeros(d);
    for _ in 0..rank {
        e.add_scaled(
            rng.random_range(0.05..1.0),
            &HermitianMatrix::outer(&random_vector(d, rng)),
        );
    }
    e.scale(1.0 / e.hs_norm())
}

/// Rank-one projectors onto the given (normalized) vectors.
pub fn projectors(vectors: &[Vec<Complex64>]) -> Vec<HermitianMatrix> {
    vectors
        .iter()
        .map(|v| HermitianMatrix::outer(&normalize(v)))
        .collect()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Vectors of a qubit SIC (tetrahedron on the Bloch sphere).
pub fn qubit_sic_vectors() -> Vec<Vec<Complex64>> {
    let s = (1.0f64 / 3.0).sqrt();
    let t = (2.0f64 / 3.0).sqrt();
    (0..3)
        .map(|k| {
            let ph = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            vec![c(s, 0.0), c(t * ph.cos(), t * ph.sin())]
        })
        .chain(std::iter::once(vec![c(1.0, 0.0), c(0.0, 0.0)]))
        .collect()
}

pub fn onb_vectors(d: usize) -> Vec<Vec<Complex64>> {
    (0..d)
        .map(|k| {
            (0..d)
                .map(|j| c(if j == k { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

pub fn trine_vectors() -> Vec<Vec<Complex64>> {
    (0..3)
        .map(|k| {
            let th = k as f64 * std::f64::consts::PI / 3.0;
            vec![c(th.cos(), 0.0), c(th.sin(), 0.0)]
        })
        .collect()
}

/// Equiangular families of rank-one projectors summing to a multiple of
/// the identity, with N = d, N = d + 1 and N = d^2.
pub fn equiangular_tight_families() -> Vec<Vec<Vec<Complex64>>> {
    vec![
        onb_vectors(2),
        onb_vectors(3),
        onb_vectors(4),
        trine_vectors(),
        qubit_sic_vectors(),
    ]
}
