//! Dual families of non-degenerate symmetric families.
//!
//! For a symmetric family the Gram matrix is `G = (a - b) I + b J`, whose
//! inverse is explicit, so the biorthogonal family `E~_i = sum_j (G^-1)_ij E_j`
//! needs no linear solve. When the family decomposes `T`, rescaling the dual
//! by `t2 / N` gives another symmetric decomposition of `T`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{fit_parameters, scaled_tol, SymmetricFamily};
use crate::hermitian::HermitianMatrix;

/// `|a N^2 - t2| <= DEGENERACY_REL_TOL * t2` is treated as degenerate.
pub const DEGENERACY_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct DualParameters {
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub a_hat: Option<f64>,
    pub b_hat: Option<f64>,
    pub x_hat: Option<f64>,
}

/// Parameters of the dual of a symmetric family with parameters `(a, b)`.
pub fn dual_parameters(a: f64, b: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let denom = (a - b) * (a + b * (nf - 1.0));
    ((a + b * (nf - 2.0)) / denom, -b / denom)
}

/// Parameters of the dual of a symmetric decomposition of `T`, expressed
/// through `a` and `t2` only.
pub fn decomposition_dual_parameters(a: f64, t2: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let denom = a * nf * nf - t2;
    (
        nf / t2 * ((nf - 2.0) * t2 + a * nf) / denom,
        -nf / t2 * (t2 - a * nf) / denom,
    )
}

/// `a` of the normalized dual; an involution on `(t2/N^2, inf)`.
pub fn hat_a(a: f64, t2: f64, n: usize) -> f64 {
    let nf = n as f64;
    t2 / nf * ((nf - 2.0) * t2 + a * nf) / (a * nf * nf - t2)
}

/// `x^ = (N - 1) t2 / (N^2 x)`, the construction parameter of the
/// normalized dual.
pub fn hat_x(x: f64, t2: f64, n: usize) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Degenerate(format!("x = {x} has no dual parameter")));
    }
    let nf = n as f64;
    Ok((nf - 1.0) * t2 / (nf * nf * x))
}

/// The `x` fixed by `x -> x^`: `sqrt((N - 1) t2) / N`.
pub fn self_dual_x(t2: f64, n: usize) -> f64 {
    ((n as f64 - 1.0) * t2).sqrt() / n as f64
}

/// `E~_i = (E_i - b/(a + b(N-1)) sum_j E_j) / (a - b)`, using the fitted
/// parameters.
pub fn dual_family(family: &SymmetricFamily, tol: f64) -> Result<SymmetricFamily> {
    let (a, b) = (family.a(), family.b());
    if !family.is_symmetric(tol * (1.0 + a.abs())) {
        return Err(Error::NotSymmetric(family.max_dev()));
    }
    let nf = family.len() as f64;
    let gap = a - b;
    let top = a + b * (nf - 1.0);
    if gap <= tol || top <= tol {
        return Err(Error::Degenerate(format!(
            "Gram matrix is singular (a - b = {gap:.3e}, a + b(N-1) = {top:.3e})"
        )));
    }
    let sum = family.sum();
    let shift = b / top;
    let members = family
        .members()
        .iter()
        .map(|e| {
            let mut m = e.clone();
            m.add_scaled(-shift, &sum);
            m.scale(1.0 / gap)
        })
        .collect();
    fit_parameters(members)
}

fn require_decomposition(family: &SymmetricFamily, t: &HermitianMatrix, tol: f64) -> Result<f64> {
    if t.dim() != family.dim() {
        return Err(Error::DimensionMismatch(family.dim(), t.dim()));
    }
    let residual = (&family.sum() - t).hs_norm();
    if residual > scaled_tol(tol, t) {
        return Err(Error::NotADecomposition(residual));
    }
    if !family.is_symmetric(tol * (1.0 + family.a().abs())) {
        return Err(Error::NotSymmetric(family.max_dev()));
    }
    let t2 = t.dot(t);
    let nf = family.len() as f64;
    let excess = family.a() * nf * nf - t2;
    if t2 == 0.0 || excess.abs() <= DEGENERACY_REL_TOL * t2 {
        return Err(Error::Degenerate(format!("a N^2 - t2 = {excess:.3e}")));
    }
    Ok(t2)
}

/// `E~_i = N(N-1)/(a N^2 - t2) [E_i - (t2 - a N)/((N-1) t2) T]`.
pub fn dual_of_decomposition(
    family: &SymmetricFamily,
    t: &HermitianMatrix,
    tol: f64,
) -> Result<SymmetricFamily> {
    let t2 = require_decomposition(family, t, tol)?;
    let nf = family.len() as f64;
    let a = family.a();
    let factor = nf * (nf - 1.0) / (a * nf * nf - t2);
    let shift = (t2 - a * nf) / ((nf - 1.0) * t2);
    let members = family
        .members()
        .iter()
        .map(|e| {
            let mut m = e.clone();
            m.add_scaled(-shift, t);
            m.scale(factor)
        })
        .collect();
    fit_parameters(members)
}

/// `E^_i = (t2 / N) E~_i`, again a symmetric decomposition of `T`.
pub fn normalized_dual(
    family: &SymmetricFamily,
    t: &HermitianMatrix,
    tol: f64,
) -> Result<SymmetricFamily> {
    let dual = dual_of_decomposition(family, t, tol)?;
    let c = t.dot(t) / family.len() as f64;
    fit_parameters(dual.members().iter().map(|e| e.scale(c)).collect())
}

/// Collects the dual parameters of `family`, adding the normalized values
/// when `T` is known and `x^` when the family came from a construction with
/// parameter `x`.
pub fn describe_dual(
    family: &SymmetricFamily,
    t: Option<&HermitianMatrix>,
    x: Option<f64>,
) -> Result<DualParameters> {
    let n = family.len();
    let (a_tilde, b_tilde) = dual_parameters(family.a(), family.b(), n);
    let (a_hat, b_hat, x_hat) = match t {
        Some(t) => {
            let scale = (t.dot(t) / n as f64).powi(2);
            let x_hat = x.map(|x| hat_x(x, t.dot(t), n)).transpose()?;
            (Some(scale * a_tilde), Some(scale * b_tilde), x_hat)
        }
        None => (None, None, None),
    };
    Ok(DualParameters {
        a_tilde,
        b_tilde,
        a_hat,
        b_hat,
        x_hat,
    })
}
