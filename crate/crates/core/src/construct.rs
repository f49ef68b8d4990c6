//! Every symmetric decomposition of `T` supported on `CT + span{F_i}` has the
//! form `E_i = T/N + x R_i`, where the `R_i` are the vertices of a regular
//! simplex built from an orthonormal family `F_1..F_{N-1}` orthogonal to `T`.
//! This module builds that parameterization and locates the range of `x`
//! for which all `E_i` stay positive semidefinite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::family::{fit_parameters, SymmetricFamily};
use crate::hermitian::{
    canonical_hermitian_basis, eig_sa, gram_schmidt_operators, HermitianMatrix,
};

/// Tolerance for accepting a caller-supplied orthonormal basis.
pub const BASIS_TOL: f64 = 1e-9;
/// Relative width at which the PSD bisection stops.
pub const BISECTION_REL_TOL: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 200;

/// Where the seeds for the orthonormal family come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisSeed {
    /// Diagonal units, then symmetric pairs, then antisymmetric pairs.
    Canonical,
    /// `d^2` GUE samples from a ChaCha8 stream with this seed.
    Random(u64),
}

/// The data `(T, {F_i}, {R_i})` with the spectral extremes of each `R_i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionBasis {
    #[serde(rename = "T")]
    pub t: HermitianMatrix,
    #[serde(rename = "F")]
    pub f: Vec<HermitianMatrix>,
    #[serde(rename = "R")]
    pub r: Vec<HermitianMatrix>,
    /// `mu_i = -lambda_min(R_i)`
    pub mu: Vec<f64>,
    /// `rho_i = lambda_max(R_i)`
    pub rho: Vec<f64>,
}

impl ConstructionBasis {
    /// Number of members `N` of the families built from this basis.
    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn t2(&self) -> f64 {
        self.t.dot(&self.t)
    }
}

/// Builds the basis for `N` members from canonical or random seeds.
pub fn build_basis(t: &HermitianMatrix, n: usize, seed: BasisSeed) -> Result<ConstructionBasis> {
    let d = t.dim();
    if n < 2 {
        return Err(Error::InvalidCount {
            n,
            reason: "at least two members are required".into(),
        });
    }
    if n > d * d {
        return Err(Error::InvalidCount {
            n,
            reason: format!("the complement of T has dimension {} < N - 1", d * d - 1),
        });
    }
    if t.hs_norm() == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let seeds = match seed {
        BasisSeed::Canonical => canonical_hermitian_basis(d),
        BasisSeed::Random(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (0..d * d)
                .map(|_| HermitianMatrix::random(d, &mut rng))
                .collect()
        }
    };
    let mut f = gram_schmidt_operators(&seeds, std::slice::from_ref(t));
    if f.len() < n - 1 {
        return Err(Error::Invariant(format!(
            "only {} orthonormal directions found, need {}",
            f.len(),
            n - 1
        )));
    }
    f.truncate(n - 1);
    basis_from_parts(t.clone(), f)
}

/// Completes a caller-supplied orthonormal family `F` (orthogonal to `T`)
/// into a basis.
pub fn basis_from_parts(t: HermitianMatrix, f: Vec<HermitianMatrix>) -> Result<ConstructionBasis> {
    if f.is_empty() {
        return Err(Error::InvalidCount {
            n: 1,
            reason: "at least two members are required".into(),
        });
    }
    let t_norm = t.hs_norm();
    if t_norm == 0.0 {
        return Err(Error::ZeroOperator);
    }
    for (i, fi) in f.iter().enumerate() {
        if fi.dim() != t.dim() {
            return Err(Error::DimensionMismatch(t.dim(), fi.dim()));
        }
        if fi.dot(&t).abs() > BASIS_TOL * t_norm {
            return Err(Error::InvalidParameter(format!(
                "F_{} is not orthogonal to T",
                i + 1
            )));
        }
        for (j, fj) in f.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            if (fi.dot(fj) - want).abs() > BASIS_TOL {
                return Err(Error::InvalidParameter(format!(
                    "F_{} and F_{} are not orthonormal",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let r = simplex_directions(&f);
    let mut mu = Vec::with_capacity(r.len());
    let mut rho = Vec::with_capacity(r.len());
    for ri in &r {
        let spec = eig_sa(ri)?;
        mu.push(-spec.lambda_min());
        rho.push(spec.lambda_max());
    }
    Ok(ConstructionBasis { t, f, r, mu, rho })
}

/// `R_i = F / (sqrt(N-1)(sqrt N + 1)) - sqrt(N/(N-1)) F_i` for `i < N` and
/// `R_N = F / sqrt(N-1)`, with `F = sum_i F_i`.
pub fn simplex_directions(f: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
    let n = f.len() + 1;
    let nf = n as f64;
    let root_nm1 = (nf - 1.0).sqrt();
    let total = HermitianMatrix::sum(f[0].dim(), f);
    let shared = total.scale(1.0 / (root_nm1 * (nf.sqrt() + 1.0)));
    let mut r: Vec<HermitianMatrix> = f
        .iter()
        .map(|fi| {
            let mut ri = shared.clone();
            ri.add_scaled(-nf.sqrt() / root_nm1, fi);
            ri
        })
        .collect();
    r.push(total.scale(1.0 / root_nm1));
    r
}

/// `E_i = T/N + x R_i`.
pub fn build_family(basis: &ConstructionBasis, x: f64) -> Result<SymmetricFamily> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "x must be non-negative, got {x}"
        )));
    }
    fit_parameters(members_at(basis, x))
}

pub(crate) fn members_at(basis: &ConstructionBasis, x: f64) -> Vec<HermitianMatrix> {
    let base = basis.t.scale(1.0 / basis.n() as f64);
    basis
        .r
        .iter()
        .map(|ri| {
            let mut e = base.clone();
            e.add_scaled(x, ri);
            e
        })
        .collect()
}

/// Recovers `x = ||E_i - T/N||_HS` for each member.
pub fn recover_x(members: &[HermitianMatrix], t: &HermitianMatrix) -> Vec<f64> {
    let base = t.scale(1.0 / members.len() as f64);
    members.iter().map(|e| (e - &base).hs_norm()).collect()
}

/// The real `N x (N-1)` matrix with `E_i = T/N + x sum_j V_ij F_j`.
pub fn v_matrix(n: usize) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::InvalidCount {
            n,
            reason: "the V matrix needs N >= 2".into(),
        });
    }
    let nf = n as f64;
    let scale = 1.0 / ((nf - 1.0).sqrt() * (nf.sqrt() + 1.0));
    let diag = (1.0 - nf.sqrt() - nf) * scale;
    let mut v = vec![vec![scale; n - 1]; n];
    for (i, row) in v.iter_mut().enumerate().take(n - 1) {
        row[i] = diag;
    }
    v[n - 1] = vec![(nf.sqrt() + 1.0) * scale; n - 1];
    Ok(v)
}

pub fn a_from_x(x: f64, t2: f64, n: usize) -> f64 {
    t2 / (n * n) as f64 + x * x
}

pub fn b_from_x(x: f64, t2: f64, n: usize) -> f64 {
    t2 / (n * n) as f64 - x * x / (n as f64 - 1.0)
}

pub fn x_from_a(a: f64, t2: f64, n: usize) -> Result<f64> {
    let floor = t2 / (n * n) as f64;
    if !(a >= floor) {
        return Err(Error::InvalidParameter(format!(
            "a = {a} is below the lower bound t2/N^2 = {floor}"
        )));
    }
    Ok((a - floor).sqrt())
}

/// Range of `x` giving positive families.
#[derive(Debug, Clone, Serialize)]
pub struct PsdWindow {
    /// `tau / (N max_i mu_i)`; every `x` up to here is guaranteed positive.
    pub x_sufficient: f64,
    /// Largest `x` with all `E_i >= 0`, found by bisection.
    pub x_exact: f64,
    /// `||T||_inf / (N phi(T))`, the necessary upper limit.
    pub x_upper: f64,
    pub a_sufficient: f64,
    pub a_exact: f64,
    pub a_upper: f64,
    pub bisection_iterations: usize,
}

/// `min_i lambda_min(T/N + x R_i)`, concave in `x`.
pub fn min_member_eigenvalue(basis: &ConstructionBasis, x: f64) -> Result<f64> {
    let mut lo = f64::INFINITY;
    for e in members_at(basis, x) {
        lo = lo.min(eig_sa(&e)?.lambda_min());
    }
    Ok(lo)
}

/// Sufficient and exact positivity thresholds for `x`.
///
/// The set `{x >= 0 : g(x) >= 0}` with `g = min_member_eigenvalue` is an
/// interval because `g` is concave and `g(0) = tau/N > 0`, so bisection
/// between the sufficient and necessary limits finds its right end.
pub fn psd_window(basis: &ConstructionBasis) -> Result<PsdWindow> {
    let spec = eig_sa(&basis.t)?;
    let tau = spec.lambda_min();
    if tau <= 0.0 {
        return Err(Error::NotPositiveDefinite(tau));
    }
    let n = basis.n();
    let t2 = basis.t2();
    let mu_max = basis.mu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let x_sufficient = tau / (n as f64 * mu_max);
    let x_upper = bounds::x_upper_psd(&spec.eigenvalues, n)?;

    let mut lo = x_sufficient;
    let mut hi = x_upper.max(lo);
    if min_member_eigenvalue(basis, hi)? >= 0.0 {
        lo = hi;
        hi *= 2.0;
        if min_member_eigenvalue(basis, hi)? >= 0.0 {
            return Err(Error::Bisection(format!(
                "family still positive at twice the upper limit x = {hi}"
            )));
        }
    }
    let mut iterations = 0;
    while hi - lo > BISECTION_REL_TOL * hi && iterations < BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if min_member_eigenvalue(basis, mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(PsdWindow {
        x_sufficient,
        x_exact: lo,
        x_upper,
        a_sufficient: a_from_x(x_sufficient, t2, n),
        a_exact: a_from_x(lo, t2, n),
        a_upper: a_from_x(x_upper, t2, n),
        bisection_iterations: iterations,
    })
}
