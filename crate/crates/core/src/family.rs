//! Operator families, their Gram geometry, and the structural checks for
//! decompositions `sum_i E_i = T`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{eig_sa, gram_matrix, is_psd, HermitianMatrix};

/// Default absolute tolerance, applied after scaling by `1 + ||T||_HS`.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Relative cut-off on Gram eigenvalues when counting rank.
pub const RANK_REL_TOL: f64 = 1e-9;
/// `absorb_dev <= PROJECTION_ABSORB_FACTOR * N * tol` counts as absorbing.
pub const PROJECTION_ABSORB_FACTOR: f64 = 10.0;

/// Tolerance scaled to the size of `T`.
pub fn scaled_tol(tol: f64, t: &HermitianMatrix) -> f64 {
    tol * (1.0 + t.hs_norm())
}

/// A list of operators together with the best-fitting symmetry parameters
/// `Tr[E_i E_j] ~ a delta_ij + b (1 - delta_ij)`.
#[derive(Debug, Clone)]
pub struct SymmetricFamily {
    members: Vec<HermitianMatrix>,
    gram: Vec<Vec<f64>>,
    a_fit: f64,
    b_fit: f64,
    max_dev: f64,
}

impl SymmetricFamily {
    pub fn members(&self) -> &[HermitianMatrix] {
        &self.members
    }

    pub fn into_members(self) -> Vec<HermitianMatrix> {
        self.members
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    /// Mean of the Gram diagonal.
    pub fn a(&self) -> f64 {
        self.a_fit
    }

    /// Mean of the off-diagonal Gram entries; `0` for a single member.
    pub fn b(&self) -> f64 {
        self.b_fit
    }

    pub fn max_dev(&self) -> f64 {
        self.max_dev
    }

    /// `b` is only meaningful for two or more members.
    pub fn b_defined(&self) -> bool {
        self.members.len() > 1
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_dev <= tol
    }

    pub fn sum(&self) -> HermitianMatrix {
        HermitianMatrix::sum(self.dim(), &self.members)
    }

    pub fn summary(&self, tol: f64) -> FamilySummary {
        FamilySummary {
            n: self.len(),
            d: self.dim(),
            a_fit: self.a_fit,
            b_fit: self.b_fit,
            b_defined: self.b_defined(),
            max_dev: self.max_dev,
            symmetric: self.is_symmetric(tol),
        }
    }
}

/// Serializable view of the fitted parameters.
#[derive(Debug, Clone, Serialize)]
pub struct FamilySummary {
    pub n: usize,
    pub d: usize,
    pub a_fit: f64,
    pub b_fit: f64,
    pub b_defined: bool,
    pub max_dev: f64,
    pub symmetric: bool,
}

fn check_common_dim(members: &[HermitianMatrix]) -> Result<usize> {
    let first = members.first().ok_or(Error::EmptyFamily)?;
    let d = first.dim();
    if let Some(bad) = members.iter().find(|m| m.dim() != d) {
        return Err(Error::DimensionMismatch(d, bad.dim()));
    }
    Ok(d)
}

/// Fits `(a, b)` to the Gram matrix. Never fails on asymmetric families;
/// `max_dev` simply grows.
pub fn fit_parameters(members: Vec<HermitianMatrix>) -> Result<SymmetricFamily> {
    check_common_dim(&members)?;
    let n = members.len();
    let gram = gram_matrix(&members);
    let a_fit = (0..n).map(|i| gram[i][i]).sum::<f64>() / n as f64;
    let b_fit = if n > 1 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| gram[i][j])
            .sum();
        off / (n * (n - 1)) as f64
    } else {
        0.0
    };
    let mut max_dev: f64 = 0.0;
    for (i, row) in gram.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            let target = if i == j { a_fit } else { b_fit };
            max_dev = max_dev.max((g - target).abs());
        }
    }
    Ok(SymmetricFamily {
        members,
        gram,
        a_fit,
        b_fit,
        max_dev,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    /// `|| sum_i E_i - T ||_HS`
    pub residual: f64,
    /// The same residual recomputed from Gram data alone:
    /// `sqrt(sum_ij G_ij - 2 sum_i Tr[E_i T] + t2)`.
    pub residual_via_gram: f64,
    pub tol_used: f64,
    pub is_decomposition: bool,
    pub symmetric: bool,
    /// `|b - (t2 - N a) / (N (N - 1))|`
    pub b_identity_dev: f64,
    /// `max_i |Tr[E_i T] - t2 / N|`
    pub trace_identity_dev: f64,
    /// Perturbation bounds on the two deviations implied by `max_dev` and
    /// `residual`; both deviations must sit below them.
    pub b_identity_bound: f64,
    pub trace_identity_bound: f64,
    pub identities_hold: bool,
    pub degenerate: bool,
    pub degenerate_weights: Option<Vec<f64>>,
}

/// Checks `sum_i E_i = T` together with the two identities that any
/// symmetric decomposition must satisfy, and detects degenerate
/// decompositions `E_i = t_i T`.
pub fn verify_decomposition(
    family: &SymmetricFamily,
    t: &HermitianMatrix,
    tol: f64,
) -> Result<DecompositionReport> {
    let d = family.dim();
    if t.dim() != d {
        return Err(Error::DimensionMismatch(d, t.dim()));
    }
    let n = family.len();
    let nf = n as f64;
    let tol_used = scaled_tol(tol, t);
    let sum = family.sum();
    let residual = (&sum - t).hs_norm();
    let t2 = t.dot(t);

    let traces: Vec<f64> = family.members.iter().map(|e| e.dot(t)).collect();
    let gram_total: f64 = family.gram.iter().flatten().sum();
    let residual_via_gram = (gram_total - 2.0 * traces.iter().sum::<f64>() + t2)
        .max(0.0)
        .sqrt();

    let trace_identity_dev = traces
        .iter()
        .map(|&v| (v - t2 / nf).abs())
        .fold(0.0, f64::max);
    let b_identity_dev = if n > 1 {
        (family.b_fit - (t2 - nf * family.a_fit) / (nf * (nf - 1.0))).abs()
    } else {
        0.0
    };

    let delta = family.max_dev;
    let eps = residual;
    let m = family
        .members
        .iter()
        .map(|e| e.hs_norm())
        .fold(0.0, f64::max);
    let s = sum.hs_norm();
    let roundoff = 64.0 * f64::EPSILON * nf * nf * (m * m + t2 + 1.0);
    let shared = nf * nf * delta + 2.0 * s * eps + eps * eps;
    let trace_identity_bound =
        2.0 * nf * delta + m * eps + (2.0 * s * eps + eps * eps) / nf + roundoff;
    let b_identity_bound = if n > 1 {
        shared / (nf * (nf - 1.0)) + roundoff
    } else {
        0.0
    };

    let (degenerate, degenerate_weights) = degeneracy(&family.members, t, tol);

    Ok(DecompositionReport {
        residual,
        residual_via_gram,
        tol_used,
        is_decomposition: residual <= tol_used,
        symmetric: family.max_dev <= tol_used,
        b_identity_dev,
        trace_identity_dev,
        b_identity_bound,
        trace_identity_bound,
        identities_hold: b_identity_dev <= b_identity_bound
            && trace_identity_dev <= trace_identity_bound,
        degenerate,
        degenerate_weights,
    })
}

/// Projection coefficients `t_i = <E_i, T> / t2`, then a residual test.
fn degeneracy(
    members: &[HermitianMatrix],
    t: &HermitianMatrix,
    tol: f64,
) -> (bool, Option<Vec<f64>>) {
    let t2 = t.dot(t);
    if t2 == 0.0 {
        return (false, None);
    }
    let weights: Vec<f64> = members.iter().map(|e| e.dot(t) / t2).collect();
    let t_norm = t2.sqrt();
    let proportional = members
        .iter()
        .zip(&weights)
        .all(|(e, &w)| (e - &t.scale(w)).hs_norm() <= tol * t_norm);
    let sums_to_one = (weights.iter().sum::<f64>() - 1.0).abs() <= tol;
    if proportional && sums_to_one {
        (true, Some(weights))
    } else {
        (false, None)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankOneReport {
    /// Every member is a multiple of `T`.
    pub holds: bool,
    pub weights: Vec<f64>,
    pub max_deviation: f64,
}

fn require_positive_decomposition(
    members: &[HermitianMatrix],
    t: &HermitianMatrix,
    tol: f64,
) -> Result<()> {
    let d = check_common_dim(members)?;
    if t.dim() != d {
        return Err(Error::DimensionMismatch(d, t.dim()));
    }
    for m in members.iter().chain(std::iter::once(t)) {
        let spec = eig_sa(m)?;
        if spec.lambda_min() < -tol * (1.0 + spec.spectral_norm()) {
            return Err(Error::NotPositive(spec.lambda_min()));
        }
    }
    let residual = (&HermitianMatrix::sum(d, members) - t).hs_norm();
    if residual > scaled_tol(tol, t) {
        return Err(Error::NotADecomposition(residual));
    }
    Ok(())
}

/// For a rank-one positive `T`, every positive decomposition is degenerate.
/// Returns the forced weights and whether each member is indeed `t_i T`.
pub fn check_rank_one_t(
    members: &[HermitianMatrix],
    t: &HermitianMatrix,
    tol: f64,
) -> Result<RankOneReport> {
    let spec = eig_sa(t)?;
    let top = spec.lambda_max();
    if top <= 0.0 {
        return Err(Error::ZeroOperator);
    }
    if spec.eigenvalues.len() > 1 && spec.eigenvalues[1] > tol * top {
        return Err(Error::NotRankOne(spec.eigenvalues[1]));
    }
    require_positive_decomposition(members, t, tol)?;

    let t2 = t.dot(t);
    let weights: Vec<f64> = members.iter().map(|e| e.dot(t) / t2).collect();
    let max_deviation = members
        .iter()
        .zip(&weights)
        .map(|(e, &w)| (e - &t.scale(w)).hs_norm())
        .fold(0.0, f64::max);
    Ok(RankOneReport {
        holds: max_deviation <= scaled_tol(tol, t)
            && weights.iter().all(|&w| (-tol..=1.0 + tol).contains(&w)),
        weights,
        max_deviation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionReport {
    /// `||T^2 - T||_HS <= tol`
    pub is_projection: bool,
    pub projection_dev: f64,
    /// `max_i ||T E_i - E_i|| + ||E_i T - E_i||`
    pub absorb_dev: f64,
    pub absorbs: bool,
    /// `is_projection == absorbs`
    pub equivalence_holds: bool,
}

/// `T` is a projection iff `T E_i = E_i T = E_i` for every member of a
/// positive decomposition. Both sides are measured and compared.
pub fn check_projection_characterization(
    members: &[HermitianMatrix],
    t: &HermitianMatrix,
    tol: f64,
) -> Result<ProjectionReport> {
    require_positive_decomposition(members, t, tol)?;
    let tol_used = scaled_tol(tol, t);
    let projection_dev = (&t.square() - t).hs_norm();
    let absorb_dev = members
        .iter()
        .map(|e| t.product(e).distance_to(e) + e.product(t).distance_to(e))
        .fold(0.0, f64::max);
    let is_projection = projection_dev <= tol_used;
    let absorbs = absorb_dev <= PROJECTION_ABSORB_FACTOR * members.len() as f64 * tol_used;
    Ok(ProjectionReport {
        is_projection,
        projection_dev,
        absorb_dev,
        absorbs,
        equivalence_holds: is_projection == absorbs,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalityReport {
    /// Mean of the fitted `alpha(x)`.
    pub beta: Complex64,
    pub alphas: Vec<Complex64>,
    /// Largest pairwise `|alpha(x) - alpha(y)|`.
    pub alpha_spread: f64,
    /// Largest `||S x - alpha(x) T x|| / ||T x||` with `S = sum_i E_i`.
    pub residual_max: f64,
    pub local: bool,
}

fn vdot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn vnorm(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Fits `sum_i E_i x = alpha(x) T x` on each sample by one-dimensional least
/// squares, `alpha = <Tx, Sx> / <Tx, Tx>`, and reports how constant
/// `alpha` is.
pub fn check_local_decomposition(
    members: &[HermitianMatrix],
    t: &HermitianMatrix,
    samples: &[Vec<Complex64>],
    tol: f64,
) -> Result<LocalityReport> {
    let d = check_common_dim(members)?;
    if t.dim() != d {
        return Err(Error::DimensionMismatch(d, t.dim()));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no sample vectors".into()));
    }
    let spec = eig_sa(t)?;
    let smallest = spec
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .fold(f64::INFINITY, f64::min);
    if smallest <= tol * (1.0 + spec.spectral_norm()) {
        return Err(Error::Singular(smallest));
    }
    let s = HermitianMatrix::sum(d, members);
    let mut alphas = Vec::with_capacity(samples.len());
    let mut residual_max: f64 = 0.0;
    for x in samples {
        if x.len() != d {
            return Err(Error::DimensionMismatch(d, x.len()));
        }
        if vnorm(x) == 0.0 {
            return Err(Error::InvalidParameter("zero sample vector".into()));
        }
        let tx = t.apply(x);
        let sx = s.apply(x);
        let alpha = vdot(&tx, &sx) / vdot(&tx, &tx).re;
        let resid: Vec<Complex64> = sx.iter().zip(&tx).map(|(a, b)| a - alpha * b).collect();
        residual_max = residual_max.max(vnorm(&resid) / vnorm(&tx));
        alphas.push(alpha);
    }
    let beta = alphas.iter().sum::<Complex64>() / alphas.len() as f64;
    let mut alpha_spread: f64 = 0.0;
    for (i, a) in alphas.iter().enumerate() {
        for b in &alphas[i + 1..] {
            alpha_spread = alpha_spread.max((a - b).norm());
        }
    }
    Ok(LocalityReport {
        beta,
        local: residual_max <= tol && alpha_spread <= tol * (1.0 + beta.norm()),
        alphas,
        alpha_spread,
        residual_max,
    })
}

/// Rank of the Gram matrix, counting eigenvalues above
/// `RANK_REL_TOL * ||G||`.
pub fn linear_independence_rank(members: &[HermitianMatrix]) -> Result<usize> {
    if members.is_empty() {
        return Ok(0);
    }
    check_common_dim(members)?;
    let g = gram_matrix(members);
    let n = g.len();
    let flat: Vec<f64> = g.into_iter().flatten().collect();
    let spec = eig_sa(&HermitianMatrix::from_real(n, &flat)?)?;
    let norm = spec.spectral_norm();
    if norm == 0.0 {
        return Ok(0);
    }
    Ok(spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > RANK_REL_TOL * norm)
        .count())
}

/// Member-wise positivity flags.
pub fn positivity_flags(members: &[HermitianMatrix], tol: f64) -> Result<Vec<bool>> {
    members.iter().map(|m| is_psd(m, tol)).collect()
}
