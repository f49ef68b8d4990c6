//! Welch-type lower bounds on pairwise Hilbert-Schmidt inner products,
//! with detection of the equality cases (equiangular, rank-one, tight).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{eig_sa, gram_matrix, HermitianMatrix};

/// Certificate deviations at or below this count as equality.
pub const EQUALITY_TOL: f64 = 1e-8;
/// Allowed deviation of `Tr[E_i^2]` from one.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// Positive weights `v_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightsJson", into = "WeightsJson")]
pub struct WeightVector {
    v: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WeightsJson {
    v: Vec<f64>,
}

impl TryFrom<WeightsJson> for WeightVector {
    type Error = Error;
    fn try_from(w: WeightsJson) -> Result<Self> {
        WeightVector::new(w.v)
    }
}

impl From<WeightVector> for WeightsJson {
    fn from(w: WeightVector) -> Self {
        WeightsJson { v: w.v }
    }
}

impl WeightVector {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if let Some(bad) = v.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidWeights(format!(
                "weights must be positive, got {bad}"
            )));
        }
        Ok(Self { v })
    }

    pub fn uniform(n: usize) -> Self {
        Self { v: vec![1.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// `[v] = (sum v)^2 / sum v^2`, always in `[1, N]`.
    pub fn coefficient(&self) -> f64 {
        let s: f64 = self.v.iter().sum();
        let q: f64 = self.v.iter().map(|x| x * x).sum();
        s * s / q
    }

    fn sums(&self) -> (f64, f64) {
        (self.v.iter().sum(), self.v.iter().map(|x| x * x).sum())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct EqualityCertificate {
    /// Spread of the off-diagonal Gram entries around their mean.
    pub equiangular_dev: f64,
    /// `|| sum_i v_i E_i - (d^-1 sum_i v_i Tr E_i) I ||_HS`
    pub tightness_dev: f64,
    /// `max_i ||E_i^2 - E_i||_HS`; present for the normalized bounds.
    pub rank_one_dev: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WelchReport {
    pub bound: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub equality: bool,
    pub certificate: EqualityCertificate,
    pub weight_coefficient: Option<f64>,
    pub p: Option<f64>,
    /// Hölder only: `(sum v_i v_j G_ij)^p / (sum v_i v_j)^(p-1)`, which sits
    /// between `lhs` and `rhs`.
    pub intermediate: Option<f64>,
    /// Min-angle only: the weight-independent bound `(N-d)/(d(N-1))`.
    pub rhs_flat: Option<f64>,
    /// Min-angle only: the weighted bound, never above `rhs_flat`.
    pub rhs_weighted: Option<f64>,
    /// Tiny negative inner products clamped to zero before taking powers.
    pub clamped: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct WelchOptions {
    pub tol: f64,
    /// Rescale members to `Tr[E^2] = 1` instead of rejecting them.
    pub auto_normalize: bool,
}

impl Default for WelchOptions {
    fn default() -> Self {
        Self {
            tol: EQUALITY_TOL,
            auto_normalize: false,
        }
    }
}

fn common_dim(members: &[HermitianMatrix]) -> Result<usize> {
    if members.len() < 2 {
        return Err(Error::InvalidCount {
            n: members.len(),
            reason: "Welch bounds need at least two members".into(),
        });
    }
    let d = members[0].dim();
    if let Some(bad) = members.iter().find(|m| m.dim() != d) {
        return Err(Error::DimensionMismatch(d, bad.dim()));
    }
    Ok(d)
}

fn off_diagonal(g: &[Vec<f64>]) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
    g.iter().enumerate().flat_map(|(i, row)| {
        row.iter()
            .enumerate()
            .filter(move |&(j, _)| j != i)
            .map(move |(j, &v)| (i, j, v))
    })
}

fn equiangular_dev(g: &[Vec<f64>]) -> f64 {
    let n = g.len();
    let mean = off_diagonal(g).map(|(_, _, v)| v).sum::<f64>() / (n * (n - 1)) as f64;
    off_diagonal(g)
        .map(|(_, _, v)| (v - mean).abs())
        .fold(0.0, f64::max)
}

fn tightness_dev(members: &[HermitianMatrix], weights: &[f64]) -> f64 {
    let d = members[0].dim();
    let mut s = HermitianMatrix::zeros(d);
    for (m, &w) in members.iter().zip(weights) {
        s.add_scaled(w, m);
    }
    let c = s.trace() / d as f64;
    (&s - &HermitianMatrix::identity(d).scale(c)).hs_norm()
}

fn rank_one_dev(members: &[HermitianMatrix]) -> f64 {
    members
        .iter()
        .map(|e| (&e.square() - e).hs_norm())
        .fold(0.0, f64::max)
}

/// Simplex bound for arbitrary self-adjoint members:
/// `max_{i!=j} <E_i,E_j> >= [d^-1 (sum Tr E_j)^2 - sum <E_j,E_j>] / (N(N-1))`.
pub fn simplex_bound(members: &[HermitianMatrix], tol: f64) -> Result<WelchReport> {
    let d = common_dim(members)?;
    let n = members.len() as f64;
    let g = gram_matrix(members);
    let lhs = off_diagonal(&g)
        .map(|(_, _, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let trace_sum: f64 = members.iter().map(|m| m.trace()).sum();
    let self_sum: f64 = (0..members.len()).map(|i| g[i][i]).sum();
    let rhs = (trace_sum * trace_sum / d as f64 - self_sum) / (n * (n - 1.0));
    let scale = members.iter().map(|m| m.hs_norm()).fold(0.0, f64::max);
    let certificate = EqualityCertificate {
        equiangular_dev: equiangular_dev(&g),
        tightness_dev: tightness_dev(members, &vec![1.0; members.len()]),
        rank_one_dev: None,
    };
    let equality = certificate.equiangular_dev <= tol * (1.0 + scale * scale)
        && certificate.tightness_dev <= tol * (1.0 + n * scale);
    Ok(WelchReport {
        bound: "simplex",
        lhs,
        rhs,
        slack: lhs - rhs,
        equality,
        certificate,
        weight_coefficient: None,
        p: None,
        intermediate: None,
        rhs_flat: None,
        rhs_weighted: None,
        clamped: 0,
    })
}

/// Checks positivity and `Tr[E_i^2] = 1`, optionally rescaling.
fn normalized_members(
    members: &[HermitianMatrix],
    weights: &WeightVector,
    opts: &WelchOptions,
) -> Result<Vec<HermitianMatrix>> {
    common_dim(members)?;
    if weights.len() != members.len() {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} members",
            weights.len(),
            members.len()
        )));
    }
    let mut out = Vec::with_capacity(members.len());
    for (index, m) in members.iter().enumerate() {
        let spec = eig_sa(m)?;
        if spec.lambda_min() < -opts.tol * (1.0 + spec.spectral_norm()) {
            return Err(Error::NotPositive(spec.lambda_min()));
        }
        let sq = m.dot(m);
        if (sq - 1.0).abs() <= NORMALIZATION_TOL {
            out.push(m.clone());
        } else if opts.auto_normalize && sq > 0.0 {
            out.push(m.scale(1.0 / sq.sqrt()));
        } else {
            return Err(Error::NotNormalized { index, value: sq });
        }
    }
    Ok(out)
}

struct WeightedParts {
    d: usize,
    g: Vec<Vec<f64>>,
    /// `sum_{i!=j} v_i v_j G_ij`
    weighted_off: f64,
    /// `d^-1 (sum v)^2 - sum v^2`
    base: f64,
    /// `sum_{i!=j} v_i v_j`
    pair_mass: f64,
    certificate: EqualityCertificate,
}

fn weighted_parts(members: &[HermitianMatrix], weights: &WeightVector) -> WeightedParts {
    let d = members[0].dim();
    let v = weights.values();
    let g = gram_matrix(members);
    let weighted_off = off_diagonal(&g).map(|(i, j, x)| v[i] * v[j] * x).sum();
    let (s, q) = weights.sums();
    let certificate = EqualityCertificate {
        equiangular_dev: equiangular_dev(&g),
        tightness_dev: tightness_dev(members, v),
        rank_one_dev: Some(rank_one_dev(members)),
    };
    WeightedParts {
        d,
        g,
        weighted_off,
        base: s * s / d as f64 - q,
        pair_mass: s * s - q,
        certificate,
    }
}

fn rank_one_and_tight(c: &EqualityCertificate, weights: &WeightVector, tol: f64) -> bool {
    let (s, _) = weights.sums();
    c.rank_one_dev.unwrap_or(f64::INFINITY) <= tol && c.tightness_dev <= tol * (1.0 + s)
}

/// Weighted bound for positive members with `Tr[E_i^2] = 1`:
/// `sum_{i!=j} v_i v_j <E_i,E_j> >= d^-1 (sum v)^2 - sum v^2`.
pub fn weighted_welch(
    members: &[HermitianMatrix],
    weights: &WeightVector,
    opts: WelchOptions,
) -> Result<WelchReport> {
    let members = normalized_members(members, weights, &opts)?;
    let parts = weighted_parts(&members, weights);
    let equality = rank_one_and_tight(&parts.certificate, weights, opts.tol);
    Ok(WelchReport {
        bound: "weighted",
        lhs: parts.weighted_off,
        rhs: parts.base,
        slack: parts.weighted_off - parts.base,
        equality,
        certificate: parts.certificate,
        weight_coefficient: Some(weights.coefficient()),
        p: None,
        intermediate: None,
        rhs_flat: None,
        rhs_weighted: None,
        clamped: 0,
    })
}

fn require_coefficient(weights: &WeightVector, d: usize) -> Result<()> {
    let coefficient = weights.coefficient();
    // [v] = d exactly is allowed; absorb roundoff in the ratio
    if coefficient < d as f64 * (1.0 - 1e-12) {
        return Err(Error::WeightCoefficientTooSmall {
            coefficient,
            dim: d,
        });
    }
    Ok(())
}

/// Hölder generalization for `p > 1` and `[v] >= d`:
/// `sum_{i!=j} v_i v_j <E_i,E_j>^p >= base^p / (sum_{i!=j} v_i v_j)^(p-1)`.
pub fn holder_welch(
    members: &[HermitianMatrix],
    weights: &WeightVector,
    p: f64,
    opts: WelchOptions,
) -> Result<WelchReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Hölder exponent must exceed 1, got {p}"
        )));
    }
    let members = normalized_members(members, weights, &opts)?;
    require_coefficient(weights, members[0].dim())?;
    let parts = weighted_parts(&members, weights);
    let v = weights.values();
    let mut clamped = 0;
    let mut lhs = 0.0;
    for (i, j, x) in off_diagonal(&parts.g) {
        let x = if x < 0.0 {
            if x < -opts.tol {
                return Err(Error::NegativeInnerProduct { i, j, value: x });
            }
            clamped += 1;
            0.0
        } else {
            x
        };
        lhs += v[i] * v[j] * x.powf(p);
    }
    let rhs = parts.base.max(0.0).powf(p) / parts.pair_mass.powf(p - 1.0);
    let intermediate = parts.weighted_off.max(0.0).powf(p) / parts.pair_mass.powf(p - 1.0);
    let equality = rank_one_and_tight(&parts.certificate, weights, opts.tol)
        && parts.certificate.equiangular_dev <= opts.tol;
    Ok(WelchReport {
        bound: "holder",
        lhs,
        rhs,
        slack: lhs - rhs,
        equality,
        certificate: parts.certificate,
        weight_coefficient: Some(weights.coefficient()),
        p: Some(p),
        intermediate: Some(intermediate),
        rhs_flat: None,
        rhs_weighted: None,
        clamped,
    })
}

/// `max_{i!=j} <E_i,E_j> >= (N-d)/(d(N-1)) >= base / sum_{i!=j} v_i v_j`.
///
/// The report's `rhs` is the flat bound; the weighted one is returned
/// alongside and must not exceed it.
pub fn min_angle_bound(
    members: &[HermitianMatrix],
    weights: &WeightVector,
    opts: WelchOptions,
) -> Result<WelchReport> {
    let members = normalized_members(members, weights, &opts)?;
    let d = members[0].dim();
    require_coefficient(weights, d)?;
    let parts = weighted_parts(&members, weights);
    let n = members.len() as f64;
    let df = parts.d as f64;
    let lhs = off_diagonal(&parts.g)
        .map(|(_, _, x)| x)
        .fold(f64::NEG_INFINITY, f64::max);
    let rhs_flat = (n - df) / (df * (n - 1.0));
    let rhs_weighted = parts.base / parts.pair_mass;
    if rhs_weighted > rhs_flat + opts.tol {
        return Err(Error::Invariant(format!(
            "weighted bound {rhs_weighted} exceeds the flat bound {rhs_flat}"
        )));
    }
    let mut certificate = parts.certificate;
    certificate.tightness_dev = tightness_dev(&members, &vec![1.0; members.len()]);
    let equality = certificate.equiangular_dev <= opts.tol
        && certificate.rank_one_dev.unwrap_or(f64::INFINITY) <= opts.tol
        && certificate.tightness_dev <= opts.tol * (1.0 + n);
    Ok(WelchReport {
        bound: "min_angle",
        lhs,
        rhs: rhs_flat,
        slack: lhs - rhs_flat,
        equality,
        certificate,
        weight_coefficient: Some(weights.coefficient()),
        p: None,
        intermediate: None,
        rhs_flat: Some(rhs_flat),
        rhs_weighted: Some(rhs_weighted),
        clamped: 0,
    })
}
