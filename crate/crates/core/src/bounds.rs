//! Bounds on the symmetry parameter `a` of a symmetric decomposition.
//!
//! The central quantity is `phi(B)`, the smallest possible `lambda_max(A)`
//! over unit-norm self-adjoint `A` orthogonal to a positive definite `B`:
//!
//! ```text
//! phi(b) = [(beta / b_min - 1)^2 + d - 1]^(-1/2),   beta = sum_i b_i
//! ```
//!
//! Since every `R_i` is unit-norm and orthogonal to `T`, `-lambda_min(R_i)`
//! is at least `phi(T)`, which caps `x` (and hence `a`) for positive
//! decompositions. [`phi_oracle`] rebuilds the optimum independently from an
//! explicit feasible witness and Monte Carlo sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{scaled_tol, SymmetricFamily};
use crate::hermitian::{eig_sa, HermitianMatrix};

/// Members with `lambda_min <= STRICT_POSITIVITY_TOL * lambda_max` do not
/// count as strictly positive for the condition-number bound.
pub const STRICT_POSITIVITY_TOL: f64 = 1e-10;
pub const DEFAULT_TRIALS: usize = 1000;
/// The oracle's path bisection stops once `|Tr[W B]|` is below this.
pub const PATH_TRACE_TOL: f64 = 1e-12;
/// A Monte Carlo sample beating the closed form by more than this is a
/// violation.
pub const MC_SLACK: f64 = 1e-9;

/// All applicable bounds on `a` for a target `T` and family size `N`.
/// Fields that do not apply are `None`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub d: usize,
    pub t1: f64,
    pub t2: f64,
    pub tau: f64,
    pub norm_inf: f64,
    /// `t2 / N^2`
    pub a_lower: f64,
    /// `t2 / N`
    pub a_upper_positive: f64,
    /// `t2^2 / N^2`, only for projections.
    pub a_upper_projection: Option<f64>,
    /// `M t2 / N^2`, only with a strictly positive family.
    pub a_upper_condition: Option<f64>,
    pub condition_m: Option<f64>,
    /// `t2 / N^2 + x_upper_psd^2`, only for positive definite `T`.
    pub a_upper_psd: Option<f64>,
    /// `||T||_inf / (N phi(T))`
    pub x_upper_psd: Option<f64>,
    pub phi: Option<f64>,
    pub family_a: Option<f64>,
    /// Whether the supplied family's `a` lies inside every applicable bound.
    pub family_within_bounds: Option<bool>,
}

/// `phi(b) = [(beta / b_min - 1)^2 + d - 1]^(-1/2)`.
pub fn phi_closed_form(b: &[f64]) -> Result<f64> {
    validate_spectrum(b)?;
    let d = b.len() as f64;
    let beta: f64 = b.iter().sum();
    let b_min = b.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = beta / b_min - 1.0;
    Ok((1.0 / (ratio * ratio + d - 1.0)).sqrt())
}

fn validate_spectrum(b: &[f64]) -> Result<()> {
    if b.len() < 2 {
        return Err(Error::InvalidParameter(
            "phi needs a spectrum of length at least 2".into(),
        ));
    }
    if let Some(bad) = b.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "spectrum entries must be positive, got {bad}"
        )));
    }
    Ok(())
}

/// `||T||_inf / (N phi(T))` from the spectrum of `T`.
pub fn x_upper_psd(spectrum: &[f64], n: usize) -> Result<f64> {
    let phi = phi_closed_form(spectrum)?;
    let top = spectrum.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(top / (n as f64 * phi))
}

fn condition_number(m: &HermitianMatrix) -> Result<Option<f64>> {
    let s = eig_sa(m)?;
    let (lo, hi) = (s.lambda_min(), s.lambda_max());
    if hi <= 0.0 || lo <= STRICT_POSITIVITY_TOL * hi {
        return Ok(None);
    }
    Ok(Some(hi / lo))
}

/// Evaluates every applicable bound on `a` for `(T, N)`.
pub fn a_bounds(
    t: &HermitianMatrix,
    n: usize,
    family: Option<&SymmetricFamily>,
    tol: f64,
) -> Result<BoundsReport> {
    if n == 0 {
        return Err(Error::InvalidCount {
            n,
            reason: "N must be positive".into(),
        });
    }
    let d = t.dim();
    let spec = eig_sa(t)?;
    let tau = spec.lambda_min();
    let norm_inf = spec.lambda_max();
    let tol_used = scaled_tol(tol, t);
    if tau < -tol * (1.0 + spec.spectral_norm()) {
        return Err(Error::NotPositive(tau));
    }
    let nf = n as f64;
    let t1 = t.trace();
    let t2 = t.dot(t);
    let a_lower = t2 / (nf * nf);
    let a_upper_positive = t2 / nf;

    let is_projection = (&t.square() - t).hs_norm() <= tol_used;
    let a_upper_projection = is_projection.then(|| t2 * t2 / (nf * nf));

    let (phi, x_upper, a_upper_psd) = if tau > 0.0 && d >= 2 {
        let phi = phi_closed_form(&spec.eigenvalues)?;
        let x = norm_inf / (nf * phi);
        (Some(phi), Some(x), Some(a_lower + x * x))
    } else {
        (None, None, None)
    };

    let mut condition_m = None;
    if let Some(fam) = family {
        if fam.dim() != d {
            return Err(Error::DimensionMismatch(d, fam.dim()));
        }
        if let Some(kt) = condition_number(t)? {
            let mut best = f64::INFINITY;
            let mut all_strict = true;
            for e in fam.members() {
                match condition_number(e)? {
                    Some(ke) => {
                        let k = (kt * ke).sqrt();
                        best = best.min(0.25 * (k + 1.0 / k).powi(2));
                    }
                    None => all_strict = false,
                }
            }
            if all_strict {
                condition_m = Some(best);
            }
        }
    }
    let a_upper_condition = condition_m.map(|m| m * a_lower);

    let family_a = family.map(|f| f.a());
    let family_within_bounds = family_a.map(|a| {
        let slack = 10.0 * tol_used;
        let mut ok = a >= a_lower - slack && a <= a_upper_positive + slack;
        for cap in [a_upper_projection, a_upper_condition, a_upper_psd]
            .into_iter()
            .flatten()
        {
            ok &= a <= cap + slack;
        }
        ok
    });

    Ok(BoundsReport {
        n,
        d,
        t1,
        t2,
        tau,
        norm_inf,
        a_lower,
        a_upper_positive,
        a_upper_projection,
        a_upper_condition,
        condition_m,
        a_upper_psd,
        x_upper_psd: x_upper,
        phi,
        family_a,
        family_within_bounds,
    })
}

/// Independent reconstruction of `phi(b)`.
#[derive(Debug, Clone, Serialize)]
pub struct PhiOracle {
    /// `lambda_max` of the witness, computed by the eigensolver.
    pub value: f64,
    /// Unit-norm, self-adjoint and orthogonal to `diag(b)` (sorted
    /// descending).
    pub witness: HermitianMatrix,
    /// Two-valued spectrum `(s, ..., s, -r)` of the witness.
    pub s: f64,
    pub r: f64,
    /// Position on the rotation path where the witness was found.
    pub path_parameter: f64,
    /// `Tr[W diag(b)]` at the witness.
    pub witness_trace: f64,
    pub trials: usize,
    /// Smallest `lambda_max` among random feasible samples.
    pub mc_min_lambda_max: f64,
    /// Samples whose `lambda_max` beat the closed form by more than
    /// [`MC_SLACK`].
    pub mc_violations: usize,
}

/// Rebuilds the optimum of `min lambda_max(A)` subject to `A = A*`,
/// `||A||_HS = 1`, `A perp diag(b)`:
///
/// 1. finds the smallest `s` for which the two-valued vector
///    `(s, ..., s, -r)`, `r = sqrt(1 - (d-1) s^2)`, satisfies
///    `<a, b_desc> >= 0`, by bisection on `s`;
/// 2. rotates `diag(a)` along a path of Givens rotations that moves its
///    diagonal from the `b_desc` alignment to the `b_asc` alignment, and
///    bisects the path for `Tr[W B] = 0`;
/// 3. samples `trials` random feasible matrices and checks none of them has
///    a smaller `lambda_max` than the closed form.
pub fn phi_oracle(b: &[f64], trials: usize, seed: u64) -> Result<PhiOracle> {
    validate_spectrum(b)?;
    let d = b.len();
    let mut desc = b.to_vec();
    desc.sort_by(|x, y| y.total_cmp(x));
    let big_b = HermitianMatrix::diagonal(&desc);

    let s = smallest_feasible_s(&desc);
    let r = (1.0 - (d - 1) as f64 * s * s).max(0.0).sqrt();
    let mut a = vec![s; d];
    a[d - 1] = -r;

    let closed = phi_closed_form(b)?;
    let beta: f64 = desc.iter().sum();
    let b_min = desc[d - 1];
    let boundary = b_min / ((beta - b_min).powi(2) + (d - 1) as f64 * b_min * b_min).sqrt();
    if (boundary - s).abs() > 1e-10 {
        return Err(Error::Invariant(format!(
            "two-valued optimum s = {s} disagrees with the boundary value {boundary}"
        )));
    }

    let trace_at = |t: f64| -> (f64, HermitianMatrix) {
        let w = rotated_diagonal(&a, t);
        (w.dot(&big_b), w)
    };
    let (f0, w0) = trace_at(0.0);
    let (f1, _) = trace_at(1.0);
    let (path_parameter, witness) = if f0.abs() <= PATH_TRACE_TOL {
        (0.0, w0)
    } else if f1.abs() <= PATH_TRACE_TOL {
        (1.0, trace_at(1.0).1)
    } else {
        if f0 < 0.0 || f1 > 0.0 {
            return Err(Error::Bisection(format!(
                "no sign change along the rotation path ({f0:.3e}, {f1:.3e})"
            )));
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut best = (0.5, trace_at(0.5));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let (f, w) = trace_at(mid);
            best = (mid, (f, w));
            if f.abs() <= PATH_TRACE_TOL {
                break;
            }
            if f > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if best.1 .0.abs() > PATH_TRACE_TOL {
            return Err(Error::Bisection(format!(
                "rotation path bisection stalled at |Tr[W B]| = {:.3e}",
                best.1 .0.abs()
            )));
        }
        (best.0, best.1 .1)
    };
    let witness_trace = witness.dot(&big_b);
    let value = eig_sa(&witness)?.lambda_max();

    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            random_feasible_lambda_max(&big_b, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mc_min_lambda_max = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let mc_violations = samples.iter().filter(|&&l| l < closed - MC_SLACK).count();

    Ok(PhiOracle {
        value,
        witness,
        s,
        r,
        path_parameter,
        witness_trace,
        trials,
        mc_min_lambda_max,
        mc_violations,
    })
}

/// `<(s,..,s,-r(s)), b_desc>` increases with `s`; bisect for its zero on
/// `[0, 1/sqrt(d-1)]`.
fn smallest_feasible_s(desc: &[f64]) -> f64 {
    let d = desc.len();
    let head: f64 = desc[..d - 1].iter().sum();
    let tail = desc[d - 1];
    let s_max = 1.0 / ((d - 1) as f64).sqrt();
    let constraint = |s: f64| head * s - tail * (1.0 - (d - 1) as f64 * s * s).max(0.0).sqrt();
    let (mut lo, mut hi) = (0.0, s_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if constraint(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    hi
}

/// `U(t) diag(a) U(t)*` where `U(t)` rotates each plane `(j, d-1-j)` by
/// `t pi/2`; at `t = 1` the diagonal is reversed.
fn rotated_diagonal(a: &[f64], t: f64) -> HermitianMatrix {
    let d = a.len();
    let angle = t * std::f64::consts::FRAC_PI_2;
    let (sin, cos) = angle.sin_cos();
    let mut m = vec![0.0; d * d];
    for (j, &aj) in a.iter().enumerate() {
        m[j * d + j] = aj;
    }
    for j in 0..d / 2 {
        let k = d - 1 - j;
        let (aj, ak) = (a[j], a[k]);
        m[j * d + j] = cos * cos * aj + sin * sin * ak;
        m[k * d + k] = sin * sin * aj + cos * cos * ak;
        let off = cos * sin * (aj - ak);
        m[j * d + k] = off;
        m[k * d + j] = off;
    }
    HermitianMatrix::from_real(d, &m).expect("rotation of a real diagonal is symmetric")
}

fn random_feasible_lambda_max(big_b: &HermitianMatrix, rng: &mut ChaCha8Rng) -> Result<f64> {
    let bb = big_b.dot(big_b);
    let mut g = HermitianMatrix::random(big_b.dim(), rng);
    let c = g.dot(big_b) / bb;
    g.add_scaled(-c, big_b);
    let norm = g.hs_norm();
    Ok(eig_sa(&g.scale(1.0 / norm))?.lambda_max())
}
