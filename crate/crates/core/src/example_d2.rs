//! The two-dimensional example `T = diag(1, u)` split into four members,
//! with closed forms for the spectra of `R_i` and for the bounds on `a`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{basis_from_parts, psd_window, ConstructionBasis};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

/// `27/800 (125 sqrt(29) - 673)`, the largest possible `a_opt - a_lb`.
pub fn gap_bound() -> f64 {
    27.0 / 800.0 * (125.0 * 29f64.sqrt() - 673.0)
}

fn check_u(u: f64) -> Result<()> {
    if !(u >= 1.0) || !u.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "u must be at least 1, got {u}"
        )));
    }
    Ok(())
}

pub fn target(u: f64) -> HermitianMatrix {
    HermitianMatrix::diagonal(&[1.0, u])
}

/// `F_1 = sigma_x / sqrt 2`, `F_2 = [[0, i], [-i, 0]] / sqrt 2`,
/// `F_3 = diag(u, -1) / sqrt(u^2 + 1)`.
pub fn example_f(u: f64) -> Vec<HermitianMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let f1 = HermitianMatrix::from_real(2, &[0.0, s, s, 0.0]).expect("symmetric");
    let f2 = HermitianMatrix::from_rows(&[
        vec![z, Complex64::new(0.0, s)],
        vec![Complex64::new(0.0, -s), z],
    ])
    .expect("hermitian");
    let f3 = HermitianMatrix::diagonal(&[u, -1.0]).scale(1.0 / (u * u + 1.0).sqrt());
    vec![f1, f2, f3]
}

pub fn example_basis(u: f64) -> Result<ConstructionBasis> {
    check_u(u)?;
    basis_from_parts(target(u), example_f(u))
}

/// Closed-form eigenvalues `(largest, smallest)` of `R_1 = R_2`, `R_3`, `R_4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedSpectra {
    pub r12: (f64, f64),
    pub r3: (f64, f64),
    pub r4: (f64, f64),
}

impl ClosedSpectra {
    /// `(rho_1, rho_2, rho_3)`
    pub fn rho(&self) -> [f64; 3] {
        [self.r12.0, self.r3.0, self.r4.0]
    }

    /// `(mu_1, mu_2, mu_3)`
    pub fn mu(&self) -> [f64; 3] {
        [-self.r12.1, -self.r3.1, -self.r4.1]
    }

    /// Pairs in member order `R_1..R_4`.
    pub fn per_member(&self) -> [(f64, f64); 4] {
        [self.r12, self.r12, self.r3, self.r4]
    }
}

pub fn closed_form_spectra(u: f64) -> Result<ClosedSpectra> {
    check_u(u)?;
    let den = 6.0 * 3f64.sqrt() * (u * u + 1.0).sqrt();
    let w = u - 1.0;
    let pair = |c: f64, s: f64| ((c + s) / den, (c - s) / den);
    Ok(ClosedSpectra {
        r12: pair(w, (w * w + 4.0 * (13.0 * u * u + u + 13.0)).sqrt()),
        r3: pair(
            -5.0 * w,
            (25.0 * w * w + 4.0 * (u * u + 25.0 * u + 1.0)).sqrt(),
        ),
        r4: pair(3.0 * w, 3.0 * (w * w + 4.0 * (u * u + u + 1.0)).sqrt()),
    })
}

/// `x_lb = 1 / (4 mu_2)`.
pub fn x_lb(u: f64) -> Result<f64> {
    Ok(1.0 / (4.0 * closed_form_spectra(u)?.mu()[1]))
}

pub fn a_lb(u: f64) -> Result<f64> {
    check_u(u)?;
    let t2 = u * u + 1.0;
    let q = 5.0 * u + (u * (29.0 * u + 50.0) + 29.0).sqrt() - 5.0;
    Ok(t2 / 16.0 + 27.0 * t2 / (4.0 * q * q))
}

/// `x_ub = u sqrt(1 + u^2) / 4`.
pub fn x_ub(u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(u * (1.0 + u * u).sqrt() / 4.0)
}

pub fn a_ub(u: f64) -> Result<f64> {
    check_u(u)?;
    let t2 = 1.0 + u * u;
    Ok(t2 * t2 / 16.0)
}

/// The largest `a` admitting a positive symmetric decomposition, in closed form.
pub fn a_opt_closed(u: f64) -> Result<f64> {
    check_u(u)?;
    let t2 = u * u + 1.0;
    let r = t2.sqrt();
    let num = -5.0 * r * u * u + 5.0 * r + t2 * (u * (25.0 * u + 4.0) + 25.0).sqrt();
    let den = u * (u + 25.0) + 1.0;
    Ok((t2 + 27.0 * num * num / (4.0 * den * den)) / 16.0)
}

/// The same quantity found by bisection over the positivity window.
pub fn a_opt_search(u: f64) -> Result<f64> {
    Ok(psd_window(&example_basis(u)?)?.a_exact)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub u: f64,
    pub a_lb: f64,
    pub a_ub: f64,
    pub a_opt_closed: f64,
    pub a_opt_search: f64,
    pub x_suf: f64,
    pub x_exact: f64,
    /// `a_opt_search - a_lb`
    pub gap: f64,
}

pub fn sweep_row(u: f64) -> Result<SweepRow> {
    let window = psd_window(&example_basis(u)?)?;
    let a_lb = a_lb(u)?;
    Ok(SweepRow {
        u,
        a_lb,
        a_ub: a_ub(u)?,
        a_opt_closed: a_opt_closed(u)?,
        a_opt_search: window.a_exact,
        x_suf: window.x_sufficient,
        x_exact: window.x_exact,
        gap: window.a_exact - a_lb,
    })
}

/// `steps` evenly spaced rows from `u_min` to `u_max` inclusive.
pub fn sweep(u_min: f64, u_max: f64, steps: usize) -> Result<Vec<SweepRow>> {
    check_u(u_min)?;
    if !(u_max > u_min) || !u_max.is_finite() || steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "bad sweep range [{u_min}, {u_max}] with {steps} steps"
        )));
    }
    let h = (u_max - u_min) / (steps - 1) as f64;
    (0..steps)
        .into_par_iter()
        .map(|k| {
            let u = if k == steps - 1 {
                u_max
            } else {
                u_min + h * k as f64
            };
            sweep_row(u)
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
