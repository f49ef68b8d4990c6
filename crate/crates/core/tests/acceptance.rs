//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use symdec::bounds::{a_bounds, phi_closed_form, phi_oracle};
use symdec::construct::{build_basis, build_family, psd_window, recover_x, v_matrix, BasisSeed};
use symdec::dual::{dual_family, dual_parameters, hat_a, normalized_dual};
use symdec::example_d2::{closed_form_spectra, example_basis, gap_bound, sweep};
use symdec::family::{
    check_local_decomposition, check_projection_characterization, check_rank_one_t, fit_parameters,
    verify_decomposition,
};
use symdec::hermitian::{eig_sa, HermitianMatrix};
use symdec::io::FamilyJson;
use symdec::welch::{
    holder_welch, min_angle_bound, simplex_bound, weighted_welch, WeightVector, WelchOptions,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// SIC reproduction through the command-line tool.
fn sic_reproduction() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_symdec"))
        .args([
            "construct",
            "--T",
            "identity:2",
            "--N",
            "4",
            "--x-mode",
            "exact",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "exit {:?}", out.status.code());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let x = doc["window"]["x_exact"].as_f64().unwrap_or(f64::NAN);
    let fam: FamilyJson = serde_json::from_value(doc).map_err(|e| e.to_string())?;
    let fit = fit_parameters(fam.members.clone()).map_err(|e| e.to_string())?;
    ensure!(close(x, 2f64.sqrt() / 4.0, 1e-9), "x_exact = {x}");
    ensure!(close(fit.a(), 0.25, 1e-9), "a = {}", fit.a());
    for (i, e) in fam.members.iter().enumerate() {
        let s = eig_sa(e).map_err(|e| e.to_string())?;
        ensure!(
            s.lambda_min() >= -1e-9,
            "member {i} not PSD: {}",
            s.lambda_min()
        );
        ensure!(
            s.eigenvalues[1].abs() <= 1e-9,
            "member {i} second eigenvalue {}",
            s.eigenvalues[1]
        );
        ensure!(
            close(e.trace(), 0.5, 1e-9),
            "member {i} trace {}",
            e.trace()
        );
    }
    Ok(format!("x_exact = {x:.16}, a = {:.16}", fit.a()))
}

fn bound_chain() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=6usize {
        let r = a_bounds(&HermitianMatrix::identity(d), d * d, None, 1e-8)
            .map_err(|e| e.to_string())?;
        let df = d as f64;
        let upper = r.a_upper_psd.ok_or("a_upper_psd missing")?;
        ensure!(
            close(r.a_lower, df.powi(-3), 1e-12),
            "d={d}: a_lower = {}",
            r.a_lower
        );
        ensure!(
            close(upper, df.powi(-2), 1e-12),
            "d={d}: a_upper_psd = {upper}"
        );
        worst = worst
            .max((r.a_lower - df.powi(-3)).abs())
            .max((upper - df.powi(-2)).abs());
    }
    Ok(format!("d = 2..6, max deviation {worst:.1e}"))
}

fn example_sweep() -> Outcome {
    let rows = sweep(1.0, 3.0, 201).map_err(|e| e.to_string())?;
    ensure!(rows.len() == 201, "{} rows", rows.len());
    let mut max_gap = f64::NEG_INFINITY;
    let mut max_search_dev: f64 = 0.0;
    for r in &rows {
        let u = r.u;
        let t2 = u * u + 1.0;
        let q = 5.0 * u + (u * (29.0 * u + 50.0) + 29.0).sqrt() - 5.0;
        let lb = t2 / 16.0 + 27.0 * t2 / (4.0 * q * q);
        let ub = (1.0 + u * u).powi(2) / 16.0;
        ensure!(close(r.a_lb, lb, 1e-12), "u={u}: a_lb {} vs {lb}", r.a_lb);
        ensure!(close(r.a_ub, ub, 1e-12), "u={u}: a_ub {} vs {ub}", r.a_ub);
        let psd = a_bounds(&HermitianMatrix::diagonal(&[1.0, u]), 4, None, 1e-8)
            .map_err(|e| e.to_string())?
            .a_upper_psd
            .ok_or("a_upper_psd missing")?;
        ensure!(
            close(r.a_ub, psd, 1e-12 * ub),
            "u={u}: a_ub {} vs bound {psd}",
            r.a_ub
        );
        max_search_dev = max_search_dev.max((r.a_opt_search - r.a_opt_closed).abs());
        ensure!(
            close(r.a_opt_search, r.a_opt_closed, 1e-7),
            "u={u}: search {} vs closed {}",
            r.a_opt_search,
            r.a_opt_closed
        );
        ensure!(
            r.a_lb <= r.a_opt_search + 1e-8 && r.a_opt_search <= r.a_ub + 1e-8,
            "u={u}: ordering"
        );
        if u == 1.0 {
            ensure!(close(r.a_lb, r.a_ub, 1e-12), "bounds differ at u = 1");
        } else if u >= 1.01 {
            ensure!(r.a_ub - r.a_lb > 1e-6, "u={u}: bounds coincide");
        }
        ensure!(r.gap >= -1e-8, "u={u}: negative gap {}", r.gap);
        max_gap = max_gap.max(r.gap);
    }
    ensure!(max_gap <= 0.00491403 + 1e-6, "max gap {max_gap}");
    ensure!(
        close(gap_bound(), 0.00491403, 1e-8),
        "gap constant {}",
        gap_bound()
    );
    Ok(format!(
        "max gap {max_gap:.8}, max |search - closed| {max_search_dev:.1e}"
    ))
}

fn eigenvalue_formulas() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let u = 1.0 + 9.0 * k as f64 / 99.0;
        let basis = example_basis(u).map_err(|e| e.to_string())?;
        let closed = closed_form_spectra(u).map_err(|e| e.to_string())?;
        for (i, (hi, lo)) in closed.per_member().iter().enumerate() {
            let s = eig_sa(&basis.r[i]).map_err(|e| e.to_string())?;
            let dev = (s.eigenvalues[0] - hi)
                .abs()
                .max((s.eigenvalues[1] - lo).abs());
            ensure!(dev <= 1e-9, "u={u}, R_{}: deviation {dev}", i + 1);
            worst = worst.max(dev);
        }
    }
    Ok(format!("100 grid points, max deviation {worst:.1e}"))
}

fn phi_oracle_suite() -> Outcome {
    let mut r = rng(20);
    let mut worst: f64 = 0.0;
    for k in 0..50u64 {
        let d = r.random_range(2..=6usize);
        let b: Vec<f64> = (0..d).map(|_| r.random_range(0.01..10.0)).collect();
        let closed = phi_closed_form(&b).map_err(|e| e.to_string())?;
        let o = phi_oracle(&b, 1000, k).map_err(|e| e.to_string())?;
        ensure!(
            close(o.value, closed, 1e-7),
            "spectrum {b:?}: oracle {} vs {closed}",
            o.value
        );
        ensure!(o.trials == 1000, "{} trials", o.trials);
        ensure!(
            o.mc_violations == 0 && o.mc_min_lambda_max >= closed - 1e-9,
            "spectrum {b:?}: sample beat closed form"
        );
        worst = worst.max((o.value - closed).abs());
    }
    Ok(format!(
        "50 spectra x 1000 samples, max |oracle - closed| {worst:.1e}"
    ))
}

fn duality_suite() -> Outcome {
    let tol = 1e-8;
    let t = HermitianMatrix::identity(2);
    let sic = build_family(
        &build_basis(&t, 4, BasisSeed::Canonical).map_err(|e| e.to_string())?,
        2f64.sqrt() / 4.0,
    )
    .map_err(|e| e.to_string())?;
    let (at, bt) = dual_parameters(sic.a(), sic.b(), 4);
    ensure!(
        close(at, 5.0, 1e-9) && close(bt, -1.0, 1e-9),
        "SIC dual parameters ({at}, {bt})"
    );
    let nd = normalized_dual(&sic, &t, tol).map_err(|e| e.to_string())?;
    ensure!(
        close(nd.a(), 1.25, 1e-9) && close(hat_a(0.25, 2.0, 4), 1.25, 1e-12),
        "SIC a_hat {}",
        nd.a()
    );

    let mut r = rng(6);
    let mut cases = vec![(sic, t)];
    for k in 0..30 {
        let d = r.random_range(2..=4usize);
        let n = r.random_range(2..=d * d);
        let t = random_positive_target(d, &mut r);
        let basis = build_basis(&t, n, BasisSeed::Random(k)).map_err(|e| e.to_string())?;
        let x = r.random_range(0.05..1.5) * basis.t2().sqrt() / n as f64;
        cases.push((build_family(&basis, x).map_err(|e| e.to_string())?, t));
    }
    for (fam, t) in &cases {
        let dual = dual_family(fam, tol).map_err(|e| e.to_string())?;
        for (i, e) in fam.members().iter().enumerate() {
            for (j, de) in dual.members().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                ensure!(
                    close(e.dot(de), want, 1e-9),
                    "biorthogonality ({i},{j}): {}",
                    e.dot(de)
                );
            }
        }
        let nd = normalized_dual(fam, t, tol).map_err(|e| e.to_string())?;
        let rep = verify_decomposition(&nd, t, tol).map_err(|e| e.to_string())?;
        ensure!(
            rep.is_decomposition && nd.is_symmetric(1e-9 * (1.0 + nd.a())),
            "normalized dual does not decompose T"
        );
        let back = normalized_dual(&nd, t, tol).map_err(|e| e.to_string())?;
        let again = dual_family(&dual, tol).map_err(|e| e.to_string())?;
        for ((e, b1), b2) in fam
            .members()
            .iter()
            .zip(back.members())
            .zip(again.members())
        {
            ensure!(
                (e - b1).hs_norm() <= 1e-8,
                "normalized double dual off by {}",
                (e - b1).hs_norm()
            );
            ensure!(
                (e - b2).hs_norm() <= 1e-8,
                "double dual off by {}",
                (e - b2).hs_norm()
            );
        }
    }
    Ok(format!(
        "SIC (5, -1, 5/4) and {} random families",
        cases.len() - 1
    ))
}

fn valid_weights<R: Rng>(n: usize, d: usize, r: &mut R) -> WeightVector {
    let mut spread = 2.0;
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| 1.0 + spread * r.random_range(-0.45..1.0))
            .collect();
        let w = WeightVector::new(v).expect("positive weights");
        if w.coefficient() >= d as f64 {
            return w;
        }
        spread *= 0.5;
    }
}

fn welch_suite() -> Outcome {
    let opts = WelchOptions::default();
    let mut r = rng(7);
    let mut min_slack = f64::INFINITY;
    let mut holder_cases = 0;
    for _ in 0..500 {
        let d = r.random_range(1..=4usize);
        let n = r.random_range(2..=10usize);
        let members: Vec<_> = (0..n).map(|_| random_unit_positive(d, &mut r)).collect();
        let s = simplex_bound(&members, 1e-8).map_err(|e| e.to_string())?;
        ensure!(s.slack >= -1e-9, "simplex slack {}", s.slack);
        let any = WeightVector::new((0..n).map(|_| r.random_range(0.05..3.0)).collect())
            .map_err(|e| e.to_string())?;
        let w = weighted_welch(&members, &any, opts).map_err(|e| e.to_string())?;
        ensure!(w.slack >= -1e-9, "weighted slack {}", w.slack);
        min_slack = min_slack.min(s.slack).min(w.slack);
        if n >= d {
            let v = valid_weights(n, d, &mut r);
            let p = r.random_range(1.05..4.0);
            let h = holder_welch(&members, &v, p, opts).map_err(|e| e.to_string())?;
            ensure!(h.slack >= -1e-9, "Hölder slack {} at p = {p}", h.slack);
            let m = min_angle_bound(&members, &v, opts).map_err(|e| e.to_string())?;
            ensure!(m.slack >= -1e-9, "min-angle slack {}", m.slack);
            min_slack = min_slack.min(h.slack).min(m.slack);
            holder_cases += 1;
        }
    }
    let sic = projectors(&qubit_sic_vectors());
    let unit = WeightVector::uniform(4);
    let s = simplex_bound(&sic, 1e-8).map_err(|e| e.to_string())?;
    let w = weighted_welch(&sic, &unit, opts).map_err(|e| e.to_string())?;
    let h = holder_welch(&sic, &unit, 2.0, opts).map_err(|e| e.to_string())?;
    ensure!(
        s.equality && w.equality && h.equality,
        "SIC equality: simplex {}, weighted {}, Hölder {}",
        s.equality,
        w.equality,
        h.equality
    );
    let (n, d) = (4.0, 2.0);
    let value = n * (n - d) * (n - d) / ((n - 1.0) * d * d);
    ensure!(close(value, 4.0 / 3.0, 1e-15), "bound value {value}");
    ensure!(
        close(h.lhs, value, 1e-9) && close(h.rhs, value, 1e-9),
        "Hölder lhs {} rhs {}",
        h.lhs,
        h.rhs
    );
    Ok(format!(
        "500 families ({holder_cases} with [v] >= d), min slack {min_slack:.2e}; SIC value {:.12}",
        h.rhs
    ))
}

fn construction_invariants() -> Outcome {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for k in 0..200u64 {
        let d = r.random_range(2..=4usize);
        let n = r.random_range(2..=d * d);
        let t = HermitianMatrix::random(d, &mut r);
        let seed = if k % 4 == 0 {
            BasisSeed::Canonical
        } else {
            BasisSeed::Random(k)
        };
        let basis = build_basis(&t, n, seed).map_err(|e| e.to_string())?;
        let nf = n as f64;
        let tn = t.hs_norm();
        let mut devs = vec![HermitianMatrix::sum(d, &basis.r).hs_norm()];
        for (i, ri) in basis.r.iter().enumerate() {
            devs.push((ri.hs_norm() - 1.0).abs());
            devs.push(ri.dot(&t).abs() / tn);
            for rj in &basis.r[i + 1..] {
                devs.push((ri.dot(rj) + 1.0 / (nf - 1.0)).abs());
            }
        }
        let v = v_matrix(n).map_err(|e| e.to_string())?;
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let dot: f64 = (0..n).map(|k| v[k][i] * v[k][j]).sum();
                devs.push((dot - if i == j { nf / (nf - 1.0) } else { 0.0 }).abs());
            }
        }
        for (i, ri) in basis.r.iter().enumerate() {
            let mut via_v = HermitianMatrix::zeros(d);
            for (j, fj) in basis.f.iter().enumerate() {
                via_v.add_scaled(v[i][j], fj);
            }
            devs.push((&via_v - ri).hs_norm());
        }
        let x = r.random_range(0.0..2.0);
        let fam = build_family(&basis, x).map_err(|e| e.to_string())?;
        for xr in recover_x(fam.members(), &t) {
            devs.push((xr - x).abs());
        }
        let m = devs.iter().cloned().fold(0.0, f64::max);
        ensure!(m <= 1e-9, "instance {k} (d={d}, N={n}): deviation {m}");
        worst = worst.max(m);
    }
    Ok(format!("200 instances, max deviation {worst:.1e}"))
}

fn characterization_checks() -> Outcome {
    let tol = 1e-8;
    let mut r = rng(9);
    for _ in 0..40 {
        let d = r.random_range(2..=4usize);
        let rank = r.random_range(1..=d);
        let u = random_unitary(d, &mut r);
        // a projection split into rank-one pieces with random weights
        let mut members = Vec::new();
        for col in &u[..rank] {
            let p = HermitianMatrix::outer(col);
            let w = r.random_range(0.1..0.9);
            members.push(p.scale(w));
            members.push(p.scale(1.0 - w));
        }
        let proj = HermitianMatrix::sum(d, members.iter().collect::<Vec<_>>());
        let rep =
            check_projection_characterization(&members, &proj, tol).map_err(|e| e.to_string())?;
        ensure!(
            rep.is_projection && rep.absorbs && rep.equivalence_holds,
            "projection case: {rep:?}"
        );
        // same split of an operator with an eigenvalue away from 0 and 1
        let lambda = r.random_range(1.2..3.0);
        let scaled: Vec<_> = members.iter().map(|m| m.scale(lambda)).collect();
        let t = proj.scale(lambda);
        let rep = check_projection_characterization(&scaled, &t, tol).map_err(|e| e.to_string())?;
        ensure!(
            !rep.is_projection && !rep.absorbs && rep.equivalence_holds,
            "non-projection case: {rep:?}"
        );
    }
    for _ in 0..40 {
        let d = r.random_range(1..=4usize);
        let n = r.random_range(1..=6usize);
        let v = random_vector(d, &mut r);
        let t = HermitianMatrix::outer(&v).scale(r.random_range(0.5..2.0));
        let raw: Vec<f64> = (0..n).map(|_| r.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let members: Vec<_> = raw.iter().map(|w| t.scale(w / total)).collect();
        let rep = check_rank_one_t(&members, &t, tol).map_err(|e| e.to_string())?;
        ensure!(rep.holds, "rank-one case not degenerate: {rep:?}");
        let sum: f64 = rep.weights.iter().sum();
        ensure!(close(sum, 1.0, 1e-10), "weights sum to {sum}");
        let fam = fit_parameters(members).map_err(|e| e.to_string())?;
        ensure!(
            verify_decomposition(&fam, &t, tol)
                .map_err(|e| e.to_string())?
                .degenerate,
            "degeneracy flag not set"
        );
    }
    let mut worst: f64 = 0.0;
    for k in 0..40u64 {
        let d = r.random_range(2..=4usize);
        let n = r.random_range(2..=d * d);
        let t = random_positive_target(d, &mut r);
        let basis = build_basis(&t, n, BasisSeed::Random(k)).map_err(|e| e.to_string())?;
        let x = psd_window(&basis).map_err(|e| e.to_string())?.x_exact * r.random_range(0.0..1.0);
        let fam = build_family(&basis, x).map_err(|e| e.to_string())?;
        let samples: Vec<_> = (0..5).map(|_| random_vector(d, &mut r)).collect();
        let rep = check_local_decomposition(fam.members(), &t, &samples, tol)
            .map_err(|e| e.to_string())?;
        let dev = (rep.beta - 1.0).norm();
        ensure!(dev <= 1e-8, "beta = {}", rep.beta);
        worst = worst.max(dev);
    }
    Ok(format!(
        "projection, rank-one and locality checks; max |beta - 1| {worst:.1e}"
    ))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("SIC reproduction", Duration::from_secs(1), sic_reproduction),
        ("bound chain for T = I", Duration::from_secs(1), bound_chain),
        (
            "d = 2 example sweep",
            Duration::from_secs(30),
            example_sweep,
        ),
        (
            "eigenvalue formulas",
            Duration::from_secs(5),
            eigenvalue_formulas,
        ),
        (
            "phi closed form vs oracle",
            Duration::from_secs(60),
            phi_oracle_suite,
        ),
        ("duality", Duration::from_secs(5), duality_suite),
        ("Welch-type bounds", Duration::from_secs(60), welch_suite),
        (
            "construction invariants",
            Duration::from_secs(30),
            construction_invariants,
        ),
        (
            "decomposition characterizations",
            Duration::from_secs(5),
            characterization_checks,
        ),
    ];
    let mut failed = 0;
    for (k, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(detail) if elapsed <= *limit => (true, detail),
            Ok(detail) => (false, format!("{detail}; too slow")),
            Err(reason) => (false, reason),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name} ({:.3} s, limit {} s): {detail}",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
