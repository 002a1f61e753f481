//! Acceptance criteria. Each criterion prints one PASS/FAIL line to stderr
//! (written directly, so it shows without `--nocapture`); the test fails if any criterion fails.

use std::io::Write;
use std::time::Instant;

use qlancaster::exactpoly::{check_identity, Bounds, IdentityId, Status};
use qlancaster::kernels::{KernelId, KernelSpec};
use qlancaster::qcore::support;
use qlancaster::quadverify::*;
use qlancaster::sampling::{cross_moment_check, gen_chain, stationarity_check, ChainConfig};
use qlancaster::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Summary over a batch of reports: all pass, worst residual relative to its tolerance.
fn summarize(reports: &[CheckReport]) -> Outcome {
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.pass).collect();
    let worst = reports
        .iter()
        .max_by(|a, b| (a.max_abs_residual / a.tolerance).total_cmp(&(b.max_abs_residual / b.tolerance)))
        .map(|r| format!("worst {} residual {:.3e} (tol {:.0e})", r.check_id, r.max_abs_residual, r.tolerance))
        .unwrap_or_default();
    let mut detail = format!("{} checks, {worst}", reports.len());
    if let Some(f) = failed.first() {
        detail.push_str(&format!("; {} failed, first: {} {:?}", failed.len(), f.check_id, f.params));
    }
    Outcome { pass: failed.is_empty() && !reports.is_empty(), detail }
}

fn collect(items: Vec<Result<CheckReport>>) -> Outcome {
    let mut reports = Vec::new();
    for r in items {
        match r {
            Ok(r) => reports.push(r),
            Err(e) => return Outcome { pass: false, detail: format!("error: {e}") },
        }
    }
    summarize(&reports)
}

/// Runs `f` over `items` on scoped threads, preserving order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|it| s.spawn(|| f(it))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn lattice_triples() -> Vec<(f64, f64, f64)> {
    let mut v = Vec::new();
    for &q in &Q_LATTICE {
        for &r1 in &PARAM_LATTICE {
            for &r2 in &PARAM_LATTICE {
                v.push((r1, r2, q));
            }
        }
    }
    v
}

/// Lattice triples split into one chunk per `q`, for threading.
fn by_q<R: Send>(f: impl Fn(f64, f64, f64) -> Vec<Result<CheckReport>> + Sync) -> Vec<Result<CheckReport>> {
    par_map(&Q_LATTICE, |&q| {
        let mut out = Vec::new();
        for &(r1, r2, qq) in lattice_triples().iter().filter(|t| t.2 == q) {
            out.extend(f(r1, r2, qq));
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

fn c1_exact() -> Outcome {
    let start = Instant::now();
    let bounds = Bounds { n: 6, m: 6, ..Bounds::default() };
    let recs: Vec<_> = par_map(&IdentityId::ALL, |&id| check_identity(id, &bounds));
    let secs = start.elapsed().as_secs_f64();
    let mut bad = Vec::new();
    for (id, r) in IdentityId::ALL.iter().zip(&recs) {
        match r {
            Ok(r) if r.status == Status::Verified && r.residual.is_zero() => {}
            Ok(r) => bad.push(format!("{id} residual {}", r.residual)),
            Err(e) => bad.push(format!("{id}: {e}")),
        }
    }
    Outcome {
        pass: bad.is_empty() && secs < 60.0,
        detail: format!("{} identities at n,m ≤ 6 reduce to 0 in {secs:.1} s (limit 60 s){}", recs.len(), if bad.is_empty() { String::new() } else { format!("; failures: {bad:?}") }),
    }
}

fn c2_orthogonality() -> Outcome {
    let jobs: Vec<(f64, bool)> = Q_LATTICE.iter().enumerate().map(|(i, &q)| (q, i == 0)).collect();
    let out = par_map(&jobs, |&(q, fixed)| {
        lattice_pairs(q, fixed).iter().map(|p| orthogonality_suite(p, 8, q, 1e-8)).collect::<Vec<_>>()
    });
    collect(out.into_iter().flatten().collect())
}

fn c3_ler() -> Outcome {
    collect(by_q::<()>(|r1, r2, q| vec![le_grid_check(r1, r2, q, 21, LE_TERMS), positivity_scan(r1, r2, q, 21, LE_TERMS)]))
}

fn c4_degenerations() -> Outcome {
    let mut v = Vec::new();
    for &q in &Q_LATTICE {
        for &r in &PARAM_LATTICE {
            v.push(pm_degeneration_check(r, q, 9, LE_TERMS));
            v.push(odd_phi_check(r, q));
        }
    }
    for &r1 in &PARAM_LATTICE {
        for &r2 in &PARAM_LATTICE {
            v.push(classical_limit_check(r1, r2, 21, 2000));
        }
    }
    collect(v)
}

fn c5_chapman_marginal() -> Outcome {
    let cfg = QuadConfig::with_tol(1e-9);
    collect(by_q::<()>(|r1, r2, q| vec![chapman_grid_check(r1, r2, q, 5, &cfg), marginal_check(r1, r2, q, 7, &cfg)]))
}

fn c6_catalog() -> Outcome {
    let mut specs: Vec<(KernelSpec, f64)> = Vec::new();
    for &rho in &PARAM_LATTICE {
        specs.push((KernelSpec::new(KernelId::ChebUu { rho }, 0.0), 1e-8));
        specs.push((KernelSpec::new(KernelId::ChebTt { rho }, 0.0), 1e-8));
        specs.push((KernelSpec::new(KernelId::ChebUt { rho }, 0.0), 1e-7));
    }
    for &q in &Q_LATTICE {
        let l = support(q).unwrap().half_width().unwrap();
        for &rho in &PARAM_LATTICE {
            specs.push((KernelSpec::new(KernelId::PoissonMehler { rho }, q), 1e-8));
        }
        for &rho1 in &PARAM_LATTICE {
            for &rho2 in &PARAM_LATTICE {
                for y in [0.0, 0.5 * l] {
                    specs.push((KernelSpec::new(KernelId::AscNonsym { rho1, rho2, y }, q), 1e-7));
                }
            }
        }
        for &a in &PARAM_LATTICE {
            for &b in &PARAM_LATTICE {
                if a.abs() < b.abs() {
                    specs.push((KernelSpec::new(KernelId::BigqhNonsym { a, b }, q), 1e-7));
                }
            }
        }
    }
    let out = par_map(&specs, |(s, tol)| kernel_catalog_check(s, 9, *tol));
    collect(out)
}

fn c7_aux3() -> Outcome {
    let mut jobs = Vec::new();
    for &q in &Q_LATTICE {
        for &r in &PARAM_LATTICE {
            jobs.push((r, q));
        }
    }
    let out = par_map(&jobs, |&(r, q)| (0..=4).map(|m| aux3_check(r, m, q, 9, 200)).collect::<Vec<_>>());
    collect(out.into_iter().flatten().collect())
}

fn c8_phi_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut v = Vec::new();
    for _ in 0..50 {
        let r1 = rng.gen_range(-0.9..0.9);
        let r2 = rng.gen_range(-0.9..0.9);
        let q = rng.gen_range(-0.9..0.9);
        match phi_bound_checks(r1, r2, q) {
            Ok(rs) => v.extend(rs.into_iter().map(Ok)),
            Err(e) => v.push(Err(e)),
        }
    }
    collect(v)
}

fn c9_monte_carlo() -> Outcome {
    let start = Instant::now();
    let cfg = ChainConfig::new(0.5, 0.3, 0.5, 100_001, 2024);
    let run = || -> Result<(Vec<f64>, Vec<f64>, CheckReport, CheckReport)> {
        let a = gen_chain(&cfg)?;
        let b = gen_chain(&cfg)?;
        let phi = cross_moment_check(&a, 1, 1, &cfg)?;
        let ks = stationarity_check(&a, &cfg)?;
        Ok((a, b, phi, ks))
    };
    match run() {
        Err(e) => Outcome { pass: false, detail: format!("error: {e}") },
        Ok((a, b, phi, ks)) => {
            let identical = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
            let secs = start.elapsed().as_secs_f64();
            Outcome {
                pass: identical && phi.pass && ks.pass && secs < 120.0,
                detail: format!(
                    "|E[R1 R1] - φ_1| = {:.2e} (3σ = {:.2e}), KS {:.4} (thr {:.4}, thinning {}), bit-identical rerun: {identical}, {secs:.1} s",
                    phi.max_abs_residual, phi.tolerance, ks.max_abs_residual, ks.tolerance, ks.params["thinning"]
                ),
            }
        }
    }
}

fn c10_limits() -> Outcome {
    let qs = [0.9, 0.99, 0.999];
    let out = par_map(&[-0.5, 0.3, 0.7], |&rho| limit_trend_check(&qs, 8, rho, 13).map(|(r, _)| r));
    collect(out)
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact identity suite", c1_exact),
        ("orthogonality lattice", c2_orthogonality),
        ("main expansion grid and positivity", c3_ler),
        ("degenerations", c4_degenerations),
        ("Chapman-Kolmogorov and marginals", c5_chapman_marginal),
        ("kernel catalog", c6_catalog),
        ("aux3 forms", c7_aux3),
        ("phi bounds and square summability", c8_phi_bounds),
        ("Monte Carlo chain", c9_monte_carlo),
        ("limit trends", c10_limits),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let line = format!(
            "criterion {:>2} {:<38} {} ({:.1} s) {}\n",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
