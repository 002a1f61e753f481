//! Numerical verification suites. Each check returns a [`CheckReport`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::quad::{integrate_support, integrate_support_many, integrate_sym_many, QuadConfig};
use crate::connect::fn_over_fr_coeffs;
use crate::densities::{f_3d, f_bn, f_cn, f_cn_classical, f_n, f_r, f_t, f_u};
use crate::error::{check_open_unit, domain, Error, Result};
use crate::kernels::{aux3_forms, kernel_closed, main_joint_density, phi_sequence, KernelId, KernelSpec};
use crate::polyfam::{eval_sequence, orthonormal_sequence, PolyFamily};
use crate::qcore::{log_q_poch_inf, q_bracket, q_factorial, q_poch, support, Support, TruncationPolicy};

/// Default lattice of `q` values.
pub const Q_LATTICE: [f64; 5] = [-0.5, 0.0, 0.3, 0.7, 0.9];
/// Default lattice for `r`, `beta`, `rho`, `a`.
pub const PARAM_LATTICE: [f64; 5] = [-0.7, -0.3, 0.0, 0.3, 0.7];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub params: BTreeMap<String, f64>,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub grid: String,
    pub pass: bool,
    pub runtime_ms: f64,
}

impl CheckReport {
    fn new(id: &str, params: &[(&str, f64)], residual: f64, tolerance: f64, grid: String, start: Instant) -> Self {
        CheckReport {
            check_id: id.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            max_abs_residual: residual,
            tolerance,
            grid,
            // NaN residuals fail
            pass: residual <= tolerance,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }

    fn with_param(mut self, k: &str, v: f64) -> Self {
        self.params.insert(k.to_string(), v);
        self
    }
}

fn describe(params: &[(&str, f64)]) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

fn ctx<T>(r: Result<T>, params: &[(&str, f64)]) -> Result<T> {
    r.map_err(|e| e.context(&describe(params)))
}

/// `n` equally spaced points on `[-l, l]`, endpoints included.
pub fn inclusive_grid(l: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|k| -l + 2.0 * l * k as f64 / (n - 1) as f64).collect()
}

/// `n` Chebyshev nodes strictly inside `(-l, l)`.
pub fn interior_grid(l: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| l * (PI * (k as f64 + 0.5) / n as f64).cos()).rev().collect()
}

/// Half-width used for grids: the support bound, or a Gaussian range at `q = 1`.
fn grid_half_width(q: f64, sigma: f64) -> Result<f64> {
    Ok(match support(q)? {
        Support::Bounded { hi, .. } => hi,
        Support::RealLine => 5.0 * sigma,
    })
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

// ---------------------------------------------------------------- orthogonality

/// A polynomial family together with its orthogonality weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pair", rename_all = "snake_case")]
pub enum OrthoPair {
    /// Probabilists' Hermite with the standard Gaussian.
    HermiteClassical,
    QHermite,
    UltraR { beta: f64 },
    AsChihara { y: f64, rho: f64 },
    BigQHermite { a: f64 },
    ChebyshevT,
    ChebyshevU,
}

impl OrthoPair {
    fn family(&self) -> PolyFamily {
        match *self {
            OrthoPair::HermiteClassical => PolyFamily::Hermite,
            OrthoPair::QHermite => PolyFamily::QHermite,
            OrthoPair::UltraR { beta } => PolyFamily::UltraR { beta },
            OrthoPair::AsChihara { y, rho } => PolyFamily::AsChihara { y, rho },
            OrthoPair::BigQHermite { a } => PolyFamily::BigQHermite { a },
            OrthoPair::ChebyshevT => PolyFamily::ChebyshevT,
            OrthoPair::ChebyshevU => PolyFamily::ChebyshevU,
        }
    }

    fn is_fixed(&self) -> bool {
        matches!(self, OrthoPair::HermiteClassical | OrthoPair::ChebyshevT | OrthoPair::ChebyshevU)
    }

    /// `q` used for evaluation: families that do not depend on `q` ignore it.
    fn effective_q(&self, q: f64) -> f64 {
        match self {
            OrthoPair::HermiteClassical => 1.0,
            OrthoPair::ChebyshevT | OrthoPair::ChebyshevU => 0.0,
            _ => q,
        }
    }

    fn weight(&self, x: f64, q: f64, t: &TruncationPolicy) -> Result<f64> {
        match *self {
            OrthoPair::HermiteClassical | OrthoPair::QHermite => f_n(x, q, t),
            OrthoPair::UltraR { beta } => f_r(x, beta, q, t),
            OrthoPair::AsChihara { y, rho } => f_cn(x, y, rho, q, t),
            OrthoPair::BigQHermite { a } => f_bn(x, a, q, t),
            OrthoPair::ChebyshevT => Ok(f_t(x)),
            OrthoPair::ChebyshevU => Ok(f_u(x)),
        }
    }

    /// Closed-form squared norm `∫ p_n^2 w`.
    pub fn norm(&self, n: usize, q: f64) -> f64 {
        match *self {
            OrthoPair::HermiteClassical => (1..=n).map(|k| k as f64).product(),
            OrthoPair::QHermite | OrthoPair::BigQHermite { .. } => q_factorial(n, q),
            OrthoPair::UltraR { beta } => {
                q_factorial(n, q) * (1.0 - beta) * q_poch(beta * beta, q, n) / (1.0 - beta * q.powi(n as i32))
            }
            OrthoPair::AsChihara { rho, .. } => q_factorial(n, q) * q_poch(rho * rho, q, n),
            OrthoPair::ChebyshevT => {
                if n == 0 {
                    1.0
                } else {
                    0.5
                }
            }
            OrthoPair::ChebyshevU => 1.0,
        }
    }

    fn label(&self) -> (&'static str, Vec<(&'static str, f64)>) {
        match *self {
            OrthoPair::HermiteClassical => ("hermite_classical", vec![]),
            OrthoPair::QHermite => ("qhermite", vec![]),
            OrthoPair::UltraR { beta } => ("ultra_r", vec![("beta", beta)]),
            OrthoPair::AsChihara { y, rho } => ("as_chihara", vec![("y", y), ("rho", rho)]),
            OrthoPair::BigQHermite { a } => ("big_qhermite", vec![("a", a)]),
            OrthoPair::ChebyshevT => ("chebyshev_t", vec![]),
            OrthoPair::ChebyshevU => ("chebyshev_u", vec![]),
        }
    }
}

/// Gram matrix `G[n][m] = ∫ p_n p_m w` for `n, m ≤ n_max`.
pub fn gram_matrix(pair: &OrthoPair, n_max: usize, q: f64, cfg: &QuadConfig) -> Result<Vec<Vec<f64>>> {
    if n_max > 10 {
        return Err(Error::Index(format!("orthogonality checks support n_max ≤ 10, got {n_max}")));
    }
    let q = pair.effective_q(q);
    let fam = pair.family();
    fam.validate(q)?;
    let t = TruncationPolicy::default();
    let scale: Vec<f64> = (0..=n_max).map(|n| pair.norm(n, q).sqrt()).collect();
    let idx: Vec<(usize, usize)> = (0..=n_max).flat_map(|n| (n..=n_max).map(move |m| (n, m))).collect();
    // integrate the normalised products so the tolerance is relative to the norms
    let integrand = |x: f64, out: &mut [f64]| -> Result<()> {
        let w = pair.weight(x, q, &t)?;
        if w == 0.0 {
            return Ok(());
        }
        let p = eval_sequence(&fam, n_max, x, q)?;
        let p: Vec<f64> = p.iter().zip(&scale).map(|(v, s)| v / s).collect();
        for (k, &(n, m)) in idx.iter().enumerate() {
            out[k] = p[n] * p[m] * w;
        }
        Ok(())
    };
    let r = match pair {
        OrthoPair::ChebyshevT | OrthoPair::ChebyshevU => integrate_sym_many(integrand, idx.len(), 1.0, cfg)?,
        _ => integrate_support_many(integrand, idx.len(), q, cfg)?,
    };
    let mut g = vec![vec![0.0; n_max + 1]; n_max + 1];
    for (k, &(n, m)) in idx.iter().enumerate() {
        let v = r.values[k] * scale[n] * scale[m];
        g[n][m] = v;
        g[m][n] = v;
    }
    Ok(g)
}

/// `max |G_nm / sqrt(N_n N_m) - δ_nm|` against the closed-form norms.
pub fn orthogonality_suite(pair: &OrthoPair, n_max: usize, q: f64, tol: f64) -> Result<CheckReport> {
    let start = Instant::now();
    let (name, mut params) = pair.label();
    if !pair.is_fixed() {
        params.push(("q", q));
    }
    params.push(("n_max", n_max as f64));
    let cfg = QuadConfig { abs_tol: (tol * 1e-2).max(1e-12), max_panels: 4000, initial_panels: 8 };
    let g = ctx(gram_matrix(pair, n_max, q, &cfg), &params)?;
    let qe = pair.effective_q(q);
    let mut res: f64 = 0.0;
    for n in 0..=n_max {
        for m in 0..=n_max {
            let d = if n == m { 1.0 } else { 0.0 };
            let v = g[n][m] / (pair.norm(n, qe) * pair.norm(m, qe)).sqrt();
            res = max_abs([res, v - d]);
        }
    }
    Ok(CheckReport::new(&format!("orthogonality_{name}"), &params, res, tol, format!("n,m ≤ {n_max}"), start))
}

/// Every family/weight pair over the parameter lattice at one `q`.
/// `q`-free pairs are only included when `with_fixed` is set.
pub fn lattice_pairs(q: f64, with_fixed: bool) -> Vec<OrthoPair> {
    let mut out = Vec::new();
    if with_fixed {
        out.extend([OrthoPair::HermiteClassical, OrthoPair::ChebyshevT, OrthoPair::ChebyshevU]);
    }
    out.push(OrthoPair::QHermite);
    let l = support(q).ok().and_then(|s| s.half_width()).unwrap_or(2.0);
    for &p in PARAM_LATTICE.iter() {
        out.push(OrthoPair::UltraR { beta: p });
        out.push(OrthoPair::BigQHermite { a: p });
        for y in [0.0, 0.5 * l] {
            out.push(OrthoPair::AsChihara { y, rho: p });
        }
    }
    out
}

// ---------------------------------------------------------------- Chapman–Kolmogorov

/// `∫ f_CN(z|y,ρ1) f_CN(y|x,ρ2) dy` against `f_CN(z|x,ρ1ρ2)`; the residual of the
/// swapped output `f_CN(x|z,ρ1ρ2)` is reported as `swapped_residual`.
pub fn chapman_kolmogorov_check(x: f64, z: f64, rho1: f64, rho2: f64, q: f64, cfg: &QuadConfig) -> Result<CheckReport> {
    chapman_points(&[(x, z)], rho1, rho2, q, cfg, "point".into())
}

/// Chapman–Kolmogorov on an interior `points × points` grid of `(x, z)`.
pub fn chapman_grid_check(rho1: f64, rho2: f64, q: f64, points: usize, cfg: &QuadConfig) -> Result<CheckReport> {
    let l = grid_half_width(q, 1.0)?;
    let g = interior_grid(l, points);
    let pts: Vec<(f64, f64)> = g.iter().flat_map(|&x| g.iter().map(move |&z| (x, z))).collect();
    chapman_points(&pts, rho1, rho2, q, cfg, format!("{points}x{points} interior nodes"))
}

fn chapman_points(pts: &[(f64, f64)], rho1: f64, rho2: f64, q: f64, cfg: &QuadConfig, grid: String) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("rho1", rho1), ("rho2", rho2), ("q", q)];
    check_open_unit("rho1", rho1)?;
    check_open_unit("rho2", rho2)?;
    let t = TruncationPolicy::default();
    let (mut res, mut swapped): (f64, f64) = (0.0, 0.0);
    for &(x, z) in pts {
        let p = [("x", x), ("z", z), ("rho1", rho1), ("rho2", rho2), ("q", q)];
        let i = ctx(integrate_support(|y| Ok(f_cn(z, y, rho1, q, &t)? * f_cn(y, x, rho2, q, &t)?), q, cfg), &p)?;
        res = max_abs([res, i.value - f_cn(z, x, rho1 * rho2, q, &t)?]);
        swapped = max_abs([swapped, i.value - f_cn(x, z, rho1 * rho2, q, &t)?]);
    }
    Ok(CheckReport::new("chapman_kolmogorov", &params, res, 1e-6, grid, start).with_param("swapped_residual", swapped))
}

// ---------------------------------------------------------------- main kernel

/// Default number of series terms for the main kernel on the lattice.
pub const LE_TERMS: usize = 300;

fn sigma_r(beta: f64) -> f64 {
    ((1.0 + beta.abs()) / (1.0 - beta.abs())).sqrt()
}

/// `|sum × f_R(x) f_R(y) − (1−r1r2) f_CN(y|x,r1) f_CN(x|y,r2)|` on an inclusive `grid × grid` over `S(q)^2`.
pub fn le_grid_check(r1: f64, r2: f64, q: f64, grid: usize, n_terms: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("r1", r1), ("r2", r2), ("q", q), ("n_terms", n_terms as f64)];
    let t = TruncationPolicy::default();
    let k = ctx(KernelSpec::new(KernelId::Main { r1, r2 }, q).with_terms(n_terms).prepare(), &params)?;
    let b = r1 * r2;
    let g = inclusive_grid(grid_half_width(q, sigma_r(b))?, grid);
    let fr: Vec<f64> = ctx(g.iter().map(|&x| f_r(x, b, q, &t)).collect(), &params)?;
    let mut res: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for (i, &x) in g.iter().enumerate() {
        for (j, &y) in g.iter().enumerate() {
            let s = ctx(k.sum(x, y), &params)?;
            let joint = ctx(main_joint_density(x, y, r1, r2, q, &t), &params)?;
            res = max_abs([res, s.value * fr[i] * fr[j] - joint]);
            tail = tail.max(s.tail_bound * fr[i] * fr[j]);
        }
    }
    Ok(CheckReport::new("le_grid", &params, res, 1e-6, format!("{grid}x{grid} inclusive"), start).with_param("max_tail", tail))
}

/// Minimum of the truncated main-kernel series on an inclusive grid; passes if ≥ −1e−7.
pub fn positivity_scan(r1: f64, r2: f64, q: f64, grid: usize, n_terms: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("r1", r1), ("r2", r2), ("q", q), ("n_terms", n_terms as f64)];
    let k = ctx(KernelSpec::new(KernelId::Main { r1, r2 }, q).with_terms(n_terms).prepare(), &params)?;
    let g = inclusive_grid(grid_half_width(q, sigma_r(r1 * r2))?, grid);
    let mut min = f64::INFINITY;
    for &x in &g {
        for &y in &g {
            min = min.min(ctx(k.sum(x, y), &params)?.value);
        }
    }
    let res = (-min).max(0.0);
    Ok(CheckReport::new("positivity", &params, res, 1e-7, format!("{grid}x{grid} inclusive"), start).with_param("min_sum", min))
}

/// Both one-dimensional marginals of the main joint density against `f_R(·|r1 r2)`.
pub fn marginal_check(r1: f64, r2: f64, q: f64, points: usize, cfg: &QuadConfig) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("r1", r1), ("r2", r2), ("q", q)];
    let t = TruncationPolicy::default();
    let b = r1 * r2;
    let mut res: f64 = 0.0;
    for x in interior_grid(grid_half_width(q, sigma_r(b))?, points) {
        let p = [("x", x), ("r1", r1), ("r2", r2), ("q", q)];
        let fx = ctx(f_r(x, b, q, &t), &p)?;
        let my = ctx(integrate_support(|y| main_joint_density(x, y, r1, r2, q, &t), q, cfg), &p)?;
        let mx = ctx(integrate_support(|y| main_joint_density(y, x, r1, r2, q, &t), q, cfg), &p)?;
        res = max_abs([res, my.value - fx, mx.value - fx]);
    }
    Ok(CheckReport::new("marginal", &params, res, 1e-6, format!("{points} interior nodes"), start))
}

fn log_sqrt_factorials(n_max: usize, q: f64) -> Vec<f64> {
    let mut v = vec![0.0; n_max + 1];
    for k in 1..=n_max {
        v[k] = v[k - 1] + 0.5 * q_bracket(k, q).ln();
    }
    v
}

/// The four expressions for `f_R(x|β,q)`:
/// `(1−β) f_CN(x|x,β)`, the product form, `(1−β) f_N Σ β^n H_n²/[n]!` and
/// `(1−β) f_N Σ β^n H_{2n}/([n]! (β)_{n+1})`, each against `f_R`.
pub fn density_forms(x: f64, beta: f64, q: f64, n_terms: usize, t: &TruncationPolicy) -> Result<[f64; 4]> {
    check_open_unit("beta", beta)?;
    if !(q.abs() < 1.0) {
        return Err(Error::Regime(format!("the product form needs |q| < 1, got {q}")));
    }
    let fnx = f_n(x, q, t)?;
    let cond = (1.0 - beta) * f_cn(x, x, beta, q, t)?;
    let mut log_prod = log_q_poch_inf(beta * beta, q, t)?.value
        - log_q_poch_inf(beta, q, t)?.value
        - log_q_poch_inf(beta * q, q, t)?.value;
    let s = 1.0 - q;
    let mut qj = 1.0f64;
    let mut j = 0;
    while qj.abs() > 1e-18 {
        let bq = beta * qj;
        log_prod -= ((1.0 + bq) * (1.0 + bq) - s * bq * x * x).ln();
        qj *= q;
        j += 1;
        if j > t.max_terms {
            return Err(Error::Truncation(format!("product did not converge in {} factors", t.max_terms)));
        }
    }
    let product = fnx * log_prod.exp();
    let top = 2 * n_terms;
    let h = orthonormal_sequence(&PolyFamily::QHermite, top, x, q)?;
    let ls = log_sqrt_factorials(top, q);
    let (mut sq, mut even) = (0.0, 0.0);
    let mut poch = 1.0 - beta;
    for n in 0..n_terms {
        let bn = beta.powi(n as i32);
        sq += bn * h[n] * h[n];
        even += bn * h[2 * n] * (ls[2 * n] - 2.0 * ls[n]).exp() / poch;
        poch *= 1.0 - beta * q.powi(n as i32 + 1);
    }
    Ok([cond, product, (1.0 - beta) * fnx * sq, (1.0 - beta) * fnx * even])
}

pub fn density_forms_check(beta: f64, q: f64, points: usize, n_terms: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("beta", beta), ("q", q)];
    let t = TruncationPolicy::default();
    let mut res: f64 = 0.0;
    for x in interior_grid(grid_half_width(q, 1.0)?, points) {
        let p = [("x", x), ("beta", beta), ("q", q)];
        let fr = ctx(f_r(x, beta, q, &t), &p)?;
        let forms = ctx(density_forms(x, beta, q, n_terms, &t), &p)?;
        res = max_abs(std::iter::once(res).chain(forms.iter().map(|f| f - fr)));
    }
    Ok(CheckReport::new("density_forms", &params, res, 1e-7, format!("{points} interior nodes"), start))
}

/// Largest pairwise spread of the four `aux3` expressions over interior nodes.
pub fn aux3_check(r: f64, m: usize, q: f64, points: usize, n_terms: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("r", r), ("m", m as f64), ("q", q)];
    let t = TruncationPolicy::default();
    let mut res: f64 = 0.0;
    for x in interior_grid(grid_half_width(q, sigma_r(r))?, points) {
        let p = [("x", x), ("r", r), ("m", m as f64), ("q", q)];
        let f = ctx(aux3_forms(x, r, m, q, n_terms, &t), &p)?;
        res = max_abs([res, f[1] - f[0], f[2] - f[0], f[3] - f[0]]);
    }
    Ok(CheckReport::new("aux3", &params, res, 1e-7, format!("{points} interior nodes"), start))
}

/// `∫ f_3D dx = (1−r) f_CN(y|z,ρ23) f_CN(z|y,ρ12ρ13)` on a grid of `(y, z)`, and the
/// remaining integral over `z` against `f_R(y|r)` with `r = ρ12 ρ23 ρ13`.
pub fn f3d_check(rho12: f64, rho23: f64, rho13: f64, q: f64, points: usize, cfg: &QuadConfig) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("rho12", rho12), ("rho23", rho23), ("rho13", rho13), ("q", q)];
    for (n, v) in params.iter().take(3) {
        check_open_unit(n, *v)?;
    }
    let t = TruncationPolicy::default();
    let r = rho12 * rho23 * rho13;
    let two = |y: f64, z: f64| -> Result<f64> {
        Ok((1.0 - r) * f_cn(y, z, rho23, q, &t)? * f_cn(z, y, rho12 * rho13, q, &t)?)
    };
    let g = interior_grid(grid_half_width(q, 1.0)?, points);
    let mut res: f64 = 0.0;
    for &y in &g {
        for &z in &g {
            let p = [("y", y), ("z", z), ("q", q)];
            let i = ctx(integrate_support(|x| f_3d(x, y, z, rho12, rho23, rho13, q, &t), q, cfg), &p)?;
            res = max_abs([res, i.value - two(y, z)?]);
        }
        let one = ctx(integrate_support(|z| two(y, z), q, cfg), &[("y", y), ("q", q)])?;
        res = max_abs([res, one.value - f_r(y, r, q, &t)?]);
    }
    Ok(CheckReport::new("f3d_marginals", &params, res, 1e-6, format!("{points}x{points} interior nodes"), start))
}

// ---------------------------------------------------------------- coefficient sequences

/// `ln |d_n|` for the normalised coefficients of `f_N / f_R(·|γ)` in `R_{2n}`,
/// `d_n = a_n ||R_{2n}||`; `-inf` where the coefficient vanishes.
pub fn log_dei_coefficients(n_max: usize, gamma: f64, q: f64) -> Result<Vec<f64>> {
    check_open_unit("gamma", gamma)?;
    if !(q.abs() < 1.0) {
        return domain(format!("q = {q} must lie in (-1, 1)"));
    }
    let lq = |k: usize| (1.0 - gamma * q.powi(k as i32)).abs().ln();
    let lg2 = |k: usize| (1.0 - gamma * gamma * q.powi(k as i32)).ln();
    let top = 2 * n_max;
    let mut lfac = vec![0.0; top + 1];
    let mut lpg2 = vec![0.0; top + 1];
    for k in 1..=top {
        lfac[k] = lfac[k - 1] + q_bracket(k, q).ln();
        lpg2[k] = lpg2[k - 1] + lg2(k - 1);
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut lpg = 0.0;
    for n in 0..=n_max {
        let tri = n * n.saturating_sub(1) / 2;
        if (q == 0.0 && tri > 0) || (gamma == 0.0 && n > 0) {
            out.push(f64::NEG_INFINITY);
        } else {
            let qt = if tri == 0 { 0.0 } else { tri as f64 * q.abs().ln() };
            let lg = if n == 0 { 0.0 } else { n as f64 * gamma.abs().ln() };
            let la = lg + qt + lpg + lq(2 * n)
                - lfac[n]
                - (1.0 - gamma).ln()
                - lpg2[2 * n];
            // ||R_{2n}||^2 = [2n]! (1-γ) (γ^2)_{2n} / (1 - γ q^{2n})
            let lnorm = 0.5 * (lfac[2 * n] + (1.0 - gamma).ln() + lpg2[2 * n] - lq(2 * n));
            out.push(la + lnorm);
        }
        lpg += lq(n);
    }
    Ok(out)
}

/// Square-summability of the normalised `f_N/f_R` coefficients: the increment
/// `Σ_{200<n≤400} d_n²` must be below 1e−12. The observed geometric rate
/// `sup_{20≤n≤200} |d_n|^{1/n}` is reported as `decay_rate`.
pub fn dei_check(gamma: f64, q: f64) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("gamma", gamma), ("q", q)];
    let ld = ctx(log_dei_coefficients(400, gamma, q), &params)?;
    let tail: f64 = ld[201..].iter().map(|l| (2.0 * l).exp()).sum();
    let total: f64 = ld.iter().map(|l| (2.0 * l).exp()).sum();
    let rate = ld[20..=200].iter().enumerate().fold(0.0f64, |m, (i, l)| m.max((l / (i + 20) as f64).exp()));
    Ok(CheckReport::new("dei", &params, tail, 1e-12, "n ≤ 400".into(), start)
        .with_param("sum_squares", total)
        .with_param("decay_rate", rate))
}

/// Check that `fn_over_fr_coeffs` and the log form agree, used in tests.
pub fn dei_coefficients_plain(n_terms: usize, gamma: f64, q: f64) -> Result<Vec<f64>> {
    let a = fn_over_fr_coeffs(n_terms, gamma, q)?;
    Ok(a.iter()
        .enumerate()
        .map(|(n, a)| {
            let k = 2 * n;
            let norm = q_factorial(k, q) * (1.0 - gamma) * q_poch(gamma * gamma, q, k) / (1.0 - gamma * q.powi(k as i32));
            a * norm.sqrt()
        })
        .collect())
}

/// `max_n |φ_n| − 1` over `n ≤ 400` (tolerance 1e−14) and the Cauchy increment
/// `Σ_{200<n≤400} φ_n²` (tolerance 1e−12).
pub fn phi_bound_checks(r1: f64, r2: f64, q: f64) -> Result<[CheckReport; 2]> {
    let start = Instant::now();
    let params = [("r1", r1), ("r2", r2), ("q", q)];
    let phi = ctx(phi_sequence(400, r1, r2, q), &params)?;
    let over = (max_abs(phi.iter().copied()) - 1.0).max(0.0);
    let tail: f64 = phi[201..].iter().map(|p| p * p).sum();
    let a = CheckReport::new("phi_bound", &params, over, 1e-14, "n ≤ 400".into(), start);
    let b = CheckReport::new("phi_cauchy", &params, tail, 1e-12, "200 < n ≤ 400".into(), start);
    Ok([a, b])
}

// ---------------------------------------------------------------- kernels and degenerations

fn catalog_points(spec: &KernelSpec, points: usize) -> Result<Vec<(f64, f64)>> {
    let l = match spec.id {
        KernelId::ChebUu { .. } | KernelId::ChebTt { .. } | KernelId::ChebUt { .. } => 2.0,
        _ => grid_half_width(spec.q, 1.0)?,
    };
    let g = interior_grid(l, points);
    Ok(match spec.id {
        KernelId::Aux3 { .. } => g.iter().map(|&x| (x, 0.0)).collect(),
        _ => g.iter().flat_map(|&x| g.iter().map(move |&y| (x, y))).collect(),
    })
}

/// Densities multiplying a catalog kernel to give the joint density of its identity.
/// Chebyshev kernels are bounded and compared as they are; `aux3` already carries its weight.
fn catalog_weight(spec: &KernelSpec, x: f64, y: f64) -> Result<f64> {
    let (q, t) = (spec.q, &spec.trunc);
    Ok(match spec.id {
        KernelId::Main { r1, r2 } => f_r(x, r1 * r2, q, t)? * f_r(y, r1 * r2, q, t)?,
        KernelId::PoissonMehler { .. } => f_n(x, q, t)? * f_n(y, q, t)?,
        KernelId::AscNonsym { rho1, rho2, y: cond } => f_cn(x, cond, rho1, q, t)? * f_cn(y, cond, rho1 * rho2, q, t)?,
        KernelId::BigqhNonsym { a, b } => f_bn(x, a, q, t)? * f_bn(y, b, q, t)?,
        KernelId::ChebUu { .. } | KernelId::ChebTt { .. } | KernelId::ChebUt { .. } | KernelId::Aux3 { .. } => 1.0,
    })
}

/// Truncated series against the closed form of a catalog kernel on interior nodes,
/// both multiplied by the reference densities of the kernel.
pub fn kernel_catalog_check(spec: &KernelSpec, points: usize, tol: f64) -> Result<CheckReport> {
    let start = Instant::now();
    let (name, params) = kernel_params(spec);
    let k = ctx(spec.prepare(), &params)?;
    let mut res: f64 = 0.0;
    for (x, y) in catalog_points(spec, points)? {
        let mut p = params.clone();
        p.extend([("x", x), ("y", y)]);
        let s = ctx(k.sum(x, y), &p)?.value;
        let c = ctx(kernel_closed(spec, x, y), &p)?;
        let w = ctx(catalog_weight(spec, x, y), &p)?;
        res = max_abs([res, w * (s - c)]);
    }
    let grid = format!("{points} interior nodes per axis, density scale");
    Ok(CheckReport::new(&format!("kernel_{name}"), &params, res, tol, grid, start))
}

fn kernel_params(spec: &KernelSpec) -> (&'static str, Vec<(&'static str, f64)>) {
    let mut p = vec![("q", spec.q), ("n_terms", spec.n_terms as f64)];
    let name = match spec.id {
        KernelId::Main { r1, r2 } => {
            p.extend([("r1", r1), ("r2", r2)]);
            "main"
        }
        KernelId::PoissonMehler { rho } => {
            p.push(("rho", rho));
            "poisson_mehler"
        }
        KernelId::ChebUu { rho } => {
            p.push(("rho", rho));
            "cheb_uu"
        }
        KernelId::ChebTt { rho } => {
            p.push(("rho", rho));
            "cheb_tt"
        }
        KernelId::ChebUt { rho } => {
            p.push(("rho", rho));
            "cheb_ut"
        }
        KernelId::AscNonsym { rho1, rho2, y } => {
            p.extend([("rho1", rho1), ("rho2", rho2), ("y", y)]);
            "asc_nonsym"
        }
        KernelId::BigqhNonsym { a, b } => {
            p.extend([("a", a), ("b", b)]);
            "bigqh_nonsym"
        }
        KernelId::Aux3 { r, m } => {
            p.extend([("r", r), ("m", m as f64)]);
            "aux3"
        }
    };
    (name, p)
}

/// With `r2 = 0` the main kernel is the Poisson–Mehler kernel with `ρ = r1`.
pub fn pm_degeneration_check(r1: f64, q: f64, points: usize, n_terms: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("r1", r1), ("q", q)];
    let main = ctx(KernelSpec::new(KernelId::Main { r1, r2: 0.0 }, q).with_terms(n_terms).prepare(), &params)?;
    let pm = KernelSpec::new(KernelId::PoissonMehler { rho: r1 }, q);
    let mut res: f64 = 0.0;
    for x in interior_grid(grid_half_width(q, 1.0)?, points) {
        for y in interior_grid(grid_half_width(q, 1.0)?, points) {
            let s = ctx(main.sum(x, y), &params)?.value;
            let w = ctx(catalog_weight(&pm, x, y), &params)?;
            res = max_abs([res, w * (s - ctx(kernel_closed(&pm, x, y), &params)?)]);
        }
    }
    let grid = format!("{points}x{points} interior nodes, density scale");
    Ok(CheckReport::new("pm_degeneration", &params, res, 1e-8, grid, start))
}

/// `max_{n odd ≤ 200} |φ_n(r, −r, q)|`.
pub fn odd_phi_check(r: f64, q: f64) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("r", r), ("q", q)];
    let phi = ctx(phi_sequence(200, r, -r, q), &params)?;
    let res = max_abs(phi.iter().skip(1).step_by(2).copied());
    Ok(CheckReport::new("odd_phi", &params, res, 1e-14, "odd n ≤ 200".into(), start))
}

/// At `q = 1`: `Σ ρ^n He_n(x/σ) He_n(y/σ)/n!` times the `N(0, σ²)` marginals,
/// `σ² = (1+β)/(1−β)`, `ρ = (r1+r2)/(1+r1r2)`, against `(1−r1r2) N(y; r1x, 1−r1²) N(x; r2y, 1−r2²)`.
pub fn classical_limit_check(r1: f64, r2: f64, points: usize, n_terms: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let params = [("r1", r1), ("r2", r2)];
    check_open_unit("r1", r1)?;
    check_open_unit("r2", r2)?;
    let b = r1 * r2;
    let sigma = ((1.0 + b) / (1.0 - b)).sqrt();
    let rho = (r1 + r2) / (1.0 + b);
    let g = inclusive_grid(4.0 * sigma, points);
    let he: Vec<Vec<f64>> = g
        .iter()
        .map(|&x| orthonormal_sequence(&PolyFamily::Hermite, n_terms, x / sigma, 1.0))
        .collect::<Result<_>>()?;
    let marg: Vec<f64> = g.iter().map(|&x| f_cn_classical(x / sigma, 0.0, 0.0) / sigma).collect();
    let mut res: f64 = 0.0;
    for (i, &x) in g.iter().enumerate() {
        for (j, &y) in g.iter().enumerate() {
            let mut s = 0.0;
            let mut rn = 1.0;
            for n in 0..=n_terms {
                s += rn * he[i][n] * he[j][n];
                rn *= rho;
            }
            let closed = (1.0 - b) * f_cn_classical(y, x, r1) * f_cn_classical(x, y, r2);
            res = max_abs([res, s * marg[i] * marg[j] - closed]);
        }
    }
    Ok(CheckReport::new("classical_limit", &params, res, 1e-8, format!("{points}x{points} on ±4σ"), start))
}

/// Sup-norm distances on `[-3, 3]` of `H_n(·|q)` to `He_n` (each `n ≤ n_max`) and of
/// `f_CN(·|·,ρ,q)` to its Gaussian limit, for each `q` in `qs`. The residual is the
/// largest increase between consecutive `q`, so the check passes when every
/// distance is non-increasing.
pub fn limit_trend_check(qs: &[f64], n_max: usize, rho: f64, points: usize) -> Result<(CheckReport, Vec<Vec<f64>>)> {
    let start = Instant::now();
    check_open_unit("rho", rho)?;
    let t = TruncationPolicy { term_tol: 1e-15, max_terms: 200_000 };
    let g = inclusive_grid(3.0, points);
    // dist[i] = [d_H0, ..., d_H{n_max}, d_CN] at qs[i]
    let mut dist = Vec::with_capacity(qs.len());
    for &q in qs {
        let mut d = vec![0.0f64; n_max + 2];
        for &x in &g {
            let h = eval_sequence(&PolyFamily::QHermite, n_max, x, q)?;
            let c = eval_sequence(&PolyFamily::Hermite, n_max, x, 1.0)?;
            for n in 0..=n_max {
                d[n] = d[n].max((h[n] - c[n]).abs());
            }
            for &y in &g {
                let v = f_cn(x, y, rho, q, &t).map_err(|e| e.context(&format!("q={q}")))?;
                d[n_max + 1] = d[n_max + 1].max((v - f_cn_classical(x, y, rho)).abs());
            }
        }
        dist.push(d);
    }
    let mut res: f64 = 0.0;
    for w in dist.windows(2) {
        for k in 0..w[0].len() {
            res = res.max(w[1][k] - w[0][k]);
        }
    }
    let params = [("rho", rho), ("n_max", n_max as f64)];
    let report = CheckReport::new("limit_trend", &params, res, 0.0, format!("{points}x{points} on [-3,3]"), start);
    Ok((report, dist))
}
