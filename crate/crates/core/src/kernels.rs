//! Lancaster kernels: coefficient functions, truncated series and closed forms.

use serde::{Deserialize, Serialize};

use crate::densities::{f_cn, f_n, f_r};
use crate::error::{check_open_unit, domain, Error, Result};
use crate::polyfam::{eval_sequence, orthonormal_r_sequence, orthonormal_sequence, PolyFamily};
use crate::qcore::{geometric_product, q_binomial, q_bracket, q_factorial, q_poch, qpow, support, Truncated, TruncationPolicy};

/// `w_n(m, r1, r2, q)`.
pub fn w_poly(n: usize, m: usize, r1: f64, r2: f64, q: f64) -> f64 {
    let qm = qpow(q, m as i64);
    (0..=n)
        .map(|s| {
            q_binomial(n, s, q)
                * r1.powi(s as i32)
                * q_poch(qm * r2 * r2, q, s)
                * r2.powi((n - s) as i32)
                * q_poch(qm * r1 * r1, q, n - s)
        })
        .sum()
}

fn check_pair(r1: f64, r2: f64) -> Result<()> {
    check_open_unit("r1", r1)?;
    check_open_unit("r2", r2)
}

/// `phi_n(r1, r2, q) = w_n(0, r1, r2, q) / (r1^2 r2^2)_n`.
pub fn phi_n(n: usize, r1: f64, r2: f64, q: f64) -> Result<f64> {
    let b = r1 * r2;
    if !(b.abs() < 1.0) {
        return domain(format!("|r1 r2| = {} must be < 1", b.abs()));
    }
    Ok(w_poly(n, 0, r1, r2, q) / q_poch(b * b, q, n))
}

/// `phi_0, ..., phi_{n_max}` in `O(n_max^2)` using a q-Pascal triangle.
pub fn phi_sequence(n_max: usize, r1: f64, r2: f64, q: f64) -> Result<Vec<f64>> {
    let b = r1 * r2;
    if !(b.abs() < 1.0) {
        return domain(format!("|r1 r2| = {} must be < 1", b.abs()));
    }
    let poch_table = |a: f64| {
        let mut v = vec![1.0; n_max + 1];
        for k in 1..=n_max {
            v[k] = v[k - 1] * (1.0 - a * qpow(q, k as i64 - 1));
        }
        v
    };
    let (p1, p2, pb) = (poch_table(r1 * r1), poch_table(r2 * r2), poch_table(b * b));
    let pw = |r: f64| (0..=n_max).map(|k| r.powi(k as i32)).collect::<Vec<_>>();
    let (w1, w2) = (pw(r1), pw(r2));
    let qp: Vec<f64> = (0..=n_max).map(|k| qpow(q, k as i64)).collect();
    let mut row = vec![1.0];
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            // [n, s] = [n-1, s-1] + q^s [n-1, s]
            let mut next = vec![1.0; n + 1];
            for s in 1..n {
                next[s] = row[s - 1] + qp[s] * row[s];
            }
            row = next;
        }
        let w: f64 = (0..=n).map(|s| row[s] * w1[s] * p2[s] * w2[n - s] * p1[n - s]).sum();
        out.push(w / pb[n]);
    }
    Ok(out)
}

/// `gamma_{n,u}(r1, r2, q)`.
pub fn gamma_nu(n: usize, u: usize, r1: f64, r2: f64, q: f64) -> Result<f64> {
    if u > n / 2 {
        return Err(Error::Index(format!("u = {u} must lie in 0..={}", n / 2)));
    }
    let b = r1 * r2;
    let s: f64 = (0..=u)
        .map(|m| {
            q_binomial(u, m, q)
                * q_poch(r2 * r2, q, m)
                * q_poch(b * qpow(q, (n - u - m + 1) as i64), q, m)
                * q_poch(r1 * r1, q, m)
                * q_poch(b, q, m)
                * w_poly(n - 2 * m, m, r1, r2, q)
        })
        .sum();
    Ok(s / q_poch(b * b, q, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DnForm {
    Direct,
    Expanded,
}

/// `D_n(y|r1, r2, q)` in the mixed `H`/`R` form or expanded in `R_{n-2u}`.
pub fn d_n(n: usize, y: f64, r1: f64, r2: f64, q: f64, form: DnForm) -> Result<f64> {
    check_pair(r1, r2)?;
    if !support(q)?.contains(y) {
        return domain(format!("y = {y} lies outside S(q)"));
    }
    let b = r1 * r2;
    let rr = eval_sequence(&PolyFamily::UltraR { beta: b }, n, y, q)?;
    match form {
        DnForm::Direct => {
            let h = eval_sequence(&PolyFamily::QHermite, n, y, q)?;
            Ok((0..=n)
                .map(|j| {
                    q_binomial(n, j, q)
                        * r1.powi((n - j) as i32)
                        * r2.powi(j as i32)
                        * q_poch(r1 * r1, q, j)
                        * h[n - j]
                        * rr[j]
                        / q_poch(b * b, q, j)
                })
                .sum())
        }
        DnForm::Expanded => {
            let mut s = 0.0;
            for u in 0..=n / 2 {
                let c = q_factorial(n, q) * (1.0 - b * qpow(q, (n - 2 * u) as i64)) * b.powi(u as i32)
                    / (q_factorial(u, q) * q_factorial(n - 2 * u, q) * q_poch(b, q, n - u + 1));
                s += c * rr[n - 2 * u] * gamma_nu(n, u, r1, r2, q)?;
            }
            Ok(s)
        }
    }
}

/// Partial sum of `f_N(x) f_R(y|r1 r2) sum_n H_n(x) D_n(y) / [n]!`.
pub fn exp1_partial(x: f64, y: f64, r1: f64, r2: f64, q: f64, n_terms: usize, trunc: &TruncationPolicy) -> Result<f64> {
    check_pair(r1, r2)?;
    let h = eval_sequence(&PolyFamily::QHermite, n_terms, x, q)?;
    let mut s = 0.0;
    for n in 0..n_terms {
        s += h[n] * d_n(n, y, r1, r2, q, DnForm::Direct)? / q_factorial(n, q);
    }
    Ok(f_n(x, q, trunc)? * f_r(y, r1 * r2, q, trunc)? * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum KernelId {
    /// `sum phi_n R^_n(x) R^_n(y)` with `beta = r1 r2`.
    Main { r1: f64, r2: f64 },
    /// `sum rho^n H_n(x) H_n(y) / [n]!`.
    PoissonMehler { rho: f64 },
    /// `sum rho^n U_n(x/2) U_n(y/2)`.
    ChebUu { rho: f64 },
    /// `sum rho^n T_n(x/2) T_n(y/2)`.
    ChebTt { rho: f64 },
    /// `sum rho^n U_n(x/2) T_n(y/2)`.
    ChebUt { rho: f64 },
    /// Al-Salam–Chihara kernel in `(x, z)` with conditioning value `y`.
    AscNonsym { rho1: f64, rho2: f64, y: f64 },
    /// `sum (a/b)^n H_n(x|a) H_n(y|b) / [n]!`.
    BigqhNonsym { a: f64, b: f64 },
    /// `(1-r) f_N(x) sum_j H_j H_{j+m} r^j / [j]!`; univariate, the second point is ignored.
    Aux3 { r: f64, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub id: KernelId,
    pub q: f64,
    pub n_terms: usize,
    /// Fail with a truncation error when the tail estimate exceeds this.
    pub tol: Option<f64>,
    pub trunc: TruncationPolicy,
}

impl KernelSpec {
    pub fn new(id: KernelId, q: f64) -> Self {
        KernelSpec { id, q, n_terms: 200, tol: None, trunc: TruncationPolicy::default() }
    }

    pub fn with_terms(mut self, n: usize) -> Self {
        self.n_terms = n;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn with_trunc(mut self, trunc: TruncationPolicy) -> Self {
        self.trunc = trunc;
        self
    }

    fn is_chebyshev(&self) -> bool {
        matches!(self.id, KernelId::ChebUu { .. } | KernelId::ChebTt { .. } | KernelId::ChebUt { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.q;
        if !self.is_chebyshev() && !(q > -1.0 && q <= 1.0) {
            return domain(format!("q = {q} must lie in (-1, 1]"));
        }
        match self.id {
            KernelId::Main { r1, r2 } => check_pair(r1, r2),
            KernelId::PoissonMehler { rho } | KernelId::ChebUu { rho } | KernelId::ChebTt { rho } | KernelId::ChebUt { rho } => {
                check_open_unit("rho", rho)
            }
            KernelId::AscNonsym { rho1, rho2, y } => {
                check_pair(rho1, rho2)?;
                if !support(q)?.contains(y) {
                    return domain(format!("y = {y} lies outside S(q)"));
                }
                Ok(())
            }
            KernelId::BigqhNonsym { a, b } => {
                check_open_unit("b", b)?;
                if !(a.abs() < b.abs()) {
                    return domain(format!("need |a| < |b|, got a = {a}, b = {b}"));
                }
                if q == 1.0 {
                    return Err(Error::Regime("the big q-Hermite kernel needs |q| < 1".into()));
                }
                Ok(())
            }
            KernelId::Aux3 { r, .. } => check_open_unit("r", r),
        }
    }

    fn check_point(&self, x: f64, y: f64) -> Result<()> {
        let ok = |v: f64| -> Result<bool> {
            if self.is_chebyshev() {
                Ok(v.abs() <= 2.0)
            } else {
                Ok(support(self.q)?.contains(v))
            }
        };
        let second = matches!(self.id, KernelId::Aux3 { .. }) || ok(y)?;
        if !ok(x)? || !second {
            return domain(format!("({x}, {y}) lies outside the kernel's support"));
        }
        Ok(())
    }

    /// Coefficients `c_n` such that the series is `sum c_n p^_n(x) p^_n(y)` in
    /// orthonormal polynomials (Chebyshev kernels use `U_n`, `T_n` directly).
    fn coefficients(&self) -> Result<Vec<f64>> {
        let q = self.q;
        let n = self.n_terms;
        Ok(match self.id {
            KernelId::Main { r1, r2 } => phi_sequence(n.saturating_sub(1), r1, r2, q)?,
            KernelId::PoissonMehler { rho } | KernelId::ChebUu { rho } | KernelId::ChebTt { rho } | KernelId::ChebUt { rho } => {
                (0..n).map(|k| rho.powi(k as i32)).collect()
            }
            KernelId::AscNonsym { rho1, rho2, .. } => {
                let (a, c) = (rho1 * rho1, rho1 * rho1 * rho2 * rho2);
                let mut v = Vec::with_capacity(n);
                let mut ratio: f64 = 1.0;
                for k in 0..n {
                    v.push(rho2.powi(k as i32) * ratio.sqrt());
                    let qk = qpow(q, k as i64);
                    ratio *= (1.0 - a * qk) / (1.0 - c * qk);
                }
                v
            }
            KernelId::BigqhNonsym { a, b } => (0..n).map(|k| (a / b).powi(k as i32)).collect(),
            KernelId::Aux3 { r, .. } => (0..n).map(|k| r.powi(k as i32)).collect(),
        })
    }
}

/// Tail of `sum_{n >= N} t_n` from the last few terms and the observed
/// geometric decay rate of the coefficients.
fn tail_estimate(coeffs: &[f64], terms: &[f64]) -> f64 {
    let n = terms.len();
    if n < 20 {
        return terms.last().map(|t| t.abs()).unwrap_or(0.0);
    }
    let window = |v: &[f64], a: usize, b: usize| v[a..b].iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let last = window(terms, n - 5, n);
    let c_new = window(coeffs, n - 10, n);
    let c_old = window(coeffs, n - 20, n - 10);
    if c_new == 0.0 {
        return 0.0;
    }
    let rate = (c_new / c_old).powf(0.1);
    if !(rate < 1.0) {
        return f64::INFINITY;
    }
    last * rate / (1.0 - rate)
}

fn cheb_values(u: bool, n: usize, x: f64) -> Vec<f64> {
    let fam = if u { PolyFamily::ChebyshevU } else { PolyFamily::ChebyshevT };
    eval_sequence(&fam, n, x, 0.0).expect("Chebyshev recurrence has no parameters")
}

/// A kernel with its coefficient sequence computed once, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct PreparedKernel {
    pub spec: KernelSpec,
    coeffs: Vec<f64>,
}

impl KernelSpec {
    pub fn prepare(&self) -> Result<PreparedKernel> {
        self.validate()?;
        let spec = KernelSpec { n_terms: self.n_terms.max(1), ..*self };
        Ok(PreparedKernel { coeffs: spec.coefficients()?, spec })
    }
}

impl PreparedKernel {
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncated series at `(x, y)`; the value carries a tail estimate.
    pub fn sum(&self, x: f64, y: f64) -> Result<Truncated> {
        let spec = &self.spec;
        spec.check_point(x, y)?;
        let q = spec.q;
        let n = spec.n_terms;
        let top = n - 1;
        let (px, py): (Vec<f64>, Vec<f64>) = match spec.id {
            KernelId::Main { r1, r2 } => (
                orthonormal_r_sequence(top, x, r1 * r2, q)?,
                orthonormal_r_sequence(top, y, r1 * r2, q)?,
            ),
            KernelId::PoissonMehler { .. } => (
                orthonormal_sequence(&PolyFamily::QHermite, top, x, q)?,
                orthonormal_sequence(&PolyFamily::QHermite, top, y, q)?,
            ),
            KernelId::ChebUu { .. } => (cheb_values(true, top, x / 2.0), cheb_values(true, top, y / 2.0)),
            KernelId::ChebTt { .. } => (cheb_values(false, top, x / 2.0), cheb_values(false, top, y / 2.0)),
            KernelId::ChebUt { .. } => (cheb_values(true, top, x / 2.0), cheb_values(false, top, y / 2.0)),
            KernelId::AscNonsym { rho1, rho2, y: cond } => (
                orthonormal_sequence(&PolyFamily::AsChihara { y: cond, rho: rho1 }, top, x, q)?,
                orthonormal_sequence(&PolyFamily::AsChihara { y: cond, rho: rho1 * rho2 }, top, y, q)?,
            ),
            KernelId::BigqhNonsym { a, b } => (
                orthonormal_sequence(&PolyFamily::BigQHermite { a }, top, x, q)?,
                orthonormal_sequence(&PolyFamily::BigQHermite { a: b }, top, y, q)?,
            ),
            KernelId::Aux3 { r, m } => return aux3_series(x, r, m, q, n, &spec.trunc, spec.tol),
        };
        let terms: Vec<f64> = (0..n).map(|k| self.coeffs[k] * px[k] * py[k]).collect();
        let value = terms.iter().sum();
        let tail = tail_estimate(&self.coeffs, &terms);
        finish(value, tail, n, spec.tol)
    }
}

/// Truncated series of the kernel at `(x, y)`; the value carries a tail estimate.
pub fn kernel_sum(spec: &KernelSpec, x: f64, y: f64) -> Result<Truncated> {
    spec.prepare()?.sum(x, y)
}

fn finish(value: f64, tail: f64, n: usize, tol: Option<f64>) -> Result<Truncated> {
    if let Some(t) = tol {
        if !(tail <= t) {
            return Err(Error::Truncation(format!("tail estimate {tail:e} exceeds {t:e} after {n} terms")));
        }
    }
    Ok(Truncated { value, tail_bound: tail, terms: n })
}

/// `ln sqrt([n]!)` for `n = 0..=n_max`.
fn log_sqrt_factorials(n_max: usize, q: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    v.push(0.0);
    for k in 1..=n_max {
        acc += 0.5 * q_bracket(k, q).ln();
        v.push(acc);
    }
    v
}

fn aux3_series(x: f64, r: f64, m: usize, q: f64, n: usize, trunc: &TruncationPolicy, tol: Option<f64>) -> Result<Truncated> {
    let oh = orthonormal_sequence(&PolyFamily::QHermite, n + m, x, q)?;
    let ls = log_sqrt_factorials(n + m, q);
    // H_j H_{j+m} / [j]! = h^_j h^_{j+m} sqrt([j+m]!/[j]!)
    let coeffs: Vec<f64> = (0..n).map(|j| r.powi(j as i32) * (ls[j + m] - ls[j]).exp()).collect();
    let terms: Vec<f64> = (0..n).map(|j| coeffs[j] * oh[j] * oh[j + m]).collect();
    let pre = (1.0 - r) * f_n(x, q, trunc)?;
    let s: f64 = terms.iter().sum();
    let tail = tail_estimate(&coeffs, &terms);
    finish(pre * s, pre.abs() * tail, n, tol)
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v > f64::MIN_POSITIVE {
        Ok(v)
    } else {
        Err(Error::Division(format!("{what} = {v:e} underflows; the ratio is undefined here")))
    }
}

fn cheb_denominator(rho: f64, x: f64, y: f64) -> f64 {
    let r2 = rho * rho;
    (1.0 - r2) * (1.0 - r2) - rho * (1.0 + r2) * x * y + r2 * (x * x + y * y)
}

/// `1 / phi(x|a,q) = prod_k (1 - (1-q) x a q^k + (1-q) a^2 q^{2k})`.
fn inv_char_product(x: f64, a: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    let s = 1.0 - q;
    let amp = s * (x * a).abs() + s * a * a;
    let mut qk = 1.0;
    Ok(geometric_product(amp, q, trunc, |_| {
        let f = 1.0 - s * x * a * qk + s * a * a * qk * qk;
        qk *= q;
        f
    })?
    .value)
}

/// `(1 - r1 r2) f_CN(y|x, r1) f_CN(x|y, r2)`, the joint density of the main kernel.
pub fn main_joint_density(x: f64, y: f64, r1: f64, r2: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    check_pair(r1, r2)?;
    Ok((1.0 - r1 * r2) * f_cn(y, x, r1, q, trunc)? * f_cn(x, y, r2, q, trunc)?)
}

/// Closed form of the kernel at `(x, y)`, as the ratio matching [`kernel_sum`].
pub fn kernel_closed(spec: &KernelSpec, x: f64, y: f64) -> Result<f64> {
    spec.validate()?;
    spec.check_point(x, y)?;
    let q = spec.q;
    let t = &spec.trunc;
    match spec.id {
        KernelId::Main { r1, r2 } => {
            let b = r1 * r2;
            let fx = positive(f_r(x, b, q, t)?, "f_R(x)")?;
            let fy = positive(f_r(y, b, q, t)?, "f_R(y)")?;
            Ok(main_joint_density(x, y, r1, r2, q, t)? / (fx * fy))
        }
        KernelId::PoissonMehler { rho } => Ok(f_cn(x, y, rho, q, t)? / positive(f_n(x, q, t)?, "f_N(x)")?),
        KernelId::ChebUu { rho } => Ok((1.0 - rho * rho) / cheb_denominator(rho, x, y)),
        KernelId::ChebTt { rho } => {
            let r2 = rho * rho;
            Ok((4.0 * (1.0 - r2) - rho * (3.0 + r2) * x * y + 2.0 * r2 * (x * x + y * y))
                / (4.0 * cheb_denominator(rho, x, y)))
        }
        KernelId::ChebUt { rho } => {
            let r2 = rho * rho;
            Ok((2.0 * (1.0 - r2) + r2 * y * y - rho * x * y) / (2.0 * cheb_denominator(rho, x, y)))
        }
        KernelId::AscNonsym { rho1, rho2, y: cond } => {
            // here (x, y) stand for (x, z)
            let z = y;
            let den = positive(f_cn(z, cond, rho1 * rho2, q, t)?, "f_CN(z|y)")?;
            Ok(f_cn(z, x, rho2, q, t)? / den)
        }
        KernelId::BigqhNonsym { a, b } => {
            let fx = positive(f_n(x, q, t)?, "f_N(x)")?;
            Ok(f_cn(x, y, a / b, q, t)? * inv_char_product(x, a, q, t)? / fx)
        }
        KernelId::Aux3 { r, m } => {
            let rm = eval_sequence(&PolyFamily::UltraR { beta: r }, m, x, q)?[m];
            Ok(f_r(x, r, q, t)? * rm / q_poch(r * r, q, m))
        }
    }
}

/// The four equal expressions for the `aux3` family at `x`:
/// the `H_j H_{j+m}` series, `f_R R_m/(r^2)_m`, the finite `H R` sum and the `H_{2s+m}` series.
pub fn aux3_forms(x: f64, r: f64, m: usize, q: f64, n_terms: usize, trunc: &TruncationPolicy) -> Result<[f64; 4]> {
    check_open_unit("r", r)?;
    let spec = KernelSpec::new(KernelId::Aux3 { r, m }, q).with_terms(n_terms).with_trunc(*trunc);
    let series = kernel_sum(&spec, x, 0.0)?.value;
    let closed = kernel_closed(&spec, x, 0.0)?;
    let fr = f_r(x, r, q, trunc)?;
    let h = eval_sequence(&PolyFamily::QHermite, m, x, q)?;
    let rr = eval_sequence(&PolyFamily::UltraR { beta: r }, m, x, q)?;
    let finite: f64 = (0..=m)
        .map(|k| {
            q_binomial(m, k, q) * (-r).powi(k as i32) * qpow(q, (k * k.saturating_sub(1) / 2) as i64) * h[m - k] * rr[k]
                / q_poch(r * r, q, k)
        })
        .sum();
    // r^s H_{2s+m} / ([s]! (r)_{m+s+1}) = r^s h^_{2s+m} sqrt([2s+m]!) / ([s]! (r)_{m+s+1})
    let top = 2 * n_terms + m;
    let oh = orthonormal_sequence(&PolyFamily::QHermite, top, x, q)?;
    let ls = log_sqrt_factorials(top, q);
    let mut s13 = 0.0;
    for s in 0..n_terms {
        let mag = (ls[2 * s + m] - 2.0 * ls[s]).exp();
        s13 += r.powi(s as i32) * oh[2 * s + m] * mag / q_poch(r, q, m + s + 1);
    }
    Ok([series, closed, fr * finite, (1.0 - r) * f_n(x, q, trunc)? * s13])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    pub coeffs: Vec<f64>,
    pub sum_squares: f64,
    /// Estimated remainder of `sum c_n^2` beyond the returned terms.
    pub tail: f64,
    pub summable: bool,
}

/// `{phi_n}` for the main kernel or `{rho^n}` for Poisson–Mehler.
pub fn le_coefficient_sequence(spec: &KernelSpec, n_max: usize) -> Result<CoefficientSequence> {
    spec.validate()?;
    if !matches!(spec.id, KernelId::Main { .. } | KernelId::PoissonMehler { .. }) {
        return domain("coefficient sequences are defined for the main and Poisson-Mehler kernels");
    }
    let coeffs = KernelSpec { n_terms: n_max + 1, ..*spec }.coefficients()?;
    let sq: Vec<f64> = coeffs.iter().map(|c| c * c).collect();
    let sum_squares = sq.iter().sum();
    let tail = if sq.len() >= 20 { tail_estimate(&sq, &sq) } else { sq.last().copied().unwrap_or(0.0) };
    Ok(CoefficientSequence { coeffs, sum_squares, tail, summable: tail < 1e-12 })
}
