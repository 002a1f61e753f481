//! Polynomial families evaluated by forward three-term recurrence.
//!
//! Every family starts from `p_{-1} = 0`, `p_0 = 1`. The recurrence is the only
//! evaluation path; closed forms appear in tests as oracles.

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, domain, Error, Result};
use crate::qcore::{geometric_product, q_bracket, q_factorial, q_poch, qpow, support, Truncated, TruncationPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PolyFamily {
    ChebyshevT,
    ChebyshevU,
    /// Probabilists' Hermite `H_n(x)`.
    Hermite,
    /// Continuous q-Hermite `H_n(x|q)`.
    QHermite,
    /// Big q-Hermite `H_n(x|a,q)`.
    BigQHermite { a: f64 },
    /// Al-Salam–Chihara `P_n(x|y,rho,q)`.
    AsChihara { y: f64, rho: f64 },
    /// Rescaled q-ultraspherical `R_n(x|beta,q)`.
    UltraR { beta: f64 },
    /// Monic `V_n = R_n / (beta)_n`.
    UltraV { beta: f64 },
    /// Rogers polynomials `C_n(x|beta,q)` on `[-1,1]`.
    UltraC { beta: f64 },
    /// Auxiliary `B_n(x|q)`.
    BPoly,
}

impl PolyFamily {
    pub fn validate(&self, q: f64) -> Result<()> {
        if !(q > -1.0 && q <= 1.0) {
            return domain(format!("q = {q} must lie in (-1, 1]"));
        }
        match *self {
            PolyFamily::BigQHermite { a } => check_open_unit("a", a),
            PolyFamily::AsChihara { y, rho } => {
                check_open_unit("rho", rho)?;
                if !support(q)?.contains(y) {
                    return domain(format!("y = {y} lies outside S(q) for q = {q}"));
                }
                Ok(())
            }
            PolyFamily::UltraR { beta } | PolyFamily::UltraV { beta } => check_open_unit("beta", beta),
            PolyFamily::UltraC { beta } => {
                check_open_unit("beta", beta)?;
                if q == 1.0 {
                    return domain("UltraC is undefined at q = 1 (the rescaling degenerates)");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// `p_{n+1} = (x - b_n) p_n - c_n p_{n-1}` style step written as
/// `p_{n+1} = alpha_n p_n - gamma_n p_{n-1}`.
fn step(fam: &PolyFamily, n: usize, x: f64, q: f64) -> (f64, f64) {
    let nb = q_bracket(n, q);
    // coefficient of p_{n-1}; irrelevant at n = 0 since p_{-1} = 0
    let prev = |c: f64| if n == 0 { 0.0 } else { c };
    match *fam {
        PolyFamily::ChebyshevT => {
            if n == 0 {
                (x, 0.0)
            } else {
                (2.0 * x, 1.0)
            }
        }
        PolyFamily::ChebyshevU => (2.0 * x, prev(1.0)),
        PolyFamily::Hermite => (x, n as f64),
        PolyFamily::QHermite => (x, nb),
        PolyFamily::BigQHermite { a } => (x - a * qpow(q, n as i64), nb),
        PolyFamily::AsChihara { y, rho } => (
            x - rho * y * qpow(q, n as i64),
            prev((1.0 - rho * rho * qpow(q, n as i64 - 1)) * nb),
        ),
        PolyFamily::UltraR { beta } | PolyFamily::UltraC { beta } => (
            (1.0 - beta * qpow(q, n as i64)) * x,
            prev((1.0 - beta * beta * qpow(q, n as i64 - 1)) * nb),
        ),
        PolyFamily::UltraV { beta } => {
            // monic recurrence obtained by dividing (R) by (beta)_{n+1}
            let c = prev(
                (1.0 - beta * beta * qpow(q, n as i64 - 1)) * nb
                    / ((1.0 - beta * qpow(q, n as i64)) * (1.0 - beta * qpow(q, n as i64 - 1))),
            );
            (x, c)
        }
        PolyFamily::BPoly => (-x * qpow(q, n as i64), prev(-qpow(q, n as i64 - 1) * nb)),
    }
}

fn recurrence(fam: &PolyFamily, n_max: usize, x: f64, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(cur);
    for n in 0..n_max {
        let (alpha, gamma) = step(fam, n, x, q);
        let next = alpha * cur - gamma * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Values `p_0(x), ..., p_{n_max}(x)` in one forward pass.
pub fn eval_sequence(fam: &PolyFamily, n_max: usize, x: f64, q: f64) -> Result<Vec<f64>> {
    fam.validate(q)?;
    match *fam {
        PolyFamily::UltraC { beta } => {
            // invert R_n(x) = [n]_q! C_n(x sqrt(1-q)/2) (1-q)^{n/2}
            let s = (1.0 - q).sqrt();
            let r = recurrence(&PolyFamily::UltraR { beta }, n_max, 2.0 * x / s, q);
            Ok(r
                .into_iter()
                .enumerate()
                .map(|(n, v)| v / (q_factorial(n, q) * s.powi(n as i32)))
                .collect())
        }
        _ => Ok(recurrence(fam, n_max, x, q)),
    }
}

pub fn eval_poly(fam: &PolyFamily, n: usize, x: f64, q: f64) -> Result<f64> {
    Ok(eval_sequence(fam, n, x, q)?[n])
}

/// `B_n(x|q)`.
pub fn b_poly(n: usize, x: f64, q: f64) -> f64 {
    recurrence(&PolyFamily::BPoly, n, x, q)[n]
}

fn check_beta_product(r1: f64, r2: f64) -> Result<f64> {
    let beta = r1 * r2;
    if !(beta.abs() < 1.0) {
        return domain(format!("|r1 r2| = {} must be < 1", beta.abs()));
    }
    Ok(beta)
}

/// `R^_n(x|r1 r2, q) = R_n sqrt(1 - beta q^n) / sqrt([n]_q! (beta^2)_n (1 - beta))`, `beta = r1 r2`.
pub fn orthonormal_r(n: usize, x: f64, r1: f64, r2: f64, q: f64) -> Result<f64> {
    let beta = check_beta_product(r1, r2)?;
    Ok(orthonormal_r_sequence(n, x, beta, q)?[n])
}

/// Orthonormal `R^_0..R^_{n_max}` for parameter `beta`, computed with the
/// normalised recurrence so that large `n` neither overflows nor underflows.
pub fn orthonormal_r_sequence(n_max: usize, x: f64, beta: f64, q: f64) -> Result<Vec<f64>> {
    PolyFamily::UltraR { beta }.validate(q)?;
    // h_{n+1} / h_n for h_n = [n]! (1-beta)(beta^2)_n / (1 - beta q^n)
    let ratio = |n: usize| {
        let qn = qpow(q, n as i64);
        q_bracket(n + 1, q) * (1.0 - beta * beta * qn) * (1.0 - beta * qn) / (1.0 - beta * qn * q)
    };
    let mut out = Vec::with_capacity(n_max + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(cur);
    let mut last_ratio: f64 = 1.0;
    for n in 0..n_max {
        let rn = ratio(n);
        let a = 1.0 - beta * qpow(q, n as i64);
        let b = if n == 0 {
            0.0
        } else {
            (1.0 - beta * beta * qpow(q, n as i64 - 1)) * q_bracket(n, q)
        };
        // p_{n+1} = (a x p_n sqrt(h_n) - b p_{n-1} sqrt(h_{n-1})) / sqrt(h_{n+1})
        let next = (a * x * cur - b * prev / last_ratio.sqrt()) / rn.sqrt();
        prev = cur;
        cur = next;
        last_ratio = rn;
        out.push(cur);
    }
    Ok(out)
}

/// Orthonormal q-Hermite `H_n(x|q)/sqrt([n]_q!)` for `n = 0..=n_max`.
pub fn orthonormal_h_sequence(n_max: usize, x: f64, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(cur);
    for n in 0..n_max {
        let next = (x * cur - q_bracket(n, q).sqrt() * prev) / q_bracket(n + 1, q).sqrt();
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Orthonormal version `p_n / sqrt(h_n)` of a monic family (`QHermite`,
/// `Hermite`, `BigQHermite`, `AsChihara`), where `h_n` is the squared norm.
pub fn orthonormal_sequence(fam: &PolyFamily, n_max: usize, x: f64, q: f64) -> Result<Vec<f64>> {
    fam.validate(q)?;
    match fam {
        PolyFamily::QHermite | PolyFamily::Hermite | PolyFamily::BigQHermite { .. } | PolyFamily::AsChihara { .. } => {}
        other => return domain(format!("{other:?} is not a monic family with a positive recurrence")),
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(cur);
    let mut sqrt_c = 0.0;
    for n in 0..n_max {
        let (alpha, _) = step(fam, n, x, q);
        let sqrt_next = step(fam, n + 1, x, q).1.sqrt();
        let next = (alpha * cur - sqrt_c * prev) / sqrt_next;
        prev = cur;
        cur = next;
        sqrt_c = sqrt_next;
        out.push(cur);
    }
    Ok(out)
}

/// `phi(x|t,q) = 1 / prod_k (1 - (1-q) x t q^k + (1-q) t^2 q^{2k})`, the
/// generating function `sum_n t^n H_n(x|q) / [n]_q!`.
pub fn char_fn_h(x: f64, t: f64, q: f64, trunc: &TruncationPolicy) -> Result<Truncated> {
    if !(q.abs() < 1.0) {
        return Err(Error::Regime(format!("char_fn_h needs |q| < 1, got {q}")));
    }
    if !((t * (1.0 - q).sqrt()).abs() < 1.0) {
        return Err(Error::Regime(format!("|t sqrt(1-q)| must be < 1 (t = {t}, q = {q})")));
    }
    if !support(q)?.contains(x) {
        return Err(Error::Regime(format!("x = {x} lies outside S(q)")));
    }
    let s = 1.0 - q;
    let amp = s * (x * t).abs() + s * t * t;
    let mut qk = 1.0;
    let prod = geometric_product(amp, q, trunc, |_| {
        let f = 1.0 - s * x * t * qk + s * t * t * qk * qk;
        qk *= q;
        f
    })?;
    let value = 1.0 / prod.value;
    Ok(Truncated { value, tail_bound: prod.tail_bound * value * value, terms: prod.terms })
}

/// `(beta)_n`, the leading coefficient of `R_n(x|beta,q)`.
pub fn r_leading_coefficient(n: usize, beta: f64, q: f64) -> f64 {
    q_poch(beta, q, n)
}
