//! q-series primitives: q-brackets, q-factorials, Gaussian binomials, finite and
//! truncated infinite q-Pochhammer symbols, the `v`/`l`/`w` weights and the
//! support interval `S(q)`.
//!
//! Infinite products are truncated once a geometric bound on the remaining
//! factors drops below [`TruncationPolicy::term_tol`]; the bound is returned
//! alongside the value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation regime selected by the value of `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// `|q| < 1`: infinite products and bounded support.
    Numeric,
    /// `q = 1`: only the closed (Gaussian) forms are available.
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub term_tol: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { term_tol: 1e-12, max_terms: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    pub q: f64,
    pub mode: Mode,
    pub trunc: TruncationPolicy,
}

impl QContext {
    pub fn new(q: f64) -> Result<Self> {
        Self::with_policy(q, TruncationPolicy::default())
    }

    pub fn with_policy(q: f64, trunc: TruncationPolicy) -> Result<Self> {
        let mode = if q == 1.0 {
            Mode::Classical
        } else if q.is_finite() && q.abs() < 1.0 {
            Mode::Numeric
        } else {
            return Err(Error::Domain(format!("q = {q} must lie in (-1, 1]")));
        };
        Ok(Self { q, mode, trunc })
    }

    pub fn support(&self) -> Support {
        // validated on construction
        support(self.q).expect("validated q")
    }
}

/// A truncated infinite product or series together with a bound on what was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncated {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// The support `S(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support {
    Bounded { lo: f64, hi: f64 },
    RealLine,
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Support::Bounded { lo, hi } => x >= lo && x <= hi,
            Support::RealLine => x.is_finite(),
        }
    }

    /// Half-width of a bounded support, `None` for the real line.
    pub fn half_width(&self) -> Option<f64> {
        match *self {
            Support::Bounded { hi, .. } => Some(hi),
            Support::RealLine => None,
        }
    }
}

/// `[n]_q = 1 + q + ... + q^{n-1}`, with `[0]_q = 0`.
pub fn q_bracket(n: usize, q: f64) -> f64 {
    let mut sum = 0.0;
    let mut p = 1.0;
    for _ in 0..n {
        sum += p;
        p *= q;
    }
    sum
}

pub fn q_factorial(n: usize, q: f64) -> f64 {
    (1..=n).map(|j| q_bracket(j, q)).product()
}

/// Gaussian binomial; zero when `k > n`.
pub fn q_binomial(n: usize, k: usize, q: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k)
        .map(|i| q_bracket(n - k + i, q) / q_bracket(i, q))
        .product()
}

/// `(a|q)_n = prod_{j<n} (1 - a q^j)`.
pub fn q_poch(a: f64, q: f64, n: usize) -> f64 {
    let mut prod = 1.0;
    let mut aq = a;
    for _ in 0..n {
        prod *= 1.0 - aq;
        aq *= q;
    }
    prod
}

pub fn multi_poch(a: &[f64], q: f64, n: usize) -> f64 {
    a.iter().map(|&ai| q_poch(ai, q, n)).product()
}

/// `q^e` for a possibly negative exponent, with `0^0 = 1`.
pub(crate) fn qpow(q: f64, e: i64) -> f64 {
    if e >= 0 {
        q.powi(e as i32)
    } else {
        1.0 / q.powi((-e) as i32)
    }
}

/// Product of `factor(0) * factor(1) * ...` where `|factor(k) - 1| <= amp * |q|^k`.
///
/// Stops at the first `K` for which the tail estimate
/// `amp |q|^K / ((1 - |q|)(1 - amp |q|^K))` is below `trunc.term_tol`.
pub fn geometric_product(
    amp: f64,
    q: f64,
    trunc: &TruncationPolicy,
    mut factor: impl FnMut(usize) -> f64,
) -> Result<Truncated> {
    if !(q.abs() < 1.0) {
        return Err(Error::Regime(format!("infinite product needs |q| < 1, got q = {q}")));
    }
    let aq = q.abs();
    let mut value = 1.0;
    let mut level = amp.abs();
    for k in 0..=trunc.max_terms {
        if level < 1.0 {
            let tail = level / ((1.0 - aq) * (1.0 - level));
            if tail <= trunc.term_tol || value == 0.0 {
                return Ok(Truncated { value, tail_bound: tail * value.abs(), terms: k });
            }
        }
        if k == trunc.max_terms {
            break;
        }
        value *= factor(k);
        level *= aq;
    }
    Err(Error::Truncation(format!(
        "product did not reach tolerance {} within {} factors (q = {q})",
        trunc.term_tol, trunc.max_terms
    )))
}

/// Same stopping rule as [`geometric_product`], accumulating `sum_k ln factor(k)`.
///
/// Needed when the product itself under- or overflows (q close to 1).
/// `tail_bound` bounds the error of the returned logarithm.
pub fn log_geometric_product(
    amp: f64,
    q: f64,
    trunc: &TruncationPolicy,
    mut factor: impl FnMut(usize) -> f64,
) -> Result<Truncated> {
    if !(q.abs() < 1.0) {
        return Err(Error::Regime(format!("infinite product needs |q| < 1, got q = {q}")));
    }
    let aq = q.abs();
    let mut value = 0.0;
    let mut level = amp.abs();
    for k in 0..=trunc.max_terms {
        if level < 1.0 {
            let tail = level / ((1.0 - aq) * (1.0 - level));
            if tail <= trunc.term_tol {
                return Ok(Truncated { value, tail_bound: tail, terms: k });
            }
        }
        if k == trunc.max_terms {
            break;
        }
        let f = factor(k);
        if f < 0.0 {
            return Err(Error::Domain(format!("negative factor {f} at k = {k} in a log product")));
        }
        value += f.ln();
        if value == f64::NEG_INFINITY {
            return Ok(Truncated { value, tail_bound: 0.0, terms: k + 1 });
        }
        level *= aq;
    }
    Err(Error::Truncation(format!(
        "product did not reach tolerance {} within {} factors (q = {q})",
        trunc.term_tol, trunc.max_terms
    )))
}

/// Truncated `ln (a|q)_inf`, for `a < 1`.
pub fn log_q_poch_inf(a: f64, q: f64, trunc: &TruncationPolicy) -> Result<Truncated> {
    let mut aq = a;
    log_geometric_product(a, q, trunc, |_| {
        let f = 1.0 - aq;
        aq *= q;
        f
    })
}

/// Truncated `(a|q)_inf`.
pub fn q_poch_inf(a: f64, q: f64, trunc: &TruncationPolicy) -> Result<Truncated> {
    let mut aq = a;
    geometric_product(a, q, trunc, |_| {
        let f = 1.0 - aq;
        aq *= q;
        f
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightKind {
    V,
    L,
    W,
}

/// `v(x|a) = 1 - 2ax + a^2`.
pub fn weight_v(x: f64, a: f64) -> f64 {
    1.0 - 2.0 * a * x + a * a
}

/// `l(x|a) = (1 + a)^2 - 4 x^2 a`.
pub fn weight_l(x: f64, a: f64) -> f64 {
    (1.0 + a) * (1.0 + a) - 4.0 * x * x * a
}

/// `w(x,y|a) = (1 - a^2)^2 - 4xya(1 + a^2) + 4a^2(x^2 + y^2)`.
pub fn weight_w(x: f64, y: f64, a: f64) -> f64 {
    let a2 = a * a;
    (1.0 - a2) * (1.0 - a2) - 4.0 * x * y * a * (1.0 + a2) + 4.0 * a2 * (x * x + y * y)
}

pub fn weight(kind: WeightKind, x: f64, y: Option<f64>, a: f64) -> Result<f64> {
    match (kind, y) {
        (WeightKind::V, None) => Ok(weight_v(x, a)),
        (WeightKind::L, None) => Ok(weight_l(x, a)),
        (WeightKind::W, Some(y)) => Ok(weight_w(x, y, a)),
        (WeightKind::W, None) => Err(Error::Arity("weight w takes two spatial arguments".into())),
        (k, Some(_)) => Err(Error::Arity(format!("weight {k:?} takes one spatial argument"))),
    }
}

/// `S(q) = [-2/sqrt(1-q), 2/sqrt(1-q)]` for `|q| < 1`, the real line at `q = 1`.
pub fn support(q: f64) -> Result<Support> {
    if q == 1.0 {
        Ok(Support::RealLine)
    } else if q.is_finite() && q > -1.0 && q < 1.0 {
        let h = 2.0 / (1.0 - q).sqrt();
        Ok(Support::Bounded { lo: -h, hi: h })
    } else {
        Err(Error::Domain(format!("q = {q} must lie in (-1, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_products_match() {
        let t = TruncationPolicy::default();
        for &(a, q) in &[(0.5, 0.5), (-0.7, 0.3), (0.2, -0.8), (0.9, 0.9)] {
            let p = q_poch_inf(a, q, &t).unwrap().value;
            let l = log_q_poch_inf(a, q, &t).unwrap();
            assert!((l.value - p.ln()).abs() < 1e-12);
        }
        // (q)_inf at q = 0.999 underflows, its logarithm does not: ln (q)_inf ~ -pi^2/(6t) + ln(2pi/t)/2, t = -ln q
        let big = TruncationPolicy { term_tol: 1e-12, max_terms: 100_000 };
        let l = log_q_poch_inf(0.999, 0.999, &big).unwrap().value;
        assert!(l < -1635.0 && l > -1645.0, "{l}");
        assert!(matches!(log_q_poch_inf(0.999, 0.999, &t), Err(Error::Truncation(_))));
    }

    #[test]
    fn bracket_values() {
        assert_eq!(q_bracket(0, 0.3), 0.0);
        assert_eq!(q_bracket(5, 1.0), 5.0);
        assert_eq!(q_bracket(3, 0.5), 1.75);
        // [n]_0 = 1 for n >= 1
        assert_eq!(q_bracket(4, 0.0), 1.0);
    }

    #[test]
    fn factorial_and_binomial() {
        assert_eq!(q_factorial(4, 1.0), 24.0);
        assert_eq!(q_factorial(0, 0.7), 1.0);
        for n in 0..10 {
            for k in 0..=n {
                let classical = (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
                assert!((q_binomial(n, k, 1.0) - classical).abs() < 1e-9);
                assert_eq!(q_binomial(n, k, 0.0), 1.0);
            }
            assert_eq!(q_binomial(n, n + 1, 0.4), 0.0);
        }
    }

    #[test]
    fn finite_pochhammer() {
        assert_eq!(q_poch(0.3, 0.2, 0), 1.0);
        assert!((q_poch(0.3, 1.0, 4) - 0.7f64.powi(4)).abs() < 1e-15);
        assert_eq!(q_poch(0.5, 0.5, 3), 0.328125);
        assert!((multi_poch(&[0.5, 0.3], 0.5, 3) - 0.328125 * q_poch(0.3, 0.5, 3)).abs() < 1e-15);
    }

    #[test]
    fn infinite_pochhammer() {
        let t = TruncationPolicy::default();
        assert_eq!(q_poch_inf(0.0, 0.4, &t).unwrap().value, 1.0);
        assert!((q_poch_inf(0.9, 0.0, &t).unwrap().value - 0.1).abs() < 1e-15);

        // Euler: 1/(t)_inf = sum t^k/(q)_k
        let v = q_poch_inf(0.5, 0.5, &t).unwrap();
        let series: f64 = (0..200).map(|k| 0.5f64.powi(k as i32) / q_poch(0.5, 0.5, k)).sum();
        assert!((v.value * series - 1.0).abs() <= 1e-9);
        assert!(v.tail_bound <= 1e-12);
    }

    #[test]
    fn infinite_product_errors() {
        let t = TruncationPolicy::default();
        assert!(matches!(q_poch_inf(0.5, 1.0, &t), Err(Error::Regime(_))));
        let tight = TruncationPolicy { term_tol: 1e-12, max_terms: 10 };
        assert!(matches!(q_poch_inf(0.5, 0.99, &tight), Err(Error::Truncation(_))));
    }

    #[test]
    fn weights() {
        assert_eq!(weight(WeightKind::V, 0.7, None, 0.0).unwrap(), 1.0);
        assert_eq!(weight(WeightKind::L, 0.0, None, 0.3).unwrap(), 1.3 * 1.3);
        assert_eq!(weight(WeightKind::W, 1.0, Some(1.0), 0.5).unwrap(), 0.0625);
        assert!(matches!(weight(WeightKind::W, 1.0, None, 0.5), Err(Error::Arity(_))));
        assert!(matches!(weight(WeightKind::V, 1.0, Some(2.0), 0.5), Err(Error::Arity(_))));
    }

    #[test]
    fn support_interval() {
        assert_eq!(support(0.0).unwrap(), Support::Bounded { lo: -2.0, hi: 2.0 });
        assert_eq!(support(0.75).unwrap(), Support::Bounded { lo: -4.0, hi: 4.0 });
        assert_eq!(support(1.0).unwrap(), Support::RealLine);
        assert!(support(-1.0).is_err());
        assert!(support(1.5).is_err());
        assert!(QContext::new(1.0).unwrap().mode == Mode::Classical);
        assert!(QContext::new(-0.5).unwrap().mode == Mode::Numeric);
    }

    proptest! {
        #[test]
        fn poch_q_equals_scaled_factorial(q in -0.95f64..0.95, n in 0usize..=30) {
            let lhs = q_poch(q, q, n);
            let rhs = (1.0 - q).powi(n as i32) * q_factorial(n, q);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }

        #[test]
        fn poch_splits(a in -0.95f64..0.95, q in -0.95f64..0.95, n in 0usize..12, m in 0usize..12) {
            let lhs = q_poch(a, q, n + m);
            let rhs = q_poch(a, q, n) * q_poch(a * q.powi(n as i32), q, m);
            prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0));
        }

        #[test]
        fn euler_sums(t in -0.9f64..0.9, q in -0.9f64..0.9) {
            let pol = TruncationPolicy::default();
            let tinf = q_poch_inf(t, q, &pol).unwrap().value;
            let k_max = 400;
            let inv: f64 = (0..k_max).map(|k| t.powi(k as i32) / q_poch(q, q, k)).sum();
            prop_assert!((tinf * inv - 1.0).abs() <= 1e-9);
            let direct: f64 = (0..k_max)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * qpow(q, (k * k.saturating_sub(1) / 2) as i64) * t.powi(k as i32) / q_poch(q, q, k)
                })
                .sum();
            prop_assert!((direct - tinf).abs() <= 1e-9);
        }
    }
}
