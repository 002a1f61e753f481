//! Densities of the q-Gaussian family.
//!
//! Infinite products are accumulated in log space; at q close to 1 the
//! individual products leave the range of `f64` while the densities do not.
//! Evaluation points outside the support give 0.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, domain, Error, Result};
use crate::qcore::{
    log_geometric_product, log_q_poch_inf, support, weight_l, Truncated, TruncationPolicy,
};

fn check_q(q: f64) -> Result<()> {
    if !(q > -1.0 && q <= 1.0) {
        return domain(format!("q = {q} must lie in (-1, 1]"));
    }
    Ok(())
}

fn in_support(x: f64, q: f64) -> bool {
    support(q).map(|s| s.contains(x)).unwrap_or(false)
}

fn gauss(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// `sum_{k>=k0} ln l(z | a q^k)`.
fn log_l_product(z: f64, a: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    let mut aq = a;
    let amp = a.abs() * (6.0 + a.abs());
    Ok(log_geometric_product(amp, q, trunc, |_| {
        let f = weight_l(z, aq);
        aq *= q;
        f
    })?
    .value)
}

/// `ln f_h(z|q)` for `|z| < 1`.
fn log_f_h(z: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    let s = ((1.0 - z) * (1.0 + z)).sqrt();
    Ok((2.0 / PI).ln() + s.ln() + log_q_poch_inf(q, q, trunc)?.value + log_l_product(z, q, q, trunc)?)
}

/// `f_h(x|q)` on `[-1, 1]`.
pub fn f_h(x: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    if !(q.abs() < 1.0) {
        return Err(Error::Regime(format!("f_h needs |q| < 1, got {q}")));
    }
    if !(x.abs() < 1.0) {
        return Ok(0.0);
    }
    Ok(log_f_h(x, q, trunc)?.exp())
}

/// `f_N(x|q)`; the standard normal density at `q = 1`.
pub fn f_n(x: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    check_q(q)?;
    if q == 1.0 {
        return Ok(gauss(x, 0.0, 1.0));
    }
    let s = (1.0 - q).sqrt();
    let z = x * s / 2.0;
    if !(z.abs() < 1.0) {
        return Ok(0.0);
    }
    Ok(s / 2.0 * log_f_h(z, q, trunc)?.exp())
}

/// `ln` of `W(x,y|rho,q) = prod_k w^_q(x,y|rho q^k,q)`.
pub fn log_w_product(x: f64, y: f64, rho: f64, q: f64, trunc: &TruncationPolicy) -> Result<Truncated> {
    check_open_unit("rho", rho)?;
    if !(q.abs() < 1.0) {
        return Err(Error::Regime(format!("W needs |q| < 1, got {q}")));
    }
    if !in_support(x, q) || !in_support(y, q) {
        return domain(format!("({x}, {y}) lies outside S(q) x S(q)"));
    }
    let r = rho.abs();
    let amp = r * (4.0 * (1.0 + r * r) + 10.0 * r + r * r * r);
    let mut a = rho;
    log_geometric_product(amp, q, trunc, |_| {
        let f = w_hat(x, y, a, q);
        a *= q;
        f
    })
}

/// `w^_q(x,y|rho,q) = (1-rho^2)^2 - (1-q) rho x y (1+rho^2) + rho^2 (1-q)(x^2+y^2)`.
pub fn w_hat(x: f64, y: f64, rho: f64, q: f64) -> f64 {
    let r2 = rho * rho;
    (1.0 - r2) * (1.0 - r2) - (1.0 - q) * rho * x * y * (1.0 + r2) + r2 * (1.0 - q) * (x * x + y * y)
}

/// `W(x,y|rho,q)` with a bound on its truncation error.
pub fn w_product(x: f64, y: f64, rho: f64, q: f64, trunc: &TruncationPolicy) -> Result<Truncated> {
    let l = log_w_product(x, y, rho, q, trunc)?;
    let value = l.value.exp();
    Ok(Truncated { value, tail_bound: value * l.tail_bound.exp_m1(), terms: l.terms })
}

/// Conditional q-Normal `f_CN(x|y,rho,q)`; `N(rho y, 1 - rho^2)` at `q = 1`.
pub fn f_cn(x: f64, y: f64, rho: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    check_q(q)?;
    check_open_unit("rho", rho)?;
    if q == 1.0 {
        return Ok(f_cn_classical(x, y, rho));
    }
    if !in_support(y, q) {
        return domain(format!("conditioning value y = {y} lies outside S(q)"));
    }
    if !in_support(x, q) {
        return Ok(0.0);
    }
    Ok(log_f_cn(x, y, rho, q, trunc)?.exp())
}

fn log_f_cn(x: f64, y: f64, rho: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    let s = (1.0 - q).sqrt();
    let z = x * s / 2.0;
    if !(z.abs() < 1.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok((s / 2.0).ln() + log_f_h(z, q, trunc)? + log_q_poch_inf(rho * rho, q, trunc)?.value
        - log_w_product(x, y, rho, q, trunc)?.value)
}

/// `N(rho y, 1 - rho^2)` density at `x`.
pub fn f_cn_classical(x: f64, y: f64, rho: f64) -> f64 {
    gauss(x, rho * y, 1.0 - rho * rho)
}

/// Rogers weight `f_C(z|beta,q)` on `[-1, 1]`.
pub fn f_c(z: f64, beta: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    check_open_unit("beta", beta)?;
    if !(q.abs() < 1.0) {
        return Err(Error::Regime(format!("f_C needs |q| < 1, got {q}")));
    }
    if !(z.abs() < 1.0) {
        return Ok(0.0);
    }
    let lead = log_q_poch_inf(beta * beta, q, trunc)?.value
        - log_q_poch_inf(beta, q, trunc)?.value
        - log_q_poch_inf(beta * q, q, trunc)?.value;
    Ok((lead + log_f_h(z, q, trunc)? - log_l_product(z, beta, q, trunc)?).exp())
}

/// `f_R(x|beta,q)`, the orthogonality density of `R_n(x|beta,q)`;
/// `N(0, (1+beta)/(1-beta))` at `q = 1`.
pub fn f_r(x: f64, beta: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    check_q(q)?;
    check_open_unit("beta", beta)?;
    if q == 1.0 {
        return Ok(gauss(x, 0.0, (1.0 + beta) / (1.0 - beta)));
    }
    let s = (1.0 - q).sqrt();
    Ok(s / 2.0 * f_c(x * s / 2.0, beta, q, trunc)?)
}

/// Big q-Hermite weight `f_bN(x|a,q) = f_N(x|q) phi(x|a,q)`.
pub fn f_bn(x: f64, a: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    check_open_unit("a", a)?;
    if !(q.abs() < 1.0) {
        return Err(Error::Regime(format!("f_bN needs |q| < 1, got {q}")));
    }
    if !((a * (1.0 - q).sqrt()).abs() < 1.0) {
        return Err(Error::Regime(format!("f_bN needs |a sqrt(1-q)| < 1 (a = {a}, q = {q})")));
    }
    if !in_support(x, q) {
        return Ok(0.0);
    }
    let base = f_n(x, q, trunc)?;
    Ok(base * crate::polyfam::char_fn_h(x, a, q, trunc)?.value)
}

/// `(1-r) f_CN(x|y,rho12) f_CN(y|z,rho23) f_CN(z|x,rho13)` with `r = rho12 rho23 rho13`.
pub fn f_3d(
    x: f64,
    y: f64,
    z: f64,
    rho12: f64,
    rho23: f64,
    rho13: f64,
    q: f64,
    trunc: &TruncationPolicy,
) -> Result<f64> {
    check_q(q)?;
    if ![x, y, z].iter().all(|&v| in_support(v, q)) {
        return Ok(0.0);
    }
    let r = rho12 * rho23 * rho13;
    Ok((1.0 - r) * f_cn(x, y, rho12, q, trunc)? * f_cn(y, z, rho23, q, trunc)? * f_cn(z, x, rho13, q, trunc)?)
}

/// Arcsine density `1/(pi sqrt(1-x^2))`.
pub fn f_t(x: f64) -> f64 {
    if x.abs() < 1.0 {
        1.0 / (PI * ((1.0 - x) * (1.0 + x)).sqrt())
    } else {
        0.0
    }
}

/// Semicircle density `2 sqrt(1-x^2)/pi`.
pub fn f_u(x: f64) -> f64 {
    if x.abs() < 1.0 {
        2.0 / PI * ((1.0 - x) * (1.0 + x)).sqrt()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DensityKind {
    #[serde(rename = "f_h")]
    H,
    #[serde(rename = "f_N")]
    N,
    #[serde(rename = "f_bN")]
    BigN { a: f64 },
    #[serde(rename = "f_CN")]
    CondN { y: f64, rho: f64 },
    #[serde(rename = "f_R")]
    R { beta: f64 },
    #[serde(rename = "f_3D")]
    ThreeD { rho12: f64, rho23: f64, rho13: f64 },
    #[serde(rename = "f_T")]
    T,
    #[serde(rename = "f_U")]
    U,
    #[serde(rename = "f_N_classical")]
    NClassical,
}

impl DensityKind {
    pub fn dim(&self) -> usize {
        match self {
            DensityKind::ThreeD { .. } => 3,
            _ => 1,
        }
    }

    /// Interval carrying the mass of the density at this `q`; `None` means the real line.
    pub fn support(&self, q: f64) -> Result<Option<(f64, f64)>> {
        match self {
            DensityKind::H | DensityKind::T | DensityKind::U => Ok(Some((-1.0, 1.0))),
            DensityKind::NClassical => Ok(None),
            _ => Ok(support(q)?.half_width().map(|h| (-h, h))),
        }
    }
}

pub fn density(kind: &DensityKind, point: &[f64], q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    if point.len() != kind.dim() {
        return Err(Error::Arity(format!("{kind:?} takes {} coordinates, got {}", kind.dim(), point.len())));
    }
    let x = point[0];
    match *kind {
        DensityKind::H => f_h(x, q, trunc),
        DensityKind::N => f_n(x, q, trunc),
        DensityKind::BigN { a } => f_bn(x, a, q, trunc),
        DensityKind::CondN { y, rho } => f_cn(x, y, rho, q, trunc),
        DensityKind::R { beta } => f_r(x, beta, q, trunc),
        DensityKind::ThreeD { rho12, rho23, rho13 } => f_3d(x, point[1], point[2], rho12, rho23, rho13, q, trunc),
        DensityKind::T => Ok(f_t(x)),
        DensityKind::U => Ok(f_u(x)),
        DensityKind::NClassical => Ok(gauss(x, 0.0, 1.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfam::{eval_sequence, PolyFamily};
    use crate::qcore::{q_factorial, q_poch};
    use proptest::prelude::*;

    fn t() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn w_product_cases() {
        assert_eq!(w_product(0.3, -1.0, 0.0, 0.5, &t()).unwrap().value, 1.0);
        let (x, rho) = (0.7, 0.4);
        let single = w_hat(x, x, rho, 0.0);
        assert!((w_product(x, x, rho, 0.0, &t()).unwrap().value - single).abs() < 1e-15);
        // direct log-sum oracle
        let (x, y, rho, q): (f64, f64, f64, f64) = (1.2, -0.5, 0.6, 0.7);
        let direct: f64 = (0..2000).map(|k| w_hat(x, y, rho * q.powi(k), q).ln()).sum();
        assert!((log_w_product(x, y, rho, q, &t()).unwrap().value - direct).abs() < 1e-12);
        assert!(w_product(5.0, 0.0, 0.3, 0.5, &t()).is_err());
    }

    #[test]
    fn special_values() {
        let tt = t();
        for &(x, q) in &[(0.3, 0.5), (-1.1, -0.4), (1.9, 0.0)] {
            assert!(close(f_cn(x, 0.7, 0.0, q, &tt).unwrap(), f_n(x, q, &tt).unwrap(), 1e-14));
        }
        assert!((f_n(0.4, 1.0, &tt).unwrap() - (-0.08f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-16);
        assert!((f_cn_classical(0.3, 0.0, 0.0) - f_n(0.3, 1.0, &tt).unwrap()).abs() < 1e-16);
        let peak = f_cn_classical(0.5 * 0.8, 0.8, 0.5);
        assert!((peak - 1.0 / (2.0 * PI * 0.75).sqrt()).abs() < 1e-15);
        // q = 0 is the semicircle law on [-2, 2]
        assert!((f_n(1.0, 0.0, &tt).unwrap() - 3f64.sqrt() / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(f_n(3.0, 0.0, &tt).unwrap(), 0.0);
        assert_eq!(f_r(-3.0, 0.2, 0.0, &tt).unwrap(), 0.0);
        assert!(f_r(0.0, 1.0, 0.5, &tt).is_err());
        assert!(f_cn(0.0, 9.0, 0.3, 0.5, &tt).is_err());
        assert!((f_t(0.0) - 1.0 / PI).abs() < 1e-16 && f_u(1.0) == 0.0);
        assert!(matches!(density(&DensityKind::N, &[0.1, 0.2], 0.5, &tt), Err(Error::Arity(_))));
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        // substitution x = L sin(theta) removes the square-root endpoints
        let l = b;
        let _ = a;
        let h = PI / n as f64;
        (0..=n)
            .map(|i| {
                let th = -PI / 2.0 + i as f64 * h;
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * f(l * th.sin()) * l * th.cos()
            })
            .sum::<f64>()
            * h
            / 3.0
    }

    #[test]
    fn f_r_integrates_to_one() {
        let tt = t();
        for &(beta, q) in &[(0.5, 0.5), (-0.5, 0.5), (0.5, -0.5), (-0.5, -0.5), (0.3, 0.9)] {
            let l = 2.0 / (1.0f64 - q).sqrt();
            let v = simpson(|x| f_r(x, beta, q, &tt).unwrap(), -l, l, 4000);
            assert!((v - 1.0).abs() < 1e-8, "beta={beta} q={q}: {v}");
        }
    }

    #[test]
    fn f_n_moments() {
        let tt = t();
        for q in [-0.6, 0.0, 0.4, 0.8] {
            let l = 2.0 / (1.0f64 - q).sqrt();
            let m0 = simpson(|x| f_n(x, q, &tt).unwrap(), -l, l, 4000);
            let m1 = simpson(|x| x * f_n(x, q, &tt).unwrap(), -l, l, 4000);
            let m2 = simpson(|x| x * x * f_n(x, q, &tt).unwrap(), -l, l, 4000);
            assert!((m0 - 1.0).abs() < 1e-8 && m1.abs() < 1e-8 && (m2 - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn f_r_equivalent_forms() {
        let tt = t();
        for &(beta, q) in &[(0.8, 0.9), (-0.8, 0.5), (0.4, -0.9), (-0.3, 0.0), (0.6, 0.6)] {
            let l: f64 = 2.0 / (1.0f64 - q).sqrt();
            for i in 0..20 {
                let x = -l + (i as f64 + 0.5) * 2.0 * l / 20.0;
                let a = f_r(x, beta, q, &tt).unwrap();
                let b = (1.0 - beta) * f_cn(x, x, beta, q, &tt).unwrap();
                assert!((a - b).abs() < 1e-7, "cn form beta={beta} q={q} x={x}");
                let fnx = f_n(x, q, &tt).unwrap();
                let oh = crate::polyfam::orthonormal_h_sequence(600, x, q);
                let s1: f64 = (0..=600).map(|k| beta.powi(k as i32) * oh[k] * oh[k]).sum();
                let h = eval_sequence(&PolyFamily::QHermite, 500, x, q).unwrap();
                let s2: f64 = (0..=250)
                    .map(|k| beta.powi(k as i32) * h[2 * k] / (q_factorial(k, q) * q_poch(beta, q, k + 1)))
                    .sum();
                assert!((a - (1.0 - beta) * fnx * s1).abs() < 1e-7, "series 1 beta={beta} q={q} x={x}");
                assert!((a - (1.0 - beta) * fnx * s2).abs() < 1e-7, "series 2 beta={beta} q={q} x={x}");
            }
        }
    }

    #[test]
    fn limit_trend_to_classical() {
        let big = TruncationPolicy { term_tol: 1e-12, max_terms: 200_000 };
        let (y, rho) = (0.5, 0.6);
        let err = |q: f64| {
            (0..41)
                .map(|i| {
                    let x = -3.0 + 0.15 * i as f64;
                    (f_cn(x, y, rho, q, &big).unwrap() - f_cn_classical(x, y, rho)).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(0.9), err(0.99), err(0.999));
        assert!(e1 > e2 && e2 > e3 && e3 <= 2e-2, "{e1} {e2} {e3}");
        let g = (0..41)
            .map(|i| {
                let x = -3.0 + 0.15 * i as f64;
                (f_n(x, 0.999, &big).unwrap() - gauss(x, 0.0, 1.0)).abs()
            })
            .fold(0.0, f64::max);
        assert!(g < 2e-2);
    }

    #[test]
    fn closed_form_symmetry() {
        let tt = t();
        let q = 0.55;
        let k = |x, y, r1: f64, r2: f64| {
            (1.0 - r1 * r2) * f_cn(y, x, r1, q, &tt).unwrap() * f_cn(x, y, r2, q, &tt).unwrap()
        };
        for &(x, y, r1, r2) in &[(0.4, -1.2, 0.3, -0.7), (2.1, 0.9, 0.8, 0.5)] {
            let base = k(x, y, r1, r2);
            assert!(close(base, k(y, x, r1, r2), 1e-13));
            assert!(close(base, k(x, y, r2, r1), 1e-13));
        }
    }

    #[test]
    fn f_3d_and_big_n() {
        let tt = t();
        assert_eq!(f_3d(0.1, 5.0, 0.2, 0.3, 0.3, 0.3, 0.5, &tt).unwrap(), 0.0);
        let v = density(&DensityKind::ThreeD { rho12: 0.3, rho23: -0.4, rho13: 0.5 }, &[0.1, -0.3, 0.7], 0.5, &tt)
            .unwrap();
        assert!(v > 0.0);
        // f_bN integrates to one
        for &(a, q) in &[(0.3, 0.5), (-0.7, -0.5), (0.7, 0.0)] {
            let l = 2.0 / (1.0f64 - q).sqrt();
            let m0 = simpson(|x| f_bn(x, a, q, &tt).unwrap(), -l, l, 4000);
            assert!((m0 - 1.0).abs() < 1e-8, "{a} {q} {m0}");
        }
        assert!(matches!(f_bn(0.0, 0.9, -0.5, &tt), Err(Error::Regime(_))));
    }

    #[test]
    fn kind_serialization() {
        let k = DensityKind::CondN { y: 0.5, rho: 0.3 };
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(s, r#"{"kind":"f_CN","y":0.5,"rho":0.3}"#);
    }

    proptest! {
        #[test]
        fn densities_nonnegative(x in -4.0f64..4.0, y in -1.0f64..1.0, p in -0.95f64..0.95, q in -0.9f64..0.9) {
            let tt = t();
            prop_assert!(f_n(x, q, &tt).unwrap() >= 0.0);
            prop_assert!(f_r(x, p, q, &tt).unwrap() >= 0.0);
            prop_assert!(f_cn(x, y, p, q, &tt).unwrap() >= 0.0);
        }
    }
}
