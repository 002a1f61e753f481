//! Connection and linearization coefficients between the polynomial families.

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, domain, Result};
use crate::polyfam::{eval_sequence, PolyFamily};
use crate::qcore::{q_binomial, q_factorial, q_poch, qpow, support};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffKind {
    CtoC,
    RtoH,
    HtoR,
    PtoH,
    HtoP,
    RRtoR,
    HRtoH,
    HRtoR,
    HHtoH,
}

/// Coefficients `c_k` of an expansion `sum_k c_k p_k(x)` over `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub kind: CoeffKind,
    pub target: PolyFamily,
    pub q: f64,
    /// `(index, coefficient)` pairs, indices increasing.
    pub coeffs: Vec<(usize, f64)>,
}

impl CoeffTable {
    fn new(kind: CoeffKind, target: PolyFamily, q: f64, mut coeffs: Vec<(usize, f64)>) -> Self {
        coeffs.sort_by_key(|c| c.0);
        CoeffTable { kind, target, q, coeffs }
    }

    pub fn max_index(&self) -> usize {
        self.coeffs.iter().map(|c| c.0).max().unwrap_or(0)
    }

    /// Dense coefficient vector of length `max_index + 1`.
    pub fn dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.max_index() + 1];
        for &(i, c) in &self.coeffs {
            v[i] += c;
        }
        v
    }

    /// Evaluate the expansion at `x`.
    pub fn expand(&self, x: f64) -> Result<f64> {
        let p = eval_sequence(&self.target, self.max_index(), x, self.q)?;
        Ok(self.coeffs.iter().map(|&(i, c)| c * p[i]).sum())
    }
}

fn half(n: usize) -> usize {
    n / 2
}

/// `C_n(x|gamma,q)` over `C_{n-2k}(x|beta,q)`.
pub fn cnac_coeffs(n: usize, beta: f64, gamma: f64, q: f64) -> Result<CoeffTable> {
    check_open_unit("beta", beta)?;
    check_open_unit("gamma", gamma)?;
    if beta == 0.0 {
        return domain("beta = 0 is not allowed here; use r_to_h for the q-Hermite basis");
    }
    PolyFamily::UltraC { beta }.validate(q)?;
    let coeffs = (0..=half(n))
        .map(|k| {
            // beta^k (gamma/beta)_k without dividing by beta
            let lead: f64 = (0..k).map(|j| beta - gamma * qpow(q, j as i64)).product();
            let c = lead * q_poch(gamma, q, n - k) * (1.0 - beta * qpow(q, (n - 2 * k) as i64))
                / (q_poch(q, q, k) * q_poch(beta * q, q, n - k) * (1.0 - beta));
            (n - 2 * k, c)
        })
        .collect();
    Ok(CoeffTable::new(CoeffKind::CtoC, PolyFamily::UltraC { beta }, q, coeffs))
}

/// `R_n(x|r,q)` over `H_{n-2k}(x|q)`.
pub fn r_to_h(n: usize, r: f64, q: f64) -> Result<CoeffTable> {
    check_open_unit("r", r)?;
    let coeffs = (0..=half(n))
        .map(|k| {
            let c = q_factorial(n, q) / (q_factorial(k, q) * q_factorial(n - 2 * k, q))
                * qpow(q, (k * k.saturating_sub(1) / 2) as i64)
                * (-r).powi(k as i32)
                * q_poch(r, q, n - k);
            (n - 2 * k, c)
        })
        .collect();
    Ok(CoeffTable::new(CoeffKind::RtoH, PolyFamily::QHermite, q, coeffs))
}

/// `H_n(x|q)` over `R_{n-2k}(x|r,q)`.
pub fn h_to_r(n: usize, r: f64, q: f64) -> Result<CoeffTable> {
    check_open_unit("r", r)?;
    let coeffs = (0..=half(n))
        .map(|k| {
            let c = q_factorial(n, q) * (1.0 - r * qpow(q, (n - 2 * k) as i64))
                / (q_factorial(k, q) * q_factorial(n - 2 * k, q) * (1.0 - r) * q_poch(r * q, q, n - k))
                * r.powi(k as i32);
            (n - 2 * k, c)
        })
        .collect();
    Ok(CoeffTable::new(CoeffKind::HtoR, PolyFamily::UltraR { beta: r }, q, coeffs))
}

fn check_py(y: f64, rho: f64, q: f64) -> Result<()> {
    check_open_unit("rho", rho)?;
    if !support(q)?.contains(y) {
        return domain(format!("y = {y} lies outside S(q)"));
    }
    Ok(())
}

/// `P_n(x|y,rho,q)` over `H_j(x|q)`.
pub fn p_to_h(n: usize, y: f64, rho: f64, q: f64) -> Result<CoeffTable> {
    check_py(y, rho, q)?;
    let b = eval_sequence(&PolyFamily::BPoly, n, y, q)?;
    let coeffs = (0..=n)
        .map(|j| (j, q_binomial(n, j, q) * rho.powi((n - j) as i32) * b[n - j]))
        .collect();
    Ok(CoeffTable::new(CoeffKind::PtoH, PolyFamily::QHermite, q, coeffs))
}

/// `H_n(x|q)` over `P_j(x|y,rho,q)`.
pub fn h_to_p(n: usize, y: f64, rho: f64, q: f64) -> Result<CoeffTable> {
    check_py(y, rho, q)?;
    let h = eval_sequence(&PolyFamily::QHermite, n, y, q)?;
    let coeffs = (0..=n)
        .map(|j| (j, q_binomial(n, j, q) * rho.powi((n - j) as i32) * h[n - j]))
        .collect();
    Ok(CoeffTable::new(CoeffKind::HtoP, PolyFamily::AsChihara { y, rho }, q, coeffs))
}

/// Linearization of a product of two polynomials of degrees `n` and `m`.
///
/// The first factor carries index `n`: `RRtoR` expands `R_n R_m`, `HHtoH`
/// expands `H_n H_m`, and `HRtoH`/`HRtoR` expand `H_n(x|q) R_m(x|r,q)`.
pub fn linearize(kind: CoeffKind, n: usize, m: usize, r: f64, q: f64) -> Result<CoeffTable> {
    check_open_unit("r", r)?;
    if !(q > -1.0 && q <= 1.0) {
        return domain(format!("q = {q} must lie in (-1, 1]"));
    }
    let fac = |k: usize| q_factorial(k, q);
    let qb = |a: usize, b: usize| q_binomial(a, b, q);
    let p = |a: f64, k: usize| q_poch(a, q, k);
    let tri = |k: usize| qpow(q, (k * k.saturating_sub(1) / 2) as i64);
    match kind {
        CoeffKind::HHtoH => {
            let coeffs = (0..=n.min(m)).map(|k| (n + m - 2 * k, qb(n, k) * qb(m, k) * fac(k))).collect();
            Ok(CoeffTable::new(kind, PolyFamily::QHermite, q, coeffs))
        }
        CoeffKind::RRtoR => {
            let coeffs = (0..=n.min(m))
                .map(|k| {
                    let c = qb(m, k) * qb(n, k) * fac(k) * p(r, m - k) * p(r, n - k) * p(r, k)
                        * p(r * r, n + m - k)
                        * (1.0 - r * qpow(q, (n + m - 2 * k) as i64))
                        / ((1.0 - r) * p(r * q, n + m - k) * p(r * r, n + m - 2 * k));
                    (n + m - 2 * k, c)
                })
                .collect();
            Ok(CoeffTable::new(kind, PolyFamily::UltraR { beta: r }, q, coeffs))
        }
        CoeffKind::HRtoH => {
            // H_hm * R_rn written with the R index first in the inner sums
            let (rn, hm) = (m, n);
            let coeffs = (0..=half(rn + hm))
                .map(|s| {
                    if s > rn {
                        return (rn + hm - 2 * s, 0.0);
                    }
                    let inner: f64 = (0..=s)
                        .map(|k| qb(hm, s - k) * qb(rn - s, k) * (-r).powi(k as i32) * tri(k) * p(r, rn - k))
                        .sum();
                    (rn + hm - 2 * s, qb(rn, s) * fac(s) * inner)
                })
                .collect();
            Ok(CoeffTable::new(kind, PolyFamily::QHermite, q, coeffs))
        }
        CoeffKind::HRtoR => {
            let (rn, hm) = (m, n);
            let tot = rn + hm;
            let coeffs = (0..=half(tot))
                .map(|u| {
                    let pre = fac(rn) * fac(hm) * (1.0 - r * qpow(q, (tot - 2 * u) as i64))
                        / (fac(u) * fac(tot - 2 * u) * (1.0 - r));
                    let mid: f64 = (0..=u)
                        .map(|s| {
                            let inner: f64 = (0..=s.min(rn))
                                .map(|k| {
                                    let top = tot - 2 * s;
                                    let bot = (hm + k) as i64 - s as i64;
                                    let b = if bot < 0 { 0.0 } else { qb(top, bot as usize) };
                                    qb(s, k) * b * tri(k) * (-r).powi(k as i32) * p(r, rn - k)
                                })
                                .sum();
                            qb(u, s) * r.powi((u - s) as i32) / p(r * q, tot - u - s) * inner
                        })
                        .sum();
                    (tot - 2 * u, pre * mid)
                })
                .collect();
            Ok(CoeffTable::new(kind, PolyFamily::UltraR { beta: r }, q, coeffs))
        }
        other => domain(format!("{other:?} is not a linearization kind")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossMomentKind {
    /// `int H_n R_m f_N`.
    HrFn,
    /// `int H_n R_m f_R`.
    HrFr,
}

/// Closed-form mixed moments of `H_n(x|q) R_m(x|beta,q)`.
pub fn cross_moment(kind: CrossMomentKind, n: usize, m: usize, beta: f64, q: f64) -> Result<f64> {
    check_open_unit("beta", beta)?;
    let fac = |k: usize| q_factorial(k, q);
    match kind {
        CrossMomentKind::HrFn => {
            if n > m || (n + m) % 2 == 1 {
                return Ok(0.0);
            }
            let k = (m - n) / 2;
            Ok(qpow(q, (k * k.saturating_sub(1) / 2) as i64) * fac(m) * (-beta).powi(k as i32) / fac(k)
                * q_poch(beta, q, (m + n) / 2))
        }
        CrossMomentKind::HrFr => {
            if m > n || (n - m) % 2 == 1 {
                return Ok(0.0);
            }
            let k = (n - m) / 2;
            Ok(beta.powi(k as i32) * q_poch(beta * beta, q, m) * fac(n)
                / (fac(k) * q_poch(beta * q, q, (n + m) / 2)))
        }
    }
}

/// Coefficients `a_n` with `f_N(x|q) = f_R(x|gamma,q) sum_n a_n R_{2n}(x|gamma,q)`.
pub fn fn_over_fr_coeffs(n_terms: usize, gamma: f64, q: f64) -> Result<Vec<f64>> {
    check_open_unit("gamma", gamma)?;
    Ok((0..n_terms)
        .map(|n| {
            (-gamma).powi(n as i32) * qpow(q, (n * n.saturating_sub(1) / 2) as i64) * q_poch(gamma, q, n)
                * (1.0 - gamma * qpow(q, 2 * n as i64))
                / (q_factorial(n, q) * (1.0 - gamma) * q_poch(gamma * gamma, q, 2 * n))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn points(q: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let l = support(q).unwrap().half_width().unwrap_or(4.0).min(4.0);
        (0..5).map(|_| rng.gen_range(-l..l)).collect()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn trivial_tables() {
        let t = cnac_coeffs(5, 0.4, 0.4, 0.3).unwrap();
        assert_eq!(t.coeffs[t.coeffs.len() - 1], (5, 1.0));
        assert!(t.coeffs[..t.coeffs.len() - 1].iter().all(|c| c.1 == 0.0));
        assert_eq!(cnac_coeffs(0, 0.2, -0.5, 0.3).unwrap().coeffs, vec![(0, 1.0)]);
        assert!(cnac_coeffs(3, 0.0, 0.5, 0.3).is_err());
        for n in 0..6 {
            let a = r_to_h(n, 0.0, 0.4).unwrap().dense();
            let b = h_to_r(n, 0.0, 0.4).unwrap().dense();
            let mut id = vec![0.0; n + 1];
            id[n] = 1.0;
            assert_eq!(a, id);
            assert_eq!(b, id);
            assert_eq!(p_to_h(n, 0.5, 0.0, 0.4).unwrap().dense(), id);
            assert_eq!(h_to_p(n, 0.5, 0.0, 0.4).unwrap().dense(), id);
        }
        let hh = linearize(CoeffKind::HHtoH, 1, 1, 0.0, 0.5).unwrap();
        assert_eq!(hh.coeffs, vec![(0, 1.0), (2, 1.0)]);
    }

    #[test]
    fn r2_in_hermite_basis() {
        let (r, q, x) = (0.35, 0.6, 1.3);
        let t = r_to_h(2, r, q).unwrap();
        let expect = q_poch(r, q, 2) * (x * x - 1.0) + (1.0 + q) * (-r) * (1.0 - r);
        assert!((t.expand(x).unwrap() - expect).abs() < 1e-12);
        let r2 = eval_sequence(&PolyFamily::UltraR { beta: r }, 2, x, q).unwrap()[2];
        assert!((t.expand(x).unwrap() - r2).abs() < 1e-12);
    }

    #[test]
    fn p1_in_hermite_basis() {
        let (y, rho, q, x) = (0.8, 0.45, 0.3, -0.6);
        let t = p_to_h(1, y, rho, q).unwrap();
        assert!((t.expand(x).unwrap() - (x - rho * y)).abs() < 1e-12);
    }

    #[test]
    fn tables_reproduce_sources() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let q: f64 = rng.gen_range(-0.9..0.9);
            let r: f64 = rng.gen_range(-0.9..0.9);
            let beta: f64 = rng.gen_range(0.05..0.9) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let gamma: f64 = rng.gen_range(-0.9..0.9);
            let l = support(q).unwrap().half_width().unwrap_or(4.0);
            let y: f64 = rng.gen_range(-l..l);
            let xs = points(q, &mut rng);
            for n in 0..=8 {
                for &x in &xs {
                    let h = eval_sequence(&PolyFamily::QHermite, 16, x, q).unwrap();
                    let rr = eval_sequence(&PolyFamily::UltraR { beta: r }, 16, x, q).unwrap();
                    let c = eval_sequence(&PolyFamily::UltraC { beta: gamma }, n, x * (1.0 - q).sqrt() / 2.0, q)
                        .unwrap();
                    let p = eval_sequence(&PolyFamily::AsChihara { y, rho: r }, n, x, q).unwrap();
                    assert!(close(r_to_h(n, r, q).unwrap().expand(x).unwrap(), rr[n], 1e-10));
                    assert!(close(h_to_r(n, r, q).unwrap().expand(x).unwrap(), h[n], 1e-10));
                    assert!(close(p_to_h(n, y, r, q).unwrap().expand(x).unwrap(), p[n], 1e-10));
                    assert!(close(h_to_p(n, y, r, q).unwrap().expand(x).unwrap(), h[n], 1e-10));
                    let z = x * (1.0 - q).sqrt() / 2.0;
                    assert!(close(cnac_coeffs(n, beta, gamma, q).unwrap().expand(z).unwrap(), c[n], 1e-10));
                    for m in 0..=8 {
                        let rr_t = linearize(CoeffKind::RRtoR, n, m, r, q).unwrap();
                        assert!(close(rr_t.expand(x).unwrap(), rr[n] * rr[m], 1e-10), "RR n={n} m={m}");
                        let hh = linearize(CoeffKind::HHtoH, n, m, r, q).unwrap();
                        assert!(close(hh.expand(x).unwrap(), h[n] * h[m], 1e-10));
                        let hrh = linearize(CoeffKind::HRtoH, n, m, r, q).unwrap();
                        assert!(close(hrh.expand(x).unwrap(), h[n] * rr[m], 1e-10), "HRH n={n} m={m}");
                        let hrr = linearize(CoeffKind::HRtoR, n, m, r, q).unwrap();
                        assert!(close(hrr.expand(x).unwrap(), h[n] * rr[m], 1e-10), "HRR n={n} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn round_trips() {
        let (q, r, y) = (0.45, -0.6, 1.1);
        for n in 0..=8 {
            // compose the dense matrices: H_n -> R_k -> H_j must be the identity
            let forward = h_to_r(n, r, q).unwrap();
            let mut acc = vec![0.0; n + 1];
            for &(k, c) in &forward.coeffs {
                for &(j, d) in &r_to_h(k, r, q).unwrap().coeffs {
                    acc[j] += c * d;
                }
            }
            for (j, v) in acc.iter().enumerate() {
                assert!((v - if j == n { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
            let forward = h_to_p(n, y, r, q).unwrap();
            let mut acc = vec![0.0; n + 1];
            for &(k, c) in &forward.coeffs {
                for &(j, d) in &p_to_h(k, y, r, q).unwrap().coeffs {
                    acc[j] += c * d;
                }
            }
            for (j, v) in acc.iter().enumerate() {
                assert!((v - if j == n { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cross_moment_zero_cases() {
        assert_eq!(cross_moment(CrossMomentKind::HrFn, 0, 0, 0.3, 0.5).unwrap(), 1.0);
        assert_eq!(cross_moment(CrossMomentKind::HrFn, 3, 1, 0.3, 0.5).unwrap(), 0.0);
        assert_eq!(cross_moment(CrossMomentKind::HrFn, 1, 2, 0.3, 0.5).unwrap(), 0.0);
        assert_eq!(cross_moment(CrossMomentKind::HrFr, 1, 3, 0.3, 0.5).unwrap(), 0.0);
        assert_eq!(cross_moment(CrossMomentKind::HrFr, 0, 0, 0.3, 0.5).unwrap(), 1.0);
        // m = n: int H_n R_n f_N = [n]! (beta)_n, the R_n leading coefficient times the H norm
        let v = cross_moment(CrossMomentKind::HrFn, 3, 3, 0.3, 0.5).unwrap();
        assert!((v - q_factorial(3, 0.5) * q_poch(0.3, 0.5, 3)).abs() < 1e-14);
    }

    #[test]
    fn hr_fn_from_expansion() {
        // int H_n R_m f_N picks the H_n coefficient of R_m times [n]!
        for (n, m) in [(0, 2), (1, 3), (2, 4), (0, 4), (2, 2)] {
            let (beta, q) = (0.45, -0.3);
            let t = r_to_h(m, beta, q).unwrap();
            let c = t.coeffs.iter().find(|c| c.0 == n).map(|c| c.1).unwrap_or(0.0);
            let v = cross_moment(CrossMomentKind::HrFn, n, m, beta, q).unwrap();
            assert!((c * q_factorial(n, q) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn fn_over_fr_first_terms() {
        let c = fn_over_fr_coeffs(3, 0.5, 0.2).unwrap();
        assert_eq!(c[0], 1.0);
        let expect = -0.5 * 0.5 * (1.0 - 0.5 * 0.04) / (0.5 * (1.0 - 0.25) * (1.0 - 0.25 * 0.2));
        assert!((c[1] - expect).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn rrtor_is_symmetric(n in 0usize..7, m in 0usize..7, r in -0.9f64..0.9, q in -0.9f64..0.9) {
            let a = linearize(CoeffKind::RRtoR, n, m, r, q).unwrap().dense();
            let b = linearize(CoeffKind::RRtoR, m, n, r, q).unwrap().dense();
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
            }
        }
    }
}
