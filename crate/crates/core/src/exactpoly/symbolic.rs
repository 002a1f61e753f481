use serde::{Deserialize, Serialize};

use super::mpoly::{rat, MPoly, Var};
use super::ratfn::RationalFn;
use crate::error::{Error, Result};

/// Largest index unrolled symbolically.
pub const MAX_UNROLL: usize = 12;

pub fn q() -> MPoly {
    MPoly::var(Var::Q)
}

pub fn q_pow_sym(k: usize) -> MPoly {
    MPoly::monomial(rat(1), &[(Var::Q, k as u16)])
}

/// `[n]_q = 1 + q + ... + q^{n-1}`.
pub fn qbracket_sym(n: usize) -> MPoly {
    (0..n).fold(MPoly::zero(), |acc, k| &acc + &q_pow_sym(k))
}

pub fn qfactorial_sym(n: usize) -> MPoly {
    (1..=n).fold(MPoly::one(), |acc, k| &acc * &qbracket_sym(k))
}

/// `(base)_n = prod_{j<n} (1 - base q_var^j)`.
pub fn poch_sym(base: &MPoly, q_var: Var, n: usize) -> MPoly {
    let mut out = MPoly::one();
    for j in 0..n {
        let qj = MPoly::monomial(rat(1), &[(q_var, j as u16)]);
        out = &out * &(&MPoly::one() - &(base * &qj));
    }
    out
}

/// `(base q^shift)_n` in the variable `q`.
pub fn poch_shift(base: &MPoly, shift: usize, n: usize) -> MPoly {
    poch_sym(&(base * &q_pow_sym(shift)), Var::Q, n)
}

/// Gaussian binomial as a polynomial in `q`, zero outside `0..=n`.
pub fn qbinom_poly(n: usize, k: usize) -> MPoly {
    if k > n {
        return MPoly::zero();
    }
    let mut row = vec![MPoly::one()];
    for i in 1..=n {
        let mut next = vec![MPoly::one(); i + 1];
        for s in 1..i {
            next[s] = &row[s - 1] + &(&q_pow_sym(s) * &row[s]);
        }
        row = next;
    }
    row.swap_remove(k)
}

/// Gaussian binomial as the ratio `[n]! / ([k]! [n-k]!)`.
pub fn qbinom_rf(n: usize, k: usize) -> RationalFn {
    if k > n {
        return RationalFn::poly(MPoly::zero());
    }
    RationalFn { num: qfactorial_sym(n), den: &qfactorial_sym(k) * &qfactorial_sym(n - k) }
}

/// `q^{k(k-1)/2}`.
pub fn q_tri(k: usize) -> MPoly {
    q_pow_sym(k * k.saturating_sub(1) / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymFamily {
    QHermite,
    UltraR,
    BPoly,
}

/// Polynomials `p_0..=p_n` in `x` (and `β` for `UltraR`) with symbolic `q`.
pub fn sym_family_sequence(fam: SymFamily, n: usize) -> Result<Vec<MPoly>> {
    if n > MAX_UNROLL {
        return Err(Error::Size(format!("n = {n} exceeds the symbolic limit {MAX_UNROLL}")));
    }
    let x = MPoly::var(Var::X);
    let beta = MPoly::var(Var::Beta);
    let one = MPoly::one();
    let mut out = vec![one.clone()];
    for k in 0..n {
        let cur = &out[k];
        let next = match fam {
            SymFamily::QHermite => {
                let mut p = &x * cur;
                if k > 0 {
                    p = &p - &(&qbracket_sym(k) * &out[k - 1]);
                }
                p
            }
            SymFamily::UltraR => {
                let lead = &one - &(&beta * &q_pow_sym(k));
                let mut p = &(&lead * &x) * cur;
                if k > 0 {
                    let g = &(&one - &(&beta.pow(2) * &q_pow_sym(k - 1))) * &qbracket_sym(k);
                    p = &p - &(&g * &out[k - 1]);
                }
                p
            }
            SymFamily::BPoly => {
                let mut p = -&(&(&x * &q_pow_sym(k)) * cur);
                if k > 0 {
                    p = &p + &(&(&q_pow_sym(k - 1) * &qbracket_sym(k)) * &out[k - 1]);
                }
                p
            }
        };
        out.push(next);
    }
    Ok(out)
}

pub fn sym_family(fam: SymFamily, n: usize) -> Result<MPoly> {
    Ok(sym_family_sequence(fam, n)?.pop().expect("non-empty"))
}

/// `w_n(m, r1, r2, q)` for arbitrary polynomial arguments `r1`, `r2`.
pub fn w_sym(n: usize, m: usize, r1: &MPoly, r2: &MPoly) -> MPoly {
    let qm = q_pow_sym(m);
    let a2 = &qm * &(r2 * r2);
    let b2 = &qm * &(r1 * r1);
    (0..=n).fold(MPoly::zero(), |acc, s| {
        let t = &(&(&qbinom_poly(n, s) * &r1.pow(s as u32)) * &poch_sym(&a2, Var::Q, s))
            * &(&r2.pow((n - s) as u32) * &poch_sym(&b2, Var::Q, n - s));
        &acc + &t
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn r(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn spec_examples() {
        let a = MPoly::var(Var::A);
        let expect = &(&(&MPoly::one() - &a) - &(&a * &q())) + &(&a.pow(2) * &q());
        assert_eq!(poch_sym(&a, Var::Q, 2), expect);
        assert_eq!(qbinom_rf(5, 0), RationalFn::poly(MPoly::one()));
        assert_eq!(qbinom_rf(4, 2).eval(&[(Var::Q, r(1))]).unwrap(), RationalFn::poly(MPoly::int(6)));
        assert_eq!(qbracket_sym(3).eval(&[(Var::Q, r(1))]), MPoly::int(3));

        let x = MPoly::var(Var::X);
        let h3 = &x.pow(3) - &(&(&MPoly::int(2) + &q()) * &x);
        assert_eq!(sym_family(SymFamily::QHermite, 3).unwrap(), h3);
        let beta = MPoly::var(Var::Beta);
        assert_eq!(sym_family(SymFamily::UltraR, 1).unwrap(), &(&MPoly::one() - &beta) * &x);
        assert!(matches!(sym_family(SymFamily::UltraR, 13), Err(Error::Size(_))));
    }

    #[test]
    fn gaussian_binomials_are_polynomial() {
        for n in 0..=MAX_UNROLL {
            for k in 0..=n {
                let rf = qbinom_rf(n, k);
                assert_eq!(rf.to_poly(), Some(qbinom_poly(n, k)), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn leading_coefficient_of_r() {
        let beta = MPoly::var(Var::Beta);
        let seq = sym_family_sequence(SymFamily::UltraR, MAX_UNROLL).unwrap();
        for (n, p) in seq.iter().enumerate() {
            assert_eq!(p.coeff(Var::X, n as u16), poch_sym(&beta, Var::Q, n));
            assert_eq!(p.degree(Var::X) as usize, n);
        }
    }
}
