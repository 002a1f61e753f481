use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::mpoly::{rat, MPoly, Var};
use super::ratfn::RationalFn;
use super::symbolic::{
    poch_shift, poch_sym, q_pow_sym, q_tri, qbinom_poly, qfactorial_sym, sym_family_sequence, w_sym, SymFamily,
    MAX_UNROLL,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityId {
    #[serde(rename = "aux2")]
    Aux2,
    #[serde(rename = "pom1")]
    Pom1,
    #[serde(rename = "skrt")]
    Skrt,
    #[serde(rename = "spec1")]
    Spec1,
    #[serde(rename = "wm_shift")]
    WmShift,
    #[serde(rename = "corollary_i")]
    CorollaryI,
    #[serde(rename = "gamma_phi")]
    GammaPhi,
    #[serde(rename = "dn_equiv")]
    DnEquiv,
    #[serde(rename = "conn_roundtrip")]
    ConnRoundtrip,
    #[serde(rename = "lin_rr")]
    LinRr,
    #[serde(rename = "lin_hr_h")]
    LinHrH,
    #[serde(rename = "lin_hr_r")]
    LinHrR,
    #[serde(rename = "finite_binT")]
    FiniteBinT,
    #[serde(rename = "finite_naw")]
    FiniteNaw,
    #[serde(rename = "special_iii")]
    SpecialIii,
    #[serde(rename = "special_v")]
    SpecialV,
    #[serde(rename = "leading_coeff")]
    LeadingCoeff,
}

impl IdentityId {
    pub const ALL: [IdentityId; 17] = [
        IdentityId::Aux2,
        IdentityId::Pom1,
        IdentityId::Skrt,
        IdentityId::Spec1,
        IdentityId::WmShift,
        IdentityId::CorollaryI,
        IdentityId::GammaPhi,
        IdentityId::DnEquiv,
        IdentityId::ConnRoundtrip,
        IdentityId::LinRr,
        IdentityId::LinHrH,
        IdentityId::LinHrR,
        IdentityId::FiniteBinT,
        IdentityId::FiniteNaw,
        IdentityId::SpecialIii,
        IdentityId::SpecialV,
        IdentityId::LeadingCoeff,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::Aux2 => "aux2",
            IdentityId::Pom1 => "pom1",
            IdentityId::Skrt => "skrt",
            IdentityId::Spec1 => "spec1",
            IdentityId::WmShift => "wm_shift",
            IdentityId::CorollaryI => "corollary_i",
            IdentityId::GammaPhi => "gamma_phi",
            IdentityId::DnEquiv => "dn_equiv",
            IdentityId::ConnRoundtrip => "conn_roundtrip",
            IdentityId::LinRr => "lin_rr",
            IdentityId::LinHrH => "lin_hr_h",
            IdentityId::LinHrR => "lin_hr_r",
            IdentityId::FiniteBinT => "finite_binT",
            IdentityId::FiniteNaw => "finite_naw",
            IdentityId::SpecialIii => "special_iii",
            IdentityId::SpecialV => "special_v",
            IdentityId::LeadingCoeff => "leading_coeff",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown identity `{s}`")))
    }
}

/// Index limits. `n` and `m` bound the identity indices, `unroll` the polynomial degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub n: usize,
    pub m: usize,
    pub unroll: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { n: 6, m: 6, unroll: MAX_UNROLL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Failed,
}

/// One side-by-side comparison within an identity case.
#[derive(Debug, Clone)]
pub struct Form {
    pub label: &'static str,
    pub lhs: RationalFn,
    pub rhs: RationalFn,
}

impl Form {
    fn new(label: &'static str, lhs: RationalFn, rhs: RationalFn) -> Self {
        Form { label, lhs, rhs }
    }

    fn poly(label: &'static str, lhs: MPoly, rhs: MPoly) -> Self {
        Form::new(label, RationalFn::poly(lhs), RationalFn::poly(rhs))
    }

    pub fn residual(&self) -> MPoly {
        self.lhs.residual(&self.rhs)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityRecord {
    pub id: IdentityId,
    pub bounds: Bounds,
    pub cases: usize,
    pub forms: usize,
    pub status: Status,
    pub residual: MPoly,
    pub failing_case: Option<Vec<usize>>,
    pub failing_form: Option<String>,
}

fn v(x: Var) -> MPoly {
    MPoly::var(x)
}

fn one() -> MPoly {
    MPoly::one()
}

fn poch(base: &MPoly, n: usize) -> MPoly {
    poch_sym(base, Var::Q, n)
}

fn signed_pow(p: &MPoly, k: usize) -> MPoly {
    (-p).pow(k as u32)
}

fn rf(num: MPoly, den: MPoly) -> RationalFn {
    RationalFn { num, den }
}

/// `[n]! / ([k]! [n-2k]!)`, which is a polynomial in `q`.
fn fac_ratio(n: usize, k: usize) -> MPoly {
    qfactorial_sym(n)
        .div_exact(&(&qfactorial_sym(k) * &qfactorial_sym(n - 2 * k)))
        .expect("q-multinomial is polynomial")
}

/// Index tuples checked for `id` within `b`.
pub fn identity_cases(id: IdentityId, b: &Bounds) -> Vec<Vec<usize>> {
    use IdentityId::*;
    let single = |lo: usize, hi: usize| (lo..=hi).map(|n| vec![n]).collect::<Vec<_>>();
    let pairs = || (0..=b.n).flat_map(|n| (0..=b.m).map(move |m| vec![n, m])).collect::<Vec<_>>();
    let halves = || (0..=b.n).flat_map(|n| (0..=n / 2).map(move |u| vec![n, u])).collect::<Vec<_>>();
    match id {
        Aux2 | Spec1 | DnEquiv | ConnRoundtrip | FiniteNaw => single(0, b.n),
        Pom1 => single(0, b.m),
        SpecialIii | SpecialV => single(1, b.n),
        LeadingCoeff => single(0, b.unroll),
        Skrt => (0..=b.m).flat_map(|m| (0..=b.n).map(move |t| vec![m, t])).collect(),
        WmShift | LinRr | LinHrH | LinHrR | FiniteBinT => pairs(),
        CorollaryI | GammaPhi => halves(),
    }
}

/// `sum_m [u m] (r2^2)_m (r1 r2 q^{n-u-m+1})_m (r1^2)_m (r1 r2)_m w_{n-2m}(m, r1, r2)`.
fn gamma_numerator(n: usize, u: usize) -> MPoly {
    let (r1, r2) = (v(Var::R1), v(Var::R2));
    let b = &r1 * &r2;
    (0..=u).fold(MPoly::zero(), |acc, m| {
        let t = &(&(&qbinom_poly(u, m) * &poch(&(&r2 * &r2), m)) * &poch_shift(&b, n - u - m + 1, m))
            * &(&(&poch(&(&r1 * &r1), m) * &poch(&b, m)) * &w_sym(n - 2 * m, m, &r1, &r2));
        &acc + &t
    })
}

fn in_y(p: &MPoly) -> MPoly {
    p.substitute(Var::X, &v(Var::Y))
}

/// Builds the comparisons for a single index tuple.
pub fn identity_forms(id: IdentityId, idx: &[usize]) -> Result<Vec<Form>> {
    use IdentityId::*;
    let want = match id {
        Skrt | WmShift | CorollaryI | GammaPhi | LinRr | LinHrH | LinHrR | FiniteBinT => 2,
        _ => 1,
    };
    if idx.len() != want {
        return Err(Error::Arity(format!("{id} takes {want} indices, got {}", idx.len())));
    }
    let (a, bv, t) = (v(Var::A), v(Var::B), v(Var::T));
    let (r1, r2, beta, x) = (v(Var::R1), v(Var::R2), v(Var::Beta), v(Var::X));
    let (r1s, r2s) = (&r1 * &r1, &r2 * &r2);
    let prod = &r1 * &r2;
    let bb = &prod * &prod;
    let forms = match id {
        Aux2 => {
            let n = idx[0];
            let ab = &a * &bv;
            let lhs = (0..=n).fold(MPoly::zero(), |acc, j| {
                let term = &(&(&qbinom_poly(n, j) * &signed_pow(&bv, j)) * &q_tri(j))
                    * &(&poch(&a, j) * &poch_shift(&ab, j, n - j));
                &acc + &term
            });
            vec![Form::poly("statement", lhs, poch(&bv, n))]
        }
        Pom1 => {
            let m = idx[0];
            let statement = (0..=m).fold(RationalFn::poly(MPoly::zero()), |acc, j| {
                let c = &(&qbinom_poly(m, j) * &signed_pow(&one(), m - j)) * &q_tri(m - j);
                let aqj = &a * &q_pow_sym(j);
                acc.add(&rf(&c * &poch(&aqj, m), &one() - &aqj))
            });
            let rhs = if m == 0 { rf(one(), &one() - &a) } else { RationalFn::poly(MPoly::zero()) };
            let mut out = vec![Form::new("statement", statement.clone(), rhs)];
            if m > 0 {
                let proof = (0..=m).fold(MPoly::zero(), |acc, j| {
                    let term = &(&(&qbinom_poly(m, j) * &signed_pow(&one(), j)) * &q_tri(j))
                        * &poch_shift(&a, m - j, m - 1);
                    &acc + &term
                });
                out.push(Form::new("proof_form", statement, RationalFn::poly(proof.clone())));
                out.push(Form::poly("proof_form_zero", proof, MPoly::zero()));
            }
            out
        }
        Skrt => {
            let (m, tt) = (idx[0], idx[1]);
            let den = poch(&bb, tt + 2 * m);
            let lhs = (0..=m).fold(MPoly::zero(), |acc, k| {
                let term = &(&(&qbinom_poly(m, k) * &signed_pow(&r2s, k)) * &q_tri(k))
                    * &(&poch(&r1s, tt + m + k) * &poch_shift(&bb, tt + m + k, m - k));
                &acc + &term
            });
            let rhs = &poch(&r2s, m) * &poch(&r1s, tt + m);
            vec![Form::new("statement", rf(lhs, den.clone()), rf(rhs, den))]
        }
        Spec1 => {
            let n = idx[0];
            let den = poch(&bb, n);
            let lhs = (0..=n).fold(MPoly::zero(), |acc, s| {
                let term = &(&(&qbinom_poly(n, s) * &r1.pow((n - s) as u32)) * &r2.pow(s as u32))
                    * &(&(&poch(&r1s, s) * &poch(&prod, s)) * &poch_shift(&bb, s, n - s));
                &acc + &term
            });
            vec![Form::new("statement", rf(lhs, den.clone()), rf(w_sym(n, 0, &r1, &r2), den))]
        }
        WmShift => {
            let (n, m) = (idx[0], idx[1]);
            let h = v(Var::H);
            let h2 = &h * &h;
            let hm = h.pow(m as u32);
            let shifted = w_sym(n, m, &r1, &r2);
            let lhs = &shifted.substitute(Var::Q, &h2) * &h.pow((n * m) as u32);
            let rhs = w_sym(n, 0, &(&r1 * &hm), &(&r2 * &hm)).substitute(Var::Q, &h2);
            let qm = &prod * &q_pow_sym(m);
            let alt = (0..=n).fold(MPoly::zero(), |acc, s| {
                let term = &(&(&qbinom_poly(n, s) * &r1.pow((n - s) as u32)) * &r2.pow(s as u32))
                    * &(&poch(&qm, s) * &poch(&qm, n - s));
                &acc + &term
            });
            vec![Form::poly("scaling", lhs, rhs), Form::poly("product_form", shifted, alt)]
        }
        CorollaryI => {
            let (n, u) = (idx[0], idx[1]);
            check_half(n, u)?;
            let rhs = &poch_shift(&bb, n - 2 * u, 2 * u) * &w_sym(n - 2 * u, 0, &r1, &r2);
            vec![Form::poly("statement", gamma_numerator(n, u), rhs)]
        }
        GammaPhi => {
            let (n, k) = (idx[0], idx[1]);
            check_half(n, k)?;
            let lhs = rf(gamma_numerator(n, k), poch(&bb, n));
            let rhs = rf(w_sym(n - 2 * k, 0, &r1, &r2), poch(&bb, n - 2 * k));
            vec![Form::new("statement", lhs, rhs)]
        }
        DnEquiv => {
            let n = idx[0];
            let hs: Vec<MPoly> = sym_family_sequence(SymFamily::QHermite, n)?.iter().map(in_y).collect();
            let rs: Vec<MPoly> = sym_family_sequence(SymFamily::UltraR, n)?
                .iter()
                .map(|p| in_y(&p.substitute(Var::Beta, &prod)))
                .collect();
            let outer = poch(&prod, n + 1);
            let den = &outer * &poch(&bb, n);
            let direct = (0..=n).fold(MPoly::zero(), |acc, j| {
                let term = &(&(&qbinom_poly(n, j) * &r1.pow((n - j) as u32)) * &r2.pow(j as u32))
                    * &(&(&poch(&r1s, j) * &hs[n - j]) * &(&rs[j] * &poch_shift(&bb, j, n - j)));
                &acc + &term
            });
            let expanded = (0..=n / 2).fold(MPoly::zero(), |acc, u| {
                let c = &(&fac_ratio(n, u) * &(&one() - &(&prod * &q_pow_sym(n - 2 * u)))) * &prod.pow(u as u32);
                let term = &(&c * &rs[n - 2 * u]) * &(&gamma_numerator(n, u) * &poch_shift(&prod, n - u + 1, u));
                &acc + &term
            });
            vec![Form::new("statement", rf(&direct * &outer, den.clone()), rf(expanded, den))]
        }
        ConnRoundtrip => {
            let n = idx[0];
            let hs = sym_family_sequence(SymFamily::QHermite, n)?;
            let rs = sym_family_sequence(SymFamily::UltraR, n)?;
            let a_c = |j: usize, k: usize| {
                &(&(&fac_ratio(j, k) * &q_tri(k)) * &signed_pow(&beta, k)) * &poch(&beta, j - k)
            };
            let b_num = |j: usize, i: usize| {
                &(&fac_ratio(j, i) * &(&one() - &(&beta * &q_pow_sym(j - 2 * i)))) * &beta.pow(i as u32)
            };
            let r_in_h = (0..=n / 2).fold(MPoly::zero(), |acc, k| &acc + &(&a_c(n, k) * &hs[n - 2 * k]));
            let den = poch(&beta, n + 1);
            let h_in_r = (0..=n / 2).fold(MPoly::zero(), |acc, i| {
                &acc + &(&(&b_num(n, i) * &poch_shift(&beta, n - i + 1, i)) * &rs[n - 2 * i])
            });
            let mut out = vec![
                Form::poly("r_in_h", rs[n].clone(), r_in_h),
                Form::new("h_in_r", RationalFn::poly(hs[n].clone()), rf(h_in_r, den.clone())),
            ];
            for l in 0..=n / 2 {
                let composed = (0..=l).fold(MPoly::zero(), |acc, k| {
                    let (j, i) = (n - 2 * k, l - k);
                    if 2 * i > j {
                        return acc;
                    }
                    &acc + &(&(&a_c(n, k) * &b_num(j, i)) * &poch_shift(&beta, j - i + 1, 2 * k + i))
                });
                let target = if l == 0 { den.clone() } else { MPoly::zero() };
                out.push(Form::new("roundtrip", rf(composed, den.clone()), rf(target, den.clone())));
            }
            out
        }
        LinRr => {
            let (n, m) = (idx[0], idx[1]);
            let rs = sym_family_sequence(SymFamily::UltraR, n + m)?;
            let tot = n + m;
            let den = poch(&beta, tot + 1);
            let rhs = (0..=n.min(m)).fold(MPoly::zero(), |acc, k| {
                let c = &(&(&qbinom_poly(m, k) * &qbinom_poly(n, k)) * &qfactorial_sym(k))
                    * &(&(&poch(&beta, m - k) * &poch(&beta, n - k)) * &poch(&beta, k));
                let c = &(&c * &poch_shift(&(&beta * &beta), tot - 2 * k, k))
                    * &(&(&one() - &(&beta * &q_pow_sym(tot - 2 * k))) * &poch_shift(&beta, tot - k + 1, k));
                &acc + &(&c * &rs[tot - 2 * k])
            });
            vec![Form::new("statement", RationalFn::poly(&rs[n] * &rs[m]), rf(rhs, den))]
        }
        LinHrH => {
            let (n, m) = (idx[0], idx[1]);
            let tot = n + m;
            let hs = sym_family_sequence(SymFamily::QHermite, tot)?;
            let rs = sym_family_sequence(SymFamily::UltraR, m)?;
            let rhs = (0..=m.min(tot / 2)).fold(MPoly::zero(), |acc, s| {
                let inner = (0..=s.min(m - s)).fold(MPoly::zero(), |ac, k| {
                    let t = &(&(&qbinom_poly(n, s - k) * &qbinom_poly(m - s, k)) * &signed_pow(&beta, k))
                        * &(&q_tri(k) * &poch(&beta, m - k));
                    &ac + &t
                });
                let c = &(&qbinom_poly(m, s) * &qfactorial_sym(s)) * &inner;
                &acc + &(&c * &hs[tot - 2 * s])
            });
            vec![Form::poly("statement", &hs[n] * &rs[m], rhs)]
        }
        LinHrR => {
            let (n, m) = (idx[0], idx[1]);
            let tot = n + m;
            let hs = sym_family_sequence(SymFamily::QHermite, n)?;
            let rs = sym_family_sequence(SymFamily::UltraR, tot)?;
            let den = &qbinom_poly(tot, n) * &poch(&beta, tot + 1);
            let rhs = (0..=tot / 2).fold(MPoly::zero(), |acc, u| {
                let pre = &fac_ratio(tot, u) * &(&one() - &(&beta * &q_pow_sym(tot - 2 * u)));
                let mid = (0..=u).fold(MPoly::zero(), |ac, s| {
                    let inner = (0..=s.min(m)).fold(MPoly::zero(), |ai, k| {
                        if n + k < s {
                            return ai;
                        }
                        let t = &(&(&qbinom_poly(s, k) * &qbinom_poly(tot - 2 * s, n + k - s)) * &q_tri(k))
                            * &(&signed_pow(&beta, k) * &poch(&beta, m - k));
                        &ai + &t
                    });
                    let t = &(&(&qbinom_poly(u, s) * &beta.pow((u - s) as u32)) * &inner)
                        * &poch_shift(&beta, tot - u - s + 1, u + s);
                    &ac + &t
                });
                &acc + &(&(&pre * &mid) * &rs[tot - 2 * u])
            });
            vec![Form::new("statement", RationalFn::poly(&hs[n] * &rs[m]), rf(rhs, den))]
        }
        FiniteBinT => {
            let (n, jmax) = (idx[0], idx[1]);
            let series = (0..=jmax).fold(MPoly::zero(), |acc, j| &acc + &(&qbinom_poly(n + j, j) * &t.pow(j as u32)));
            let lhs = (&poch(&t, n + 1) * &series).truncate(Var::T, jmax as u16);
            vec![Form::poly("truncated_series", lhs, one())]
        }
        FiniteNaw => {
            let n = idx[0];
            let rhs = (0..=n).fold(MPoly::zero(), |acc, j| {
                &acc + &(&(&qbinom_poly(n, j) * &q_tri(j)) * &signed_pow(&t, j))
            });
            vec![Form::poly("statement", poch(&t, n), rhs)]
        }
        SpecialIii => {
            let n = idx[0];
            if n == 0 {
                return Err(Error::Index("special_iii holds for n >= 1".into()));
            }
            let r = sym_family_sequence(SymFamily::UltraR, n)?.pop().expect("non-empty");
            let reduced = r.div_exact(&(&one() - &beta)).expect("R_n vanishes at β = 1 for n >= 1");
            let limit = reduced.eval(&[(Var::Beta, rat(1))]);
            let cheb = chebyshev_t(n);
            let one_minus_q = &one() - &v(Var::Q);
            let half = n / 2;
            let num = (0..=half).fold(MPoly::zero(), |acc, i| {
                let j = n - 2 * i;
                let c = num_rational::BigRational::new(&cheb[j] * 2, num_bigint::BigInt::from(1) << j);
                let term = &MPoly::monomial(c, &[(Var::X, j as u16)]) * &one_minus_q.pow((half - i) as u32);
                &acc + &term
            });
            vec![Form::new(
                "limit",
                rf(limit, poch(&v(Var::Q), n - 1)),
                rf(num, one_minus_q.pow(half as u32)),
            )]
        }
        SpecialV => {
            let n = idx[0];
            if n == 0 {
                return Err(Error::Index("special_v holds for n >= 1".into()));
            }
            let r = sym_family_sequence(SymFamily::UltraR, n)?.pop().expect("non-empty");
            let at0 = r.eval(&[(Var::Q, rat(0))]);
            let mut u = vec![one(), x.clone()];
            for k in 1..n {
                let next = &(&x * &u[k]) - &u[k - 1];
                u.push(next);
            }
            let om = &one() - &beta;
            let mut rhs = &om * &u[n];
            if n >= 2 {
                rhs = &rhs - &(&(&beta * &om) * &u[n - 2]);
            }
            vec![Form::poly("q_zero", at0, rhs)]
        }
        LeadingCoeff => {
            let n = idx[0];
            let r = sym_family_sequence(SymFamily::UltraR, n)?.pop().expect("non-empty");
            vec![Form::poly("leading", r.coeff(Var::X, n as u16), poch(&beta, n))]
        }
    };
    Ok(forms)
}

fn check_half(n: usize, u: usize) -> Result<()> {
    if u > n / 2 {
        return Err(Error::Index(format!("index {u} must lie in 0..={}", n / 2)));
    }
    Ok(())
}

/// Integer coefficients of `T_n(z)` in increasing powers of `z`.
fn chebyshev_t(n: usize) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    let mut prev = vec![BigInt::from(1)];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![BigInt::from(0), BigInt::from(1)];
    for _ in 1..n {
        let mut next = vec![BigInt::from(0); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Checks every case and form, returning a record with `Failed` status on the first nonzero residual.
pub fn check_identity(id: IdentityId, bounds: &Bounds) -> Result<IdentityRecord> {
    if bounds.unroll > MAX_UNROLL {
        return Err(Error::Size(format!("unroll bound {} exceeds {MAX_UNROLL}", bounds.unroll)));
    }
    let cases = identity_cases(id, bounds);
    let mut forms = 0;
    for case in &cases {
        for form in identity_forms(id, case)? {
            forms += 1;
            let res = form.residual();
            if !res.is_zero() {
                return Ok(IdentityRecord {
                    id,
                    bounds: *bounds,
                    cases: cases.len(),
                    forms,
                    status: Status::Failed,
                    residual: res,
                    failing_case: Some(case.clone()),
                    failing_form: Some(form.label.to_string()),
                });
            }
        }
    }
    Ok(IdentityRecord {
        id,
        bounds: *bounds,
        cases: cases.len(),
        forms,
        status: Status::Verified,
        residual: MPoly::zero(),
        failing_case: None,
        failing_form: None,
    })
}

/// Like [`check_identity`] but a nonzero residual becomes an error.
pub fn verify_identity(id: IdentityId, bounds: &Bounds) -> Result<IdentityRecord> {
    let rec = check_identity(id, bounds)?;
    match rec.status {
        Status::Verified => Ok(rec),
        Status::Failed => Err(Error::Verification {
            id: format!("{id} {:?} ({})", rec.failing_case.clone().unwrap_or_default(), rec.failing_form.clone().unwrap_or_default()),
            residual: rec.residual.to_string(),
        }),
    }
}
