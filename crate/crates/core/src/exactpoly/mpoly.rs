use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};

use super::coef::Coef;

pub const NVARS: usize = 10;

/// Variables available to exact polynomials. `H` is a square root of `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Var {
    X,
    Y,
    Q,
    R1,
    R2,
    A,
    B,
    T,
    Beta,
    H,
}

impl Var {
    pub const ALL: [Var; NVARS] = [
        Var::X,
        Var::Y,
        Var::Q,
        Var::R1,
        Var::R2,
        Var::A,
        Var::B,
        Var::T,
        Var::Beta,
        Var::H,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Q => "q",
            Var::R1 => "r1",
            Var::R2 => "r2",
            Var::A => "a",
            Var::B => "b",
            Var::T => "t",
            Var::Beta => "β",
            Var::H => "h",
        }
    }

    fn idx(self) -> usize {
        self as usize
    }
}

type Exps = [u16; NVARS];

/// Sparse polynomial with rational coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Exps, Coef>,
}

pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(rat(1))
    }

    pub fn int(v: i64) -> Self {
        MPoly::constant(rat(v))
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; NVARS], Coef::from_rat(c));
        }
        MPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        MPoly::monomial(rat(1), &[(v, 1)])
    }

    pub fn monomial(c: BigRational, powers: &[(Var, u16)]) -> Self {
        let mut e = [0u16; NVARS];
        for &(v, k) in powers {
            e[v.idx()] += k;
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, Coef::from_rat(c));
        }
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms as `(powers, coefficient)` with powers listed in `Var::ALL` order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<(Var, u16)>, BigRational)> + '_ {
        self.terms.iter().map(|(e, c)| {
            let p = Var::ALL.iter().filter(|v| e[v.idx()] > 0).map(|&v| (v, e[v.idx()])).collect();
            (p, c.to_rat())
        })
    }

    pub fn degree(&self, v: Var) -> u16 {
        self.terms.keys().map(|e| e[v.idx()]).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<Var> {
        Var::ALL.iter().copied().filter(|&v| self.degree(v) > 0).collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return MPoly::zero();
        }
        let c = Coef::from_rat(c.clone());
        MPoly { terms: self.terms.iter().map(|(e, v)| (*e, v.mul(&c))).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = MPoly::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    fn add_term(terms: &mut BTreeMap<Exps, Coef>, e: Exps, c: Coef) {
        use std::collections::btree_map::Entry;
        match terms.entry(e) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                *o.get_mut() = s;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Coefficient of `v^k`, as a polynomial free of `v`.
    pub fn coeff(&self, v: Var, k: u16) -> Self {
        let i = v.idx();
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] == k)
            .map(|(e, c)| {
                let mut e = *e;
                e[i] = 0;
                (e, c.clone())
            })
            .collect();
        MPoly { terms }
    }

    /// Drops every term whose degree in `v` exceeds `max_deg`.
    pub fn truncate(&self, v: Var, max_deg: u16) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| e[v.idx()] <= max_deg).map(|(e, c)| (*e, c.clone())).collect();
        MPoly { terms }
    }

    /// Replaces `v` by the polynomial `p`.
    pub fn substitute(&self, v: Var, p: &MPoly) -> Self {
        let i = v.idx();
        let deg = self.degree(v) as usize;
        let mut powers = vec![MPoly::one()];
        for k in 1..=deg {
            let next = &powers[k - 1] * p;
            powers.push(next);
        }
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            let mut base = *e;
            base[i] = 0;
            for (pe, pc) in &powers[k].terms {
                let mut ne = base;
                for j in 0..NVARS {
                    ne[j] += pe[j];
                }
                MPoly::add_term(&mut out, ne, c.mul(pc));
            }
        }
        MPoly { terms: out }
    }

    /// Substitutes rational constants for the listed variables.
    pub fn eval(&self, assign: &[(Var, BigRational)]) -> Self {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e = *e;
            let mut c = c.clone();
            for (v, val) in assign {
                let k = e[v.idx()];
                if k > 0 {
                    c = c.mul(&Coef::from_rat(num_traits::pow(val.clone(), k as usize)));
                    e[v.idx()] = 0;
                }
            }
            MPoly::add_term(&mut out, e, c);
        }
        MPoly { terms: out }
    }

    /// The constant value, if no variables remain.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(rat(0)),
            1 => self.terms.get(&[0; NVARS]).map(Coef::to_rat),
            _ => None,
        }
    }

    /// Floating-point evaluation. Variables missing from `assign` evaluate to 0.
    pub fn eval_f64(&self, assign: &[(Var, f64)]) -> f64 {
        let mut vals = [0.0f64; NVARS];
        for &(v, x) in assign {
            vals[v.idx()] = x;
        }
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.to_f64();
                for j in 0..NVARS {
                    if e[j] > 0 {
                        t *= vals[j].powi(e[j] as i32);
                    }
                }
                t
            })
            .sum()
    }

    fn leading(&self) -> Option<(&Exps, &Coef)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (de, dc) = d.leading()?;
        let (de, dc) = (*de, dc.clone());
        let mut rem = self.clone();
        let mut quot = BTreeMap::new();
        while let Some((re, rc)) = rem.leading() {
            let mut e = [0u16; NVARS];
            for j in 0..NVARS {
                if re[j] < de[j] {
                    return None;
                }
                e[j] = re[j] - de[j];
            }
            let c = rc.div(&dc);
            let t = MPoly { terms: BTreeMap::from([(e, c.clone())]) };
            rem = &rem - &(&t * d);
            quot.insert(e, c);
        }
        Some(MPoly { terms: quot })
    }
}

impl From<i64> for MPoly {
    fn from(v: i64) -> Self {
        MPoly::int(v)
    }
}

impl From<Var> for MPoly {
    fn from(v: Var) -> Self {
        MPoly::var(v)
    }
}

impl Add<&MPoly> for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            MPoly::add_term(&mut terms, *e, c.clone());
        }
        MPoly { terms }
    }
}

impl Sub<&MPoly> for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            MPoly::add_term(&mut terms, *e, c.neg());
        }
        MPoly { terms }
    }
}

impl Mul<&MPoly> for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut terms = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let mut e = *e1;
                for j in 0..NVARS {
                    e[j] += e2[j];
                }
                MPoly::add_term(&mut terms, e, c1.mul(c2));
            }
        }
        MPoly { terms }
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $f(self, rhs: MPoly) -> MPoly { (&self).$f(&rhs) }
        }
        impl $tr<&MPoly> for MPoly {
            type Output = MPoly;
            fn $f(self, rhs: &MPoly) -> MPoly { (&self).$f(rhs) }
        }
        impl $tr<MPoly> for &MPoly {
            type Output = MPoly;
            fn $f(self, rhs: MPoly) -> MPoly { self.$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // lowest degree first reads more naturally
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by_key(|(e, _)| (e.iter().map(|&k| k as u32).sum::<u32>(), std::cmp::Reverse(**e)));
        for (i, (e, c)) in items.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono: Vec<String> = Var::ALL
                .iter()
                .filter(|v| e[v.idx()] > 0)
                .map(|v| match e[v.idx()] {
                    1 => v.name().to_string(),
                    k => format!("{}^{}", v.name(), k),
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{a}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Serialize for MPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a() -> MPoly {
        MPoly::var(Var::A)
    }

    #[test]
    fn basic_ops() {
        let p = &MPoly::one() - &a();
        assert_eq!(&p + &MPoly::zero(), p);
        let prod = (&MPoly::one() - &a()) * (&MPoly::one() + &a());
        assert_eq!(prod, &MPoly::one() - &a().pow(2));
        assert_eq!(prod.to_string(), "1 - a^2");
        let q = MPoly::var(Var::Q);
        let br = &(&MPoly::one() + &q) + &q.pow(2);
        assert_eq!(br.eval(&[(Var::Q, rat(1))]), MPoly::int(3));
        assert_eq!(br.substitute(Var::Q, &MPoly::one()), MPoly::int(3));
    }

    #[test]
    fn exact_division() {
        let x = MPoly::var(Var::X);
        let y = MPoly::var(Var::Y);
        let f = &x + &y;
        let g = &x - &(&y * &y);
        let p = &f * &g;
        assert_eq!(p.div_exact(&f), Some(g.clone()));
        assert_eq!(p.div_exact(&g), Some(f.clone()));
        assert_eq!((&p + &MPoly::one()).div_exact(&f), None);
    }

    fn small_poly() -> impl Strategy<Value = MPoly> {
        prop::collection::vec((-3i64..=3, 0u16..3, 0u16..3, 0u16..2), 0..5).prop_map(|ts| {
            ts.into_iter().fold(MPoly::zero(), |acc, (c, i, j, k)| {
                &acc + &MPoly::monomial(rat(c), &[(Var::X, i), (Var::Q, j), (Var::R1, k)])
            })
        })
    }

    proptest! {
        #[test]
        fn ring_laws(p in small_poly(), q in small_poly(), r in small_poly()) {
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert!((&p - &p).is_zero());
            if !q.is_zero() {
                prop_assert_eq!((&p * &q).div_exact(&q), Some(p.clone()));
            }
        }
    }
}
