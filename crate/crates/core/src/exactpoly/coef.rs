use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Rational coefficient with an allocation-free path for machine-size integers.
/// Canonical: `Rat` only holds values that are not integers fitting in `i128`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Coef {
    Int(i128),
    Rat(BigRational),
}

impl Coef {
    pub fn from_rat(r: BigRational) -> Coef {
        if r.is_integer() {
            if let Some(v) = r.to_integer().to_i128() {
                return Coef::Int(v);
            }
        }
        Coef::Rat(r)
    }

    pub fn to_rat(&self) -> BigRational {
        match self {
            Coef::Int(v) => BigRational::from_integer(BigInt::from(*v)),
            Coef::Rat(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coef::Int(0))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coef::Int(v) => *v < 0,
            Coef::Rat(r) => r.is_negative(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coef::Int(v) => *v as f64,
            Coef::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn add(&self, o: &Coef) -> Coef {
        if let (Coef::Int(a), Coef::Int(b)) = (self, o) {
            if let Some(v) = a.checked_add(*b) {
                return Coef::Int(v);
            }
        }
        Coef::from_rat(self.to_rat() + o.to_rat())
    }

    pub fn mul(&self, o: &Coef) -> Coef {
        if let (Coef::Int(a), Coef::Int(b)) = (self, o) {
            if let Some(v) = a.checked_mul(*b) {
                return Coef::Int(v);
            }
        }
        Coef::from_rat(self.to_rat() * o.to_rat())
    }

    pub fn neg(&self) -> Coef {
        match self {
            Coef::Int(a) => match a.checked_neg() {
                Some(v) => Coef::Int(v),
                None => Coef::from_rat(-self.to_rat()),
            },
            Coef::Rat(r) => Coef::from_rat(-r),
        }
    }

    /// Panics on division by zero.
    pub fn div(&self, o: &Coef) -> Coef {
        if let (Coef::Int(a), Coef::Int(b)) = (self, o) {
            if a.checked_rem(*b) == Some(0) {
                if let Some(v) = a.checked_div(*b) {
                    return Coef::Int(v);
                }
            }
        }
        assert!(!o.is_zero(), "coefficient division by zero");
        Coef::from_rat(self.to_rat() / o.to_rat())
    }

    pub fn abs(&self) -> Coef {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Coef::Int(1))
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Int(v) => write!(f, "{v}"),
            Coef::Rat(r) => write!(f, "{r}"),
        }
    }
}
