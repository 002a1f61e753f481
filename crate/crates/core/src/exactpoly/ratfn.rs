use std::fmt;

use num_rational::BigRational;

use super::mpoly::{MPoly, Var};
use crate::error::{Error, Result};

/// Quotient of two polynomials. No gcd reduction is attempted.
#[derive(Debug, Clone)]
pub struct RationalFn {
    pub num: MPoly,
    pub den: MPoly,
}

impl RationalFn {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Division("rational function with zero denominator".into()));
        }
        Ok(RationalFn { num, den })
    }

    pub fn poly(p: MPoly) -> Self {
        RationalFn { num: p, den: MPoly::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        if self.den == o.den {
            return RationalFn { num: &self.num + &o.num, den: self.den.clone() };
        }
        RationalFn { num: &(&self.num * &o.den) + &(&o.num * &self.den), den: &self.den * &o.den }
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        RationalFn { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn> {
        RationalFn::new(&self.num * &o.den, &self.den * &o.num)
    }

    /// Numerator of `self - other` over the product (or shared) denominator.
    pub fn residual(&self, o: &RationalFn) -> MPoly {
        if self.den == o.den {
            &self.num - &o.num
        } else {
            &(&self.num * &o.den) - &(&o.num * &self.den)
        }
    }

    pub fn equals(&self, o: &RationalFn) -> bool {
        self.residual(o).is_zero()
    }

    /// The polynomial this reduces to, if the denominator divides the numerator.
    pub fn to_poly(&self) -> Option<MPoly> {
        self.num.div_exact(&self.den)
    }

    pub fn substitute(&self, v: Var, p: &MPoly) -> Result<RationalFn> {
        RationalFn::new(self.num.substitute(v, p), self.den.substitute(v, p))
    }

    pub fn eval(&self, assign: &[(Var, BigRational)]) -> Result<RationalFn> {
        RationalFn::new(self.num.eval(assign), self.den.eval(assign))
    }

    pub fn eval_f64(&self, assign: &[(Var, f64)]) -> f64 {
        self.num.eval_f64(assign) / self.den.eval_f64(assign)
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, o: &Self) -> bool {
        self.equals(o)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == MPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
