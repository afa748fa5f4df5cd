//! Quotients of exponential polynomials.

use num_complex::Complex64;

use super::coeff::{Coeff, SymConst};
use super::eval::Scaled;
use super::exppoly::ExpPoly;
use crate::error::{Error, Result};

/// `numerator / denominator`, never reduced automatically.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalExpPoly<C = Complex64> {
    pub numerator: ExpPoly<C>,
    pub denominator: ExpPoly<C>,
}

impl<C: Coeff> From<ExpPoly<C>> for RationalExpPoly<C> {
    fn from(f: ExpPoly<C>) -> Self {
        RationalExpPoly { numerator: f, denominator: ExpPoly::one() }
    }
}

impl<C: Coeff> RationalExpPoly<C> {
    pub fn new(numerator: ExpPoly<C>, denominator: ExpPoly<C>) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(RationalExpPoly { numerator, denominator })
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// The numerator divided by a constant denominator, if it is one.
    pub fn as_exppoly(&self) -> Option<ExpPoly<C>> {
        let d = self.denominator.as_constant()?;
        Some(self.numerator.scale(&d.inv()?))
    }

    fn same_den(&self, o: &Self) -> bool {
        self.denominator == o.denominator
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.same_den(o) {
            return RationalExpPoly {
                numerator: self.numerator.add(&o.numerator),
                denominator: self.denominator.clone(),
            };
        }
        RationalExpPoly {
            numerator: self.numerator.mul(&o.denominator).add(&o.numerator.mul(&self.denominator)),
            denominator: self.denominator.mul(&o.denominator),
        }
    }

    pub fn neg(&self) -> Self {
        RationalExpPoly { numerator: self.numerator.neg(), denominator: self.denominator.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        RationalExpPoly {
            numerator: self.numerator.mul(&o.numerator),
            denominator: self.denominator.mul(&o.denominator),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        RationalExpPoly { numerator: self.numerator.scale(c), denominator: self.denominator.clone() }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        Ok(RationalExpPoly {
            numerator: self.numerator.mul(&o.denominator),
            denominator: self.denominator.mul(&o.numerator),
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        RationalExpPoly { numerator: self.numerator.pow(k), denominator: self.denominator.pow(k) }
    }

    /// k-th derivative by the quotient rule.
    pub fn derivative(&self, k: usize) -> Self {
        let mut f = self.clone();
        for _ in 0..k {
            if f.denominator.as_constant().is_some() {
                f = RationalExpPoly { numerator: f.numerator.derivative(1), denominator: f.denominator };
                continue;
            }
            let n = f.numerator.derivative(1).mul(&f.denominator).sub(&f.numerator.mul(&f.denominator.derivative(1)));
            f = RationalExpPoly { numerator: n, denominator: f.denominator.pow(2) };
        }
        f
    }

    pub fn shift(&self, c: &SymConst) -> Result<Self> {
        Ok(RationalExpPoly { numerator: self.numerator.shift(c)?, denominator: self.denominator.shift(c)? })
    }

    pub fn evaluate(&self, z: Complex64) -> Scaled {
        let n = self.numerator.evaluate(z);
        let d = self.denominator.evaluate(z);
        if n.is_zero() {
            return Scaled::ZERO;
        }
        n.div(&d)
    }

    pub fn to_c64(&self) -> RationalExpPoly<Complex64> {
        RationalExpPoly { numerator: self.numerator.to_c64(), denominator: self.denominator.to_c64() }
    }

    pub fn to_expr_string(&self) -> String {
        match self.as_exppoly() {
            Some(f) => f.to_expr_string(),
            None => format!("({})/({})", self.numerator, self.denominator),
        }
    }
}
