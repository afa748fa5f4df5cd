//! Overflow-free evaluation: values are returned as `mantissa · e^{scale}`.

use num_complex::Complex64;
use serde::Serialize;
use smallvec::SmallVec;

use super::coeff::Coeff;
use super::exppoly::ExpPoly;

/// A complex number `mantissa · e^{scale}` with `|mantissa| ∈ [1, e)` or
/// `mantissa = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scaled {
    pub scale: f64,
    pub mantissa: Complex64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { scale: 0.0, mantissa: Complex64 { re: 0.0, im: 0.0 } };

    /// Normalize `s · e^{base}`.
    pub fn from_parts(base: f64, s: Complex64) -> Scaled {
        let a = s.norm();
        if a == 0.0 || !a.is_finite() {
            return Scaled::ZERO;
        }
        let k = a.ln().floor();
        Scaled { scale: base + k, mantissa: s * (-k).exp() }
    }

    pub fn from_c64(v: Complex64) -> Scaled {
        Self::from_parts(0.0, v)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    /// `ln |value|`; `-inf` at zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.scale + self.mantissa.norm().ln()
        }
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// Plain value; may overflow to infinity or underflow to zero.
    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.mantissa * self.scale.exp()
    }

    pub fn mul(&self, o: &Scaled) -> Scaled {
        Self::from_parts(self.scale + o.scale, self.mantissa * o.mantissa)
    }

    /// `self / o`; `o` must be nonzero.
    pub fn div(&self, o: &Scaled) -> Scaled {
        Self::from_parts(self.scale - o.scale, self.mantissa / o.mantissa)
    }
}

/// Float copy of an exponential polynomial prepared for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Compiled {
    terms: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

/// Value together with the size of the largest individual term, used to
/// detect cancellation near zeros.
#[derive(Clone, Copy, Debug)]
pub struct EvalDetail {
    pub value: Scaled,
    /// `ln Σ_j |P_j(z) e^{Q_j(z)}|`.
    pub ln_abs_sum: f64,
}

impl Compiled {
    pub fn new<C: Coeff>(f: &ExpPoly<C>) -> Self {
        Compiled {
            terms: f
                .terms()
                .iter()
                .map(|t| {
                    (
                        t.multiplier.coeffs().iter().map(|c| c.to_c64()).collect(),
                        t.exponent.coeffs().iter().map(|c| c.to_c64()).collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in c.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    pub fn eval_detail(&self, z: Complex64) -> EvalDetail {
        let mut parts: SmallVec<[(Complex64, f64, f64); 8]> = SmallVec::new();
        let mut m = f64::NEG_INFINITY;
        for (p, q) in &self.terms {
            let pv = Self::horner(p, z);
            let pa = pv.norm();
            if pa == 0.0 {
                continue;
            }
            let qv = Self::horner(q, z);
            let lr = qv.re + pa.ln();
            if lr > m {
                m = lr;
            }
            parts.push((pv / pa, lr, qv.im));
        }
        if parts.is_empty() {
            return EvalDetail { value: Scaled::ZERO, ln_abs_sum: f64::NEG_INFINITY };
        }
        let mut s = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for (unit, lr, im) in parts.iter() {
            let mag = (lr - m).exp();
            abs_sum += mag;
            s += unit * Complex64::from_polar(mag, *im);
        }
        EvalDetail { value: Scaled::from_parts(m, s), ln_abs_sum: m + abs_sum.ln() }
    }

    pub fn eval(&self, z: Complex64) -> Scaled {
        self.eval_detail(z).value
    }
}

impl<C: Coeff> ExpPoly<C> {
    /// Overflow-free value at `z`.
    pub fn evaluate(&self, z: Complex64) -> Scaled {
        Compiled::new(self).eval(z)
    }

    /// Naive direct summation (may overflow).
    pub fn eval_naive(&self, z: Complex64) -> Complex64 {
        self.terms()
            .iter()
            .map(|t| t.multiplier.eval_c64(z) * t.exponent.eval_c64(z).exp())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_exp_at_100() {
        let f = ExpPoly::exponential(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let v = f.evaluate(Complex64::new(100.0, 0.0));
        assert!((v.ln_abs() - 100.0).abs() < 1e-12);
        assert!(v.mantissa.norm() >= 1.0 && v.mantissa.norm() < std::f64::consts::E);
    }

    #[test]
    fn huge_arguments_do_not_overflow() {
        let f = ExpPoly::exponential(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let v = f.evaluate(Complex64::new(1e5, 3.0));
        assert!((v.ln_abs() - 1e5).abs() < 1e-9);
        assert!((v.arg() - 3.0).abs() < 1e-12);
    }
}
