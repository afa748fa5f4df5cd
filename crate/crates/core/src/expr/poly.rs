//! Dense univariate polynomials in `z`.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::coeff::Coeff;

/// Coefficients indexed by degree; the zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<C = Complex64> {
    coeffs: Vec<C>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    /// The monomial `c z^k`.
    pub fn monomial(c: C, k: usize) -> Self {
        let mut v = vec![C::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn z() -> Self {
        Self::monomial(C::one(), 1)
    }

    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|k| {
                let a = self.coeff(k);
                let b = o.coeff(k);
                let scale = a.magnitude() + b.magnitude();
                (a + b).cleanup(scale)
            })
            .collect();
        Self::new(v)
    }

    pub fn neg(&self) -> Self {
        Polynomial { coeffs: self.coeffs.iter().cloned().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut acc = vec![C::zero(); n];
        let mut mag = vec![0.0f64; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let p = a.clone() * b.clone();
                if !C::EXACT {
                    mag[i + j] += p.magnitude();
                }
                acc[i + j] = acc[i + j].clone() + p;
            }
        }
        let v = acc.into_iter().zip(mag).map(|(c, m)| c.cleanup(m)).collect();
        Self::new(v)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * C::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, z: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z.clone() + c.clone();
        }
        acc
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_c64();
        }
        acc
    }

    /// `p(z + c)` by repeated synthetic division (Taylor shift).
    pub fn taylor_shift(&self, c: &C) -> Self {
        if c.is_zero() || self.coeffs.len() <= 1 {
            return self.clone();
        }
        let mut a = self.coeffs.clone();
        let n = a.len();
        let mut mag: Vec<f64> = a.iter().map(|x| x.magnitude()).collect();
        let cm = c.magnitude();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let t = a[k + 1].clone() * c.clone();
                if !C::EXACT {
                    mag[k] += mag[k + 1] * cm;
                }
                a[k] = a[k].clone() + t;
            }
        }
        Self::new(a.into_iter().zip(mag).map(|(x, m)| x.cleanup(m)).collect())
    }

    /// Polynomial with the constant term removed.
    pub fn without_constant(&self) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let mut v = self.coeffs.clone();
        v[0] = C::zero();
        Self::new(v)
    }

    /// Coefficientwise tolerance comparison (exact for exact coefficients).
    pub fn matches(&self, o: &Self) -> bool {
        let n = self.coeffs.len().max(o.coeffs.len());
        (0..n).all(|k| self.coeff(k).matches(&o.coeff(k)))
    }

    /// Canonical ordering: degree, then coefficients from z^1 upward.
    pub fn order_key(&self, o: &Self) -> Ordering {
        self.coeffs.len().cmp(&o.coeffs.len()).then_with(|| {
            for k in 0..self.coeffs.len() {
                let c = self.coeffs[k].order_key(&o.coeffs[k]);
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }

    /// Division with remainder. Fails only when the divisor is zero.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dl = d.lead()?.inv()?;
        let dn = d.coeffs.len();
        let mut r = self.coeffs.clone();
        if r.len() < dn {
            return Some((Self::zero(), self.clone()));
        }
        let mut q = vec![C::zero(); r.len() - dn + 1];
        for k in (0..q.len()).rev() {
            let c = r[k + dn - 1].clone() * dl.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let scale = r[k + j].magnitude() + (c.clone() * dc.clone()).magnitude();
                r[k + j] = (r[k + j].clone() - c.clone() * dc.clone()).cleanup(scale);
            }
            r[k + dn - 1] = C::zero();
            q[k] = c;
        }
        Some((Self::new(q), Self::new(r)))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_c64(&self) -> Polynomial<Complex64> {
        self.map(|c| c.to_c64())
    }

    /// Printable form in the expression grammar.
    pub fn literal(&self) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let zp = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{}", k),
            };
            let lit = c.literal();
            parts.push(if k == 0 {
                lit
            } else if lit == "1" {
                zp
            } else {
                format!("{}*{}", lit, zp)
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl<C: Coeff> Polynomial<C> {
    /// Monic greatest common divisor (exact arithmetic only gives reliable results).
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        match a.lead().and_then(|l| l.inv()) {
            Some(li) => a.scale(&li),
            None => a,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::coeff::GaussRational;

    fn p(v: &[i64]) -> Polynomial<GaussRational> {
        Polynomial::new(v.iter().map(|&x| GaussRational::from_i64(x)).collect())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(a.mul(&b), p(&[-1, 0, 1]));
        assert_eq!(a.sub(&a), Polynomial::zero());
        assert_eq!(p(&[0, 0, 3]).derivative(), p(&[0, 6]));
    }

    #[test]
    fn shift_and_division() {
        let a = p(&[0, 0, 1]);
        assert_eq!(a.taylor_shift(&GaussRational::from_i64(2)), p(&[4, 4, 1]));
        let (q, r) = p(&[-1, 0, 1]).div_rem(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[1, 2, 1])), p(&[1, 1]));
    }
}
