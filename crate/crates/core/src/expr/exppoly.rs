//! Canonical sums of terms `P(z) e^{Q(z)}`.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::coeff::{Coeff, SymConst};
use super::poly::Polynomial;
use crate::error::{Error, Result};

/// One term `multiplier(z) · e^{exponent(z)}` with `exponent(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm<C = Complex64> {
    pub multiplier: Polynomial<C>,
    pub exponent: Polynomial<C>,
}

impl<C: Coeff> ExpTerm<C> {
    pub fn new(multiplier: Polynomial<C>, exponent: Polynomial<C>) -> Self {
        ExpTerm { multiplier, exponent }
    }

    /// `c e^{w z}`.
    pub fn exponential(c: C, w: C) -> Self {
        ExpTerm::new(Polynomial::constant(c), Polynomial::monomial(w, 1))
    }

    pub fn degree(&self) -> usize {
        self.exponent.deg0()
    }
}

/// Finite sum of terms with pairwise distinct exponents in canonical order.
/// The empty sum is the only representation of zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly<C = Complex64> {
    terms: Vec<ExpTerm<C>>,
}

impl<C: Coeff> Default for ExpPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

/// Merge terms with matching exponents, drop zero multipliers and sort.
/// Constant exponent parts are folded into multipliers; in exact mode a
/// nonzero constant exponent cannot be folded and raises `NotRepresentable`.
pub fn canonicalize<C: Coeff>(raw: Vec<ExpTerm<C>>) -> Result<ExpPoly<C>> {
    let mut groups: Vec<(Polynomial<C>, Vec<Polynomial<C>>)> = Vec::new();
    for t in raw {
        if t.multiplier.is_zero() {
            continue;
        }
        let c0 = t.exponent.coeff(0);
        let mut mult = t.multiplier;
        let exponent = if c0.is_zero() {
            t.exponent
        } else {
            let f = c0
                .exp()
                .ok_or_else(|| Error::NotRepresentable(format!("exp({})", c0.literal())))?;
            mult = mult.scale(&f);
            t.exponent.without_constant()
        };
        match groups.iter_mut().find(|(e, _)| e.matches(&exponent)) {
            Some((_, ms)) => ms.push(mult),
            None => groups.push((exponent, vec![mult])),
        }
    }
    let mut terms = Vec::with_capacity(groups.len());
    for (exponent, ms) in groups {
        let multiplier = sum_polys(&ms);
        if !multiplier.is_zero() {
            terms.push(ExpTerm { multiplier, exponent });
        }
    }
    terms.sort_by(|a, b| a.exponent.order_key(&b.exponent));
    Ok(ExpPoly { terms })
}

/// Sum with cancellation cleanup measured against the total magnitude.
fn sum_polys<C: Coeff>(ms: &[Polynomial<C>]) -> Polynomial<C> {
    if ms.len() == 1 {
        return ms[0].clone();
    }
    let n = ms.iter().map(|m| m.coeffs().len()).max().unwrap_or(0);
    let mut v = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = C::zero();
        let mut mag = 0.0;
        for m in ms {
            let c = m.coeff(k);
            if !C::EXACT {
                mag += c.magnitude();
            }
            acc = acc + c;
        }
        v.push(acc.cleanup(mag));
    }
    Polynomial::new(v)
}

impl<C: Coeff> ExpPoly<C> {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    pub fn from_polynomial(p: Polynomial<C>) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        ExpPoly { terms: vec![ExpTerm::new(p, Polynomial::zero())] }
    }

    /// `c e^{w z}`.
    pub fn exponential(c: C, w: C) -> Self {
        Self::from_terms(vec![ExpTerm::exponential(c, w)]).expect("zero constant exponent")
    }

    /// `e^{Q(z)}` for `Q` without constant term.
    pub fn exp_of(q: Polynomial<C>) -> Result<Self> {
        Self::from_terms(vec![ExpTerm::new(Polynomial::one(), q)])
    }

    pub fn z() -> Self {
        Self::from_polynomial(Polynomial::z())
    }

    pub fn from_terms(raw: Vec<ExpTerm<C>>) -> Result<Self> {
        canonicalize(raw)
    }

    fn build(raw: Vec<ExpTerm<C>>) -> Self {
        // Exponents produced by ring operations have zero constant term.
        canonicalize(raw).expect("exponents without constant term")
    }

    pub fn terms(&self) -> &[ExpTerm<C>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum exponent degree; 0 for polynomials and for zero.
    pub fn order(&self) -> usize {
        self.terms.iter().map(|t| t.degree()).max().unwrap_or(0)
    }

    /// True when every exponent is constant (an ordinary polynomial).
    pub fn as_polynomial(&self) -> Option<Polynomial<C>> {
        match self.terms.as_slice() {
            [] => Some(Polynomial::zero()),
            [t] if t.exponent.is_zero() => Some(t.multiplier.clone()),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<C> {
        self.as_polynomial().filter(|p| p.is_constant()).map(|p| p.coeff(0))
    }

    /// True when all multipliers are constants.
    pub fn has_constant_multipliers(&self) -> bool {
        self.terms.iter().all(|t| t.multiplier.is_constant())
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut raw = self.terms.clone();
        raw.extend(o.terms.iter().cloned());
        Self::build(raw)
    }

    pub fn neg(&self) -> Self {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| ExpTerm::new(t.multiplier.neg(), t.exponent.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| ExpTerm::new(t.multiplier.scale(c), t.exponent.clone()))
                .collect(),
        }
    }

    pub fn mul_term(&self, t: &ExpTerm<C>) -> Self {
        let raw = self
            .terms
            .iter()
            .map(|s| ExpTerm::new(s.multiplier.mul(&t.multiplier), s.exponent.add(&t.exponent)))
            .collect();
        Self::build(raw)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut raw = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                raw.push(ExpTerm::new(a.multiplier.mul(&b.multiplier), a.exponent.add(&b.exponent)));
            }
        }
        Self::build(raw)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// k-th derivative via `(P e^Q)' = (P' + P Q') e^Q`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut f = self.clone();
        for _ in 0..k {
            let raw = f
                .terms
                .iter()
                .map(|t| {
                    let m = t.multiplier.derivative().add(&t.multiplier.mul(&t.exponent.derivative()));
                    ExpTerm::new(m, t.exponent.clone())
                })
                .collect();
            f = Self::build(raw);
        }
        f
    }

    /// `f(z + c)` for a coefficient-valued shift. In exact mode a nonzero
    /// constant `Q(c)` is not representable.
    pub fn shift_value(&self, c: &C) -> Result<Self> {
        let mut raw = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            raw.push(ExpTerm::new(t.multiplier.taylor_shift(c), t.exponent.taylor_shift(c)));
        }
        canonicalize(raw)
    }

    /// `f(z + c)` for a symbolic constant, exact whenever the constant
    /// factors `e^{Q(c)}` are representable.
    pub fn shift(&self, c: &SymConst) -> Result<Self> {
        if c.is_zero() {
            return Ok(self.clone());
        }
        let cc = C::from_const(c);
        let mut raw = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let deg_q = t.exponent.deg0();
            let needs_value = !t.multiplier.is_constant() || deg_q >= 2;
            let (mult, expo) = if needs_value {
                let cv = cc.clone().ok_or_else(|| {
                    Error::NotRepresentable("shift of a polynomial by a transcendental constant".into())
                })?;
                (t.multiplier.taylor_shift(&cv), t.exponent.taylor_shift(&cv))
            } else {
                (t.multiplier.clone(), t.exponent.clone())
            };
            // Constant factor e^{Q(c)} = e^{a1 c} · e^{rest}
            let a1 = t.exponent.coeff(1);
            let mut factor = C::exp_times_const(&a1, c)
                .ok_or_else(|| Error::NotRepresentable("exponential of shift constant".into()))?;
            if deg_q >= 2 {
                let cv = cc.clone().expect("checked above");
                let rest = expo.coeff(0) - a1.clone() * cv;
                let fr = rest
                    .exp()
                    .ok_or_else(|| Error::NotRepresentable(format!("exp({})", rest.literal())))?;
                factor = factor * fr;
            }
            raw.push(ExpTerm::new(mult.scale(&factor), expo.without_constant()));
        }
        canonicalize(raw)
    }

    /// Approximate equality: zero difference after canonicalization.
    pub fn matches(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// Equality within a relative coefficient tolerance (float helpers).
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        let d = self.sub(o);
        let scale = self.max_coeff().max(o.max_coeff()).max(1e-300);
        d.max_coeff() <= tol * scale
    }

    /// Largest coefficient magnitude across all multipliers.
    pub fn max_coeff(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.multiplier.coeffs().iter().map(|c| c.magnitude()))
            .fold(0.0, f64::max)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Result<ExpPoly<D>> {
        let raw = self
            .terms
            .iter()
            .map(|t| ExpTerm::new(t.multiplier.map(&f), t.exponent.map(&f)))
            .collect();
        canonicalize(raw)
    }

    pub fn to_c64(&self) -> ExpPoly<Complex64> {
        self.map(|c| c.to_c64()).expect("float canonicalization is infallible")
    }

    /// Printable form in the expression grammar; re-parses to an equal value.
    pub fn to_expr_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let m = t.multiplier.literal();
                let m_wrapped = if t.multiplier.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                    format!("({})", m)
                } else {
                    m
                };
                if t.exponent.is_zero() {
                    m_wrapped
                } else if m_wrapped == "1" {
                    format!("exp({})", t.exponent.literal())
                } else {
                    format!("{}*exp({})", m_wrapped, t.exponent.literal())
                }
            })
            .collect();
        parts.join(" + ")
    }

    /// Leading coefficient of each term's exponent at a given degree.
    pub fn frequencies_at(&self, q: usize) -> Vec<C> {
        self.terms
            .iter()
            .filter(|t| t.degree() == q)
            .map(|t| t.exponent.coeff(q))
            .collect()
    }

    pub fn compare(&self, o: &Self) -> Ordering {
        self.terms.len().cmp(&o.terms.len())
    }
}

/// Serialized as its expression text.
impl<C: Coeff> serde::Serialize for ExpPoly<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_expr_string())
    }
}

impl<C: Coeff> std::fmt::Display for ExpPoly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::coeff::GaussRational;

    type Q = GaussRational;

    fn ez(w: i64) -> ExpPoly<Q> {
        ExpPoly::exponential(Q::one(), Q::from_i64(w))
    }

    #[test]
    fn canonical_folding_and_merging() {
        let c = Complex64::new(1.0, 0.0);
        let raw = vec![ExpTerm::new(Polynomial::constant(c), Polynomial::new(vec![c, c]))];
        let f = canonicalize(raw).unwrap();
        assert_eq!(f.terms().len(), 1);
        assert!((f.terms()[0].multiplier.coeff(0) - Complex64::new(std::f64::consts::E, 0.0)).norm() < 1e-15);

        let f = ez(1).sub(&ez(1));
        assert!(f.is_zero());

        let i = Complex64::new(0.0, 1.0);
        let raw = vec![
            ExpTerm::exponential(Complex64::new(2.0, 0.0), i),
            ExpTerm::exponential(Complex64::new(3.0, 0.0), i),
            ExpTerm::new(Polynomial::z(), Polynomial::monomial(2.0 * i, 1)),
        ];
        let f = canonicalize(raw).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.terms()[0].multiplier.coeff(0), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn ring_examples() {
        let one = ExpPoly::<Q>::one();
        let a = ez(1).sub(&one);
        let b = ez(1).add(&one);
        assert_eq!(a.mul(&b), ez(2).sub(&one));
        assert_eq!(a.pow(2), a.mul(&a));
    }

    #[test]
    fn derivative_and_shift() {
        let z2 = ExpPoly::<Q>::exp_of(Polynomial::monomial(Q::one(), 2)).unwrap();
        let d = z2.derivative(1);
        assert_eq!(d, z2.mul(&ExpPoly::from_polynomial(Polynomial::monomial(Q::from_i64(2), 1))));
        assert!(ez(1).derivative(1).sub(&ez(1)).is_zero());

        let f = ez(1).sub(&ExpPoly::one());
        let g = f.shift(&SymConst::log(2).neg()).unwrap();
        let expect = ExpPoly::exponential(Q::ratio(1, 2), Q::one()).sub(&ExpPoly::one());
        assert_eq!(g, expect);
        assert_eq!(f.shift(&SymConst::zero()).unwrap(), f);
    }
}
