//! The normalized form `F_0 + Σ F_j e^{w_j z^q}`.

use num_complex::Complex64;

use super::coeff::Coeff;
use super::exppoly::{ExpPoly, ExpTerm};
use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Order `q`, distinct leading frequencies `w_j`, multipliers `F_j` of order
/// below `q`, and the tail `F_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedForm<C = Complex64> {
    pub q: usize,
    pub frequencies: Vec<C>,
    pub multipliers: Vec<ExpPoly<C>>,
    pub tail: ExpPoly<C>,
}

impl<C: Coeff> NormalizedForm<C> {
    /// Reassemble `F_0 + Σ F_j e^{w_j z^q}`.
    pub fn reassemble(&self) -> ExpPoly<C> {
        let mut acc = self.tail.clone();
        for (w, f) in self.frequencies.iter().zip(&self.multipliers) {
            let t = ExpTerm::new(Polynomial::one(), Polynomial::monomial(w.clone(), self.q));
            acc = acc.add(&f.mul_term(&t));
        }
        acc
    }

    /// Frequencies as complex doubles.
    pub fn frequencies_c64(&self) -> Vec<Complex64> {
        self.frequencies.iter().map(|w| w.to_c64()).collect()
    }

    pub fn has_tail(&self) -> bool {
        !self.tail.is_zero()
    }

    /// Frequencies with a zero frequency appended when the tail is nonzero.
    pub fn frequencies_with_tail(&self) -> Vec<Complex64> {
        let mut v = self.frequencies_c64();
        if self.has_tail() {
            v.push(Complex64::new(0.0, 0.0));
        }
        v
    }
}

impl<C: Coeff> ExpPoly<C> {
    /// Group the top-order terms by leading frequency.
    pub fn normalize(&self) -> Result<NormalizedForm<C>> {
        let q = self.order();
        if q == 0 {
            return Err(Error::NotTranscendental);
        }
        self.normalize_at(q)
    }

    /// Normalized form relative to a prescribed order `q ≥ order(f)`;
    /// terms of lower degree go to the tail.
    pub fn normalize_at(&self, q: usize) -> Result<NormalizedForm<C>> {
        if q == 0 {
            return Err(Error::NotTranscendental);
        }
        let mut freqs: Vec<C> = Vec::new();
        let mut groups: Vec<Vec<ExpTerm<C>>> = Vec::new();
        let mut tail = Vec::new();
        for t in self.terms() {
            if t.degree() < q {
                tail.push(t.clone());
                continue;
            }
            let w = t.exponent.coeff(q);
            let rest = ExpTerm::new(
                t.multiplier.clone(),
                t.exponent.sub(&Polynomial::monomial(w.clone(), q)),
            );
            match freqs.iter().position(|v| v.matches(&w)) {
                Some(k) => groups[k].push(rest),
                None => {
                    freqs.push(w);
                    groups.push(vec![rest]);
                }
            }
        }
        let multipliers = groups.into_iter().map(ExpPoly::from_terms).collect::<Result<Vec<_>>>()?;
        Ok(NormalizedForm { q, frequencies: freqs, multipliers, tail: ExpPoly::from_terms(tail)? })
    }
}
