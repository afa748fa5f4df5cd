//! Partial sums of the zeta function, their thinned and symmetrized
//! variants, and zero-locus checks against the imaginary axis.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero as _};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Compiled, ExpPoly, ExpTerm, Polynomial};
use crate::zerolab::{isolate_zeros, Contour, Zero, ZeroList};

/// `Σ c_q q^{z/2}` over positive rationals `q`. Keys are exact, so `4^{−z}`
/// and `(2^{−z})²` merge by integer identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletSum {
    pub terms: BTreeMap<BigRational, BigInt>,
}

fn ln_rational(q: &BigRational) -> f64 {
    let ln = |n: &BigInt| {
        n.to_f64().filter(|v| v.is_finite()).map(f64::ln).unwrap_or_else(|| {
            // n = m·2^k with m representable
            let bits = n.bits();
            let shift = bits.saturating_sub(900);
            (n >> shift).to_f64().unwrap_or(f64::MAX).ln() + shift as f64 * std::f64::consts::LN_2
        })
    };
    ln(q.numer()) - ln(q.denom())
}

impl DirichletSum {
    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(BigRational::one(), BigInt::one());
        DirichletSum { terms }
    }

    /// `Σ_{n ≤ M} n^{−z}`.
    pub fn partial(m: u64) -> Self {
        let terms = (1..=m).map(|n| (BigRational::new(1.into(), BigInt::from(n) * BigInt::from(n)), BigInt::one()));
        DirichletSum { terms: terms.collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut terms: BTreeMap<BigRational, BigInt> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                *terms.entry(a * b).or_insert_with(BigInt::zero) += x * y;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        DirichletSum { terms }
    }

    /// `z ↦ −z`.
    pub fn reflect(&self) -> Self {
        DirichletSum { terms: self.terms.iter().map(|(q, c)| (q.recip(), c.clone())).collect() }
    }

    /// Multiply by `q^{z/2}`.
    pub fn shift_by(&self, q: &BigRational) -> Self {
        DirichletSum { terms: self.terms.iter().map(|(k, c)| (k * q, c.clone())).collect() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_exppoly(&self) -> Result<ExpPoly> {
        let terms = self
            .terms
            .iter()
            .map(|(q, c)| {
                let coeff = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                let w = Complex64::new(ln_rational(q) / 2.0, 0.0);
                ExpTerm::new(Polynomial::constant(coeff), Polynomial::new(vec![Complex64::new(0.0, 0.0), w]))
            })
            .collect();
        ExpPoly::from_terms(terms)
    }
}

pub fn partial_sum(m: u64) -> Result<ExpPoly> {
    if m < 2 {
        return Err(Error::InvalidInput("M must be at least 2".into()));
    }
    DirichletSum::partial(m).to_exppoly()
}

/// Primes with per-prime caps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThinnedSpec {
    pub primes: Vec<u64>,
    pub caps: Vec<u32>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl ThinnedSpec {
    pub fn new(primes: Vec<u64>, caps: Vec<u32>) -> Result<Self> {
        if primes.is_empty() || primes.len() != caps.len() {
            return Err(Error::InvalidInput("need one cap per prime".into()));
        }
        if !primes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("primes must be strictly increasing".into()));
        }
        if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::InvalidInput(format!("{} is not prime", p)));
        }
        if caps.iter().any(|&n| n == 0) {
            return Err(Error::InvalidInput("caps must be positive".into()));
        }
        Ok(ThinnedSpec { primes, caps })
    }

    /// `(p_j, N_j)` pairs.
    fn pairs(&self) -> impl Iterator<Item = (BigInt, u32)> + '_ {
        self.primes.iter().zip(&self.caps).map(|(&p, &n)| (BigInt::from(p), n))
    }

    /// `Σ N_j log p_j`, the length of the frequency hull of the product.
    pub fn width(&self) -> f64 {
        self.primes.iter().zip(&self.caps).map(|(&p, &n)| n as f64 * (p as f64).ln()).sum()
    }
}

/// `Π_j Σ_{k ≤ N_j} p_j^{−kz}` as an exact sum.
pub fn thinned_dirichlet(spec: &ThinnedSpec) -> DirichletSum {
    spec.pairs().fold(DirichletSum::one(), |acc, (p, n)| {
        let factor = DirichletSum {
            terms: (0..=n).map(|k| (BigRational::new(1.into(), p.pow(2 * k)), BigInt::one())).collect(),
        };
        acc.mul(&factor)
    })
}

/// `Σ n^{−z}` over `n ≤ bound` whose prime factors all lie in `primes`.
pub fn smooth_sum(primes: &[u64], bound: u64) -> DirichletSum {
    let mut ns = vec![1u64];
    for &p in primes {
        let mut more = Vec::new();
        for &n in &ns {
            let mut m = n * p;
            while m <= bound {
                more.push(m);
                m *= p;
            }
        }
        ns.extend(more);
    }
    let terms = ns.into_iter().map(|n| (BigRational::new(1.into(), BigInt::from(n) * BigInt::from(n)), BigInt::one()));
    DirichletSum { terms: terms.collect() }
}

/// The eleven-term sum over the 3-smooth integers up to 24.
pub fn pi24() -> Result<ExpPoly> {
    smooth_sum(&[2, 3], 24).to_exppoly()
}

pub fn thinned_product(spec: &ThinnedSpec) -> Result<ExpPoly> {
    thinned_dirichlet(spec).to_exppoly()
}

/// `Ξ₀(z) = Π_j Σ_k p_j^{(N_j/2 − k) z}`.
pub fn xi0(spec: &ThinnedSpec) -> DirichletSum {
    spec.pairs().fold(DirichletSum::one(), |acc, (p, n)| {
        let factor = DirichletSum {
            terms: (0..=n as i64)
                .map(|k| {
                    let e = n as i64 - 2 * k;
                    let q = if e >= 0 {
                        BigRational::from_integer(p.pow(e as u32))
                    } else {
                        BigRational::new(1.into(), p.pow((-e) as u32))
                    };
                    (q, BigInt::one())
                })
                .collect(),
        };
        acc.mul(&factor)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    /// `Ξ₀(z) = Ξ₀(−z)` as an identity of exact sums.
    pub exact: bool,
    /// `max |Ξ₀(z) − Ξ₀(−z)| / max(1, |Ξ₀(z)|)` over the samples in floating point.
    pub max_deviation: f64,
}

pub fn xi0_symmetry(spec: &ThinnedSpec, samples: &[Complex64]) -> Result<SymmetryReport> {
    let x = xi0(spec);
    let exact = x == x.reflect();
    let cf = Compiled::new(&x.to_exppoly()?);
    let mut dev: f64 = 0.0;
    for &z in samples {
        let a = cf.eval(z).value();
        let b = cf.eval(-z).value();
        dev = dev.max((a - b).norm() / a.norm().max(1.0));
    }
    Ok(SymmetryReport { exact, max_deviation: dev })
}

#[derive(Clone, Debug, Serialize)]
pub struct AxisReport {
    pub on_axis: u64,
    pub off_axis: Vec<Zero>,
    pub zeros: ZeroList,
}

/// Real `x` where `Σ a_k e^{d_k x} = 1`, for positive `a_k` and `d_k` of one sign.
fn crossing(pairs: &[(f64, f64)], sign: f64) -> f64 {
    let g = |x: f64| pairs.iter().map(|&(a, d)| a * (d * x).exp()).sum::<f64>() - 1.0;
    let mut far = sign;
    while g(far) > 0.0 {
        far *= 2.0;
    }
    let mut near = 0.0;
    if g(near) <= 0.0 {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (near + far);
        if g(mid) > 0.0 {
            near = mid;
        } else {
            far = mid;
        }
    }
    far
}

/// Locate the zeros of an exponential sum with real frequencies in the band
/// `|Im z| ≤ y_max` and split them by `|Re z| ≤ tol`.
pub fn axis_zero_check(f: &ExpPoly, y_max: f64, tol: f64) -> Result<AxisReport> {
    let mut pts = Vec::new();
    for t in f.terms() {
        if t.exponent.deg0() > 1 || !t.multiplier.is_constant() {
            return Err(Error::InvalidInput("expected an exponential sum of order 1".into()));
        }
        let w = t.exponent.coeff(1);
        if w.im.abs() > 1e-12 * (1.0 + w.re.abs()) {
            return Err(Error::InvalidInput("frequencies must be real".into()));
        }
        pts.push((t.multiplier.coeff(0).norm(), w.re));
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    if pts.len() < 2 {
        let region = Contour::rectangle(-1.0, 1.0, -y_max, y_max)?;
        return Ok(AxisReport { on_axis: 0, off_axis: vec![], zeros: ZeroList { zeros: vec![], region, certified: true } });
    }
    let (top, bot) = (pts[pts.len() - 1], pts[0]);
    let right: Vec<(f64, f64)> = pts[..pts.len() - 1].iter().map(|&(a, w)| (a / top.0, w - top.1)).collect();
    let left: Vec<(f64, f64)> = pts[1..].iter().map(|&(a, w)| (a / bot.0, w - bot.1)).collect();
    let x2 = crossing(&right, 1.0) + 0.5;
    let x1 = crossing(&left, -1.0) - 0.5;
    let region = Contour::rectangle(x1.min(-1.0), x2.max(1.0), -y_max, y_max)?;
    let zeros = isolate_zeros(f, &region, 1e-12)?;
    let (on, off): (Vec<Zero>, Vec<Zero>) = zeros.zeros.iter().partition(|z| z.re.abs() <= tol);
    Ok(AxisReport { on_axis: on.iter().map(|z| z.multiplicity as u64).sum(), off_axis: off, zeros })
}

/// Zeros of a product of geometric factors with `|Im z| ≤ y_max`, from the
/// closed form `p^{−z} = e^{2πik/(N+1)}`.
pub fn thinned_axis_zeros(spec: &ThinnedSpec, y_max: f64) -> Vec<Complex64> {
    let mut v = Vec::new();
    for (&p, &n) in spec.primes.iter().zip(&spec.caps) {
        let lp = (p as f64).ln();
        // p^{−z} = e^{2πi k/(N+1)}, k = 1..N, plus multiples of 2πi/log p
        let step = std::f64::consts::TAU / lp;
        for k in 1..=n {
            let base = -std::f64::consts::TAU * k as f64 / ((n + 1) as f64 * lp);
            let lo = ((-y_max - base) / step).ceil() as i64;
            let hi = ((y_max - base) / step).floor() as i64;
            for j in lo..=hi {
                v.push(Complex64::new(0.0, base + j as f64 * step));
            }
        }
    }
    v
}

/// `G(−z) Π p^{−N z/2} = G(z) Π p^{N z/2}` for the thinned product `G`.
pub fn thinned_reflection_identity(spec: &ThinnedSpec) -> bool {
    let g = thinned_dirichlet(spec);
    let total = spec.pairs().fold(BigRational::one(), |acc, (p, n)| acc * BigRational::from_integer(p.pow(n)));
    g.reflect().shift_by(&total.recip()) == g.shift_by(&total)
}

/// `log M / π`, the leading coefficient of `N(r, 1/f_M)`.
pub fn counting_slope(m: u64) -> f64 {
    (m as f64).ln() / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn partial_sums() {
        assert_eq!(partial_sum(2).unwrap().len(), 2);
        assert!(partial_sum(4).unwrap().approx_eq(&parse("1 + 2^(-z) + 3^(-z) + 4^(-z)").unwrap(), 1e-12));
        assert!(partial_sum(1).is_err());
    }

    fn bases(g: &DirichletSum) -> Vec<u64> {
        let mut ns: Vec<u64> = g.terms.keys().map(|q| (q.denom().to_u64().unwrap() as f64).sqrt().round() as u64).collect();
        ns.sort();
        ns
    }

    #[test]
    fn pi24() {
        assert_eq!(bases(&smooth_sum(&[2, 3], 24)), vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18, 24]);
        let g = thinned_dirichlet(&ThinnedSpec::new(vec![2, 3], vec![3, 1]).unwrap());
        assert_eq!(bases(&g), vec![1, 2, 3, 4, 6, 8, 12, 24]);
    }

    #[test]
    fn spec_validation() {
        assert!(ThinnedSpec::new(vec![2, 4], vec![1, 1]).is_err());
        assert!(ThinnedSpec::new(vec![3, 2], vec![1, 1]).is_err());
        assert!(ThinnedSpec::new(vec![2], vec![0]).is_err());
        assert!(ThinnedSpec::new(vec![2, 3], vec![1]).is_err());
    }

    #[test]
    fn term_count_and_hull() {
        let s = ThinnedSpec::new(vec![2, 3, 5], vec![2, 2, 1]).unwrap();
        let f = thinned_product(&s).unwrap();
        assert_eq!(f.len(), 18);
        let h = crate::hullgeo::summarize(&f).unwrap();
        let xs: Vec<f64> = h.frequencies.iter().map(|w| w.re).collect();
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // co(W) = [−Σ N_j log p_j, 0]
        assert!((lo + (4.0f64.ln() + 9.0f64.ln() + 5.0f64.ln())).abs() < 1e-12);
        assert!(hi.abs() < 1e-12);
    }

    #[test]
    fn xi0_is_even() {
        let s = ThinnedSpec::new(vec![2], vec![1]).unwrap();
        let x = xi0(&s);
        assert_eq!(x.len(), 2);
        let r = xi0_symmetry(&ThinnedSpec::new(vec![2, 3, 7], vec![3, 2, 1]).unwrap(), &[Complex64::new(1.5, -2.0)]).unwrap();
        assert!(r.exact && r.max_deviation < 1e-12);
    }

    #[test]
    fn reflection_identity() {
        assert!(thinned_reflection_identity(&ThinnedSpec::new(vec![2, 5], vec![2, 3]).unwrap()));
    }

    #[test]
    fn two_term_sum_on_axis() {
        let r = axis_zero_check(&partial_sum(2).unwrap(), 50.0, 1e-8).unwrap();
        assert!(r.off_axis.is_empty());
        // (π/log 2)(2n+1), |·| ≤ 50
        let step = std::f64::consts::PI / 2f64.ln();
        let expect = (0..).take_while(|n| step * (2 * n + 1) as f64 <= 50.0).count() as u64 * 2;
        assert_eq!(r.on_axis, expect);
    }
}
