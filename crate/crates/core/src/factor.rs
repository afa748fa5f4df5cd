//! Algebra of exponential sums: rational support, Ritt factorization,
//! exact division, common factors and `d`-th roots.
//!
//! Elements of order at most one with constant multipliers are embedded as
//! Laurent polynomials `L(u_1, …, u_d)`, `u_i = e^{b_i z}`, over a ℚ-basis
//! `b_i` of the frequencies. Floating frequencies cannot certify
//! irrationality, so every decision that leans on a large denominator is
//! flagged as heuristic.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Coeff, ExpPoly, ExpTerm, Polynomial};
use crate::numeric::poly_roots;

/// Denominator bound for rational dependence.
pub const MAX_DENOMINATOR: i64 = 1_000_000;
/// Residual `|q x − p|` accepted as an exact relation.
pub const RELATION_TOL: f64 = 1e-9;
/// Relations with denominators above this set the heuristic flag.
pub const HEURISTIC_DENOMINATOR: i64 = 1_000;
/// Univariate degree up to which the Kronecker subset search runs.
const KRONECKER_MAX_DEGREE: usize = 16;
/// Relative coefficient tolerance for float certification.
pub const CERT_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Rational approximation `p/q` of `x` with `|q x − p| ≤ tol·max(1,|x|)` and
/// `q ≤ MAX_DENOMINATOR`, by continued fractions of the real part.
fn rational_ratio(x: Complex64) -> Option<Rational64> {
    let scale = x.norm().max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x.re;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 9e15 {
            return None;
        }
        let a = a as i64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > MAX_DENOMINATOR {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        if (x * k as f64 - h as f64).norm() <= RELATION_TOL * scale {
            return Some(Rational64::new(h, k));
        }
        let frac = y - a as f64;
        if frac.abs() < 1e-300 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

/// Lenstra–Lenstra–Lovász reduction of the rows of `b` (small dimensions).
fn lll(mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = b.len();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let gram_schmidt = |b: &[Vec<f64>]| {
        let mut bs: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut v = b[i].clone();
            for j in 0..i {
                let nj = dot(&bs[j], &bs[j]);
                mu[i][j] = if nj > 0.0 { dot(&b[i], &bs[j]) / nj } else { 0.0 };
                for (x, y) in v.iter_mut().zip(&bs[j]) {
                    *x -= mu[i][j] * y;
                }
            }
            bs.push(v);
        }
        let norms: Vec<f64> = bs.iter().map(|v| dot(v, v)).collect();
        (mu, norms)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&b);
            let q = mu[k][j].round();
            if q != 0.0 {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
            }
        }
        let (mu, norms) = gram_schmidt(&b);
        if norms[k] >= (0.75 - mu[k][k - 1].powi(2)) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Integer relation `Σ m_i v_i = 0` with `m_0 ≠ 0`, `|m_i| ≤ MAX_DENOMINATOR`.
fn integer_relation(v: &[Complex64]) -> Option<Vec<i64>> {
    let n = v.len();
    let s = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if s == 0.0 {
        return None;
    }
    let k = 1e12;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = vec![0.0; n + 2];
            r[i] = 1.0;
            r[n] = k * v[i].re / s;
            r[n + 1] = k * v[i].im / s;
            r
        })
        .collect();
    let mut red = lll(rows);
    red.sort_by(|a, b| {
        let na: f64 = a.iter().map(|x| x * x).sum();
        let nb: f64 = b.iter().map(|x| x * x).sum();
        na.total_cmp(&nb)
    });
    for r in red {
        let m: Vec<i64> = r[..n].iter().map(|x| x.round() as i64).collect();
        if m[0] == 0 || m.iter().any(|x| x.abs() > MAX_DENOMINATOR) {
            continue;
        }
        let resid: Complex64 = m.iter().zip(v).map(|(mi, vi)| vi * (*mi as f64 / s)).sum();
        if resid.norm() <= RELATION_TOL {
            return Some(m);
        }
    }
    None
}

/// Rational coordinates of `w` over `basis`, if `w` lies in its ℚ-span.
/// The flag reports a denominator above `HEURISTIC_DENOMINATOR`.
fn dependence(w: Complex64, basis: &[Complex64]) -> Option<(Vec<Rational64>, bool)> {
    match basis.len() {
        0 => None,
        1 => rational_ratio(w / basis[0]).map(|r| (vec![r], *r.denom() > HEURISTIC_DENOMINATOR)),
        _ => {
            let mut v = vec![w];
            v.extend_from_slice(basis);
            let m = integer_relation(&v)?;
            let big = m.iter().any(|x| x.abs() > HEURISTIC_DENOMINATOR);
            Some((m[1..].iter().map(|mi| Rational64::new(-mi, m[0])).collect(), big))
        }
    }
}

/// A ℚ-basis of the frequencies with integer coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportBasis {
    pub basis: Vec<Complex64>,
    /// Each nonzero input frequency with its coordinates.
    pub coords: Vec<(Complex64, Vec<i64>)>,
    /// Frequencies are `(1/scale_denominator) Σ coords·basis`. The basis is
    /// rescaled so that this is always 1.
    pub scale_denominator: i64,
    pub heuristic: bool,
}

impl SupportBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn frequency(&self, e: &[i64]) -> Complex64 {
        e.iter().zip(&self.basis).map(|(k, b)| b * *k as f64).sum::<Complex64>() / self.scale_denominator as f64
    }

    /// Integer coordinates of `w`, or `BasisMismatch`.
    pub fn coords_of(&self, w: Complex64) -> Result<Vec<i64>> {
        if w.norm() == 0.0 {
            return Ok(vec![0; self.dim()]);
        }
        if let Some((_, e)) = self.coords.iter().find(|(v, _)| (v - w).norm() <= 1e-12 * (1.0 + w.norm())) {
            return Ok(e.clone());
        }
        let (r, _) = dependence(w * self.scale_denominator as f64, &self.basis).ok_or(Error::BasisMismatch)?;
        r.iter().map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(Error::BasisMismatch) }).collect()
    }
}

/// Greedy ℚ-basis of a list of frequencies (zeros are ignored), taken in
/// order of increasing modulus.
pub fn support_of(freqs: &[Complex64]) -> SupportBasis {
    let mut basis: Vec<Complex64> = Vec::new();
    let mut rat: Vec<(Complex64, Vec<Rational64>)> = Vec::new();
    let mut heuristic = false;
    let mut sorted = freqs.to_vec();
    sorted.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    for &w in &sorted {
        if w.norm() == 0.0 || rat.iter().any(|(v, _)| (v - w).norm() <= 1e-12 * (1.0 + w.norm())) {
            continue;
        }
        match dependence(w, &basis) {
            Some((r, big)) => {
                heuristic |= big;
                rat.push((w, r));
            }
            None => {
                basis.push(w);
                let mut e = vec![Rational64::from_integer(0); basis.len() - 1];
                e.push(Rational64::from_integer(1));
                rat.push((w, e));
            }
        }
    }
    let d = basis.len();
    let mut coords: Vec<(Complex64, Vec<i64>)> = rat.iter().map(|(w, _)| (*w, vec![0; d])).collect();
    for i in 0..d {
        let col: Vec<Rational64> =
            rat.iter().map(|(_, r)| r.get(i).copied().unwrap_or_else(|| Rational64::from_integer(0))).collect();
        let l = col.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
        let ints: Vec<i64> = col.iter().map(|x| (x * l).to_integer()).collect();
        let g = ints.iter().fold(0i64, |acc, x| acc.gcd(x)).max(1);
        basis[i] = basis[i] * g as f64 / l as f64;
        for (k, v) in ints.iter().enumerate() {
            coords[k].1[i] = v / g;
        }
    }
    if d == 2 {
        gauss_reduce(&mut basis, &mut coords);
    }
    SupportBasis { basis, coords, scale_denominator: 1, heuristic }
}

/// Lagrange–Gauss reduction of a planar basis, carrying integer coordinates
/// along. Skipped when the two frequencies are real-collinear.
fn gauss_reduce(basis: &mut [Complex64], coords: &mut [(Complex64, Vec<i64>)]) {
    let cross = (basis[0].conj() * basis[1]).im;
    if cross.abs() <= 1e-9 * basis[0].norm() * basis[1].norm() {
        return;
    }
    for _ in 0..200 {
        if basis[1].norm() < basis[0].norm() {
            basis.swap(0, 1);
            for (_, e) in coords.iter_mut() {
                e.swap(0, 1);
            }
        }
        let m = ((basis[0].conj() * basis[1]).re / basis[0].norm_sqr()).round();
        if m == 0.0 {
            break;
        }
        basis[1] -= basis[0] * m;
        // w = x0 b0 + x1 b1 = (x0 + m x1) b0 + x1 (b1 − m b0)
        for (_, e) in coords.iter_mut() {
            e[0] += m as i64 * e[1];
        }
    }
}

fn require_class_e<C: Coeff>(f: &ExpPoly<C>) -> Result<()> {
    if f.is_zero() {
        return Err(Error::InvalidInput("zero has no support".into()));
    }
    if f.order() > 1 || !f.has_constant_multipliers() {
        return Err(Error::InvalidInput("expected an exponential sum of order ≤ 1 with constant multipliers".into()));
    }
    Ok(())
}

fn term_frequencies(f: &ExpPoly) -> Vec<Complex64> {
    f.terms().iter().map(|t| t.exponent.coeff(1)).collect()
}

pub fn support<C: Coeff>(f: &ExpPoly<C>) -> Result<SupportBasis> {
    require_class_e(f)?;
    Ok(support_of(&term_frequencies(&f.to_c64())))
}

pub fn is_simple<C: Coeff>(f: &ExpPoly<C>) -> Result<bool> {
    Ok(support(f)?.dim() == 1)
}

/// Multivariate Laurent polynomial with constant coefficients.
#[derive(Clone, Debug, PartialEq)]
struct MPoly {
    n: usize,
    t: BTreeMap<Vec<i64>, Complex64>,
}

impl MPoly {
    fn new(n: usize) -> Self {
        MPoly { n, t: BTreeMap::new() }
    }

    fn monomial(e: Vec<i64>, v: Complex64) -> Self {
        let mut p = MPoly::new(e.len());
        p.t.insert(e, v);
        p
    }

    fn norm1(&self) -> f64 {
        self.t.values().map(|v| v.norm()).sum()
    }

    fn add_term(&mut self, e: Vec<i64>, v: Complex64) {
        *self.t.entry(e).or_insert(c(0.0, 0.0)) += v;
    }

    fn mul(&self, o: &MPoly) -> MPoly {
        let mut p = MPoly::new(self.n);
        for (a, x) in &self.t {
            for (b, y) in &o.t {
                p.add_term(a.iter().zip(b).map(|(i, j)| i + j).collect(), x * y);
            }
        }
        p.cleanup(1e-14);
        p
    }

    fn scale_by(&self, s: f64) -> MPoly {
        MPoly { n: self.n, t: self.t.iter().map(|(e, v)| (e.clone(), v * s)).collect() }
    }

    fn cleanup(&mut self, rel: f64) {
        let m = self.t.values().map(|v| v.norm()).fold(0.0, f64::max);
        self.t.retain(|_, v| v.norm() > rel * m);
    }

    fn min_exps(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.t.keys().map(|e| e[i]).min().unwrap_or(0)).collect()
    }

    fn max_exps(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.t.keys().map(|e| e[i]).max().unwrap_or(0)).collect()
    }

    fn shifted(&self, s: &[i64]) -> MPoly {
        MPoly { n: self.n, t: self.t.iter().map(|(e, v)| (e.iter().zip(s).map(|(a, b)| a + b).collect(), *v)).collect() }
    }

    fn approx_eq(&self, o: &MPoly, tol: f64) -> bool {
        let scale = self.norm1().max(o.norm1()).max(1e-300);
        let mut d = self.clone();
        for (e, v) in &o.t {
            d.add_term(e.clone(), -v);
        }
        d.t.values().all(|v| v.norm() <= tol * scale)
    }

    fn to_exppoly(&self, basis: &SupportBasis) -> ExpPoly {
        let raw = self.t.iter().map(|(e, v)| ExpTerm::exponential(*v, basis.frequency(e))).collect();
        ExpPoly::from_terms(raw).expect("float canonicalization is infallible")
    }

    /// Kronecker substitution `u_i = t^{N^i}` (nonnegative exponents only).
    fn kronecker(&self, base: i64) -> Vec<Complex64> {
        let idx = |e: &[i64]| e.iter().rev().fold(0i64, |acc, k| acc * base + k) as usize;
        let deg = self.t.keys().map(|e| idx(e)).max().unwrap_or(0);
        let mut v = vec![c(0.0, 0.0); deg + 1];
        for (e, x) in &self.t {
            v[idx(e)] += x;
        }
        v
    }

    fn from_kronecker(v: &[Complex64], n: usize, base: i64) -> MPoly {
        let mut p = MPoly::new(n);
        for (j, x) in v.iter().enumerate() {
            if x.norm() == 0.0 {
                continue;
            }
            let mut r = j as i64;
            let e: Vec<i64> = (0..n)
                .map(|_| {
                    let d = r % base;
                    r /= base;
                    d
                })
                .collect();
            p.add_term(e, *x);
        }
        p
    }
}

/// `f` as a Laurent polynomial in `u_i = e^{b_i z / scale_denominator}`, with
/// polynomial-in-`z` coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaurentPoly {
    pub basis: Vec<Complex64>,
    pub scale_denominator: i64,
    /// Exponent vector and coefficient polynomial (low degree first).
    pub terms: Vec<(Vec<i64>, Vec<Complex64>)>,
}

impl LaurentPoly {
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let us: Vec<Complex64> = self.basis.iter().map(|b| (b * z / self.scale_denominator as f64).exp()).collect();
        self.terms
            .iter()
            .map(|(e, p)| {
                let mono: Complex64 = e.iter().zip(&us).map(|(k, u)| u.powi(*k as i32)).product();
                mono * Polynomial::new(p.clone()).eval_c64(z)
            })
            .sum()
    }

    pub fn to_exppoly(&self) -> ExpPoly {
        let sb = SupportBasis {
            basis: self.basis.clone(),
            coords: Vec::new(),
            scale_denominator: self.scale_denominator,
            heuristic: false,
        };
        let raw = self
            .terms
            .iter()
            .map(|(e, p)| ExpTerm::new(Polynomial::new(p.clone()), Polynomial::monomial(sb.frequency(e), 1)))
            .collect();
        ExpPoly::from_terms(raw).expect("float canonicalization is infallible")
    }
}

pub fn to_laurent<C: Coeff>(f: &ExpPoly<C>, basis: &SupportBasis) -> Result<LaurentPoly> {
    if f.order() > 1 {
        return Err(Error::InvalidInput("order above one has no Laurent embedding".into()));
    }
    let f = f.to_c64();
    let mut terms = Vec::with_capacity(f.len());
    for t in f.terms() {
        terms.push((basis.coords_of(t.exponent.coeff(1))?, t.multiplier.coeffs().to_vec()));
    }
    Ok(LaurentPoly { basis: basis.basis.clone(), scale_denominator: basis.scale_denominator, terms })
}

fn to_mpoly(f: &ExpPoly, basis: &SupportBasis) -> Result<MPoly> {
    let mut p = MPoly::new(basis.dim());
    for t in f.terms() {
        let v = *t.multiplier.lead().ok_or(Error::NonConstantMultipliers)?;
        p.add_term(basis.coords_of(t.exponent.coeff(1))?, v);
    }
    Ok(p)
}

fn lex_positive(w: Complex64) -> bool {
    w.re > 0.0 || (w.re == 0.0 && w.im > 0.0)
}

/// Primitive vector along `v`, oriented so its frequency is lexicographically positive.
fn primitive(v: &[i64], basis: &SupportBasis) -> Option<Vec<i64>> {
    let g = v.iter().fold(0i64, |a, b| a.gcd(b));
    if g == 0 {
        return None;
    }
    let a: Vec<i64> = v.iter().map(|x| x / g).collect();
    Some(if lex_positive(basis.frequency(&a)) { a } else { a.iter().map(|x| -x).collect() })
}

/// Coset decomposition of `p` along the primitive direction `a`: each coset is
/// a univariate polynomial in `m = u^a` with its base exponent.
fn cosets(p: &MPoly, a: &[i64]) -> Vec<(Vec<i64>, Vec<Complex64>)> {
    let key = |e: &[i64]| -> Vec<i64> {
        let mut k = Vec::new();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                k.push(e[i] * a[j] - e[j] * a[i]);
            }
        }
        k
    };
    let aa: i64 = a.iter().map(|x| x * x).sum();
    let mut groups: BTreeMap<Vec<i64>, Vec<(Vec<i64>, Complex64)>> = BTreeMap::new();
    for (e, v) in &p.t {
        groups.entry(key(e)).or_default().push((e.clone(), *v));
    }
    groups
        .into_values()
        .map(|g| {
            // members differ from the first by integer multiples of a
            let e0 = g[0].0.clone();
            let pos = |e: &[i64]| e.iter().zip(&e0).zip(a).map(|((x, x0), y)| (x - x0) * y).sum::<i64>() / aa;
            let base_k = g.iter().map(|(e, _)| pos(e)).min().expect("nonempty");
            let top_k = g.iter().map(|(e, _)| pos(e)).max().expect("nonempty");
            let base: Vec<i64> = e0.iter().zip(a).map(|(x, y)| x + base_k * y).collect();
            let mut coeffs = vec![c(0.0, 0.0); (top_k - base_k + 1) as usize];
            for (e, v) in &g {
                coeffs[(pos(e) - base_k) as usize] += v;
            }
            (base, coeffs)
        })
        .collect()
}

/// Divide every coset by `1 − β m`; `None` if the remainder is not negligible.
fn divide_binomial(p: &MPoly, a: &[i64], beta: Complex64) -> Option<MPoly> {
    let mut out = MPoly::new(p.n);
    let scale = p.norm1();
    for (base, coeffs) in cosets(p, a) {
        if coeffs.len() < 2 {
            return None;
        }
        let mut q = vec![c(0.0, 0.0); coeffs.len() - 1];
        let mut carry = c(0.0, 0.0);
        for k in 0..q.len() {
            carry = coeffs[k] + beta * carry;
            q[k] = carry;
        }
        let rem = coeffs[coeffs.len() - 1] + beta * carry;
        if rem.norm() > 1e-9 * scale {
            return None;
        }
        for (k, v) in q.into_iter().enumerate() {
            let e: Vec<i64> = base.iter().zip(a).map(|(x, y)| x + k as i64 * y).collect();
            out.add_term(e, v);
        }
    }
    out.cleanup(1e-14);
    Some(out)
}

/// Group roots closer than a relative `1e-5` and average each cluster.
fn cluster_roots(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for r in roots {
        match out.iter_mut().find(|(m, _)| (m - r).norm() <= 1e-5 * (1.0 + r.norm())) {
            Some((m, n)) => {
                *m = (*m * *n as f64 + r) / (*n + 1) as f64;
                *n += 1;
            }
            None => out.push((*r, 1)),
        }
    }
    out
}

/// Strip all factors `1 − β u^a` along `a`; returns the `β`s and the cofactor.
fn extract_direction(p: &MPoly, a: &[i64]) -> Result<(Vec<Complex64>, MPoly)> {
    let cs = cosets(p, a);
    let Some((_, probe)) = cs.iter().min_by_key(|(_, v)| v.len()) else {
        return Ok((Vec::new(), p.clone()));
    };
    if probe.len() < 2 {
        return Ok((Vec::new(), p.clone()));
    }
    let roots = poly_roots(probe)?;
    let mut betas = Vec::new();
    let mut cur = p.clone();
    for (rho, mult) in cluster_roots(&roots) {
        if rho.norm() == 0.0 {
            continue;
        }
        let beta = 1.0 / rho;
        for _ in 0..mult {
            match divide_binomial(&cur, a, beta) {
                Some(q) => {
                    cur = q;
                    betas.push(beta);
                }
                None => break,
            }
        }
    }
    Ok((betas, cur))
}

/// Split off every binomial factor; returns `(direction, βs)` groups and the rest.
fn extract_binomials(p: &MPoly, basis: &SupportBasis) -> Result<(Vec<(Vec<i64>, Vec<Complex64>)>, MPoly)> {
    let mut cur = p.clone();
    let mut groups: Vec<(Vec<i64>, Vec<Complex64>)> = Vec::new();
    loop {
        let keys: Vec<Vec<i64>> = cur.t.keys().cloned().collect();
        let mut dirs: Vec<Vec<i64>> = Vec::new();
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                let d: Vec<i64> = keys[j].iter().zip(&keys[i]).map(|(x, y)| x - y).collect();
                if let Some(a) = primitive(&d, basis) {
                    if !dirs.contains(&a) {
                        dirs.push(a);
                    }
                }
            }
        }
        dirs.sort();
        let mut progressed = false;
        for a in dirs {
            let (betas, rest) = extract_direction(&cur, &a)?;
            if betas.is_empty() {
                continue;
            }
            cur = rest;
            match groups.iter_mut().find(|(d, _)| *d == a) {
                Some((_, v)) => v.extend(betas),
                None => groups.push((a, betas)),
            }
            progressed = true;
            break;
        }
        if !progressed {
            break;
        }
    }
    Ok((groups, cur))
}

fn expand_linear(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![c(1.0, 0.0)];
    for r in roots {
        let mut q = vec![c(0.0, 0.0); p.len() + 1];
        for (k, v) in p.iter().enumerate() {
            q[k + 1] += v;
            q[k] -= v * r;
        }
        p = q;
    }
    p
}

/// Univariate division with a remainder check.
fn univariate_exact_div(num: &[Complex64], den: &[Complex64]) -> Option<Vec<Complex64>> {
    let (q, r) = Polynomial::new(num.to_vec()).div_rem(&Polynomial::new(den.to_vec()))?;
    let scale: f64 = num.iter().map(|v| v.norm()).sum();
    if r.coeffs().iter().any(|v| v.norm() > 1e-8 * scale) {
        return None;
    }
    Some(q.coeffs().to_vec())
}

/// Split a polynomial without binomial factors by Kronecker substitution and a
/// subset search over the univariate roots. `None` when the degree is too large.
fn kronecker_split(p: &MPoly) -> Result<Option<Vec<MPoly>>> {
    let shift: Vec<i64> = p.min_exps().iter().map(|x| -x).collect();
    let p0 = p.shifted(&shift);
    let base = p0.max_exps().iter().copied().max().unwrap_or(0) + 1;
    let uni = p0.kronecker(base);
    let deg = uni.len() - 1;
    if deg > KRONECKER_MAX_DEGREE {
        return Ok(None);
    }
    if p0.t.len() < 2 {
        return Ok(Some(vec![p.clone()]));
    }
    let roots = poly_roots(&uni)?;
    for size in 1..=deg / 2 {
        for subset in subsets(deg, size) {
            let rs: Vec<Complex64> = subset.iter().map(|&k| roots[k]).collect();
            let mut g = MPoly::from_kronecker(&expand_linear(&rs), p.n, base);
            g.cleanup(1e-9);
            if g.t.len() < 2 {
                continue;
            }
            let Some(h) = univariate_exact_div(&uni, &g.kronecker(base)) else { continue };
            let mut h = MPoly::from_kronecker(&h, p.n, base);
            h.cleanup(1e-9);
            if !g.mul(&h).approx_eq(&p0, 1e-9) {
                continue;
            }
            let mut out = Vec::new();
            for part in [g, h] {
                match kronecker_split(&part)? {
                    Some(v) => out.extend(v),
                    None => out.push(part),
                }
            }
            // restore the monomial shift on the first factor
            let back: Vec<i64> = shift.iter().map(|x| -x).collect();
            out[0] = out[0].shifted(&back);
            return Ok(Some(out));
        }
    }
    Ok(Some(vec![p.clone()]))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// The unit `coefficient · e^{frequency z}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Unit {
    pub coefficient: Complex64,
    pub frequency: Complex64,
}

impl Unit {
    pub fn to_exppoly(&self) -> ExpPoly {
        ExpPoly::exponential(self.coefficient, self.frequency)
    }
}

/// A simple factor: a polynomial in `u = e^{w z}` with constant term 1,
/// equal to `Π (1 − β_j u)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplePart {
    pub w: Complex64,
    pub poly: Vec<Complex64>,
    pub betas: Vec<Complex64>,
}

impl SimplePart {
    pub fn to_exppoly(&self) -> ExpPoly {
        let raw = self.poly.iter().enumerate().map(|(k, v)| ExpTerm::exponential(*v, self.w * k as f64)).collect();
        ExpPoly::from_terms(raw).expect("float canonicalization is infallible")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factorization {
    pub unit: Unit,
    pub simple: Vec<SimplePart>,
    /// Genuinely multivariate parts, each with lowest term equal to 1.
    pub irreducible: Vec<ExpPoly>,
    /// Multiply-back reproduces the input.
    pub certified: bool,
    /// False when the multivariate search gave up; the parts are then a
    /// valid but possibly coarser factorization.
    pub complete: bool,
    pub heuristic: bool,
}

impl Factorization {
    pub fn expand(&self) -> ExpPoly {
        let mut acc = self.unit.to_exppoly();
        for s in &self.simple {
            acc = acc.mul(&s.to_exppoly());
        }
        for p in &self.irreducible {
            acc = acc.mul(p);
        }
        acc
    }
}

/// Divide by the canonically first term; returns that term as a unit.
fn split_unit(p: &ExpPoly) -> (Unit, ExpPoly) {
    let t = &p.terms()[0];
    let u = Unit { coefficient: *t.multiplier.lead().expect("nonzero term"), frequency: t.exponent.coeff(1) };
    let inv = ExpTerm::exponential(1.0 / u.coefficient, -u.frequency);
    (u, p.mul_term(&inv))
}

fn factor_in_basis(f: &ExpPoly, basis: &SupportBasis) -> Result<Factorization> {
    let p = to_mpoly(f, basis)?;
    let (groups, rest) = extract_binomials(&p, basis)?;
    let simple: Vec<SimplePart> = groups
        .into_iter()
        .map(|(a, betas)| SimplePart { w: basis.frequency(&a), poly: expand_products(&betas), betas })
        .collect();
    let mut irreducible = Vec::new();
    let mut complete = true;
    let mut unit_poly = ExpPoly::one();
    if rest.t.len() == 1 {
        unit_poly = rest.to_exppoly(basis);
    } else {
        let parts = match kronecker_split(&rest)? {
            Some(v) => v,
            None => {
                complete = false;
                vec![rest.clone()]
            }
        };
        for part in parts {
            let (u, normalized) = split_unit(&part.to_exppoly(basis));
            unit_poly = unit_poly.mul(&u.to_exppoly());
            irreducible.push(normalized);
        }
    }
    let (unit, _) = split_unit(&unit_poly);
    let mut fz = Factorization { unit, simple, irreducible, certified: false, complete, heuristic: basis.heuristic };
    fz.certified = fz.expand().approx_eq(f, CERT_TOL);
    Ok(fz)
}

/// Coefficients of `Π (1 − β_j u)`.
fn expand_products(betas: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![c(1.0, 0.0)];
    for b in betas {
        let mut q = vec![c(0.0, 0.0); p.len() + 1];
        for (k, v) in p.iter().enumerate() {
            q[k] += v;
            q[k + 1] -= v * b;
        }
        p = q;
    }
    p
}

pub fn ritt_factorization<C: Coeff>(f: &ExpPoly<C>) -> Result<Factorization> {
    require_class_e(f)?;
    let f = f.to_c64();
    if f.len() == 1 {
        let (unit, _) = split_unit(&f);
        return Ok(Factorization {
            unit,
            simple: Vec::new(),
            irreducible: Vec::new(),
            certified: true,
            complete: true,
            heuristic: false,
        });
    }
    factor_in_basis(&f, &support(&f)?)
}

/// `f = unit · Π (1 − β_j e^{μ_j z})` for simple `f`.
pub fn factor_simple<C: Coeff>(f: &ExpPoly<C>) -> Result<(Unit, Vec<(Complex64, Complex64)>)> {
    if !is_simple(f)? {
        return Err(Error::InvalidInput("not a simple exponential sum".into()));
    }
    simple_roots(&ritt_factorization(f)?)
}

/// As `factor_simple`, with the frequencies written as multiples of `w`.
pub fn factor_simple_in<C: Coeff>(f: &ExpPoly<C>, w: Complex64) -> Result<(Unit, Vec<(Complex64, Complex64)>)> {
    require_class_e(f)?;
    let f = f.to_c64();
    let w = if lex_positive(w) { w } else { -w };
    let basis = SupportBasis { basis: vec![w], coords: Vec::new(), scale_denominator: 1, heuristic: false };
    simple_roots(&factor_in_basis(&f, &basis)?)
}

fn simple_roots(fz: &Factorization) -> Result<(Unit, Vec<(Complex64, Complex64)>)> {
    if !fz.irreducible.is_empty() || !fz.certified {
        return Err(Error::RootFindingFailure);
    }
    let roots = fz.simple.iter().flat_map(|s| s.betas.iter().map(move |b| (*b, s.w))).collect();
    Ok((fz.unit, roots))
}

/// Outcome of exact division in the Laurent embedding.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DivisionOutcome {
    Exact { quotient: String },
    /// Quotient `Σ (num_k/den_k)(z) e^{E_k(z)}` with rational multipliers.
    RationalMultipliers { terms: Vec<RationalTerm> },
    NotExact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalTerm {
    pub numerator: String,
    pub denominator: String,
    pub exponent: String,
}

/// Lexicographic order on exponent polynomials, from the top coefficient,
/// compatible with addition of exponents.
fn exponent_cmp<C: Coeff>(a: &Polynomial<C>, b: &Polynomial<C>) -> Ordering {
    if a.matches(b) {
        return Ordering::Equal;
    }
    let n = a.coeffs().len().max(b.coeffs().len());
    for k in (0..n).rev() {
        let (x, y) = (a.coeff(k), b.coeff(k));
        if x.matches(&y) {
            continue;
        }
        return x.order_key(&y);
    }
    Ordering::Equal
}

fn top_term<C: Coeff>(f: &ExpPoly<C>) -> &ExpTerm<C> {
    f.terms().iter().max_by(|a, b| exponent_cmp(&a.exponent, &b.exponent)).expect("nonzero")
}

fn bottom_term<C: Coeff>(f: &ExpPoly<C>) -> &ExpTerm<C> {
    f.terms().iter().min_by(|a, b| exponent_cmp(&a.exponent, &b.exponent)).expect("nonzero")
}

/// Reduce `n/d` by their greatest common divisor.
fn reduce<C: Coeff>(n: &Polynomial<C>, d: &Polynomial<C>) -> (Polynomial<C>, Polynomial<C>) {
    let g = n.gcd(d);
    if g.deg0() == 0 {
        return (n.clone(), d.clone());
    }
    let (nq, _) = n.div_rem(&g).expect("nonzero gcd");
    let (dq, _) = d.div_rem(&g).expect("nonzero gcd");
    (nq, dq)
}

/// Long division of `f` by `g` from the top exponent down.
pub fn divide<C: Coeff>(f: &ExpPoly<C>, g: &ExpPoly<C>) -> Result<DivisionOutcome> {
    if g.is_zero() {
        return Err(Error::InvalidInput("division by zero".into()));
    }
    if f.is_zero() {
        return Ok(DivisionOutcome::Exact { quotient: "0".into() });
    }
    let gt = top_term(g).clone();
    let floor = bottom_term(f).exponent.sub(&bottom_term(g).exponent);
    let mut rem = f.clone();
    let mut den = Polynomial::<C>::one();
    let mut quotient: Vec<(Polynomial<C>, Polynomial<C>, Polynomial<C>)> = Vec::new();
    let cap = 8 * (f.len() + 1) * (g.len() + 1) + 64;
    for _ in 0..cap {
        if rem.is_zero() {
            break;
        }
        let rt = top_term(&rem).clone();
        let e = rt.exponent.sub(&gt.exponent);
        if exponent_cmp(&e, &floor) == Ordering::Less {
            return Ok(DivisionOutcome::NotExact);
        }
        let (qn, qd) = reduce(&rt.multiplier, &den.mul(&gt.multiplier));
        quotient.push((qn, qd, e.clone()));
        let p = ExpPoly::from_polynomial(gt.multiplier.clone());
        let shifted = g.mul_term(&ExpTerm::new(rt.multiplier.clone(), e));
        rem = rem.mul(&p).sub(&shifted);
        den = den.mul(&gt.multiplier);
    }
    if !rem.is_zero() {
        return Ok(DivisionOutcome::NotExact);
    }
    let mut raw = Vec::new();
    let mut rational = Vec::new();
    for (n, d, e) in &quotient {
        if d.deg0() == 0 {
            let inv = d.lead().and_then(|x| x.inv()).expect("nonzero denominator");
            raw.push(ExpTerm::new(n.scale(&inv), e.clone()));
        } else {
            rational.push((n, d, e));
        }
    }
    if rational.is_empty() {
        let q = ExpPoly::from_terms(raw)?;
        let ok = if C::EXACT { q.mul(g).matches(f) } else { q.mul(g).approx_eq(f, CERT_TOL) };
        if !ok {
            return Ok(DivisionOutcome::NotExact);
        }
        return Ok(DivisionOutcome::Exact { quotient: q.to_expr_string() });
    }
    let terms = quotient
        .iter()
        .map(|(n, d, e)| RationalTerm { numerator: n.literal(), denominator: d.literal(), exponent: e.literal() })
        .collect();
    Ok(DivisionOutcome::RationalMultipliers { terms })
}

/// Exact quotient as an exponential polynomial, if there is one.
pub fn divide_exact<C: Coeff>(f: &ExpPoly<C>, g: &ExpPoly<C>) -> Result<Option<ExpPoly>> {
    match divide(f, g)? {
        DivisionOutcome::Exact { quotient } => Ok(Some(crate::expr::parse(&quotient)?)),
        _ => Ok(None),
    }
}

/// Greatest common non-unit factor over the joint support, lowest term 1.
/// The flagged variant also reports whether a heuristic dependence was used.
pub fn common_factor<C: Coeff>(f: &ExpPoly<C>, g: &ExpPoly<C>) -> Result<Option<ExpPoly>> {
    Ok(common_factor_flagged(f, g)?.0)
}

pub fn common_factor_flagged<C: Coeff>(f: &ExpPoly<C>, g: &ExpPoly<C>) -> Result<(Option<ExpPoly>, bool)> {
    require_class_e(f)?;
    require_class_e(g)?;
    let (f, g) = (f.to_c64(), g.to_c64());
    let mut ws = term_frequencies(&f);
    ws.extend(term_frequencies(&g));
    let basis = support_of(&ws);
    let (ff, gf) = (factor_in_basis(&f, &basis)?, factor_in_basis(&g, &basis)?);
    let mut acc = ExpPoly::one();
    let mut found = false;
    for sf in &ff.simple {
        let Some(sg) = gf.simple.iter().find(|s| (s.w - sf.w).norm() <= 1e-12 * (1.0 + s.w.norm())) else { continue };
        let mut pool = sg.betas.clone();
        let mut common = Vec::new();
        for b in &sf.betas {
            if let Some(k) = pool.iter().position(|x| (x - b).norm() <= 1e-8 * (1.0 + b.norm())) {
                common.push(*b);
                pool.remove(k);
            }
        }
        if !common.is_empty() {
            found = true;
            acc = acc.mul(&SimplePart { w: sf.w, poly: expand_products(&common), betas: common }.to_exppoly());
        }
    }
    let mut pool = gf.irreducible.clone();
    for p in &ff.irreducible {
        if let Some(k) = pool.iter().position(|x| x.approx_eq(p, 1e-8)) {
            found = true;
            acc = acc.mul(p);
            pool.remove(k);
        }
    }
    Ok((found.then_some(acc), basis.heuristic))
}

/// All `d`-th roots `g` with `g^d = f`, principal root first.
pub fn dth_roots<C: Coeff>(f: &ExpPoly<C>, d: u32) -> Result<Vec<ExpPoly>> {
    if d < 2 {
        return Err(Error::InvalidInput("root degree must be at least 2".into()));
    }
    if f.is_zero() {
        return Err(Error::InvalidInput("zero has no distinguished root".into()));
    }
    if f.order() > 1 || !f.has_constant_multipliers() {
        return Err(Error::Unsupported("roots with polynomial multipliers or order above one".into()));
    }
    let f = f.to_c64();
    // embed over the lattice of differences so the Kronecker degree stays small
    let w0 = f.terms()[0].exponent.coeff(1);
    let diffs: Vec<Complex64> = term_frequencies(&f).iter().map(|w| w - w0).collect();
    let basis = support_of(&diffs);
    let mut p = MPoly::new(basis.dim());
    for (t, w) in f.terms().iter().zip(&diffs) {
        p.add_term(basis.coords_of(*w)?, *t.multiplier.lead().expect("constant multipliers"));
    }
    let lo = p.min_exps();
    let p0 = p.shifted(&lo.iter().map(|x| -x).collect::<Vec<_>>());
    let hi = p0.max_exps();
    if hi.iter().any(|h| h % d as i64 != 0) {
        return Ok(Vec::new());
    }
    let base = hi.iter().copied().max().unwrap_or(0) + 1;
    let uni = p0.kronecker(base);
    let s = uni.iter().position(|v| v.norm() > 0.0).expect("nonzero");
    if s % d as usize != 0 {
        return Ok(Vec::new());
    }
    let tail = &uni[s..];
    if (tail.len() - 1) % d as usize != 0 {
        return Ok(Vec::new());
    }
    let mut candidates = vec![series_root(tail, d)];
    if let Some(h) = clustered_root(tail, d)? {
        candidates.push(h);
    }
    let mut found = None;
    for h in candidates {
        let mut g_uni = vec![c(0.0, 0.0); s / d as usize];
        g_uni.extend(h);
        let mut g = MPoly::from_kronecker(&g_uni, p.n, base);
        g.cleanup(1e-12);
        let mut gd = power(&g, d);
        if !gd.approx_eq(&p0, 1e-9) && gd.approx_eq(&p0, 1e-3) {
            g = polish_root(&g, &p0, d);
            gd = power(&g, d);
        }
        if gd.approx_eq(&p0, 1e-9) {
            found = Some(g);
            break;
        }
    }
    let Some(g) = found else { return Ok(Vec::new()) };
    let lo_freq = (w0 + basis.frequency(&lo)) / d as f64;
    let shift = ExpTerm::exponential(c(1.0, 0.0), lo_freq);
    let principal = g.to_exppoly(&basis).mul_term(&shift);
    Ok((0..d)
        .map(|k| principal.scale(&Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64)))
        .collect())
}

/// First `(len − 1)/d + 1` coefficients of `p^{1/d}` by the binomial series recurrence.
fn series_root(p: &[Complex64], d: u32) -> Vec<Complex64> {
    let n = (p.len() - 1) / d as usize;
    let alpha = 1.0 / d as f64;
    let mut h = vec![c(0.0, 0.0); n + 1];
    h[0] = p[0].powf(alpha);
    for k in 1..=n {
        let mut acc = c(0.0, 0.0);
        for j in 1..=k.min(p.len() - 1) {
            acc += p[j] * h[k - j] * (alpha * j as f64 - (k - j) as f64);
        }
        h[k] = acc / (p[0] * k as f64);
    }
    h
}

fn power(g: &MPoly, d: u32) -> MPoly {
    let mut acc = MPoly::monomial(vec![0; g.n], c(1.0, 0.0));
    for _ in 0..d {
        acc = acc.mul(g);
    }
    acc
}

/// Gauss–Newton refinement of `g^d = p` over the coefficients of `g` on its
/// current support.
fn polish_root(g: &MPoly, p: &MPoly, d: u32) -> MPoly {
    let mut g = g.clone();
    let support: Vec<Vec<i64>> = g.t.keys().cloned().collect();
    for _ in 0..8 {
        let mut r = power(&g, d);
        for (e, v) in &p.t {
            r.add_term(e.clone(), -v);
        }
        if r.t.values().all(|v| v.norm() <= 1e-14 * p.norm1()) {
            break;
        }
        let dg = power(&g, d - 1).scale_by(d as f64);
        let rows: Vec<Vec<i64>> = r.t.keys().cloned().collect();
        let jac = DMatrix::from_fn(rows.len(), support.len(), |i, j| {
            let m: Vec<i64> = rows[i].iter().zip(&support[j]).map(|(a, b)| a - b).collect();
            dg.t.get(&m).copied().unwrap_or(c(0.0, 0.0))
        });
        let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|e| r.t[e]));
        let Ok(delta) = jac.svd(true, true).solve(&rhs, 1e-14) else { break };
        for (j, e) in support.iter().enumerate() {
            *g.t.get_mut(e).expect("support") -= delta[j];
        }
    }
    g
}

/// `p^{1/d}` from the roots of `p` grouped into `d`-tuples. The mean of a
/// cluster is accurate even though its members are not.
fn clustered_root(p: &[Complex64], d: u32) -> Result<Option<Vec<Complex64>>> {
    let d = d as usize;
    let mut roots = poly_roots(p)?;
    let mut means = Vec::new();
    while !roots.is_empty() {
        let r = roots.swap_remove(0);
        if roots.len() < d - 1 {
            return Ok(None);
        }
        roots.sort_by(|a, b| (a - r).norm().total_cmp(&(b - r).norm()));
        let group: Vec<Complex64> = std::iter::once(r).chain(roots.drain(..d - 1)).collect();
        let mean = group.iter().sum::<Complex64>() / d as f64;
        if group.iter().any(|x| (x - mean).norm() > 1e-3 * (1.0 + mean.norm())) {
            return Ok(None);
        }
        means.push(mean);
    }
    let lead = p[p.len() - 1].powf(1.0 / d as f64);
    Ok(Some(expand_linear(&means).into_iter().map(|v| v * lead).collect()))
}

/// Principal `d`-th root, if `f` has one in the implemented cases.
pub fn dth_root<C: Coeff>(f: &ExpPoly<C>, d: u32) -> Result<Option<ExpPoly>> {
    Ok(dth_roots(f, d)?.into_iter().next())
}
