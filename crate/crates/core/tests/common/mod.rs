//! Shared oracles for integration tests.
#![allow(dead_code)]

pub mod ode;

use std::f64::consts::TAU;

use exppoly::factor::Factorization;
use exppoly::ExpPoly;
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A binomial factor `1 − β e^{μ z}`.
#[derive(Clone, Copy, Debug)]
pub struct Binomial {
    pub beta: Complex64,
    pub mu: Complex64,
}

impl Binomial {
    pub fn to_exppoly(&self) -> ExpPoly {
        ExpPoly::one().sub(&ExpPoly::exponential(self.beta, self.mu))
    }
}

/// Random `β` with modulus in `[0.5, 2]`.
pub fn random_beta(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU))
}

/// Up to four binomials with frequencies `k·d`, `k ∈ {1, 2}`,
/// `d ∈ {1, i, 1+i}`.
pub fn random_binomials(rng: &mut impl Rng) -> Vec<Binomial> {
    let dirs = [c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)];
    let n = rng.gen_range(1..=4);
    (0..n)
        .map(|_| Binomial {
            beta: random_beta(rng),
            mu: dirs[rng.gen_range(0..3)] * rng.gen_range(1..=2) as f64,
        })
        .collect()
}

pub fn product(fs: &[Binomial]) -> ExpPoly {
    fs.iter().fold(ExpPoly::one(), |acc, b| acc.mul(&b.to_exppoly()))
}

/// Closed-form split of `1 − β e^{k w z}` into `Π_j (1 − β^{1/k} ω^j e^{w z})`
/// along a recovered simple-part frequency `w` (with `μ = ±k w`).
fn split_along(b: &Binomial, w: Complex64) -> Option<Vec<Complex64>> {
    let ratio = b.mu / w;
    let k = ratio.re.round();
    if (ratio - c(k, 0.0)).norm() > 1e-9 || k == 0.0 {
        return None;
    }
    // a negative multiple is a unit times a positive one: 1 − β u^{-k} = −β u^{-k}(1 − β^{-1} u^k)
    let (beta, k) = if k < 0.0 { (1.0 / b.beta, -k as u32) } else { (b.beta, k as u32) };
    let root = beta.powf(1.0 / k as f64);
    Some((0..k).map(|j| root * Complex64::from_polar(1.0, TAU * j as f64 / k as f64)).collect())
}

/// The recovered simple parts carry the same multiset of `(w, β)` pairs as
/// the closed-form split of the generating binomials.
pub fn same_binomial_multiset(fz: &Factorization, fs: &[Binomial]) -> bool {
    let mut pool: Vec<(Complex64, Complex64)> =
        fz.simple.iter().flat_map(|s| s.betas.iter().map(move |b| (s.w, *b))).collect();
    for b in fs {
        let Some((w, roots)) = fz.simple.iter().find_map(|s| split_along(b, s.w).map(|r| (s.w, r))) else {
            return false;
        };
        for r in roots {
            let Some(k) = pool.iter().position(|(pw, pb)| (pw - w).norm() < 1e-9 && (pb - r).norm() < 1e-6 * (1.0 + r.norm()))
            else {
                return false;
            };
            pool.remove(k);
        }
    }
    pool.is_empty() && fz.irreducible.is_empty()
}
