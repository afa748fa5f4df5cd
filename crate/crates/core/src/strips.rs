//! Zero-free regions, critical strips and log-strips.
//!
//! A normalized sum is `1 + H_1 e^{w_1 z} + … + H_n e^{w_n z}` with real
//! `0 < w_1 < … < w_n`. In the half-plane `Re z = x` the term `k` dominates when
//! `|H_k| e^{w_k x} > Σ_{j≠k} |H_j| e^{w_j x}`. Dividing by `e^{w_k x}` turns the
//! right side into a convex function of `x`, so each dominance set is an
//! interval found by locating the minimum and bisecting on both sides.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Coeff, ExpPoly, ExpTerm};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizedSum {
    /// `H_0 = 1, H_1, …, H_n`.
    pub multipliers: Vec<Complex64>,
    /// `0 = w_0 < w_1 < … < w_n`.
    pub frequencies: Vec<f64>,
}

/// Open interval `(lo, hi)`; `None` stands for an infinite end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroFreeRegion {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub dominating_index: usize,
}

/// Closed interval `[lo, hi]` between two zero-free regions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalStrip {
    pub lo: f64,
    pub hi: f64,
    pub left_index: usize,
    pub right_index: usize,
}

impl CriticalStrip {
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

impl ZeroFreeRegion {
    pub fn contains(&self, x: f64) -> bool {
        self.lo.map_or(true, |a| x > a) && self.hi.map_or(true, |b| x < b)
    }
}

/// `f = unit(z) · ns(e^{i·rotation} z)`.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub unit: ExpTerm,
    pub ns: NormalizedSum,
    pub rotation: f64,
}

impl NormalizedSum {
    pub fn new(multipliers: Vec<Complex64>, frequencies: Vec<f64>) -> Result<Self> {
        if multipliers.len() != frequencies.len() || multipliers.is_empty() {
            return Err(Error::InvalidInput("multipliers and frequencies must pair up".into()));
        }
        if frequencies[0] != 0.0 || (multipliers[0] - Complex64::new(1.0, 0.0)).norm() > 1e-15 {
            return Err(Error::InvalidInput("normalized sums start with the term 1".into()));
        }
        if frequencies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("frequencies must increase strictly".into()));
        }
        if multipliers.iter().any(|h| h.norm() == 0.0) {
            return Err(Error::InvalidInput("zero multiplier".into()));
        }
        Ok(NormalizedSum { multipliers, frequencies })
    }

    pub fn n(&self) -> usize {
        self.frequencies.len() - 1
    }

    /// The sum as an exponential polynomial in the rotated variable.
    pub fn to_exppoly(&self) -> ExpPoly {
        ExpPoly::from_terms(
            self.multipliers
                .iter()
                .zip(&self.frequencies)
                .map(|(h, w)| ExpTerm::exponential(*h, Complex64::new(*w, 0.0)))
                .collect(),
        )
        .expect("float canonicalization")
    }

    fn log_abs(&self) -> Vec<f64> {
        self.multipliers.iter().map(|h| h.norm().ln()).collect()
    }

    /// `ln Σ_{j≠k} |H_j| e^{(w_j − w_k) x} − ln |H_k|`; negative exactly where `k` dominates.
    fn psi(&self, k: usize, x: f64) -> f64 {
        let la = self.log_abs();
        let wk = self.frequencies[k];
        let vals: Vec<f64> = (0..=self.n()).filter(|&j| j != k).map(|j| la[j] + (self.frequencies[j] - wk) * x).collect();
        log_sum_exp(&vals) - la[k]
    }

    /// Derivative of the first part of `psi`: a weighted mean of `w_j − w_k`.
    fn dpsi(&self, k: usize, x: f64) -> f64 {
        let la = self.log_abs();
        let wk = self.frequencies[k];
        let js: Vec<usize> = (0..=self.n()).filter(|&j| j != k).collect();
        let e: Vec<f64> = js.iter().map(|&j| la[j] + (self.frequencies[j] - wk) * x).collect();
        let m = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for (i, &j) in js.iter().enumerate() {
            let wgt = (e[i] - m).exp();
            num += wgt * (self.frequencies[j] - wk);
            den += wgt;
        }
        num / den
    }

    /// Scale of the problem: pairwise two-term balance points.
    fn balance_span(&self) -> (f64, f64) {
        let la = self.log_abs();
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for j in 0..=self.n() {
            for k in j + 1..=self.n() {
                let x = (la[j] - la[k]) / (self.frequencies[k] - self.frequencies[j]);
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        (lo - 10.0, hi + 10.0)
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Bisect a sign change of `g` on `[a, b]` (`g(a)` and `g(b)` of opposite sign).
fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b || (b - a) < 1e-15 * (1.0 + m.abs()) {
            break;
        }
        if (g(m) > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Push `x` outward from `start` by doubling steps until `pred` holds.
fn expand(start: f64, dir: f64, pred: impl Fn(f64) -> bool) -> Option<f64> {
    let mut step = 1.0;
    let mut x = start;
    for _ in 0..2000 {
        if pred(x) {
            return Some(x);
        }
        x = start + dir * step;
        step *= 2.0;
        if !x.is_finite() {
            return None;
        }
    }
    None
}

/// Zero-free vertical regions, ordered from left to right.
pub fn zero_free_regions(ns: &NormalizedSum) -> Vec<ZeroFreeRegion> {
    let n = ns.n();
    if n == 0 {
        return vec![ZeroFreeRegion { lo: None, hi: None, dominating_index: 0 }];
    }
    let (span_lo, span_hi) = ns.balance_span();
    let mut out = Vec::new();
    for k in 0..=n {
        let psi = |x: f64| ns.psi(k, x);
        if k == 0 {
            // psi increasing; dominance on (-inf, b)
            let right = expand(span_hi, 1.0, |x| psi(x) > 0.0).expect("psi grows");
            let left = expand(span_lo, -1.0, |x| psi(x) < 0.0).expect("psi decays");
            out.push(ZeroFreeRegion { lo: None, hi: Some(bisect(psi, left, right)), dominating_index: 0 });
        } else if k == n {
            let left = expand(span_lo, -1.0, |x| psi(x) > 0.0).expect("psi grows to the left");
            let right = expand(span_hi, 1.0, |x| psi(x) < 0.0).expect("psi decays to the right");
            out.push(ZeroFreeRegion { lo: Some(bisect(psi, left, right)), hi: None, dominating_index: n });
        } else {
            // Convex psi: find its minimum from the sign of the derivative.
            let dpsi = |x: f64| ns.dpsi(k, x);
            let a = expand(span_lo, -1.0, |x| dpsi(x) < 0.0).expect("derivative negative far left");
            let b = expand(span_hi, 1.0, |x| dpsi(x) > 0.0).expect("derivative positive far right");
            let xm = bisect(dpsi, a, b);
            if psi(xm) >= 0.0 {
                continue;
            }
            let left = expand(xm, -1.0, |x| psi(x) > 0.0).expect("psi grows to the left");
            let right = expand(xm, 1.0, |x| psi(x) > 0.0).expect("psi grows to the right");
            out.push(ZeroFreeRegion {
                lo: Some(bisect(psi, left, xm)),
                hi: Some(bisect(psi, xm, right)),
                dominating_index: k,
            });
        }
    }
    out.sort_by(|a, b| a.lo.unwrap_or(f64::NEG_INFINITY).total_cmp(&b.lo.unwrap_or(f64::NEG_INFINITY)));
    out
}

/// Closed strips between consecutive zero-free regions.
pub fn critical_strips(ns: &NormalizedSum) -> Vec<CriticalStrip> {
    let regions = zero_free_regions(ns);
    regions
        .windows(2)
        .map(|w| {
            let lo = w[0].hi.expect("bounded on the right");
            let hi = w[1].lo.expect("bounded on the left").max(lo);
            CriticalStrip { lo, hi, left_index: w[0].dominating_index, right_index: w[1].dominating_index }
        })
        .collect()
}

/// The `n + 1` non-strict inequalities whose common solution set contains the
/// closure of the real parts of zeros.
pub fn rf_inequalities(ns: &NormalizedSum, sigma: f64) -> bool {
    (0..=ns.n()).all(|k| ns.psi(k, sigma) >= -1e-14)
}

/// Predicted zeros per unit height in a strip: `|w_j − w_k| / 2π`.
pub fn strip_density(strip: &CriticalStrip, ns: &NormalizedSum) -> f64 {
    (ns.frequencies[strip.right_index] - ns.frequencies[strip.left_index]).abs() / TAU
}

/// Write an exponential sum with constant multipliers and collinear
/// frequencies as `unit(z) · ns(e^{i·rotation} z)`.
pub fn to_normalized_sum<C: Coeff>(f: &ExpPoly<C>) -> Result<Normalization> {
    if f.is_zero() {
        return Err(Error::InvalidInput("zero function".into()));
    }
    if f.order() > 1 {
        return Err(Error::InvalidInput("not an exponential sum (order > 1)".into()));
    }
    if !f.has_constant_multipliers() {
        return Err(Error::NonConstantMultipliers);
    }
    let terms: Vec<(Complex64, Complex64)> =
        f.terms().iter().map(|t| (t.multiplier.coeff(0).to_c64(), t.exponent.coeff(1).to_c64())).collect();
    let ws: Vec<Complex64> = terms.iter().map(|t| t.1).collect();
    // Direction of the line through the frequencies, taken in (-π/2, π/2].
    let (mut ia, mut ib, mut best) = (0, 0, 0.0);
    for i in 0..ws.len() {
        for j in i + 1..ws.len() {
            let d = (ws[j] - ws[i]).norm();
            if d > best {
                (ia, ib, best) = (i, j, d);
            }
        }
    }
    let mut phi = if best > 0.0 { (ws[ib] - ws[ia]).arg() } else { 0.0 };
    if phi > PI / 2.0 {
        phi -= PI;
    } else if phi <= -PI / 2.0 {
        phi += PI;
    }
    let u = Complex64::from_polar(1.0, -phi);
    let proj: Vec<Complex64> = ws.iter().map(|w| w * u).collect();
    let imag0 = proj[0].im;
    let scale = 1.0 + best;
    if proj.iter().any(|p| (p.im - imag0).abs() > 1e-12 * scale) {
        return Err(Error::NotCollinear);
    }
    let mut order: Vec<usize> = (0..ws.len()).collect();
    order.sort_by(|&a, &b| proj[a].re.total_cmp(&proj[b].re));
    let lead = order[0];
    let (c0, w0) = terms[lead];
    let unit = ExpTerm::exponential(c0, w0);
    let t0 = proj[lead].re;
    let multipliers = order.iter().map(|&j| terms[j].0 / c0).collect::<Vec<_>>();
    let frequencies = order.iter().map(|&j| proj[j].re - t0).collect::<Vec<_>>();
    let mut ns = NormalizedSum { multipliers, frequencies };
    ns.multipliers[0] = Complex64::new(1.0, 0.0);
    ns.frequencies[0] = 0.0;
    Ok(Normalization { unit, ns, rotation: phi })
}

/// Region `{ r e^{iθ} : r > 1, |θ − θ*| < c log r / r^p }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogStrip {
    pub theta_star: f64,
    pub c: f64,
    pub p: u32,
}

/// Difference of two angles reduced to `(−π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

pub fn log_strip(theta_star: f64, c: f64, p: u32) -> Result<LogStrip> {
    if c <= 0.0 || p == 0 {
        return Err(Error::InvalidInput("log-strip needs c > 0 and p ≥ 1".into()));
    }
    Ok(LogStrip { theta_star, c, p })
}

impl LogStrip {
    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        if r <= 1.0 {
            return false;
        }
        angle_diff(z.arg(), self.theta_star).abs() < self.c * r.ln() / r.powi(self.p as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn ns_of(s: &str) -> NormalizedSum {
        to_normalized_sum(&parse(s).unwrap()).unwrap().ns
    }

    #[test]
    fn golden_ratio_regions() {
        let ns = ns_of("1+exp(z)+exp(2*z)");
        let r = zero_free_regions(&ns);
        assert_eq!(r.len(), 2);
        let s5 = 5f64.sqrt();
        assert!((r[0].hi.unwrap() - ((s5 - 1.0) / 2.0).ln()).abs() < 1e-12);
        assert!((r[1].lo.unwrap() - ((s5 + 1.0) / 2.0).ln()).abs() < 1e-12);
        assert_eq!((r[0].dominating_index, r[1].dominating_index), (0, 2));
        assert!(rf_inequalities(&ns, 0.0));
        assert!(!rf_inequalities(&ns, ((s5 + 1.0) / 2.0).ln() + 0.1));
        assert!(!rf_inequalities(&ns, -50.0));
    }

    #[test]
    fn example_strips() {
        let n = to_normalized_sum(&parse("6-5*exp(z)+exp(2*z)").unwrap()).unwrap();
        assert_eq!(n.rotation, 0.0);
        assert!((n.unit.multiplier.coeff(0) - Complex64::new(6.0, 0.0)).norm() < 1e-15);
        let r = zero_free_regions(&n.ns);
        assert_eq!(r.len(), 3);
        assert!(r[0].hi.unwrap().abs() < 1e-12);
        assert!((r[1].lo.unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((r[1].hi.unwrap() - 3f64.ln()).abs() < 1e-12);
        assert!((r[2].lo.unwrap() - 6f64.ln()).abs() < 1e-12);
        let s = critical_strips(&n.ns);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].left_index, s[0].right_index), (0, 1));
        assert!((strip_density(&s[1], &n.ns) - 1.0 / TAU).abs() < 1e-15);
    }

    #[test]
    fn degenerate_strip_and_rotation() {
        let s = critical_strips(&ns_of("exp(z)-1"));
        assert_eq!(s.len(), 1);
        assert!(s[0].lo.abs() < 1e-12 && s[0].hi.abs() < 1e-12);
        let n = to_normalized_sum(&parse("sin(z)").unwrap()).unwrap();
        assert!((n.rotation - PI / 2.0).abs() < 1e-15);
        assert_eq!(n.ns.frequencies, vec![0.0, 2.0]);
        assert!((n.ns.multipliers[1] + 1.0).norm() < 1e-15);
        assert_eq!(to_normalized_sum(&parse("exp(z)+exp(i*z)+1").unwrap()).unwrap_err(), Error::NotCollinear);
        assert_eq!(to_normalized_sum(&parse("z*exp(z)+1").unwrap()).unwrap_err(), Error::NonConstantMultipliers);
    }

    #[test]
    fn log_strips() {
        let s = log_strip(0.0, 1.0, 1).unwrap();
        assert!(s.contains(Complex64::new(10.0, 0.0)));
        assert!(s.contains(Complex64::new(10.0, 0.9 * 10f64.ln())));
        assert!(!s.contains(Complex64::new(10.0, 1.5 * 10f64.ln())));
        let s2 = log_strip(0.0, 1.0, 2).unwrap();
        assert!(!s2.contains(Complex64::new(10.0, 0.5)));
        assert!(s2.contains(Complex64::new(10.0, 0.2)));
    }
}
