//! Nevanlinna functionals of exponential polynomials and their quotients.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Coeff, Compiled, ExpPoly};
use crate::hullgeo::{self, build_hull, FrequencyHull};
use crate::numeric::{adaptive, gauss_legendre, gl_integrate};
use crate::parallel::pool;
use crate::zerolab::{integrated_count, zeros_in_disc, Analytic, Zero};

/// `log|f|` is clamped at `LOG_FLOOR` below `log Σ|terms|`, which only bites
/// at cancellation near zeros.
const LOG_FLOOR: f64 = 60.0;
const REL_TOL: f64 = 1e-8;

/// `(1/2π) ∫_0^{2π} g(θ) dθ` by adaptive Gauss–Kronrod panels. `panels`
/// sets how many starting panels are used.
pub fn circle_mean(g: &(impl Fn(f64) -> f64 + Sync), panels: usize, rel_tol: f64) -> f64 {
    let panels = panels.max(16);
    let h = TAU / panels as f64;
    let rule = gauss_legendre(8);
    // Scale by ∫|g| so that a mean near zero does not demand absolute accuracy.
    let abs_g = |t: f64| g(t).abs();
    let coarse: f64 = (0..panels).map(|k| gl_integrate(&abs_g, k as f64 * h, (k + 1) as f64 * h, &rule)).sum();
    let tol = (rel_tol * coarse).max(1e-13) / panels as f64;
    let total: f64 = pool().install(|| {
        (0..panels)
            .into_par_iter()
            .map(|k| adaptive(g, k as f64 * h, (k + 1) as f64 * h, tol, 1e-13))
            .sum()
    });
    total / TAU
}

/// Starting panel count: enough to see the oscillation of `e^{w z^q}` on `|z| = r`.
fn panels_for(f: &ExpPoly<impl Coeff>, r: f64) -> usize {
    let q = f.order().max(1) as i32;
    let w = f
        .terms()
        .iter()
        .map(|t| t.exponent.coeffs().iter().enumerate().map(|(k, c)| c.magnitude() * r.powi(k as i32)).sum::<f64>())
        .fold(0.0, f64::max);
    ((w * q as f64 / 4.0).ceil() as usize).clamp(64, 40_000)
}

fn log_plus(x: f64) -> f64 {
    x.max(0.0)
}

/// Proximity function `m(r, f) = (1/2π) ∫ log⁺|f(re^{iθ})| dθ`.
pub fn proximity<C: Coeff>(f: &ExpPoly<C>, r: f64, nodes: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    let cf = Compiled::new(f);
    let g = |t: f64| log_plus(cf.eval(Complex64::from_polar(r, t)).ln_abs());
    Ok(circle_mean(&g, nodes.max(panels_for(f, r)), REL_TOL))
}

fn floored_ln_abs(cf: &Compiled, z: Complex64) -> f64 {
    let d = cf.eval_detail(z);
    d.value.ln_abs().max(d.ln_abs_sum - LOG_FLOOR)
}

/// `m(r, 1/f)`.
pub fn proximity_reciprocal<C: Coeff>(f: &ExpPoly<C>, r: f64) -> f64 {
    let cf = Compiled::new(f);
    let g = |t: f64| log_plus(-floored_ln_abs(&cf, Complex64::from_polar(r, t)));
    circle_mean(&g, panels_for(f, r), REL_TOL)
}

/// `(1/2π) ∫ log|f(re^{iθ})| dθ`.
pub fn log_mean<C: Coeff>(f: &ExpPoly<C>, r: f64) -> f64 {
    let cf = Compiled::new(f);
    let g = |t: f64| floored_ln_abs(&cf, Complex64::from_polar(r, t));
    circle_mean(&g, panels_for(f, r), REL_TOL)
}

/// `N(r, 1/f)` by Jensen's formula: `log_mean(r) − log|c_k|`, where `c_k z^k` is
/// the first nonzero Taylor term at the origin.
pub fn jensen_counting<C: Coeff>(f: &ExpPoly<C>, r: f64) -> f64 {
    let f = f.to_c64();
    let mut fact: f64 = 1.0;
    let mut k = 0usize;
    let mut d = f.clone();
    loop {
        let cd = Compiled::new(&d);
        let det = cd.eval_detail(Complex64::new(0.0, 0.0));
        if !det.value.is_zero() && det.value.ln_abs() - det.ln_abs_sum > -25.0 || k >= 12 {
            let lc = det.value.ln_abs() - fact.ln();
            return log_mean(&f, r) - lc;
        }
        k += 1;
        fact *= k as f64;
        d = d.derivative(1);
    }
}

/// Weighted least squares `y ≈ a r^q + b` with weights `r^q` over the upper
/// half of the grid; returns `a`.
pub fn fit_leading(r: &[f64], y: &[f64], q: usize) -> f64 {
    let start = r.len() / 2;
    let (rs, ys) = (&r[start..], &y[start..]);
    if rs.len() < 2 {
        return ys[0] / rs[0].powi(q as i32);
    }
    let x: Vec<f64> = rs.iter().map(|v| v.powi(q as i32)).collect();
    let w = &x;
    let sw: f64 = w.iter().sum();
    let mx = w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = w.iter().zip(ys).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxy: f64 = w.iter().zip(&x).zip(ys).map(|((wi, xi), yi)| wi * (xi - mx) * (yi - my)).sum();
    let sxx: f64 = w.iter().zip(&x).map(|(wi, xi)| wi * (xi - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacteristicReport {
    pub r_grid: Vec<f64>,
    pub m_values: Vec<f64>,
    /// `N(r, f)`; zero for entire `f`.
    pub n_values: Vec<f64>,
    pub t_values: Vec<f64>,
    /// `N(r, 1/f)` from located zeros.
    pub zero_counting: Vec<f64>,
    /// `N(r, 1/f)` from Jensen's formula, as a cross-check.
    pub zero_counting_jensen: Vec<f64>,
    pub fitted_leading: f64,
    /// `C(co(W ∪ {0})) / 2π`.
    pub predicted_leading: f64,
    pub relative_gap: f64,
    pub zero_fitted_leading: f64,
    /// `C(co(W)) / 2π`.
    pub zero_predicted_leading: f64,
    pub zero_relative_gap: f64,
}

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() || r_grid.iter().any(|&r| !(r > 0.0)) || r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("radial grid must be nonempty, positive and increasing".into()));
    }
    Ok(())
}

/// Zeros of `f` in `|z| ≤ r_max`, for counting functions on a grid.
fn zeros_up_to<C: Coeff>(f: &ExpPoly<C>, r_max: f64) -> Result<Vec<Zero>> {
    let an = Analytic::new(f)?;
    let zl = zeros_in_disc(&an, r_max)?;
    if !zl.certified {
        return Err(Error::ConvergenceFailure("zero isolation left unresolved clusters".into()));
    }
    Ok(zl.zeros)
}

pub fn characteristic_grid<C: Coeff>(f: &ExpPoly<C>, r_grid: &[f64]) -> Result<CharacteristicReport> {
    check_grid(r_grid)?;
    let s = hullgeo::summarize(f)?;
    let zeros = zeros_up_to(f, *r_grid.last().expect("nonempty"))?;
    let m_values = r_grid.iter().map(|&r| proximity(f, r, 64)).collect::<Result<Vec<_>>>()?;
    let n_values = vec![0.0; r_grid.len()];
    let t_values = m_values.clone();
    let zero_counting: Vec<f64> = r_grid.iter().map(|&r| integrated_count(&zeros, r)).collect();
    let zero_counting_jensen = r_grid.iter().map(|&r| jensen_counting(f, r)).collect();
    let fitted = fit_leading(r_grid, &t_values, s.q);
    let predicted = s.hull0.circumference / TAU;
    let zfit = fit_leading(r_grid, &zero_counting, s.q);
    let zpred = s.hull.circumference / TAU;
    Ok(CharacteristicReport {
        r_grid: r_grid.to_vec(),
        m_values,
        n_values,
        t_values,
        zero_counting,
        zero_counting_jensen,
        fitted_leading: fitted,
        predicted_leading: predicted,
        relative_gap: rel_gap(fitted, predicted),
        zero_fitted_leading: zfit,
        zero_predicted_leading: zpred,
        zero_relative_gap: rel_gap(zfit, zpred),
    })
}

fn rel_gap(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

/// The value whose deficiency is estimated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Finite(Complex64),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficiencyEstimate {
    pub value: Target,
    pub delta_estimate: f64,
    /// `1 − C/C₀` for `a = 0`.
    pub predicted: Option<f64>,
}

/// `δ(a) ≈ 1 − max_{upper half of grid} N(r, 1/(f − a)) / T(r, f)`, clamped to `[0, 1]`.
pub fn deficiency<C: Coeff>(f: &ExpPoly<C>, a: Target, r_grid: &[f64]) -> Result<DeficiencyEstimate> {
    check_grid(r_grid)?;
    let fc = f.to_c64();
    let s = hullgeo::summarize(&fc)?;
    let start = r_grid.len() / 2;
    let upper = &r_grid[start..];
    let t: Vec<f64> = upper.iter().map(|&r| proximity(&fc, r, 64)).collect::<Result<_>>()?;
    let counting: Vec<f64> = match a {
        Target::Infinity => vec![0.0; upper.len()],
        Target::Finite(v) => {
            let g = fc.sub(&ExpPoly::constant(v));
            let zeros = zeros_up_to(&g, *upper.last().expect("nonempty"))?;
            upper.iter().map(|&r| integrated_count(&zeros, r)).collect()
        }
    };
    let ratio = counting.iter().zip(&t).map(|(n, t)| n / t).fold(f64::NEG_INFINITY, f64::max);
    let predicted = match a {
        Target::Finite(v) if v.norm() == 0.0 => Some(1.0 - s.hull.circumference / s.hull0.circumference),
        _ => None,
    };
    Ok(DeficiencyEstimate { value: a, delta_estimate: (1.0 - ratio).clamp(0.0, 1.0), predicted })
}

/// Maximum of `|log|f(re^{iθ})| / r^ρ − h_f(θ)|` on each circle of the grid,
/// skipping samples inside the discs `|z − z_n| ≤ 1/κ(|z_n|)`,
/// `κ(x) = x^q log²(x + e)`, around the zeros.
pub fn crg_check<C: Coeff>(f: &ExpPoly<C>, rho: f64, r_grid: &[f64], samples: usize) -> Result<Vec<(f64, f64)>> {
    check_grid(r_grid)?;
    if !(rho > 0.0) {
        return Err(Error::InvalidInput("ρ must be positive".into()));
    }
    let fc = f.to_c64();
    let nf = fc.normalize()?;
    let q = nf.q as i32;
    let zeros = zeros_up_to(&fc, r_grid.last().expect("nonempty") + 1.0)?;
    let cf = Compiled::new(&fc);
    let kappa = |x: f64| x.powi(q) * (x + std::f64::consts::E).ln().powi(2);
    let mut out = Vec::new();
    for &r in r_grid {
        let near: Vec<(Complex64, f64)> = zeros
            .iter()
            .filter(|z| (z.z().norm() - r).abs() <= 1.0)
            .map(|z| (z.z(), 1.0 / kappa(z.z().norm())))
            .collect();
        let mut dev: f64 = 0.0;
        for k in 0..samples {
            let t = TAU * k as f64 / samples as f64;
            let z = Complex64::from_polar(r, t);
            if near.iter().any(|(zn, d)| (z - zn).norm() <= *d) {
                continue;
            }
            let v = cf.eval(z).ln_abs() / r.powf(rho) - hullgeo::indicator(&nf, t);
            dev = dev.max(v.abs());
        }
        out.push((r, dev));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientAnalysis {
    pub g: String,
    pub h: String,
    pub a: Complex64,
    pub b: Complex64,
    /// `S = 1/(f − a) − b = (h − b g + a b h) / (g − a h)`.
    pub s_numerator: String,
    pub s_denominator: String,
    pub frequencies: Vec<Complex64>,
    pub hull: FrequencyHull,
    /// Values detected as deficient from vertex multipliers.
    pub deficient: Vec<Target>,
}

/// Union of the order-`q` frequencies of several functions (tail as `0`).
fn joint_frequencies(fs: &[&ExpPoly], q: usize) -> Result<Vec<Complex64>> {
    let mut out: Vec<Complex64> = Vec::new();
    for f in fs {
        if f.is_zero() {
            continue;
        }
        for w in f.normalize_at(q)?.frequencies_with_tail() {
            if !out.iter().any(|v| v.matches(&w)) {
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// Multiplier of `e^{w z^q}` in `f` (the tail for `w = 0`).
fn multiplier_at(f: &ExpPoly, q: usize, w: Complex64) -> Result<ExpPoly> {
    if f.is_zero() {
        return Ok(ExpPoly::zero());
    }
    let nf = f.normalize_at(q)?;
    if w.norm() == 0.0 {
        return Ok(nf.tail);
    }
    Ok(nf.frequencies.iter().position(|v| v.matches(&w)).map_or_else(ExpPoly::zero, |k| nf.multipliers[k].clone()))
}

fn retains_all(f: &ExpPoly, q: usize, ws: &[Complex64]) -> Result<bool> {
    for &w in ws {
        if multiplier_at(f, q, w)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Gaussian integers ordered by norm, then by argument in `[0, 2π)`.
pub fn gaussian_spiral(count: usize) -> Vec<Complex64> {
    let mut v = Vec::new();
    let mut rad = 0i64;
    while v.len() < count {
        let mut ring: Vec<(i64, i64)> = Vec::new();
        for x in -rad..=rad {
            for y in -rad..=rad {
                if x.abs().max(y.abs()) == rad {
                    ring.push((x, y));
                }
            }
        }
        v.extend(ring);
        rad += 1;
    }
    let mut v: Vec<Complex64> = v.into_iter().map(|(x, y)| Complex64::new(x as f64, y as f64)).collect();
    v.sort_by(|a, b| {
        a.norm_sqr().total_cmp(&b.norm_sqr()).then(a.arg().rem_euclid(TAU).total_cmp(&b.arg().rem_euclid(TAU)))
    });
    v.truncate(count);
    v
}

/// Constant ratio `g/h`, if there is one.
fn constant_ratio(g: &ExpPoly, h: &ExpPoly) -> Option<Complex64> {
    if g.is_zero() {
        return Some(Complex64::new(0.0, 0.0));
    }
    let tg = &g.terms()[0];
    let th = h.terms().iter().find(|t| t.exponent.matches(&tg.exponent))?;
    let c = *tg.multiplier.lead()? / *th.multiplier.lead()?;
    g.approx_eq(&h.scale(&c), 1e-12).then_some(c)
}

pub fn quotient_normal_form<C: Coeff>(g: &ExpPoly<C>, h: &ExpPoly<C>) -> Result<QuotientAnalysis> {
    let (g, h) = (g.to_c64(), h.to_c64());
    if h.is_zero() {
        return Err(Error::InvalidInput("zero denominator".into()));
    }
    if constant_ratio(&g, &h).is_some() {
        return Err(Error::DegenerateQuotient);
    }
    let q = g.order().max(h.order());
    if q == 0 {
        return Err(Error::NotTranscendental);
    }
    let ws = joint_frequencies(&[&g, &h], q)?;
    let spiral = gaussian_spiral(100);
    let a = spiral
        .iter()
        .copied()
        .find(|&a| retains_all(&g.sub(&h.scale(&a)), q, &ws).unwrap_or(false))
        .ok_or(Error::DegenerateQuotient)?;
    let den = g.sub(&h.scale(&a));
    let b = spiral
        .iter()
        .copied()
        .find(|&b| retains_all(&h.sub(&den.scale(&b)), q, &ws).unwrap_or(false))
        .ok_or(Error::DegenerateQuotient)?;
    let num = h.sub(&den.scale(&b));
    let hull = build_hull(&ws, false);
    let deficient = vertex_deficiencies(&g, &h, q, &hull)?;
    Ok(QuotientAnalysis {
        g: g.to_expr_string(),
        h: h.to_expr_string(),
        a,
        b,
        s_numerator: num.to_expr_string(),
        s_denominator: den.to_expr_string(),
        frequencies: ws,
        hull,
        deficient,
    })
}

/// At each hull vertex `w̄_j`: `H_j ≡ 0` makes `∞` deficient and `G_j ≡ a H_j`
/// makes `a` deficient.
fn vertex_deficiencies(g: &ExpPoly, h: &ExpPoly, q: usize, hull: &FrequencyHull) -> Result<Vec<Target>> {
    let mut out: Vec<Target> = Vec::new();
    for v in &hull.vertices {
        let w = v.conj();
        let gj = multiplier_at(g, q, w)?;
        let hj = multiplier_at(h, q, w)?;
        let t = if hj.is_zero() {
            Some(Target::Infinity)
        } else {
            constant_ratio(&gj, &hj).map(Target::Finite)
        };
        if let Some(t) = t {
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Common zeros of `g` and `h` in `|z| ≤ r_max`, each counted `min(μ, ν)` times.
pub fn common_zeros<C: Coeff>(g: &ExpPoly<C>, h: &ExpPoly<C>, r_max: f64) -> Result<Vec<Zero>> {
    let zg = zeros_up_to(g, r_max)?;
    let zh = zeros_up_to(h, r_max)?;
    let mut out = Vec::new();
    for a in &zg {
        if let Some(b) = zh.iter().find(|b| (a.z() - b.z()).norm() <= 1e-8 * (1.0 + a.z().norm())) {
            out.push(Zero { re: a.re, im: a.im, multiplicity: a.multiplicity.min(b.multiplicity) });
        }
    }
    Ok(out)
}

/// Counting data for common zeros. There is no asymptotic prediction here, so
/// `predicted` is zero and `residuals` equal the counts.
pub fn common_zero_count<C: Coeff>(g: &ExpPoly<C>, h: &ExpPoly<C>, r_grid: &[f64]) -> Result<crate::zerolab::CountReport> {
    check_grid(r_grid)?;
    let zs = common_zeros(g, h, *r_grid.last().expect("nonempty"))?;
    let counts: Vec<u64> = r_grid.iter().map(|&r| crate::zerolab::count_in_disc(&zs, r)).collect();
    Ok(crate::zerolab::CountReport {
        r_grid: r_grid.to_vec(),
        integrated: r_grid.iter().map(|&r| integrated_count(&zs, r)).collect(),
        predicted: vec![0.0; r_grid.len()],
        residuals: counts.iter().map(|&n| n as f64).collect(),
        counts,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientGrowthReport {
    pub r_grid: Vec<f64>,
    /// `m(r, g/h)`.
    pub m_values: Vec<f64>,
    /// `N(r, g/h) = N(r, 1/h) − N(r, g, h)`.
    pub pole_counting: Vec<f64>,
    /// `N(r, g, h)`.
    pub common_counting: Vec<f64>,
    pub t_values: Vec<f64>,
    pub t_fitted_leading: f64,
    /// `C(co(W_f))/2π − (fitted leading coefficient of N(r, g, h))`.
    pub t_predicted_leading: f64,
    pub m_fitted_leading: f64,
    pub pole_fitted_leading: f64,
    pub circumference: f64,
}

pub fn quotient_growth_report<C: Coeff>(g: &ExpPoly<C>, h: &ExpPoly<C>, r_grid: &[f64]) -> Result<QuotientGrowthReport> {
    check_grid(r_grid)?;
    let (g, h) = (g.to_c64(), h.to_c64());
    if h.is_zero() {
        return Err(Error::InvalidInput("zero denominator".into()));
    }
    let q = g.order().max(h.order());
    if q == 0 {
        return Err(Error::NotTranscendental);
    }
    let ws = joint_frequencies(&[&g, &h], q)?;
    let cc = build_hull(&ws, false).circumference;
    let r_max = *r_grid.last().expect("nonempty");
    let zh = zeros_up_to(&h, r_max)?;
    let common = common_zeros(&g, &h, r_max)?;
    let (cg, ch) = (Compiled::new(&g), Compiled::new(&h));
    let m_values: Vec<f64> = r_grid
        .iter()
        .map(|&r| {
            let fun = |t: f64| {
                let z = Complex64::from_polar(r, t);
                log_plus(floored_ln_abs(&cg, z) - floored_ln_abs(&ch, z))
            };
            circle_mean(&fun, panels_for(&g, r).max(panels_for(&h, r)), REL_TOL)
        })
        .collect();
    let common_counting: Vec<f64> = r_grid.iter().map(|&r| integrated_count(&common, r)).collect();
    let pole_counting: Vec<f64> =
        r_grid.iter().zip(&common_counting).map(|(&r, c)| integrated_count(&zh, r) - c).collect();
    let t_values: Vec<f64> = m_values.iter().zip(&pole_counting).map(|(m, n)| m + n).collect();
    Ok(QuotientGrowthReport {
        t_fitted_leading: fit_leading(r_grid, &t_values, q),
        t_predicted_leading: cc / TAU - fit_leading(r_grid, &common_counting, q),
        m_fitted_leading: fit_leading(r_grid, &m_values, q),
        pole_fitted_leading: fit_leading(r_grid, &pole_counting, q),
        circumference: cc,
        r_grid: r_grid.to_vec(),
        m_values,
        pole_counting,
        common_counting,
        t_values,
    })
}

/// Geometric grid of `n` radii from `a` to `b`.
pub fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect()
}

/// Linear grid of `n` radii from `a` to `b`.
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}
