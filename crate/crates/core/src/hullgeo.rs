//! Convex geometry of conjugated frequencies: hulls, supporting and indicator
//! functions, circumference, orthogonal and critical rays.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::expr::{Coeff, ExpPoly, NormalizedForm};
use crate::numeric::{gauss_legendre, gl_integrate};

/// Convex hull of the conjugated frequencies `w̄_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyHull {
    pub points: Vec<Complex64>,
    /// Counter-clockwise, starting from the lexicographic minimum.
    pub vertices: Vec<Complex64>,
    pub circumference: f64,
    /// Outer-normal directions of the hull edges, sorted in `[0, 2π)`.
    pub orthogonal_angles: Vec<f64>,
    pub is_segment: bool,
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn lex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU - 1e-15 {
        0.0
    } else {
        r
    }
}

/// Sort angles and drop those within `tol` of a neighbour (cyclically).
fn dedup_angles(mut v: Vec<f64>, tol: f64) -> Vec<f64> {
    v.iter_mut().for_each(|t| *t = wrap_angle(*t));
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for t in v {
        if out.last().map_or(true, |&l| t - l > tol) {
            out.push(t);
        }
    }
    if out.len() > 1 && out[0] + TAU - out[out.len() - 1] <= tol {
        out.pop();
    }
    out
}

/// Hull of `conj(frequencies)`, optionally together with the origin.
pub fn build_hull(frequencies: &[Complex64], include_origin: bool) -> FrequencyHull {
    let mut points: Vec<Complex64> = frequencies.iter().map(|w| w.conj()).collect();
    if include_origin {
        points.push(Complex64::new(0.0, 0.0));
    }
    hull_of_points(points)
}

/// Hull of a point cloud taken as given (no conjugation).
pub fn hull_of_points(points: Vec<Complex64>) -> FrequencyHull {
    let mut p = points.clone();
    p.sort_by(lex);
    p.dedup_by(|a, b| (*a - *b).norm() <= 1e-15 * (1.0 + b.norm()));
    let diameter = match (p.first(), p.last()) {
        (Some(a), Some(b)) => p.iter().map(|x| (x - a).norm().max((x - b).norm())).fold((b - a).norm(), f64::max),
        _ => 0.0,
    };
    let eps = 1e-12 * diameter.max(1e-300);
    let vertices = if p.len() <= 2 {
        p.clone()
    } else {
        // Monotone chain; a turn counts only when it exceeds the collinearity tolerance.
        let turn = |o: Complex64, a: Complex64, b: Complex64| cross(o, a, b) / (b - o).norm().max(1e-300);
        let mut lower: Vec<Complex64> = Vec::new();
        for &x in &p {
            while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], x) <= eps {
                lower.pop();
            }
            lower.push(x);
        }
        let mut upper: Vec<Complex64> = Vec::new();
        for &x in p.iter().rev() {
            while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], x) <= eps {
                upper.pop();
            }
            upper.push(x);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    };
    let is_segment = vertices.len() == 2;
    let circumference = match vertices.len() {
        0 | 1 => 0.0,
        n => (0..n).map(|i| (vertices[(i + 1) % n] - vertices[i]).norm()).sum(),
    };
    let orthogonal_angles = match vertices.len() {
        0 | 1 => Vec::new(),
        n => dedup_angles(
            (0..n)
                .map(|i| {
                    let d = vertices[(i + 1) % n] - vertices[i];
                    // outer normal of a CCW edge: rotate by -π/2
                    d.im.atan2(d.re) - PI / 2.0
                })
                .collect(),
            1e-12,
        ),
    };
    FrequencyHull { points, vertices, circumference, orthogonal_angles, is_segment }
}

impl FrequencyHull {
    /// Supporting function `k(θ) = max_j Re(w_j e^{iθ})` of the original
    /// (un-conjugated) frequencies.
    pub fn supporting_function(&self, theta: f64) -> f64 {
        let e = Complex64::from_polar(1.0, theta);
        self.points.iter().map(|p| (p.conj() * e).re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫_0^{2π} k(θ) dθ`, split at the orthogonal angles where `k` has cusps.
    pub fn circumference_by_quadrature(&self, nodes: usize) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        let mut cuts = self.orthogonal_angles.clone();
        if cuts.is_empty() {
            cuts.push(0.0);
        }
        let arcs: Vec<(f64, f64)> = (0..cuts.len())
            .map(|i| {
                let a = cuts[i];
                let b = if i + 1 < cuts.len() { cuts[i + 1] } else { cuts[0] + TAU };
                (a, b)
            })
            .collect();
        let per_arc = (nodes / arcs.len()).max(4);
        let integrate = |n: usize| {
            let rule = gauss_legendre(n);
            arcs.iter().map(|&(a, b)| gl_integrate(|t| self.supporting_function(t), a, b, &rule)).sum::<f64>()
        };
        let mut n = per_arc;
        let mut prev = integrate(n);
        while n < 4096 {
            n *= 2;
            let cur = integrate(n);
            if (cur - prev).abs() < 1e-12 * (1.0 + cur.abs()) {
                return cur;
            }
            prev = cur;
        }
        prev
    }

    /// True when the origin lies in the closed hull.
    pub fn contains_origin(&self) -> bool {
        let v = &self.vertices;
        let zero = Complex64::new(0.0, 0.0);
        match v.len() {
            0 => false,
            1 => v[0].norm() <= 1e-12,
            2 => cross(v[0], v[1], zero).abs() <= 1e-12 * (v[1] - v[0]).norm() && {
                let t = ((zero - v[0]) * (v[1] - v[0]).conj()).re / (v[1] - v[0]).norm_sqr();
                (-1e-12..=1.0 + 1e-12).contains(&t)
            },
            n => (0..n).all(|i| cross(v[i], v[(i + 1) % n], zero) >= -1e-12),
        }
    }
}

/// Frequencies of the normalized form, with `0` appended for a nonzero tail.
fn nf_frequencies<C: Coeff>(nf: &NormalizedForm<C>) -> Vec<Complex64> {
    nf.frequencies_with_tail()
}

/// Indicator `h_f(θ) = max_j Re(w_j e^{iqθ})`, the tail counting as `w = 0`.
pub fn indicator<C: Coeff>(nf: &NormalizedForm<C>, theta: f64) -> f64 {
    let e = Complex64::from_polar(1.0, nf.q as f64 * theta);
    nf_frequencies(nf).iter().map(|w| (w * e).re).fold(f64::NEG_INFINITY, f64::max)
}

/// Critical rays `(θ⊥ + 2kπ)/q` over the orthogonal angles of the frequency hull.
pub fn critical_rays<C: Coeff>(nf: &NormalizedForm<C>) -> Vec<f64> {
    let h = build_hull(&nf_frequencies(nf), false);
    let q = nf.q as f64;
    let mut v = Vec::new();
    for &t in &h.orthogonal_angles {
        for k in 0..nf.q {
            v.push((t + TAU * k as f64) / q);
        }
    }
    dedup_angles(v, 1e-12)
}

/// Hull data used throughout: `C = C(co(W))` and `C₀ = C(co(W ∪ {0}))` of the
/// top-order frequencies, with the tail counted as the zero frequency in `W`.
#[derive(Clone, Debug, Serialize)]
pub struct HullSummary {
    pub q: usize,
    pub frequencies: Vec<Complex64>,
    pub hull: FrequencyHull,
    pub hull0: FrequencyHull,
    pub critical_rays: Vec<f64>,
}

pub fn summarize<C: Coeff>(f: &ExpPoly<C>) -> crate::Result<HullSummary> {
    let nf = f.normalize()?;
    let freqs = nf_frequencies(&nf);
    Ok(HullSummary {
        q: nf.q,
        hull: build_hull(&freqs, false),
        hull0: build_hull(&freqs, true),
        critical_rays: critical_rays(&nf),
        frequencies: freqs,
    })
}
