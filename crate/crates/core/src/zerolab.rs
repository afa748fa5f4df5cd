//! Zero location and counting by the argument principle.
//!
//! The argument of `f` is tracked along the contour with scaled evaluation.
//! A segment is accepted once its principal argument increment is below π/4
//! and its length times `|f'/f|` at both ends is below 1; the second test
//! keeps every zero at a distance comparable to the segment length, so the
//! principal increment cannot miss a turn.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Coeff, Compiled, ExpPoly, Scaled};
use crate::hullgeo;
use crate::parallel::pool;
use crate::strips::{angle_diff, log_strip, CriticalStrip, NormalizedSum};

const MAX_SEGMENTS: usize = 1 << 20;
/// Below this ratio of `|f|` to the sum of term magnitudes the float value is noise.
const NOISE_RATIO: f64 = 1e-11;
const MAX_MULTIPLICITY: usize = 8;

/// Positively oriented closed contour.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Contour {
    Circle { r: f64 },
    Rectangle { x1: f64, x2: f64, y1: f64, y2: f64 },
    /// `{ z : |z| < r, θ1 < arg z < θ2 }`.
    Sector { r: f64, theta1: f64, theta2: f64 },
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Line(Complex64, Complex64),
    Arc { r: f64, t0: f64, t1: f64 },
}

impl Piece {
    fn at(&self, s: f64) -> Complex64 {
        match *self {
            Piece::Line(a, b) => a + (b - a) * s,
            Piece::Arc { r, t0, t1 } => Complex64::from_polar(r, t0 + (t1 - t0) * s),
        }
    }

    fn initial_segments(&self) -> usize {
        match *self {
            Piece::Line(..) => 8,
            Piece::Arc { t0, t1, .. } => (((t1 - t0).abs() / TAU) * 64.0).ceil().max(8.0) as usize,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Contour {
    pub fn rectangle(x1: f64, x2: f64, y1: f64, y2: f64) -> Result<Contour> {
        if !(x1 < x2 && y1 < y2) {
            return Err(Error::InvalidInput("rectangle needs x1 < x2 and y1 < y2".into()));
        }
        Ok(Contour::Rectangle { x1, x2, y1, y2 })
    }

    pub fn circle(r: f64) -> Result<Contour> {
        if !(r > 0.0) {
            return Err(Error::InvalidInput("circle needs r > 0".into()));
        }
        Ok(Contour::Circle { r })
    }

    fn pieces(&self) -> Vec<Piece> {
        match *self {
            Contour::Circle { r } => vec![Piece::Arc { r, t0: 0.0, t1: TAU }],
            Contour::Rectangle { x1, x2, y1, y2 } => vec![
                Piece::Line(c(x1, y1), c(x2, y1)),
                Piece::Line(c(x2, y1), c(x2, y2)),
                Piece::Line(c(x2, y2), c(x1, y2)),
                Piece::Line(c(x1, y2), c(x1, y1)),
            ],
            Contour::Sector { r, theta1, theta2 } => vec![
                Piece::Line(c(0.0, 0.0), Complex64::from_polar(r, theta1)),
                Piece::Arc { r, t0: theta1, t1: theta2 },
                Piece::Line(Complex64::from_polar(r, theta2), c(0.0, 0.0)),
            ],
        }
    }

    /// Typical size, used to scale perturbations.
    pub fn size(&self) -> f64 {
        match *self {
            Contour::Circle { r } | Contour::Sector { r, .. } => r,
            Contour::Rectangle { x1, x2, y1, y2 } => x1.abs().max(x2.abs()).max(y1.abs()).max(y2.abs()),
        }
    }

    /// Enlarge by `eps` (radius, or every side of a rectangle).
    pub fn inflate(&self, eps: f64) -> Contour {
        match *self {
            Contour::Circle { r } => Contour::Circle { r: r + eps },
            Contour::Rectangle { x1, x2, y1, y2 } => Contour::Rectangle { x1: x1 - eps, x2: x2 + eps, y1: y1 - eps, y2: y2 + eps },
            Contour::Sector { r, theta1, theta2 } => {
                let dt = eps / r.max(1.0);
                Contour::Sector { r: r + eps, theta1: theta1 - dt, theta2: theta2 + dt }
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Contour::Circle { r } => z.norm() < r,
            Contour::Rectangle { x1, x2, y1, y2 } => z.re > x1 && z.re < x2 && z.im > y1 && z.im < y2,
            Contour::Sector { r, theta1, theta2 } => {
                z.norm() < r && {
                    let d = (z.arg() - theta1).rem_euclid(TAU);
                    d > 0.0 && d < theta2 - theta1
                }
            }
        }
    }

    fn bounding_rect(&self) -> (f64, f64, f64, f64) {
        match *self {
            Contour::Circle { r } => (-r, r, -r, r),
            Contour::Rectangle { x1, x2, y1, y2 } => (x1, x2, y1, y2),
            Contour::Sector { r, .. } => (-r, r, -r, r),
        }
    }
}

/// `f` and its derivatives prepared for repeated evaluation.
pub struct Analytic {
    derivs: Vec<Compiled>,
}

#[derive(Clone, Copy, Debug)]
struct Sample {
    s: f64,
    z: Complex64,
    arg: f64,
    dlog: f64,
}

impl Analytic {
    pub fn new<C: Coeff>(f: &ExpPoly<C>) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::InvalidInput("the zero function has no isolated zeros".into()));
        }
        let f = f.to_c64();
        let derivs = (0..=MAX_MULTIPLICITY).map(|k| Compiled::new(&f.derivative(k))).collect();
        Ok(Analytic { derivs })
    }

    pub fn eval(&self, z: Complex64) -> Scaled {
        self.derivs[0].eval(z)
    }

    /// Ratio `|f(z)| / Σ |terms|`; small values mean the float value is unreliable.
    pub fn cancellation(&self, z: Complex64) -> f64 {
        let d = self.derivs[0].eval_detail(z);
        (d.value.ln_abs() - d.ln_abs_sum).exp()
    }

    fn sample(&self, piece: &Piece, s: f64) -> Result<Sample> {
        let z = piece.at(s);
        let d = self.derivs[0].eval_detail(z);
        if d.value.is_zero() || d.value.ln_abs() - d.ln_abs_sum < NOISE_RATIO.ln() {
            return Err(Error::ZeroOnContour(format!("{:.6}{:+.6}i", z.re, z.im)));
        }
        let df = self.derivs[1].eval(z);
        let dlog = if df.is_zero() { 0.0 } else { (df.ln_abs() - d.value.ln_abs()).exp() };
        Ok(Sample { s, z, arg: d.value.arg(), dlog })
    }

    /// Winding number of `f` around the contour.
    pub fn winding(&self, contour: &Contour) -> Result<i64> {
        let mut total = 0.0;
        let mut splits = 0usize;
        for piece in contour.pieces() {
            let n0 = piece.initial_segments();
            let pts = (0..=n0).map(|k| self.sample(&piece, k as f64 / n0 as f64)).collect::<Result<Vec<_>>>()?;
            let mut stack: Vec<(Sample, Sample)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
            while let Some((a, b)) = stack.pop() {
                let h = (b.z - a.z).norm();
                let darg = angle_diff(b.arg, a.arg);
                if darg.abs() < PI / 4.0 && h * a.dlog.max(b.dlog) < 1.0 {
                    total += darg;
                    continue;
                }
                if h < 1e-10 * (1.0 + a.z.norm()) {
                    return Err(Error::ZeroOnContour(format!("{:.6}{:+.6}i", a.z.re, a.z.im)));
                }
                splits += 1;
                if splits > MAX_SEGMENTS {
                    return Err(Error::ConvergenceFailure("argument tracking exceeded the segment cap".into()));
                }
                let m = self.sample(&piece, 0.5 * (a.s + b.s))?;
                stack.push((a, m));
                stack.push((m, b));
            }
        }
        let w = total / TAU;
        let k = w.round();
        if (w - k).abs() > 0.05 {
            return Err(Error::ConvergenceFailure(format!("non-integral winding {w}")));
        }
        Ok(k as i64)
    }

    /// Winding with up to three outward perturbations on `ZeroOnContour`.
    pub fn winding_perturbed(&self, contour: &Contour) -> Result<(i64, Contour)> {
        let mut cur = *contour;
        let mut last = None;
        for _ in 0..4 {
            match self.winding(&cur) {
                Ok(k) => return Ok((k, cur)),
                Err(e @ Error::ZeroOnContour(_)) => {
                    last = Some(e);
                    cur = cur.inflate(1e-6 * (1.0 + contour.size()));
                }
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// Newton iteration on `f^{(k)}` from `z0`.
    fn newton(&self, k: usize, z0: Complex64) -> Option<Complex64> {
        let mut z = z0;
        for _ in 0..80 {
            let g = self.derivs[k].eval(z);
            if g.is_zero() {
                return Some(z);
            }
            let dg = self.derivs[k + 1].eval(z);
            if dg.is_zero() {
                return None;
            }
            let step = g.div(&dg).value();
            if !step.is_finite() {
                return None;
            }
            z -= step;
            if step.norm() <= 1e-14 * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        None
    }
}

/// One located zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Zero {
    pub re: f64,
    pub im: f64,
    pub multiplicity: u32,
}

impl Zero {
    pub fn z(&self) -> Complex64 {
        c(self.re, self.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroList {
    /// Sorted by modulus, then argument.
    pub zeros: Vec<Zero>,
    /// The region actually used (after any perturbation).
    pub region: Contour,
    /// Multiplicities add up to the winding count and every box was resolved.
    pub certified: bool,
}

impl ZeroList {
    pub fn total(&self) -> u64 {
        self.zeros.iter().map(|z| z.multiplicity as u64).sum()
    }
}

pub fn winding_count<C: Coeff>(f: &ExpPoly<C>, contour: &Contour) -> Result<i64> {
    Analytic::new(f)?.winding(contour)
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
    m: i64,
}

impl Cell {
    fn contour(&self) -> Contour {
        Contour::Rectangle { x1: self.x1, x2: self.x2, y1: self.y1, y2: self.y2 }
    }
    fn size(&self) -> f64 {
        (self.x2 - self.x1).max(self.y2 - self.y1)
    }
    fn center(&self) -> Complex64 {
        c(0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))
    }
    fn holds(&self, z: Complex64) -> bool {
        z.re >= self.x1 && z.re <= self.x2 && z.im >= self.y1 && z.im <= self.y2
    }

    fn split(&self, frac: f64) -> Vec<Cell> {
        let (w, h) = (self.x2 - self.x1, self.y2 - self.y1);
        let xm = self.x1 + frac * w;
        let ym = self.y1 + (1.0 - frac) * h;
        let mk = |x1, x2, y1, y2| Cell { x1, x2, y1, y2, m: 0 };
        if w > 2.0 * h {
            vec![mk(self.x1, xm, self.y1, self.y2), mk(xm, self.x2, self.y1, self.y2)]
        } else if h > 2.0 * w {
            vec![mk(self.x1, self.x2, self.y1, ym), mk(self.x1, self.x2, ym, self.y2)]
        } else {
            vec![
                mk(self.x1, xm, self.y1, ym),
                mk(xm, self.x2, self.y1, ym),
                mk(self.x1, xm, ym, self.y2),
                mk(xm, self.x2, ym, self.y2),
            ]
        }
    }
}

enum Outcome {
    Found(Zero, bool),
    Split(Vec<Cell>),
}

const SPLIT_FRACTIONS: [f64; 4] = [0.4871, 0.5317, 0.4411, 0.5683];

fn process(an: &Analytic, cell: Cell, tol: f64) -> Result<Outcome> {
    let m = cell.m as usize;
    let k = m.min(MAX_MULTIPLICITY) - 1;
    if m <= MAX_MULTIPLICITY - 1 {
        if let Some(z) = an.newton(k, cell.center()) {
            if cell.holds(z) {
                if m == 1 {
                    return Ok(Outcome::Found(Zero { re: z.re, im: z.im, multiplicity: 1 }, true));
                }
                // A small box around the Newton limit must carry the whole count.
                let rho = (cell.size() / 4.0).min(1e-4 * (1.0 + z.norm()));
                let small = Contour::Rectangle { x1: z.re - rho, x2: z.re + rho, y1: z.im - rho, y2: z.im + rho };
                if let Ok(w) = an.winding(&small) {
                    if w == cell.m {
                        return Ok(Outcome::Found(Zero { re: z.re, im: z.im, multiplicity: m as u32 }, true));
                    }
                }
            }
        }
    }
    if cell.size() < tol {
        let z = cell.center();
        return Ok(Outcome::Found(Zero { re: z.re, im: z.im, multiplicity: m as u32 }, false));
    }
    let mut last_err = None;
    for frac in SPLIT_FRACTIONS {
        let mut kids = cell.split(frac);
        let counts: Result<Vec<i64>> = kids.iter().map(|kid| an.winding(&kid.contour())).collect();
        match counts {
            Ok(v) if v.iter().sum::<i64>() == cell.m && v.iter().all(|&x| x >= 0) => {
                for (kid, n) in kids.iter_mut().zip(v) {
                    kid.m = n;
                }
                kids.retain(|kid| kid.m > 0);
                return Ok(Outcome::Split(kids));
            }
            Ok(_) => last_err = Some(Error::ConvergenceFailure("sub-box windings do not add up".into())),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one split attempt"))
}

fn sort_zeros(v: &mut [Zero]) {
    // Components at rounding level are snapped to zero.
    for z in v.iter_mut() {
        let eps = 1e-14 * (1.0 + z.z().norm());
        if z.re.abs() <= eps {
            z.re = 0.0;
        }
        if z.im.abs() <= eps {
            z.im = 0.0;
        }
    }
    v.sort_by(|a, b| {
        let (za, zb) = (a.z(), b.z());
        za.norm().total_cmp(&zb.norm()).then(za.arg().total_cmp(&zb.arg()))
    });
}

/// Locate all zeros inside the contour by subdivision and Newton refinement.
pub fn isolate_zeros<C: Coeff>(f: &ExpPoly<C>, contour: &Contour, tol: f64) -> Result<ZeroList> {
    let an = Analytic::new(f)?;
    isolate_with(&an, contour, tol)
}

pub fn isolate_with(an: &Analytic, contour: &Contour, tol: f64) -> Result<ZeroList> {
    let (total, region) = an.winding_perturbed(contour)?;
    let mut zeros = Vec::new();
    let mut certified = true;
    if total > 0 {
        let (x1, x2, y1, y2) = region.bounding_rect();
        let mut frontier = vec![];
        // For non-rectangles, subdivide the bounding box and filter afterwards.
        let root = match region {
            Contour::Rectangle { .. } => Cell { x1, x2, y1, y2, m: total },
            _ => {
                let mut b = Contour::Rectangle { x1, x2, y1, y2 };
                let mut m = None;
                for _ in 0..4 {
                    match an.winding(&b) {
                        Ok(w) => {
                            m = Some(w);
                            break;
                        }
                        Err(Error::ZeroOnContour(_)) => b = b.inflate(1e-6 * (1.0 + region.size())),
                        Err(e) => return Err(e),
                    }
                }
                let m = m.ok_or_else(|| Error::ZeroOnContour("bounding box".into()))?;
                let (x1, x2, y1, y2) = b.bounding_rect();
                Cell { x1, x2, y1, y2, m }
            }
        };
        if root.m > 0 {
            frontier.push(root);
        }
        while !frontier.is_empty() {
            let results: Vec<Result<Outcome>> =
                pool().install(|| frontier.par_iter().map(|&cell| process(an, cell, tol)).collect());
            let mut next = Vec::new();
            for r in results {
                match r? {
                    Outcome::Found(z, ok) => {
                        certified &= ok;
                        zeros.push(z);
                    }
                    Outcome::Split(kids) => next.extend(kids),
                }
            }
            frontier = next;
        }
        zeros.retain(|z| region.contains(z.z()));
    }
    let sum: i64 = zeros.iter().map(|z| z.multiplicity as i64).sum();
    certified &= sum == total;
    sort_zeros(&mut zeros);
    Ok(ZeroList { zeros, region, certified })
}

/// Counting data on a radial grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub r_grid: Vec<f64>,
    /// `n(r)`: zeros in `|z| ≤ r` with multiplicity.
    pub counts: Vec<u64>,
    /// `N(r) = ∫_0^r (n(t) − n(0))/t dt + n(0) log r`.
    pub integrated: Vec<f64>,
    /// `q C r^q / 2π`.
    pub predicted: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Exact step integration of the counting function of a zero set.
pub fn integrated_count(zeros: &[Zero], r: f64) -> f64 {
    zeros
        .iter()
        .filter(|z| z.z().norm() <= r)
        .map(|z| {
            let m = z.multiplicity as f64;
            let a = z.z().norm();
            if a == 0.0 {
                m * r.ln()
            } else {
                m * (r / a).ln()
            }
        })
        .sum()
}

pub fn count_in_disc(zeros: &[Zero], r: f64) -> u64 {
    zeros.iter().filter(|z| z.z().norm() <= r).map(|z| z.multiplicity as u64).sum()
}

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() || r_grid.iter().any(|&r| !(r > 0.0)) || r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("radial grid must be nonempty, positive and increasing".into()));
    }
    Ok(())
}

/// All zeros in the closed disc `|z| ≤ r` (the disc is perturbed outward if
/// a zero sits on its boundary).
pub fn zeros_in_disc(an: &Analytic, r: f64) -> Result<ZeroList> {
    isolate_with(an, &Contour::Circle { r }, 1e-10 * (1.0 + r))
}

pub fn count_report<C: Coeff>(f: &ExpPoly<C>, r_grid: &[f64]) -> Result<CountReport> {
    check_grid(r_grid)?;
    let an = Analytic::new(f)?;
    let summary = hullgeo::summarize(f)?;
    let rmax = *r_grid.last().expect("nonempty");
    let zl = zeros_in_disc(&an, rmax)?;
    if !zl.certified {
        return Err(Error::ConvergenceFailure("zero isolation left unresolved clusters".into()));
    }
    // Cross-check n(r) from the zero list against the winding on each circle.
    let windings: Vec<Result<(i64, Contour)>> =
        pool().install(|| r_grid.par_iter().map(|&r| an.winding_perturbed(&Contour::Circle { r })).collect());
    let mut counts = Vec::with_capacity(r_grid.len());
    for (w, &r) in windings.into_iter().zip(r_grid) {
        let (k, used) = w?;
        let from_list = count_in_disc(&zl.zeros, used.size());
        if from_list != k as u64 {
            return Err(Error::ConvergenceFailure(format!("winding {k} and located zeros {from_list} disagree at r = {r}")));
        }
        counts.push(count_in_disc(&zl.zeros, r));
    }
    let q = summary.q as i32;
    let cc = summary.hull.circumference;
    let integrated: Vec<f64> = r_grid.iter().map(|&r| integrated_count(&zl.zeros, r)).collect();
    let predicted: Vec<f64> = r_grid.iter().map(|&r| q as f64 * cc * r.powi(q) / TAU).collect();
    let residuals = counts.iter().zip(&predicted).map(|(&n, p)| n as f64 - p).collect();
    Ok(CountReport { r_grid: r_grid.to_vec(), counts, integrated, predicted, residuals })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StripCount {
    pub count: i64,
    pub predicted: f64,
    pub deviation: f64,
}

/// Zeros of a normalized sum in `strip × [y1, y2]`; the strip is widened by
/// `1e-6` and the horizontal edges nudged if a zero lies on them.
pub fn strip_count(ns: &NormalizedSum, strip: &CriticalStrip, y1: f64, y2: f64) -> Result<StripCount> {
    let an = Analytic::new(&ns.to_exppoly())?;
    let (x1, x2) = (strip.lo - 1e-6, strip.hi + 1e-6);
    let mut dy = 0.0;
    let mut last = None;
    for _ in 0..4 {
        match an.winding(&Contour::rectangle(x1, x2, y1 + dy, y2 + dy)?) {
            Ok(count) => {
                let predicted = crate::strips::strip_density(strip, ns) * (y2 - y1);
                return Ok(StripCount { count, predicted, deviation: count as f64 - predicted });
            }
            Err(e @ Error::ZeroOnContour(_)) => {
                last = Some(e);
                dy += 1e-6 * (1.0 + y1.abs().max(y2.abs()));
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("attempted"))
}

/// `n_Z(r, θ1, θ2) / r^λ` at each modulus where the sector count changes.
pub fn angular_density(zl: &ZeroList, theta1: f64, theta2: f64, lambda: f64) -> Vec<(f64, f64)> {
    let mut n = 0u64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for z in &zl.zeros {
        let w = z.z();
        if w.norm() == 0.0 {
            continue;
        }
        let d = (w.arg() - theta1).rem_euclid(TAU);
        if d > theta2 - theta1 {
            continue;
        }
        n += z.multiplicity as u64;
        let r = w.norm();
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 = n as f64 / r.powf(lambda),
            _ => out.push((r, n as f64 / r.powf(lambda))),
        }
    }
    out
}

/// Partial sums `Σ_{0<|z_n|≤r} z_n^{−λ}` and `Σ |z_n|^{−λ}` taken after each
/// distinct modulus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularitySums {
    pub radii: Vec<f64>,
    pub sums: Vec<Complex64>,
    pub absolute_sums: Vec<f64>,
}

pub fn regularity_sum(zl: &ZeroList, lambda: u32) -> RegularitySums {
    let mut out = RegularitySums { radii: vec![], sums: vec![], absolute_sums: vec![] };
    let (mut s, mut a) = (c(0.0, 0.0), 0.0);
    let zs: Vec<&Zero> = zl.zeros.iter().filter(|z| z.z().norm() > 0.0).collect();
    for (i, z) in zs.iter().enumerate() {
        let w = z.z();
        let m = z.multiplicity as f64;
        s += m * w.powi(-(lambda as i32));
        a += m * w.norm().powi(-(lambda as i32));
        let r = w.norm();
        // Emit only once all zeros of (numerically) the same modulus are in.
        let next_same = zs.get(i + 1).is_some_and(|n| (n.z().norm() - r).abs() <= 1e-9 * r);
        if !next_same {
            out.radii.push(r);
            out.sums.push(s);
            out.absolute_sums.push(a);
        }
    }
    out
}

/// Zeros of `f` in `|z| ≤ r` outside every log-strip `Λ_p(θ*, c)` around the
/// critical rays of `f`.
pub fn outside_strip_count<C: Coeff>(f: &ExpPoly<C>, p: u32, c_width: f64, r: f64) -> Result<(u64, ZeroList)> {
    let nf = f.normalize()?;
    let rays = hullgeo::critical_rays(&nf);
    let strips = rays.iter().map(|&t| log_strip(t, c_width, p)).collect::<Result<Vec<_>>>()?;
    let an = Analytic::new(f)?;
    let zl = zeros_in_disc(&an, r)?;
    let n = zl
        .zeros
        .iter()
        .filter(|z| !strips.iter().any(|s| s.contains(z.z())))
        .map(|z| z.multiplicity as u64)
        .sum();
    Ok((n, zl))
}

/// Zero counts split into simple zeros and zeros of multiplicity at least two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MultiplicitySplit {
    pub simple: u64,
    /// Counted with multiplicity.
    pub multiple: u64,
    pub distinct_multiple: u64,
}

pub fn multiple_zero_report(zl: &ZeroList) -> MultiplicitySplit {
    let mut s = MultiplicitySplit { simple: 0, multiple: 0, distinct_multiple: 0 };
    for z in &zl.zeros {
        if z.multiplicity == 1 {
            s.simple += 1;
        } else {
            s.multiple += z.multiplicity as u64;
            s.distinct_multiple += 1;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn lattice_windings() {
        let f = parse("exp(z)-1").unwrap();
        assert_eq!(winding_count(&f, &Contour::Circle { r: 7.0 }).unwrap(), 3);
        let g = parse("(exp(z)-1)^2").unwrap();
        assert_eq!(winding_count(&g, &Contour::Circle { r: 1.0 }).unwrap(), 2);
        // z^2 = n for n ∈ {-6, …, 6}: a double zero at 0 and 24 simple ones
        let h = parse("exp(2*pi*i*z^2)-1").unwrap();
        assert_eq!(winding_count(&h, &Contour::Circle { r: 2.5 }).unwrap(), 26);
    }

    #[test]
    fn zero_on_contour_is_reported() {
        let f = parse("exp(z)-1").unwrap();
        let e = winding_count(&f, &Contour::Circle { r: TAU }).unwrap_err();
        assert!(matches!(e, Error::ZeroOnContour(_)));
        let an = Analytic::new(&f).unwrap();
        let (k, used) = an.winding_perturbed(&Contour::Circle { r: TAU }).unwrap();
        assert_eq!(k, 3);
        assert!(used.size() > TAU);
    }

    #[test]
    fn isolate_exp_minus_z() {
        let f = parse("exp(z)-z").unwrap();
        let zl = isolate_zeros(&f, &Contour::rectangle(0.0, 2.0, 0.0, 2.0).unwrap(), 1e-12).unwrap();
        assert_eq!(zl.zeros.len(), 1);
        assert!((zl.zeros[0].z() - c(0.318131505204764, 1.337235701430689)).norm() < 1e-9);
        assert!(zl.certified);
    }

    #[test]
    fn isolate_double_zeros() {
        let f = parse("(exp(z)-1)^2").unwrap();
        let zl = isolate_zeros(&f, &Contour::rectangle(-1.0, 1.0, -1.0, 7.0).unwrap(), 1e-12).unwrap();
        assert_eq!(zl.zeros.len(), 2);
        assert!(zl.zeros.iter().all(|z| z.multiplicity == 2));
        assert!((zl.zeros[1].z() - c(0.0, TAU)).norm() < 1e-9);
        assert_eq!(multiple_zero_report(&zl).multiple, 4);
    }

    #[test]
    fn roots_of_unity_sum() {
        let f = parse("1+exp(z)+exp(2*z)").unwrap();
        let zl = isolate_zeros(&f, &Contour::rectangle(-1.0, 1.0, 0.0, 7.0).unwrap(), 1e-12).unwrap();
        let want = [2.0 * PI / 3.0, 4.0 * PI / 3.0];
        assert_eq!(zl.zeros.len(), 2);
        for (z, w) in zl.zeros.iter().zip(want) {
            assert!((z.z() - c(0.0, w)).norm() < 1e-9);
        }
    }

    #[test]
    fn sin_regularity() {
        let f = parse("sin(z)").unwrap();
        let zl = isolate_zeros(&f, &Contour::rectangle(-40.0, 40.0, -1.0, 1.0).unwrap(), 1e-12).unwrap();
        assert_eq!(zl.total(), 25);
        let rs = regularity_sum(&zl, 1);
        assert!(rs.sums.iter().all(|s| s.norm() < 1e-12));
        let ad = angular_density(&zl, -0.1, 0.1, 1.0);
        assert_eq!(ad.len(), 12);
    }
}
