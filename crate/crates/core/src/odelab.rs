//! Linear differential equations around exponential polynomials: annihilating
//! equations, residual checks of differential and differential-difference
//! equations, duality of coefficient/solution pairs and oscillation tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::expr::parse::{parse_tree, Lower, Node};
use crate::expr::{Coeff, ExpPoly, ExpTerm, GaussRational, Polynomial, RationalExpPoly, SymConst};
use crate::factor::support_of;
use crate::hullgeo::{build_hull, indicator};

/// Relative size below which a float residual counts as numerically zero.
pub const NUMERIC_ZERO: f64 = 1e-9;

/// Largest order the determinant expansion handles.
const MAX_ORDER: usize = 20;

/// `Σ_k coefficients[k] f^{(k)} = rhs`, with `coefficients[order]` leading.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "C: Coeff")]
pub struct LinearODE<C = Complex64> {
    pub order: usize,
    pub coefficients: Vec<ExpPoly<C>>,
    pub rhs: ExpPoly<C>,
}

impl<C: Coeff> LinearODE<C> {
    /// `f^{(n)} + A_{n-1} f^{(n-1)} + … + A_0 f = 0`.
    pub fn monic(lower: Vec<ExpPoly<C>>) -> Self {
        let mut coefficients = lower;
        coefficients.push(ExpPoly::one());
        LinearODE { order: coefficients.len() - 1, coefficients, rhs: ExpPoly::zero() }
    }

    pub fn leading(&self) -> &ExpPoly<C> {
        &self.coefficients[self.order]
    }

    pub fn is_monic(&self) -> bool {
        self.leading().as_constant().map_or(false, |c| (c - C::one()).is_zero())
    }

    /// `Σ a_k f^{(k)} − rhs` for an entire candidate.
    pub fn apply(&self, f: &ExpPoly<C>) -> ExpPoly<C> {
        let mut acc = self.rhs.neg();
        let mut d = f.clone();
        for a in &self.coefficients {
            acc = acc.add(&a.mul(&d));
            d = d.derivative(1);
        }
        acc
    }

    pub fn to_tree(&self) -> EquationTree<C> {
        let mut t = EquationTree::Coefficient(RationalExpPoly::from(self.rhs.neg()));
        for (k, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let term = EquationTree::Coefficient(a.clone().into()).mul(EquationTree::unknown(k));
            t = t.add(term);
        }
        t
    }

    pub fn to_expr_string(&self) -> String {
        let mut parts = Vec::new();
        for (k, a) in self.coefficients.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let d = match k {
                0 => "f".to_string(),
                1 => "f'".to_string(),
                2 => "f''".to_string(),
                _ => format!("f'({})", k),
            };
            parts.push(format!("({})*{}", a.to_expr_string(), d));
        }
        format!("{} = {}", parts.join(" + "), self.rhs.to_expr_string())
    }
}

/// Result of the annihilator construction.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "C: Coeff")]
pub struct Annihilator<C = Complex64> {
    pub ode: LinearODE<C>,
    /// `Σ (1 + deg P_j) q^{m−j}` over the terms of `f`.
    pub order_bound: usize,
    /// Exact residual zero (exact mode) or below `NUMERIC_ZERO` relative (float mode).
    pub exact: bool,
    pub residual_ratio: f64,
}

/// Entries `P_{j,k}` with `f^{(k)} = Σ_j P_{j,k} e^{Q_j}`.
fn derivative_columns<C: Coeff>(f: &ExpPoly<C>, n: usize) -> Vec<Vec<Polynomial<C>>> {
    let terms = f.terms();
    let mut cols = Vec::with_capacity(n + 1);
    let mut cur: Vec<Polynomial<C>> = terms.iter().map(|t| t.multiplier.clone()).collect();
    let dq: Vec<Polynomial<C>> = terms.iter().map(|t| t.exponent.derivative()).collect();
    for _ in 0..=n {
        cols.push(cur.clone());
        cur = cur.iter().zip(&dq).map(|(p, q)| p.derivative().add(&p.mul(q))).collect();
    }
    cols
}

/// Numeric rank with column equilibration.
fn numeric_rank(m: &DMatrix<Complex64>) -> usize {
    let mut m = m.clone();
    for mut c in m.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c /= Complex64::new(n, 0.0);
        }
    }
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

fn sample<C: Coeff>(rows: &[usize], cols: &[Vec<Polynomial<C>>], ncols: usize, z: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows.len(), ncols, |i, k| cols[k][rows[i]].eval_c64(z))
}

/// Determinant of a square polynomial matrix by subset expansion (division free).
pub(crate) fn poly_det<C: Coeff>(a: &[Vec<Polynomial<C>>]) -> Polynomial<C> {
    let n = a.len();
    if n == 0 {
        return Polynomial::one();
    }
    let mut dp: Vec<Option<Polynomial<C>>> = vec![None; 1 << n];
    dp[0] = Some(Polynomial::one());
    for mask in 0..(1usize << n) {
        let Some(v) = dp[mask].clone() else { continue };
        let r = mask.count_ones() as usize;
        if r == n || v.is_zero() {
            continue;
        }
        for c in 0..n {
            if mask & (1 << c) != 0 || a[r][c].is_zero() {
                continue;
            }
            let above = (mask >> (c + 1)).count_ones();
            let mut t = v.mul(&a[r][c]);
            if above % 2 == 1 {
                t = t.neg();
            }
            let next = mask | (1 << c);
            dp[next] = Some(match dp[next].take() {
                Some(s) => s.add(&t),
                None => t,
            });
        }
    }
    dp[(1 << n) - 1].clone().unwrap_or_else(Polynomial::zero)
}

/// Generic evaluation points for rank decisions.
const PROBES: [Complex64; 2] = [Complex64::new(0.3141592, 0.2718281), Complex64::new(-0.5772156, 0.6180339)];

fn order_bound<C: Coeff>(f: &ExpPoly<C>) -> usize {
    let q = f.order().max(1);
    let m = f.len();
    f.terms()
        .iter()
        .enumerate()
        .map(|(j, t)| (1 + t.multiplier.deg0()) * q.pow((m - 1 - j) as u32))
        .sum()
}

/// Minimal-order linear equation with polynomial coefficients satisfied by `f`.
pub fn annihilator<C: Coeff>(f: &ExpPoly<C>) -> Result<Annihilator<C>> {
    if f.is_zero() {
        return Err(Error::InvalidInput("the zero function has no annihilator".into()));
    }
    let m = f.len();
    if m > MAX_ORDER {
        return Err(Error::Unsupported(format!("{} terms exceed the supported order {}", m, MAX_ORDER)));
    }
    let cols = derivative_columns(f, m);
    let all_rows: Vec<usize> = (0..m).collect();
    for n in 1..=m {
        let dependent = PROBES
            .iter()
            .all(|&z| numeric_rank(&sample(&all_rows, &cols, n + 1, z)) <= n);
        if !dependent && n < m {
            continue;
        }
        // n rows on which the first n columns are independent
        let mut rows = Vec::new();
        for r in 0..m {
            let mut trial = rows.clone();
            trial.push(r);
            if numeric_rank(&sample(&trial, &cols, n, PROBES[0])) == trial.len() {
                rows = trial;
            }
            if rows.len() == n {
                break;
            }
        }
        if rows.len() < n {
            continue;
        }
        let mut v = Vec::with_capacity(n + 1);
        for skip in 0..=n {
            let minor: Vec<Vec<Polynomial<C>>> = rows
                .iter()
                .map(|&r| (0..=n).filter(|&k| k != skip).map(|k| cols[k][r].clone()).collect())
                .collect();
            let d = poly_det(&minor);
            v.push(if skip % 2 == 1 { d.neg() } else { d });
        }
        if v[n].is_zero() {
            continue;
        }
        if C::EXACT {
            let g = v.iter().fold(Polynomial::zero(), |g, p| if g.is_zero() { p.clone() } else { g.gcd(p) });
            if !g.is_constant() {
                v = v.iter().map(|p| p.div_rem(&g).expect("nonzero gcd").0).collect();
            }
        }
        let li = v[n].lead().and_then(|l| l.inv()).expect("nonzero leading coefficient");
        let coefficients: Vec<ExpPoly<C>> = v.iter().map(|p| ExpPoly::from_polynomial(p.scale(&li))).collect();
        let ode = LinearODE { order: n, coefficients, rhs: ExpPoly::zero() };
        let (exact, ratio) = residual_check(&ode, f);
        if exact {
            return Ok(Annihilator { ode, order_bound: order_bound(f), exact, residual_ratio: ratio });
        }
    }
    Err(Error::ConvergenceFailure("no annihilating equation passed the residual check".into()))
}

/// Zero test of `ode` applied to `f`, exact or relative.
fn residual_check<C: Coeff>(ode: &LinearODE<C>, f: &ExpPoly<C>) -> (bool, f64) {
    let mut scale: f64 = 0.0;
    let mut d = f.clone();
    for a in &ode.coefficients {
        scale = scale.max(a.mul(&d).max_coeff());
        d = d.derivative(1);
    }
    let r = ode.apply(f);
    if r.is_zero() {
        return (true, 0.0);
    }
    let ratio = r.max_coeff() / scale.max(f64::MIN_POSITIVE);
    (!C::EXACT && ratio <= NUMERIC_ZERO, ratio)
}

/// Expression tree over the unknown function `f`.
#[derive(Clone, Debug)]
pub enum EquationTree<C = Complex64> {
    /// `f^{(deriv)}(z + value + symbolic)`.
    Unknown { deriv: usize, value: C, symbolic: SymConst },
    Coefficient(RationalExpPoly<C>),
    Add(Box<EquationTree<C>>, Box<EquationTree<C>>),
    Sub(Box<EquationTree<C>>, Box<EquationTree<C>>),
    Mul(Box<EquationTree<C>>, Box<EquationTree<C>>),
    Div(Box<EquationTree<C>>, Box<EquationTree<C>>),
    Neg(Box<EquationTree<C>>),
    Pow(Box<EquationTree<C>>, u32),
}

fn contains_unknown(n: &Node) -> bool {
    match n {
        Node::Unknown { .. } => true,
        Node::Func(_, a) | Node::Neg(a) => contains_unknown(a),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            contains_unknown(a) || contains_unknown(b)
        }
        _ => false,
    }
}

impl<C: Coeff> EquationTree<C> {
    pub fn unknown(deriv: usize) -> Self {
        EquationTree::Unknown { deriv, value: C::zero(), symbolic: SymConst::zero() }
    }

    pub fn coefficient(f: ExpPoly<C>) -> Self {
        EquationTree::Coefficient(f.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Self) -> Self {
        EquationTree::Add(Box::new(self), Box::new(o))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Self) -> Self {
        EquationTree::Mul(Box::new(self), Box::new(o))
    }

    /// Parse `f^2 - 2*exp(z)*f(z-log(2)) - 1` style text; `lhs = rhs` is read as `lhs - rhs`.
    pub fn parse(text: &str) -> Result<Self> {
        let node = match text.split_once('=') {
            Some((l, r)) => Node::Sub(Box::new(parse_tree(l, true)?), Box::new(parse_tree(r, true)?)),
            None => parse_tree(text, true)?,
        };
        Self::lower(&node)
    }

    fn lower(n: &Node) -> Result<Self> {
        if !contains_unknown(n) {
            return Ok(EquationTree::Coefficient(Lower::<C>::rational(n)?));
        }
        let b = |x: &Node| -> Result<Box<Self>> { Ok(Box::new(Self::lower(x)?)) };
        Ok(match n {
            Node::Unknown { deriv, arg } => {
                let (value, symbolic) = match arg {
                    None => (C::zero(), SymConst::zero()),
                    Some(a) => {
                        let ps = Lower::<C>::poly_sym(a)?;
                        let rest = ps.poly.sub(&Polynomial::z());
                        if !rest.is_constant() {
                            return Err(Error::InvalidInput("the unknown's argument must be z + c".into()));
                        }
                        (rest.coeff(0), ps.konst)
                    }
                };
                EquationTree::Unknown { deriv: *deriv, value, symbolic }
            }
            Node::Add(x, y) => EquationTree::Add(b(x)?, b(y)?),
            Node::Sub(x, y) => EquationTree::Sub(b(x)?, b(y)?),
            Node::Mul(x, y) => EquationTree::Mul(b(x)?, b(y)?),
            Node::Div(x, y) => EquationTree::Div(b(x)?, b(y)?),
            Node::Neg(x) => EquationTree::Neg(b(x)?),
            Node::Pow(x, k) => match &**k {
                Node::Num(v) if v.is_integer() && *v.numer() >= 1.into() => {
                    let e = v.to_integer().try_into().map_err(|_| Error::InvalidInput("exponent too large".into()))?;
                    EquationTree::Pow(b(x)?, e)
                }
                _ => return Err(Error::InvalidInput("the unknown may only be raised to positive integer powers".into())),
            },
            Node::Func(name, _) => {
                return Err(Error::InvalidInput(format!("the unknown cannot appear inside {}", name)))
            }
            _ => unreachable!("leaves without the unknown are coefficients"),
        })
    }

    /// Substitute `f`; also returns the largest intermediate coefficient.
    fn eval(&self, f: &RationalExpPoly<C>) -> Result<(RationalExpPoly<C>, f64)> {
        let size = |r: &RationalExpPoly<C>| r.numerator.max_coeff();
        Ok(match self {
            EquationTree::Unknown { deriv, value, symbolic } => {
                let mut g = f.derivative(*deriv);
                if !value.is_zero() {
                    g = RationalExpPoly {
                        numerator: g.numerator.shift_value(value)?,
                        denominator: g.denominator.shift_value(value)?,
                    };
                }
                if !symbolic.is_zero() {
                    g = g.shift(symbolic)?;
                }
                let s = size(&g);
                (g, s)
            }
            EquationTree::Coefficient(c) => (c.clone(), size(c)),
            EquationTree::Add(a, b) | EquationTree::Sub(a, b) => {
                let (x, sx) = a.eval(f)?;
                let (y, sy) = b.eval(f)?;
                let r = if matches!(self, EquationTree::Add(..)) { x.add(&y) } else { x.sub(&y) };
                let s = sx.max(sy).max(size(&r));
                (r, s)
            }
            EquationTree::Mul(a, b) => {
                let (x, sx) = a.eval(f)?;
                let (y, sy) = b.eval(f)?;
                let r = x.mul(&y);
                let s = (sx * sy).max(size(&r));
                (r, s)
            }
            EquationTree::Div(a, b) => {
                let (x, sx) = a.eval(f)?;
                let (y, _) = b.eval(f)?;
                let r = x.div(&y)?;
                let s = sx.max(size(&r));
                (r, s)
            }
            EquationTree::Neg(a) => {
                let (x, s) = a.eval(f)?;
                (x.neg(), s)
            }
            EquationTree::Pow(a, k) => {
                let (x, s) = a.eval(f)?;
                let r = x.pow(*k);
                let s = s.powi(*k as i32).max(size(&r));
                (r, s)
            }
        })
    }
}

/// Residual of substituting `f` into `eq`.
pub fn verify<C: Coeff>(eq: &EquationTree<C>, f: &RationalExpPoly<C>) -> Result<RationalExpPoly<C>> {
    Ok(eq.eval(f)?.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub residual: String,
    pub exact_zero: bool,
    /// Float mode: residual numerator below `NUMERIC_ZERO` relative to the largest intermediate.
    pub numerically_zero: bool,
    pub residual_ratio: f64,
}

pub fn verify_report<C: Coeff>(eq: &EquationTree<C>, f: &RationalExpPoly<C>) -> Result<VerifyReport> {
    let (r, scale) = eq.eval(f)?;
    let exact_zero = r.is_zero();
    let ratio = if exact_zero { 0.0 } else { r.numerator.max_coeff() / scale.max(f64::MIN_POSITIVE) };
    Ok(VerifyReport {
        residual: r.to_expr_string(),
        exact_zero,
        numerically_zero: exact_zero || (!C::EXACT && ratio <= NUMERIC_ZERO),
        residual_ratio: ratio,
    })
}

/// Polynomial solution in `e^z` of `f'' + e^{−z} f' − m² f = 0`.
pub fn frei_subnormal(m: u32) -> Result<(i64, ExpPoly<GaussRational>)> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    let alpha = -(m as i64) * (m as i64);
    let mut a = GaussRational::one();
    let mut terms = Vec::new();
    for n in 0..=m as i64 {
        terms.push(ExpTerm::exponential(a.clone(), GaussRational::from_i64(n)));
        a = a * GaussRational::ratio(-(n * n + alpha), n + 1);
    }
    Ok((alpha, ExpPoly::from_terms(terms)?))
}

/// The Frei equation `f'' + e^{−z} f' + α f = 0`.
pub fn frei_equation<C: Coeff>(alpha: C) -> LinearODE<C> {
    LinearODE::monic(vec![ExpPoly::constant(alpha), ExpPoly::exponential(C::one(), C::from_i64(-1))])
}

/// `A = q − p′/2 − p²/4`, removing the first-derivative term of `f'' + p f' + q f = 0`.
pub fn normalize_second_order<C: Coeff>(p: &ExpPoly<C>, q: &ExpPoly<C>) -> ExpPoly<C> {
    q.sub(&p.derivative(1).scale(&C::from_ratio(1, 2))).sub(&p.mul(p).scale(&C::from_ratio(1, 4)))
}

/// `A = −(e^{2φ} + φ′² − 2φ″)/4` for a nonconstant polynomial `φ`.
pub fn zero_free_base_a<C: Coeff>(phi: &ExpPoly<C>) -> Result<ExpPoly<C>> {
    let p = phi
        .as_polynomial()
        .ok_or_else(|| Error::NotRepresentable("e^{2φ} for a non-polynomial φ".into()))?;
    if p.is_constant() {
        return Err(Error::InvalidInput("φ must be nonconstant".into()));
    }
    let e2 = ExpPoly::exp_of(p.scale(&C::from_i64(2)))?;
    let d1 = phi.derivative(1);
    let d2 = phi.derivative(2);
    Ok(e2.add(&d1.mul(&d1)).sub(&d2.scale(&C::from_i64(2))).scale(&C::from_ratio(-1, 4)))
}

/// `Q = −P′²/16 + P″/4`.
pub fn sixteenth_check<C: Coeff>(p: &Polynomial<C>, q: &Polynomial<C>) -> bool {
    let d1 = p.derivative();
    let rhs = d1.mul(&d1).scale(&C::from_ratio(-1, 16)).add(&p.derivative().derivative().scale(&C::from_ratio(1, 4)));
    if C::EXACT {
        return rhs.sub(q).is_zero();
    }
    let scale = rhs.coeffs().iter().chain(q.coeffs()).map(|c| c.magnitude()).fold(1.0, f64::max);
    rhs.sub(q).coeffs().iter().all(|c| c.magnitude() <= 1e-12 * scale)
}

#[derive(Clone, Debug, Serialize)]
pub struct PerimeterReport {
    pub c_w: f64,
    pub c_w0: f64,
    pub holds: bool,
}

/// `C(co W₀) > 4 C(co W)` over the top-order frequencies of `A`. A segment
/// `co W` has circumference equal to its length here.
pub fn perimeter_condition<C: Coeff>(a: &ExpPoly<C>) -> Result<PerimeterReport> {
    let nf = a.normalize()?;
    let w: Vec<Complex64> = nf.frequencies_c64().iter().map(|x| x.conj()).collect();
    if w.len() < 2 {
        return Err(Error::InvalidInput("need at least two top-order exponential terms".into()));
    }
    let h = build_hull(&w, false);
    let h0 = build_hull(&w, true);
    let c_w = if h.is_segment { h.circumference / 2.0 } else { h.circumference };
    let c_w0 = h0.circumference;
    Ok(PerimeterReport { c_w, c_w0, holds: c_w0 > 4.0 * c_w * (1.0 + 1e-12) })
}

fn indicator_at<C: Coeff>(f: &ExpPoly<C>, q: usize, theta: f64) -> Result<f64> {
    if f.is_zero() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(indicator(&f.normalize_at(q)?, theta))
}

/// `h_B(θ) ≤ max{0, h_A(θ)}` on `points` equally spaced angles; the first
/// violating angle is returned.
pub fn indicator_dominance<C: Coeff>(a: &ExpPoly<C>, b: &ExpPoly<C>, points: usize) -> Result<(bool, Option<f64>)> {
    let q = a.order().max(b.order()).max(1);
    for k in 0..points.max(1) {
        let t = TAU * k as f64 / points.max(1) as f64;
        let ha = indicator_at(a, q, t)?;
        let hb = indicator_at(b, q, t)?;
        if hb > ha.max(0.0) + 1e-12 * (1.0 + hb.abs()) {
            return Ok((false, Some(t)));
        }
    }
    Ok((true, None))
}

/// `4A E² − E′² + c² + 2E″E`.
pub fn bank_laine_residual<C: Coeff>(e: &ExpPoly<C>, c: &C, a: &ExpPoly<C>) -> ExpPoly<C> {
    let d1 = e.derivative(1);
    let d2 = e.derivative(2);
    a.mul(e)
        .mul(e)
        .scale(&C::from_i64(4))
        .sub(&d1.mul(&d1))
        .add(&ExpPoly::constant(c.clone() * c.clone()))
        .add(&d2.mul(e).scale(&C::from_i64(2)))
}

/// Candidate orders of transcendental solutions from the Newton polygon of
/// the points `(k, deg a_k − deg a_n)`.
pub fn possible_orders<C: Coeff>(ode: &LinearODE<C>) -> Result<Vec<Rational64>> {
    if !ode.rhs.is_zero() {
        return Err(Error::InvalidInput("equation must be homogeneous".into()));
    }
    let n = ode.order;
    if n == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    let degs: Vec<Option<i64>> = ode
        .coefficients
        .iter()
        .map(|a| {
            if a.is_zero() {
                return Ok(None);
            }
            let p = a.as_polynomial().ok_or_else(|| Error::InvalidInput("coefficients must be polynomials".into()))?;
            Ok(p.degree().map(|d| d as i64))
        })
        .collect::<Result<_>>()?;
    let dn = degs[n].ok_or_else(|| Error::InvalidInput("zero leading coefficient".into()))?;
    let pts: Vec<(i64, i64)> = (0..=n).filter_map(|k| degs[k].map(|d| (k as i64, d - dn))).collect();
    // upper convex hull, left to right
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let floor = if n >= 2 { Rational64::new(1, n as i64 - 1) } else { Rational64::new(0, 1) };
    let mut out: Vec<Rational64> = hull
        .windows(2)
        .map(|w| Rational64::new(1, 1) + Rational64::new(w[0].1 - w[1].1, w[1].0 - w[0].0))
        .filter(|a| *a > Rational64::new(0, 1) && *a >= floor)
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GammaClass {
    /// `e^{α}`
    Gamma0,
    /// `e^{α} + d`
    Gamma1,
    /// `d₁ e^{α}`
    Gamma0d,
    /// `d₁ e^{α} + d₂`
    Gamma1d,
    None,
}

/// Most specific class among `Γ₀ ⊂ Γ₁, Γ₀^d ⊂ Γ₁^d` (polynomials `α` nonconstant, `d` constant or polynomial).
pub fn gamma_class<C: Coeff>(f: &ExpPoly<C>) -> GammaClass {
    let (exp_terms, poly_terms): (Vec<_>, Vec<_>) = f.terms().iter().partition(|t| t.degree() > 0);
    if exp_terms.len() != 1 || poly_terms.len() > 1 {
        return GammaClass::None;
    }
    let const_mult = exp_terms[0].multiplier.is_constant();
    let const_tail = poly_terms.first().map_or(true, |t| t.multiplier.is_constant());
    match (poly_terms.is_empty(), const_mult, const_tail) {
        (true, true, _) => GammaClass::Gamma0,
        (false, true, true) => GammaClass::Gamma1,
        (true, false, _) => GammaClass::Gamma0d,
        _ => GammaClass::Gamma1d,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub order: [usize; 2],
    pub one_sided: [bool; 2],
    pub dual: bool,
    pub commensurable: [bool; 2],
    /// Common factor of the first input; the second uses its negative.
    pub common_factor: Option<Complex64>,
    pub strongly_dual: bool,
    pub gamma_class: [GammaClass; 2],
    /// Commensurability was decided with a heuristic rational reconstruction.
    pub heuristic: bool,
}

fn same_ray(ws: &[Complex64]) -> Option<f64> {
    let nz: Vec<&Complex64> = ws.iter().filter(|w| w.norm() > 1e-300).collect();
    let a0 = nz.first()?.arg();
    let ok = nz.iter().all(|w| {
        let d = (w.arg() - a0).rem_euclid(TAU);
        d.min(TAU - d) <= 1e-9
    });
    ok.then_some(a0)
}

/// Integer multiples of one generator with a single sign, if any.
fn one_sided_factor(ws: &[Complex64]) -> (Option<Complex64>, bool) {
    let sb = support_of(ws);
    if sb.dim() != 1 {
        return (None, sb.heuristic);
    }
    let g = sb.basis[0];
    let signs: Vec<i64> = sb.coords.iter().map(|(_, c)| c[0].signum()).collect();
    if signs.iter().all(|&s| s > 0) {
        (Some(g), sb.heuristic)
    } else if signs.iter().all(|&s| s < 0) {
        (Some(-g), sb.heuristic)
    } else {
        (None, sb.heuristic)
    }
}

pub fn duality_classify<C: Coeff>(f: &ExpPoly<C>, g: &ExpPoly<C>) -> Result<DualityReport> {
    let nf = f.normalize()?;
    let ng = g.normalize()?;
    let wf = nf.frequencies_c64();
    let wg = ng.frequencies_c64();
    let rf = same_ray(&wf);
    let rg = same_ray(&wg);
    let dual = nf.q == ng.q
        && match (rf, rg) {
            (Some(a), Some(b)) => {
                let d = (a - b - std::f64::consts::PI).rem_euclid(TAU);
                d.min(TAU - d) <= 1e-9
            }
            _ => false,
        };
    let (cf, hf) = one_sided_factor(&wf);
    let (cg, hg) = one_sided_factor(&wg);
    let mut common = None;
    let mut heuristic = hf || hg;
    if dual {
        let mut all = wf.clone();
        all.extend(wg.iter().map(|w| -w));
        let (c, h) = one_sided_factor(&all);
        heuristic |= h;
        common = c;
    }
    let strongly_dual = common.is_some() && {
        let sums: Vec<Complex64> = wf.iter().flat_map(|a| wg.iter().map(move |b| a + b)).collect();
        let tiny = sums.iter().map(|s| s.norm()).fold(0.0, f64::max) * 1e-12;
        let nz: Vec<Complex64> = sums.into_iter().filter(|s| s.norm() > tiny).collect();
        nz.is_empty() || same_ray(&nz).is_some()
    };
    Ok(DualityReport {
        order: [nf.q, ng.q],
        one_sided: [rf.is_some(), rg.is_some()],
        dual,
        commensurable: [cf.is_some(), cg.is_some()],
        common_factor: common,
        strongly_dual,
        gamma_class: [gamma_class(f), gamma_class(g)],
        heuristic,
    })
}
