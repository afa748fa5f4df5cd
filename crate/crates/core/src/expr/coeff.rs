//! Coefficient fields: complex doubles and exact Gaussian rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Relative threshold below which a float sum is treated as exact cancellation.
pub const CANCEL_TOL: f64 = 1e-13;

/// Frequency-matching tolerance for exponent coefficients.
pub const MATCH_TOL: f64 = 1e-12;

/// Arithmetic required of a coefficient type.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// True for types whose zero test is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn imag_unit() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    fn from_gauss(g: &GaussRational) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    fn to_c64(&self) -> Complex64;
    fn conj(&self) -> Self;

    /// Magnitude used for cancellation bookkeeping.
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Equality under the frequency-matching tolerance (exact types compare exactly).
    fn matches(&self, other: &Self) -> bool;

    /// Zero out a float that is pure cancellation noise relative to `scale`.
    fn cleanup(self, scale: f64) -> Self;

    /// Total order used by canonical sorting: real part, then imaginary part.
    fn order_key(&self, other: &Self) -> Ordering;

    /// `e^self`, if representable.
    fn exp(&self) -> Option<Self>;

    /// `e^{w c}` for a symbolic constant `c`, if representable.
    fn exp_times_const(w: &Self, c: &SymConst) -> Option<Self>;

    /// The constant `c` itself, if representable.
    fn from_const(c: &SymConst) -> Option<Self>;

    /// Literal text accepted by the expression parser.
    fn literal(&self) -> String;

    /// Exact value, for exact coefficient types.
    fn to_gauss(&self) -> Option<GaussRational>;

    /// Float value as a coefficient (float types only).
    fn from_c64(c: Complex64) -> Option<Self>;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|v| self.clone() * v)
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        acc
    }
}

impl Coeff for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Complex64::new(n as f64 / d as f64, 0.0)
    }
    fn from_gauss(g: &GaussRational) -> Self {
        g.to_c64()
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / *self)
        }
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn matches(&self, other: &Self) -> bool {
        let scale = 1f64.max(self.norm()).max(other.norm());
        (self - other).norm() <= MATCH_TOL * scale
    }
    fn cleanup(self, scale: f64) -> Self {
        if self.norm() <= CANCEL_TOL * scale {
            Complex64::new(0.0, 0.0)
        } else {
            // normalizes signed zeros
            Complex64::new(self.re + 0.0, self.im + 0.0)
        }
    }
    fn order_key(&self, other: &Self) -> Ordering {
        (self.re + 0.0)
            .total_cmp(&(other.re + 0.0))
            .then_with(|| (self.im + 0.0).total_cmp(&(other.im + 0.0)))
    }
    fn exp(&self) -> Option<Self> {
        Some(Complex64::exp(*self))
    }
    fn exp_times_const(w: &Self, c: &SymConst) -> Option<Self> {
        Some((w * c.to_c64()).exp())
    }
    fn from_const(c: &SymConst) -> Option<Self> {
        Some(c.to_c64())
    }
    fn to_gauss(&self) -> Option<GaussRational> {
        None
    }
    fn from_c64(c: Complex64) -> Option<Self> {
        Some(c)
    }
    fn literal(&self) -> String {
        fmt_complex_parts(fmt_f64(self.re), self.re == 0.0, self.re < 0.0, fmt_f64(self.im.abs()), self.im == 0.0, self.im < 0.0)
    }
}

fn fmt_f64(x: f64) -> String {
    // `{:?}` is the shortest round-trip representation.
    let s = format!("{:?}", x);
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

fn fmt_complex_parts(
    re: String,
    re_zero: bool,
    _re_neg: bool,
    im_abs: String,
    im_zero: bool,
    im_neg: bool,
) -> String {
    let imag = |abs: &str| {
        if abs == "1" {
            "i".to_string()
        } else {
            format!("{}*i", abs)
        }
    };
    match (re_zero, im_zero) {
        (true, true) => "0".into(),
        (false, true) => {
            if re.contains('/') || re.starts_with('-') {
                format!("({})", re)
            } else {
                re
            }
        }
        (true, false) => {
            if im_neg {
                format!("(-{})", imag(&im_abs))
            } else {
                imag(&im_abs)
            }
        }
        (false, false) => format!("({}{}{})", re, if im_neg { "-" } else { "+" }, imag(&im_abs)),
    }
}

/// Complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal())
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal())
    }
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRational { re, im: BigRational::zero() }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Integer value if this is a real integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.im.is_zero() && self.re.is_integer() {
            Some(self.re.to_integer())
        } else {
            None
        }
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale through logarithms of the parts.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn rat_literal(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Add for GaussRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GaussRational { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        GaussRational { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for GaussRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRational::real(self.re * o.re);
        }
        GaussRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for GaussRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussRational { re: -self.re, im: -self.im }
    }
}

impl Coeff for GaussRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        GaussRational::real(BigRational::zero())
    }
    fn one() -> Self {
        GaussRational::real(BigRational::one())
    }
    fn imag_unit() -> Self {
        GaussRational { re: BigRational::zero(), im: BigRational::one() }
    }
    fn from_i64(n: i64) -> Self {
        GaussRational::real(BigRational::from_integer(BigInt::from(n)))
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        GaussRational::ratio(n, d)
    }
    fn from_gauss(g: &GaussRational) -> Self {
        g.clone()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRational { re: &self.re / &n, im: -(&self.im / &n) })
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: -self.im.clone() }
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn matches(&self, other: &Self) -> bool {
        self == other
    }
    fn cleanup(self, _scale: f64) -> Self {
        self
    }
    fn order_key(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
    fn exp(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            Some(Self::one())
        } else {
            None
        }
    }
    fn exp_times_const(w: &Self, c: &SymConst) -> Option<Self> {
        if Coeff::is_zero(w) {
            return Some(Self::one());
        }
        if !Coeff::is_zero(&c.rat) {
            return None;
        }
        let mut acc = Self::one();
        // e^{w σ π}: needs w σ = i t with 2t integral.
        if !Coeff::is_zero(&c.pi) {
            let ws = w.clone() * c.pi.clone();
            if !ws.re.is_zero() {
                return None;
            }
            let two_t = &ws.im * BigRational::from_integer(BigInt::from(2));
            if !two_t.is_integer() {
                return None;
            }
            let k = two_t.to_integer().mod_floor_4();
            acc = acc * Self::imag_unit().powi(k);
        }
        for (n, l) in &c.logs {
            let e = w.clone() * GaussRational::real(l.clone());
            let k = e.as_integer()?;
            let k = k.to_i64()?;
            let base = GaussRational::real(BigRational::from_integer(BigInt::from(*n)));
            let p = base.powi(k.unsigned_abs() as u32);
            acc = acc * if k < 0 { p.inv()? } else { p };
        }
        Some(acc)
    }
    fn from_const(c: &SymConst) -> Option<Self> {
        if c.pi_is_zero() && c.logs.is_empty() {
            Some(c.rat.clone())
        } else {
            None
        }
    }
    fn to_gauss(&self) -> Option<GaussRational> {
        Some(self.clone())
    }
    fn from_c64(_c: Complex64) -> Option<Self> {
        None
    }
    fn literal(&self) -> String {
        fmt_complex_parts(
            rat_literal(&self.re),
            self.re.is_zero(),
            self.re.is_negative(),
            rat_literal(&self.im.abs()),
            self.im.is_zero(),
            self.im.is_negative(),
        )
    }
}

trait ModFloor4 {
    fn mod_floor_4(&self) -> u32;
}

impl ModFloor4 for BigInt {
    fn mod_floor_4(&self) -> u32 {
        let four = BigInt::from(4);
        let r = ((self % &four) + &four) % &four;
        r.to_u32().unwrap_or(0)
    }
}

/// A constant of the form `a + σπ + Σ l_k log n_k` with Gaussian rational `a, σ`
/// and rational `l_k`. Used for shifts such as `z − log 2` or `z + 2πi` that
/// must stay exact.
#[derive(Clone, Debug, PartialEq)]
pub struct SymConst {
    pub rat: GaussRational,
    pub pi: GaussRational,
    pub logs: BTreeMap<u64, BigRational>,
}

impl SymConst {
    pub fn zero() -> Self {
        SymConst { rat: GaussRational::zero(), pi: GaussRational::zero(), logs: BTreeMap::new() }
    }

    pub fn rational(r: GaussRational) -> Self {
        SymConst { rat: r, ..Self::zero() }
    }

    pub fn pi_times(s: GaussRational) -> Self {
        SymConst { pi: s, ..Self::zero() }
    }

    pub fn log(n: u64) -> Self {
        let mut logs = BTreeMap::new();
        if n != 1 {
            logs.insert(n, BigRational::one());
        }
        SymConst { logs, ..Self::zero() }
    }

    pub fn pi_is_zero(&self) -> bool {
        Coeff::is_zero(&self.pi)
    }

    pub fn is_zero(&self) -> bool {
        Coeff::is_zero(&self.rat) && self.pi_is_zero() && self.logs.is_empty()
    }

    /// True when the constant is a plain Gaussian rational.
    pub fn is_rational(&self) -> bool {
        self.pi_is_zero() && self.logs.is_empty()
    }

    pub fn to_c64(&self) -> Complex64 {
        let mut v = self.rat.to_c64() + self.pi.to_c64() * std::f64::consts::PI;
        for (n, l) in &self.logs {
            v += Complex64::new(rat_to_f64(l) * (*n as f64).ln(), 0.0);
        }
        v
    }

    pub fn add(&self, o: &SymConst) -> SymConst {
        let mut logs = self.logs.clone();
        for (n, l) in &o.logs {
            let e = logs.entry(*n).or_insert_with(BigRational::zero);
            *e = &*e + l;
        }
        logs.retain(|_, l| !l.is_zero());
        SymConst { rat: self.rat.clone() + o.rat.clone(), pi: self.pi.clone() + o.pi.clone(), logs }
    }

    pub fn neg(&self) -> SymConst {
        self.scale(&GaussRational::from_i64(-1)).expect("real scaling")
    }

    /// Multiply by a Gaussian rational. Log parts only admit real factors.
    pub fn scale(&self, s: &GaussRational) -> Option<SymConst> {
        if Coeff::is_zero(s) {
            return Some(SymConst::zero());
        }
        let mut logs = BTreeMap::new();
        for (n, l) in &self.logs {
            if !s.is_real() {
                return None;
            }
            logs.insert(*n, l * &s.re);
        }
        Some(SymConst { rat: self.rat.clone() * s.clone(), pi: self.pi.clone() * s.clone(), logs })
    }

    /// Product of two constants when at least one is rational.
    pub fn mul(&self, o: &SymConst) -> Option<SymConst> {
        if self.is_rational() {
            o.scale(&self.rat)
        } else if o.is_rational() {
            self.scale(&o.rat)
        } else {
            None
        }
    }
}
