//! Expression grammar: literals (`2`, `1.5e-3`, `2i`, `i`), `z`, `pi`, `e`,
//! `exp`, `sin`, `cos`, `log(n)`, `+ - * / ^` and parentheses.
//!
//! The same tokenizer and tree serve the equation language in `odelab`,
//! which adds the unknown `f` with primes, derivative orders and shifts.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::coeff::{Coeff, GaussRational, SymConst};
use super::exppoly::{ExpPoly, ExpTerm};
use super::poly::Polynomial;
use super::rational::RationalExpPoly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational, bool),
    Ident(String),
    Op(char),
    Prime,
    LParen,
    RParen,
    Comma,
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit()) {
            while i < b.len() && (b[i] as char).is_ascii_digit() {
                i += 1;
            }
            let int_part = &s[start..i];
            let mut frac = "";
            if i < b.len() && b[i] == b'.' {
                i += 1;
                let fs = i;
                while i < b.len() && (b[i] as char).is_ascii_digit() {
                    i += 1;
                }
                frac = &s[fs..i];
            }
            let mut exp: i64 = 0;
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && (b[j] as char).is_ascii_digit() {
                    let es = i + 1;
                    while j < b.len() && (b[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    exp = s[es..j].parse().map_err(|_| Error::Syntax { pos: es, msg: "bad exponent".into() })?;
                    i = j;
                }
            }
            let digits = format!("{}{}", int_part, frac);
            let mant: BigInt = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits.parse().map_err(|_| Error::Syntax { pos: start, msg: "bad number".into() })?
            };
            let e10 = exp - frac.len() as i64;
            let ten = BigInt::from(10);
            let val = if e10 >= 0 {
                BigRational::from_integer(mant * num_traits::pow(ten, e10 as usize))
            } else {
                BigRational::new(mant, num_traits::pow(ten, (-e10) as usize))
            };
            let imag = i < b.len() && b[i] == b'i' && !(i + 1 < b.len() && (b[i + 1] as char).is_ascii_alphanumeric());
            if imag {
                i += 1;
            }
            out.push((Tok::Num(val, imag), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(s[start..i].to_string()), start));
            continue;
        }
        let t = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' | '[' => Tok::LParen,
            ')' | ']' => Tok::RParen,
            ',' => Tok::Comma,
            '\'' => Tok::Prime,
            _ => return Err(Error::Syntax { pos: i, msg: format!("unexpected character '{}'", c) }),
        };
        out.push((t, start));
        i += 1;
    }
    Ok(out)
}

/// Parsed syntax tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(BigRational),
    Imag(BigRational),
    Z,
    Pi,
    E,
    Func(String, Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, Box<Node>),
    /// The unknown function: derivative order and optional shift argument.
    Unknown { deriv: usize, arg: Option<Box<Node>> },
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
    allow_unknown: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.here(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected {}", what))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Op('-')) => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let Some(t) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        self.pos += 1;
        match t {
            Tok::Num(v, false) => Ok(Node::Num(v)),
            Tok::Num(v, true) => Ok(Node::Imag(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(Node::Z),
                "i" => Ok(Node::Imag(BigRational::one())),
                "pi" => Ok(Node::Pi),
                "e" => Ok(Node::E),
                "exp" | "sin" | "cos" | "log" | "sinh" | "cosh" => {
                    self.expect(Tok::LParen, "'(' after function name")?;
                    let a = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Node::Func(name, Box::new(a)))
                }
                "f" if self.allow_unknown => self.unknown(),
                _ => {
                    self.pos -= 1;
                    self.err(&format!("unknown identifier '{}'", name))
                }
            },
            _ => {
                self.pos -= 1;
                self.err("unexpected token")
            }
        }
    }

    /// `f`, `f'`, `f''`, `f'(k)`, optionally followed by `(z + c)`.
    fn unknown(&mut self) -> Result<Node> {
        let mut deriv = 0;
        while self.peek() == Some(&Tok::Prime) {
            self.pos += 1;
            deriv += 1;
        }
        let mut arg = None;
        while self.peek() == Some(&Tok::LParen) {
            let save = self.pos;
            self.pos += 1;
            // derivative order `(k)`
            if let (Some(Tok::Num(v, false)), Some(Tok::RParen)) =
                (self.toks.get(self.pos).map(|t| &t.0), self.toks.get(self.pos + 1).map(|t| &t.0))
            {
                if deriv > 0 && arg.is_none() && v.is_integer() {
                    let k = v.to_integer().to_usize().ok_or(Error::Syntax { pos: self.here(), msg: "bad order".into() })?;
                    deriv = k;
                    self.pos += 2;
                    continue;
                }
            }
            let e = self.expr()?;
            self.expect(Tok::RParen, "')'")?;
            if arg.is_some() {
                self.pos = save;
                return self.err("unknown applied twice");
            }
            arg = Some(Box::new(e));
        }
        Ok(Node::Unknown { deriv, arg })
    }
}

/// Parse text into a syntax tree; `allow_unknown` enables `f`.
pub fn parse_tree(text: &str, allow_unknown: bool) -> Result<Node> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks: &toks, pos: 0, end: text.len(), allow_unknown };
    let n = p.expr()?;
    if p.pos != toks.len() {
        return p.err("trailing input");
    }
    Ok(n)
}

/// A polynomial in `z` plus a symbolic constant (kept separate only when the
/// coefficient field cannot hold it).
#[derive(Clone, Debug)]
pub(crate) struct PolySym<C> {
    pub poly: Polynomial<C>,
    pub konst: SymConst,
}

impl<C: Coeff> PolySym<C> {
    fn from_const(k: SymConst) -> Self {
        match C::from_const(&k) {
            Some(c) if !C::EXACT || k.is_rational() => PolySym { poly: Polynomial::constant(c), konst: SymConst::zero() },
            _ => PolySym { poly: Polynomial::zero(), konst: k },
        }
    }

    fn poly(p: Polynomial<C>) -> Self {
        PolySym { poly: p, konst: SymConst::zero() }
    }

    fn add(self, o: Self) -> Self {
        PolySym { poly: self.poly.add(&o.poly), konst: self.konst.add(&o.konst) }
    }

    fn neg(self) -> Self {
        PolySym { poly: self.poly.neg(), konst: self.konst.neg() }
    }

    fn mul(self, o: Self) -> Result<Self> {
        let nr = || Error::NotRepresentable("product of transcendental constants".into());
        let mut poly = self.poly.mul(&o.poly);
        let mut konst = SymConst::zero();
        for (k, p) in [(&self.konst, &o.poly), (&o.konst, &self.poly)] {
            if k.is_zero() || p.is_zero() {
                continue;
            }
            if p.is_constant() {
                let g = p.coeff(0).to_gauss().ok_or_else(nr)?;
                konst = konst.add(&k.scale(&g).ok_or_else(nr)?);
            } else {
                let kc = C::from_const(k).ok_or_else(nr)?;
                poly = poly.add(&p.scale(&kc));
            }
        }
        if !self.konst.is_zero() && !o.konst.is_zero() {
            konst = konst.add(&self.konst.mul(&o.konst).ok_or_else(nr)?);
        }
        Ok(PolySym { poly, konst })
    }

    /// The value when this is a constant.
    pub fn as_const(&self) -> Option<SymConst> {
        if !self.poly.is_constant() {
            return None;
        }
        let c = self.poly.coeff(0);
        if c.is_zero() {
            return Some(self.konst.clone());
        }
        let g = match c.to_gauss() {
            Some(g) => g,
            None => return None,
        };
        Some(SymConst::rational(g).add(&self.konst))
    }
}

/// Lowering of syntax trees to exponential polynomials with coefficients `C`.
pub(crate) struct Lower<C> {
    _m: std::marker::PhantomData<C>,
}

fn gauss(re: BigRational, im: BigRational) -> GaussRational {
    GaussRational::new(re, im)
}

impl<C: Coeff> Lower<C> {
    /// True when the tree contains no exponential functions or unknowns.
    fn is_polynomial_like(n: &Node) -> bool {
        match n {
            Node::Num(_) | Node::Imag(_) | Node::Z | Node::Pi | Node::E => true,
            Node::Func(name, a) => name == "log" && Self::is_polynomial_like(a),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
                Self::is_polynomial_like(a) && Self::is_polynomial_like(b)
            }
            Node::Div(a, b) => Self::is_polynomial_like(a) && Self::is_polynomial_like(b),
            Node::Neg(a) => Self::is_polynomial_like(a),
            Node::Pow(a, b) => Self::is_polynomial_like(a) && matches!(**b, Node::Num(_)),
            Node::Unknown { .. } => false,
        }
    }

    /// Lower a polynomial-like tree; division only by constants.
    pub(crate) fn poly_sym(n: &Node) -> Result<PolySym<C>> {
        let nonpoly = || Error::NonPolynomialExponent(format!("{:?}", n));
        Ok(match n {
            Node::Num(v) => PolySym::from_const(SymConst::rational(gauss(v.clone(), BigRational::zero()))),
            Node::Imag(v) => PolySym::from_const(SymConst::rational(gauss(BigRational::zero(), v.clone()))),
            Node::Z => PolySym::poly(Polynomial::z()),
            Node::Pi => PolySym::from_const(SymConst::pi_times(GaussRational::one())),
            Node::E => {
                let e = C::one().exp().ok_or_else(|| Error::NotRepresentable("e".into()))?;
                PolySym::poly(Polynomial::constant(e))
            }
            Node::Func(name, a) if name == "log" => Self::log_of(&Self::poly_sym(a)?)?,
            Node::Func(..) | Node::Unknown { .. } => return Err(nonpoly()),
            Node::Add(a, b) => Self::poly_sym(a)?.add(Self::poly_sym(b)?),
            Node::Sub(a, b) => Self::poly_sym(a)?.add(Self::poly_sym(b)?.neg()),
            Node::Neg(a) => Self::poly_sym(a)?.neg(),
            Node::Mul(a, b) => Self::poly_sym(a)?.mul(Self::poly_sym(b)?)?,
            Node::Div(a, b) => {
                let d = Self::poly_sym(b)?;
                if !d.konst.is_zero() || !d.poly.is_constant() {
                    return Err(nonpoly());
                }
                let c = d.poly.coeff(0);
                let inv = c.inv().ok_or_else(|| Error::InvalidInput("division by zero".into()))?;
                let gi = if C::EXACT { inv.to_gauss() } else { None };
                let num = Self::poly_sym(a)?;
                let konst = if num.konst.is_zero() {
                    SymConst::zero()
                } else {
                    num.konst
                        .scale(&gi.ok_or_else(|| Error::NotRepresentable("scaled constant".into()))?)
                        .ok_or_else(|| Error::NotRepresentable("scaled constant".into()))?
                };
                PolySym { poly: num.poly.scale(&inv), konst }
            }
            Node::Pow(a, b) => {
                let k = Self::nonneg_int(b).ok_or_else(nonpoly)?;
                let base = Self::poly_sym(a)?;
                let mut acc = PolySym::poly(Polynomial::one());
                for _ in 0..k {
                    acc = acc.mul(base.clone())?;
                }
                acc
            }
        })
    }

    fn nonneg_int(n: &Node) -> Option<u32> {
        match n {
            Node::Num(v) if v.is_integer() && !v.is_negative() => v.to_integer().to_u32(),
            _ => None,
        }
    }

    /// `log a` for a positive rational (exact) or positive real (float) constant.
    fn log_of(arg: &PolySym<C>) -> Result<PolySym<C>> {
        let bad = || Error::InvalidInput("log expects a positive constant".into());
        if !arg.konst.is_zero() || !arg.poly.is_constant() {
            return Err(bad());
        }
        let c = arg.poly.coeff(0);
        if let Some(g) = c.to_gauss() {
            if !g.is_real() || !g.re.is_positive() {
                return Err(bad());
            }
            let num = g.re.numer().to_u64().ok_or_else(bad)?;
            let den = g.re.denom().to_u64().ok_or_else(bad)?;
            return Ok(PolySym::from_const(SymConst::log(num).add(&SymConst::log(den).neg())));
        }
        let v = c.to_c64();
        if v.im != 0.0 || v.re <= 0.0 {
            return Err(bad());
        }
        let l = C::from_c64(Complex64::new(v.re.ln(), 0.0)).ok_or_else(bad)?;
        Ok(PolySym::poly(Polynomial::constant(l)))
    }

    /// `e^{A}` for a polynomial-with-constant exponent.
    fn exp_of(a: PolySym<C>) -> Result<ExpPoly<C>> {
        let factor = C::exp_times_const(&C::one(), &a.konst)
            .ok_or_else(|| Error::NotRepresentable("exponential of a transcendental constant".into()))?;
        ExpPoly::from_terms(vec![ExpTerm::new(Polynomial::constant(factor), a.poly)])
    }

    fn times_i(a: &PolySym<C>) -> Result<PolySym<C>> {
        a.clone().mul(PolySym::from_const(SymConst::rational(GaussRational::imag_unit())))
    }

    pub(crate) fn rational(n: &Node) -> Result<RationalExpPoly<C>> {
        if Self::is_polynomial_like(n) {
            let ps = Self::poly_sym(n)?;
            if !ps.konst.is_zero() {
                let k = C::from_const(&ps.konst)
                    .ok_or_else(|| Error::NotRepresentable("transcendental constant".into()))?;
                return Ok(ExpPoly::from_polynomial(ps.poly.add(&Polynomial::constant(k))).into());
            }
            return Ok(ExpPoly::from_polynomial(ps.poly).into());
        }
        Ok(match n {
            Node::Func(name, a) => {
                let arg = Self::poly_sym(a).map_err(|e| match e {
                    Error::NonPolynomialExponent(_) => Error::NonPolynomialExponent(format!("argument of {}", name)),
                    other => other,
                })?;
                let half = C::from_ratio(1, 2);
                match name.as_str() {
                    "exp" => Self::exp_of(arg)?.into(),
                    "sin" | "cos" => {
                        let ia = Self::times_i(&arg)?;
                        let p = Self::exp_of(ia.clone())?;
                        let m = Self::exp_of(ia.neg())?;
                        if name == "sin" {
                            // (e^{iA} - e^{-iA}) / (2i)
                            let c = (C::imag_unit() * C::from_i64(2)).inv().expect("nonzero");
                            p.sub(&m).scale(&c).into()
                        } else {
                            p.add(&m).scale(&half).into()
                        }
                    }
                    "sinh" | "cosh" => {
                        let p = Self::exp_of(arg.clone())?;
                        let m = Self::exp_of(arg.neg())?;
                        if name == "sinh" { p.sub(&m) } else { p.add(&m) }.scale(&half).into()
                    }
                    _ => return Err(Error::NonPolynomialExponent(name.clone())),
                }
            }
            Node::Add(a, b) => Self::rational(a)?.add(&Self::rational(b)?),
            Node::Sub(a, b) => Self::rational(a)?.sub(&Self::rational(b)?),
            Node::Neg(a) => Self::rational(a)?.neg(),
            Node::Mul(a, b) => Self::rational(a)?.mul(&Self::rational(b)?),
            Node::Div(a, b) => {
                let num = Self::rational(a)?;
                let den = Self::rational(b)?;
                if let Some(d) = den.as_exppoly().and_then(|d| d.as_constant()) {
                    let inv = d.inv().ok_or_else(|| Error::InvalidInput("division by zero".into()))?;
                    num.scale(&inv)
                } else {
                    num.div(&den)?
                }
            }
            Node::Pow(a, b) => {
                if let Some(k) = Self::nonneg_int(b) {
                    return Ok(Self::rational(a)?.pow(k));
                }
                if let Node::Neg(inner) = &**b {
                    if let Some(k) = Self::nonneg_int(inner) {
                        let base = Self::rational(a)?.pow(k);
                        return RationalExpPoly::from(ExpPoly::one()).div(&base);
                    }
                }
                // a^X = exp(log(a) X) for a positive constant base.
                let base = Self::poly_sym(a).map_err(|_| Error::NonPolynomialExponent("power base".into()))?;
                let x = Self::poly_sym(b)?;
                let lg = Self::log_of(&base)
                    .map_err(|_| Error::NonPolynomialExponent("power with non-integer exponent".into()))?;
                Self::exp_of(lg.mul(x)?)?.into()
            }
            _ => unreachable!("polynomial-like nodes handled above"),
        })
    }

}

/// Parse into a float exponential polynomial; the denominator must be constant.
pub fn parse(text: &str) -> Result<ExpPoly> {
    parse_as::<Complex64>(text)
}

/// Parse with exact Gaussian-rational coefficients.
pub fn parse_exact(text: &str) -> Result<ExpPoly<GaussRational>> {
    parse_as::<GaussRational>(text)
}

pub fn parse_as<C: Coeff>(text: &str) -> Result<ExpPoly<C>> {
    let r = parse_rational_as::<C>(text)?;
    r.as_exppoly()
        .ok_or_else(|| Error::InvalidInput("expression has a non-constant denominator".into()))
}

/// Parse into a quotient of exponential polynomials.
pub fn parse_rational_as<C: Coeff>(text: &str) -> Result<RationalExpPoly<C>> {
    let n = parse_tree(text, false)?;
    Lower::<C>::rational(&n)
}

/// Parse a constant such as `-log(2)`, `2*pi*i` or `3/4`.
pub fn parse_const(text: &str) -> Result<SymConst> {
    let n = parse_tree(text, false)?;
    const_of(&n)
}

pub(crate) fn const_of(n: &Node) -> Result<SymConst> {
    let ps = Lower::<GaussRational>::poly_sym(n)?;
    ps.as_const().ok_or_else(|| Error::InvalidInput("expected a constant".into()))
}
