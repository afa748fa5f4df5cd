//! Symbolic core: exponential polynomials, their quotients and evaluation.

pub mod coeff;
pub mod eval;
pub mod exppoly;
pub mod normal;
pub mod parse;
pub mod poly;
pub mod rational;

pub use coeff::{Coeff, GaussRational, SymConst};
pub use eval::{Compiled, EvalDetail, Scaled};
pub use exppoly::{canonicalize, ExpPoly, ExpTerm};
pub use normal::NormalizedForm;
pub use parse::{parse, parse_as, parse_const, parse_exact, parse_rational_as};
pub use poly::Polynomial;
pub use rational::RationalExpPoly;

/// Exact-mode exponential polynomial.
pub type ExactExpPoly = ExpPoly<GaussRational>;

/// Which of the four ring operations to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
    Pow(u32),
}

/// Dispatch a ring operation; `g` is ignored for powers.
pub fn ring_op<C: Coeff>(kind: RingOp, f: &ExpPoly<C>, g: &ExpPoly<C>) -> ExpPoly<C> {
    match kind {
        RingOp::Add => f.add(g),
        RingOp::Sub => f.sub(g),
        RingOp::Mul => f.mul(g),
        RingOp::Pow(k) => f.pow(k),
    }
}
