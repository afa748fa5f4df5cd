//! Equation–solution fixtures shared by the ODE suites.

use exppoly::expr::{parse_rational_as, Coeff, ExpTerm, GaussRational};
use exppoly::odelab::{verify, EquationTree};
use exppoly::{ExpPoly, Polynomial};
use num_rational::Rational64;
use rand::Rng;

pub type Q = GaussRational;

fn gauss(rng: &mut impl Rng) -> Q {
    Q::from_i64(rng.gen_range(-3..=3)) + Q::imag_unit() * Q::from_i64(rng.gen_range(-1..=1))
}

fn nonzero(rng: &mut impl Rng) -> Q {
    loop {
        let g = gauss(rng);
        if !g.is_zero() {
            return g;
        }
    }
}

/// `Σ_{j≤m} P_j e^{Q_j}` with `m ≤ 3`, `deg Q_j ≤ 2`, `deg P_j ≤ 2`.
pub fn random_exppoly(rng: &mut impl Rng) -> ExpPoly<Q> {
    loop {
        let m = rng.gen_range(1..=3);
        let q = rng.gen_range(1..=2);
        let terms: Vec<ExpTerm<Q>> = (0..m)
            .map(|_| {
                let dp = rng.gen_range(0..=2);
                let mut p: Vec<Q> = (0..dp).map(|_| gauss(rng)).collect();
                p.push(nonzero(rng));
                let dq = rng.gen_range(0..=q);
                let mut e = vec![Q::zero()];
                e.extend((1..=dq).map(|_| gauss(rng)));
                ExpTerm::new(Polynomial::new(p), Polynomial::new(e))
            })
            .collect();
        let f = ExpPoly::from_terms(terms).unwrap();
        if !f.is_zero() {
            return f;
        }
    }
}

pub fn exact_pair(eq: &str, f: &str) -> bool {
    let t = EquationTree::<Q>::parse(eq).unwrap();
    let f = parse_rational_as::<Q>(f).unwrap();
    verify(&t, &f).unwrap().is_zero()
}

/// `H_n(x)` by `H_{n+1} = 2x H_n − 2n H_{n−1}`.
pub fn hermite(n: usize) -> Vec<i64> {
    let mut a = vec![1i64];
    let mut b = vec![0i64, 2];
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let mut c = vec![0i64; b.len() + 1];
        for (i, &x) in b.iter().enumerate() {
            c[i + 1] += 2 * x;
        }
        for (i, &x) in a.iter().enumerate() {
            c[i] -= 2 * k as i64 * x;
        }
        a = b;
        b = c;
    }
    b
}

/// `L_n^{(α)}(x)` by `(k+1) L_{k+1} = (2k+1+α−x) L_k − (k+α) L_{k−1}`.
pub fn laguerre(n: usize, alpha: i64) -> Vec<Rational64> {
    let r = Rational64::from_integer;
    let mut a = vec![r(1)];
    let mut b = vec![r(1 + alpha), r(-1)];
    if n == 0 {
        return a;
    }
    for k in 1..n as i64 {
        let mut c = vec![r(0); b.len() + 1];
        for (i, &x) in b.iter().enumerate() {
            c[i] += r(2 * k + 1 + alpha) * x;
            c[i + 1] -= x;
        }
        for (i, &x) in a.iter().enumerate() {
            c[i] -= r(k + alpha) * x;
        }
        for x in c.iter_mut() {
            *x /= r(k + 1);
        }
        a = b;
        b = c;
    }
    b
}

fn in_exp_z(coeffs: &[String]) -> String {
    coeffs.iter().enumerate().map(|(k, c)| format!("({})*exp({}*z)", c, k)).collect::<Vec<_>>().join(" + ")
}

/// `H_n(e^z)` and `L_n^{(α)}(e^z)` with the equations they satisfy after `x = e^z`.
pub fn hermite_laguerre_pairs() -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for n in 0..6 {
        let f = in_exp_z(&hermite(n).iter().map(|c| c.to_string()).collect::<Vec<_>>());
        out.push((format!("H_{n}"), format!("f'' - (2*exp(2*z)+1)*f' + 2*{}*exp(2*z)*f", n), f));
    }
    for n in 0..5 {
        for alpha in [0i64, 1, 3] {
            let f = in_exp_z(&laguerre(n, alpha).iter().map(|c| format!("{}/{}", c.numer(), c.denom())).collect::<Vec<_>>());
            out.push((format!("L_{n}^({alpha})"), format!("f'' - (exp(z)-{})*f' + {}*exp(z)*f", alpha, n), f));
        }
    }
    out
}

pub const DISPLAYED_PAIRS: &[(&str, &str)] = &[
    ("f''' + (1/9)*(9+9*exp(z)+4*exp(2*z))*f'' - 5*f' + 3*f", "16 - 27*exp(-2*z) + 27*exp(-3*z)"),
    ("f''' + (exp(-z^2/2-z) - z - 1)*f'' - f' - (z+1)*f", "exp(z^2/2+z) + z + 1"),
    // γ = 3
    ("f'' - (6*exp(z/2)+1)*f' + 3*exp(z/2)*f", "12*exp(z/2) + 1"),
    // the e^{z/2} term of the h-coefficient cancels against the transformation
    ("f'' - 6*exp(z/2)*f' - f/4", "12 + exp(-z/2)"),
    ("f'' + (exp(-z)+2)*f' + exp(-z)*f", "1 + exp(-z)"),
    ("f^2 - 2*exp(z)*f(z-log(2)) = 1", "exp(z)+1"),
    ("f^2 - 2*exp(z)*f(z-log(2)) = 1", "exp(z)-1"),
    ("f^2 - exp(-z)*f'(z+2*pi*i)", "1/(1-exp(z))"),
    ("f' - exp(z)*f^2", "1/(1-exp(z))"),
    // a₁ = 2: g = f − 1
    ("f^2 + 2*f - exp(-z)*f'(z+2*pi*i) = -1", "1/(1-exp(z)) - 1"),
    ("f^3 - f/2 + f''(z+pi)/2", "1/cos(z)"),
    ("f'' - (3+2)*f' + 2*3*f = (3-1)*exp(z)", "exp(2*z) + exp(z)"),
    ("f'' - 4*z*f' + (4*z-1)*f = (4*z+3)*exp(2*z^2) - (4*z^2-4*z-1)*exp(z^2)", "exp(2*z^2) + exp(z^2) + exp(z)"),
    ("f'' + f' - (4/3)*(z+1)*f = (2/3)*(6*z^2+z+1)*(exp(z^2)+4*exp(2*z^2))", "exp(2*z^2) + exp(z^2)"),
    // K = 1/9 (r = s = 0), c = −3, g = e^{−z/3}. Substituting f = g e^{c e^{z/3}}
    // gives the last coefficient (c/3)e^{z/3}((c/3)e^{z/3} + 1/9 − K).
    (
        "f''' - 3*exp(z/3)*f'' + (3*exp(2*z/3) - exp(z/3) - 1/9)*f' - exp(z/3)*(-exp(z/3) + 1/9 - 1/9)*f",
        "exp(-z/3)",
    ),
];
