mod common;

use std::f64::consts::{PI, TAU};

use common::{c, product, random_binomials, Binomial};
use exppoly::hullgeo::critical_rays;
use exppoly::strips::{critical_strips, rf_inequalities, zero_free_regions, NormalizedSum};
use exppoly::zerolab::{isolate_zeros, strip_count, winding_count, Analytic, Contour};
use exppoly::{Error, ExpPoly};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sum(rng: &mut impl Rng, max_n: usize) -> NormalizedSum {
    let n = rng.gen_range(1..=max_n);
    let mut w = vec![0.0];
    for _ in 0..n {
        let last = *w.last().unwrap();
        w.push(last + rng.gen_range(0.5..1.5));
    }
    let mut h = vec![c(1.0, 0.0)];
    h.extend((0..n).map(|_| Complex64::from_polar(rng.gen_range(0.2..5.0), rng.gen_range(0.0..TAU))));
    NormalizedSum::new(h, w).unwrap()
}

fn random_order_one(rng: &mut impl Rng) -> ExpPoly {
    let m = rng.gen_range(2..=4);
    let terms = (0..m)
        .map(|_| {
            let h = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU));
            ExpPoly::exponential(h, c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        })
        .collect::<Vec<_>>();
    terms.iter().fold(ExpPoly::zero(), |acc, t| acc.add(t))
}

#[test]
fn winding_is_additive_over_quarters() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 30 {
        let f = random_order_one(&mut rng);
        let (x1, y1) = (rng.gen_range(-4.0..0.0), rng.gen_range(-4.0..0.0));
        let (x2, y2) = (x1 + rng.gen_range(1.0..5.0), y1 + rng.gen_range(1.0..5.0));
        let (xm, ym) = (rng.gen_range(x1 + 0.1..x2 - 0.1), rng.gen_range(y1 + 0.1..y2 - 0.1));
        let rects = [(x1, xm, y1, ym), (xm, x2, y1, ym), (x1, xm, ym, y2), (xm, x2, ym, y2)];
        let whole = winding_count(&f, &Contour::rectangle(x1, x2, y1, y2).unwrap());
        let parts: Result<Vec<i64>, Error> =
            rects.iter().map(|&(a, b, c0, d)| winding_count(&f, &Contour::rectangle(a, b, c0, d).unwrap())).collect();
        match (whole, parts) {
            (Ok(w), Ok(p)) => {
                assert_eq!(w, p.iter().sum::<i64>(), "{}", f);
                checked += 1;
            }
            // a zero sitting on one of the cuts; draw again
            (Err(Error::ZeroOnContour(_)), _) | (_, Err(Error::ZeroOnContour(_))) => {}
            (Err(e), _) | (_, Err(e)) => panic!("{e}"),
        }
    }
}

/// Every zero of `1 − β e^{μz}` inside the box, from `μz = −log β + 2πik`.
fn binomial_zeros(b: &Binomial, x: (f64, f64), y: (f64, f64)) -> Vec<Complex64> {
    (-60..=60)
        .map(|k| (c(0.0, TAU * k as f64) - b.beta.ln()) / b.mu)
        .filter(|z| z.re > x.0 && z.re < x.1 && z.im > y.0 && z.im < y.1)
        .collect()
}

#[test]
fn isolated_zeros_match_binomial_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let (x, y) = ((-2.3, 2.1), (-4.1, 4.3));
    for _ in 0..50 {
        let fs = random_binomials(&mut rng);
        let f = product(&fs);
        let mut expected: Vec<Complex64> = fs.iter().flat_map(|b| binomial_zeros(b, x, y)).collect();
        let zl = isolate_zeros(&f, &Contour::rectangle(x.0, x.1, y.0, y.1).unwrap(), 1e-12).unwrap();
        assert!(zl.certified);
        assert_eq!(zl.total() as usize, expected.len(), "{:?}", fs);
        for z in &zl.zeros {
            for _ in 0..z.multiplicity {
                let k = expected
                    .iter()
                    .position(|e| (e - z.z()).norm() < 1e-9)
                    .unwrap_or_else(|| panic!("unexpected zero {} for {:?}", z.z(), fs));
                expected.remove(k);
            }
        }
        assert!(expected.is_empty());
    }
}

#[test]
fn strip_counts_follow_the_total_frequency() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let ns = random_sum(&mut rng, 4);
        let strips = critical_strips(&ns);
        let wn = *ns.frequencies.last().unwrap();
        for r in [50.0, 200.0] {
            let total: i64 = strips.iter().map(|s| strip_count(&ns, s, 0.0, r).unwrap().count).sum();
            let dev = (total as f64 - wn * r / TAU).abs();
            assert!(dev <= ns.n() as f64, "{:?} r={} count={} dev={}", ns, r, total, dev);
        }
    }
}

/// Distance from the critical line (the imaginary axis of the normalized
/// variable) never exceeds the outermost strip edge.
fn strip_reach(ns: &NormalizedSum) -> f64 {
    critical_strips(ns).iter().map(|s| s.lo.abs().max(s.hi.abs())).fold(0.0, f64::max)
}

#[test]
fn zeros_concentrate_near_critical_rays() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let eps: f64 = 0.2;
    for _ in 0..20 {
        let ns = random_sum(&mut rng, 3);
        let phi = rng.gen_range(-PI / 2.0..PI / 2.0);
        let rot = Complex64::from_polar(1.0, phi);
        // f(z) = ns(e^{iφ} z)
        let f = ns
            .multipliers
            .iter()
            .zip(&ns.frequencies)
            .fold(ExpPoly::zero(), |acc, (h, w)| acc.add(&ExpPoly::exponential(*h, rot * w)));
        let rays = critical_rays(&f.normalize().unwrap());
        assert_eq!(rays.len(), 2);
        let r_eps = strip_reach(&ns) / eps.sin() + 1.0;
        let r = r_eps + 25.0;
        let zl = isolate_zeros(&f, &Contour::circle(r).unwrap(), 1e-10).unwrap();
        assert!(zl.total() > 0);
        for z in zl.zeros.iter().filter(|z| z.z().norm() > r_eps) {
            let a = z.z().arg();
            let off = rays.iter().map(|t| exppoly::strips::angle_diff(a, *t).abs()).fold(f64::INFINITY, f64::min);
            assert!(off < eps, "zero {} off the critical rays {:?} by {}", z.z(), rays, off);
        }
    }
}

#[test]
fn regions_and_strips_partition_the_line() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..200 {
        let ns = random_sum(&mut rng, 5);
        let regions = zero_free_regions(&ns);
        let strips = critical_strips(&ns);
        assert!(regions.first().unwrap().lo.is_none() && regions.last().unwrap().hi.is_none());
        assert_eq!(regions.first().unwrap().dominating_index, 0);
        assert_eq!(regions.last().unwrap().dominating_index, ns.n());
        assert_eq!(strips.len() + 1, regions.len());
        for (k, s) in strips.iter().enumerate() {
            assert!(s.lo <= s.hi);
            assert_eq!(Some(s.lo), regions[k].hi);
            assert!(regions[k + 1].lo.unwrap() <= s.hi + 1e-12);
            assert!(s.left_index < s.right_index);
        }
    }
}

/// `|H_k| e^{w_k x} − Σ_{j≠k} |H_j| e^{w_j x}`, a lower bound for `|f|` on `Re z = x`.
fn dominance_margin(ns: &NormalizedSum, k: usize, x: f64) -> f64 {
    let t = |j: usize| ns.multipliers[j].norm() * (ns.frequencies[j] * x).exp();
    t(k) - (0..=ns.n()).filter(|&j| j != k).map(t).sum::<f64>()
}

fn sample_in(lo: Option<f64>, hi: Option<f64>, rng: &mut impl Rng) -> f64 {
    match (lo, hi) {
        (Some(a), Some(b)) => a + (b - a) * rng.gen_range(0.05..0.95),
        (None, Some(b)) => b - rng.gen_range(0.01..5.0),
        (Some(a), None) => a + rng.gen_range(0.01..5.0),
        (None, None) => rng.gen_range(-5.0..5.0),
    }
}

#[test]
fn zero_free_regions_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..200 {
        let ns = random_sum(&mut rng, 5);
        let f = ns.to_exppoly();
        for reg in zero_free_regions(&ns) {
            for _ in 0..5 {
                let x = sample_in(reg.lo, reg.hi, &mut rng);
                let margin = dominance_margin(&ns, reg.dominating_index, x);
                assert!(margin > 0.0, "{:?} at {}", reg, x);
                assert!(!rf_inequalities(&ns, x));
                let z = c(x, rng.gen_range(-50.0..50.0));
                assert!(f.eval_naive(z).norm() >= margin * (1.0 - 1e-9));
            }
        }
    }
}

#[test]
fn rectangles_in_zero_free_regions_wind_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for _ in 0..50 {
        let ns = random_sum(&mut rng, 4);
        let an = Analytic::new(&ns.to_exppoly()).unwrap();
        for reg in zero_free_regions(&ns) {
            let a = sample_in(reg.lo, reg.hi, &mut rng);
            let b = sample_in(reg.lo, reg.hi, &mut rng);
            if (a - b).abs() < 1e-6 {
                continue;
            }
            let y = rng.gen_range(-20.0..20.0);
            let rect = Contour::rectangle(a.min(b), a.max(b), y, y + rng.gen_range(1.0..30.0)).unwrap();
            assert_eq!(an.winding(&rect).unwrap(), 0);
        }
    }
}

#[test]
fn real_parts_of_zeros_satisfy_the_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    for _ in 0..30 {
        let ns = random_sum(&mut rng, 3);
        let strips = critical_strips(&ns);
        let (lo, hi) = (strips.first().unwrap().lo - 1.0, strips.last().unwrap().hi + 1.0);
        let zl = isolate_zeros(&ns.to_exppoly(), &Contour::rectangle(lo, hi, 0.3, 20.3).unwrap(), 1e-12).unwrap();
        for z in &zl.zeros {
            assert!(rf_inequalities(&ns, z.re) || zero_free_regions(&ns).iter().all(|r| !r.contains(z.re)));
            assert!(strips.iter().any(|s| z.re >= s.lo - 1e-6 && z.re <= s.hi + 1e-6), "{} outside {:?}", z.re, strips);
        }
    }
}
