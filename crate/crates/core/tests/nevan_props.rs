use std::f64::consts::{PI, TAU};

use exppoly::nevan::{
    characteristic_grid, deficiency, geometric_grid, jensen_counting, linear_grid, proximity, proximity_reciprocal,
    Target,
};
use exppoly::ExpPoly;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sum(rng: &mut impl Rng) -> ExpPoly {
    let m = rng.gen_range(2..=3);
    (0..m).fold(ExpPoly::zero(), |acc, _| {
        let h = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU));
        let w = Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..TAU));
        acc.add(&ExpPoly::exponential(h, w))
    })
}

fn random_value(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(0.0..TAU))
}

#[test]
fn first_main_theorem_gap_stays_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let grid = linear_grid(5.0, 30.0, 6);
    for _ in 0..8 {
        let f = random_sum(&mut rng);
        let a = random_value(&mut rng);
        let g = f.sub(&ExpPoly::constant(a));
        let gaps: Vec<f64> = grid
            .iter()
            .map(|&r| proximity_reciprocal(&g, r) + jensen_counting(&g, r) - proximity(&f, r, 64).unwrap())
            .collect();
        // T(r, 1/(f−a)) − T(r, f) = −log|c(a)| + ε(r) with |ε| ≤ log⁺|a| + log 2
        let spread = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        let bound = 2.0 * (a.norm().ln().max(0.0) + 2f64.ln()) + 1e-4;
        assert!(spread <= bound, "{} a={} gaps {:?}", f, a, gaps);
    }
}

#[test]
fn deficiency_sum_is_at_most_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let grid = geometric_grid(8.0, 30.0, 6);
    for _ in 0..6 {
        let f = random_sum(&mut rng);
        let mut targets = vec![Target::Finite(Complex64::new(0.0, 0.0)), Target::Infinity];
        targets.extend((0..3).map(|_| Target::Finite(random_value(&mut rng))));
        let mut total = 0.0;
        for a in targets {
            let d = deficiency(&f, a, &grid).unwrap();
            assert!((0.0..=1.0 + 1e-6).contains(&d.delta_estimate));
            total += d.delta_estimate;
        }
        assert!(total <= 2.05, "{}: {}", f, total);
    }
}

#[test]
fn single_exponential_characteristic() {
    for (w, q) in [(Complex64::new(0.0, 2.0), 1usize), (Complex64::new(1.0, -1.0), 2), (Complex64::new(0.5, 0.0), 3)] {
        let r_max = 10.0 * 50f64.powf(1.0 / q as f64);
        let f = ExpPoly::exp_of(exppoly::Polynomial::new({
            let mut p = vec![Complex64::new(0.0, 0.0); q];
            p.push(w);
            p
        }))
        .unwrap();
        let rep = characteristic_grid(&f, &geometric_grid(r_max / 4.0, r_max, 8)).unwrap();
        let expect = w.norm() / PI;
        assert!((rep.predicted_leading - expect).abs() < 1e-12);
        assert!((rep.fitted_leading - expect).abs() <= 0.02 * expect, "q={} fit {}", q, rep.fitted_leading);
        assert!(rep.zero_counting.iter().all(|&n| n == 0.0));
    }
}

#[test]
fn characteristic_is_nondecreasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let grid = linear_grid(1.0, 25.0, 13);
    for _ in 0..10 {
        let f = random_sum(&mut rng);
        let t: Vec<f64> = grid.iter().map(|&r| proximity(&f, r, 64).unwrap()).collect();
        for w in t.windows(2) {
            assert!(w[1] >= w[0] - 1e-8 * (1.0 + w[0].abs()), "{}: {:?}", f, t);
        }
    }
}
