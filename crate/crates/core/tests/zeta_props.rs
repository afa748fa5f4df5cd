use std::time::Instant;

use exppoly::nevan::jensen_counting;
use exppoly::zetalab::{
    axis_zero_check, partial_sum, pi24, thinned_axis_zeros, thinned_dirichlet, thinned_product,
    thinned_reflection_identity, xi0_symmetry, ThinnedSpec,
};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn random_spec(rng: &mut impl Rng) -> ThinnedSpec {
    let k = rng.gen_range(1..=3);
    let mut ps: Vec<u64> = PRIMES.to_vec();
    while ps.len() > k {
        ps.remove(rng.gen_range(0..ps.len()));
    }
    let caps = ps.iter().map(|_| rng.gen_range(1..=3)).collect();
    ThinnedSpec::new(ps, caps).unwrap()
}

#[test]
fn thinned_products_stay_on_the_axis() {
    for (ps, ns) in [(vec![2], vec![4]), (vec![2, 3], vec![1, 1]), (vec![2, 3, 5], vec![2, 2, 1])] {
        let spec = ThinnedSpec::new(ps, ns).unwrap();
        let t = Instant::now();
        let r = axis_zero_check(&thinned_product(&spec).unwrap(), 50.0, 1e-8).unwrap();
        assert!(r.off_axis.is_empty(), "{:?}: {:?}", spec, r.off_axis);
        assert!(r.zeros.certified);
        // closed-form oracle, counted with multiplicity
        let oracle = thinned_axis_zeros(&spec, 50.0);
        assert_eq!(r.on_axis, oracle.len() as u64, "{:?}", spec);
        for z in &r.zeros.zeros {
            let hit = oracle.iter().filter(|w| (z.z() - **w).norm() < 1e-7).count();
            assert_eq!(hit as u32, z.multiplicity, "{:?}", z);
        }
        eprintln!("{:?}: {} zeros in {:?}", spec, r.on_axis, t.elapsed());
    }
}

#[test]
fn pi24_leaves_the_axis() {
    let r = axis_zero_check(&pi24().unwrap(), 50.0, 1e-8).unwrap();
    assert!(!r.off_axis.is_empty());
}

#[test]
fn two_term_sum_zeros() {
    let r = axis_zero_check(&partial_sum(2).unwrap(), 50.0, 1e-8).unwrap();
    assert!(r.off_axis.is_empty());
    let step = std::f64::consts::PI / 2f64.ln();
    for z in &r.zeros.zeros {
        let n = (z.im / step - 1.0) / 2.0;
        assert!((n - n.round()).abs() < 1e-9 && z.re.abs() < 1e-9);
    }
}

#[test]
fn three_term_sum_is_not_on_a_line() {
    let r = axis_zero_check(&partial_sum(3).unwrap(), 60.0, 1e-8).unwrap();
    let xs: Vec<f64> = r.zeros.zeros.iter().map(|z| z.re).collect();
    let spread = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread > 1e-3, "{:?}", xs);
}

#[test]
fn reflection_and_symmetry_for_random_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..25 {
        let spec = random_spec(&mut rng);
        assert!(thinned_reflection_identity(&spec), "{:?}", spec);
        let samples: Vec<Complex64> = (0..20)
            .map(|_| Complex64::from_polar(rng.gen_range(0.0..10.0), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let s = xi0_symmetry(&spec, &samples).unwrap();
        assert!(s.exact && s.max_deviation < 1e-12, "{:?} {:?}", spec, s);
    }
}

#[test]
fn thinned_product_matches_multi_index_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..25 {
        let spec = random_spec(&mut rng);
        let g = thinned_dirichlet(&spec);
        let mut expect: Vec<u64> = vec![1];
        for (&p, &n) in spec.primes.iter().zip(&spec.caps) {
            expect = expect.iter().flat_map(|&m| (0..=n).map(move |k| m * p.pow(k))).collect();
        }
        expect.sort();
        let mut got: Vec<u64> = g
            .terms
            .iter()
            .map(|(q, c)| {
                assert_eq!(c.to_i64(), Some(1));
                (q.denom().to_f64().unwrap().sqrt().round()) as u64
            })
            .collect();
        got.sort();
        assert_eq!(got, expect);
        let f = thinned_product(&spec).unwrap();
        let width = f.terms().iter().map(|t| -t.exponent.coeff(1).re).fold(0.0, f64::max);
        assert!((width - spec.width()).abs() < 1e-9);
    }
}

#[test]
fn counting_slope_of_partial_sums() {
    for m in [2u64, 3, 5] {
        let f = partial_sum(m).unwrap();
        let slope = (jensen_counting(&f, 200.0) - jensen_counting(&f, 100.0)) / 100.0;
        let want = (m as f64).ln() / std::f64::consts::PI;
        assert!((slope / want - 1.0).abs() < 0.05, "M = {}: {} vs {}", m, slope, want);
    }
}
