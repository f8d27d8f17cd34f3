mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schmidt_flat::iet::{badness_statistic, make_iet, orbit_stats, parse_iet, reorder, write_iet, write_stats, QuadraticNumber};
use schmidt_flat::Rational;

fn qn(s: &str) -> QuadraticNumber {
    s.parse().unwrap()
}

fn rotation(alpha: &QuadraticNumber) -> schmidt_flat::iet::Iet {
    make_iet(vec![QuadraticNumber::one() - alpha.clone(), alpha.clone()], vec![2, 1]).unwrap()
}

#[test]
fn two_iet_matches_fractional_part_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..20 {
        let alpha = if i % 2 == 0 {
            let b: i64 = rng.gen_range(50..5000);
            QuadraticNumber::from_ratio(rng.gen_range(1..b), b)
        } else {
            // (k + √d)/m reduced into (0, 1).
            let d: u64 = [2, 3, 5, 6, 7, 10, 11, 13][rng.gen_range(0..8)];
            let m: i64 = rng.gen_range(2..9);
            let x = QuadraticNumber::new(Rational::from_integer(0.into()), Rational::new(1.into(), m.into()), d);
            x.clone() - QuadraticNumber::rational(Rational::from_integer(x.floor()))
        };
        let t = rotation(&alpha);
        let got = badness_statistic(&t, 1, 1, 3000).unwrap();
        let (value, k) = common::rotation_statistic_bruteforce(&alpha, 3000);
        assert_eq!(got.value, value, "α = {alpha}");
        assert_eq!(got.witness, k, "α = {alpha}");
    }
}

#[test]
fn golden_orbit_has_no_drift() {
    let alpha = qn("(3-sqrt(5))/2");
    let t = rotation(&alpha);
    let x0 = qn("1/7");
    let x = t.apply(&x0, 100_000);
    let want = x0 + alpha.mul_int(100_000);
    let frac = want.clone() - QuadraticNumber::rational(Rational::from_integer(want.floor()));
    assert_eq!(x, frac);
}

#[test]
fn golden_fibonacci_returns() {
    // T^{F_m}(0) sits at distance ‖F_m α‖ = |F_m α − F_{m−2}| from 0 or 1.
    let alpha = qn("(3-sqrt(5))/2");
    let t = rotation(&alpha);
    let fib = [1i64, 2, 3, 5, 8, 13, 21, 34, 55, 89];
    for w in fib.windows(3) {
        let x = t.apply(&QuadraticNumber::zero(), w[2] as usize);
        let d = (alpha.mul_int(w[2]) - QuadraticNumber::from_ratio(w[0], 1)).abs();
        assert!(x == d || x == QuadraticNumber::one() - d.clone(), "F = {}", w[2]);
    }
}

#[test]
fn golden_reordering_is_badly_approximable() {
    let t = rotation(&qn("(3-sqrt(5))/2"));
    let s = reorder(&t, &[2, 1]).unwrap();
    assert_eq!(s.lengths()[1], qn("(-1+sqrt(5))/2"));
    assert!(orbit_stats(&s, 10_000).min().unwrap().value.is_positive());
}

#[test]
fn stats_table_is_tagged() {
    let t = make_iet(vec![qn("1/4"), qn("(-1+sqrt(5))/4"), qn("(4-sqrt(5))/4")], vec![3, 1, 2]).unwrap();
    let out = write_stats(&orbit_stats(&t, 50));
    assert_eq!(out.lines().filter(|l| l.contains(" exact # ")).count(), 2 + 4 + 1);
    assert_eq!(parse_iet(&write_iet(&t)).unwrap(), t);
}

fn random_irreducible(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut p: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            p.swap(i, rng.gen_range(0..=i));
        }
        if (1..n).all(|k| !p[..k].iter().all(|&x| x <= k)) {
            return p;
        }
    }
}

fn arb_rational_iet() -> impl Strategy<Value = schmidt_flat::iet::Iet> {
    (2usize..6)
        .prop_flat_map(|n| (prop::collection::vec(1i64..50, n), any::<u64>()))
        .prop_map(|(w, seed)| {
            let total: i64 = w.iter().sum();
            let pi = random_irreducible(w.len(), seed);
            make_iet(w.iter().map(|&x| QuadraticNumber::from_ratio(x, total)).collect(), pi).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statistic_nonincreasing_in_horizon(t in arb_rational_iet(), n in 1usize..200) {
        let a = orbit_stats(&t, n);
        let b = orbit_stats(&t, n + 37);
        for (x, y) in a.pairs.iter().zip(&b.pairs) {
            prop_assert!(y.value <= x.value);
            prop_assert!(!x.value.signum().is_lt());
        }
    }

    #[test]
    fn map_is_a_bijection_on_samples(t in arb_rational_iet(), k in 1i64..997) {
        // Images of distinct grid points are distinct points of [0, 1).
        let pts: Vec<QuadraticNumber> = (0..40).map(|i| QuadraticNumber::from_ratio((i * k) % 997, 997)).collect();
        let mut ims: Vec<QuadraticNumber> = pts.iter().map(|x| t.step(x)).collect();
        for y in &ims {
            prop_assert!(!y.signum().is_lt() && *y < QuadraticNumber::one());
        }
        ims.sort();
        ims.dedup();
        let mut src = pts.clone();
        src.sort();
        src.dedup();
        prop_assert_eq!(ims.len(), src.len());
    }

    #[test]
    fn reorder_inverse_round_trip(t in arb_rational_iet(), seed in any::<u64>()) {
        let n = t.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sigma: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            sigma.swap(i, rng.gen_range(0..=i));
        }
        let mut inv = vec![0; n];
        for (i, &s) in sigma.iter().enumerate() {
            inv[s - 1] = i + 1;
        }
        let r = reorder(&t, &sigma).unwrap();
        prop_assert_eq!(reorder(&r, &inv).unwrap(), t);
    }
}
