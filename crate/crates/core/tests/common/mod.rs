//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's enumeration, badness or orbit code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::Ratio;
use schmidt_flat::iet::QuadraticNumber;
use schmidt_flat::Rational;

/// Canonical primitive vectors (`v > 0`, or `v = 0` and `h > 0`) with
/// max-norm at most `k`, by gcd.
pub fn primitive_vectors(k: i64) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for h in -k..=k {
        for v in 0..=k {
            if (v > 0 || h > 0) && h.gcd(&v) == 1 {
                out.insert((h, v));
            }
        }
    }
    out
}

/// Saddle connections of the L-shaped origami with squares 0 at (0,0),
/// 1 at (1,0) and 2 at (0,1), traced straight across the glued squares.
/// Entries are `(square left, h, v)` with `max(|h|, |v|)² ≤ bound2`.
///
/// A ray in direction `(p, q)` with `p ≥ 0` leaves the lower-left corner of
/// its square; with `p < 0` it leaves the lower-right corner.
pub fn l_origami_connections(bound2: i64) -> BTreeSet<(usize, i64, i64)> {
    type Q = Ratio<i64>;
    let right = [1usize, 0, 2];
    let top = [2usize, 1, 0];
    let left = [1usize, 0, 2];
    let k = (bound2 as f64).sqrt() as i64 + 1;
    let zero = Q::from_integer(0);
    let one = Q::from_integer(1);
    let mut out = BTreeSet::new();
    for p in -k..=k {
        for q in 0..=k {
            if !(q > 0 || p > 0) {
                continue;
            }
            for s0 in 0..3 {
                let (mut s, mut x, mut y) = (s0, if p < 0 { one } else { zero }, zero);
                let (mut dx, mut dy) = (zero, zero);
                loop {
                    let tx = match p.signum() {
                        1 => Some((one - x) / p),
                        -1 => Some(x / -p),
                        _ => None,
                    };
                    let ty = if q > 0 { Some((one - y) / q) } else { None };
                    let t = match (tx, ty) {
                        (Some(a), Some(b)) => a.min(b),
                        (Some(a), None) => a,
                        (None, Some(b)) => b,
                        (None, None) => unreachable!(),
                    };
                    x += t * p;
                    y += t * q;
                    dx += t * p;
                    dy += t * q;
                    let corner = (x == zero || x == one) && (y == zero || y == one);
                    if corner {
                        break;
                    }
                    if p > 0 && x == one {
                        s = right[s];
                        x = zero;
                    } else if p < 0 && x == zero {
                        s = left[s];
                        x = one;
                    }
                    if q > 0 && y == one {
                        s = top[s];
                        y = zero;
                    }
                }
                assert!(dx.is_integer() && dy.is_integer());
                let (h, v) = (dx.to_integer(), dy.to_integer());
                let m = h.abs().max(v.abs());
                if m * m <= bound2 {
                    out.insert((s0, h, v));
                }
            }
        }
    }
    out
}

/// `p_k/q_k` of `[a₀; a₁, a₂, …]`.
pub fn convergents(cf: &[i64]) -> Vec<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, cf[0], 1i64);
    let mut out = vec![(p1, q1)];
    for &a in &cf[1..] {
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    out
}

/// Continued fraction of `(√5 − 1)/2`: `[0; 1, 1, 1, …]`.
pub fn golden_cf(len: usize) -> Vec<i64> {
    let mut v = vec![1; len];
    v[0] = 0;
    v
}

pub fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// `q‖qφ‖` at the largest convergent denominator `q ≤ qmax` of `φ`.
pub fn slope_statistic_tail(qmax: i64) -> f64 {
    let phi = golden();
    let c = convergents(&[1; 60]);
    let &(p, q) = c.iter().take_while(|c| c.1 <= qmax).last().expect("q = 1");
    q as f64 * (q as f64 * phi - p as f64).abs()
}

/// Direction of the torus vector `(−(φ−1), 1)` in the `θ` convention, so
/// vectors `(−p, q)` with `p/q` a convergent of `φ − 1` approach it.
pub fn golden_direction() -> f64 {
    (golden() - 1.0).atan()
}

/// `min max(|h|,|v|)²·|θ(h,v) − ψ|` over the convergents of `φ − 1` with
/// `q ≤ qmax`, for `ψ` the golden direction. By Legendre's theorem a
/// non-convergent has `q·|qα − p| ≥ 1/2`; the caller checks the oracle value
/// against the resulting floor.
pub fn golden_badness_oracle(qmax: i64) -> f64 {
    let psi = golden_direction();
    convergents(&golden_cf(60))
        .into_iter()
        .filter(|&(_, q)| q >= 1 && q <= qmax)
        .map(|(p, q)| {
            let theta = (p as f64 / q as f64).atan();
            let l = p.abs().max(q) as f64;
            l * l * (theta - psi).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Lower bound for every other canonical vector. With `0 ≤ p ≤ q`,
/// `|atan(p/q) − atan α| ≥ |p/q − α|/2`, so a non-convergent gives at least
/// `q|qα − p|/2 ≥ 1/4`; vectors with `θ ≥ π/4` other than `(−1, 1)` have
/// `L ≥ 2` and angle gap above `0.23`, and those with `θ ≥ π/2` or `θ = 0`
/// are more than `0.55` away.
pub fn golden_non_convergent_floor() -> f64 {
    0.25
}

/// `min_t max(e^t L sin c, e^{−t} L cos c)` by golden-section search.
pub fn numeric_min_flow(l: f64, c: f64) -> f64 {
    let f = |t: f64| (t.exp() * l * c.sin()).max((-t).exp() * l * c.cos());
    let (mut a, mut b) = (-60.0f64, 60.0f64);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..400 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        if f(x1) < f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    f((a + b) / 2.0)
}

fn frac(x: &QuadraticNumber) -> QuadraticNumber {
    x.clone() - QuadraticNumber::rational(Rational::from_integer(x.floor()))
}

/// `min_{1≤k≤N} k·|{λ₁ + kα} − λ₁|` for the rotation `x ↦ x + α mod 1`
/// with `λ₁ = 1 − α`, by fractional parts.
pub fn rotation_statistic_bruteforce(alpha: &QuadraticNumber, horizon: usize) -> (QuadraticNumber, usize) {
    let l1 = QuadraticNumber::one() - alpha.clone();
    let mut best: Option<(QuadraticNumber, usize)> = None;
    for k in 1..=horizon {
        let x = frac(&(l1.clone() + alpha.mul_int(k as i64)));
        let v = (x - l1.clone()).abs().mul_int(k as i64);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, k));
        }
    }
    best.expect("horizon ≥ 1")
}

/// The golden-rotation statistic from the convergents `p/q` of
/// `α = (3 − √5)/2 = [0; 2, 1, 1, …]`.
///
/// Every `q` that is not a convergent denominator has `q‖qα‖ ≥ 1/2`, and the
/// orbit distance is at least `‖qα‖`, so when the convergent minimum is below
/// `1/2` it is the statistic.
pub fn golden_rotation_oracle(horizon: i64) -> QuadraticNumber {
    let alpha: QuadraticNumber = "(3-sqrt(5))/2".parse().unwrap();
    let mut cf = vec![1i64; 40];
    cf[0] = 0;
    cf[1] = 2;
    let best = convergents(&cf)
        .into_iter()
        .filter(|&(_, q)| q >= 1 && q <= horizon)
        .map(|(p, q)| {
            let f = alpha.mul_int(q) - QuadraticNumber::from_ratio(p, 1);
            // {qα} is f when f ≥ 0 and 1 + f otherwise; the orbit point is
            // λ₁ + {qα} − [λ₁ + {qα} ≥ 1], at distance {qα} or 1 − {qα} from λ₁.
            let d = if f >= QuadraticNumber::zero() {
                if f < alpha {
                    f
                } else {
                    QuadraticNumber::one() - f
                }
            } else {
                -f
            };
            d.mul_int(q)
        })
        .min()
        .expect("q = 1");
    assert!(best < QuadraticNumber::from_ratio(1, 2));
    best
}
