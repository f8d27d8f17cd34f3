//! Exact planar geometry inside the square tiling: straight-line development,
//! convex clipping and segment coverage.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::Rational;
use crate::surface::origami::{Point as SmallPoint, SquareTiling};

pub type P = [Rational; 2];

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pt(x: i64, y: i64) -> P {
    [int(x), int(y)]
}

pub fn from_small(p: &SmallPoint) -> P {
    let c = |x: &num_rational::Ratio<i64>| frac(*x.numer(), *x.denom());
    [c(&p[0]), c(&p[1])]
}

pub fn add(a: &P, b: &P) -> P {
    [&a[0] + &b[0], &a[1] + &b[1]]
}

pub fn sub(a: &P, b: &P) -> P {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

pub fn scale(a: &P, k: &Rational) -> P {
    [&a[0] * k, &a[1] * k]
}

pub fn cross(a: &P, b: &P) -> Rational {
    &a[0] * &b[1] - &a[1] * &b[0]
}

pub fn dot(a: &P, b: &P) -> Rational {
    &a[0] * &b[0] + &a[1] * &b[1]
}

/// Follows the straight path from the local point `from` of `square` by
/// `delta` (developed coordinates). `None` if the start is not inside the open
/// square, the path meets a square corner or the end lies on a square side.
pub fn develop(t: &SquareTiling, square: usize, from: &P, delta: &P) -> Option<(usize, P)> {
    let zero = Rational::zero();
    let one = Rational::one();
    if !(from[0] > zero && from[0] < one && from[1] > zero && from[1] < one) {
        return None;
    }
    let end = add(from, delta);
    let mut events: Vec<(Rational, usize, bool)> = Vec::new();
    for axis in 0..2 {
        let d = &delta[axis];
        if d.is_zero() {
            continue;
        }
        if end[axis].is_integer() {
            return None;
        }
        let x0 = &from[axis];
        if d.is_positive() {
            let last = end[axis].floor().to_integer().to_i64()?;
            for k in 1..=last {
                events.push(((int(k) - x0) / d, axis, true));
            }
        } else {
            let first = end[axis].ceil().to_integer().to_i64()?;
            for k in (first..=0).rev() {
                events.push(((int(k) - x0) / d, axis, false));
            }
        }
    }
    events.sort_by(|a, b| a.0.cmp(&b.0));
    if events.windows(2).any(|w| w[0].0 == w[1].0) {
        return None;
    }
    let mut sq = square;
    for (_, axis, forward) in &events {
        sq = match (axis, forward) {
            (0, true) => t.h.apply(sq),
            (0, false) => t.h_inv.apply(sq),
            (_, true) => t.v.apply(sq),
            (_, false) => t.v_inv.apply(sq),
        };
    }
    let local = [&end[0] - end[0].floor(), &end[1] - end[1].floor()];
    Some((sq, local))
}

/// Part of the convex polygon on the left of the directed line `a → b`.
fn clip_half(poly: &[P], a: &P, b: &P) -> Vec<P> {
    let dir = sub(b, a);
    let side = |p: &P| cross(&dir, &sub(p, a));
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let p = &poly[i];
        let q = &poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if !sp.is_negative() {
            out.push(p.clone());
        }
        if (sp.is_positive() && sq.is_negative()) || (sp.is_negative() && sq.is_positive()) {
            let t = &sp / (&sp - &sq);
            out.push(add(p, &scale(&sub(q, p), &t)));
        }
    }
    out
}

/// Intersection of two convex polygons; `clip` must be counterclockwise.
pub fn clip_convex(subject: &[P], clip: &[P]) -> Vec<P> {
    let mut out = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        out = clip_half(&out, &clip[i], &clip[(i + 1) % clip.len()]);
    }
    out
}

/// Twice the signed area.
pub fn area2(poly: &[P]) -> Rational {
    let mut s = Rational::zero();
    for i in 0..poly.len() {
        s += cross(&poly[i], &poly[(i + 1) % poly.len()]);
    }
    s
}

pub fn cell(i: i64, j: i64) -> Vec<P> {
    vec![pt(i, j), pt(i + 1, j), pt(i + 1, j + 1), pt(i, j + 1)]
}

pub fn centroid(poly: &[P]) -> P {
    let n = int(poly.len() as i64);
    let mut c = [Rational::zero(), Rational::zero()];
    for p in poly {
        c = add(&c, p);
    }
    [&c[0] / &n, &c[1] / &n]
}

/// Parameter range of `a + t(b − a)`, `t ∈ [0, 1]`, inside a convex
/// counterclockwise polygon.
pub fn segment_in_convex(poly: &[P], a: &P, b: &P) -> Option<(Rational, Rational)> {
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    let ab = sub(b, a);
    for i in 0..poly.len() {
        let u = &poly[i];
        let e = sub(&poly[(i + 1) % poly.len()], u);
        let alpha = cross(&e, &sub(a, u));
        let beta = cross(&e, &ab);
        if beta.is_zero() {
            if alpha.is_negative() {
                return None;
            }
        } else {
            let t = -alpha / &beta;
            if beta.is_positive() {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Parameter range of `a → b` covered by the collinear segment `c d`.
pub fn collinear_overlap(a: &P, b: &P, c: &P, d: &P) -> Option<(Rational, Rational)> {
    let ab = sub(b, a);
    if !cross(&ab, &sub(c, a)).is_zero() || !cross(&ab, &sub(d, a)).is_zero() {
        return None;
    }
    let len2 = dot(&ab, &ab);
    let tc = dot(&sub(c, a), &ab) / &len2;
    let td = dot(&sub(d, a), &ab) / &len2;
    let lo = tc.clone().min(td.clone()).max(Rational::zero());
    let hi = tc.max(td).min(Rational::one());
    (lo <= hi).then_some((lo, hi))
}

/// The closed intervals cover `[0, 1]`.
pub fn covers_unit(mut ivs: Vec<(Rational, Rational)>) -> bool {
    ivs.sort_by(|a, b| a.0.cmp(&b.0));
    let mut reach = Rational::zero();
    let mut started = false;
    for (lo, hi) in ivs {
        if lo > reach {
            return false;
        }
        started = true;
        if hi > reach {
            reach = hi;
        }
    }
    started && reach >= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Perm;

    #[test]
    fn develop_tracks_squares() {
        let t = SquareTiling::new(
            Perm::parse_cycles("(1 2)", Some(3)).unwrap(),
            Perm::parse_cycles("(1 3)", Some(3)).unwrap(),
        );
        let from = [frac(1, 2), frac(1, 3)];
        let (s, p) = develop(&t, 0, &from, &pt(1, 0)).unwrap();
        assert_eq!(s, 1);
        assert_eq!(p, from);
        let (s, _) = develop(&t, 0, &from, &pt(0, 1)).unwrap();
        assert_eq!(s, 2);
        let (s, _) = develop(&t, 0, &from, &pt(-2, 0)).unwrap();
        assert_eq!(s, 0);
        assert!(develop(&t, 0, &[frac(1, 2), frac(1, 2)], &pt(1, 1)).is_none());
        assert!(develop(&t, 0, &[frac(1, 2), frac(1, 2)], &pt(1, 2)).is_some());
        assert!(develop(&t, 0, &[frac(1, 2), frac(1, 2)], &[frac(1, 2), frac(1, 2)]).is_none());
    }

    #[test]
    fn clipping_and_coverage() {
        let tri = vec![pt(0, 0), pt(2, 0), pt(0, 2)];
        let piece = clip_convex(&tri, &cell(0, 0));
        assert_eq!(area2(&piece), int(2));
        let piece = clip_convex(&tri, &cell(1, 1));
        assert!(area2(&piece).is_zero());
        let (lo, hi) = segment_in_convex(&tri, &pt(-1, 1), &pt(3, 1)).unwrap();
        assert_eq!((lo, hi), (frac(1, 4), frac(1, 2)));
        assert!(covers_unit(vec![(frac(1, 2), int(1)), (int(0), frac(1, 2))]));
        assert!(!covers_unit(vec![(frac(1, 2), int(1)), (int(0), frac(1, 3))]));
        assert_eq!(
            collinear_overlap(&pt(0, 0), &pt(2, 0), &pt(1, 0), &pt(5, 0)),
            Some((frac(1, 2), int(1)))
        );
    }
}
