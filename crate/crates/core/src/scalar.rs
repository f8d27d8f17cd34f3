//! Scalar abstraction shared by the game engine, the flow computations and the
//! blocking strategy.
//!
//! Three concrete scalars are supported: `f32`, `f64` and the exact
//! [`Rational`] (`num_rational::BigRational`). Exact scalars compare without
//! tolerance; floating scalars use a relative equality tolerance so that the
//! equality constraints of the classic game survive rounding.
//!
//! Transcendental quantities (π, arctangent, square roots) cannot be exact in
//! ℚ. [`Real`] evaluates them to a caller-chosen number of bits and rounds
//! the result to a dyadic rational, so an exact game can still be played on
//! the circle of directions.

use std::cell::RefCell;
use std::fmt::{Debug, Display};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Default working precision, in bits, for exact transcendental evaluation.
pub const DEFAULT_ANGLE_BITS: u32 = 384;

/// Arithmetic required by the game engine and interval geometry.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Relative tolerance τ_eq used for equality constraints.
    fn tolerance() -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Converts a double. Exact scalars reproduce the binary value exactly.
    fn from_f64_lossy(x: f64) -> Self;

    fn as_f64(&self) -> f64;

    fn floor_value(&self) -> Self;

    /// Parses the token form written by [`Scalar::to_token`].
    fn parse_token(s: &str) -> Option<Self>;

    /// Lossless text form: `p/q` for rationals, shortest round-trip decimal for floats.
    fn to_token(&self) -> String;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half(&self) -> Self {
        self.clone() / Self::two()
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// `self mod m` in `[0, m)` for positive `m`.
    fn rem_euclid_by(&self, m: &Self) -> Self {
        let q = (self.clone() / m.clone()).floor_value();
        self.clone() - q * m.clone()
    }

    /// `a == b` up to τ_eq (exact equality for exact scalars).
    fn tol_eq(a: &Self, b: &Self) -> bool {
        if Self::EXACT {
            return a == b;
        }
        let scale = Self::max_of(&a.abs(), &b.abs());
        (a.clone() - b.clone()).abs() <= scale * Self::tolerance()
    }

    /// `a <= b` up to τ_eq.
    fn tol_le(a: &Self, b: &Self) -> bool {
        if Self::EXACT {
            return a <= b;
        }
        let scale = Self::max_of(&a.abs(), &b.abs());
        a.clone() <= b.clone() + scale * Self::tolerance()
    }
}

/// Scalars that can approximate π, arctangents and square roots.
pub trait Real: Scalar {
    fn pi_approx(bits: u32) -> Self;
    fn atan_approx(&self, bits: u32) -> Self;
    fn sqrt_approx(&self, bits: u32) -> Self;
    fn exp_approx(&self, bits: u32) -> Self;
    fn sin_cos_approx(&self, bits: u32) -> (Self, Self);
}

macro_rules! impl_float_scalar {
    ($t:ty, $tol_exp:expr, $pi:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn tolerance() -> Self {
                (2.0 as $t).powi(-$tol_exp)
            }

            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }

            fn from_f64_lossy(x: f64) -> Self {
                x as $t
            }

            fn as_f64(&self) -> f64 {
                *self as f64
            }

            fn floor_value(&self) -> Self {
                self.floor()
            }

            fn parse_token(s: &str) -> Option<Self> {
                if let Some((p, q)) = s.split_once('/') {
                    let p: $t = p.trim().parse().ok()?;
                    let q: $t = q.trim().parse().ok()?;
                    return Some(p / q);
                }
                s.trim().parse().ok()
            }

            fn to_token(&self) -> String {
                format!("{:?}", self)
            }
        }

        impl Real for $t {
            fn pi_approx(_bits: u32) -> Self {
                $pi
            }
            fn atan_approx(&self, _bits: u32) -> Self {
                self.atan()
            }
            fn sqrt_approx(&self, _bits: u32) -> Self {
                self.sqrt()
            }
            fn exp_approx(&self, _bits: u32) -> Self {
                self.exp()
            }
            fn sin_cos_approx(&self, _bits: u32) -> (Self, Self) {
                self.sin_cos()
            }
        }
    };
}

impl_float_scalar!(f32, 18, std::f32::consts::PI);
impl_float_scalar!(f64, 40, std::f64::consts::PI);

impl Scalar for Rational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_f64_lossy(x: f64) -> Self {
        Rational::from_float(x).expect("finite double")
    }

    fn as_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn parse_token(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Ok(r) = s.parse::<Rational>() {
            return Some(r);
        }
        parse_decimal_exact(s)
    }

    fn to_token(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Nearest double to a rational, robust for numerators and denominators
/// that overflow `f64` on their own.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift >= 0 {
        r.numer() / (r.denom() << shift as usize)
    } else {
        (r.numer() << (-shift) as usize) / r.denom()
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

/// Parses `-12.375` or `1e-3` style decimals exactly.
fn parse_decimal_exact(s: &str) -> Option<Rational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let n = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    let e = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if e >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, e as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, (-e) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn word_bits(bits: u32) -> usize {
    (bits as usize).div_ceil(64) * 64 + 64
}

fn bigint_to_bigfloat(n: &BigInt) -> BigFloat {
    let (sign, digits) = n.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::from_word(0, 64);
    }
    let s = if sign == BigSign::Minus { Sign::Neg } else { Sign::Pos };
    let e = (digits.len() * 64) as astro_float::Exponent;
    BigFloat::from_words(&digits, s, e)
}

fn rational_to_bigfloat(r: &Rational, p: usize) -> BigFloat {
    let n = bigint_to_bigfloat(r.numer());
    let d = bigint_to_bigfloat(r.denom());
    n.div(&d, p, RoundingMode::ToEven)
}

/// Rounds a big float to the dyadic rational with `bits` fractional bits
/// relative to its leading bit.
fn bigfloat_to_rational(x: &BigFloat, bits: u32) -> Rational {
    let Some((words, nbits, sign, exp, _)) = x.as_raw_parts() else {
        panic!("non-finite big float");
    };
    let mut m = BigInt::zero();
    for w in words.iter().rev() {
        m = (m << 64usize) + BigInt::from(*w);
    }
    if m.is_zero() {
        return Rational::zero();
    }
    // value = m * 2^(exp - nbits); keep `bits` significant bits.
    let excess = (nbits as i64) - (bits as i64);
    let mut e = exp as i64 - nbits as i64;
    if excess > 0 {
        let half = BigInt::one() << (excess as usize - 1);
        m = (m + half) >> excess as usize;
        e += excess;
    }
    let mut r = if e >= 0 {
        Rational::from_integer(m << e as usize)
    } else {
        Rational::new(m, BigInt::one() << (-e) as usize)
    };
    if sign == Sign::Neg {
        r = -r;
    }
    r
}

impl Real for Rational {
    fn pi_approx(bits: u32) -> Self {
        let p = word_bits(bits);
        CONSTS.with(|cc| {
            let pi = cc.borrow_mut().pi(p, RoundingMode::ToEven);
            bigfloat_to_rational(&pi, bits + 2)
        })
    }

    fn atan_approx(&self, bits: u32) -> Self {
        if self.is_zero() {
            return Rational::zero();
        }
        let p = word_bits(bits);
        let x = rational_to_bigfloat(self, p);
        CONSTS.with(|cc| {
            let a = x.atan(p, RoundingMode::ToEven, &mut cc.borrow_mut());
            bigfloat_to_rational(&a, bits + 2)
        })
    }

    fn sqrt_approx(&self, bits: u32) -> Self {
        if self.is_zero() {
            return Rational::zero();
        }
        let p = word_bits(bits);
        let x = rational_to_bigfloat(self, p);
        let s = x.sqrt(p, RoundingMode::ToEven);
        bigfloat_to_rational(&s, bits + 2)
    }

    fn exp_approx(&self, bits: u32) -> Self {
        let p = word_bits(bits);
        let x = rational_to_bigfloat(self, p);
        CONSTS.with(|cc| {
            let a = x.exp(p, RoundingMode::ToEven, &mut cc.borrow_mut());
            bigfloat_to_rational(&a, bits + 2)
        })
    }

    fn sin_cos_approx(&self, bits: u32) -> (Self, Self) {
        let p = word_bits(bits);
        let x = rational_to_bigfloat(self, p);
        CONSTS.with(|cc| {
            let mut cc = cc.borrow_mut();
            let s = x.sin(p, RoundingMode::ToEven, &mut cc);
            let c = x.cos(p, RoundingMode::ToEven, &mut cc);
            (bigfloat_to_rational(&s, bits + 2), bigfloat_to_rational(&c, bits + 2))
        })
    }
}

/// Angle in `[0, π)` that makes the holonomy `(h, v)` vertical under the
/// rotation `r_θ = [[cos θ, sin θ], [−sin θ, cos θ]]`, i.e. `tan θ = −h/v`.
pub fn vertical_angle<S: Real>(h: &S, v: &S, bits: u32) -> S {
    let pi = S::pi_approx(bits);
    if v.is_zero() {
        return pi.half();
    }
    let t = (-(h.clone()) / v.clone()).atan_approx(bits);
    if t < S::zero() {
        t + pi
    } else {
        t
    }
}

/// Distance on the circle `ℝ / period·ℤ`.
pub fn circle_distance<S: Scalar>(a: &S, b: &S, period: &S) -> S {
    let d = (a.clone() - b.clone()).rem_euclid_by(period);
    let other = period.clone() - d.clone();
    S::min_of(&d, &other)
}

/// Rounds down to a multiple of 2^-bits.
pub fn dyadic_floor(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits as usize;
    let n = (x.numer() * &scale).div_floor(x.denom());
    Rational::new(n, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_pi_matches_double() {
        let pi = Rational::pi_approx(256);
        assert!((pi.as_f64() - std::f64::consts::PI).abs() < 1e-15);
        let pi2 = Rational::pi_approx(512);
        let diff = (pi - pi2).abs();
        assert!(diff < Rational::new(BigInt::one(), BigInt::one() << 250usize));
    }

    #[test]
    fn exact_atan_agrees_with_double() {
        for &(n, d) in &[(1i64, 1i64), (-3, 7), (1000, 999), (-1, 1000)] {
            let r = Rational::from_ratio(n, d).atan_approx(320);
            assert!((r.as_f64() - (n as f64 / d as f64).atan()).abs() < 1e-15);
        }
    }

    #[test]
    fn vertical_angle_conventions() {
        let deg = |h: f64, v: f64| vertical_angle(&h, &v, 0).to_degrees();
        assert!((deg(0.0, 1.0)).abs() < 1e-12);
        assert!((deg(1.0, 0.0) - 90.0).abs() < 1e-12);
        assert!((deg(1.0, 1.0) - 135.0).abs() < 1e-12);
        assert!((deg(-1.0, 1.0) - 45.0).abs() < 1e-12);
    }

    #[test]
    fn parse_tokens() {
        assert_eq!(Rational::parse_token("3/4"), Some(Rational::from_ratio(3, 4)));
        assert_eq!(Rational::parse_token("-0.125"), Some(Rational::from_ratio(-1, 8)));
        assert_eq!(Rational::parse_token("1e-2"), Some(Rational::from_ratio(1, 100)));
        assert_eq!(f64::parse_token("1/4"), Some(0.25));
        let x = 0.1f64;
        assert_eq!(f64::parse_token(&x.to_token()), Some(x));
    }

    #[test]
    fn huge_rationals_convert_to_double() {
        let tiny = Rational::new(BigInt::one(), BigInt::one() << 2000usize);
        let r = Rational::from_integer(BigInt::from(3)) + tiny;
        assert_eq!(r.as_f64(), 3.0);
        let small = Rational::new(BigInt::from(5), BigInt::one() << 1100usize);
        assert_eq!(small.as_f64(), 0.0);
        let mid = Rational::new(BigInt::from(5), BigInt::one() << 1000usize);
        assert!((mid.as_f64() / (5.0 * 2f64.powi(-1000)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_metric_wraps() {
        let p = 10.0f64;
        assert_eq!(circle_distance(&1.0, &9.0, &p), 2.0);
        assert_eq!(circle_distance(&3.0, &4.5, &p), 1.5);
    }
}
