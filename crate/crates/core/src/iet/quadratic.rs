use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::scalar::Rational;

/// `a + b√d` with rational `a, b` and a non-square `d > 1`; `d = 0` marks a
/// rational number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    pub a: Rational,
    pub b: Rational,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadraticError {
    #[error("√{0} and √{1} generate different fields")]
    MixedFields(u64, u64),
    #[error("cannot parse {0:?} as a rational or (a+b*sqrt(d))/c")]
    Parse(String),
}

fn square_free_part(d: u64) -> (u64, u64) {
    // d = k²·m with m square-free.
    let (mut k, mut m) = (1u64, d);
    let mut p = 2u64;
    while p * p <= m {
        while m % (p * p) == 0 {
            m /= p * p;
            k *= p;
        }
        p += 1;
    }
    (k, m)
}

impl QuadraticNumber {
    pub fn rational(a: Rational) -> Self {
        QuadraticNumber { a, b: Rational::zero(), d: 0 }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::rational(Rational::new(n.into(), d.into()))
    }

    /// `a + b√d`, folding square factors of `d` into `b`.
    pub fn new(a: Rational, b: Rational, d: u64) -> Self {
        if b.is_zero() || d == 0 {
            return Self::rational(a);
        }
        let (k, m) = square_free_part(d);
        let b = b * Rational::from_integer(BigInt::from(k));
        if m == 1 {
            return Self::rational(a + b);
        }
        QuadraticNumber { a, b, d: m }
    }

    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn field(&self, other: &Self) -> Result<u64, QuadraticError> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(0),
            (false, true) => Ok(self.d),
            (true, false) => Ok(other.d),
            (false, false) if self.d == other.d => Ok(self.d),
            _ => Err(QuadraticError::MixedFields(self.d, other.d)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, QuadraticError> {
        let d = self.field(other)?;
        Ok(Self::new(self.a.clone() + other.a.clone(), self.b.clone() + other.b.clone(), d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, QuadraticError> {
        self.checked_add(&-other.clone())
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let k = Rational::from_integer(BigInt::from(k));
        Self::new(self.a.clone() * k.clone(), self.b.clone() * k, self.d)
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal || sa == sb {
            return if sa == Ordering::Equal { sb } else { sa };
        }
        if sa == Ordering::Equal {
            return sb;
        }
        let a2 = self.a.clone() * self.a.clone();
        let b2d = self.b.clone() * self.b.clone() * Rational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn as_f64(&self) -> f64 {
        let f = |r: &Rational| r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
        f(&self.a) + f(&self.b) * (self.d as f64).sqrt()
    }

    /// Floor, exact.
    pub fn floor(&self) -> BigInt {
        let mut guess = BigInt::from(self.as_f64().floor() as i64);
        loop {
            let g = Self::rational(Rational::from_integer(guess.clone()));
            if *self < g {
                guess -= 1;
            } else if *self >= g.checked_add(&Self::one()).expect("rational") {
                guess += 1;
            } else {
                return guess;
            }
        }
    }
}

impl Neg for QuadraticNumber {
    type Output = Self;
    fn neg(self) -> Self {
        QuadraticNumber { a: -self.a, b: -self.b, d: self.d }
    }
}

/// Panics when the operands lie in different quadratic fields.
impl Add for QuadraticNumber {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.checked_add(&o).expect("same field")
    }
}

impl Sub for QuadraticNumber {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(&o).expect("same field")
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numbers from different fields compare through the exact sign of
/// `a₁ − a₂ + b₁√d₁ − b₂√d₂`.
impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.checked_sub(other) {
            Ok(x) => x.signum(),
            Err(_) => {
                // a + b√d₁ − c√d₂ with a = a₁ − a₂: compare a + b√d₁ against c√d₂.
                let left = QuadraticNumber::new(self.a.clone() - other.a.clone(), self.b.clone(), self.d);
                let right = QuadraticNumber::new(Rational::zero(), other.b.clone(), other.d);
                let (sl, sr) = (left.signum(), right.signum());
                if sl != sr {
                    return sl.cmp(&sr);
                }
                // Same sign: compare squares, each in its own field after expansion.
                let l2 = QuadraticNumber::new(
                    left.a.clone() * left.a.clone() + left.b.clone() * left.b.clone() * Rational::from_integer(left.d.into()),
                    Rational::from_integer(2.into()) * left.a.clone() * left.b.clone(),
                    left.d,
                );
                let r2 = right.b.clone() * right.b.clone() * Rational::from_integer(right.d.into());
                let c = l2.checked_sub(&Self::rational(r2)).expect("rational").signum();
                if sl == Ordering::Less {
                    c.reverse()
                } else {
                    c
                }
            }
        }
    }
}

fn rat_token(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `p/q` for rationals, `(a+b*sqrt(d))/c` with integers `a, b, c` otherwise.
impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return f.write_str(&rat_token(&self.a));
        }
        let c = num_integer::lcm(self.a.denom().clone(), self.b.denom().clone());
        let cr = Rational::from_integer(c.clone());
        let a = (self.a.clone() * cr.clone()).to_integer();
        let b = (self.b.clone() * cr).to_integer();
        let sign = if b.is_negative() { '-' } else { '+' };
        let body = format!("{a}{sign}{}*sqrt({})", b.abs(), self.d);
        if c == BigInt::from(1) {
            write!(f, "({body})")
        } else {
            write!(f, "({body})/{c}")
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

impl FromStr for QuadraticNumber {
    type Err = QuadraticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || QuadraticError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(open) = t.find("sqrt(") else {
            return parse_rational(&t).map(Self::rational).ok_or_else(err);
        };
        let rest = &t[open + 5..];
        let close = rest.find(')').ok_or_else(err)?;
        let d: u64 = rest[..close].parse().map_err(|_| err())?;
        let tail = &rest[close + 1..];
        let head = &t[..open];
        let (head, tail, c) = if let Some(h) = head.strip_prefix('(') {
            let inner_tail = tail.strip_prefix(')').ok_or_else(err)?;
            let c = match inner_tail.strip_prefix('/') {
                Some(c) => c.parse::<BigInt>().map_err(|_| err())?,
                None if inner_tail.is_empty() => BigInt::from(1),
                None => return Err(err()),
            };
            (h, "", c)
        } else {
            (head, tail, BigInt::from(1))
        };
        if !tail.is_empty() || c.is_zero() {
            return Err(err());
        }
        // head is "a±b*", "a±", "±b*", "b*" or "".
        let head = head.strip_suffix('*').unwrap_or(head);
        let split = head.rfind(['+', '-']).filter(|&i| i > 0);
        let (a, b) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("0", head),
        };
        let b = match b {
            "" | "+" => BigInt::from(1),
            "-" => BigInt::from(-1),
            x => x.trim_start_matches('+').parse().map_err(|_| err())?,
        };
        let a: BigInt = a.parse().map_err(|_| err())?;
        let cr = Rational::from_integer(c);
        let root = d.sqrt();
        if root * root == d {
            return Ok(Self::rational((Rational::from_integer(a + b * BigInt::from(root))) / cr));
        }
        Ok(Self::new(Rational::from_integer(a) / cr.clone(), Rational::from_integer(b) / cr, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qn(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        for s in ["(-1+1*sqrt(5))/2", "(3-1*sqrt(5))/2", "1/3", "(2+3*sqrt(7))"] {
            assert_eq!(qn(s).to_string(), s);
        }
        assert_eq!(qn("(1+sqrt(5))/2"), qn("(1+1*sqrt(5))/2"));
        assert_eq!(qn("sqrt(8)"), qn("(0+2*sqrt(2))"));
        assert_eq!(qn("sqrt(9)"), qn("3"));
        assert!("(1+sqrt(x))/2".parse::<QuadraticNumber>().is_err());
    }

    #[test]
    fn exact_order() {
        let phi = qn("(1+sqrt(5))/2");
        assert!(phi > qn("1618033/1000000") && phi < qn("1618034/1000000"));
        let g = phi.clone() - QuadraticNumber::one();
        assert_eq!(g.clone() + qn("(3-sqrt(5))/2"), QuadraticNumber::one());
        assert_eq!(g.floor(), BigInt::from(0));
        assert_eq!(phi.mul_int(-3).floor(), BigInt::from(-5));
        assert!(qn("sqrt(2)") < qn("sqrt(3)"));
        assert!(qn("(1-1*sqrt(2))") > qn("(0-1*sqrt(3))/4"));
    }
}
