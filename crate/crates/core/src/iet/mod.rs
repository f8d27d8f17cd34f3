//! Interval exchange transformations with exact lengths, and the orbit
//! statistic `min_{1≤k≤N} k·|T^k(p_a) − p_b|` over pairs of discontinuities.

mod quadratic;

pub use quadratic::{QuadraticError, QuadraticNumber};

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IetError {
    #[error("π fixes {{1..{0}}}, so T is reducible")]
    Reducible(usize),
    #[error("the lengths sum to {0}, not 1")]
    NotNormalized(String),
    #[error("length {0} is not positive")]
    NonPositive(usize),
    #[error("{0} lengths for a permutation of {1} symbols")]
    SizeMismatch(usize, usize),
    #[error("{0:?} is not a permutation of 1..n")]
    InvalidPermutation(Vec<usize>),
    #[error(transparent)]
    Field(#[from] QuadraticError),
    #[error("discontinuity {0} does not exist")]
    NoSuchDiscontinuity(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// `T(x) = x − s_i + t_i` on `[s_i, s_{i+1})`, where interval `i` lands in
/// position `π(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Iet {
    lambda: Vec<QuadraticNumber>,
    /// One-line notation, 1-based.
    pi: Vec<usize>,
    starts: Vec<QuadraticNumber>,
    shift: Vec<QuadraticNumber>,
}

fn check_permutation(pi: &[usize]) -> Result<(), IetError> {
    let n = pi.len();
    let mut seen = vec![false; n];
    for &p in pi {
        if p == 0 || p > n || seen[p - 1] {
            return Err(IetError::InvalidPermutation(pi.to_vec()));
        }
        seen[p - 1] = true;
    }
    Ok(())
}

pub fn make_iet(lambda: Vec<QuadraticNumber>, pi: Vec<usize>) -> Result<Iet, IetError> {
    let n = pi.len();
    if lambda.len() != n {
        return Err(IetError::SizeMismatch(lambda.len(), n));
    }
    check_permutation(&pi)?;
    for k in 1..n {
        if pi[..k].iter().all(|&p| p <= k) {
            return Err(IetError::Reducible(k));
        }
    }
    let mut total = QuadraticNumber::zero();
    for (i, l) in lambda.iter().enumerate() {
        if !l.is_positive() {
            return Err(IetError::NonPositive(i + 1));
        }
        total = total.checked_add(l)?;
    }
    if total != QuadraticNumber::one() {
        return Err(IetError::NotNormalized(total.to_string()));
    }
    let mut starts = Vec::with_capacity(n);
    let mut acc = QuadraticNumber::zero();
    for l in &lambda {
        starts.push(acc.clone());
        acc = acc + l.clone();
    }
    let shift = (0..n)
        .map(|i| {
            let t = (0..n)
                .filter(|&j| pi[j] < pi[i])
                .fold(QuadraticNumber::zero(), |s, j| s + lambda[j].clone());
            t - starts[i].clone()
        })
        .collect();
    Ok(Iet { lambda, pi, starts, shift })
}

impl Iet {
    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn lengths(&self) -> &[QuadraticNumber] {
        &self.lambda
    }

    pub fn permutation(&self) -> &[usize] {
        &self.pi
    }

    /// `p_k = λ₁ + … + λ_k` for `1 ≤ k < n`.
    pub fn discontinuities(&self) -> &[QuadraticNumber] {
        &self.starts[1..]
    }

    /// Index of the interval holding `x ∈ [0, 1)`.
    fn interval_of(&self, x: &QuadraticNumber) -> usize {
        self.starts.partition_point(|s| s <= x) - 1
    }

    pub fn step(&self, x: &QuadraticNumber) -> QuadraticNumber {
        x.clone() + self.shift[self.interval_of(x)].clone()
    }

    /// `T^k(x)`.
    pub fn apply(&self, x: &QuadraticNumber, k: usize) -> QuadraticNumber {
        (0..k).fold(x.clone(), |y, _| self.step(&y))
    }
}

/// Same permutation, lengths `λ_{σ(1)}, …, λ_{σ(n)}`.
pub fn reorder(t: &Iet, sigma: &[usize]) -> Result<Iet, IetError> {
    if sigma.len() != t.len() {
        return Err(IetError::SizeMismatch(sigma.len(), t.len()));
    }
    check_permutation(sigma)?;
    make_iet(sigma.iter().map(|&s| t.lambda[s - 1].clone()).collect(), t.pi.clone())
}

/// Statistic for one ordered pair of discontinuities.
#[derive(Clone, Debug, PartialEq)]
pub struct PairStat {
    /// 1-based ids of `p_a` and `p_b`.
    pub from: usize,
    pub to: usize,
    pub value: QuadraticNumber,
    /// Least `k` attaining the minimum.
    pub witness: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitStats {
    pub discontinuities: Vec<QuadraticNumber>,
    pub horizon: usize,
    pub pairs: Vec<PairStat>,
}

impl OrbitStats {
    /// Smallest statistic over all pairs, ties to the first pair.
    pub fn min(&self) -> Option<&PairStat> {
        self.pairs.iter().fold(None, |best: Option<&PairStat>, p| match best {
            Some(b) if b.value <= p.value => Some(b),
            _ => Some(p),
        })
    }
}

/// `min_{1≤k≤N} k·|T^k(p_a) − p_b|`.
pub fn badness_statistic(t: &Iet, a: usize, b: usize, horizon: usize) -> Result<PairStat, IetError> {
    let ps = t.discontinuities();
    let pa = ps.get(a.wrapping_sub(1)).ok_or(IetError::NoSuchDiscontinuity(a))?;
    let pb = ps.get(b.wrapping_sub(1)).ok_or(IetError::NoSuchDiscontinuity(b))?;
    let mut x = pa.clone();
    let mut best: Option<(QuadraticNumber, usize)> = None;
    for k in 1..=horizon {
        x = t.step(&x);
        let v = (x.clone() - pb.clone()).abs().mul_int(k as i64);
        if best.as_ref().is_none_or(|(m, _)| v < *m) {
            let zero = !v.is_positive();
            best = Some((v, k));
            if zero {
                break;
            }
        }
    }
    let (value, witness) = best.unwrap_or((QuadraticNumber::zero(), 0));
    Ok(PairStat { from: a, to: b, value, witness })
}

/// The statistic for every ordered pair, computed in parallel.
pub fn orbit_stats(t: &Iet, horizon: usize) -> OrbitStats {
    let m = t.discontinuities().len();
    let pairs: Vec<(usize, usize)> = (1..=m).flat_map(|a| (1..=m).map(move |b| (a, b))).collect();
    let pairs = pairs
        .par_iter()
        .map(|&(a, b)| badness_statistic(t, a, b, horizon).expect("valid ids"))
        .collect();
    OrbitStats { discontinuities: t.discontinuities().to_vec(), horizon, pairs }
}

/// Every reordering `σ` of the lengths, in lexicographic order.
pub fn all_orderings(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

/// `n 2` / `pi 2 1` / `lambda x₁ … x_n`, with `#` comments.
pub fn parse_iet(text: &str) -> Result<Iet, IetError> {
    let mut n: Option<usize> = None;
    let mut pi: Option<Vec<usize>> = None;
    let mut lambda: Option<Vec<QuadraticNumber>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| IetError::Parse { line: i + 1, msg };
        let mut words = line.split_whitespace();
        let key = words.next().expect("non-empty");
        let rest: Vec<&str> = words.collect();
        match key {
            "n" => {
                let [v] = rest.as_slice() else { return Err(bad("expected `n <count>`".into())) };
                n = Some(v.parse().map_err(|_| bad(format!("bad count {v:?}")))?);
            }
            "pi" => {
                pi = Some(
                    rest.iter()
                        .map(|w| w.parse().map_err(|_| bad(format!("bad permutation entry {w:?}"))))
                        .collect::<Result<_, _>>()?,
                );
            }
            "lambda" => {
                lambda = Some(
                    rest.iter()
                        .map(|w| w.parse().map_err(|e: QuadraticError| bad(e.to_string())))
                        .collect::<Result<_, _>>()?,
                );
            }
            other => return Err(bad(format!("unknown key {other:?}"))),
        }
    }
    let last = text.lines().count();
    let missing = |what: &str| IetError::Parse { line: last, msg: format!("missing `{what}` line") };
    let pi = pi.ok_or_else(|| missing("pi"))?;
    let lambda = lambda.ok_or_else(|| missing("lambda"))?;
    if let Some(n) = n {
        if n != pi.len() {
            return Err(IetError::SizeMismatch(n, pi.len()));
        }
    }
    make_iet(lambda, pi)
}

pub fn write_iet(t: &Iet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n {}", t.len());
    let pi: Vec<String> = t.pi.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "pi {}", pi.join(" "));
    let l: Vec<String> = t.lambda.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "lambda {}", l.join(" "));
    out
}

/// Per-pair table: ids, witness, exact value and its decimal.
pub fn write_stats(s: &OrbitStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "horizon {}", s.horizon);
    for (i, p) in s.discontinuities.iter().enumerate() {
        let _ = writeln!(out, "p{} {} exact # {:e}", i + 1, p, p.as_f64());
    }
    let _ = writeln!(out, "# from to n* statistic");
    for p in &s.pairs {
        let _ = writeln!(out, "{} {} {} {} exact # {:e}", p.from, p.to, p.witness, p.value, p.value.as_f64());
    }
    if let Some(m) = s.min() {
        let _ = writeln!(out, "min {} exact # {:e} pair {} {}", m.value, m.value.as_f64(), m.from, m.to);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qn(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    fn golden() -> Iet {
        make_iet(vec![qn("(-1+sqrt(5))/2"), qn("(3-sqrt(5))/2")], vec![2, 1]).unwrap()
    }

    #[test]
    fn two_iet_is_a_rotation() {
        let t = golden();
        let x = qn("1/10");
        assert_eq!(t.step(&x), x.clone() + qn("(3-sqrt(5))/2"));
        let half = make_iet(vec![qn("1/2"), qn("1/2")], vec![2, 1]).unwrap();
        assert_eq!(half.step(&qn("1/4")), qn("3/4"));
        assert_eq!(half.step(&qn("3/4")), qn("1/4"));
        let third = make_iet(vec![qn("2/3"), qn("1/3")], vec![2, 1]).unwrap();
        assert_eq!(third.apply(&QuadraticNumber::zero(), 3), QuadraticNumber::zero());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(make_iet(vec![qn("1/2"), qn("1/2")], vec![1, 2]), Err(IetError::Reducible(1)));
        assert!(matches!(make_iet(vec![qn("1/2"), qn("1/3")], vec![2, 1]), Err(IetError::NotNormalized(_))));
        assert!(matches!(make_iet(vec![qn("3/2"), qn("-1/2")], vec![2, 1]), Err(IetError::NonPositive(2))));
        assert_eq!(
            make_iet(vec![qn("1/3"), qn("1/3"), qn("1/3")], vec![2, 1, 3]),
            Err(IetError::Reducible(2))
        );
    }

    #[test]
    fn images_tile_the_interval() {
        let t = make_iet(vec![qn("1/5"), qn("3/10"), qn("1/10"), qn("2/5")], vec![3, 1, 4, 2]).unwrap();
        let mut images: Vec<(QuadraticNumber, QuadraticNumber)> = (0..4)
            .map(|i| {
                let lo = t.step(&t.starts[i]);
                (lo.clone(), lo + t.lambda[i].clone())
            })
            .collect();
        images.sort();
        assert_eq!(images[0].0, QuadraticNumber::zero());
        assert!(images.windows(2).all(|w| w[0].1 == w[1].0));
        assert_eq!(images[3].1, QuadraticNumber::one());
    }

    #[test]
    fn periodic_rotation_has_zero_statistic() {
        let t = make_iet(vec![qn("1/2"), qn("1/2")], vec![2, 1]).unwrap();
        let s = badness_statistic(&t, 1, 1, 100).unwrap();
        assert_eq!(s.value, QuadraticNumber::zero());
        assert_eq!(s.witness, 2);
        assert!(badness_statistic(&t, 1, 2, 10).is_err());
    }

    #[test]
    fn reorder_round_trip() {
        let t = golden();
        assert_eq!(reorder(&t, &[1, 2]).unwrap(), t);
        let s = reorder(&t, &[2, 1]).unwrap();
        assert_eq!(s.lengths()[1], qn("(-1+sqrt(5))/2"));
        assert_eq!(reorder(&s, &[2, 1]).unwrap(), t);
        assert_eq!(all_orderings(3).len(), 6);
    }

    #[test]
    fn file_round_trip() {
        let t = golden();
        assert_eq!(parse_iet(&write_iet(&t)).unwrap(), t);
        let err = parse_iet("n 2\npi 2 1\nlambda 1/2 x\n").unwrap_err();
        assert!(matches!(err, IetError::Parse { line: 3, .. }));
    }
}
