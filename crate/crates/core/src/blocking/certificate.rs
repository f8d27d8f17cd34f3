use std::fmt::Write as _;

use rayon::prelude::*;

use super::strategy::{interval_distance, seeds_in};
use super::{dangerous_complexes, to_rational, BlockingError, StrategyConstants};
use crate::complexes::{shrinkable_from_seeds, topologically_equivalent, DEFAULT_COMPLEX_CAP};
use crate::game::{Ball, Transcript};
use crate::scalar::{Rational, Real, Scalar};
use crate::surface::{DirectionSpectrum, SaddleConnection};

/// What to do when the spectrum is too short for a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Fail with [`BlockingError::IncompleteSpectrum`].
    Strict,
    /// Check what the spectrum holds and record the first truncated round.
    Truncated,
}

/// A level-`level` complex with `L(K)L(∂K)|I_j| < c_i²` whose direction is
/// within `βc_i²/(4L(K)L(∂K))` of `I_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation<S> {
    pub round: usize,
    pub level: usize,
    /// Raw holonomies and squares of the edges, longest first.
    pub edges: Vec<([i64; 2], usize)>,
    pub witness: SaddleConnection,
    pub theta: S,
    pub distance: S,
    pub bound: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport<S> {
    pub level: usize,
    /// Complexes meeting the hypothesis `L(K)L(∂K)|I_j| < c_i²`.
    pub checked: usize,
    pub violation: Option<Violation<S>>,
    /// `|Ω_i(j)|`.
    pub omega: usize,
    /// Complexes of `Ω_i(j)` are pairwise equivalent.
    pub separated: bool,
    /// `diam Θ_i(j) < β|I_j|/2`.
    pub diameter_ok: bool,
    pub truncated: bool,
    /// Length the hypothesis needs the spectrum to reach.
    pub needed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundReport<S> {
    pub round: usize,
    pub interval: Ball<S>,
    pub levels: Vec<LevelReport<S>>,
}

impl<S> RoundReport<S> {
    pub fn pass(&self) -> bool {
        self.levels.iter().all(|l| l.violation.is_none())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinalCertificate {
    pub psi: Rational,
    /// `min |γ|²d(θ_γ, ψ)` over the spectrum.
    pub value: Rational,
    pub witness: SaddleConnection,
    /// `βc₁²/4`.
    pub threshold: Rational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<S> {
    pub rounds: Vec<RoundReport<S>>,
    pub violation: Option<Violation<S>>,
    /// First round whose hypothesis reaches beyond the spectrum.
    pub truncated_from: Option<usize>,
    /// First round with `|I_j| < β^{2N_M}`; earlier rounds hold vacuously.
    pub j0: Option<usize>,
    pub separation_failures: Vec<(usize, usize)>,
    pub diameter_failures: Vec<(usize, usize)>,
    pub final_check: Option<FinalCertificate>,
    pub pass: bool,
}

fn check_level<S: Real>(
    k: &StrategyConstants<S>,
    spectrum: &DirectionSpectrum,
    round: usize,
    level: usize,
    ball: &Ball<S>,
    mode: Mode,
) -> Result<LevelReport<S>, BlockingError> {
    let c = k.c_i(level).clone();
    let c2 = c.clone() * c;
    let len = ball.length();
    let beta = k.beta.clone();
    let four = S::from_ratio(4, 1);
    // L(K)L(∂K) ≥ L(K)L₀ ≥ L₀², so the hypothesis bounds L(K) and the angle.
    let needed = (c2.clone() / (len.clone() * k.l0.clone())).as_f64() * (1.0 + 1e-9);
    let truncated = needed > spectrum.lmax;
    if truncated && mode == Mode::Strict {
        return Err(BlockingError::IncompleteSpectrum { round, level, needed, lmax: spectrum.lmax });
    }
    let half = (ball.radius.clone() + beta.clone() * c2.clone() / (four.clone() * k.l0.clone() * k.l0.clone())).as_f64();
    let seeds = seeds_in(spectrum, ball.c0().as_f64(), half, 0.0, needed.min(spectrum.lmax));
    let found = shrinkable_from_seeds(spectrum, &k.eps_level(level), level, &seeds, k.bits, DEFAULT_COMPLEX_CAP)?;
    let mut checked = 0;
    let mut violation = None;
    for cx in &found {
        let Some(p) = cx.length_product::<S>() else { continue };
        if !(len.clone() * p.clone() < c2) {
            continue;
        }
        checked += 1;
        let theta: S = cx.theta_k_exact(k.bits);
        let d = interval_distance(&theta, ball, &k.period);
        let bound = beta.clone() * c2.clone() / (four.clone() * p);
        if d <= bound && violation.is_none() {
            violation = Some(Violation {
                round,
                level,
                edges: cx.edges.iter().map(|e| (e.raw, e.square)).collect(),
                witness: cx.longest().conn.clone(),
                theta,
                distance: d,
                bound,
            });
        }
    }

    let danger = dangerous_complexes(k, spectrum, level, ball)?;
    let omega = danger.omega.len();
    let separated = (0..omega).all(|a| (a + 1..omega).all(|b| topologically_equivalent(&danger.omega[a].0, &danger.omega[b].0)));
    let space = k.space();
    let diameter_ok = if omega == 0 {
        true
    } else {
        let offs: Vec<S> = danger.omega.iter().map(|(_, t)| space.offset(ball.c0(), t)).collect();
        let lo = offs.iter().fold(offs[0].clone(), |m, x| S::min_of(&m, x));
        let hi = offs.iter().fold(offs[0].clone(), |m, x| S::max_of(&m, x));
        hi - lo < beta * len.half()
    };
    Ok(LevelReport {
        level,
        checked,
        violation,
        omega,
        separated,
        diameter_ok,
        truncated: truncated || danger.truncated,
        needed,
    })
}

/// Checks, for every Bob interval and level, that each `βc_i`-shrinkable
/// level-`i` complex with `L(K)L(∂K)|I_j| < c_i²` has
/// `d(θ(K), I_j) > βc_i²/(4L(K)L(∂K))`.
pub fn verify_pj<S: Real>(
    transcript: &Transcript<S>,
    spectrum: &DirectionSpectrum,
    k: &StrategyConstants<S>,
    mode: Mode,
) -> Result<Certificate<S>, BlockingError> {
    let balls: Vec<Ball<S>> = transcript.bob_balls().into_iter().cloned().collect();
    if balls.is_empty() {
        return Err(BlockingError::EmptyTranscript);
    }
    let rounds: Vec<RoundReport<S>> = balls
        .par_iter()
        .enumerate()
        .map(|(j, ball)| {
            let levels = (1..=k.m)
                .map(|i| check_level(k, spectrum, j + 1, i, ball, mode))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(RoundReport { round: j + 1, interval: ball.clone(), levels })
        })
        .collect::<Result<_, BlockingError>>()?;
    let threshold = k.j0_threshold();
    let j0 = balls.iter().position(|b| b.length() < threshold).map(|j| j + 1);
    let violation = rounds.iter().flat_map(|r| &r.levels).find_map(|l| l.violation.clone());
    let truncated_from = rounds.iter().find(|r| r.levels.iter().any(|l| l.truncated)).map(|r| r.round);
    let failures = |f: fn(&LevelReport<S>) -> bool| -> Vec<(usize, usize)> {
        rounds
            .iter()
            .flat_map(|r| r.levels.iter().filter(|l| !f(l)).map(move |l| (r.round, l.level)))
            .collect()
    };
    let separation_failures = failures(|l| l.separated);
    let diameter_failures = failures(|l| l.diameter_ok);
    Ok(Certificate {
        pass: violation.is_none(),
        rounds,
        violation,
        truncated_from,
        j0,
        separation_failures,
        diameter_failures,
        final_check: None,
    })
}

/// `min |γ|²d(θ_γ, ψ)` over the spectrum against `βc₁²/4`.
pub fn final_certificate<S: Real>(
    psi: &S,
    spectrum: &DirectionSpectrum,
    k: &StrategyConstants<S>,
) -> Result<FinalCertificate, BlockingError> {
    let psi = to_rational(psi);
    let b = spectrum.badness_exact(&psi, k.bits)?;
    let threshold = to_rational(&k.final_threshold());
    Ok(FinalCertificate {
        pass: b.value > threshold,
        psi,
        value: b.value,
        witness: b.witness,
        threshold,
    })
}

fn num<S: Scalar>(x: &S) -> String {
    format!("{:e}", x.as_f64())
}

/// Per-round table followed by the verdict.
pub fn write_certificate<S: Real>(c: &Certificate<S>) -> String {
    let tag = if S::EXACT { "exact" } else { "approx" };
    let mut out = String::new();
    let _ = writeln!(out, "# round level |I| checked omega separated diameter truncated");
    for r in &c.rounds {
        for l in &r.levels {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {} {} {} {}",
                r.round,
                l.level,
                num(&r.interval.length()),
                l.checked,
                l.omega,
                l.separated,
                l.diameter_ok,
                l.truncated,
                if l.violation.is_some() { "FAIL" } else { "ok" }
            );
        }
    }
    match c.j0 {
        Some(j) => {
            let _ = writeln!(out, "j0 {j}");
        }
        None => {
            let _ = writeln!(out, "j0 none");
        }
    }
    if let Some(t) = c.truncated_from {
        let _ = writeln!(out, "truncated_from {t}");
    }
    if let Some(v) = &c.violation {
        let _ = writeln!(
            out,
            "violation round {} level {} witness ({}, {}) distance {} {tag} bound {} {tag}",
            v.round,
            v.level,
            v.witness.hol[0],
            v.witness.hol[1],
            num(&v.distance),
            num(&v.bound)
        );
    }
    if let Some(f) = &c.final_check {
        let _ = writeln!(
            out,
            "final psi {} value {} exact threshold {} exact witness ({}, {}) {}",
            num(&f.psi),
            num(&f.value),
            num(&f.threshold),
            f.witness.hol[0],
            f.witness.hol[1],
            if f.pass { "pass" } else { "fail" }
        );
    }
    let _ = writeln!(out, "pj {}", if c.pass { "pass" } else { "fail" });
    out
}
