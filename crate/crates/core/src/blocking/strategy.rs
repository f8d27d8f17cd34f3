use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{BlockingError, StrategyConstants};
use crate::complexes::{lattice_theta, shrinkable_from_seeds, Complex, DEFAULT_COMPLEX_CAP};
use crate::game::{approach, Ball, Context, Payload, Space, Strategy, StrategyError};
use crate::scalar::{circle_distance, Real};
use crate::surface::{angle_distance, lattice_order, DirectionSpectrum, SaddleConnection};

/// Distance from `theta` to the closed interval `ball` on the circle.
pub(crate) fn interval_distance<S: Real>(theta: &S, ball: &Ball<S>, period: &S) -> S {
    let d = circle_distance(theta, ball.c0(), period) - ball.radius.clone();
    S::max_of(&d, &S::zero())
}

pub(crate) fn seeds_in(spectrum: &DirectionSpectrum, center: f64, half: f64, lo: f64, hi: f64) -> Vec<SaddleConnection> {
    if hi < lo {
        return Vec::new();
    }
    spectrum
        .window(center, half, lo, hi)
        .into_iter()
        .filter_map(|e| e.lattice)
        .flat_map(|[h, v]| spectrum.lattice_connections(h, v))
        .collect()
}

/// `Ω_i(j)` with the angles `θ(K)`.
#[derive(Clone, Debug)]
pub struct Danger<S> {
    pub omega: Vec<(Complex, S)>,
    /// Some complexes in the length range lie beyond the spectrum.
    pub truncated: bool,
}

/// The level-`level` complexes that are dangerous for the interval `ball`:
/// `βc_i`-shrinkable, not yet far from the interval, with
/// `c_i²/(L(K)L(∂K)) ≤ |I| < β⁻¹c_i²/(L(K)L(∂K))`.
pub fn dangerous_complexes<S: Real>(
    k: &StrategyConstants<S>,
    spectrum: &DirectionSpectrum,
    level: usize,
    ball: &Ball<S>,
) -> Result<Danger<S>, BlockingError> {
    let c = k.c_i(level).clone();
    let c2 = c.clone() * c;
    let len = ball.length();
    let beta = k.beta.clone();
    // L(K) ≥ c/√|I| and L(K)·L₀ ≤ L(K)L(∂K) < c²/(β|I|).
    let lo = (c2.clone() / len.clone()).as_f64().sqrt() * (1.0 - 1e-9);
    let hi = (c2.clone() / (beta.clone() * len.clone() * k.l0.clone())).as_f64() * (1.0 + 1e-9);
    let truncated = hi > spectrum.lmax;
    let half = (ball.radius.clone() + beta.clone() * len.clone() / S::from_ratio(4, 1)).as_f64();
    let seeds = seeds_in(spectrum, ball.c0().as_f64(), half, lo, hi.min(spectrum.lmax));
    let found = shrinkable_from_seeds(spectrum, &k.eps_level(level), level, &seeds, k.bits, DEFAULT_COMPLEX_CAP)?;
    let mut omega = Vec::new();
    for cx in found {
        let Some(p) = cx.length_product::<S>() else { continue };
        let lp = len.clone() * p.clone();
        if !(c2 <= lp && beta.clone() * lp < c2) {
            continue;
        }
        let theta: S = cx.theta_k_exact(k.bits);
        let d = interval_distance(&theta, ball, &k.period);
        if d > beta.clone() * c2.clone() / (S::from_ratio(4, 1) * p) {
            continue;
        }
        omega.push((cx, theta));
    }
    Ok(Danger { omega, truncated })
}

#[derive(Clone, Debug)]
pub struct LevelState<S> {
    pub level: usize,
    pub omega: Vec<Complex>,
    pub thetas: Vec<S>,
    /// `z_i(j)`.
    pub center: S,
    pub truncated: bool,
}

#[derive(Clone, Debug)]
pub struct RoundState<S> {
    pub round: usize,
    pub interval: Ball<S>,
    pub levels: Vec<LevelState<S>>,
    pub blocks: Vec<Ball<S>>,
}

/// Midpoint of the smallest arc near `center` holding every angle.
fn arc_midpoint<S: Real>(space: &Space<S>, center: &S, thetas: &[S]) -> S {
    if thetas.is_empty() {
        return center.clone();
    }
    let offs: Vec<S> = thetas.iter().map(|t| space.offset(center, t)).collect();
    let lo = offs.iter().fold(offs[0].clone(), |m, x| S::min_of(&m, x));
    let hi = offs.iter().fold(offs[0].clone(), |m, x| S::max_of(&m, x));
    space.normalize(center.clone() + (lo + hi).half())
}

/// One block of length `β|I_j|` per level, centred at `z_i(j)`.
pub fn alice_move<S: Real>(
    k: &StrategyConstants<S>,
    spectrum: &DirectionSpectrum,
    ball: &Ball<S>,
    round: usize,
) -> Result<RoundState<S>, BlockingError> {
    let space = k.space();
    let levels: Vec<LevelState<S>> = (1..=k.m)
        .into_par_iter()
        .map(|i| {
            let d = dangerous_complexes(k, spectrum, i, ball)?;
            let thetas: Vec<S> = d.omega.iter().map(|(_, t)| t.clone()).collect();
            let center = arc_midpoint(&space, ball.c0(), &thetas);
            Ok(LevelState {
                level: i,
                omega: d.omega.into_iter().map(|(c, _)| c).collect(),
                thetas,
                center,
                truncated: d.truncated,
            })
        })
        .collect::<Result<_, BlockingError>>()?;
    let radius = k.beta.clone() * ball.radius.clone();
    let blocks = levels.iter().map(|l| Ball::interval(l.center.clone(), radius.clone())).collect();
    Ok(RoundState { round, interval: ball.clone(), levels, blocks })
}

/// Alice of the modified absolute game on the circle of directions.
pub struct BlockingAlice<S> {
    pub constants: StrategyConstants<S>,
    pub spectrum: Arc<DirectionSpectrum>,
    pub states: Vec<RoundState<S>>,
}

impl<S: Real> BlockingAlice<S> {
    pub fn new(constants: StrategyConstants<S>, spectrum: Arc<DirectionSpectrum>) -> Self {
        BlockingAlice { constants, spectrum, states: Vec::new() }
    }
}

impl<S: Real> Strategy<S> for BlockingAlice<S> {
    fn next_move(&mut self, ctx: &Context<'_, S>, _rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let bob = ctx.last_bob().ok_or_else(|| StrategyError::Other("no Bob ball".into()))?;
        let state = alice_move(&self.constants, &self.spectrum, bob, ctx.round)
            .map_err(|e| StrategyError::Other(e.to_string()))?;
        let blocks = state.blocks.clone();
        self.states.push(state);
        Ok(Payload::Blocks(blocks))
    }
}

/// Bob's opening: radius `π̃/8`, centre drawn from `seed`.
pub fn opening_interval<S: Real>(seed: u64, period: &S) -> Ball<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(7);
    let k: u32 = rng.gen();
    let center = period.clone() * S::from_u64(k as u64).expect("u32") / S::from_u64(1 << 32).expect("2^32");
    Ball::interval(center, period.clone() / S::from_ratio(8, 1))
}

/// Bob heading for the spectrum direction inside his interval that minimizes
/// `|γ|²·d(θ_γ, centre)`, playing the smallest legal radius.
pub struct NearestDangerBob<S> {
    pub spectrum: Arc<DirectionSpectrum>,
    pub opening: Ball<S>,
    pub bits: u32,
}

impl<S: Real> NearestDangerBob<S> {
    pub fn new(spectrum: Arc<DirectionSpectrum>, opening: Ball<S>, bits: u32) -> Self {
        NearestDangerBob { spectrum, opening, bits }
    }

    fn target(&self, ball: &Ball<S>, period: &S) -> Option<S> {
        let c = ball.c0();
        let cf = c.as_f64();
        // Rank in f64 first; only near-ties are settled exactly.
        let mut rough: Vec<(f64, [i64; 2])> = self
            .spectrum
            .window(cf, ball.radius.as_f64(), 0.0, self.spectrum.lmax)
            .into_iter()
            .filter_map(|e| {
                let raw = e.lattice?;
                let l = raw[0].abs().max(raw[1].abs()) as f64;
                Some((l * l * angle_distance(e.theta, cf), raw))
            })
            .collect();
        let least = rough.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        rough.retain(|r| r.0 <= least * (1.0 + 1e-6) + 1e-12);
        let mut best: Option<(S, [i64; 2], S)> = None;
        for (_, raw) in rough {
            let theta: S = lattice_theta(raw, self.bits);
            let d = circle_distance(&theta, c, period);
            if d > ball.radius {
                continue;
            }
            let l = raw[0].abs().max(raw[1].abs());
            let score = d * S::from_i64(l * l).expect("length");
            let better = match &best {
                None => true,
                Some((s, r, _)) => score < *s || (score == *s && lattice_order((raw[0], raw[1]), (r[0], r[1])).is_lt()),
            };
            if better {
                best = Some((score, raw, theta));
            }
        }
        best.map(|b| b.2)
    }
}

impl<S: Real> Strategy<S> for NearestDangerBob<S> {
    fn next_move(&mut self, ctx: &Context<'_, S>, _rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let Some(last) = ctx.last_alice() else {
            return Ok(Payload::Ball(self.opening.clone()));
        };
        let b = ctx.last_bob().expect("Bob opened");
        let Payload::Blocks(blocks) = last else {
            return Err(StrategyError::Other("expected blocks".into()));
        };
        let Space::Circle { period } = &ctx.config.space else {
            return Err(StrategyError::Other("nearest-danger Bob plays on the circle".into()));
        };
        let off = match self.target(b, period) {
            Some(t) => ctx.config.space.offset(b.c0(), &t),
            None => S::zero(),
        };
        let rho = ctx.config.beta.clone() * b.radius.clone();
        Ok(approach(&ctx.config.space, b, blocks, &rho, &off).map_or(Payload::Resign, Payload::Ball))
    }
}
