//! Reference strategies used by tests, the CLI and as building blocks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    validate_move, Ball, Context, GameConfig, MoveRecord, Mover, Payload, Space, Strategy,
    StrategyError, Variant,
};
use crate::scalar::Scalar;

const UNIT_BITS: u32 = 24;

/// Uniform sample from the open interval (0,1) on a dyadic grid.
fn unit_open<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    let k: i64 = rng.gen_range(1..(1i64 << UNIT_BITS));
    S::from_ratio(k, 1i64 << UNIT_BITS)
}

/// A maximal piece of `[-r, r]` (offsets from Bob's center) avoiding the blocks.
/// `open_lo`/`open_hi` mark ends that touch a block.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap<S> {
    pub lo: S,
    pub hi: S,
    pub open_lo: bool,
    pub open_hi: bool,
}

impl<S: Scalar> Gap<S> {
    pub fn len(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    /// Closed range of centers for a ball of radius `rho` legal in this gap,
    /// shrunk by `margin` at open ends. `None` if it does not fit.
    fn centers(&self, rho: &S, margin: &S) -> Option<(S, S)> {
        let mut lo = self.lo.clone() + rho.clone();
        let mut hi = self.hi.clone() - rho.clone();
        if self.open_lo {
            lo = lo + margin.clone();
        }
        if self.open_hi {
            hi = hi - margin.clone();
        }
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Does a ball of radius `rho` fit with strict disjointness at open ends?
    fn fits(&self, rho: &S) -> bool {
        let need = rho.clone() + rho.clone();
        let len = self.len();
        if self.open_lo || self.open_hi {
            len > need
        } else {
            len >= need
        }
    }

    fn margin_for(&self, rho: &S) -> S {
        let slack = self.len() - rho.clone() - rho.clone();
        let cap = rho.clone() / S::from_ratio(1024, 1);
        S::min_of(&(slack / S::from_ratio(4, 1)), &cap)
    }
}

/// Pieces of Bob's interval not covered by any block, left to right.
pub fn free_gaps<S: Scalar>(space: &Space<S>, bob: &Ball<S>, blocks: &[Ball<S>]) -> Vec<Gap<S>> {
    let r = bob.radius.clone();
    let c = bob.c0();
    let mut covered: Vec<(S, S)> = Vec::new();
    for b in blocks {
        let d = space.offset(c, b.c0());
        let mut shifts = vec![S::zero()];
        if let Space::Circle { period } = space {
            shifts.push(period.clone());
            shifts.push(-period.clone());
        }
        for s in shifts {
            let lo = d.clone() + s.clone() - b.radius.clone();
            let hi = d.clone() + s + b.radius.clone();
            if hi >= -r.clone() && lo <= r {
                covered.push((lo, hi));
            }
        }
    }
    covered.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("ordered"));
    let mut gaps = Vec::new();
    let mut cur = -r.clone();
    let mut cur_open = false;
    for (lo, hi) in covered {
        if lo > cur {
            gaps.push(Gap {
                lo: cur.clone(),
                hi: S::min_of(&lo, &r),
                open_lo: cur_open,
                open_hi: lo <= r,
            });
        }
        if hi >= cur {
            cur = hi;
            cur_open = true;
        }
        if cur > r {
            break;
        }
    }
    if cur < r {
        gaps.push(Gap {
            lo: cur,
            hi: r,
            open_lo: cur_open,
            open_hi: false,
        });
    }
    gaps.retain(|g| !g.is_empty());
    gaps
}

fn shifted<S: Scalar>(space: &Space<S>, bob: &Ball<S>, offset: S, radius: S) -> Ball<S> {
    let c = space.normalize(bob.c0().clone() + offset);
    let mut center = bob.center.clone();
    center[0] = c;
    Ball::new(center, radius)
}

/// Legal ball of radius `rho` inside Bob's last ball avoiding `blocks`,
/// with center as close as possible to the offset `target`.
pub fn approach<S: Scalar>(
    space: &Space<S>,
    bob: &Ball<S>,
    blocks: &[Ball<S>],
    rho: &S,
    target: &S,
) -> Option<Ball<S>> {
    let mut best: Option<(S, S)> = None;
    for g in free_gaps(space, bob, blocks) {
        if !g.fits(rho) {
            continue;
        }
        let margin = g.margin_for(rho);
        let Some((lo, hi)) = g.centers(rho, &margin) else {
            continue;
        };
        let pick = if *target < lo {
            lo
        } else if *target > hi {
            hi
        } else {
            target.clone()
        };
        let dist = (pick.clone() - target.clone()).abs();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, pick));
        }
    }
    best.map(|(_, off)| shifted(space, bob, off, rho.clone()))
}

/// A legal Bob reply built from the largest free gap (or concentrically in
/// the ball games). `None` only if no legal reply exists.
pub fn fallback_response<S: Scalar>(
    config: &GameConfig<S>,
    history: &[MoveRecord<S>],
) -> Option<Ball<S>> {
    let last = history.last()?;
    if last.mover != Mover::Alice {
        return None;
    }
    match &last.payload {
        Payload::Ball(a) => Some(Ball::new(a.center.clone(), config.beta.clone() * a.radius.clone())),
        Payload::Blocks(blocks) => {
            let bob = super::last_bob_ball(history)?;
            let rho = config.beta.clone() * bob.radius.clone();
            let gaps = free_gaps(&config.space, bob, blocks);
            let g = gaps
                .into_iter()
                .filter(|g| g.fits(&rho))
                .max_by(|a, b| a.len().partial_cmp(&b.len()).expect("ordered"))?;
            let mid = (g.lo.clone() + g.hi.clone()).half();
            Some(shifted(&config.space, bob, mid, rho))
        }
        Payload::Resign => None,
    }
}

/// Alice in the ball games: concentric ball of radius `α·r`.
pub struct ConcentricAlice;

impl<S: Scalar> Strategy<S> for ConcentricAlice {
    fn next_move(&mut self, ctx: &Context<'_, S>, _rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let b = ctx.last_bob().ok_or_else(|| StrategyError::Other("no Bob ball".into()))?;
        Ok(Payload::Ball(Ball::new(
            b.center.clone(),
            ctx.config.alpha.clone() * b.radius.clone(),
        )))
    }
}

/// Alice who never blocks anything.
pub struct NullBlocker;

impl<S: Scalar> Strategy<S> for NullBlocker {
    fn next_move(&mut self, _ctx: &Context<'_, S>, _rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        Ok(Payload::Blocks(Vec::new()))
    }
}

/// Blocks the leftmost `M` subintervals of length `β|B|`.
pub struct LeftmostBlocker;

impl<S: Scalar> Strategy<S> for LeftmostBlocker {
    fn next_move(&mut self, ctx: &Context<'_, S>, _rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let b = ctx.last_bob().ok_or_else(|| StrategyError::Other("no Bob ball".into()))?;
        let rho = ctx.config.beta.clone() * b.radius.clone();
        let blocks = (0..ctx.config.max_blocks())
            .map(|k| {
                let off = -b.radius.clone() + S::from_ratio(2 * k as i64 + 1, 1) * rho.clone();
                shifted(&ctx.config.space, b, off, rho.clone())
            })
            .collect();
        Ok(Payload::Blocks(blocks))
    }
}

/// Blocks the center of Bob's ball with every allowed block.
pub struct CenterBlocker;

impl<S: Scalar> Strategy<S> for CenterBlocker {
    fn next_move(&mut self, ctx: &Context<'_, S>, _rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let b = ctx.last_bob().ok_or_else(|| StrategyError::Other("no Bob ball".into()))?;
        let rho = ctx.config.beta.clone() * b.radius.clone();
        let one = Ball::new(b.center.clone(), rho);
        Ok(Payload::Blocks(vec![one; ctx.config.max_blocks()]))
    }
}

/// Blocks `M` random subintervals of random admissible length.
pub struct RandomBlocker;

impl<S: Scalar> Strategy<S> for RandomBlocker {
    fn next_move(&mut self, ctx: &Context<'_, S>, rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let b = ctx.last_bob().ok_or_else(|| StrategyError::Other("no Bob ball".into()))?;
        let cap = ctx.config.beta.clone() * b.radius.clone();
        let blocks = (0..ctx.config.max_blocks())
            .map(|_| {
                let rho = cap.clone() * unit_open::<S>(rng);
                let u: S = unit_open(rng);
                let off = b.radius.clone() * (u.clone() + u - S::one());
                shifted(&ctx.config.space, b, off, rho)
            })
            .collect();
        Ok(Payload::Blocks(blocks))
    }
}

/// Bob who opens with a fixed ball and then plays the largest legal ball
/// in the ball games' concentric position or in the widest free gap.
pub struct GreedyBob<S> {
    opening: Ball<S>,
}

impl<S: Scalar> GreedyBob<S> {
    pub fn new(opening: Ball<S>) -> Self {
        GreedyBob { opening }
    }
}

impl<S: Scalar> Strategy<S> for GreedyBob<S> {
    fn next_move(&mut self, ctx: &Context<'_, S>, _rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let Some(last) = ctx.last_alice() else {
            return Ok(Payload::Ball(self.opening.clone()));
        };
        match last {
            Payload::Ball(a) => Ok(Payload::Ball(Ball::new(
                a.center.clone(),
                ctx.config.beta.clone() * a.radius.clone(),
            ))),
            Payload::Blocks(blocks) => {
                let b = ctx.last_bob().expect("Bob opened");
                let min = ctx.config.beta.clone() * b.radius.clone();
                let gaps = free_gaps(&ctx.config.space, b, blocks);
                let Some(g) = gaps
                    .into_iter()
                    .filter(|g| g.fits(&min))
                    .max_by(|x, y| x.len().partial_cmp(&y.len()).expect("ordered"))
                else {
                    return Ok(Payload::Resign);
                };
                let wide = g.len() * S::from_ratio(7, 16);
                let rho = S::max_of(&min, &wide);
                let mid = (g.lo.clone() + g.hi.clone()).half();
                Ok(Payload::Ball(shifted(&ctx.config.space, b, mid, rho)))
            }
            Payload::Resign => Ok(Payload::Resign),
        }
    }
}

/// Bob who plays uniformly random legal balls of radius in `[β r, 3/2·β r]`.
pub struct RandomBob<S> {
    opening: Ball<S>,
}

impl<S: Scalar> RandomBob<S> {
    pub fn new(opening: Ball<S>) -> Self {
        RandomBob { opening }
    }
}

impl<S: Scalar> Strategy<S> for RandomBob<S> {
    fn next_move(&mut self, ctx: &Context<'_, S>, rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let Some(last) = ctx.last_alice() else {
            return Ok(Payload::Ball(self.opening.clone()));
        };
        let stretch = S::one() + unit_open::<S>(rng).half();
        match last {
            Payload::Ball(a) => {
                let rho = S::min_of(
                    &(ctx.config.beta.clone() * a.radius.clone() * stretch),
                    &a.radius,
                );
                let slack = a.radius.clone() - rho.clone();
                let center = a
                    .center
                    .iter()
                    .map(|x| {
                        let u: S = unit_open(rng);
                        ctx.config
                            .space
                            .normalize(x.clone() + slack.clone() * (u.clone() + u - S::one()))
                    })
                    .collect();
                Ok(Payload::Ball(Ball::new(center, rho)))
            }
            Payload::Blocks(blocks) => {
                let b = ctx.last_bob().expect("Bob opened");
                let min = ctx.config.beta.clone() * b.radius.clone();
                let gaps = free_gaps(&ctx.config.space, b, blocks);
                let mut fitting: Vec<_> = gaps.into_iter().filter(|g| g.fits(&min)).collect();
                if fitting.is_empty() {
                    return Ok(Payload::Resign);
                }
                let g = fitting.swap_remove(rng.gen_range(0..fitting.len()));
                let mut rho = min.clone() * stretch;
                if !g.fits(&rho) {
                    rho = min;
                }
                let margin = g.margin_for(&rho);
                let (lo, hi) = g.centers(&rho, &margin).expect("gap fits");
                let u: S = unit_open(rng);
                let off = lo.clone() + (hi - lo) * u;
                Ok(Payload::Ball(shifted(&ctx.config.space, b, off, rho)))
            }
            Payload::Resign => Ok(Payload::Resign),
        }
    }
}

/// Bob who replays a fixed list of balls, then falls back to the engine's
/// legal reply (or resigns when `resign_when_done`).
pub struct ScriptedBob<S> {
    script: Vec<Ball<S>>,
    next: usize,
    pub resign_when_done: bool,
}

impl<S: Scalar> ScriptedBob<S> {
    pub fn new(script: Vec<Ball<S>>) -> Self {
        ScriptedBob {
            script,
            next: 0,
            resign_when_done: false,
        }
    }
}

impl<S: Scalar> Strategy<S> for ScriptedBob<S> {
    fn next_move(&mut self, ctx: &Context<'_, S>, _rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        if let Some(b) = self.script.get(self.next) {
            self.next += 1;
            return Ok(Payload::Ball(b.clone()));
        }
        if self.resign_when_done {
            return Ok(Payload::Resign);
        }
        Ok(fallback_response(ctx.config, ctx.history).map_or(Payload::Resign, Payload::Ball))
    }
}

/// Bob who always steers toward a fixed point with the smallest legal ball.
pub struct TargetBob<S> {
    opening: Ball<S>,
    target: S,
}

impl<S: Scalar> TargetBob<S> {
    pub fn new(opening: Ball<S>, target: S) -> Self {
        TargetBob { opening, target }
    }
}

impl<S: Scalar> Strategy<S> for TargetBob<S> {
    fn next_move(&mut self, ctx: &Context<'_, S>, _rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let Some(last) = ctx.last_alice() else {
            return Ok(Payload::Ball(self.opening.clone()));
        };
        let b = ctx.last_bob().expect("Bob opened");
        let Payload::Blocks(blocks) = last else {
            return Ok(fallback_response(ctx.config, ctx.history).map_or(Payload::Resign, Payload::Ball));
        };
        let rho = ctx.config.beta.clone() * b.radius.clone();
        let off = ctx.config.space.offset(b.c0(), &self.target);
        Ok(approach(&ctx.config.space, b, blocks, &rho, &off).map_or(Payload::Resign, Payload::Ball))
    }
}

/// Plays the strong game using an absolute-game Alice on the first
/// coordinate: each Bob ball is fed to `inner` as an absolute-game move and
/// Alice answers with a ball of radius `α·r` avoiding the returned blocks.
pub struct StrongFromAbsolute<S, A> {
    inner: A,
    inner_config: GameConfig<S>,
    inner_history: Vec<MoveRecord<S>>,
}

impl<S: Scalar, A: Strategy<S>> StrongFromAbsolute<S, A> {
    /// `inner_config` is the absolute (or modified absolute) game `inner` was
    /// built for; its `beta` should not exceed `α·β` of the strong game.
    pub fn new(inner: A, inner_config: GameConfig<S>) -> Self {
        StrongFromAbsolute {
            inner,
            inner_config,
            inner_history: Vec::new(),
        }
    }

    pub fn inner_transcript(&self) -> super::Transcript<S> {
        let mut t = super::Transcript::new(self.inner_config.clone());
        for r in &self.inner_history {
            t.push(r.clone());
        }
        t
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }
}

impl<S: Scalar, A: Strategy<S>> Strategy<S> for StrongFromAbsolute<S, A> {
    fn next_move(&mut self, ctx: &Context<'_, S>, rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let b = ctx
            .last_bob()
            .ok_or_else(|| StrategyError::Other("no Bob ball".into()))?
            .clone();
        let round = self.inner_history.len() / 2 + 1;
        let proj = Ball::interval(self.inner_config.space.normalize(b.c0().clone()), b.radius.clone());
        let bob_rec = MoveRecord {
            round,
            mover: Mover::Bob,
            payload: Payload::Ball(proj.clone()),
        };
        validate_move(&self.inner_config, &self.inner_history, &bob_rec)
            .map_err(|e| StrategyError::Other(format!("projected Bob ball is not an absolute-game move: {e}")))?;
        self.inner_history.push(bob_rec);
        let inner_ctx = Context {
            config: &self.inner_config,
            history: &self.inner_history,
            round,
        };
        let payload = self.inner.next_move(&inner_ctx, rng)?;
        let alice_rec = MoveRecord {
            round,
            mover: Mover::Alice,
            payload,
        };
        validate_move(&self.inner_config, &self.inner_history, &alice_rec).map_err(StrategyError::Inner)?;
        let blocks = match &alice_rec.payload {
            Payload::Blocks(v) => v.clone(),
            _ => Vec::new(),
        };
        self.inner_history.push(alice_rec);

        let rho = ctx.config.alpha.clone() * b.radius.clone();
        let ball = approach(&self.inner_config.space, &proj, &blocks, &rho, &S::zero())
            .ok_or_else(|| StrategyError::Other("no room for Alice's ball beside the blocks".into()))?;
        let off = self.inner_config.space.offset(proj.c0(), ball.c0());
        let mut center = b.center.clone();
        center[0] = center[0].clone() + off;
        debug_assert!(ctx.config.variant == Variant::Strong || ctx.config.variant == Variant::Classic);
        Ok(Payload::Ball(Ball::new(center, rho)))
    }
}
