//! Playing the absolute game with a strategy for the game in which Alice
//! blocks `M` balls at once.

use rand_chacha::ChaCha8Rng;

use super::{
    validate_move, Ball, Context, GameConfig, MoveRecord, Mover, Payload, Space, Strategy,
    StrategyError, Transcript,
};
use crate::scalar::Scalar;

/// Absolute-game Alice driven by a modified-game Alice.
///
/// Bob's balls `I_1, I_{1+M}, I_{1+2M}, …` are forwarded to the inner
/// strategy, which answers with `J_1, …, J_M`. Over the next `M` rounds the
/// outer strategy blocks `J_1`, then `J_2 ∩ I_{j+1}`, …, `J_M ∩ I_{j+M-1}`.
pub struct ReducedAbsolute<S, A> {
    inner: A,
    m: usize,
    beta: S,
    aux_config: Option<GameConfig<S>>,
    aux_history: Vec<MoveRecord<S>>,
    pending: Vec<Ball<S>>,
    /// `(round, block index k, J_k, emitted block)` for every emitted block.
    pub log: BlockLog<S>,
}

/// `(round, k, J_k, emitted block)` entries.
pub type BlockLog<S> = Vec<(usize, usize, Ball<S>, Option<Ball<S>>)>;

/// Wraps `alice_mod`, a strategy for the modified game with `M` blocks of
/// relative size `β^M`, into a strategy for the absolute game with `β`.
pub fn reduce_modified_to_absolute<S: Scalar, A: Strategy<S>>(alice_mod: A, m: usize, beta: S) -> ReducedAbsolute<S, A> {
    assert!(m >= 1, "block count must be positive");
    ReducedAbsolute {
        inner: alice_mod,
        m,
        beta,
        aux_config: None,
        aux_history: Vec::new(),
        pending: Vec::new(),
        log: Vec::new(),
    }
}

impl<S: Scalar, A> ReducedAbsolute<S, A> {
    pub fn block_count(&self) -> usize {
        self.m
    }

    /// The modified game seen by the inner strategy.
    pub fn aux_transcript(&self) -> Option<Transcript<S>> {
        let cfg = self.aux_config.clone()?;
        let mut t = Transcript::new(cfg);
        for r in &self.aux_history {
            t.push(r.clone());
        }
        Some(t)
    }

    fn modified_config(&self, space: &Space<S>) -> Result<GameConfig<S>, StrategyError> {
        let mut b = S::one();
        for _ in 0..self.m {
            b = b * self.beta.clone();
        }
        GameConfig::modified_absolute(self.m, b, space.clone()).map_err(|e| StrategyError::Other(e.to_string()))
    }
}

/// Intersection of two intervals as a ball, or a point if they only touch.
fn intersect<S: Scalar>(space: &Space<S>, j: &Ball<S>, i: &Ball<S>) -> Option<(Ball<S>, bool)> {
    let d = space.offset(i.c0(), j.c0());
    let lo = S::max_of(&(d.clone() - j.radius.clone()), &(-i.radius.clone()));
    let hi = S::min_of(&(d + j.radius.clone()), &i.radius);
    if lo > hi {
        return None;
    }
    let mid = (lo.clone() + hi.clone()).half();
    let center = space.normalize(i.c0().clone() + mid);
    let radius = (hi - lo).half();
    Some((Ball::interval(center, radius.clone()), radius.is_zero()))
}

impl<S: Scalar, A: Strategy<S>> Strategy<S> for ReducedAbsolute<S, A> {
    fn next_move(&mut self, ctx: &Context<'_, S>, rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let bob = ctx
            .last_bob()
            .ok_or_else(|| StrategyError::Other("no Bob ball".into()))?
            .clone();
        let j = ctx.round;
        let k = (j - 1) % self.m;
        if k == 0 {
            if self.aux_config.is_none() {
                self.aux_config = Some(self.modified_config(&ctx.config.space)?);
            }
            let cfg = self.aux_config.clone().expect("set above");
            let round = self.aux_history.len() / 2 + 1;
            let bob_rec = MoveRecord {
                round,
                mover: Mover::Bob,
                payload: Payload::Ball(bob.clone()),
            };
            validate_move(&cfg, &self.aux_history, &bob_rec).map_err(|e| {
                StrategyError::Other(format!("Bob's subsequence is not a modified-game move: {e}"))
            })?;
            self.aux_history.push(bob_rec);
            let inner_ctx = Context {
                config: &cfg,
                history: &self.aux_history,
                round,
            };
            let payload = self.inner.next_move(&inner_ctx, rng)?;
            let rec = MoveRecord {
                round,
                mover: Mover::Alice,
                payload,
            };
            validate_move(&cfg, &self.aux_history, &rec).map_err(StrategyError::Inner)?;
            self.pending = match &rec.payload {
                Payload::Blocks(v) => v.clone(),
                _ => Vec::new(),
            };
            self.aux_history.push(rec);
        }
        let Some(jk) = self.pending.get(k).cloned() else {
            return Ok(Payload::Blocks(Vec::new()));
        };
        let emitted = if k == 0 {
            Some(jk.clone())
        } else {
            intersect(&ctx.config.space, &jk, &bob).map(|(u, point)| {
                if point {
                    let cap = S::min_of(&jk.radius, &(self.beta.clone() * bob.radius.clone()));
                    Ball::interval(u.c0().clone(), cap.half())
                } else {
                    u
                }
            })
        };
        self.log.push((j, k + 1, jk, emitted.clone()));
        Ok(Payload::Blocks(emitted.into_iter().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{play, CenterBlocker, RandomBlocker, RandomBob};
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn single_block_passes_through() {
        let cfg = GameConfig::absolute(q(1, 10), Space::Line).unwrap();
        let mut alice = reduce_modified_to_absolute(CenterBlocker, 1, q(1, 10));
        let mut bob = RandomBob::new(Ball::interval(q(0, 1), q(1, 1)));
        let t = play(&cfg, &mut alice, &mut bob, 10, 1).unwrap();
        t.replay().unwrap();
        let balls = t.bob_balls();
        for (k, blocks) in t.alice_moves().iter().enumerate() {
            assert_eq!(blocks, &vec![Ball::new(balls[k].center.clone(), q(1, 10) * balls[k].radius.clone())]);
        }
    }

    #[test]
    fn three_blocks_respect_chain() {
        let beta = q(1, 10);
        let cfg = GameConfig::absolute(beta.clone(), Space::Line).unwrap();
        for seed in 0..10 {
            let mut alice = reduce_modified_to_absolute(RandomBlocker, 3, beta.clone());
            let mut bob = RandomBob::new(Ball::interval(q(0, 1), q(1, 1)));
            let t = play(&cfg, &mut alice, &mut bob, 13, seed).unwrap();
            t.replay().unwrap();
            alice.aux_transcript().unwrap().replay().unwrap();
            let balls = t.bob_balls();
            for (j, _, jk, u) in &alice.log {
                if let Some(u) = u {
                    assert!(u.radius <= jk.radius);
                    assert!(u.radius <= beta.clone() * balls[j - 1].radius.clone());
                }
            }
        }
    }
}
