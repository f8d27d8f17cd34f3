//! Schmidt-type games on the circle, the line and max-metric products.
//!
//! Bob opens with a ball `B_1`; Alice answers every Bob ball. In the classic
//! and strong games she answers with a ball, in the absolute variants with a
//! list of blocked balls. The engine only checks legality and records moves;
//! deciding who "wins" is left to finite certificates elsewhere.

mod reduce;
mod strategies;
mod transcript;
mod transfer;

pub use reduce::{reduce_modified_to_absolute, BlockLog, ReducedAbsolute};
pub use strategies::{
    approach, fallback_response, free_gaps, CenterBlocker, ConcentricAlice, Gap, GreedyBob,
    LeftmostBlocker, NullBlocker, RandomBlocker, RandomBob, ScriptedBob, StrongFromAbsolute,
    TargetBob,
};
pub use transcript::{parse_transcript, write_transcript};
pub use transfer::{transfer_strategy, ProjectionMap, Transferred};

use std::fmt;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{circle_distance, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Space<S> {
    /// `ℝ / period·ℤ`, e.g. directions modulo π.
    Circle { period: S },
    Line,
    /// `ℝ^dim` with the max metric, so balls are cubes.
    Product { dim: usize },
}

impl<S: Scalar> Space<S> {
    pub fn dim(&self) -> usize {
        match self {
            Space::Product { dim } => *dim,
            _ => 1,
        }
    }

    /// Distance along coordinate `k`.
    fn coord_distance(&self, a: &S, b: &S) -> S {
        match self {
            Space::Circle { period } => circle_distance(a, b, period),
            _ => (a.clone() - b.clone()).abs(),
        }
    }

    pub fn distance(&self, a: &[S], b: &[S]) -> S {
        a.iter()
            .zip(b)
            .map(|(x, y)| self.coord_distance(x, y))
            .fold(S::zero(), |m, d| S::max_of(&m, &d))
    }

    /// Signed offset of `x` from `c`, taken in `[-period/2, period/2)` on the circle.
    pub fn offset(&self, c: &S, x: &S) -> S {
        match self {
            Space::Circle { period } => {
                let half = period.half();
                (x.clone() - c.clone() + half.clone()).rem_euclid_by(period) - half
            }
            _ => x.clone() - c.clone(),
        }
    }

    /// Canonical representative of a coordinate.
    pub fn normalize(&self, x: S) -> S {
        match self {
            Space::Circle { period } => x.rem_euclid_by(period),
            _ => x,
        }
    }

    /// `inner ⊆ outer`.
    pub fn contains(&self, outer: &Ball<S>, inner: &Ball<S>) -> bool {
        outer.center.iter().zip(&inner.center).all(|(o, i)| {
            S::tol_le(
                &(self.coord_distance(o, i) + inner.radius.clone()),
                &outer.radius,
            )
        })
    }

    /// Closed balls with empty intersection.
    pub fn disjoint(&self, a: &Ball<S>, b: &Ball<S>) -> bool {
        let reach = a.radius.clone() + b.radius.clone();
        a.center
            .iter()
            .zip(&b.center)
            .any(|(x, y)| self.coord_distance(x, y) > reach)
    }

    pub fn point_in(&self, ball: &Ball<S>, p: &[S]) -> bool {
        ball.center
            .iter()
            .zip(p)
            .all(|(c, x)| self.coord_distance(c, x) <= ball.radius)
    }
}

/// Closed ball; on the circle and the line this is an interval `[c-r, c+r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball<S> {
    pub center: Vec<S>,
    pub radius: S,
}

impl<S: Scalar> Ball<S> {
    pub fn new(center: Vec<S>, radius: S) -> Self {
        Ball { center, radius }
    }

    pub fn interval(center: S, radius: S) -> Self {
        Ball {
            center: vec![center],
            radius,
        }
    }

    /// First coordinate of the center.
    pub fn c0(&self) -> &S {
        &self.center[0]
    }

    /// Diameter, written `|B|`.
    pub fn length(&self) -> S {
        self.radius.clone() + self.radius.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Classic,
    Strong,
    Absolute,
    ModifiedAbsolute,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Classic => "classic",
            Variant::Strong => "strong",
            Variant::Absolute => "absolute",
            Variant::ModifiedAbsolute => "modified_absolute",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "classic" => Variant::Classic,
            "strong" => Variant::Strong,
            "absolute" => Variant::Absolute,
            "modified_absolute" => Variant::ModifiedAbsolute,
            _ => return None,
        })
    }

    pub fn blocks(self) -> bool {
        matches!(self, Variant::Absolute | Variant::ModifiedAbsolute)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("alpha must lie in (0,1), got {0}")]
    Alpha(String),
    #[error("beta must lie in (0,1), got {0}")]
    Beta(String),
    #[error("absolute game needs beta < 1/3, got {0}")]
    AbsoluteBeta(String),
    #[error("modified absolute game needs (2M+1)·beta < 1, got M={m}, beta={beta}")]
    ModifiedBeta { m: usize, beta: String },
    #[error("block count must be positive")]
    BlockCount,
    #[error("absolute variants are played on the circle or the line")]
    BlockingSpace,
    #[error("space must have positive dimension and positive period")]
    Space,
}

/// Parameters of one game.
///
/// For `ModifiedAbsolute`, Alice may block up to `block_count` balls, each of
/// radius at most `beta` times Bob's radius, and Bob's next ball must have
/// radius at least `beta` times his previous one.
#[derive(Clone, Debug, PartialEq)]
pub struct GameConfig<S> {
    pub variant: Variant,
    pub alpha: S,
    pub beta: S,
    pub block_count: usize,
    pub space: Space<S>,
}

fn in_unit<S: Scalar>(x: &S) -> bool {
    *x > S::zero() && *x < S::one()
}

impl<S: Scalar> GameConfig<S> {
    fn check_space(space: &Space<S>) -> Result<(), ConfigError> {
        match space {
            Space::Circle { period } if *period <= S::zero() => Err(ConfigError::Space),
            Space::Product { dim: 0 } => Err(ConfigError::Space),
            _ => Ok(()),
        }
    }

    pub fn classic(alpha: S, beta: S, space: Space<S>) -> Result<Self, ConfigError> {
        Self::ball_game(Variant::Classic, alpha, beta, space)
    }

    pub fn strong(alpha: S, beta: S, space: Space<S>) -> Result<Self, ConfigError> {
        Self::ball_game(Variant::Strong, alpha, beta, space)
    }

    fn ball_game(variant: Variant, alpha: S, beta: S, space: Space<S>) -> Result<Self, ConfigError> {
        if !in_unit(&alpha) {
            return Err(ConfigError::Alpha(alpha.to_string()));
        }
        if !in_unit(&beta) {
            return Err(ConfigError::Beta(beta.to_string()));
        }
        Self::check_space(&space)?;
        Ok(GameConfig {
            variant,
            alpha,
            beta,
            block_count: 1,
            space,
        })
    }

    pub fn absolute(beta: S, space: Space<S>) -> Result<Self, ConfigError> {
        if !in_unit(&beta) {
            return Err(ConfigError::Beta(beta.to_string()));
        }
        if beta.clone() * S::from_ratio(3, 1) >= S::one() {
            return Err(ConfigError::AbsoluteBeta(beta.to_string()));
        }
        Self::blocking_space(&space)?;
        Ok(GameConfig {
            variant: Variant::Absolute,
            alpha: S::zero(),
            beta,
            block_count: 1,
            space,
        })
    }

    pub fn modified_absolute(m: usize, beta: S, space: Space<S>) -> Result<Self, ConfigError> {
        if m == 0 {
            return Err(ConfigError::BlockCount);
        }
        if !in_unit(&beta) {
            return Err(ConfigError::Beta(beta.to_string()));
        }
        let bound = S::from_ratio(2 * m as i64 + 1, 1) * beta.clone();
        if bound >= S::one() {
            return Err(ConfigError::ModifiedBeta {
                m,
                beta: beta.to_string(),
            });
        }
        Self::blocking_space(&space)?;
        Ok(GameConfig {
            variant: Variant::ModifiedAbsolute,
            alpha: S::zero(),
            beta,
            block_count: m,
            space,
        })
    }

    fn blocking_space(space: &Space<S>) -> Result<(), ConfigError> {
        Self::check_space(space)?;
        if space.dim() != 1 {
            return Err(ConfigError::BlockingSpace);
        }
        Ok(())
    }

    /// Maximum number of balls in one Alice move.
    pub fn max_blocks(&self) -> usize {
        match self.variant {
            Variant::Absolute => 1,
            Variant::ModifiedAbsolute => self.block_count,
            _ => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mover {
    Alice,
    Bob,
}

impl fmt::Display for Mover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mover::Alice => "alice",
            Mover::Bob => "bob",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload<S> {
    Ball(Ball<S>),
    Blocks(Vec<Ball<S>>),
    Resign,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoveRecord<S> {
    pub round: usize,
    pub mover: Mover,
    pub payload: Payload<S>,
}

/// Complete, replayable history of one game.
#[derive(Clone, Debug, PartialEq)]
pub struct Transcript<S> {
    pub config: GameConfig<S>,
    pub rounds: Vec<MoveRecord<S>>,
    pub final_interval: Option<Ball<S>>,
}

impl<S: Scalar> Transcript<S> {
    pub fn new(config: GameConfig<S>) -> Self {
        Transcript {
            config,
            rounds: Vec::new(),
            final_interval: None,
        }
    }

    pub fn push(&mut self, record: MoveRecord<S>) {
        if let (Mover::Bob, Payload::Ball(b)) = (record.mover, &record.payload) {
            self.final_interval = Some(b.clone());
        }
        self.rounds.push(record);
    }

    /// Bob's balls in order.
    pub fn bob_balls(&self) -> Vec<&Ball<S>> {
        bob_balls(&self.rounds)
    }

    /// Alice's blocks (or ball, as a one-element list) answering each Bob ball.
    pub fn alice_moves(&self) -> Vec<Vec<Ball<S>>> {
        self.rounds
            .iter()
            .filter(|r| r.mover == Mover::Alice)
            .filter_map(|r| match &r.payload {
                Payload::Ball(b) => Some(vec![b.clone()]),
                Payload::Blocks(v) => Some(v.clone()),
                Payload::Resign => None,
            })
            .collect()
    }

    pub fn resigned(&self) -> Option<Mover> {
        self.rounds
            .iter()
            .find(|r| r.payload == Payload::Resign)
            .map(|r| r.mover)
    }

    /// Replays every move against its prefix.
    pub fn replay(&self) -> Result<(), IllegalMove> {
        for k in 0..self.rounds.len() {
            validate_move(&self.config, &self.rounds[..k], &self.rounds[k])?;
        }
        let last = self.bob_balls().last().map(|b| (*b).clone());
        if last != self.final_interval {
            return Err(IllegalMove::FinalInterval);
        }
        Ok(())
    }
}

pub fn bob_balls<S>(history: &[MoveRecord<S>]) -> Vec<&Ball<S>> {
    history
        .iter()
        .filter(|r| r.mover == Mover::Bob)
        .filter_map(|r| match &r.payload {
            Payload::Ball(b) => Some(b),
            _ => None,
        })
        .collect()
}

pub fn last_bob_ball<S>(history: &[MoveRecord<S>]) -> Option<&Ball<S>> {
    history.iter().rev().find_map(|r| match (&r.mover, &r.payload) {
        (Mover::Bob, Payload::Ball(b)) => Some(b),
        _ => None,
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IllegalMove {
    #[error("illegal radius: {0}")]
    IllegalRadius(String),
    #[error("not contained: {0}")]
    NotContained(String),
    #[error("overlaps block {index}")]
    OverlapsBlock { index: usize },
    #[error("expected a move by {expected}")]
    WrongMover { expected: Mover },
    #[error("payload shape does not match the variant: {0}")]
    WrongPayload(String),
    #[error("round number {got} does not follow the history (expected {expected})")]
    WrongRound { expected: usize, got: usize },
    #[error("game already ended by resignation")]
    GameOver,
    #[error("ball dimension {got} does not match the space dimension {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("final interval does not match the last Bob ball")]
    FinalInterval,
}

fn check_ball<S: Scalar>(config: &GameConfig<S>, b: &Ball<S>) -> Result<(), IllegalMove> {
    let dim = config.space.dim();
    if b.center.len() != dim {
        return Err(IllegalMove::Dimension {
            expected: dim,
            got: b.center.len(),
        });
    }
    if b.radius <= S::zero() {
        return Err(IllegalMove::IllegalRadius("radius must be positive".into()));
    }
    if let Space::Circle { period } = &config.space {
        if b.length() >= *period {
            return Err(IllegalMove::IllegalRadius(
                "ball wraps the whole circle (2r ≥ period)".into(),
            ));
        }
    }
    Ok(())
}

/// Who moves next and in which round.
pub fn next_turn<S>(history: &[MoveRecord<S>]) -> (Mover, usize) {
    match history.last() {
        None => (Mover::Bob, 1),
        Some(r) if r.mover == Mover::Bob => (Mover::Alice, r.round),
        Some(r) => (Mover::Bob, r.round + 1),
    }
}

/// Checks `proposed` against the rules given a legal `history`.
pub fn validate_move<S: Scalar>(
    config: &GameConfig<S>,
    history: &[MoveRecord<S>],
    proposed: &MoveRecord<S>,
) -> Result<(), IllegalMove> {
    if history.iter().any(|r| r.payload == Payload::Resign) {
        return Err(IllegalMove::GameOver);
    }
    let (mover, round) = next_turn(history);
    if proposed.mover != mover {
        return Err(IllegalMove::WrongMover { expected: mover });
    }
    if proposed.round != round {
        return Err(IllegalMove::WrongRound {
            expected: round,
            got: proposed.round,
        });
    }
    if proposed.payload == Payload::Resign {
        return Ok(());
    }
    let space = &config.space;
    match mover {
        Mover::Bob => {
            let Payload::Ball(b) = &proposed.payload else {
                return Err(IllegalMove::WrongPayload("Bob plays a ball".into()));
            };
            check_ball(config, b)?;
            let Some(prev) = history.last() else {
                return Ok(());
            };
            let prev_bob = last_bob_ball(history).expect("Alice moved after Bob");
            match (config.variant, &prev.payload) {
                (Variant::Classic | Variant::Strong, Payload::Ball(a)) => {
                    if !space.contains(a, b) {
                        return Err(IllegalMove::NotContained("B_{i+1} ⊆ A_i".into()));
                    }
                    let want = config.beta.clone() * a.radius.clone();
                    radius_rule(config.variant, &b.radius, &want, "|B_{i+1}| vs β|A_i|")
                }
                (Variant::Absolute | Variant::ModifiedAbsolute, Payload::Blocks(blocks)) => {
                    if !space.contains(prev_bob, b) {
                        return Err(IllegalMove::NotContained("B_{i+1} ⊆ B_i".into()));
                    }
                    let want = config.beta.clone() * prev_bob.radius.clone();
                    if !S::tol_le(&want, &b.radius) {
                        return Err(IllegalMove::IllegalRadius("|B_{i+1}| ≥ β|B_i|".into()));
                    }
                    for (index, a) in blocks.iter().enumerate() {
                        if !space.disjoint(a, b) {
                            return Err(IllegalMove::OverlapsBlock { index });
                        }
                    }
                    Ok(())
                }
                _ => Err(IllegalMove::WrongPayload("history does not match variant".into())),
            }
        }
        Mover::Alice => {
            let bob = last_bob_ball(history).expect("Bob opens");
            match (config.variant, &proposed.payload) {
                (Variant::Classic | Variant::Strong, Payload::Ball(a)) => {
                    check_ball(config, a)?;
                    if !space.contains(bob, a) {
                        return Err(IllegalMove::NotContained("A_i ⊆ B_i".into()));
                    }
                    let want = config.alpha.clone() * bob.radius.clone();
                    radius_rule(config.variant, &a.radius, &want, "|A_i| vs α|B_i|")
                }
                (Variant::Absolute | Variant::ModifiedAbsolute, Payload::Blocks(blocks)) => {
                    if blocks.len() > config.max_blocks() {
                        return Err(IllegalMove::WrongPayload(format!(
                            "at most {} blocks allowed, got {}",
                            config.max_blocks(),
                            blocks.len()
                        )));
                    }
                    let cap = config.beta.clone() * bob.radius.clone();
                    for a in blocks {
                        check_ball(config, a)?;
                        if !S::tol_le(&a.radius, &cap) {
                            return Err(IllegalMove::IllegalRadius("|A_i| ≤ β|B_i|".into()));
                        }
                    }
                    Ok(())
                }
                _ => Err(IllegalMove::WrongPayload(format!(
                    "Alice's payload does not fit the {} game",
                    config.variant.name()
                ))),
            }
        }
    }
}

fn radius_rule<S: Scalar>(variant: Variant, got: &S, want: &S, what: &str) -> Result<(), IllegalMove> {
    let ok = match variant {
        Variant::Classic => S::tol_eq(got, want),
        _ => S::tol_le(want, got),
    };
    if ok {
        Ok(())
    } else {
        Err(IllegalMove::IllegalRadius(format!("{what}: got {got}, need {want}")))
    }
}

/// What a strategy sees when asked to move.
pub struct Context<'a, S> {
    pub config: &'a GameConfig<S>,
    pub history: &'a [MoveRecord<S>],
    pub round: usize,
}

impl<S: Scalar> Context<'_, S> {
    pub fn last_bob(&self) -> Option<&Ball<S>> {
        last_bob_ball(self.history)
    }

    /// Alice's most recent move, if the last record is hers.
    pub fn last_alice(&self) -> Option<&Payload<S>> {
        match self.history.last() {
            Some(r) if r.mover == Mover::Alice => Some(&r.payload),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error("no legal lift of Bob's ball: {0}")]
    LiftFailure(String),
    #[error("wrapped strategy played an illegal move: {0}")]
    Inner(IllegalMove),
    #[error("{0}")]
    Other(String),
}

/// A player. Strategies may keep state across calls but must be
/// deterministic given the same history and random stream.
pub trait Strategy<S: Scalar> {
    fn next_move(&mut self, ctx: &Context<'_, S>, rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError>;
}

impl<S: Scalar, T: Strategy<S> + ?Sized> Strategy<S> for Box<T> {
    fn next_move(&mut self, ctx: &Context<'_, S>, rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        (**self).next_move(ctx, rng)
    }
}

impl<S: Scalar, T: Strategy<S> + ?Sized> Strategy<S> for &mut T {
    fn next_move(&mut self, ctx: &Context<'_, S>, rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        (**self).next_move(ctx, rng)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("{mover} played an illegal move in round {round}: {reason}")]
    StrategyIllegalMove {
        mover: Mover,
        round: usize,
        reason: IllegalMove,
    },
    #[error("{mover} failed in round {round}: {reason}")]
    StrategyFailed {
        mover: Mover,
        round: usize,
        reason: StrategyError,
    },
}

/// Independent random streams for the two players.
pub fn player_rngs(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut a = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ChaCha8Rng::seed_from_u64(seed);
    a.set_stream(1);
    b.set_stream(2);
    (a, b)
}

/// Plays until Bob has made `rounds` moves or somebody resigns.
pub fn play<S: Scalar>(
    config: &GameConfig<S>,
    alice: &mut dyn Strategy<S>,
    bob: &mut dyn Strategy<S>,
    rounds: usize,
    seed: u64,
) -> Result<Transcript<S>, GameError> {
    let (mut rng_a, mut rng_b) = player_rngs(seed);
    let mut t = Transcript::new(config.clone());
    let mut bob_moves = 0;
    while bob_moves < rounds {
        let (mover, round) = next_turn(&t.rounds);
        let ctx = Context {
            config,
            history: &t.rounds,
            round,
        };
        let result = match mover {
            Mover::Alice => alice.next_move(&ctx, &mut rng_a),
            Mover::Bob => bob.next_move(&ctx, &mut rng_b),
        };
        let payload = result.map_err(|reason| GameError::StrategyFailed { mover, round, reason })?;
        let record = MoveRecord { round, mover, payload };
        validate_move(config, &t.rounds, &record)
            .map_err(|reason| GameError::StrategyIllegalMove { mover, round, reason })?;
        let resign = record.payload == Payload::Resign;
        t.push(record);
        if resign {
            break;
        }
        if mover == Mover::Bob {
            bob_moves += 1;
        }
    }
    Ok(t)
}
