//! Moving a strong-game strategy from `ℝ^n` to `ℝ^m` along a coordinate
//! projection.

use rand_chacha::ChaCha8Rng;

use super::{
    validate_move, Ball, Context, GameConfig, MoveRecord, Mover, Payload, Space, Strategy,
    StrategyError, Transcript,
};
use crate::scalar::Scalar;

/// Projection of `ℝ^n` onto its first `m` coordinates, with covering constant `c`.
///
/// With the max metric a coordinate projection maps `B(x, r)` onto
/// `B(F(x), r)`, so every `c ∈ (0, 1]` satisfies the covering hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMap<S> {
    pub source_dim: usize,
    pub target_dim: usize,
    pub c: S,
}

impl<S: Scalar> ProjectionMap<S> {
    pub fn new(source_dim: usize, target_dim: usize, c: S) -> Result<Self, String> {
        if target_dim == 0 || target_dim > source_dim {
            return Err(format!("need 0 < m ≤ n, got m={target_dim}, n={source_dim}"));
        }
        if c <= S::zero() || c > S::one() {
            return Err(format!("covering constant must lie in (0,1], got {c}"));
        }
        Ok(ProjectionMap {
            source_dim,
            target_dim,
            c,
        })
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        x[..self.target_dim].to_vec()
    }

    pub fn source_space(&self) -> Space<S> {
        Space::Product { dim: self.source_dim }
    }

    pub fn target_space(&self) -> Space<S> {
        if self.target_dim == 1 {
            Space::Line
        } else {
            Space::Product { dim: self.target_dim }
        }
    }
}

/// Alice in the `(c²α, β)`-strong game on `ℝ^m`, built from `alice_n`, an
/// Alice for the `(α, c²β)`-strong game on `ℝ^n`.
pub struct Transferred<S, A> {
    inner: A,
    proj: ProjectionMap<S>,
    alpha: S,
    aux_config: Option<GameConfig<S>>,
    aux_history: Vec<MoveRecord<S>>,
}

pub fn transfer_strategy<S: Scalar, A: Strategy<S>>(
    alice_n: A,
    proj: ProjectionMap<S>,
    alpha: S,
) -> Transferred<S, A> {
    Transferred {
        inner: alice_n,
        proj,
        alpha,
        aux_config: None,
        aux_history: Vec::new(),
    }
}

impl<S: Scalar, A> Transferred<S, A> {
    /// Primary-game parameters `(c²α, β)` for a given `β`.
    pub fn primary_config(&self, beta: S) -> Result<GameConfig<S>, String> {
        let c2 = self.proj.c.clone() * self.proj.c.clone();
        GameConfig::strong(c2 * self.alpha.clone(), beta, self.proj.target_space()).map_err(|e| e.to_string())
    }

    pub fn aux_transcript(&self) -> Option<Transcript<S>> {
        let cfg = self.aux_config.clone()?;
        let mut t = Transcript::new(cfg);
        for r in &self.aux_history {
            t.push(r.clone());
        }
        Some(t)
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }
}

impl<S: Scalar, A: Strategy<S>> Strategy<S> for Transferred<S, A> {
    fn next_move(&mut self, ctx: &Context<'_, S>, rng: &mut ChaCha8Rng) -> Result<Payload<S>, StrategyError> {
        let c = self.proj.c.clone();
        if self.aux_config.is_none() {
            let c2 = c.clone() * c.clone();
            let cfg = GameConfig::strong(self.alpha.clone(), c2 * ctx.config.beta.clone(), self.proj.source_space())
                .map_err(|e| StrategyError::Other(e.to_string()))?;
            self.aux_config = Some(cfg);
        }
        let cfg = self.aux_config.clone().expect("set above");
        let bob = ctx
            .last_bob()
            .ok_or_else(|| StrategyError::Other("no Bob ball".into()))?;

        // Lift B(z, s) to B(z', cs) with F(z') = z; the remaining coordinates
        // are copied from Alice's previous auxiliary ball.
        let mut lifted = bob.center.clone();
        match self.aux_history.last() {
            Some(MoveRecord {
                payload: Payload::Ball(prev),
                ..
            }) => lifted.extend_from_slice(&prev.center[self.proj.target_dim..]),
            _ => lifted.resize(self.proj.source_dim, S::zero()),
        }
        let round = self.aux_history.len() / 2 + 1;
        let bob_rec = MoveRecord {
            round,
            mover: Mover::Bob,
            payload: Payload::Ball(Ball::new(lifted, c.clone() * bob.radius.clone())),
        };
        validate_move(&cfg, &self.aux_history, &bob_rec).map_err(|e| StrategyError::LiftFailure(e.to_string()))?;
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
        let Payload::Ball(a) = &rec.payload else {
            return Err(StrategyError::Other("auxiliary Alice must play a ball".into()));
        };
        let out = Ball::new(self.proj.apply(&a.center), c * a.radius.clone());
        self.aux_history.push(rec);
        Ok(Payload::Ball(out))
    }
}
