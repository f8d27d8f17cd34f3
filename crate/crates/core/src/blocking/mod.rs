//! Alice's blocking strategy for the circle of directions on a fixed lattice
//! surface: the constants ladder, the per-round dangerous sets, the move
//! generator and finite-round certificates.

mod certificate;
mod strategy;

pub use certificate::{
    final_certificate, verify_pj, write_certificate, Certificate, FinalCertificate, LevelReport, Mode,
    RoundReport, Violation,
};
pub use strategy::{
    alice_move, dangerous_complexes, opening_interval, BlockingAlice, Danger, LevelState, NearestDangerBob,
    RoundState,
};

use std::fmt::Write as _;

use num_traits::pow;
use thiserror::Error;

use crate::complexes::{eps0, ComplexError};
use crate::game::{ConfigError, GameConfig, Space};
use crate::scalar::{Rational, Real, Scalar, DEFAULT_ANGLE_BITS};
use crate::surface::{FlatSurface, SurfaceError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlockingError {
    #[error("β = {0} must be below 1/12")]
    BetaTooLarge(String),
    #[error("the strategy needs a square-tiled surface")]
    NotLattice,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("round {round}, level {level}: complexes up to length {needed} are needed but the spectrum stops at {lmax}")]
    IncompleteSpectrum { round: usize, level: usize, needed: f64, lmax: f64 },
    #[error("the transcript has no Bob ball")]
    EmptyTranscript,
}

/// The constants of the strategy. `c[k]` holds `c_{k+1}`, so `c[m]` is `c_{M+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyConstants<S> {
    /// Highest complex level Alice blocks.
    pub m: usize,
    pub beta: S,
    /// Lower bound of `(4(6g−6+3n)√3)^{−1/2}`.
    pub eps0: S,
    /// Lower bound of the systole.
    pub l0: S,
    /// `|I₁|`.
    pub opening: S,
    pub squares: usize,
    pub n: Vec<u64>,
    pub c: Vec<S>,
    pub bits: u32,
    /// The circle of directions is `ℝ / period·ℤ`.
    pub period: S,
}

/// `N₁ = 6`, `N_{i+1} = 6 + 2(N₁ + … + N_i)`.
pub fn n_sequence(m: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(m);
    let mut sum = 0u64;
    for _ in 0..m {
        let next = 6 + 2 * sum;
        out.push(next);
        sum += next;
    }
    out
}

/// Largest level among `βc_i`-shrinkable complexes on a lattice surface: the
/// `n` parallel lifts of one direction (one on the torus).
pub fn max_level(surface: &FlatSurface) -> Option<usize> {
    surface.squares()
}

/// Precision that keeps `rounds` rounds of radius ratio `β` well resolved.
pub fn bits_for<S: Scalar>(rounds: usize, beta: &S) -> u32 {
    let per = (1.0 / beta.as_f64()).log2().ceil().max(1.0) as u32;
    (rounds as u32 * per + 130).max(DEFAULT_ANGLE_BITS)
}

fn sqrt_lower<S: Real>(x: &S, bits: u32) -> S {
    let mut r = x.sqrt_approx(bits);
    if S::EXACT {
        let ulp = S::one() / pow(S::two(), bits.min(4096) as usize);
        while r.clone() * r.clone() > *x {
            r = r - ulp.clone();
        }
    }
    r
}

fn sqrt_upper<S: Real>(x: &S, bits: u32) -> S {
    let mut r = x.sqrt_approx(bits);
    if S::EXACT {
        let ulp = S::one() / pow(S::two(), bits.min(4096) as usize);
        while r.clone() * r.clone() < *x {
            r = r + ulp.clone();
        }
    }
    r
}

pub(crate) fn to_rational<S: Scalar>(x: &S) -> Rational {
    if S::EXACT {
        Rational::parse_token(&x.to_token()).expect("exact token")
    } else {
        Rational::from_f64_lossy(x.as_f64())
    }
}

pub fn derive_constants<S: Real>(surface: &FlatSurface, beta: S, opening: &S) -> Result<StrategyConstants<S>, BlockingError> {
    derive_constants_with_bits(surface, beta, opening, DEFAULT_ANGLE_BITS)
}

pub fn derive_constants_with_bits<S: Real>(
    surface: &FlatSurface,
    beta: S,
    opening: &S,
    bits: u32,
) -> Result<StrategyConstants<S>, BlockingError> {
    if !(beta > S::zero()) || beta.clone() * S::from_ratio(12, 1) >= S::one() {
        return Err(BlockingError::BetaTooLarge(beta.to_string()));
    }
    let squares = surface.squares().ok_or(BlockingError::NotLattice)?;
    let m = max_level(surface).ok_or(BlockingError::NotLattice)?;
    let n = n_sequence(m);
    let e0: S = eps0(surface, bits);
    let l0 = S::one() / sqrt_upper(&S::from_ratio(squares as i64, 1), bits);
    let nm = *n.last().expect("m ≥ 1") as usize;
    let top = S::min_of(
        &(l0.clone() * pow(beta.clone(), nm)),
        &(l0.clone() * sqrt_lower(opening, bits) * e0.clone()),
    );
    let mut c = vec![top; m + 1];
    for i in (0..m).rev() {
        c[i] = pow(beta.clone(), n[i] as usize) * c[i + 1].clone();
    }
    Ok(StrategyConstants {
        m,
        beta,
        eps0: e0,
        l0,
        opening: opening.clone(),
        squares,
        n,
        c,
        bits,
        period: S::pi_approx(bits),
    })
}

impl<S: Real> StrategyConstants<S> {
    /// `c_i` for `1 ≤ i ≤ M+1`.
    pub fn c_i(&self, i: usize) -> &S {
        &self.c[i - 1]
    }

    /// Shrinkability scale `βc_i` of level-`i` complexes.
    pub fn eps_level(&self, i: usize) -> S {
        self.beta.clone() * self.c_i(i).clone()
    }

    /// `c_{i+1}/c_i = β^{−6}(c_i/c₁)²` for every `i ≤ M`.
    pub fn ladder_identity_holds(&self) -> bool {
        let b6 = pow(self.beta.clone(), 6);
        (1..=self.m).all(|i| {
            let ratio = self.c_i(i).clone() / self.c_i(1).clone();
            let lhs = self.c_i(i + 1).clone() * b6.clone();
            let rhs = self.c_i(i).clone() * ratio.clone() * ratio;
            S::tol_eq(&lhs, &rhs)
        })
    }

    /// `β^{2N_M}`; rounds with `|I_j|` at least this satisfy the statement vacuously.
    pub fn j0_threshold(&self) -> S {
        pow(self.beta.clone(), 2 * *self.n.last().expect("m ≥ 1") as usize)
    }

    /// `βc₁²/4`.
    pub fn final_threshold(&self) -> S {
        self.beta.clone() * self.c[0].clone() * self.c[0].clone() / S::from_ratio(4, 1)
    }

    pub fn space(&self) -> Space<S> {
        Space::Circle { period: self.period.clone() }
    }

    pub fn game_config(&self) -> Result<GameConfig<S>, BlockingError> {
        Ok(GameConfig::modified_absolute(self.m, self.beta.clone(), self.space())?)
    }
}

/// Text dump of the constants, exact tokens first and decimals after `#`.
pub fn write_constants<S: Real>(k: &StrategyConstants<S>) -> String {
    let tag = if S::EXACT { "exact" } else { "approx" };
    let mut out = String::new();
    let line = |out: &mut String, name: &str, x: &S| {
        let _ = writeln!(out, "{name} {} {tag} # {:e}", x.to_token(), x.as_f64());
    };
    let _ = writeln!(out, "M {}", k.m);
    let _ = writeln!(out, "squares {}", k.squares);
    let _ = writeln!(out, "bits {}", k.bits);
    line(&mut out, "beta", &k.beta);
    line(&mut out, "eps0", &k.eps0);
    line(&mut out, "L0", &k.l0);
    line(&mut out, "I1", &k.opening);
    for (i, n) in k.n.iter().enumerate() {
        let _ = writeln!(out, "N{} {}", i + 1, n);
    }
    for (i, c) in k.c.iter().enumerate() {
        line(&mut out, &format!("c{}", i + 1), c);
    }
    let _ = writeln!(out, "identity {}", if k.ladder_identity_holds() { "holds" } else { "fails" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_torus;

    #[test]
    fn n_sequence_unrolls() {
        assert_eq!(n_sequence(4), vec![6, 18, 54, 162]);
    }

    #[test]
    fn torus_ladder() {
        let q = Rational::from_ratio;
        let pi = Rational::pi_approx(DEFAULT_ANGLE_BITS);
        let k = derive_constants(&build_torus(), q(1, 16), &(pi / q(4, 1))).unwrap();
        assert_eq!(k.m, 1);
        assert_eq!(k.c[1], pow(q(1, 16), 6));
        assert_eq!(k.c[0], pow(q(1, 16), 12));
        assert!(k.ladder_identity_holds());
        assert!(derive_constants(&build_torus(), q(1, 12), &q(1, 1)).is_err());
    }
}
