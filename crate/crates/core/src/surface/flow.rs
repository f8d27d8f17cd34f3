//! The action of `g_t r_θ` on holonomy vectors.

use super::spectrum::DirectionSpectrum;
use super::{SaddleConnection, SurfaceError};
use crate::scalar::{Real, DEFAULT_ANGLE_BITS};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowParams<S> {
    pub t: S,
    pub theta: S,
}

impl<S> FlowParams<S> {
    pub fn new(t: S, theta: S) -> Self {
        FlowParams { t, theta }
    }
}

/// `r_θ = [[cos θ, sin θ], [−sin θ, cos θ]]` applied to `hol`.
pub fn rotate<S: Real>(hol: &[S; 2], theta: &S) -> [S; 2] {
    let (s, c) = theta.sin_cos_approx(DEFAULT_ANGLE_BITS);
    let [h, v] = hol.clone();
    [
        c.clone() * h.clone() + s.clone() * v.clone(),
        c * v - s * h,
    ]
}

/// `g_t r_θ · hol`: rotate by `θ`, then scale the horizontal part by `e^t`
/// and the vertical part by `e^{−t}`.
pub fn flow_holonomy<S: Real>(hol: &[S; 2], p: &FlowParams<S>) -> [S; 2] {
    let [h, v] = rotate(hol, &p.theta);
    let et = p.t.exp_approx(DEFAULT_ANGLE_BITS);
    let emt = (-p.t.clone()).exp_approx(DEFAULT_ANGLE_BITS);
    [et * h, emt * v]
}

/// `max(|h|, |v|)` of the flowed holonomy.
pub fn flowed_length<S: Real>(hol: &[S; 2], p: &FlowParams<S>) -> S {
    let [h, v] = flow_holonomy(hol, p);
    S::max_of(&h.abs(), &v.abs())
}

/// `min_t max(e^t L sin c, e^{−t} L cos c) = L √(sin c cos c)` for `0 ≤ c ≤ π/4`.
pub fn min_flow_length<S: Real>(l: &S, c: &S) -> S {
    let (s, co) = c.sin_cos_approx(DEFAULT_ANGLE_BITS);
    l.clone() * (s * co).sqrt_approx(DEFAULT_ANGLE_BITS)
}

/// Shortest saddle connection of `g_t r_θ q`.
///
/// The result is only returned when no connection beyond the spectrum's
/// bound can be shorter: a connection of max-norm above `Lmax` has
/// flowed length above `Lmax / √(e^{2t} + e^{−2t})`.
pub fn systole_along(
    spectrum: &DirectionSpectrum,
    theta: f64,
    t: f64,
) -> Result<(f64, SaddleConnection), SurfaceError> {
    let (m, witness) = spectrum
        .min_flowed(theta, t)
        .ok_or(SurfaceError::UnsupportedSurface("empty spectrum".into()))?;
    let spread = ((2.0 * t).exp() + (-2.0 * t).exp()).sqrt();
    let needed = m * spread;
    if needed > spectrum.lmax {
        return Err(SurfaceError::IncompleteSpectrum {
            lmax: spectrum.lmax,
            needed,
        });
    }
    Ok((m, witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, Scalar};
    use std::f64::consts::{FRAC_PI_4, LN_2};

    #[test]
    fn identity_and_contraction() {
        let p = FlowParams::new(0.0, 0.0);
        assert_eq!(flow_holonomy(&[0.0, 1.0], &p), [0.0, 1.0]);
        let p = FlowParams::new(LN_2, 0.0);
        let [h, v] = flow_holonomy(&[0.0f64, 1.0], &p);
        assert_eq!(h, 0.0);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn diagonals_become_vertical() {
        for t in [-1.0, 0.0, 2.5] {
            let [h, _] = flow_holonomy(&[1.0f64, -1.0], &FlowParams::new(t, FRAC_PI_4));
            let tol = 1e-15 * (2.0 * t).exp().max(1.0);
            assert!(h.abs() < tol);
            let [h, _] = flow_holonomy(&[1.0f64, 1.0], &FlowParams::new(t, 3.0 * FRAC_PI_4));
            assert!(h.abs() < tol);
        }
    }

    #[test]
    fn exact_flow_matches_double() {
        let q = Rational::from_ratio;
        let p = FlowParams::new(q(1, 3), q(2, 7));
        let [h, v] = flow_holonomy(&[q(3, 1), q(-2, 1)], &p);
        let [hf, vf] = flow_holonomy(&[3.0, -2.0], &FlowParams::new(1.0 / 3.0, 2.0 / 7.0));
        assert!((h.as_f64() - hf).abs() < 1e-13);
        assert!((v.as_f64() - vf).abs() < 1e-13);
    }

    #[test]
    fn closed_form_at_quarter_turn() {
        assert!((min_flow_length(&1.0f64, &FRAC_PI_4) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(min_flow_length(&3.0f64, &0.0), 0.0);
    }
}
