//! Raising the level of a complex: two nearby shrinkable complexes of one
//! level give a shrinkable complex one level higher.
//!
//! The new edge `σ` is found by searching the spectrum for a saddle
//! connection disjoint from `K₁` whose components in the frame of `θ(K₁)`
//! satisfy `h(σ) ≤ h(γ) + 3ε²/L(K₁)` and `v(σ) ≤ v(γ) + 3L(K₁)`, where `γ` is
//! an edge of `K₂` outside `K₁`.

use super::{
    edge_outside, is_shrinkable_at, lattice_gap, max_norm, s_int, topologically_equivalent, Complex, ComplexError,
    Lattice,
};
use crate::scalar::{Real, DEFAULT_ANGLE_BITS};
use crate::surface::{lattice_order, DirectionSpectrum, SaddleConnection};

#[derive(Clone, Debug, PartialEq)]
pub struct CombineParams<S> {
    pub eps: S,
    pub rho1: S,
    pub rho2: S,
}

impl<S: Real> CombineParams<S> {
    pub fn new(eps: S, rho1: S, rho2: S) -> Result<Self, ComplexError> {
        let three = s_int::<S>(3);
        if !(eps > S::zero()) {
            return Err(ComplexError::PreconditionViolated("ε must be positive".into()));
        }
        if !(rho1 > three && rho2 > three) {
            return Err(ComplexError::PreconditionViolated("ρ₁ and ρ₂ must exceed 3".into()));
        }
        Ok(CombineParams { eps, rho1, rho2 })
    }

    fn rho(&self, symmetric: bool) -> S {
        if symmetric {
            S::max_of(&self.rho1, &self.rho2)
        } else {
            self.rho1.clone()
        }
    }

    /// `ρ′₂ = √(4ρ₂² + 9ρ²ε⁴/L⁴)` given `L⁴`; `ρ` is `ρ₁`, or `max(ρ₁, ρ₂)` when symmetric.
    pub fn rho2_prime(&self, l1_fourth: &S, symmetric: bool, bits: u32) -> S {
        let rho = self.rho(symmetric);
        let e2 = self.eps.clone() * self.eps.clone();
        let x = s_int::<S>(4) * self.rho2.clone() * self.rho2.clone()
            + s_int::<S>(9) * rho.clone() * rho * e2.clone() * e2 / l1_fourth.clone();
        x.sqrt_approx(bits)
    }

    /// `ε′ = (16ρ₁ρ′₂)^{1/2}ε`, or `(8ρ_*ρ′₂)^{1/2}ε` when symmetric.
    pub fn eps_prime(&self, rho2_prime: &S, symmetric: bool, bits: u32) -> S {
        let k = if symmetric { 8 } else { 16 };
        let x = s_int::<S>(k) * self.rho(symmetric) * rho2_prime.clone();
        x.sqrt_approx(bits) * self.eps.clone()
    }
}

/// Result of a successful combination.
#[derive(Clone, Debug)]
pub struct Combined<S> {
    pub complex: Complex,
    pub sigma: SaddleConnection,
    /// Edge of `K₂` not contained in `K₁`.
    pub gamma: SaddleConnection,
    pub eps_prime: S,
    pub rho2_prime: S,
    /// Candidates examined before `σ` was accepted.
    pub searched: usize,
}

/// Combines under `L(K₁) ≤ L(K₂) < ρ₂L(K₁)`.
pub fn combine<S: Real>(
    k1: &Complex,
    k2: &Complex,
    params: &CombineParams<S>,
    spectrum: &DirectionSpectrum,
) -> Result<Combined<S>, ComplexError> {
    combine_impl(k1, k2, params, spectrum, false, DEFAULT_ANGLE_BITS)
}

/// Symmetric variant: `ρ₂⁻¹L(K₁) ≤ L(K₂) < ρ₂L(K₁)`, with `ρ_* = max(ρ₁, ρ₂)`.
pub fn combine2<S: Real>(
    k1: &Complex,
    k2: &Complex,
    params: &CombineParams<S>,
    spectrum: &DirectionSpectrum,
) -> Result<Combined<S>, ComplexError> {
    combine_impl(k1, k2, params, spectrum, true, DEFAULT_ANGLE_BITS)
}

fn pre(ok: bool, what: &str) -> Result<(), ComplexError> {
    if ok {
        Ok(())
    } else {
        Err(ComplexError::PreconditionViolated(what.into()))
    }
}

/// Absolute components of a raw holonomy in the frame rotated by `theta`.
fn frame(hol: [i64; 2], theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let (h, v) = (hol[0] as f64, hol[1] as f64);
    ((c * h + s * v).abs(), (c * v - s * h).abs())
}

fn combine_impl<S: Real>(
    k1: &Complex,
    k2: &Complex,
    params: &CombineParams<S>,
    spectrum: &DirectionSpectrum,
    symmetric: bool,
    bits: u32,
) -> Result<Combined<S>, ComplexError> {
    let eps = &params.eps;
    let n = k1.squares() as i64;
    pre(k2.squares() as i64 == n && spectrum.surface.squares() == Some(n as usize), "complexes on different surfaces")?;
    pre(k1.level() == k2.level(), "levels differ")?;
    pre(k1.level() < k1.surface.max_level(), "no room for another edge")?;
    pre(is_shrinkable_at(k1, eps, bits), "K₁ is not ε-shrinkable")?;
    pre(is_shrinkable_at(k2, eps, bits), "K₂ is not ε-shrinkable")?;
    let (r1, r2) = (k1.l_raw(), k2.l_raw());
    let (l1, l2) = (s_int::<S>(r1), s_int::<S>(r2));
    let gap: S = lattice_gap(k1.theta_raw(), k2.theta_raw(), bits);
    let e2n = eps.clone() * eps.clone() * s_int::<S>(n);
    pre(gap * s_int::<S>(r1 * r2) < params.rho1.clone() * e2n.clone(), "θ(K₁) and θ(K₂) too far apart")?;
    if symmetric {
        pre(l1.clone() <= params.rho2.clone() * l2.clone(), "L(K₂) < L(K₁)/ρ₂")?;
    } else {
        pre(r1 <= r2, "L(K₁) > L(K₂)")?;
    }
    pre(l2 < params.rho2.clone() * l1, "L(K₂) ≥ ρ₂L(K₁)")?;
    pre(!topologically_equivalent(k1, k2), "the complexes are topologically equivalent")?;
    let gi = edge_outside(k1, k2)?
        .ok_or_else(|| ComplexError::PreconditionViolated("every edge of K₂ lies in K₁".into()))?;
    let gamma = k2.edges[gi].clone();

    // L(K₁)⁴ = r₁⁴/n² in normalized units.
    let l1_fourth = s_int::<S>(r1) * s_int::<S>(r1) * s_int::<S>(r1) * s_int::<S>(r1) / s_int::<S>(n * n);
    let rho2p = params.rho2_prime(&l1_fourth, symmetric, bits);
    let epsp = params.eps_prime(&rho2p, symmetric, bits);

    let theta = k1.theta_k();
    let (hg, vg) = frame(gamma.raw, theta);
    let ef = eps.as_f64();
    let slack = 1.0 + 1e-9;
    let hb = (hg + 3.0 * ef * ef * n as f64 / r1 as f64) * slack;
    let vb = (vg + 3.0 * r1 as f64) * slack;
    let euclid = (hb * hb + vb * vb).sqrt();
    let scale = k1.surface().scale();
    let complete = spectrum.raw_limit().is_some_and(|k| k as f64 >= euclid);
    // Raw lengths are at least 1, so sin of the angle to θ is at most hb.
    let half = if hb < 1.0 { hb.asin() } else { std::f64::consts::FRAC_PI_2 };
    let mut cands: Vec<[i64; 2]> = spectrum
        .window(theta, half, 0.0, euclid * scale)
        .into_iter()
        .filter_map(|e| e.lattice)
        .filter(|&c| {
            let (h, v) = frame(c, theta);
            h <= hb && v <= vb
        })
        .collect();
    cands.sort_by(|a, b| max_norm(*a).cmp(&max_norm(*b)).then(lattice_order((a[0], a[1]), (b[0], b[1]))));

    let lat = Lattice { surface: k1.surface().clone(), tiling: k1.tiling.clone() };
    let mut searched = 0;
    for c in cands {
        for sigma in spectrum.lattice_connections(c[0], c[1]) {
            searched += 1;
            if k1.edges.iter().any(|e| e.conn.id == sigma.id) {
                continue;
            }
            let se = lat.edge(&sigma)?;
            if !k1.edges.iter().all(|e| lat.disjoint(e, &se)) {
                continue;
            }
            let mut edges = k1.edges.clone();
            edges.push(se);
            let Ok(k) = lat.build(edges) else { continue };
            let lk = s_int::<S>(k.l_raw());
            if !(lk.clone() * lk < rho2p.clone() * rho2p.clone() * s_int::<S>(r1 * r1)) {
                return Err(ComplexError::PostconditionFailed(format!(
                    "L(K′) = {} is not below ρ′₂L(K₁) = {}",
                    k.l_k(),
                    rho2p.as_f64() * r1 as f64 * scale
                )));
            }
            if !is_shrinkable_at(&k, &epsp, bits) {
                return Err(ComplexError::PostconditionFailed(format!(
                    "K′ is not ε′-shrinkable for ε′ = {}",
                    epsp.as_f64()
                )));
            }
            return Ok(Combined {
                complex: k,
                sigma,
                gamma: gamma.conn,
                eps_prime: epsp,
                rho2_prime: rho2p,
                searched,
            });
        }
    }
    Err(ComplexError::NoSigmaFound { searched, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::make_complex;
    use crate::surface::{build_torus, enumerate_saddle_connections};
    use std::sync::Arc;

    #[test]
    fn rejects_small_rho() {
        assert!(CombineParams::new(0.1, 3.0, 4.0).is_err());
        assert!(CombineParams::new(0.1, 3.5, 4.0).is_ok());
    }

    #[test]
    fn torus_pair_becomes_level_two() {
        let s = Arc::new(build_torus());
        let sp = enumerate_saddle_connections(&s, 40.0).unwrap();
        let a = make_complex(&s, &sp.lattice_connections(5, 8)).unwrap();
        let b = make_complex(&s, &sp.lattice_connections(3, 5)).unwrap();
        // |θ(5,8) − θ(3,5)| ≈ 1/(|·||·|) in Euclidean terms.
        let p = CombineParams::new(0.5, 4.0, 4.0).unwrap();
        let out = combine2(&a, &b, &p, &sp).unwrap();
        assert_eq!(out.complex.level(), 2);
        assert!(is_shrinkable_at(&out.complex, &out.eps_prime, DEFAULT_ANGLE_BITS));
    }
}
