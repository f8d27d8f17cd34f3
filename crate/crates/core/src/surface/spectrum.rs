//! Saddle-connection spectra up to a length bound.
//!
//! On lattice surfaces every primitive integer direction carries exactly one
//! saddle connection per square, all with the same holonomy, so the store
//! keeps one record per direction. Small spectra are materialized and sorted
//! exactly by angle; large torus-type spectra stay implicit and are scanned
//! strip by strip.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::origami::SquareTiling;
use super::{angle_distance, polygon, theta_of, ConnId, FlatSurface, Representation, SaddleConnection, SurfaceError, Vec2};
use crate::scalar::{circle_distance, vertical_angle, Rational, Real, Scalar};

/// Default cap on the number of saddle connections in a spectrum.
pub const DEFAULT_ENTRY_CAP: usize = 2_000_000_000;

/// Directions kept in memory at most; beyond this lattice spectra stay implicit.
const MATERIALIZE_LIMIT: usize = 8_000_000;

/// Absolute error bound of double-precision angles and angle distances.
const ANGLE_ERR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Dir {
    h: i32,
    v: i32,
    theta: f64,
}

#[derive(Clone, Debug)]
enum Store {
    Lattice(Vec<Dir>),
    LazyLattice,
    Explicit(Vec<SaddleConnection>),
}

/// One holonomy class of the spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub theta: f64,
    pub length: f64,
    pub hol: Vec2,
    pub lattice: Option<[i64; 2]>,
    /// Number of saddle connections sharing this holonomy.
    pub multiplicity: usize,
}

/// All saddle connections with `|γ| ≤ lmax`, up to sign.
#[derive(Clone, Debug)]
pub struct DirectionSpectrum {
    pub surface: Arc<FlatSurface>,
    pub lmax: f64,
    pub complete: bool,
    tiling: Option<SquareTiling>,
    /// Largest raw max-norm on lattice surfaces.
    raw_limit: i64,
    store: Store,
}

/// `a` before `b` in `θ ∈ [0, π)` for canonical primitive vectors.
pub fn lattice_order(a: (i64, i64), b: (i64, i64)) -> Ordering {
    let group = |(h, v): (i64, i64)| {
        if v == 0 {
            1
        } else if h <= 0 {
            0
        } else {
            2
        }
    };
    let (ga, gb) = (group(a), group(b));
    if ga != gb || ga == 1 {
        return ga.cmp(&gb);
    }
    // −h/v increasing ⇔ h_b v_a < h_a v_b
    (b.0 * a.1).cmp(&(a.0 * b.1))
}

fn is_canonical(h: i64, v: i64) -> bool {
    v > 0 || (v == 0 && h > 0)
}

fn totient_sum(k: i64) -> u64 {
    let k = k.max(0) as usize;
    let mut phi: Vec<u64> = (0..=k as u64).collect();
    for i in 2..=k {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= k {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    phi.iter().skip(1).sum()
}

/// Primitive vectors up to sign with max-norm at most `k`: `4 Σ_{m ≤ k} φ(m)`.
pub fn primitive_count(k: i64) -> u64 {
    4 * totient_sum(k)
}

/// Largest integer `k` with `k² ≤ lmax² · n`.
pub(crate) fn raw_limit(lmax: f64, n: usize) -> i64 {
    let l = Rational::from_f64_lossy(lmax);
    let bound = l.clone() * l * Rational::from_integer(BigInt::from(n));
    let fl = bound.floor().to_integer();
    if fl <= BigInt::zero() {
        return 0;
    }
    fl.sqrt().to_i64().unwrap_or(i64::MAX)
}

/// Canonical primitive `(h, v)` with `max(|h|, |v|) ≤ k` and
/// `|h cos θ + v sin θ| ≤ width`, in no particular order.
fn strip_scan(k: i64, theta: f64, width: f64, mut f: impl FnMut(i64, i64)) {
    let (s, c) = theta.sin_cos();
    let pad = 1e-9 * (1.0 + width);
    let w = width + pad + 1e-12 * k as f64;
    if c.abs() >= s.abs() {
        // Steep strip: few h per v.
        for v in 0..=k {
            let a = (-(v as f64) * s - w) / c;
            let b = (-(v as f64) * s + w) / c;
            let lo = (a.min(b).floor() as i64).max(-k);
            let hi = (a.max(b).ceil() as i64).min(k);
            for h in lo..=hi {
                if is_canonical(h, v) && h.gcd(&v) == 1 {
                    f(h, v);
                }
            }
        }
    } else {
        for h in -k..=k {
            let a = (-(h as f64) * c - w) / s;
            let b = (-(h as f64) * c + w) / s;
            let lo = (a.min(b).floor() as i64).max(0);
            let hi = (a.max(b).ceil() as i64).min(k);
            for v in lo..=hi {
                if is_canonical(h, v) && h.gcd(&v) == 1 {
                    f(h, v);
                }
            }
        }
    }
}

/// Minimum and witness of `max(|h|,|v|)² · d(θ_γ, ψ)` in raw units, with an error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Badness<S> {
    pub value: S,
    pub witness: SaddleConnection,
}

struct Candidate {
    h: i64,
    v: i64,
    lo: f64,
    hi: f64,
}

impl DirectionSpectrum {
    pub fn surface(&self) -> &FlatSurface {
        &self.surface
    }

    pub fn is_lattice(&self) -> bool {
        self.tiling.is_some()
    }

    /// Largest raw integer max-norm on lattice surfaces.
    pub fn raw_limit(&self) -> Option<i64> {
        self.tiling.as_ref().map(|_| self.raw_limit)
    }

    fn squares(&self) -> usize {
        self.tiling.as_ref().map_or(1, |t| t.len())
    }

    fn scale(&self) -> f64 {
        self.surface.scale()
    }

    /// Number of saddle connections.
    pub fn len(&self) -> usize {
        match &self.store {
            Store::Lattice(d) => d.len() * self.squares(),
            Store::LazyLattice => primitive_count(self.raw_limit) as usize * self.squares(),
            Store::Explicit(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of distinct holonomy classes.
    pub fn direction_count(&self) -> usize {
        match &self.store {
            Store::Lattice(d) => d.len(),
            Store::LazyLattice => primitive_count(self.raw_limit) as usize,
            Store::Explicit(v) => v.len(),
        }
    }

    pub fn is_materialized(&self) -> bool {
        !matches!(self.store, Store::LazyLattice)
    }

    fn lattice_entry(&self, h: i64, v: i64) -> Entry {
        let sc = self.scale();
        let hol = [h as f64 * sc, v as f64 * sc];
        Entry {
            theta: theta_of([h as f64, v as f64]),
            length: h.abs().max(v.abs()) as f64 * sc,
            hol,
            lattice: Some([h, v]),
            multiplicity: self.squares(),
        }
    }

    fn explicit_entry(c: &SaddleConnection) -> Entry {
        Entry {
            theta: c.theta(),
            length: c.length(),
            hol: c.hol,
            lattice: c.lattice,
            multiplicity: 1,
        }
    }

    /// Holonomy classes sorted by angle. Implicit spectra are expanded on request.
    pub fn entries(&self) -> Vec<Entry> {
        match &self.store {
            Store::Lattice(d) => d.iter().map(|d| self.lattice_entry(d.h as i64, d.v as i64)).collect(),
            Store::Explicit(v) => v.iter().map(Self::explicit_entry).collect(),
            Store::LazyLattice => {
                let dirs = lattice_dirs(self.raw_limit);
                dirs.iter().map(|d| self.lattice_entry(d.h as i64, d.v as i64)).collect()
            }
        }
    }

    /// The saddle connections with raw lattice holonomy `(h, v)`.
    pub fn lattice_connections(&self, h: i64, v: i64) -> Vec<SaddleConnection> {
        let Some(t) = &self.tiling else {
            return Vec::new();
        };
        let sc = self.scale();
        (0..t.len())
            .map(|s| {
                let (start, end) = if t.len() == 1 {
                    (0, 0)
                } else {
                    (t.start_vertex(s, h), t.end_vertex(s, h, v))
                };
                SaddleConnection {
                    hol: [h as f64 * sc, v as f64 * sc],
                    lattice: Some([h, v]),
                    start,
                    end,
                    id: ConnId::Lattice { square: s, h, v },
                }
            })
            .collect()
    }

    /// Every saddle connection, sorted by angle.
    pub fn connections(&self) -> Vec<SaddleConnection> {
        match &self.store {
            Store::Explicit(v) => v.clone(),
            _ => self
                .entries()
                .iter()
                .flat_map(|e| {
                    let [h, v] = e.lattice.expect("lattice entry");
                    self.lattice_connections(h, v)
                })
                .collect(),
        }
    }

    /// Holonomy classes with `θ` within `half_width` of `center` and length in
    /// `[len_lo, len_hi]`, allowing double-precision slack; callers refine.
    pub fn window(&self, center: f64, half_width: f64, len_lo: f64, len_hi: f64) -> Vec<Entry> {
        let slack = ANGLE_ERR;
        let keep = |e: &Entry| {
            angle_distance(e.theta, center) <= half_width + slack
                && e.length >= len_lo * (1.0 - 1e-12)
                && e.length <= len_hi * (1.0 + 1e-12)
        };
        match &self.store {
            Store::Lattice(d) => d
                .iter()
                .filter(|d| angle_distance(d.theta, center) <= half_width + slack)
                .map(|d| self.lattice_entry(d.h as i64, d.v as i64))
                .filter(keep)
                .collect(),
            Store::Explicit(v) => v.iter().map(Self::explicit_entry).filter(keep).collect(),
            Store::LazyLattice => {
                let k = ((len_hi * (1.0 + 1e-12)) / self.scale()).floor().min(self.raw_limit as f64) as i64;
                let width = std::f64::consts::SQRT_2 * k as f64 * (half_width + slack).min(1.0).sin();
                let mut out = Vec::new();
                // The strip is taken around the line of directions with angle `center`.
                strip_scan(k, center, width, |h, v| {
                    let e = self.lattice_entry(h, v);
                    if keep(&e) {
                        out.push(e);
                    }
                });
                out.sort_by(|a, b| {
                    let [ha, va] = a.lattice.unwrap();
                    let [hb, vb] = b.lattice.unwrap();
                    lattice_order((ha, va), (hb, vb))
                });
                out
            }
        }
    }

    /// Calls `f` with candidate entries for the minimum of `raw · weight`,
    /// where `raw` is an under- and over-estimate pair for each entry.
    fn badness_candidates(&self, psi: f64) -> Vec<Candidate> {
        let eval = |h: i64, v: i64| -> Candidate {
            let th = theta_of([h as f64, v as f64]);
            let d = angle_distance(th, psi);
            let l2 = (h.abs().max(v.abs()) as f64).powi(2);
            Candidate {
                h,
                v,
                lo: l2 * (d - ANGLE_ERR).max(0.0),
                hi: l2 * (d + ANGLE_ERR),
            }
        };
        let collect = |all: Vec<Candidate>| {
            let min_hi = all.iter().map(|c| c.hi).fold(f64::INFINITY, f64::min);
            all.into_iter().filter(|c| c.lo <= min_hi).collect::<Vec<_>>()
        };
        match &self.store {
            Store::Lattice(d) => {
                let all: Vec<Candidate> = d.par_iter().map(|d| eval(d.h as i64, d.v as i64)).collect();
                collect(all)
            }
            Store::LazyLattice => {
                // f ≥ |γ|∞² sin d ≥ |h_ψ| / √2 with |γ|∞ ≥ 1, so the minimum lies
                // in the strip |h_ψ| ≤ √2 · f_min around the ψ line.
                let mut width = 1.0;
                loop {
                    let mut all = Vec::new();
                    strip_scan(self.raw_limit, psi, width, |h, v| all.push(eval(h, v)));
                    let best = all.iter().map(|c| c.hi).fold(f64::INFINITY, f64::min);
                    let need = std::f64::consts::SQRT_2 * best * (1.0 + 1e-9);
                    if need <= width || width > 4.0 * self.raw_limit as f64 {
                        return collect(all);
                    }
                    width = need;
                }
            }
            Store::Explicit(_) => Vec::new(),
        }
    }

    /// Minimum over entries of `|γ|²·d(θ_γ, ψ)` in double precision.
    pub fn badness(&self, psi: f64) -> Option<Badness<f64>> {
        if let Store::Explicit(v) = &self.store {
            let best = v
                .iter()
                .map(|c| (c.length().powi(2) * angle_distance(c.theta(), psi), c))
                .min_by(|a, b| a.0.total_cmp(&b.0))?;
            return Some(Badness {
                value: best.0,
                witness: best.1.clone(),
            });
        }
        let n = self.squares() as f64;
        let cands = self.badness_candidates(psi);
        let best = cands
            .iter()
            .map(|c| {
                let th = theta_of([c.h as f64, c.v as f64]);
                let l2 = (c.h.abs().max(c.v.abs()) as f64).powi(2);
                (l2 * angle_distance(th, psi) / n, c)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(lattice_order((a.1.h, a.1.v), (b.1.h, b.1.v))))?;
        Some(Badness {
            value: best.0,
            witness: self.lattice_connections(best.1.h, best.1.v).remove(0),
        })
    }

    /// `|γ|²·d(θ_γ, ψ)` evaluated with `bits` of precision on lattice
    /// surfaces. The angle metric uses the circle `ℝ / π̃ℤ` with `π̃` the
    /// `bits`-bit approximation of `π`.
    pub fn badness_exact(&self, psi: &Rational, bits: u32) -> Result<Badness<Rational>, SurfaceError> {
        if !self.is_lattice() {
            return Err(SurfaceError::UnsupportedSurface("exact badness needs a lattice surface".into()));
        }
        let pi = Rational::pi_approx(bits);
        let n = Rational::from_integer(BigInt::from(self.squares()));
        let cands = self.badness_candidates(psi.as_f64());
        let evals: Vec<(Rational, i64, i64)> = cands
            .par_iter()
            .map(|c| (lattice_badness_exact(c.h, c.v, psi, &pi, bits) / n.clone(), c.h, c.v))
            .collect();
        let best = evals
            .into_iter()
            .min_by(|a, b| a.0.cmp(&b.0).then(lattice_order((a.1, a.2), (b.1, b.2))))
            .ok_or(SurfaceError::UnsupportedSurface("empty spectrum".into()))?;
        Ok(Badness {
            value: best.0,
            witness: self.lattice_connections(best.1, best.2).remove(0),
        })
    }

    /// Minimum flowed length `max(e^t h_θ, e^{−t} v_θ)` over the spectrum.
    pub fn min_flowed(&self, theta: f64, t: f64) -> Option<(f64, SaddleConnection)> {
        let (s, c) = theta.sin_cos();
        let (et, emt) = (t.exp(), (-t).exp());
        let flowed = |hol: Vec2| {
            let h = c * hol[0] + s * hol[1];
            let v = -s * hol[0] + c * hol[1];
            (et * h.abs()).max(emt * v.abs())
        };
        match &self.store {
            Store::Explicit(v) => v
                .iter()
                .map(|x| (flowed(x.hol), x))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(m, x)| (m, x.clone())),
            Store::Lattice(d) => {
                let sc = self.scale();
                let best = d
                    .par_iter()
                    .map(|d| (flowed([d.h as f64 * sc, d.v as f64 * sc]), *d))
                    .min_by(|a, b| a.0.total_cmp(&b.0).then(lattice_order((a.1.h as i64, a.1.v as i64), (b.1.h as i64, b.1.v as i64))))?;
                Some((best.0, self.lattice_connections(best.1.h as i64, best.1.v as i64).remove(0)))
            }
            Store::LazyLattice => {
                let sc = self.scale();
                // flowed < m forces |h_θ| < m e^{−t} in raw units.
                let mut width = 1.0;
                loop {
                    let mut best: Option<(f64, i64, i64)> = None;
                    strip_scan(self.raw_limit, theta, width, |h, v| {
                        let m = flowed([h as f64 * sc, v as f64 * sc]);
                        if best.is_none_or(|b| m < b.0 || (m == b.0 && lattice_order((h, v), (b.1, b.2)).is_lt())) {
                            best = Some((m, h, v));
                        }
                    });
                    let (m, h, v) = best?;
                    let need = m / sc * emt * (1.0 + 1e-9);
                    if need <= width || width > 4.0 * self.raw_limit as f64 {
                        return Some((m, self.lattice_connections(h, v).remove(0)));
                    }
                    width = need;
                }
            }
        }
    }

    /// Shortest saddle connection.
    pub fn systole(&self) -> Option<f64> {
        self.min_flowed(0.0, 0.0).map(|x| x.0)
    }
}

/// `max(|h|,|v|)² · d(θ_γ, ψ)` at `bits` of precision.
pub fn lattice_badness_exact(h: i64, v: i64, psi: &Rational, pi: &Rational, bits: u32) -> Rational {
    let th = vertical_angle(&Rational::from_integer(h.into()), &Rational::from_integer(v.into()), bits);
    let d = circle_distance(&th, psi, pi);
    let l = h.abs().max(v.abs());
    d * Rational::from_integer(BigInt::from(l) * BigInt::from(l))
}

/// Canonical primitive directions with max-norm at most `k`, sorted by angle.
fn lattice_dirs(k: i64) -> Vec<Dir> {
    let mut dirs: Vec<Dir> = (0..=k)
        .into_par_iter()
        .flat_map_iter(|v| {
            (-k..=k).filter(move |&h| is_canonical(h, v) && h.gcd(&v) == 1).map(move |h| Dir {
                h: h as i32,
                v: v as i32,
                theta: theta_of([h as f64, v as f64]),
            })
        })
        .collect();
    dirs.par_sort_by(|a, b| lattice_order((a.h as i64, a.v as i64), (b.h as i64, b.v as i64)));
    dirs
}

/// Complete spectrum with `|γ| ≤ lmax` (lengths after normalization).
pub fn enumerate_saddle_connections(surface: &FlatSurface, lmax: f64) -> Result<DirectionSpectrum, SurfaceError> {
    enumerate_with_cap(surface, lmax, DEFAULT_ENTRY_CAP)
}

pub fn enumerate_with_cap(surface: &FlatSurface, lmax: f64, cap: usize) -> Result<DirectionSpectrum, SurfaceError> {
    let arc = Arc::new(surface.clone());
    if let Some(tiling) = SquareTiling::of(surface) {
        let n = tiling.len();
        let k = raw_limit(lmax, n);
        if k > i32::MAX as i64 / 2 {
            return Err(SurfaceError::BudgetExceeded { cap });
        }
        let count = primitive_count(k) as u128 * n as u128;
        if count > cap as u128 {
            return Err(SurfaceError::BudgetExceeded { cap });
        }
        let store = if (count as usize) <= MATERIALIZE_LIMIT {
            Store::Lattice(lattice_dirs(k))
        } else {
            Store::LazyLattice
        };
        return Ok(DirectionSpectrum {
            surface: arc,
            lmax,
            complete: true,
            tiling: Some(tiling),
            raw_limit: k,
            store,
        });
    }
    let Representation::UnfoldedPolygon(u) = &surface.representation else {
        unreachable!("non-lattice surfaces are unfoldings");
    };
    let mut conns = polygon::enumerate(u, surface.scale(), lmax, cap)?;
    conns.sort_by(|a, b| {
        a.theta()
            .total_cmp(&b.theta())
            .then(a.length().total_cmp(&b.length()))
            .then(a.id.cmp(&b.id))
    });
    Ok(DirectionSpectrum {
        surface: arc,
        lmax,
        complete: true,
        tiling: None,
        raw_limit: 0,
        store: Store::Explicit(conns),
    })
}

/// Free-function form of [`DirectionSpectrum::badness`].
pub fn badness(psi: f64, spectrum: &DirectionSpectrum) -> Option<Badness<f64>> {
    spectrum.badness(psi)
}

/// Free-function form of [`DirectionSpectrum::badness_exact`].
pub fn badness_exact(psi: &Rational, spectrum: &DirectionSpectrum, bits: u32) -> Result<Badness<Rational>, SurfaceError> {
    spectrum.badness_exact(psi, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_torus;

    #[test]
    fn torus_small_spectra() {
        let t = build_torus();
        let s = enumerate_saddle_connections(&t, 1.0).unwrap();
        let hols: Vec<[i64; 2]> = s.entries().iter().map(|e| e.lattice.unwrap()).collect();
        assert_eq!(hols, vec![[0, 1], [-1, 1], [1, 0], [1, 1]]);
        let s2 = enumerate_saddle_connections(&t, 2.0).unwrap();
        assert_eq!(s2.len(), 8);
    }

    #[test]
    fn order_is_by_angle() {
        let s = enumerate_saddle_connections(&build_torus(), 12.0).unwrap();
        let th: Vec<f64> = s.entries().iter().map(|e| e.theta).collect();
        assert!(th.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.len() as u64, primitive_count(12));
    }

    #[test]
    fn lazy_store_agrees_with_materialized() {
        let t = build_torus();
        let full = enumerate_saddle_connections(&t, 200.0).unwrap();
        let mut lazy = full.clone();
        lazy.store = Store::LazyLattice;
        for psi in [0.3, 1.1, 1.57, 2.9, 0.0] {
            let a = full.badness(psi).unwrap();
            let b = lazy.badness(psi).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.witness, b.witness);
            for tt in [0.0, 1.0, 3.0] {
                let x = full.min_flowed(psi, tt).unwrap();
                let y = lazy.min_flowed(psi, tt).unwrap();
                assert_eq!(x.0, y.0);
            }
            let w = full.window(psi, 0.01, 5.0, 150.0);
            let w2 = lazy.window(psi, 0.01, 5.0, 150.0);
            assert_eq!(w, w2);
        }
    }

    #[test]
    fn badness_vanishes_on_spectrum_direction() {
        let s = enumerate_saddle_connections(&build_torus(), 10.0).unwrap();
        let e = &s.entries()[17];
        let b = s.badness(e.theta).unwrap();
        assert_eq!(b.value, 0.0);
        assert_eq!(b.witness.lattice, e.lattice);
        let [h, v] = e.lattice.unwrap();
        let bits = 256;
        let psi = vertical_angle(&Rational::from_integer(h.into()), &Rational::from_integer(v.into()), bits);
        let x = s.badness_exact(&psi, bits).unwrap();
        assert!(x.value.is_zero());
    }

    #[test]
    fn raw_limit_is_exact() {
        assert_eq!(raw_limit(1.0, 1), 1);
        assert_eq!(raw_limit(2.0, 3), 3);
        assert_eq!(raw_limit(0.5, 1), 0);
    }
}
