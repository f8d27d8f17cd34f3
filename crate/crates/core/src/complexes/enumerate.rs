//! Enumeration of shrinkable complexes from a spectrum.

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;

use super::{
    det, lattice_theta, max_norm, s_int, topologically_equivalent, within_quarter, Complex,
    ComplexError, Edge, Lattice,
};
use crate::scalar::{circle_distance, Real, DEFAULT_ANGLE_BITS};
use crate::surface::spectrum::raw_limit;
use crate::surface::{angle_distance, lattice_order, theta_of, DirectionSpectrum, SaddleConnection};

/// Default cap on the number of complexes one enumeration may produce.
pub const DEFAULT_COMPLEX_CAP: usize = 1_000_000;

/// Every `ε`-shrinkable complex of the given level with `L(K) ≤ lmax`, one
/// per topological class (the one of least `L(K)`).
pub fn enumerate_shrinkable_complexes<S: Real>(
    spectrum: &DirectionSpectrum,
    eps: &S,
    level: usize,
    lmax: f64,
) -> Result<Vec<Complex>, ComplexError> {
    enumerate_with_budget(spectrum, eps, level, lmax, DEFAULT_COMPLEX_CAP)
}

pub fn enumerate_with_budget<S: Real>(
    spectrum: &DirectionSpectrum,
    eps: &S,
    level: usize,
    lmax: f64,
    cap: usize,
) -> Result<Vec<Complex>, ComplexError> {
    let n = spectrum.surface.squares().ok_or_else(|| ComplexError::Unsupported("the surface is not square-tiled".into()))?;
    let k = raw_limit(lmax.min(spectrum.lmax), n);
    let seeds: Vec<SaddleConnection> = spectrum
        .connections()
        .into_iter()
        .filter(|c| c.lattice.is_some_and(|r| max_norm(r) <= k))
        .collect();
    shrinkable_from_seeds(spectrum, eps, level, &seeds, DEFAULT_ANGLE_BITS, cap)
}

/// Shrinkable level-`level` complexes whose longest edge is one of `seeds`.
pub fn shrinkable_from_seeds<S: Real>(
    spectrum: &DirectionSpectrum,
    eps: &S,
    level: usize,
    seeds: &[SaddleConnection],
    bits: u32,
    cap: usize,
) -> Result<Vec<Complex>, ComplexError> {
    if level == 0 {
        return Ok(Vec::new());
    }
    let lat = Lattice::new(spectrum.surface.clone())?;
    let bound = lat.surface.max_level();
    if level > bound {
        return Err(ComplexError::LevelExceeded { level, bound });
    }
    let per_seed: Vec<Vec<Complex>> = seeds
        .par_iter()
        .map(|s| from_seed(&lat, spectrum, eps, level, s, bits, cap))
        .collect::<Result<_, _>>()?;
    let total: usize = per_seed.iter().map(Vec::len).sum();
    if total > cap {
        return Err(ComplexError::BudgetExceeded { cap });
    }
    let mut all: Vec<Complex> = per_seed.into_iter().flatten().collect();
    all.sort_by(|a, b| {
        a.l_raw()
            .cmp(&b.l_raw())
            .then(lattice_order((a.theta_raw()[0], a.theta_raw()[1]), (b.theta_raw()[0], b.theta_raw()[1])))
            .then_with(|| ids(a).cmp(&ids(b)))
    });
    Ok(dedupe(all))
}

fn ids(k: &Complex) -> Vec<crate::surface::ConnId> {
    let mut v: Vec<_> = k.edges.iter().map(|e| e.conn.id.clone()).collect();
    v.sort();
    v
}

/// Keeps the first complex (least `L(K)`) of every topological class.
fn dedupe(sorted: Vec<Complex>) -> Vec<Complex> {
    let mut kept: Vec<Complex> = Vec::with_capacity(sorted.len());
    for k in sorted {
        // Edge-only complexes are distinct whenever their edge sets are.
        if !k.triangles.is_empty()
            && kept
                .iter()
                .any(|c| !c.triangles.is_empty() && c.triangles.len() == k.triangles.len() && topologically_equivalent(c, &k))
        {
            continue;
        }
        kept.push(k);
    }
    kept
}

/// Partner edges may follow the seed in the longest-edge order only.
fn after_seed(c: [i64; 2], c_square: usize, s: [i64; 2], s_square: usize) -> bool {
    let (rc, rs) = (max_norm(c), max_norm(s));
    if rc != rs {
        return rc < rs;
    }
    if c == s {
        return c_square > s_square;
    }
    lattice_order((c[0], c[1]), (s[0], s[1])).is_gt()
}

fn from_seed<S: Real>(
    lat: &Lattice,
    spectrum: &DirectionSpectrum,
    eps: &S,
    level: usize,
    seed: &SaddleConnection,
    bits: u32,
    cap: usize,
) -> Result<Vec<Complex>, ComplexError> {
    let se = lat.edge(seed)?;
    if level == 1 {
        return Ok(vec![lat.build(vec![se])?]);
    }
    let n = lat.n();
    let sr = se.raw;
    let rs = max_norm(sr);
    let eps_f = eps.as_f64();
    let bound_f = eps_f * eps_f * n as f64;
    let bound: S = eps.clone() * eps.clone() * s_int::<S>(n as i64);
    let theta_f = theta_of([sr[0] as f64, sr[1] as f64]);
    let half = (bound_f / rs as f64).min(FRAC_PI_4) * (1.0 + 1e-9) + 1e-15;
    let pi = S::pi_approx(bits);
    let theta_s: S = lattice_theta(sr, bits);
    let mut cands: Vec<Edge> = Vec::new();
    for e in spectrum.window(theta_f, half, 0.0, seed.length()) {
        let Some(c) = e.lattice else { continue };
        let rc = max_norm(c);
        if rc > rs || !within_quarter(c, sr) {
            continue;
        }
        if det(c, sr) != 0 {
            let gf = angle_distance(theta_of([c[0] as f64, c[1] as f64]), theta_f);
            if (gf - 1e-15).max(0.0) * (rc * rs) as f64 > bound_f * (1.0 + 1e-9) {
                continue;
            }
            let g = circle_distance(&lattice_theta::<S>(c, bits), &theta_s, &pi);
            if g * s_int::<S>(rc * rs) > bound {
                continue;
            }
        }
        for conn in spectrum.lattice_connections(c[0], c[1]) {
            let edge = lat.edge(&conn)?;
            if edge.conn.id != se.conn.id && after_seed(c, edge.square, sr, se.square) && lat.disjoint(&se, &edge) {
                cands.push(edge);
            }
        }
    }
    let m = cands.len();
    if m + 1 < level {
        return Ok(Vec::new());
    }
    let mut ok = vec![vec![false; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let d = lat.disjoint(&cands[i], &cands[j]);
            ok[i][j] = d;
            ok[j][i] = d;
        }
    }
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    subsets(&ok, level - 1, 0, &mut chosen, &mut |pick| {
        if out.len() > cap {
            return;
        }
        let mut edges = vec![se.clone()];
        edges.extend(pick.iter().map(|&i| cands[i].clone()));
        out.push(edges);
    });
    if out.len() > cap {
        return Err(ComplexError::BudgetExceeded { cap });
    }
    let mut complexes = Vec::with_capacity(out.len());
    for edges in out {
        complexes.push(lat.build(edges)?);
    }
    Ok(complexes)
}

fn subsets(ok: &[Vec<bool>], need: usize, from: usize, chosen: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if need == 0 {
        f(chosen);
        return;
    }
    for i in from..ok.len() {
        if ok.len() - i < need {
            break;
        }
        if chosen.iter().all(|&j| ok[i][j]) {
            chosen.push(i);
            subsets(ok, need - 1, i + 1, chosen, f);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_torus, enumerate_saddle_connections};
    use std::sync::Arc;

    #[test]
    fn level_one_is_the_spectrum() {
        let s = Arc::new(build_torus());
        let sp = enumerate_saddle_connections(&s, 6.0).unwrap();
        let ks = enumerate_shrinkable_complexes(&sp, &1e-3, 1, 6.0).unwrap();
        assert_eq!(ks.len(), sp.len());
    }

    #[test]
    fn torus_has_no_shrinkable_pairs_for_small_eps() {
        let s = Arc::new(build_torus());
        let sp = enumerate_saddle_connections(&s, 6.0).unwrap();
        assert!(enumerate_shrinkable_complexes(&sp, &0.5, 2, 6.0).unwrap().is_empty());
        // Unimodular neighbours a quarter turn apart: (1,0)(1,1), (1,1)(0,1), (0,1)(−1,1), (−1,1)(1,0).
        let ks = enumerate_shrinkable_complexes(&sp, &1.0, 2, 1.0).unwrap();
        assert_eq!(ks.len(), 4);
    }
}
