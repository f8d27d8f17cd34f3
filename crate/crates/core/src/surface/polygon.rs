//! Unfolding of rational polygons into translation surfaces.
//!
//! Edge directions are indices `m ∈ ℤ/2N` (angle `mπ/N`). The group
//! generated by the edge reflections acts on them by `m ↦ ±m + r`; one
//! reflected copy of the polygon is placed per group element and edge `i`
//! of copy `g` is glued by translation to edge `i` of copy `g ρ_i`.
//!
//! Saddle connections are found by exploring visibility wedges from every
//! triangle corner of a triangulation of the copies.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{ConnId, SaddleConnection, SurfaceError, Vec2};
use crate::scalar::{Rational, Real, Scalar};

const MAX_DENOMINATOR: i64 = 1000;
const MAX_COPIES: usize = 4000;
const GUARD: f64 = 1e-9;
const HP_BITS: u32 = 256;

/// Group element `m ↦ (flip ? −m : m) + r (mod 2N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dihedral {
    pub flip: bool,
    pub r: usize,
}

impl Dihedral {
    fn act(self, m: usize, two_n: usize) -> usize {
        let base = if self.flip { (two_n - m % two_n) % two_n } else { m % two_n };
        (base + self.r) % two_n
    }

    /// `self ∘ other`.
    fn compose(self, other: Dihedral, two_n: usize) -> Dihedral {
        let r = if self.flip {
            (self.r + two_n - other.r % two_n) % two_n
        } else {
            (self.r + other.r) % two_n
        };
        Dihedral {
            flip: self.flip ^ other.flip,
            r,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    /// Marked point at each corner.
    pub corners: [usize; 3],
    /// Edge `k` runs from corner `k` to corner `k + 1`.
    pub edges: [Vec2; 3],
    /// Edge holonomy in the basis `(polygon edge i, direction m mod N)`.
    pub coef: [Vec<i32>; 3],
    /// Triangle and edge glued to edge `k`.
    pub neighbor: [(usize, usize); 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Unfolding {
    /// Vertex angles as `p/q` multiples of `π`.
    pub angles: Vec<(i64, i64)>,
    pub lengths: Vec<f64>,
    pub n: usize,
    pub directions: Vec<usize>,
    pub group: Vec<Dihedral>,
    pub copies: usize,
    pub triangles: Vec<Triangle>,
}

fn recognize(a: f64) -> Result<(i64, i64), SurfaceError> {
    if !a.is_finite() {
        return Err(SurfaceError::IrrationalAngle(a));
    }
    for q in 1..=MAX_DENOMINATOR {
        let p = (a * q as f64).round();
        if (a - p / q as f64).abs() <= 1e-12 * a.abs().max(1.0) {
            let p = p as i64;
            let g = p.gcd(&q);
            return Ok((p / g, q / g));
        }
    }
    Err(SurfaceError::IrrationalAngle(a))
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

fn unit_table(n: usize) -> Vec<Vec2> {
    let mut u = Vec::with_capacity(2 * n);
    for m in 0..n {
        let v = if m == 0 {
            [1.0, 0.0]
        } else if 2 * m == n {
            [0.0, 1.0]
        } else {
            let t = std::f64::consts::PI * m as f64 / n as f64;
            [t.cos(), t.sin()]
        };
        u.push(v);
    }
    for m in 0..n {
        u.push([-u[m][0], -u[m][1]]);
    }
    u
}

fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o = |p: Vec2, q: Vec2, r: Vec2| cross(sub(q, p), sub(r, p));
    let (d1, d2, d3, d4) = (o(a, b, c), o(a, b, d), o(c, d, a), o(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Ear clipping of a counterclockwise simple polygon.
fn ear_clip(pts: &[Vec2]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let k = idx.len();
        let mut clipped = false;
        for i in 0..k {
            let (a, b, c) = (idx[(i + k - 1) % k], idx[i], idx[(i + 1) % k]);
            let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
            if cross(sub(pb, pa), sub(pc, pb)) <= 0.0 {
                continue;
            }
            let inside = idx.iter().any(|&j| {
                if j == a || j == b || j == c {
                    return false;
                }
                let p = pts[j];
                cross(sub(pb, pa), sub(p, pa)) >= 0.0
                    && cross(sub(pc, pb), sub(p, pb)) >= 0.0
                    && cross(sub(pa, pc), sub(p, pc)) >= 0.0
            });
            if inside {
                continue;
            }
            out.push([a, b, c]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        out.push([idx[0], idx[1], idx[2]]);
    }
    out
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let nx = self.0[y];
            self.0[y] = r;
            y = nx;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Unfolds the polygon with vertex angles `angles[i]·π`.
///
/// Edge `i` joins vertex `i` to vertex `i+1`; the angle at vertex `i` sits
/// between edges `i−1` and `i`. Either all `k` edge lengths are given, or the
/// first `k − 2`, in which case the last two are fixed by closing the polygon.
///
/// Returns the surface (genus, cone angles and raw area) and its combinatorics.
pub fn unfold_polygon(angles: &[f64], lengths: &[f64]) -> Result<super::FlatSurface, SurfaceError> {
    let k = angles.len();
    if k < 3 {
        return Err(SurfaceError::InvalidPolygon("need at least three vertices".into()));
    }
    let rat: Vec<(i64, i64)> = angles.iter().map(|&a| recognize(a)).collect::<Result<_, _>>()?;
    for &(p, q) in &rat {
        if p <= 0 || p >= 2 * q || p == q {
            return Err(SurfaceError::InvalidPolygon(format!("vertex angle {p}/{q}·π out of range")));
        }
    }
    let n = rat.iter().fold(1i64, |acc, &(_, q)| acc.lcm(&q)) as usize;
    let two_n = 2 * n;
    // Σ angles = (k − 2)π, i.e. Σ p_i N / q_i = (k − 2) N.
    let total: i64 = rat.iter().map(|&(p, q)| p * n as i64 / q).sum();
    if total != (k as i64 - 2) * n as i64 {
        return Err(SurfaceError::InvalidPolygon("angles do not sum to (k−2)π".into()));
    }
    let mut directions = vec![0usize; k];
    for i in 1..k {
        let (p, q) = rat[i];
        let turn = (n as i64 - p * n as i64 / q).rem_euclid(two_n as i64) as usize;
        directions[i] = (directions[i - 1] + turn) % two_n;
    }
    let u = unit_table(n);
    let lengths = close_polygon(&u, &directions, lengths)?;

    let base: Vec<Vec2> = polygon_points(&u, &directions, &lengths, Dihedral { flip: false, r: 0 }, two_n);
    check_simple(&base)?;

    // Group closure under right multiplication by the edge reflections.
    let gens: Vec<Dihedral> = directions
        .iter()
        .map(|&m| Dihedral {
            flip: true,
            r: (2 * m) % two_n,
        })
        .collect();
    let id = Dihedral { flip: false, r: 0 };
    let mut group = vec![id];
    let mut index: HashMap<Dihedral, usize> = HashMap::from([(id, 0)]);
    let mut head = 0;
    while head < group.len() {
        let g = group[head];
        head += 1;
        for &s in &gens {
            let h = g.compose(s, two_n);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(h) {
                e.insert(group.len());
                group.push(h);
                if group.len() > MAX_COPIES {
                    return Err(SurfaceError::BudgetExceeded { cap: MAX_COPIES });
                }
            }
        }
    }
    let copies = group.len();
    let neighbor_copy = |g: usize, i: usize| index[&group[g].compose(gens[i], two_n)];

    // Marked points: vertex j of copy g is glued to vertex j of g ρ_i along edges i.
    let mut dsu = Dsu((0..copies * k).collect());
    for g in 0..copies {
        for i in 0..k {
            let h = neighbor_copy(g, i);
            dsu.union(g * k + i, h * k + i);
            dsu.union(g * k + (i + 1) % k, h * k + (i + 1) % k);
        }
    }
    let mut point_of = vec![usize::MAX; copies * k];
    let mut members: Vec<(usize, usize)> = Vec::new();
    let mut root_id: HashMap<usize, usize> = HashMap::new();
    for x in 0..copies * k {
        let r = dsu.find(x);
        let next = root_id.len();
        let id = *root_id.entry(r).or_insert(next);
        if id == members.len() {
            members.push((x % k, 0));
        }
        members[id].1 += 1;
        point_of[x] = id;
    }
    let mut cone_angles = Vec::with_capacity(members.len());
    for &(j, count) in &members {
        let (p, q) = rat[j];
        let twice = count as i64 * p;
        if twice % (2 * q) != 0 {
            return Err(SurfaceError::InvalidPolygon("cone angle is not a multiple of 2π".into()));
        }
        cone_angles.push((twice / (2 * q)) as usize);
    }

    // Triangulate every copy.
    let dim = k * n;
    let mut triangles: Vec<Triangle> = Vec::new();
    let mut edge_slot: HashMap<(usize, usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for (g, &elt) in group.iter().enumerate() {
        let pts = polygon_points(&u, &directions, &lengths, elt, two_n);
        let mut ecoef: Vec<Vec<i32>> = vec![vec![0; dim]; k];
        for (i, c) in ecoef.iter_mut().enumerate() {
            let dir = elt.act(directions[i], two_n);
            if dir < n {
                c[i * n + dir] += 1;
            } else {
                c[i * n + dir - n] -= 1;
            }
        }
        // Polygon edges are single basis vectors; a diagonal a → b with a < b
        // is the sum of the polygon edges a, …, b − 1.
        let edge_coef = |a: usize, b: usize| -> Vec<i32> {
            let (lo, hi) = (a.min(b), a.max(b));
            let mut c = vec![0; dim];
            if lo == 0 && hi == k - 1 {
                c.clone_from(&ecoef[k - 1]);
            } else {
                for e in &ecoef[lo..hi] {
                    for (x, y) in c.iter_mut().zip(e) {
                        *x += y;
                    }
                }
            }
            let forward = a < b && !(lo == 0 && hi == k - 1) || (a == k - 1 && b == 0);
            if !forward {
                c.iter_mut().for_each(|x| *x = -*x);
            }
            c
        };
        let order: Vec<usize> = if elt.flip { (0..k).rev().collect() } else { (0..k).collect() };
        let ordered: Vec<Vec2> = order.iter().map(|&j| pts[j]).collect();
        let tris = ear_clip(&ordered);
        if tris.len() != k - 2 {
            return Err(SurfaceError::InvalidPolygon("triangulation failed".into()));
        }
        for t in tris {
            let js = [order[t[0]], order[t[1]], order[t[2]]];
            let ti = triangles.len();
            let mut edges = [[0.0; 2]; 3];
            let mut coef: [Vec<i32>; 3] = Default::default();
            for e in 0..3 {
                let (a, b) = (js[e], js[(e + 1) % 3]);
                edges[e] = sub(pts[b], pts[a]);
                coef[e] = edge_coef(a, b);
                edge_slot.entry((g, a.min(b), a.max(b))).or_default().push((ti, e));
            }
            triangles.push(Triangle {
                corners: [point_of[g * k + js[0]], point_of[g * k + js[1]], point_of[g * k + js[2]]],
                edges,
                coef,
                neighbor: [(usize::MAX, 0); 3],
            });
        }
    }
    let polygon_edge = |a: usize, b: usize| -> Option<usize> {
        let (a, b) = (a.min(b), a.max(b));
        if b == a + 1 {
            Some(a)
        } else if a == 0 && b == k - 1 {
            Some(k - 1)
        } else {
            None
        }
    };
    for ((g, a, b), slots) in &edge_slot {
        match polygon_edge(*a, *b) {
            Some(i) => {
                let h = neighbor_copy(*g, i);
                let other = &edge_slot[&(h, *a, *b)];
                let (t, e) = slots[0];
                triangles[t].neighbor[e] = other[0];
            }
            None => {
                let (t0, e0) = slots[0];
                let (t1, e1) = slots[1];
                triangles[t0].neighbor[e0] = (t1, e1);
                triangles[t1].neighbor[e1] = (t0, e0);
            }
        }
    }
    let faces = triangles.len() as i64;
    let chi = cone_angles.len() as i64 - faces / 2;
    let genus = ((2 - chi) / 2) as usize;
    let area = polygon_area(&base) * copies as f64;
    let unfolding = Unfolding {
        angles: rat,
        lengths,
        n,
        directions,
        group,
        copies,
        triangles,
    };
    Ok(super::FlatSurface {
        representation: super::Representation::UnfoldedPolygon(Box::new(unfolding)),
        genus,
        cone_angles,
        raw_area: area,
    })
}

fn polygon_points(u: &[Vec2], dirs: &[usize], lengths: &[f64], g: Dihedral, two_n: usize) -> Vec<Vec2> {
    let mut pts = vec![[0.0, 0.0]];
    for i in 0..dirs.len() - 1 {
        let d = u[g.act(dirs[i], two_n)];
        let last = *pts.last().unwrap();
        pts.push([last[0] + lengths[i] * d[0], last[1] + lengths[i] * d[1]]);
    }
    pts
}

fn polygon_area(pts: &[Vec2]) -> f64 {
    let k = pts.len();
    (0..k).map(|i| cross(pts[i], pts[(i + 1) % k])).sum::<f64>() / 2.0
}

fn close_polygon(u: &[Vec2], dirs: &[usize], lengths: &[f64]) -> Result<Vec<f64>, SurfaceError> {
    let k = dirs.len();
    if lengths.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
        return Err(SurfaceError::InvalidPolygon("edge lengths must be positive".into()));
    }
    let mut s = [0.0, 0.0];
    for i in 0..lengths.len().min(k) {
        s = add(s, [lengths[i] * u[dirs[i]][0], lengths[i] * u[dirs[i]][1]]);
    }
    if lengths.len() == k {
        let scale = lengths.iter().cloned().fold(0.0, f64::max);
        if norm(s) > 1e-9 * scale {
            return Err(SurfaceError::InvalidPolygon("edges do not close up".into()));
        }
        return Ok(lengths.to_vec());
    }
    if lengths.len() != k - 2 {
        return Err(SurfaceError::InvalidPolygon(format!("give {} or {k} edge lengths", k - 2)));
    }
    let (a, b) = (u[dirs[k - 2]], u[dirs[k - 1]]);
    let det = cross(a, b);
    if det.abs() < 1e-12 {
        return Err(SurfaceError::InvalidPolygon("last two edges are parallel".into()));
    }
    let rhs = [-s[0], -s[1]];
    let la = cross(rhs, b) / det;
    let lb = cross(a, rhs) / det;
    if la <= 0.0 || lb <= 0.0 {
        return Err(SurfaceError::InvalidPolygon("no positive closing lengths".into()));
    }
    let mut out = lengths.to_vec();
    out.push(la);
    out.push(lb);
    Ok(out)
}

fn check_simple(pts: &[Vec2]) -> Result<(), SurfaceError> {
    let k = pts.len();
    if polygon_area(pts) <= 0.0 {
        return Err(SurfaceError::InvalidPolygon("vertices are not counterclockwise".into()));
    }
    for i in 0..k {
        for j in i + 2..k {
            if i == 0 && j == k - 1 {
                continue;
            }
            if segments_cross(pts[i], pts[(i + 1) % k], pts[j], pts[(j + 1) % k]) {
                return Err(SurfaceError::InvalidPolygon("edges cross".into()));
            }
        }
    }
    Ok(())
}

/// High-precision edge data for re-checking connections near the bound.
struct Precise {
    cos: Vec<Rational>,
    sin: Vec<Rational>,
    lengths: Vec<Rational>,
    n: usize,
    area: Rational,
}

impl Precise {
    fn new(u: &Unfolding) -> Self {
        let n = u.n;
        let pi = Rational::pi_approx(HP_BITS);
        let mut cos = Vec::with_capacity(2 * n);
        let mut sin = Vec::with_capacity(2 * n);
        for m in 0..2 * n {
            let t = pi.clone() * Rational::from_ratio(m as i64, n as i64);
            let (s, c) = t.sin_cos_approx(HP_BITS);
            sin.push(s);
            cos.push(c);
        }
        let k = u.directions.len();
        let mut lengths: Vec<Rational> = u.lengths.iter().map(|&l| Rational::from_f64_lossy(l)).collect();
        // Re-solve the closing lengths at high precision.
        let (mut sx, mut sy) = (Rational::zero(), Rational::zero());
        for i in 0..k - 2 {
            sx += lengths[i].clone() * cos[u.directions[i]].clone();
            sy += lengths[i].clone() * sin[u.directions[i]].clone();
        }
        let (a, b) = (u.directions[k - 2], u.directions[k - 1]);
        let det = cos[a].clone() * sin[b].clone() - sin[a].clone() * cos[b].clone();
        let la = (-sx.clone() * sin[b].clone() + sy.clone() * cos[b].clone()) / det.clone();
        let lb = (cos[a].clone() * -sy + sin[a].clone() * sx) / det;
        lengths[k - 2] = la;
        lengths[k - 1] = lb;
        let mut pts = vec![(Rational::zero(), Rational::zero())];
        for i in 0..k - 1 {
            let (x, y) = pts.last().unwrap().clone();
            let d = u.directions[i];
            pts.push((x + lengths[i].clone() * cos[d].clone(), y + lengths[i].clone() * sin[d].clone()));
        }
        let mut twice = Rational::zero();
        for i in 0..k {
            let (x0, y0) = &pts[i];
            let (x1, y1) = &pts[(i + 1) % k];
            twice += x0.clone() * y1.clone() - x1.clone() * y0.clone();
        }
        let area = twice / Rational::from_integer(BigInt::from(2)) * Rational::from_integer(BigInt::from(u.copies));
        Precise {
            cos,
            sin,
            lengths,
            n,
            area,
        }
    }

    /// `max(|x|, |y|)² ≤ lmax² · area` for the holonomy with coefficients `coef`.
    fn within(&self, coef: &[i32], lmax: f64) -> bool {
        let (mut x, mut y) = (Rational::zero(), Rational::zero());
        for (idx, &c) in coef.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (i, m) = (idx / self.n, idx % self.n);
            let w = self.lengths[i].clone() * Rational::from_integer(BigInt::from(c));
            x += w.clone() * self.cos[m].clone();
            y += w * self.sin[m].clone();
        }
        let mx = if x.abs() > y.abs() { x.abs() } else { y.abs() };
        let l = Rational::from_f64_lossy(lmax);
        let bound = l.clone() * l * self.area.clone();
        // Connections exactly on the bound cannot be told apart from rounding.
        let slack = (bound.clone() + Rational::one()) / Rational::from_integer(BigInt::from(1) << (HP_BITS - 40) as usize);
        mx.clone() * mx <= bound + slack
    }
}

fn canonical(w: Vec2) -> bool {
    let tol = 1e-9 * norm(w);
    w[1] > tol || (w[1].abs() <= tol && w[0] > 0.0)
}

fn max_norm(w: Vec2) -> f64 {
    w[0].abs().max(w[1].abs())
}

fn seg_distance(a: Vec2, b: Vec2) -> f64 {
    let d = sub(b, a);
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (-(a[0] * d[0] + a[1] * d[1]) / len2).clamp(0.0, 1.0)
    };
    norm([a[0] + t * d[0], a[1] + t * d[1]])
}

struct Search<'a> {
    u: &'a Unfolding,
    raw_limit: f64,
    reach: f64,
    lmax: f64,
    cap: usize,
    precise: &'a std::sync::OnceLock<Precise>,
}

struct Hit {
    hol: Vec2,
    coef: Vec<i32>,
    end: usize,
}

impl Search<'_> {
    fn accept(&self, w: Vec2, coef: &[i32]) -> bool {
        let m = max_norm(w);
        let margin = GUARD * self.raw_limit.max(1.0);
        if m < self.raw_limit - margin {
            true
        } else if m > self.raw_limit + margin {
            false
        } else {
            self.precise.get_or_init(|| Precise::new(self.u)).within(coef, self.lmax)
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn explore(
        &self,
        t: usize,
        e: usize,
        left: (Vec2, &[i32]),
        right: (Vec2, &[i32]),
        wr: Vec2,
        wl: Vec2,
        hits: &mut Vec<Hit>,
        budget: &mut usize,
    ) -> Result<(), SurfaceError> {
        if seg_distance(left.0, right.0) > self.reach {
            return Ok(());
        }
        if *budget == 0 {
            return Err(SurfaceError::BudgetExceeded { cap: self.cap });
        }
        *budget -= 1;
        let tri = &self.u.triangles[t];
        let e1 = (e + 1) % 3;
        let e2 = (e + 2) % 3;
        let c = add(right.0, tri.edges[e1]);
        let ccoef: Vec<i32> = right.1.iter().zip(&tri.coef[e1]).map(|(a, b)| a + b).collect();
        let nc = norm(c);
        let cr = cross(wr, c);
        let cl = cross(c, wl);
        let tol_r = 1e-12 * norm(wr) * nc;
        let tol_l = 1e-12 * norm(wl) * nc;
        let (tr, er) = tri.neighbor[e1];
        let (tl, el) = tri.neighbor[e2];
        if cr > tol_r && cl > tol_l {
            if canonical(c) && self.accept(c, &ccoef) {
                hits.push(Hit {
                    hol: c,
                    coef: ccoef.clone(),
                    end: tri.corners[e2],
                });
            }
            self.explore(tr, er, (c, &ccoef), right, wr, c, hits, budget)?;
            self.explore(tl, el, left, (c, &ccoef), c, wl, hits, budget)?;
        } else if cr <= tol_r {
            self.explore(tl, el, left, (c, &ccoef), wr, wl, hits, budget)?;
        } else {
            self.explore(tr, er, (c, &ccoef), right, wr, wl, hits, budget)?;
        }
        Ok(())
    }
}

/// All saddle connections of the unfolding with normalized max-norm at most `lmax`.
pub fn enumerate(u: &Unfolding, scale: f64, lmax: f64, cap: usize) -> Result<Vec<SaddleConnection>, SurfaceError> {
    let raw_limit = lmax / scale;
    let precise = std::sync::OnceLock::new();
    let search = Search {
        u,
        raw_limit,
        reach: raw_limit * std::f64::consts::SQRT_2 * (1.0 + 1e-9) + 1e-9,
        lmax,
        cap,
        precise: &precise,
    };
    let mut out = Vec::new();
    for (t, tri) in u.triangles.iter().enumerate() {
        for e in 0..3 {
            let w = tri.edges[e];
            if canonical(w) && search.accept(w, &tri.coef[e]) {
                out.push(SaddleConnection {
                    hol: [w[0] * scale, w[1] * scale],
                    lattice: None,
                    start: tri.corners[e],
                    end: tri.corners[(e + 1) % 3],
                    id: ConnId::Polygon {
                        triangle: t,
                        corner: e,
                        coef: tri.coef[e].clone(),
                    },
                });
            }
        }
    }
    let starts: Vec<(usize, usize)> = (0..u.triangles.len()).flat_map(|t| (0..3).map(move |c| (t, c))).collect();
    let per_corner: Vec<Result<Vec<SaddleConnection>, SurfaceError>> = starts
        .par_iter()
        .map(|&(t, c)| {
            let tri = &u.triangles[t];
            let a = tri.edges[c];
            let ca = tri.coef[c].clone();
            let c2 = (c + 2) % 3;
            let b = [-tri.edges[c2][0], -tri.edges[c2][1]];
            let cb: Vec<i32> = tri.coef[c2].iter().map(|x| -x).collect();
            let (tn, en) = tri.neighbor[(c + 1) % 3];
            let mut hits = Vec::new();
            let mut budget = cap.saturating_mul(64).max(1 << 20);
            search.explore(tn, en, (b, &cb), (a, &ca), a, b, &mut hits, &mut budget)?;
            Ok(hits
                .into_iter()
                .map(|h| SaddleConnection {
                    hol: [h.hol[0] * scale, h.hol[1] * scale],
                    lattice: None,
                    start: tri.corners[c],
                    end: h.end,
                    id: ConnId::Polygon {
                        triangle: t,
                        corner: c,
                        coef: h.coef,
                    },
                })
                .collect())
        })
        .collect();
    for r in per_corner {
        out.extend(r?);
        if out.len() > cap {
            return Err(SurfaceError::BudgetExceeded { cap });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_origami, enumerate_saddle_connections, Perm, Representation};

    fn unfolding(s: &crate::surface::FlatSurface) -> &Unfolding {
        match &s.representation {
            Representation::UnfoldedPolygon(u) => u,
            _ => panic!("not an unfolding"),
        }
    }

    #[test]
    fn gluings_are_translations() {
        for (angles, lengths) in [
            (vec![0.5, 0.5, 0.5, 0.5], vec![1.0, 1.0]),
            (vec![0.5, 0.25, 0.25], vec![1.0]),
            (vec![0.2, 0.4, 0.4], vec![1.0]),
            (vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], vec![1.0]),
        ] {
            let s = unfold_polygon(&angles, &lengths).unwrap();
            let u = unfolding(&s);
            for tri in &u.triangles {
                for e in 0..3 {
                    let (t2, e2) = tri.neighbor[e];
                    let back = u.triangles[t2].edges[e2];
                    assert!(norm(add(tri.edges[e], back)) < 1e-12);
                    let c: Vec<i32> = tri.coef[e].iter().zip(&u.triangles[t2].coef[e2]).map(|(a, b)| a + b).collect();
                    assert!(c.iter().all(|&x| x == 0));
                    assert_eq!(u.triangles[t2].neighbor[e2], (u.triangles.iter().position(|x| x == tri).unwrap(), e));
                }
            }
        }
    }

    #[test]
    fn square_unfolds_to_four_copies() {
        let s = unfold_polygon(&[0.5; 4], &[1.0, 1.0]).unwrap();
        assert_eq!(unfolding(&s).copies, 4);
        assert_eq!(s.genus, 1);
        assert_eq!(s.cone_angles, vec![1, 1, 1, 1]);
        assert!((s.raw_area - 4.0).abs() < 1e-12);
    }

    #[test]
    fn square_spectrum_matches_two_by_two_origami() {
        let s = unfold_polygon(&[0.5; 4], &[1.0, 1.0]).unwrap();
        let o = build_origami(
            Perm::parse_cycles("(1 2)(3 4)", None).unwrap(),
            Perm::parse_cycles("(1 3)(2 4)", None).unwrap(),
        )
        .unwrap();
        for lmax in [0.5, 1.0, 2.5] {
            let a = enumerate_saddle_connections(&s, lmax).unwrap();
            let b = enumerate_saddle_connections(&o, lmax).unwrap();
            let key = |x: Vec2| ((x[0] * 1e6).round() as i64, (x[1] * 1e6).round() as i64);
            let mut ha: Vec<_> = a.connections().iter().map(|c| key(c.hol)).collect();
            let mut hb: Vec<_> = b.connections().iter().map(|c| key(c.hol)).collect();
            ha.sort();
            hb.sort();
            assert_eq!(ha, hb, "lmax {lmax}");
        }
    }

    #[test]
    fn right_isosceles_triangle() {
        let s = unfold_polygon(&[0.5, 0.25, 0.25], &[1.0]).unwrap();
        assert_eq!(unfolding(&s).copies, 8);
        assert_eq!(s.genus, 1);
        assert_eq!(s.marked_points(), 4);
        assert!(s.cone_angles.iter().all(|&c| c == 1));
    }

    #[test]
    fn fifth_triangle_is_genus_two() {
        let s = unfold_polygon(&[0.2, 0.4, 0.4], &[1.0]).unwrap();
        assert_eq!(unfolding(&s).copies, 10);
        assert_eq!(s.genus, 2);
        let mut c = s.cone_angles.clone();
        c.sort();
        assert_eq!(c, vec![1, 2, 2]);
        let sp = enumerate_saddle_connections(&s, 1.5).unwrap();
        assert!(!sp.is_empty());
        assert!(sp.connections().iter().all(|c| c.length() <= 1.5));
    }

    #[test]
    fn bad_polygons() {
        assert!(matches!(unfold_polygon(&[0.5, 0.25, 0.25 + 1e-3], &[1.0]), Err(SurfaceError::InvalidPolygon(_))));
        assert!(matches!(
            unfold_polygon(&[std::f64::consts::FRAC_1_PI, 0.5, 0.5 - std::f64::consts::FRAC_1_PI], &[1.0]),
            Err(SurfaceError::IrrationalAngle(_))
        ));
    }

    #[test]
    fn group_order_is_twice_lcm() {
        for (angles, order) in [(vec![1.0 / 3.0; 3], 6), (vec![0.5, 1.0 / 3.0, 1.0 / 6.0], 12), (vec![0.2, 0.4, 0.4], 10)] {
            let s = unfold_polygon(&angles, &[1.0]).unwrap();
            assert_eq!(unfolding(&s).copies, order);
        }
    }
}
