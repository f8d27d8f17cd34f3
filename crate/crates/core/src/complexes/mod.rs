//! Complexes of pairwise disjoint saddle connections on lattice surfaces.
//!
//! A complex is given by its edge set; its 2-simplices are the embedded
//! triangles all of whose sides are edges. Holonomies are integer vectors, so
//! disjointness, triangles, containment and the angle predicates are decided
//! exactly. Lengths are normalized to area 1: a raw max-norm `r` on an
//! `n`-square surface has length `r/√n`.

mod combine;
mod enumerate;
mod geometry;

pub use combine::{combine, combine2, CombineParams, Combined};
pub use enumerate::{
    enumerate_shrinkable_complexes, enumerate_with_budget, shrinkable_from_seeds, DEFAULT_COMPLEX_CAP,
};

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::scalar::{circle_distance, vertical_angle, Rational, Real, Scalar, DEFAULT_ANGLE_BITS};
use crate::surface::origami::{traces_intersect, SquareTiling, Trace};
use crate::surface::{lattice_order, ConnId, FlatSurface, SaddleConnection};
use geometry::{P, *};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("edges {0} and {1} meet away from the marked points")]
    EdgesIntersect(usize, usize),
    #[error("edge {edge} is more than π/4 away from the longest edge")]
    AngleSpreadExceeded { edge: usize },
    #[error("a complex needs at least one edge")]
    Empty,
    #[error("edge {0} is listed twice")]
    DuplicateEdge(usize),
    #[error("level {level} exceeds the bound {bound}")]
    LevelExceeded { level: usize, bound: usize },
    #[error("complexes need lattice saddle connections: {0}")]
    Unsupported(String),
    #[error("the saddle connection lies in the complex")]
    GammaInsideK,
    #[error("more than {cap} complexes")]
    BudgetExceeded { cap: usize },
    #[error("no saddle connection σ among {searched} candidates (search region inside the spectrum: {complete})")]
    NoSigmaFound { searched: usize, complete: bool },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error("degenerate geometry while locating a triangle")]
    Geometry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// On two triangles.
    Interior,
    /// Boundary edge on one triangle.
    Internal,
    /// Boundary edge on no triangle.
    External,
}

impl EdgeKind {
    fn name(self) -> &'static str {
        match self {
            EdgeKind::Interior => "interior",
            EdgeKind::Internal => "internal",
            EdgeKind::External => "external",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub conn: SaddleConnection,
    pub raw: [i64; 2],
    pub square: usize,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn raw_length(&self) -> i64 {
        self.raw[0].abs().max(self.raw[1].abs())
    }

    pub fn on_boundary(&self) -> bool {
        self.kind != EdgeKind::Interior
    }
}

/// A 2-simplex: three `(edge index, triangle lies to the left of the edge)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle {
    pub sides: [(usize, bool); 3],
}

/// A developed copy of a triangle with an interior reference point.
#[derive(Clone, Debug)]
struct TriGeom {
    verts: [P; 3],
    r: P,
    r_square: usize,
    r_local: P,
}

#[derive(Clone, Debug)]
pub struct Complex {
    surface: Arc<FlatSurface>,
    tiling: Arc<SquareTiling>,
    pub edges: Vec<Edge>,
    pub triangles: Vec<Triangle>,
    geoms: Vec<TriGeom>,
    longest: usize,
    longest_boundary: Option<usize>,
}

fn det(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot_i(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[0] + a[1] * b[1]
}

fn max_norm(a: [i64; 2]) -> i64 {
    a[0].abs().max(a[1].abs())
}

fn canonical(a: [i64; 2]) -> bool {
    a[1] > 0 || (a[1] == 0 && a[0] > 0)
}

/// `|θ_a − θ_b| ≤ π/4` as lines.
pub fn within_quarter(a: [i64; 2], b: [i64; 2]) -> bool {
    det(a, b).abs() <= dot_i(a, b).abs()
}

/// Longest first; equal lengths by smaller angle, then by square.
fn longer_first(a: &Edge, b: &Edge) -> Ordering {
    b.raw_length()
        .cmp(&a.raw_length())
        .then(lattice_order((a.raw[0], a.raw[1]), (b.raw[0], b.raw[1])))
        .then(a.square.cmp(&b.square))
}

/// `θ` of a raw lattice holonomy at `bits` of precision.
pub fn lattice_theta<S: Real>(raw: [i64; 2], bits: u32) -> S {
    let h = S::from_i64(raw[0]).expect("holonomy fits the scalar");
    let v = S::from_i64(raw[1]).expect("holonomy fits the scalar");
    vertical_angle(&h, &v, bits)
}

/// Line distance between the directions of two raw holonomies on `ℝ/π̃ℤ`.
pub fn lattice_gap<S: Real>(a: [i64; 2], b: [i64; 2], bits: u32) -> S {
    if det(a, b) == 0 {
        return S::zero();
    }
    let pi = S::pi_approx(bits);
    circle_distance(&lattice_theta::<S>(a, bits), &lattice_theta::<S>(b, bits), &pi)
}

fn s_int<S: Scalar>(n: i64) -> S {
    S::from_i64(n).expect("integer fits the scalar")
}

/// Shared lattice data for building complexes on one surface.
#[derive(Clone, Debug)]
pub(crate) struct Lattice {
    pub surface: Arc<FlatSurface>,
    pub tiling: Arc<SquareTiling>,
}

impl Lattice {
    pub fn new(surface: Arc<FlatSurface>) -> Result<Self, ComplexError> {
        let tiling = SquareTiling::of(&surface)
            .ok_or_else(|| ComplexError::Unsupported("the surface is not square-tiled".into()))?;
        Ok(Lattice { surface, tiling: Arc::new(tiling) })
    }

    pub fn n(&self) -> usize {
        self.tiling.len()
    }

    pub fn edge(&self, c: &SaddleConnection) -> Result<Edge, ComplexError> {
        let raw = c
            .lattice
            .ok_or_else(|| ComplexError::Unsupported("saddle connection without lattice holonomy".into()))?;
        let ConnId::Lattice { square, .. } = c.id else {
            return Err(ComplexError::Unsupported("saddle connection is not a lattice connection".into()));
        };
        Ok(Edge { conn: c.clone(), raw, square, kind: EdgeKind::External })
    }

    pub fn trace(&self, e: &Edge) -> Trace {
        self.tiling.trace(e.square, e.raw[0], e.raw[1])
    }

    /// Distinct saddle connections meet at most at marked points.
    pub fn disjoint(&self, a: &Edge, b: &Edge) -> bool {
        let d = det(a.raw, b.raw);
        if d == 0 {
            return true;
        }
        if self.n() == 1 {
            return d.abs() == 1;
        }
        !traces_intersect(&self.trace(a), &self.trace(b))
    }

    pub fn make(&self, conns: &[SaddleConnection]) -> Result<Complex, ComplexError> {
        if conns.is_empty() {
            return Err(ComplexError::Empty);
        }
        let edges = conns.iter().map(|c| self.edge(c)).collect::<Result<Vec<_>, _>>()?;
        let mut seen = HashSet::new();
        for (i, c) in conns.iter().enumerate() {
            if !seen.insert(c.id.clone()) {
                return Err(ComplexError::DuplicateEdge(i));
            }
        }
        let bound = self.surface.max_level();
        if edges.len() > bound {
            return Err(ComplexError::LevelExceeded { level: edges.len(), bound });
        }
        let traces: Vec<Option<Trace>> = edges
            .iter()
            .map(|e| (self.n() > 1).then(|| self.trace(e)))
            .collect();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let d = det(edges[i].raw, edges[j].raw);
                let meet = match (&traces[i], &traces[j]) {
                    _ if d == 0 => false,
                    (Some(a), Some(b)) => traces_intersect(a, b),
                    _ => d.abs() > 1,
                };
                if meet {
                    return Err(ComplexError::EdgesIntersect(i, j));
                }
            }
        }
        self.build(edges)
    }

    /// Assembles a complex from pairwise disjoint edges.
    pub fn build(&self, mut edges: Vec<Edge>) -> Result<Complex, ComplexError> {
        let longest = (0..edges.len())
            .min_by(|&a, &b| longer_first(&edges[a], &edges[b]))
            .ok_or(ComplexError::Empty)?;
        let top = edges[longest].raw;
        if let Some(edge) = edges.iter().position(|e| !within_quarter(e.raw, top)) {
            return Err(ComplexError::AngleSpreadExceeded { edge });
        }
        let (triangles, geoms) = if edges.len() >= 3 {
            self.find_triangles(&edges)?
        } else {
            (Vec::new(), Vec::new())
        };
        let mut count = vec![0usize; edges.len()];
        for t in &triangles {
            for &(e, _) in &t.sides {
                count[e] += 1;
            }
        }
        for (e, c) in edges.iter_mut().zip(&count) {
            e.kind = match c {
                0 => EdgeKind::External,
                1 => EdgeKind::Internal,
                _ => EdgeKind::Interior,
            };
        }
        let longest_boundary = (0..edges.len())
            .filter(|&i| edges[i].on_boundary())
            .min_by(|&a, &b| longer_first(&edges[a], &edges[b]));
        Ok(Complex {
            surface: self.surface.clone(),
            tiling: self.tiling.clone(),
            edges,
            triangles,
            geoms,
            longest,
            longest_boundary,
        })
    }

    fn find_triangles(&self, edges: &[Edge]) -> Result<(Vec<Triangle>, Vec<TriGeom>), ComplexError> {
        let index: HashMap<ConnId, usize> = edges.iter().enumerate().map(|(i, e)| (e.conn.id.clone(), i)).collect();
        let holonomies: HashSet<[i64; 2]> = edges.iter().map(|e| e.raw).collect();
        let mut found: Vec<(Triangle, TriGeom)> = Vec::new();
        let mut keys = HashSet::new();
        for e in 0..edges.len() {
            for left in [true, false] {
                if keys.iter().any(|t: &Triangle| t.sides.contains(&(e, left))) {
                    continue;
                }
                if let Some((t, g)) = self.triangle_on(edges, &index, &holonomies, e, left)? {
                    if keys.insert(t.clone()) {
                        found.push((t, g));
                    }
                }
            }
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(found.into_iter().unzip())
    }

    /// The triangle of the complex on the given side of edge `e`, if any.
    fn triangle_on(
        &self,
        edges: &[Edge],
        index: &HashMap<ConnId, usize>,
        holonomies: &HashSet<[i64; 2]>,
        e: usize,
        left: bool,
    ) -> Result<Option<(Triangle, TriGeom)>, ComplexError> {
        let d = edges[e].raw;
        let sigma = if left { 1 } else { -1 };
        let mut tried = HashSet::new();
        for f in edges {
            for sgn in [1, -1] {
                let w = [sgn * f.raw[0], sgn * f.raw[1]];
                if det(d, w) != sigma || !tried.insert(w) {
                    continue;
                }
                let c = [d[0] - w[0], d[1] - w[1]];
                if !holonomies.contains(&c) && !holonomies.contains(&[-c[0], -c[1]]) {
                    continue;
                }
                let geom = self.triangle_geometry(&edges[e], w, left)?;
                let a = pt(0, 0);
                let b = pt(d[0], d[1]);
                let cc = pt(w[0], w[1]);
                let mut sides = Vec::with_capacity(3);
                for (u, v, third) in [(&a, &b, &cc), (&b, &cc, &a), (&cc, &a, &b)] {
                    let (id, is_left) = self.side_id(&geom, u, v, third)?;
                    match index.get(&id) {
                        Some(&i) => sides.push((i, is_left)),
                        None => break,
                    }
                }
                if sides.len() == 3 {
                    sides.sort();
                    return Ok(Some((Triangle { sides: [sides[0], sides[1], sides[2]] }, geom)));
                }
            }
        }
        Ok(None)
    }

    /// Developed triangle `0, d, w` glued along the edge `e` from its start.
    fn triangle_geometry(&self, e: &Edge, w: [i64; 2], left: bool) -> Result<TriGeom, ComplexError> {
        let d = e.raw;
        let l1 = d[0].abs() + d[1].abs() + 1;
        let lw = w[0].abs() + w[1].abs() + 1;
        let d1 = frac(1, 4 * l1);
        let d2 = &d1 / int(4 * l1 * lw);
        let dv = pt(d[0], d[1]);
        let q0 = add(&scale(&dv, &d1), &[d2.clone(), d2.clone()]);
        let origin = if d[0] < 0 { pt(-1, 0) } else { pt(0, 0) };
        let q0_local = sub(&q0, &origin);
        let sign = if left { int(1) } else { int(-1) };
        let normal = [&sign * int(-d[1]), &sign * int(d[0])];
        let r = add(&scale(&dv, &d1), &scale(&normal, &d2));
        let (r_square, r_local) =
            develop(&self.tiling, e.square, &q0_local, &sub(&r, &q0)).ok_or(ComplexError::Geometry)?;
        let (a, b, c) = (pt(0, 0), dv, pt(w[0], w[1]));
        let verts = if left { [a, b, c] } else { [a, c, b] };
        for k in 0..3 {
            let u = &verts[k];
            let v = &verts[(k + 1) % 3];
            if !cross(&sub(v, u), &sub(&r, u)).is_positive() {
                return Err(ComplexError::Geometry);
            }
        }
        Ok(TriGeom { verts, r, r_square, r_local })
    }

    /// Saddle connection along the developed side `u → v`, and whether the
    /// triangle (containing `third`) lies to its left.
    fn side_id(&self, g: &TriGeom, u: &P, v: &P, third: &P) -> Result<(ConnId, bool), ComplexError> {
        let dir = sub(v, u);
        let di = [to_i64(&dir[0]), to_i64(&dir[1])];
        let (s0, dd) = if canonical(di) { (u.clone(), di) } else { (v.clone(), [-di[0], -di[1]]) };
        let l = dd[0].abs() + dd[1].abs() + 1;
        let d1 = frac(1, 4 * l);
        let d2 = &d1 / int(4 * l);
        let ddv = pt(dd[0], dd[1]);
        let x = add(&add(&s0, &scale(&ddv, &d1)), &[d2.clone(), d2]);
        let (square, _) = develop(&self.tiling, g.r_square, &g.r_local, &sub(&x, &g.r)).ok_or(ComplexError::Geometry)?;
        let is_left = cross(&ddv, &sub(third, &s0)).is_positive();
        Ok((ConnId::Lattice { square, h: dd[0], v: dd[1] }, is_left))
    }
}

fn to_i64(x: &Rational) -> i64 {
    use num_traits::ToPrimitive;
    x.to_integer().to_i64().expect("small integer")
}

/// Builds the complex with edge set `edges` on a lattice surface.
pub fn make_complex(surface: &Arc<FlatSurface>, edges: &[SaddleConnection]) -> Result<Complex, ComplexError> {
    Lattice::new(surface.clone())?.make(edges)
}

/// Pieces of the closed support, in local square coordinates.
struct Support {
    segs: Vec<(usize, P, P)>,
    faces: Vec<(usize, Vec<P>)>,
}

impl Complex {
    pub fn surface(&self) -> &Arc<FlatSurface> {
        &self.surface
    }

    pub fn squares(&self) -> usize {
        self.tiling.len()
    }

    pub fn level(&self) -> usize {
        self.edges.len()
    }

    pub fn longest(&self) -> &Edge {
        &self.edges[self.longest]
    }

    /// Raw max-norm of the longest edge.
    pub fn l_raw(&self) -> i64 {
        self.longest().raw_length()
    }

    pub fn l_k(&self) -> f64 {
        self.l_raw() as f64 * self.surface.scale()
    }

    pub fn theta_raw(&self) -> [i64; 2] {
        self.longest().raw
    }

    pub fn theta_k(&self) -> f64 {
        self.longest().conn.theta()
    }

    pub fn theta_k_exact<S: Real>(&self, bits: u32) -> S {
        lattice_theta(self.theta_raw(), bits)
    }

    pub fn boundary(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.on_boundary())
    }

    pub fn longest_boundary(&self) -> Option<&Edge> {
        self.longest_boundary.map(|i| &self.edges[i])
    }

    pub fn l_boundary(&self) -> Option<f64> {
        self.longest_boundary().map(|e| e.raw_length() as f64 * self.surface.scale())
    }

    pub fn theta_boundary(&self) -> Option<f64> {
        self.longest_boundary().map(|e| e.conn.theta())
    }

    /// `L(K)·L(∂K)`, exact.
    pub fn length_product<S: Scalar>(&self) -> Option<S> {
        let b = self.longest_boundary()?.raw_length();
        Some(s_int::<S>(self.l_raw() * b) / s_int::<S>(self.squares() as i64))
    }

    fn support(&self) -> Result<Support, ComplexError> {
        let mut segs = Vec::new();
        for e in &self.edges {
            for (s, a, b) in self.tiling.trace(e.square, e.raw[0], e.raw[1]).segments {
                segs.push((s, from_small(&a), from_small(&b)));
            }
        }
        let mut faces = Vec::new();
        for g in &self.geoms {
            let xs: Vec<i64> = g.verts.iter().map(|p| to_i64(&p[0])).collect();
            let ys: Vec<i64> = g.verts.iter().map(|p| to_i64(&p[1])).collect();
            let (x0, x1) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
            let (y0, y1) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
            for i in x0..x1 {
                let column = clip_convex(&g.verts, &[pt(i, y0), pt(i + 1, y0), pt(i + 1, y1), pt(i, y1)]);
                if column.len() < 3 {
                    continue;
                }
                let lo = column.iter().map(|p| p[1].floor()).min().unwrap();
                let hi = column.iter().map(|p| p[1].ceil()).max().unwrap();
                for j in to_i64(&lo)..to_i64(&hi) {
                    let piece = clip_convex(&column, &cell(i, j));
                    if piece.len() < 3 || area2(&piece).is_zero() {
                        continue;
                    }
                    let c = centroid(&piece);
                    let (sq, _) = develop(&self.tiling, g.r_square, &g.r_local, &sub(&c, &g.r))
                        .ok_or(ComplexError::Geometry)?;
                    let shift = pt(i, j);
                    faces.push((sq, piece.iter().map(|p| sub(p, &shift)).collect()));
                }
            }
        }
        Ok(Support { segs, faces })
    }

    /// Copies of a square-side segment in the neighbouring square.
    fn alternatives(&self, s: usize, a: &P, b: &P) -> Vec<(usize, P, P)> {
        let z = Rational::zero();
        let o = int(1);
        let mut out = vec![(s, a.clone(), b.clone())];
        for axis in 0..2 {
            for (val, other) in [(&z, &o), (&o, &z)] {
                if &a[axis] == val && &b[axis] == val {
                    let t = &self.tiling;
                    let ns = match (axis, val.is_zero()) {
                        (0, true) => t.h_inv.apply(s),
                        (0, false) => t.h.apply(s),
                        (_, true) => t.v_inv.apply(s),
                        (_, false) => t.v.apply(s),
                    };
                    let mut a2 = a.clone();
                    let mut b2 = b.clone();
                    a2[axis] = other.clone();
                    b2[axis] = other.clone();
                    out.push((ns, a2, b2));
                }
            }
        }
        out
    }

    fn covers_segment(&self, sup: &Support, s: usize, a: &P, b: &P) -> bool {
        let mut ivs = Vec::new();
        for (sq, p, q) in self.alternatives(s, a, b) {
            for (t, c, d) in &sup.segs {
                if *t == sq {
                    if let Some(iv) = collinear_overlap(&p, &q, c, d) {
                        ivs.push(iv);
                    }
                }
            }
            for (t, poly) in &sup.faces {
                if *t == sq {
                    if let Some(iv) = segment_in_convex(poly, &p, &q) {
                        ivs.push(iv);
                    }
                }
            }
        }
        covers_unit(ivs)
    }

    fn covers_face(sup: &Support, s: usize, poly: &[P]) -> bool {
        let mut covered = Rational::zero();
        for (t, q) in &sup.faces {
            if *t == s {
                let piece = clip_convex(poly, q);
                if piece.len() >= 3 {
                    covered += area2(&piece);
                }
            }
        }
        covered == area2(poly)
    }

    /// The saddle connection lies in the closed support.
    pub fn contains_connection(&self, c: &SaddleConnection) -> Result<bool, ComplexError> {
        if self.edges.iter().any(|e| e.conn.id == c.id) {
            return Ok(true);
        }
        if self.triangles.is_empty() {
            return Ok(false);
        }
        let lat = Lattice { surface: self.surface.clone(), tiling: self.tiling.clone() };
        let e = lat.edge(c)?;
        let sup = self.support()?;
        Ok(lat.trace(&e).segments.iter().all(|(s, a, b)| {
            self.covers_segment(&sup, *s, &from_small(a), &from_small(b))
        }))
    }

    fn contains_support(&self, mine: &Support, other: &Support) -> bool {
        other.segs.iter().all(|(s, a, b)| self.covers_segment(mine, *s, a, b))
            && other.faces.iter().all(|(s, p)| Self::covers_face(mine, *s, p))
    }
}

/// Index of an edge of `k2` that does not lie in the closed support of `k1`.
pub fn edge_outside(k1: &Complex, k2: &Complex) -> Result<Option<usize>, ComplexError> {
    for (i, e) in k2.edges.iter().enumerate() {
        if !k1.contains_connection(&e.conn)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// The complexes determine the same closed subset of the surface.
pub fn topologically_equivalent(k1: &Complex, k2: &Complex) -> bool {
    if k1.triangles.is_empty() != k2.triangles.is_empty() {
        return false;
    }
    if k1.triangles.is_empty() {
        let a: HashSet<&ConnId> = k1.edges.iter().map(|e| &e.conn.id).collect();
        let b: HashSet<&ConnId> = k2.edges.iter().map(|e| &e.conn.id).collect();
        return a == b;
    }
    match (k1.support(), k2.support()) {
        (Ok(s1), Ok(s2)) => k1.contains_support(&s1, &s2) && k2.contains_support(&s2, &s1),
        _ => false,
    }
}

/// `θ_β` within `ε²/(|β|·L(K))` of `θ(K)` for every edge `β`.
pub fn is_shrinkable<S: Real>(k: &Complex, eps: &S) -> bool {
    is_shrinkable_at(k, eps, DEFAULT_ANGLE_BITS)
}

pub fn is_shrinkable_at<S: Real>(k: &Complex, eps: &S, bits: u32) -> bool {
    let bound = eps.clone() * eps.clone() * s_int::<S>(k.squares() as i64);
    let top = k.theta_raw();
    let lk = k.l_raw();
    k.edges.iter().all(|e| {
        let gap: S = lattice_gap(e.raw, top, bits);
        gap * s_int::<S>(e.raw_length() * lk) <= bound
    })
}

/// Both branches of the joint condition for `K` and a connection `γ` not in `K`.
pub fn jointly_shrinkable<S: Real>(k: &Complex, gamma: &SaddleConnection, eps: &S) -> Result<bool, ComplexError> {
    if k.contains_connection(gamma)? {
        return Err(ComplexError::GammaInsideK);
    }
    jointly_shrinkable_unchecked(k, gamma, eps, DEFAULT_ANGLE_BITS)
}

pub(crate) fn jointly_shrinkable_unchecked<S: Real>(
    k: &Complex,
    gamma: &SaddleConnection,
    eps: &S,
    bits: u32,
) -> Result<bool, ComplexError> {
    let g = gamma
        .lattice
        .ok_or_else(|| ComplexError::Unsupported("saddle connection without lattice holonomy".into()))?;
    if !is_shrinkable_at(k, eps, bits) {
        return Ok(false);
    }
    let bound = eps.clone() * eps.clone() * s_int::<S>(k.squares() as i64);
    let rg = max_norm(g);
    let check = |w: [i64; 2]| {
        let gap: S = lattice_gap(g, w, bits);
        gap * s_int::<S>(rg * max_norm(w)) <= bound
    };
    if rg <= k.l_raw() {
        Ok(check(k.theta_raw()))
    } else {
        Ok(k.edges.iter().all(|e| check(e.raw)))
    }
}

/// `(4·(6g−6+3n)·√3)^{−1/2}`, rounded down for exact scalars.
pub fn eps0<S: Real>(surface: &FlatSurface, bits: u32) -> S {
    let k = s_int::<S>(4 * surface.max_level() as i64);
    let root3 = s_int::<S>(3).sqrt_approx(bits);
    let x = (k * root3).sqrt_approx(bits);
    let e = S::one() / x;
    if S::EXACT {
        // Shave one part in 2^{bits/2} to stay below the true value.
        let slack = S::one() - S::from_f64_lossy(2f64.powi(-((bits / 2).min(1000) as i32)));
        e * slack
    } else {
        e
    }
}

/// Text dump: header, one line per edge, one per triangle.
pub fn write_complex(k: &Complex) -> String {
    let mut out = String::new();
    let sc = k.surface.scale();
    let _ = writeln!(out, "# complex on {}", k.surface);
    let _ = writeln!(out, "squares {} scale {}", k.squares(), sc);
    let _ = writeln!(out, "level {}", k.level());
    let _ = writeln!(out, "L {} theta {}", k.l_k(), k.theta_k());
    match k.longest_boundary() {
        Some(b) => {
            let _ = writeln!(out, "boundary_L {} boundary_theta {}", b.raw_length() as f64 * sc, b.conn.theta());
        }
        None => {
            let _ = writeln!(out, "boundary_L none");
        }
    }
    for (i, e) in k.edges.iter().enumerate() {
        let _ = writeln!(
            out,
            "edge {i} square {} hol {} {} start {} end {} {}",
            e.square,
            e.raw[0],
            e.raw[1],
            e.conn.start,
            e.conn.end,
            e.kind.name()
        );
    }
    for t in &k.triangles {
        let side = |(e, l): (usize, bool)| format!("{e}{}", if l { "L" } else { "R" });
        let _ = writeln!(out, "triangle {} {} {}", side(t.sides[0]), side(t.sides[1]), side(t.sides[2]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_origami, build_torus, enumerate_saddle_connections, Perm};

    fn conn(spec: &crate::surface::DirectionSpectrum, h: i64, v: i64, square: usize) -> SaddleConnection {
        spec.lattice_connections(h, v).into_iter().find(|c| matches!(c.id, ConnId::Lattice { square: s, .. } if s == square)).unwrap()
    }

    fn l_origami() -> Arc<FlatSurface> {
        Arc::new(
            build_origami(
                Perm::parse_cycles("(1 2)", Some(3)).unwrap(),
                Perm::parse_cycles("(1 3)", Some(3)).unwrap(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn single_edge() {
        let s = Arc::new(build_torus());
        let sp = enumerate_saddle_connections(&s, 5.0).unwrap();
        let k = make_complex(&s, &[conn(&sp, 2, 3, 0)]).unwrap();
        assert_eq!(k.level(), 1);
        assert_eq!(k.l_boundary(), Some(k.l_k()));
        assert!(is_shrinkable(&k, &1e-9));
        assert_eq!(k.edges[0].kind, EdgeKind::External);
    }

    #[test]
    fn torus_crossing_edges_rejected() {
        let s = Arc::new(build_torus());
        let sp = enumerate_saddle_connections(&s, 5.0).unwrap();
        let e = make_complex(&s, &[conn(&sp, 1, 0, 0), conn(&sp, 1, 2, 0)]).unwrap_err();
        assert_eq!(e, ComplexError::EdgesIntersect(0, 1));
        let e = make_complex(&s, &[conn(&sp, 1, 0, 0), conn(&sp, 0, 1, 0)]).unwrap_err();
        assert_eq!(e, ComplexError::AngleSpreadExceeded { edge: 0 });
    }

    #[test]
    fn torus_triangle() {
        let s = Arc::new(build_torus());
        let sp = enumerate_saddle_connections(&s, 5.0).unwrap();
        let k = make_complex(&s, &[conn(&sp, 1, 1, 0), conn(&sp, 1, 2, 0), conn(&sp, 0, 1, 0)]).unwrap();
        // The three edges cut the torus into two triangles.
        assert_eq!(k.triangles.len(), 2);
        assert!(k.edges.iter().all(|e| e.kind == EdgeKind::Interior));
        assert!(k.longest_boundary().is_none());
    }

    #[test]
    fn origami_triangle_boundary() {
        let s = l_origami();
        let sp = enumerate_saddle_connections(&s, 5.0).unwrap();
        // Triangle (0,0), (1,2), (0,1) in the column of squares 0 and 2.
        let k = make_complex(&s, &[conn(&sp, 1, 2, 0), conn(&sp, 0, 1, 0), conn(&sp, 1, 1, 2)]);
        let k = k.unwrap();
        assert_eq!(k.level(), 3);
        assert_eq!(k.triangles.len(), 1, "{}", write_complex(&k));
        assert!(k.edges.iter().all(|e| e.kind == EdgeKind::Internal));
        assert_eq!(k.triangles[0].sides, [(0, true), (1, false), (2, false)]);
        assert!(k.contains_connection(&conn(&sp, 1, 1, 2)).unwrap());
        assert!(!k.contains_connection(&conn(&sp, 1, 1, 0)).unwrap());
        assert!(!k.contains_connection(&conn(&sp, 0, 1, 1)).unwrap());
    }

    #[test]
    fn equivalence_basics() {
        let s = l_origami();
        let sp = enumerate_saddle_connections(&s, 5.0).unwrap();
        let a = make_complex(&s, &[conn(&sp, 1, 0, 0)]).unwrap();
        let b = make_complex(&s, &[conn(&sp, 1, 0, 1)]).unwrap();
        assert!(topologically_equivalent(&a, &a));
        assert!(!topologically_equivalent(&a, &b));
    }

    #[test]
    fn eps0_torus() {
        let e: f64 = eps0(&build_torus(), 64);
        assert!((e - (12.0 * 3f64.sqrt()).powf(-0.5)).abs() < 1e-12);
        let r: Rational = eps0(&build_torus(), 128);
        assert!(r.as_f64() <= e);
    }
}
