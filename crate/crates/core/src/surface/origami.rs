//! Square-tiled geometry: vertices, straight-line tracing through squares and
//! exact intersection of traced saddle connections.

use num_rational::Ratio;

use super::perm::Perm;
use super::{FlatSurface, Representation};

pub type Q = Ratio<i64>;
pub type Point = [Q; 2];

/// The translation group generated by `h`, `v` acts transitively.
pub fn is_connected(h: &Perm, v: &Perm) -> bool {
    let n = h.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let hi = h.inverse();
    let vi = v.inverse();
    while let Some(s) = stack.pop() {
        for t in [h.apply(s), v.apply(s), hi.apply(s), vi.apply(s)] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen.into_iter().all(|b| b)
}

/// Cycles of the commutator `v h v⁻¹ h⁻¹`; each cycle lists the squares whose
/// lower-left corner is one marked point, in counterclockwise order.
pub fn vertex_cycles(h: &Perm, v: &Perm) -> Vec<Vec<usize>> {
    let c = v.compose(h).compose(&v.inverse()).compose(&h.inverse());
    c.cycles()
}

/// Permutation data of a lattice surface with lookup tables.
#[derive(Clone, Debug)]
pub struct SquareTiling {
    pub h: Perm,
    pub v: Perm,
    pub h_inv: Perm,
    pub v_inv: Perm,
    /// Marked point at the lower-left corner of each square.
    pub corner: Vec<usize>,
}

impl SquareTiling {
    pub fn new(h: Perm, v: Perm) -> Self {
        let mut corner = vec![0; h.len()];
        for (k, cyc) in vertex_cycles(&h, &v).iter().enumerate() {
            for &s in cyc {
                corner[s] = k;
            }
        }
        let h_inv = h.inverse();
        let v_inv = v.inverse();
        SquareTiling { h, v, h_inv, v_inv, corner }
    }

    pub fn of(surface: &FlatSurface) -> Option<Self> {
        match &surface.representation {
            Representation::Torus => Some(Self::new(Perm::identity(1), Perm::identity(1))),
            Representation::Origami { h, v } => Some(Self::new(h.clone(), v.clone())),
            Representation::UnfoldedPolygon(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Marked point where the separatrix leaves.
    pub fn start_vertex(&self, square: usize, p: i64) -> usize {
        if p < 0 {
            self.corner[self.h.apply(square)]
        } else {
            self.corner[square]
        }
    }

    /// Marked point reached by the primitive, canonically oriented direction
    /// `(p, q)` leaving from `square`.
    pub fn end_vertex(&self, square: usize, p: i64, q: i64) -> usize {
        self.walk(square, p, q, |_, _, _| {})
    }

    /// Segments of the saddle connection in local square coordinates.
    pub fn trace(&self, square: usize, p: i64, q: i64) -> Trace {
        let mut segments = Vec::new();
        let end = self.walk(square, p, q, |s, a, b| segments.push((s, a, b)));
        Trace {
            start: self.start_vertex(square, p),
            end,
            segments,
        }
    }

    fn walk(&self, square: usize, p: i64, q: i64, mut seg: impl FnMut(usize, Point, Point)) -> usize {
        let z = Q::from_integer(0);
        let one = Q::from_integer(1);
        if q == 0 {
            seg(square, [z, z], [one, z]);
            return self.corner[self.h.apply(square)];
        }
        if p == 0 {
            seg(square, [z, z], [z, one]);
            return self.corner[self.v.apply(square)];
        }
        let a = p.abs();
        let left = p < 0;
        // Work in the mirror image for p < 0: local x is measured from the right edge.
        let local = |x: Q, i: i64, y: Q, j: i64| -> Point {
            let lx = x - Q::from_integer(i);
            let ly = y - Q::from_integer(j);
            if left {
                [one - lx, ly]
            } else {
                [lx, ly]
            }
        };
        let (mut i, mut j) = (0i64, 0i64);
        let mut sq = square;
        let mut entry = [z, z];
        loop {
            let right = (i + 1) * q;
            let top = (j + 1) * a;
            let (exit, di, dj) = if right < top {
                ([Q::from_integer(i + 1), Q::new((i + 1) * q, a)], 1, 0)
            } else if right > top {
                ([Q::new((j + 1) * a, q), Q::from_integer(j + 1)], 0, 1)
            } else {
                ([Q::from_integer(i + 1), Q::from_integer(j + 1)], 1, 1)
            };
            seg(sq, local(entry[0], i, entry[1], j), local(exit[0], i, exit[1], j));
            if di == 1 && dj == 1 {
                return if left {
                    self.corner[self.v.apply(sq)]
                } else {
                    self.corner[self.v.apply(self.h.apply(sq))]
                };
            }
            if di == 1 {
                sq = if left { self.h_inv.apply(sq) } else { self.h.apply(sq) };
                i += 1;
            } else {
                sq = self.v.apply(sq);
                j += 1;
            }
            entry = exit;
        }
    }
}

/// A traced saddle connection: `(square, from, to)` pieces inside `[0,1]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub start: usize,
    pub end: usize,
    pub segments: Vec<(usize, Point, Point)>,
}

fn orient(a: &Point, b: &Point, c: &Point) -> std::cmp::Ordering {
    let x = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    x.cmp(&Q::from_integer(0))
}

fn is_corner(p: &Point) -> bool {
    let z = Q::from_integer(0);
    let o = Q::from_integer(1);
    (p[0] == z || p[0] == o) && (p[1] == z || p[1] == o)
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    orient(a, b, p).is_eq()
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Closed segments in one square share a point other than a square corner.
fn segments_meet(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    use std::cmp::Ordering::*;
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 == Equal && o2 == Equal {
        // Collinear: overlap along the common line.
        let key = |p: &Point| if a[0] != b[0] { p[0] } else { p[1] };
        let (lo1, hi1) = (key(a).min(key(b)), key(a).max(key(b)));
        let (lo2, hi2) = (key(c).min(key(d)), key(c).max(key(d)));
        let lo = lo1.max(lo2);
        let hi = hi1.min(hi2);
        if lo > hi {
            return false;
        }
        if lo < hi {
            return true;
        }
        let touch = [a, b, c, d].into_iter().find(|p| key(p) == lo).expect("endpoint");
        return !is_corner(touch);
    }
    if o1 != Equal && o2 != Equal && o3 != Equal && o4 != Equal {
        return o1 != o2 && o3 != o4;
    }
    for (p, s, t) in [(c, a, b), (d, a, b), (a, c, d), (b, c, d)] {
        if on_segment(s, t, p) && !is_corner(p) {
            return true;
        }
    }
    false
}

/// The traced connections meet away from marked points.
pub fn traces_intersect(x: &Trace, y: &Trace) -> bool {
    x.segments.iter().any(|(s, a, b)| {
        y.segments
            .iter()
            .any(|(t, c, d)| s == t && segments_meet(a, b, c, d))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_shape() -> SquareTiling {
        SquareTiling::new(
            Perm::parse_cycles("(1 2)", Some(3)).unwrap(),
            Perm::parse_cycles("(1 3)", Some(3)).unwrap(),
        )
    }

    #[test]
    fn commutator_cycles() {
        let t = l_shape();
        assert_eq!(vertex_cycles(&t.h, &t.v).len(), 1);
        let two = SquareTiling::new(
            Perm::parse_cycles("(1 2)", None).unwrap(),
            Perm::identity(2),
        );
        assert_eq!(vertex_cycles(&two.h, &two.v).len(), 2);
    }

    #[test]
    fn trace_crosses_expected_squares() {
        let t = l_shape();
        let tr = t.trace(0, 2, 1);
        let squares: Vec<usize> = tr.segments.iter().map(|s| s.0).collect();
        assert_eq!(squares, vec![0, 1]);
        let tr = t.trace(0, -1, 2);
        assert_eq!(tr.segments.len(), 2);
        assert_eq!(tr.segments[0].0, 0);
    }

    #[test]
    fn torus_connections_meet_iff_det_exceeds_one() {
        let t = SquareTiling::new(Perm::identity(1), Perm::identity(1));
        let dirs = [(1i64, 0i64), (0, 1), (1, 1), (-1, 1), (2, 1), (1, 2), (-3, 2), (3, 1)];
        for &(a, b) in &dirs {
            for &(c, d) in &dirs {
                if (a, b) == (c, d) {
                    continue;
                }
                let det = (a * d - b * c).abs();
                let meet = traces_intersect(&t.trace(0, a, b), &t.trace(0, c, d));
                assert_eq!(meet, det > 1, "{:?} {:?}", (a, b), (c, d));
            }
        }
    }
}
