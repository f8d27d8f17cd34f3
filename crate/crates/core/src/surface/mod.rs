//! Flat surfaces: the square torus, square-tiled surfaces and unfoldings of
//! rational polygons, together with their saddle-connection spectra and the
//! Teichmüller flow acting on holonomy.
//!
//! Every surface is rescaled to area 1 at construction. Lattice surfaces
//! (torus and origamis) keep their integer holonomies, so angle and length
//! predicates on them can be evaluated exactly.

pub mod flow;
pub mod io;
pub mod origami;
pub mod perm;
pub mod polygon;
pub mod spectrum;

use std::fmt;

use thiserror::Error;

pub use flow::{
    flow_holonomy, flowed_length, min_flow_length, rotate, systole_along, FlowParams,
};
pub use io::{parse_surface, write_spectrum, SurfaceSpec};
pub use perm::Perm;
pub use polygon::Unfolding;
pub use spectrum::{
    badness, badness_exact, enumerate_saddle_connections, enumerate_with_cap, Badness,
    lattice_order, DirectionSpectrum, Entry, DEFAULT_ENTRY_CAP,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("the squares do not form a connected surface")]
    NotConnected,
    #[error("permutations act on different index sets ({0} and {1})")]
    DegreeMismatch(usize, usize),
    #[error("angle {0}·π is not a rational multiple of π with small denominator")]
    IrrationalAngle(f64),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("spectrum would hold more than {cap} entries")]
    BudgetExceeded { cap: usize },
    #[error("spectrum up to {lmax} cannot certify this quantity (needs {needed})")]
    IncompleteSpectrum { lmax: f64, needed: f64 },
    #[error("operation not supported on this surface: {0}")]
    UnsupportedSurface(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    /// Unit square with opposite sides glued.
    Torus,
    /// `n` unit squares; square `i` has `h(i)` to its right and `v(i)` above.
    Origami { h: Perm, v: Perm },
    UnfoldedPolygon(Box<Unfolding>),
}

/// A translation surface rescaled to area 1.
///
/// Every corner of the defining polygons is a marked point; `cone_angles[k]`
/// is the cone angle of marked point `k` in units of `2π`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatSurface {
    pub representation: Representation,
    pub genus: usize,
    pub cone_angles: Vec<usize>,
    /// Area before normalization.
    pub raw_area: f64,
}

impl FlatSurface {
    /// Length of a unit of raw holonomy after normalization.
    pub fn scale(&self) -> f64 {
        1.0 / self.raw_area.sqrt()
    }

    pub fn area(&self) -> f64 {
        1.0
    }

    pub fn marked_points(&self) -> usize {
        self.cone_angles.len()
    }

    /// Orders of the zeroes of the Abelian differential (cone angle `2π(k+1)`).
    pub fn zero_orders(&self) -> Vec<usize> {
        self.cone_angles.iter().filter(|&&k| k > 1).map(|k| k - 1).collect()
    }

    /// Orders of the zeroes of the squared differential, `2k` for an Abelian zero of order `k`.
    pub fn quadratic_zero_orders(&self) -> Vec<usize> {
        self.zero_orders().into_iter().map(|k| 2 * k).collect()
    }

    /// Number of squares for lattice surfaces.
    pub fn squares(&self) -> Option<usize> {
        match &self.representation {
            Representation::Torus => Some(1),
            Representation::Origami { h, .. } => Some(h.len()),
            Representation::UnfoldedPolygon(_) => None,
        }
    }

    pub fn is_lattice(&self) -> bool {
        self.squares().is_some()
    }

    /// `6g − 6 + 3V`, the number of edges of a triangulation with vertices at
    /// the `V` marked points.
    pub fn max_level(&self) -> usize {
        6 * self.genus + 3 * self.marked_points() - 6
    }

    /// Largest level of a complex built from one parallel class of lattice
    /// saddle connections: one per square.
    pub fn parallel_level(&self) -> usize {
        self.squares().unwrap_or(1)
    }
}

impl fmt::Display for FlatSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.representation {
            Representation::Torus => write!(f, "torus")?,
            Representation::Origami { h, v } => write!(f, "origami h={h} v={v}")?,
            Representation::UnfoldedPolygon(u) => write!(f, "unfolded polygon ({} copies)", u.copies)?,
        }
        write!(f, ", genus {}, cone angles {:?}·2π", self.genus, self.cone_angles)
    }
}

pub fn build_torus() -> FlatSurface {
    FlatSurface {
        representation: Representation::Torus,
        genus: 1,
        cone_angles: vec![1],
        raw_area: 1.0,
    }
}

pub fn build_origami(h: Perm, v: Perm) -> Result<FlatSurface, SurfaceError> {
    if h.len() != v.len() {
        return Err(SurfaceError::DegreeMismatch(h.len(), v.len()));
    }
    if h.is_empty() || !origami::is_connected(&h, &v) {
        return Err(SurfaceError::NotConnected);
    }
    let cone_angles = origami::vertex_cycles(&h, &v).iter().map(|c| c.len()).collect::<Vec<_>>();
    let n = h.len();
    // Σ (k_i − 1) = 2g − 2
    let genus = (n - cone_angles.len() + 2) / 2;
    Ok(FlatSurface {
        representation: Representation::Origami { h, v },
        genus,
        cone_angles,
        raw_area: n as f64,
    })
}

pub use polygon::unfold_polygon;

/// Planar holonomy vector.
pub type Vec2 = [f64; 2];

/// Identifies a saddle connection independently of its holonomy rounding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConnId {
    /// Leaves the corner of `square` that opens in the direction `(h, v)`.
    Lattice { square: usize, h: i64, v: i64 },
    /// Leaves `corner` of `triangle`; `coef` expands the holonomy in the edge basis.
    Polygon { triangle: usize, corner: usize, coef: Vec<i32> },
}

/// A saddle connection, oriented so that `v > 0` or `v = 0, h > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleConnection {
    /// Holonomy after normalization to area 1.
    pub hol: Vec2,
    /// Unnormalized integer holonomy on lattice surfaces.
    pub lattice: Option<[i64; 2]>,
    pub start: usize,
    pub end: usize,
    pub id: ConnId,
}

impl SaddleConnection {
    /// `h(γ) = |hol₀|`.
    pub fn h(&self) -> f64 {
        self.hol[0].abs()
    }

    pub fn v(&self) -> f64 {
        self.hol[1].abs()
    }

    /// `|γ| = max(h(γ), v(γ))`.
    pub fn length(&self) -> f64 {
        self.h().max(self.v())
    }

    pub fn theta(&self) -> f64 {
        theta_of(self.hol)
    }
}

/// Angle in `[0, π)` rotating `hol` to the vertical.
pub fn theta_of(hol: Vec2) -> f64 {
    let [h, v] = hol;
    // Adding 0.0 turns atan2's -0.0 into 0.0.
    let t = (-h).atan2(v) + 0.0;
    let pi = std::f64::consts::PI;
    let t = if t < 0.0 { t + pi } else { t };
    if t >= pi {
        0.0
    } else {
        t
    }
}

/// Lines-through-the-origin distance on `[0, π)`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let d = (a - b).rem_euclid(pi);
    d.min(pi - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_basics() {
        let t = build_torus();
        assert_eq!(t.genus, 1);
        assert_eq!(t.area(), 1.0);
        assert_eq!(t.zero_orders(), Vec::<usize>::new());
        assert_eq!(t.max_level(), 3);
    }

    #[test]
    fn trivial_origami_is_torus() {
        let s = build_origami(Perm::identity(1), Perm::identity(1)).unwrap();
        assert_eq!(s.genus, 1);
        assert_eq!(s.cone_angles, vec![1]);
    }

    #[test]
    fn l_origami_has_one_double_zero() {
        let h = Perm::parse_cycles("(1 2)", Some(3)).unwrap();
        let v = Perm::parse_cycles("(1 3)", Some(3)).unwrap();
        let s = build_origami(h, v).unwrap();
        assert_eq!(s.genus, 2);
        assert_eq!(s.zero_orders(), vec![2]);
        assert_eq!(s.quadratic_zero_orders(), vec![4]);
        assert_eq!(s.raw_area, 3.0);
    }

    #[test]
    fn disconnected_origami_is_rejected() {
        let id = Perm::identity(2);
        assert_eq!(build_origami(id.clone(), id), Err(SurfaceError::NotConnected));
        assert!(matches!(
            build_origami(Perm::identity(2), Perm::identity(3)),
            Err(SurfaceError::DegreeMismatch(2, 3))
        ));
    }

    #[test]
    fn angle_conventions() {
        let pi = std::f64::consts::PI;
        assert_eq!(theta_of([0.0, 1.0]), 0.0);
        assert!((theta_of([1.0, 0.0]) - pi / 2.0).abs() < 1e-15);
        assert!((theta_of([-1.0, 1.0]) - pi / 4.0).abs() < 1e-15);
        assert!((theta_of([1.0, 1.0]) - 3.0 * pi / 4.0).abs() < 1e-15);
        assert!((angle_distance(0.1, pi - 0.1) - 0.2).abs() < 1e-15);
    }
}
