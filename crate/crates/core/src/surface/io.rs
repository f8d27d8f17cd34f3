//! Text formats for surfaces and spectra.
//!
//! ```text
//! # an L-shaped origami
//! kind = origami
//! h = (1 2)
//! v = (1 3)
//! ```
//!
//! Polygons list their vertex angles as multiples of `π` and the leading
//! edge lengths:
//!
//! ```text
//! kind = polygon
//! angles = 1/5 2/5 2/5
//! lengths = 1
//! ```

use std::fmt::Write as _;

use super::spectrum::DirectionSpectrum;
use super::{build_origami, build_torus, unfold_polygon, FlatSurface, Perm};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceSpec {
    Torus,
    Origami { h: String, v: String },
    Polygon { angles: Vec<f64>, lengths: Vec<f64> },
}

fn number(line: usize, tok: &str) -> Result<f64, String> {
    Rational::parse_token(tok)
        .map(|r| r.as_f64())
        .ok_or_else(|| format!("line {line}: bad number `{tok}`"))
}

/// Parses a surface description and builds the surface.
pub fn parse_surface(text: &str) -> Result<FlatSurface, String> {
    let mut kind: Option<(usize, String)> = None;
    let mut fields: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {ln}: expected `key = value`"))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if key == "kind" {
            kind = Some((ln, value));
        } else {
            fields.push((ln, key, value));
        }
    }
    let (kind_line, kind) = kind.ok_or("line 1: missing `kind = …`")?;
    let get = |name: &str| fields.iter().find(|f| f.1 == name);
    for (ln, key, _) in &fields {
        let allowed: &[&str] = match kind.as_str() {
            "torus" => &[],
            "origami" => &["h", "v"],
            "polygon" => &["angles", "lengths"],
            _ => &[],
        };
        if !allowed.contains(&key.as_str()) {
            return Err(format!("line {ln}: unexpected key `{key}` for kind `{kind}`"));
        }
    }
    match kind.as_str() {
        "torus" => Ok(build_torus()),
        "origami" => {
            let (hl, _, h) = get("h").ok_or(format!("line {kind_line}: origami needs `h`"))?;
            let (vl, _, v) = get("v").ok_or(format!("line {kind_line}: origami needs `v`"))?;
            let hp = Perm::parse_cycles(h, None).map_err(|e| format!("line {hl}: {e}"))?;
            let vp = Perm::parse_cycles(v, None).map_err(|e| format!("line {vl}: {e}"))?;
            let n = hp.len().max(vp.len());
            let hp = Perm::parse_cycles(h, Some(n)).map_err(|e| format!("line {hl}: {e}"))?;
            let vp = Perm::parse_cycles(v, Some(n)).map_err(|e| format!("line {vl}: {e}"))?;
            build_origami(hp, vp).map_err(|e| format!("line {kind_line}: {e}"))
        }
        "polygon" => {
            let (al, _, a) = get("angles").ok_or(format!("line {kind_line}: polygon needs `angles`"))?;
            let angles = a.split_whitespace().map(|t| number(*al, t)).collect::<Result<Vec<_>, _>>()?;
            let lengths = match get("lengths") {
                Some((ll, _, l)) => l.split_whitespace().map(|t| number(*ll, t)).collect::<Result<Vec<_>, _>>()?,
                None => vec![1.0; angles.len().saturating_sub(2)],
            };
            unfold_polygon(&angles, &lengths).map_err(|e| format!("line {al}: {e}"))
        }
        other => Err(format!("line {kind_line}: unknown surface kind `{other}`")),
    }
}

/// One line per saddle connection: `theta length h v start end tag`.
///
/// Lattice holonomies are printed as raw integers, with the normalization
/// factor in the header; other holonomies are normalized decimals.
pub fn write_spectrum(spec: &DirectionSpectrum) -> String {
    let mut out = String::new();
    let s = spec.surface();
    let _ = writeln!(out, "# spectrum v1");
    let _ = writeln!(out, "# surface {s}");
    let _ = writeln!(out, "# lmax {}", spec.lmax);
    let _ = writeln!(out, "# entries {}", spec.len());
    match s.squares() {
        Some(n) => {
            let _ = writeln!(out, "# holonomy raw integers; lengths scaled by 1/sqrt({n})");
        }
        None => {
            let _ = writeln!(out, "# holonomy normalized to area 1");
        }
    }
    let _ = writeln!(out, "# theta length h v start end");
    for c in spec.connections() {
        let (h, v, tag) = match c.lattice {
            Some([h, v]) => (h.to_string(), v.to_string(), "exact"),
            None => (format!("{:.17e}", c.hol[0]), format!("{:.17e}", c.hol[1]), "approx"),
        };
        let _ = writeln!(
            out,
            "{:.17} {:.17} {} {} {} {} {}",
            c.theta(),
            c.length(),
            h,
            v,
            c.start,
            c.end,
            tag
        );
    }
    out
}
