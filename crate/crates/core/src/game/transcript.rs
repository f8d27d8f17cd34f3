//! Line-oriented text form of a [`Transcript`].
//!
//! ```text
//! # transcript v1
//! # variant absolute
//! # alpha 0
//! # beta 1/16
//! # blocks 1
//! # space circle 3141592653589793/1000000000000000
//! 1 bob ball 1/2 1/8
//! 1 alice blocks 1/2|5/8 1/128|1/128
//! 2 bob ball 3/8,0 1/32
//! 5 bob resign - -
//! ```
//!
//! Balls inside one record are separated by `|` and coordinates by `,`.
//! Exact scalars are written as `p/q`, so rational transcripts round-trip
//! bit for bit.

use std::fmt::Write as _;

use super::{Ball, GameConfig, MoveRecord, Mover, Payload, Space, Transcript, Variant};
use crate::scalar::Scalar;

pub fn write_transcript<S: Scalar>(t: &Transcript<S>) -> String {
    let c = &t.config;
    let mut out = String::new();
    out.push_str("# transcript v1\n");
    let _ = writeln!(out, "# variant {}", c.variant.name());
    let _ = writeln!(out, "# alpha {}", c.alpha.to_token());
    let _ = writeln!(out, "# beta {}", c.beta.to_token());
    let _ = writeln!(out, "# blocks {}", c.block_count);
    let space = match &c.space {
        Space::Circle { period } => format!("circle {}", period.to_token()),
        Space::Line => "line".to_string(),
        Space::Product { dim } => format!("product {dim}"),
    };
    let _ = writeln!(out, "# space {space}");
    let _ = writeln!(out, "# arithmetic {}", if S::EXACT { "exact" } else { "float" });
    for r in &t.rounds {
        let (kind, balls): (&str, Vec<&Ball<S>>) = match &r.payload {
            Payload::Ball(b) => ("ball", vec![b]),
            Payload::Blocks(v) => ("blocks", v.iter().collect()),
            Payload::Resign => ("resign", Vec::new()),
        };
        let centers = join(balls.iter().map(|b| {
            b.center.iter().map(|x| x.to_token()).collect::<Vec<_>>().join(",")
        }));
        let radii = join(balls.iter().map(|b| b.radius.to_token()));
        let _ = writeln!(out, "{} {} {} {} {}", r.round, r.mover, kind, centers, radii);
    }
    out
}

fn join(items: impl Iterator<Item = String>) -> String {
    let v: Vec<String> = items.collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join("|")
    }
}

fn bad(line: usize, msg: impl Into<String>) -> String {
    format!("line {line}: {}", msg.into())
}

fn scalar<S: Scalar>(line: usize, s: &str) -> Result<S, String> {
    S::parse_token(s).ok_or_else(|| bad(line, format!("bad number `{s}`")))
}

/// Parses the output of [`write_transcript`].
pub fn parse_transcript<S: Scalar>(text: &str) -> Result<Transcript<S>, String> {
    let mut variant = None;
    let mut alpha = S::zero();
    let mut beta = None;
    let mut blocks = 1usize;
    let mut space = None;
    let mut records = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let mut parts = h.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some("variant"), Some(v)) => {
                    variant = Some(Variant::from_name(v).ok_or_else(|| bad(ln, format!("unknown variant `{v}`")))?)
                }
                (Some("alpha"), Some(v)) => alpha = scalar(ln, v)?,
                (Some("beta"), Some(v)) => beta = Some(scalar(ln, v)?),
                (Some("blocks"), Some(v)) => blocks = v.parse().map_err(|_| bad(ln, "bad block count"))?,
                (Some("space"), Some("line")) => space = Some(Space::Line),
                (Some("space"), Some("circle")) => {
                    let p = parts.next().ok_or_else(|| bad(ln, "circle needs a period"))?;
                    space = Some(Space::Circle { period: scalar(ln, p)? });
                }
                (Some("space"), Some("product")) => {
                    let d = parts.next().ok_or_else(|| bad(ln, "product needs a dimension"))?;
                    space = Some(Space::Product {
                        dim: d.parse().map_err(|_| bad(ln, "bad dimension"))?,
                    });
                }
                _ => {}
            }
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(bad(ln, "expected `round mover kind centers radii`"));
        }
        let round: usize = f[0].parse().map_err(|_| bad(ln, "bad round"))?;
        let mover = match f[1] {
            "alice" => Mover::Alice,
            "bob" => Mover::Bob,
            m => return Err(bad(ln, format!("unknown mover `{m}`"))),
        };
        let balls = || -> Result<Vec<Ball<S>>, String> {
            if f[3] == "-" {
                return Ok(Vec::new());
            }
            let cs: Vec<&str> = f[3].split('|').collect();
            let rs: Vec<&str> = f[4].split('|').collect();
            if cs.len() != rs.len() {
                return Err(bad(ln, "center and radius counts differ"));
            }
            cs.iter()
                .zip(&rs)
                .map(|(c, r)| {
                    let center = c.split(',').map(|x| scalar(ln, x)).collect::<Result<Vec<S>, _>>()?;
                    Ok(Ball::new(center, scalar(ln, r)?))
                })
                .collect()
        };
        let payload = match f[2] {
            "ball" => {
                let mut v = balls()?;
                if v.len() != 1 {
                    return Err(bad(ln, "a ball record holds exactly one ball"));
                }
                Payload::Ball(v.remove(0))
            }
            "blocks" => Payload::Blocks(balls()?),
            "resign" => Payload::Resign,
            k => return Err(bad(ln, format!("unknown move kind `{k}`"))),
        };
        records.push(MoveRecord { round, mover, payload });
    }
    let variant = variant.ok_or("missing `# variant` header")?;
    let beta = beta.ok_or("missing `# beta` header")?;
    let space = space.ok_or("missing `# space` header")?;
    let config = GameConfig {
        variant,
        alpha,
        beta,
        block_count: blocks,
        space,
    };
    let mut t = Transcript::new(config);
    for r in records {
        t.push(r);
    }
    Ok(t)
}
