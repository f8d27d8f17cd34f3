use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use schmidt_flat::blocking::{
    bits_for, derive_constants_with_bits, final_certificate, opening_interval, verify_pj, write_certificate,
    write_constants, BlockingAlice, Mode, NearestDangerBob,
};
use schmidt_flat::game::{parse_transcript, play as play_game, write_transcript, Ball, NullBlocker, RandomBob, ScriptedBob, Strategy};
use schmidt_flat::iet::{all_orderings, orbit_stats, parse_iet, reorder, write_stats};
use schmidt_flat::scalar::DEFAULT_ANGLE_BITS;
use schmidt_flat::surface::{enumerate_saddle_connections, parse_surface, write_spectrum, Badness, FlatSurface};
use schmidt_flat::{Rational, Real, Scalar};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_surface(path: &Path) -> Result<FlatSurface> {
    parse_surface(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn scalar<S: Scalar>(name: &str, s: &str) -> Result<S> {
    S::parse_token(s).ok_or_else(|| anyhow!("--{name}: cannot parse {s:?}"))
}

fn tag<S: Scalar>() -> &'static str {
    if S::EXACT {
        "exact"
    } else {
        "approx"
    }
}

pub fn spectrum(surface: &Path, lmax: f64) -> Result<String> {
    let s = load_surface(surface)?;
    Ok(write_spectrum(&enumerate_saddle_connections(&s, lmax)?))
}

pub fn constants<S: Real>(surface: &Path, beta: &str, rounds: usize, seed: u64) -> Result<String> {
    let s = load_surface(surface)?;
    let beta: S = scalar("beta", beta)?;
    let bits = bits_for(rounds, &beta);
    let open = opening_interval(seed, &S::pi_approx(bits));
    Ok(write_constants(&derive_constants_with_bits(&s, beta, &open.length(), bits)?))
}

/// Smallest interval length float games accept, relative to angles near 1.
const FLOAT_RESOLUTION: f64 = 1e-11;

pub struct PlayArgs {
    pub surface: PathBuf,
    pub beta: String,
    pub rounds: usize,
    pub lmax: f64,
    pub seed: u64,
    pub bob: String,
    pub null_alice: bool,
}

enum BobKind<S> {
    Nearest,
    Random,
    Script(Vec<Ball<S>>),
}

fn bob_kind<S: Scalar>(s: &str) -> Result<BobKind<S>> {
    match s {
        "nearest" => Ok(BobKind::Nearest),
        "random" => Ok(BobKind::Random),
        _ => {
            let Some(path) = s.strip_prefix("script:") else {
                bail!("--bob: expected nearest, random or script:<path>, got {s:?}");
            };
            let path = Path::new(path);
            let tr = parse_transcript::<S>(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            let balls: Vec<Ball<S>> = tr.bob_balls().into_iter().cloned().collect();
            if balls.is_empty() {
                bail!("{}: no Bob moves", path.display());
            }
            Ok(BobKind::Script(balls))
        }
    }
}

/// Returns the report (constants, certificate) and the transcript.
pub fn play<S: Real>(args: &PlayArgs) -> Result<(String, String)> {
    let surface = load_surface(&args.surface)?;
    let beta: S = scalar("beta", &args.beta)?;
    if args.rounds == 0 {
        bail!("--rounds must be positive");
    }
    let kind = bob_kind::<S>(&args.bob)?;
    let sp = Arc::new(enumerate_saddle_connections(&surface, args.lmax)?);
    let bits = bits_for(args.rounds, &beta);
    let open = match &kind {
        BobKind::Script(balls) => balls[0].clone(),
        _ => opening_interval(args.seed, &S::pi_approx(bits)),
    };
    if !S::EXACT {
        // Bob's last interval must still be resolvable around its centre.
        let last = beta.as_f64().powi(args.rounds as i32) * open.length().as_f64();
        if last < FLOAT_RESOLUTION {
            bail!(
                "{} rounds at beta {} shrink intervals to {last:e}, below double resolution; use --exact",
                args.rounds,
                args.beta
            );
        }
    }
    let k = derive_constants_with_bits(&surface, beta, &open.length(), bits)?;
    let cfg = k.game_config()?;
    let mut alice: Box<dyn Strategy<S>> = if args.null_alice {
        Box::new(NullBlocker)
    } else {
        Box::new(BlockingAlice::new(k.clone(), sp.clone()))
    };
    let mut bob: Box<dyn Strategy<S>> = match kind {
        BobKind::Nearest => Box::new(NearestDangerBob::new(sp.clone(), open, bits)),
        BobKind::Random => Box::new(RandomBob::new(open)),
        BobKind::Script(balls) => {
            let mut b = ScriptedBob::new(balls);
            b.resign_when_done = true;
            Box::new(b)
        }
    };
    let tr = play_game(&cfg, alice.as_mut(), bob.as_mut(), args.rounds, args.seed)?;
    tr.replay().map_err(|e| anyhow!("transcript does not replay: {e}"))?;
    let mut cert = verify_pj(&tr, &sp, &k, Mode::Truncated)?;
    if let Some(last) = &tr.final_interval {
        cert.final_check = Some(final_certificate(last.c0(), &sp, &k)?);
    }

    let mut report = String::new();
    let _ = writeln!(report, "# play v1");
    let _ = writeln!(report, "surface {surface}");
    let _ = writeln!(report, "lmax {}", args.lmax);
    let _ = writeln!(report, "seed {}", args.seed);
    let _ = writeln!(report, "alice {}", if args.null_alice { "null" } else { "blocking" });
    let _ = writeln!(report, "bob {}", args.bob);
    let _ = writeln!(report, "rounds {}", tr.bob_balls().len());
    report.push_str(&write_constants(&k));
    report.push_str(&write_certificate(&cert));
    Ok((report, write_transcript(&tr)))
}

pub enum Direction {
    Value(String),
    Transcript(PathBuf),
}

fn direction<S: Scalar>(d: &Direction) -> Result<S> {
    match d {
        Direction::Value(s) => scalar("psi", s),
        Direction::Transcript(path) => {
            let tr = parse_transcript::<S>(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            let last = tr.bob_balls().last().map(|b| b.c0().clone());
            last.ok_or_else(|| anyhow!("{}: no Bob moves", path.display()))
        }
    }
}

fn badness_report<S: Scalar>(out: &mut String, psi: &S, b: &Badness<S>) {
    let t = tag::<S>();
    let _ = writeln!(out, "psi {} {t} # {:e}", psi.to_token(), psi.as_f64());
    let _ = writeln!(out, "value {} {t} # {:e}", b.value.to_token(), b.value.as_f64());
    match b.witness.lattice {
        Some([h, v]) => {
            let _ = writeln!(out, "witness {h} {v} exact");
        }
        None => {
            let _ = writeln!(out, "witness {:e} {:e} approx", b.witness.hol[0], b.witness.hol[1]);
        }
    }
}

pub fn badness(surface: &Path, source: &Direction, lmax: f64, exact: bool) -> Result<String> {
    let s = load_surface(surface)?;
    let sp = enumerate_saddle_connections(&s, lmax)?;
    let mut out = String::new();
    let _ = writeln!(out, "# badness v1");
    let _ = writeln!(out, "surface {s}");
    let _ = writeln!(out, "lmax {lmax}");
    if exact {
        let psi: Rational = direction(source)?;
        let b = sp.badness_exact(&psi, DEFAULT_ANGLE_BITS)?;
        badness_report(&mut out, &psi, &b);
    } else {
        let psi: f64 = direction(source)?;
        let b = sp.badness(psi).ok_or_else(|| anyhow!("empty spectrum at lmax {lmax}"))?;
        badness_report(&mut out, &psi, &b);
    }
    Ok(out)
}

pub fn iet(path: &Path, horizon: usize, all: bool) -> Result<String> {
    let t = parse_iet(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    if horizon == 0 {
        bail!("--horizon must be positive");
    }
    if !all {
        return Ok(write_stats(&orbit_stats(&t, horizon)));
    }
    let mut out = String::new();
    for sigma in all_orderings(t.len()) {
        let r = reorder(&t, &sigma)?;
        let s: Vec<String> = sigma.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "ordering {}", s.join(" "));
        out.push_str(&write_stats(&orbit_stats(&r, horizon)));
    }
    Ok(out)
}

pub fn replay<S: Scalar>(path: &Path) -> Result<String> {
    let tr = parse_transcript::<S>(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    tr.replay().map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(write_transcript(&tr))
}
