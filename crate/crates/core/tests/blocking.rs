use std::sync::Arc;

use schmidt_flat::blocking::{
    derive_constants_with_bits, final_certificate, opening_interval, verify_pj, BlockingAlice, Mode, NearestDangerBob,
};
use schmidt_flat::blocking::{alice_move, bits_for};
use schmidt_flat::game::{play, validate_move, Ball, MoveRecord, Mover, NullBlocker, Payload, TargetBob};
use schmidt_flat::surface::{build_torus, enumerate_saddle_connections};
use schmidt_flat::{Rational, Real, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

#[test]
fn torus_run_certifies() {
    let surface = build_torus();
    let sp = Arc::new(enumerate_saddle_connections(&surface, 1000.0).unwrap());
    let beta = q(1, 16);
    let rounds = 40;
    let bits = bits_for(rounds, &beta);
    let pi = Rational::pi_approx(bits);
    let open = opening_interval(1, &pi);
    let k = derive_constants_with_bits(&surface, beta, &open.length(), bits).unwrap();
    let cfg = k.game_config().unwrap();
    let mut alice = BlockingAlice::new(k.clone(), sp.clone());
    let mut bob = NearestDangerBob::new(sp.clone(), open, bits);
    let tr = play(&cfg, &mut alice, &mut bob, rounds, 1).unwrap();
    assert_eq!(tr.bob_balls().len(), rounds);
    tr.replay().unwrap();
    let cert = verify_pj(&tr, &sp, &k, Mode::Truncated).unwrap();
    assert!(cert.pass, "{:?}", cert.violation);
    assert!(cert.separation_failures.is_empty());
    assert!(cert.diameter_failures.is_empty());
    assert_eq!(cert.j0, Some(13));
    let psi = tr.final_interval.as_ref().unwrap().c0().clone();
    let f = final_certificate(&psi, &sp, &k).unwrap();
    assert!(f.pass);
}

#[test]
fn null_alice_fails() {
    let surface = build_torus();
    let sp = Arc::new(enumerate_saddle_connections(&surface, 1000.0).unwrap());
    let beta = q(1, 16);
    let bits = bits_for(40, &beta);
    let pi = Rational::pi_approx(bits);
    let open = opening_interval(1, &pi);
    let k = derive_constants_with_bits(&surface, beta, &open.length(), bits).unwrap();
    let cfg = k.game_config().unwrap();
    let open = schmidt_flat::game::Ball::interval(pi.half() + pi.clone() / q(32, 1), pi.clone() / q(8, 1));
    let mut bob = TargetBob::new(open, pi.half());
    let tr = play(&cfg, &mut NullBlocker, &mut bob, 40, 1).unwrap();
    let cert = verify_pj(&tr, &sp, &k, Mode::Truncated).unwrap();
    let v = cert.violation.expect("violation");
    assert_eq!(v.edges[0].0, [1, 0]);
    let psi = tr.final_interval.as_ref().unwrap().c0().clone();
    let f = final_certificate(&psi, &sp, &k).unwrap();
    assert!(!f.pass);
    assert_eq!(f.witness.lattice, Some([1, 0]));
}

fn torus_constants() -> (schmidt_flat::blocking::StrategyConstants<Rational>, Arc<schmidt_flat::surface::DirectionSpectrum>) {
    let surface = build_torus();
    let sp = Arc::new(enumerate_saddle_connections(&surface, 50.0).unwrap());
    let pi = Rational::pi_approx(384);
    let k = derive_constants_with_bits(&surface, q(1, 16), &(pi / q(4, 1)), 384).unwrap();
    (k, sp)
}

#[test]
fn block_centres_on_lone_danger() {
    let (k, sp) = torus_constants();
    let c1 = k.c_i(1).clone();
    // c₁² ≤ |I|·L·L∂ < c₁²/β for (1,0), whose direction is π̃/2.
    let len = c1.clone() * c1.clone() * q(2, 1);
    let centre = k.period.half() + len.clone() / q(8, 1);
    let ball = Ball::interval(centre, len.half());
    let st = alice_move(&k, &sp, &ball, 1).unwrap();
    assert_eq!(st.levels[0].omega.len(), 1);
    assert_eq!(st.levels[0].omega[0].longest().raw, [1, 0]);
    assert_eq!(st.blocks.len(), 1);
    assert_eq!(*st.blocks[0].c0(), k.period.half());
    assert_eq!(st.blocks[0].length(), k.beta.clone() * ball.length());
    let cfg = k.game_config().unwrap();
    let history = vec![MoveRecord { round: 1, mover: Mover::Bob, payload: Payload::Ball(ball) }];
    let mv = MoveRecord { round: 1, mover: Mover::Alice, payload: Payload::Blocks(st.blocks) };
    assert_eq!(validate_move(&cfg, &history, &mv), Ok(()));
}

#[test]
fn empty_danger_blocks_the_centre() {
    let (k, sp) = torus_constants();
    let ball = Ball::interval(q(1, 3), q(1, 100));
    let st = alice_move(&k, &sp, &ball, 1).unwrap();
    assert!(st.levels.iter().all(|l| l.omega.is_empty()));
    assert_eq!(st.blocks, vec![Ball::interval(q(1, 3), q(1, 1600))]);
}

fn torus_game(seed: u64, rounds: usize) -> (schmidt_flat::blocking::StrategyConstants<Rational>, Arc<schmidt_flat::surface::DirectionSpectrum>, Ball<Rational>) {
    let surface = build_torus();
    let sp = Arc::new(enumerate_saddle_connections(&surface, 1000.0).unwrap());
    let beta = q(1, 16);
    let bits = bits_for(rounds, &beta);
    let open = opening_interval(seed, &Rational::pi_approx(bits));
    let k = derive_constants_with_bits(&surface, beta, &open.length(), bits).unwrap();
    (k, sp, open)
}

#[test]
fn random_and_scripted_bobs_are_blocked() {
    for seed in [7u64, 8, 9] {
        let (k, sp, open) = torus_game(seed, 40);
        let cfg = k.game_config().unwrap();
        let mut alice = BlockingAlice::new(k.clone(), sp.clone());
        let mut bob = schmidt_flat::game::RandomBob::new(open.clone());
        let tr = play(&cfg, &mut alice, &mut bob, 40, seed).unwrap();
        tr.replay().unwrap();
        let cert = verify_pj(&tr, &sp, &k, Mode::Truncated).unwrap();
        assert!(cert.pass, "seed {seed}: {:?}", cert.violation);

        // Replaying Bob's balls against a fresh Alice reproduces the game.
        let script: Vec<Ball<Rational>> = tr.bob_balls().into_iter().cloned().collect();
        let mut alice2 = BlockingAlice::new(k.clone(), sp.clone());
        let mut scripted = schmidt_flat::game::ScriptedBob::new(script);
        let tr2 = play(&cfg, &mut alice2, &mut scripted, 40, seed + 100).unwrap();
        assert_eq!(tr2.rounds, tr.rounds);
        assert!(verify_pj(&tr2, &sp, &k, Mode::Truncated).unwrap().pass);
    }
}

#[test]
fn same_seed_same_transcript() {
    let run = || {
        let (k, sp, open) = torus_game(3, 20);
        let cfg = k.game_config().unwrap();
        let bits = k.bits;
        play(&cfg, &mut BlockingAlice::new(k, sp.clone()), &mut NearestDangerBob::new(sp, open, bits), 20, 3).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn strict_mode_reports_short_spectrum() {
    let (k, sp, open) = torus_game(1, 30);
    let cfg = k.game_config().unwrap();
    let bits = k.bits;
    let tr = play(&cfg, &mut BlockingAlice::new(k.clone(), sp.clone()), &mut NearestDangerBob::new(sp.clone(), open, bits), 30, 1)
        .unwrap();
    let err = verify_pj(&tr, &sp, &k, Mode::Strict).unwrap_err();
    assert!(matches!(err, schmidt_flat::blocking::BlockingError::IncompleteSpectrum { .. }), "{err}");
}

#[test]
fn l_origami_moves_are_legal() {
    let h = schmidt_flat::surface::Perm::parse_cycles("(1 2)", Some(3)).unwrap();
    let v = schmidt_flat::surface::Perm::parse_cycles("(1 3)", Some(3)).unwrap();
    let surface = schmidt_flat::surface::build_origami(h, v).unwrap();
    let sp = Arc::new(enumerate_saddle_connections(&surface, 30.0).unwrap());
    let beta = q(1, 16);
    let bits = bits_for(8, &beta);
    let open = opening_interval(4, &Rational::pi_approx(bits));
    let k = derive_constants_with_bits(&surface, beta, &open.length(), bits).unwrap();
    assert_eq!(k.m, 3);
    let cfg = k.game_config().unwrap();
    let mut alice = BlockingAlice::new(k.clone(), sp.clone());
    let mut bob = NearestDangerBob::new(sp.clone(), open, bits);
    let tr = play(&cfg, &mut alice, &mut bob, 8, 4).unwrap();
    tr.replay().unwrap();
    assert!(alice.states.iter().all(|s| s.blocks.len() == 3));
    assert!(verify_pj(&tr, &sp, &k, Mode::Truncated).unwrap().pass);
}

mod legality {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn alice_move_is_always_legal(h in -20i64..20, v in 1i64..20, scale in 1i64..16, shift in -8i64..8) {
            let (k, sp) = torus_constants();
            let c1 = k.c_i(1).clone();
            let theta: Rational = schmidt_flat::complexes::lattice_theta([h, v], 384);
            let len = c1.clone() * c1.clone() * q(scale, 1);
            let ball = Ball::interval(theta + len.clone() * q(shift, 17), len.half());
            let st = alice_move(&k, &sp, &ball, 1).unwrap();
            let cfg = k.game_config().unwrap();
            let history = vec![MoveRecord { round: 1, mover: Mover::Bob, payload: Payload::Ball(ball.clone()) }];
            let mv = MoveRecord { round: 1, mover: Mover::Alice, payload: Payload::Blocks(st.blocks.clone()) };
            prop_assert_eq!(validate_move(&cfg, &history, &mv), Ok(()));
            for b in &st.blocks {
                prop_assert_eq!(b.length(), k.beta.clone() * ball.length());
            }
        }
    }
}
