//! Serialization round trips and parser robustness. Parsing must be a left
//! inverse of serialization on every game we can generate, and the parser
//! must reject corrupted input with a positioned error instead of panicking.

mod common;

use common::{population, ParamBox};
use congames::format::{parse_game, serialize_game};
use congames::fixtures::{g_2p, g_dia, g_dp, g_order, g_pump, g_qbf3};
use congames::Game;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn wide_box() -> ParamBox {
    ParamBox {
        max_states: 8,
        max_dim: 4,
        max_ell: 5,
        one_player: false,
        decreasing: false,
    }
}

#[test]
fn serialize_then_parse_is_identity_on_random_games() {
    for (k, g) in population(200, 0x707d, wide_box()).iter().enumerate() {
        let text = serialize_game(g);
        let back = parse_game(&text).unwrap_or_else(|e| {
            panic!("game {k} failed to re-parse at line {}: {e}", e.line())
        });
        assert_eq!(serialize_game(&back), text, "round trip drifted on game {k}");
    }
}

/// Corrupt one line of a valid serialization at a time: splice in a random
/// edit (truncation, token swap, junk injection, duplication). The parser
/// must return a positioned error or accept the text, never panic.
#[test]
fn mutated_serializations_never_crash_the_parser() {
    let sources: Vec<Game> = {
        let mut v = vec![g_pump(), g_2p(), g_order(), g_dia(), g_qbf3(), g_dp()];
        v.extend(population(14, 0xf422, wide_box()));
        v
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xda7a);
    let junk = ["w", "-", "3,", "edge", "state", "dimension", "@", "1,2,3", "box", "\u{fffd}"];
    let mut rejected = 0usize;
    let mut accepted = 0usize;
    for g in &sources {
        let text = serialize_game(g);
        let lines: Vec<&str> = text.lines().collect();
        for _ in 0..100 {
            let target = rng.random_range(0..lines.len());
            let mut mutated: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
            match rng.random_range(0..5) {
                0 => {
                    let cut = rng.random_range(0..=mutated[target].len());
                    mutated[target].truncate(cut);
                }
                1 => {
                    mutated[target] = format!(
                        "{} {}",
                        mutated[target],
                        junk[rng.random_range(0..junk.len())]
                    );
                }
                2 => {
                    mutated[target] = junk[rng.random_range(0..junk.len())].to_string();
                }
                3 => {
                    let dup = mutated[target].clone();
                    mutated.insert(target, dup);
                }
                _ => {
                    mutated.remove(target);
                }
            }
            let mutated = mutated.join("\n");
            match parse_game(&mutated) {
                Ok(back) => {
                    accepted += 1;
                    // Whatever survives mutation must still round trip.
                    let again = serialize_game(&back);
                    assert!(parse_game(&again).is_ok());
                }
                Err(e) => {
                    rejected += 1;
                    assert!(e.line() >= 1, "error without a position: {e}");
                }
            }
        }
    }
    // Sanity: the mutator actually produces both outcomes.
    assert!(rejected > 200, "mutator too gentle: only {rejected} rejections");
    assert!(accepted > 20, "mutator too harsh: only {accepted} accepts");
}

#[test]
fn hand_written_near_misses_are_rejected_with_positions() {
    let cases = [
        ("dimension 0\n", 1),
        ("dimension 2\nstate s diamond\nedge s s w,w\n", 3),
        ("dimension 1\nstate s box\nedge s t -1\n", 3),
        ("dimension 1\nstate s box\nedge s s 1\n", 3),
        ("dimension 1\nstate s box\nstate s diamond\n", 3),
        ("state s box\ndimension 1\n", 1),
        ("dimension 1\nstate s box\nedge s s -1,-1\n", 3),
        ("dimension 1\nstate s frog\n", 2),
    ];
    for (text, line) in cases {
        let err = parse_game(text).expect_err("near miss must be rejected");
        assert_eq!(err.line(), line, "wrong position for {text:?}: {err}");
    }
}
