//! The bounded-horizon deciders against the arena solver: every fixture
//! minimal and its unit decrements, then seeded random triples from the
//! populations each decider's precondition admits.

mod common;

use common::{population, restricted_box};
use congames::{
    classify, fixtures, max_finite_drop, membership_decreasing_bounded,
    membership_one_player_certificate, safe_membership, safe_minimal_elements, Game, LoadVector,
};

/// Probe loads at `s`: each minimal, its unit decrements, and the global
/// bound corner.
fn probe_loads(g: &Game, s: congames::StateId) -> Vec<LoadVector> {
    let d = g.dimension();
    let cap = d as u64 * max_finite_drop(g).max(1) * g.num_states() as u64;
    let mut probes = vec![LoadVector::uniform(d, cap), LoadVector::uniform(d, 1)];
    for m in safe_minimal_elements(g, s).unwrap().iter() {
        probes.push(m.clone());
        for i in 0..d {
            if let Some(down) = m.minus_unit(i) {
                probes.push(down);
            }
        }
    }
    probes
}

fn check_applicable_deciders(g: &Game, tally: &mut usize) {
    let class = classify(g);
    for s in g.states() {
        for v in probe_loads(g, s) {
            let truth = safe_membership(g, s, &v).unwrap();
            if class.decreasing {
                assert_eq!(
                    membership_decreasing_bounded(g, s, &v).unwrap(),
                    truth,
                    "bounded search differs at {} load {v}",
                    g.name(s)
                );
                *tally += 1;
            }
            if class.one_player {
                assert_eq!(
                    membership_one_player_certificate(g, s, &v).unwrap(),
                    truth,
                    "certificate search differs at {} load {v}",
                    g.name(s)
                );
                *tally += 1;
            }
        }
    }
}

#[test]
fn fixture_minimals_and_neighbors_agree() {
    let mut tally = 0;
    for g in [
        fixtures::g_loop(),
        fixtures::g_sink(),
        fixtures::g_chain(),
        fixtures::g_pump(),
        fixtures::g_2p(),
        fixtures::g_fork2(),
        fixtures::g_order(),
    ] {
        check_applicable_deciders(&g, &mut tally);
    }
    assert!(tally >= 30, "too few applicable fixture probes: {tally}");
}

#[test]
fn random_triples_agree() {
    let mut tally = 0;
    for g in population(20, 0xb07d, restricted_box(true, false)) {
        check_applicable_deciders(&g, &mut tally);
    }
    for g in population(20, 0xb07d + 1, restricted_box(false, true)) {
        check_applicable_deciders(&g, &mut tally);
    }
    assert!(tally >= 100, "too few random probes: {tally}");
}
