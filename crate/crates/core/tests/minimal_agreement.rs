//! The restricted minimal-safe procedures against the general solver on
//! populations matching their preconditions, and the fixpoint telemetry
//! bounds on every unfolding those runs produce.

mod common;

use common::{loads, population, restricted_box};
use congames::antichain::min_dist_table;
use congames::solver::PruneError;
use congames::{
    build_c_pi, build_hat_game, classify, max_finite_drop, min_safe_decreasing,
    min_safe_one_player, prune_unsafe_states, safe_minimal_elements, DistanceGame, Permutation,
};

#[test]
fn one_player_route_matches_the_general_solver() {
    for g in population(40, 0x091, restricted_box(true, false)) {
        assert!(classify(&g).one_player);
        for s in g.states() {
            let fast = min_safe_one_player(&g, s).unwrap();
            let general = safe_minimal_elements(&g, s).unwrap();
            assert_eq!(loads(&fast), loads(&general));
        }
    }
}

#[test]
fn decreasing_route_matches_the_general_solver() {
    for g in population(40, 0xdec, restricted_box(false, true)) {
        assert!(classify(&g).decreasing);
        for s in g.states() {
            let fast = min_safe_decreasing(&g, s).unwrap();
            let general = safe_minimal_elements(&g, s).unwrap();
            assert_eq!(loads(&fast), loads(&general));
        }
    }
}

/// Telemetry bounds for one distance game: fixpoint within `path_bound`
/// sweeps and no antichain beyond (path_bound·ℓ)^d.
fn assert_fixpoint_bounds(dg: &DistanceGame, path_bound: u64) {
    let table = min_dist_table(dg);
    assert!(
        (table.iterations as u64) <= path_bound,
        "fixpoint took {} sweeps, path bound {}",
        table.iterations,
        path_bound
    );
    let ell = max_finite_drop(dg.game()).max(1);
    let cap = path_bound
        .saturating_mul(ell)
        .saturating_pow(dg.game().dimension() as u32);
    assert!(
        (table.max_antichain_len as u64) <= cap,
        "antichain grew to {}, bound {}",
        table.max_antichain_len,
        cap
    );
}

#[test]
fn unfoldings_respect_the_fixpoint_bounds() {
    let mut unfoldings = 0;
    for g in population(25, 0x091, restricted_box(true, false)) {
        let pruned = match prune_unsafe_states(&g) {
            Ok(p) => p,
            Err(PruneError::AllStatesUnsafe) => continue,
            Err(e) => panic!("prune failed: {e}"),
        };
        for pi in Permutation::all(pruned.dimension()) {
            let dg = build_c_pi(&pruned, &pi).unwrap();
            // A general distance game reaches its fixpoint within its own
            // state count.
            let bound = dg.game().num_states() as u64;
            assert_fixpoint_bounds(&dg, bound);
            unfoldings += 1;
        }
    }
    for g in population(25, 0xdec, restricted_box(false, true)) {
        let pruned = match prune_unsafe_states(&g) {
            Ok(p) => p,
            Err(PruneError::AllStatesUnsafe) => continue,
            Err(e) => panic!("prune failed: {e}"),
        };
        let dg = build_hat_game(&pruned).unwrap();
        // The reload-set unfolding has acyclic paths of at most |S|·d+1
        // states despite its exponential vertex count.
        let bound = (pruned.num_states() * pruned.dimension() + 1) as u64;
        assert_fixpoint_bounds(&dg, bound);
        unfoldings += 1;
    }
    assert!(unfoldings >= 15, "population too degenerate: {unfoldings}");
}
