//! Solvers for two-player consumption games: finite arenas whose edges
//! consume or reload `d` independent resources.
//!
//! The controller (box player) tries to keep every resource positive
//! forever. For a state `s`, the safe set collects the initial loads from
//! which that is possible, and the cover set additionally requires play to
//! stay componentwise below the initial load. Both sets are upward closed,
//! so they are represented by the antichain of their minimal elements.
//!
//! The crate provides:
//!
//! * a validated game model and a line-based text format ([`model`],
//!   [`format`]),
//! * antichain algebra and the minimal multi-distance fixpoint
//!   ([`antichain`]),
//! * a general solver over the capped configuration arena plus an
//!   independent route through Streett games ([`solver`]),
//! * faster procedures for decreasing and one-player games ([`restricted`]),
//! * hardness gadget generators and random instances ([`gadgets`]),
//! * a brute-force oracle that enumerates reload choices explicitly
//!   ([`oracle`]).

pub mod antichain;
pub mod fixtures;
pub mod format;
pub mod gadgets;
pub mod model;
pub mod oracle;
pub mod restricted;
pub mod solver;

use std::sync::OnceLock;

/// Vertex budget for explicitly built arenas. Overridable through the
/// `CONSUMPTION_ARENA_LIMIT` environment variable, read once per process.
pub fn arena_limit() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("CONSUMPTION_ARENA_LIMIT")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(10_000_000)
    })
}

/// Largest number of Streett pairs the game solver will expand; the record
/// construction is factorial in this count. Overridable through the
/// `CONSUMPTION_STREETT_PAIRS` environment variable, read once per process.
pub fn streett_pair_limit() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("CONSUMPTION_STREETT_PAIRS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(8)
    })
}

pub use antichain::{min_dist, min_dist_table, Antichain, DistanceGame, ExtVector};
pub use gadgets::{
    eval_qbf, gen_qbf, gen_satunsat, gen_satunsat_with, random_game, random_qbf, shift_variables,
    GadgetError, GammaRule, QbfGadgetOutput, RandomGameFlags, SatUnsatGadgetOutput,
};
pub use model::{
    classify, max_finite_drop, validate_game, Game, GameBuilder, GameClass, Label, LoadVector,
    Owner, ResourceDelta, StateId,
};
pub use restricted::automaton::{is_i_safe, streett_automaton_nonempty};
pub use restricted::bounded::{membership_decreasing_bounded, membership_one_player_certificate};
pub use restricted::buchi::{emptiness_decreasing, solve_generalized_buchi, GenBuchiGame};
pub use restricted::unfold::{
    build_c_pi, build_c_pi_with, build_hat_game, min_safe_decreasing, min_safe_one_player,
    min_safe_one_player_jobs, CpiEdgeRule,
};
pub use restricted::{Permutation, ReloadSet, RestrictedError};
pub use solver::streett::{
    from_streett, solve_streett_game, to_streett, StreettConvertError, StreettGame, StreettPair,
};
pub use solver::{
    cover_membership, cover_minimal_elements, prune_unsafe_states, safe_emptiness,
    safe_membership, safe_minimal_elements, safe_state_mask, SolveError,
};
