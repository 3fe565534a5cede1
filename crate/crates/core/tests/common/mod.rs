//! Shared helpers for the integration suites: seeded random-game
//! populations mirroring the acceptance parameter boxes, plus small
//! conveniences for comparing antichains.

// Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use congames::gadgets::{random_game, RandomGameFlags};
use congames::{Antichain, Game, LoadVector};

pub fn lv(components: &[u64]) -> LoadVector {
    LoadVector::new(components.to_vec()).unwrap()
}

/// Sorted component lists of an antichain, for order-insensitive equality.
pub fn loads(a: &Antichain<LoadVector>) -> Vec<Vec<u64>> {
    let mut v: Vec<Vec<u64>> = a.iter().map(|x| x.components().to_vec()).collect();
    v.sort();
    v
}

/// Parameter box for a seeded population of random games.
#[derive(Clone, Copy)]
pub struct ParamBox {
    pub max_states: usize,
    pub max_dim: usize,
    pub max_ell: u64,
    /// Force every state to the controller.
    pub one_player: bool,
    /// Force every cycle to touch every dimension.
    pub decreasing: bool,
}

/// Deterministic population of `count` games. Sizes sweep the box, flags
/// not pinned by `b` are mixed from the index, and the whole population is
/// reproducible from `base_seed` alone.
pub fn population(count: usize, base_seed: u64, b: ParamBox) -> Vec<Game> {
    (0..count as u64)
        .map(|k| {
            let seed = base_seed.wrapping_add(k).wrapping_mul(0x9e3779b97f4a7c15);
            let num_states = 1 + (k as usize) % b.max_states;
            let dimension = 1 + (k as usize / b.max_states) % b.max_dim;
            let ell = 1 + k % b.max_ell;
            let flags = RandomGameFlags {
                one_player: b.one_player || k % 2 == 0,
                decreasing: b.decreasing || k % 5 == 0,
                omega_density: [0.0, 0.15, 0.3, 0.5][(k % 4) as usize],
            };
            random_game(seed, num_states, dimension, ell, flags)
                .expect("population parameters always admit a sample")
        })
        .collect()
}

/// The mixed-flag box of the oracle-agreement criterion.
pub fn oracle_box() -> ParamBox {
    ParamBox {
        max_states: 6,
        max_dim: 2,
        max_ell: 3,
        one_player: false,
        decreasing: false,
    }
}

/// The larger box of the emptiness-agreement criterion.
pub fn emptiness_box() -> ParamBox {
    ParamBox {
        max_states: 8,
        max_dim: 3,
        max_ell: 3,
        one_player: false,
        decreasing: false,
    }
}

/// The restricted-solver box (one-player or decreasing populations).
pub fn restricted_box(one_player: bool, decreasing: bool) -> ParamBox {
    ParamBox {
        max_states: 5,
        max_dim: 2,
        max_ell: 3,
        one_player,
        decreasing,
    }
}
