//! Membership by short-horizon search.
//!
//! Both deciders here rest on the same observation: once every dimension
//! has been reloaded recently, the exact load no longer matters, because
//! any state with a nonempty safe set admits the uniform load `(B, .., B)`
//! where `B` is [`safe_cap`]. The horizon `d * |S|` bounds how long a
//! winning play can go before that happens, so the search tree stays
//! shallow even though loads are unbounded.

use std::collections::{HashMap, HashSet, VecDeque};

use super::automaton::{accepting_cycle_from, dims_mask};
use super::buchi::{solve_generalized_buchi, GenBuchiGame};
use super::RestrictedError;
use crate::model::{classify, Game, LoadVector, ResourceDelta, StateId};
use crate::solver::safe_cap;

/// Is `alpha` in Safe(`s`)? Decreasing games only, either player mix.
///
/// Alternating search to depth `d * |S|`: the controller must reload every
/// dimension within that window and land on a state whose safe set is
/// nonempty, whatever the adversary does. Reloads jump to `2B` so a
/// refreshed dimension cannot die again inside the window, and the input
/// load is capped at `B`, which leaves membership unchanged.
pub fn membership_decreasing_bounded(
    g: &Game,
    s: StateId,
    alpha: &LoadVector,
) -> Result<bool, RestrictedError> {
    if !classify(g).decreasing {
        return Err(RestrictedError::NotDecreasing);
    }
    let d = g.dimension();
    assert!(d <= 64, "reload masks are kept as u64 bitmasks");
    assert_eq!(alpha.dimension(), d);
    let safe = solve_generalized_buchi(&GenBuchiGame::from_game(g));
    let cap = safe_cap(g);
    let mut search = DecSearch {
        g,
        safe,
        reload_to: 2 * cap,
        full: dims_mask(d),
        memo: HashMap::new(),
    };
    let vals: Vec<u64> = alpha.components().iter().map(|&a| a.min(cap)).collect();
    let horizon = d * g.num_states();
    Ok(search.run(s.0, vals, 0, horizon))
}

struct DecSearch<'a> {
    g: &'a Game,
    safe: Vec<bool>,
    reload_to: u64,
    full: u64,
    memo: HashMap<(usize, Vec<u64>, u64, usize), bool>,
}

impl DecSearch<'_> {
    fn run(&mut self, state: usize, vals: Vec<u64>, mask: u64, steps_left: usize) -> bool {
        if mask == self.full && self.safe[state] {
            return true;
        }
        if steps_left == 0 {
            return false;
        }
        let key = (state, vals, mask, steps_left);
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let (state, vals) = (key.0, &key.1);
        let moves = self.g.out_edge_ids(StateId(state)).to_vec();
        let verdict = match self.g.owner(StateId(state)) {
            crate::model::Owner::Box => moves.iter().any(|&e| {
                apply_edge(self.g, e, vals, mask, self.reload_to)
                    .is_some_and(|(v, m)| {
                        self.run(self.g.edge(e).dst.0, v, m, steps_left - 1)
                    })
            }),
            // A move that exhausts a resource is an immediate loss, and
            // the adversary is free to take it.
            crate::model::Owner::Diamond => moves.iter().all(|&e| {
                apply_edge(self.g, e, vals, mask, self.reload_to)
                    .is_some_and(|(v, m)| {
                        self.run(self.g.edge(e).dst.0, v, m, steps_left - 1)
                    })
            }),
        };
        self.memo.insert(key, verdict);
        verdict
    }
}

/// Take edge `e` from load `vals`: `None` when a resource is exhausted,
/// otherwise the new load and the reload mask extended by the ω entries.
fn apply_edge(
    g: &Game,
    e: usize,
    vals: &[u64],
    mask: u64,
    reload_to: u64,
) -> Option<(Vec<u64>, u64)> {
    let label = &g.edge(e).label;
    let mut out = Vec::with_capacity(vals.len());
    let mut mask = mask;
    for (i, &delta) in label.deltas().iter().enumerate() {
        match delta {
            ResourceDelta::Fin(c) => {
                let drop = c.unsigned_abs();
                if vals[i] <= drop {
                    return None;
                }
                out.push(vals[i] - drop);
            }
            ResourceDelta::Omega => {
                out.push(reload_to);
                mask |= 1 << i;
            }
        }
    }
    Some((out, mask))
}

/// Is `alpha` in Safe(`s`)? One-player games only, any label shapes.
///
/// Breadth-first over configurations `(state, load, reloaded-set)` up to
/// depth `d * |S|`. Every configuration reached is tested for a
/// certificate: an accepting continuation that never consumes a resource
/// outside the set already reloaded. Dimensions inside the set sit at
/// `B` or above by then, so the certificate really does extend the
/// prefix to a winning play.
pub fn membership_one_player_certificate(
    g: &Game,
    s: StateId,
    alpha: &LoadVector,
) -> Result<bool, RestrictedError> {
    if !classify(g).one_player {
        return Err(RestrictedError::NotOnePlayer);
    }
    let d = g.dimension();
    assert!(d <= 64, "reload masks are kept as u64 bitmasks");
    assert_eq!(alpha.dimension(), d);
    let cap = safe_cap(g);
    let full = dims_mask(d);
    let horizon = d * g.num_states();

    let mut certified: HashMap<(usize, u64), bool> = HashMap::new();
    let check = |state: usize, mask: u64, certified: &mut HashMap<(usize, u64), bool>| {
        *certified.entry((state, mask)).or_insert_with(|| {
            let live: Vec<bool> = g
                .edges()
                .iter()
                .map(|edge| {
                    edge.label.deltas().iter().enumerate().all(|(i, &delta)| {
                        mask >> i & 1 != 0 || !matches!(delta, ResourceDelta::Fin(c) if c < 0)
                    })
                })
                .collect();
            accepting_cycle_from(g, StateId(state), live, full)
        })
    };

    let start: Vec<u64> = alpha.components().iter().map(|&a| a.min(cap)).collect();
    if check(s.0, 0, &mut certified) {
        return Ok(true);
    }
    let mut seen: HashSet<(usize, Vec<u64>, u64)> = HashSet::new();
    seen.insert((s.0, start.clone(), 0));
    let mut queue: VecDeque<(usize, Vec<u64>, u64, usize)> = VecDeque::new();
    queue.push_back((s.0, start, 0, 0));
    while let Some((state, vals, mask, depth)) = queue.pop_front() {
        if depth == horizon {
            continue;
        }
        for &e in g.out_edge_ids(StateId(state)) {
            let Some((v, m)) = apply_edge(g, e, &vals, mask, 2 * cap) else {
                continue;
            };
            let t = g.edge(e).dst.0;
            if !seen.insert((t, v.clone(), m)) {
                continue;
            }
            if check(t, m, &mut certified) {
                return Ok(true);
            }
            queue.push_back((t, v, m, depth + 1));
        }
    }
    Ok(false)
}
