//! Streett games as an alternative route to safe-set emptiness.
//!
//! Each resource of a consumption game induces one Streett pair over the
//! unchanged arena: the edges consuming it on one side, the edges reloading
//! it on the other. Some load is safe at a state exactly when the
//! controller can ensure that every resource consumed infinitely often is
//! also reloaded infinitely often, which is the Streett winning condition.
//! This module provides both translations and an exact solver, so
//! emptiness answers can be cross-checked against the capped arena.
//!
//! The solver reduces to a parity game with an index appearance record: a
//! permutation of the pair indices, reordered on every move by pulling the
//! just-reloaded indices to the front. Indices reloaded infinitely often
//! circulate in a stable prefix of the record; a pair violated by the play
//! eventually freezes at some deeper position p and its consuming edges
//! keep emitting the odd priority 2p+1, while a satisfied play tops out at
//! the even priority of its refresh prefix. Maximal priority seen
//! infinitely often therefore decides the original condition.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::subgame::{attractor_within, TurnGraph};
use super::SolveError;
use crate::model::{validate_game, Game, GameDescription, Label, Owner, ResourceDelta};

/// One acceptance pair: hitting `g_edges` infinitely often obliges the
/// controller to hit `r_edges` infinitely often too. Edge ids index into
/// the owning game's edge list and are kept sorted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StreettPair {
    pub g_edges: Vec<usize>,
    pub r_edges: Vec<usize>,
}

/// A two-player game on a finite arena whose plays are judged by a
/// conjunction of [`StreettPair`] conditions on the edges traversed.
#[derive(Clone, Debug)]
pub struct StreettGame {
    names: Vec<String>,
    owners: Vec<Owner>,
    edges: Vec<(usize, usize)>,
    out: Vec<Vec<usize>>,
    pairs: Vec<StreettPair>,
    g_mask: Vec<u64>,
    r_mask: Vec<u64>,
}

impl StreettGame {
    /// Assemble a Streett game. Panics on structural misuse: no states, a
    /// duplicate or unknown state name, a state without an outgoing edge,
    /// no pairs, more than 64 pairs, or an edge id out of range.
    pub fn new(
        states: Vec<(String, Owner)>,
        edges: Vec<(String, String)>,
        mut pairs: Vec<StreettPair>,
    ) -> StreettGame {
        assert!(!states.is_empty(), "a Streett game needs at least one state");
        assert!(!pairs.is_empty(), "a Streett game needs at least one pair");
        assert!(pairs.len() <= 64, "pair sets are kept as u64 bitmasks");
        let mut index = HashMap::new();
        for (i, (name, _)) in states.iter().enumerate() {
            assert!(
                index.insert(name.clone(), i).is_none(),
                "state {name:?} is declared twice"
            );
        }
        let lookup = |name: &String| -> usize {
            *index
                .get(name)
                .unwrap_or_else(|| panic!("edge endpoint {name:?} is not a declared state"))
        };
        let edges: Vec<(usize, usize)> = edges
            .iter()
            .map(|(src, dst)| (lookup(src), lookup(dst)))
            .collect();
        let mut out = vec![Vec::new(); states.len()];
        for (e, &(src, _)) in edges.iter().enumerate() {
            out[src].push(e);
        }
        for (i, o) in out.iter().enumerate() {
            assert!(!o.is_empty(), "state {:?} has no outgoing edge", states[i].0);
        }
        let mut g_mask = vec![0u64; edges.len()];
        let mut r_mask = vec![0u64; edges.len()];
        for (i, pair) in pairs.iter_mut().enumerate() {
            for list in [&mut pair.g_edges, &mut pair.r_edges] {
                list.sort_unstable();
                list.dedup();
                if let Some(&max) = list.last() {
                    assert!(max < edges.len(), "edge id {max} out of range");
                }
            }
            for &e in &pair.g_edges {
                g_mask[e] |= 1 << i;
            }
            for &e in &pair.r_edges {
                r_mask[e] |= 1 << i;
            }
        }
        let (names, owners) = states.into_iter().unzip();
        StreettGame {
            names,
            owners,
            edges,
            out,
            pairs,
            g_mask,
            r_mask,
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn owner(&self, s: usize) -> Owner {
        self.owners[s]
    }

    /// Edges as (source, destination) state indices, in declaration order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn pairs(&self) -> &[StreettPair] {
        &self.pairs
    }
}

/// Translate a consumption game into the Streett game with one pair per
/// resource: consuming edges raise the obligation, reloading edges
/// discharge it. The controller wins from `s` iff Safe(s) is nonempty.
pub fn to_streett(g: &Game) -> StreettGame {
    let states = g
        .states()
        .map(|s| (g.name(s).to_string(), g.owner(s)))
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| (g.name(e.src).to_string(), g.name(e.dst).to_string()))
        .collect();
    let pairs = (0..g.dimension())
        .map(|i| StreettPair {
            g_edges: g
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| matches!(e.label.get(i), ResourceDelta::Fin(c) if c < 0))
                .map(|(id, _)| id)
                .collect(),
            r_edges: g
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.label.get(i).is_omega())
                .map(|(id, _)| id)
                .collect(),
        })
        .collect();
    StreettGame::new(states, edges, pairs)
}

/// Error from [`from_streett`]. Pair indices are 0-based.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum StreettConvertError {
    #[error("edge {src:?} -> {dst:?} is on both sides of pair {pair}; no single delta expresses that")]
    PairOverlap { src: String, dst: String, pair: usize },
    #[error("edge {src:?} -> {dst:?} discharges pair {pair} but leaves an adversary state")]
    OmegaOnDiamond { src: String, dst: String, pair: usize },
}

/// Translate a Streett game into a consumption game with one resource per
/// pair: an edge consumes 1 where it raises the obligation, reloads where
/// it discharges one, and leaves the resource untouched otherwise. An edge
/// on both sides of a single pair has no faithful delta and is rejected,
/// as is a discharging edge out of an adversary state. Translating the
/// result back with [`to_streett`] restores the pairs.
pub fn from_streett(sg: &StreettGame) -> Result<Game, StreettConvertError> {
    let m = sg.num_pairs();
    let mut edges: Vec<(String, String, Label)> = Vec::new();
    for (e, &(src, dst)) in sg.edges.iter().enumerate() {
        let mut deltas = Vec::with_capacity(m);
        for pair in 0..m {
            let claim = || (sg.names[src].clone(), sg.names[dst].clone(), pair);
            let g_hit = sg.g_mask[e] >> pair & 1 != 0;
            let r_hit = sg.r_mask[e] >> pair & 1 != 0;
            deltas.push(match (g_hit, r_hit) {
                (true, true) => {
                    let (src, dst, pair) = claim();
                    return Err(StreettConvertError::PairOverlap { src, dst, pair });
                }
                (true, false) => ResourceDelta::Fin(-1),
                (false, true) => {
                    if sg.owners[src] == Owner::Diamond {
                        let (src, dst, pair) = claim();
                        return Err(StreettConvertError::OmegaOnDiamond { src, dst, pair });
                    }
                    ResourceDelta::Omega
                }
                (false, false) => ResourceDelta::Fin(0),
            });
        }
        let triple = (
            sg.names[src].clone(),
            sg.names[dst].clone(),
            Label::new(deltas),
        );
        // Parallel edges with identical pair memberships collapse to one
        // indistinguishable consumption edge.
        if !edges.contains(&triple) {
            edges.push(triple);
        }
    }
    let desc = GameDescription {
        dimension: m,
        states: sg
            .names
            .iter()
            .cloned()
            .zip(sg.owners.iter().copied())
            .collect(),
        edges,
    };
    Ok(validate_game(&desc).expect("translated labels satisfy every game invariant"))
}

/// States from which the controller wins the Streett game, as a mask
/// indexed by state. The record expansion is factorial in the number of
/// pairs, hence the configurable limit (see [`crate::streett_pair_limit`]).
pub fn solve_streett_game(sg: &StreettGame) -> Result<Vec<bool>, SolveError> {
    let identity: Vec<u8> = (0..sg.num_pairs() as u8).collect();
    winners_from(sg, &identity)
}

/// Priority of a move under the record in force before it: positions are
/// 1-based, with the deepest discharged index winning evenly over the
/// deepest consumed one.
fn move_priority(record: &[u8], g_mask: u64, r_mask: u64) -> u32 {
    let mut g_pos = 0u32;
    let mut r_pos = 0u32;
    for (pos, &idx) in record.iter().enumerate() {
        if g_mask >> idx & 1 != 0 {
            g_pos = pos as u32 + 1;
        }
        if r_mask >> idx & 1 != 0 {
            r_pos = pos as u32 + 1;
        }
    }
    if g_pos > r_pos {
        2 * g_pos + 1
    } else {
        2 * r_pos + 2
    }
}

/// Record after a move: discharged indices migrate to the front, relative
/// order preserved on both sides.
fn refreshed(record: &[u8], r_mask: u64) -> Vec<u8> {
    let mut next: Vec<u8> = record
        .iter()
        .copied()
        .filter(|&i| r_mask >> i & 1 != 0)
        .collect();
    next.extend(record.iter().copied().filter(|&i| r_mask >> i & 1 == 0));
    next
}

/// Winner mask when every state starts with the given record. The verdict
/// is record-independent (a tested property); the public entry point uses
/// the identity.
fn winners_from(sg: &StreettGame, init: &[u8]) -> Result<Vec<bool>, SolveError> {
    let m = sg.num_pairs();
    let limit = crate::streett_pair_limit();
    if m > limit {
        return Err(SolveError::TooManyPairs { pairs: m, limit });
    }
    let size_limit = super::effective_limit();

    // Reachable (state, record) product, interned on demand.
    let mut ids: HashMap<(u32, Vec<u8>), u32> = HashMap::new();
    let mut state_of: Vec<u32> = Vec::new();
    let mut record_of: Vec<Vec<u8>> = Vec::new();
    let mut queue: VecDeque<u32> = VecDeque::new();
    let mut intern = |s: u32,
                      rec: Vec<u8>,
                      state_of: &mut Vec<u32>,
                      record_of: &mut Vec<Vec<u8>>,
                      queue: &mut VecDeque<u32>|
     -> u32 {
        match ids.entry((s, rec)) {
            std::collections::hash_map::Entry::Occupied(o) => *o.get(),
            std::collections::hash_map::Entry::Vacant(slot) => {
                let id = state_of.len() as u32;
                state_of.push(s);
                record_of.push(slot.key().1.clone());
                queue.push_back(id);
                slot.insert(id);
                id
            }
        }
    };

    let mut roots = Vec::with_capacity(sg.num_states());
    for s in 0..sg.num_states() {
        roots.push(intern(
            s as u32,
            init.to_vec(),
            &mut state_of,
            &mut record_of,
            &mut queue,
        ));
    }
    let mut moves: Vec<(u32, u32, u32)> = Vec::new();
    while let Some(v) = queue.pop_front() {
        let record = record_of[v as usize].clone();
        for &e in &sg.out[state_of[v as usize] as usize] {
            let priority = move_priority(&record, sg.g_mask[e], sg.r_mask[e]);
            let dst = intern(
                sg.edges[e].1 as u32,
                refreshed(&record, sg.r_mask[e]),
                &mut state_of,
                &mut record_of,
                &mut queue,
            );
            moves.push((v, dst, priority));
        }
        let needed = state_of.len() as u64 + moves.len() as u64;
        if needed > size_limit {
            return Err(SolveError::ArenaTooLarge {
                needed,
                limit: size_limit,
            });
        }
    }

    // Parity arena: record vertices first, then one relay vertex per move
    // carrying the move's priority. Record vertices stay at priority 0,
    // which never decides since every cycle passes through relays.
    let n_rec = state_of.len();
    let n = n_rec + moves.len();
    let mut owners = Vec::with_capacity(n);
    for &s in &state_of {
        owners.push(sg.owners[s as usize]);
    }
    owners.resize(n, Owner::Box);
    let mut arena = ParityArena {
        graph: TurnGraph::new(owners),
        priority: vec![0; n],
    };
    for (i, &(from, to, priority)) in moves.iter().enumerate() {
        let relay = (n_rec + i) as u32;
        arena.priority[relay as usize] = priority;
        arena.graph.add_edge(from, relay);
        arena.graph.add_edge(relay, to);
    }

    let even = zielonka(&arena, &vec![true; n]);
    Ok(roots.into_iter().map(|r| even[r as usize]).collect())
}

struct ParityArena {
    graph: TurnGraph,
    priority: Vec<u32>,
}

/// Vertices of the subgame on `active` won by the even player (the
/// controller) under the max-parity objective, by recursive attractor
/// decomposition. Removing an attractor keeps the remaining subgame total,
/// so the recursion is well defined; it terminates because each call
/// strictly shrinks the active set.
fn zielonka(arena: &ParityArena, active: &[bool]) -> Vec<bool> {
    let n = arena.graph.len();
    let top = (0..n)
        .filter(|&v| active[v])
        .map(|v| arena.priority[v])
        .max();
    let Some(p) = top else {
        return vec![false; n];
    };
    let player = if p % 2 == 0 { Owner::Box } else { Owner::Diamond };
    let opponent = match player {
        Owner::Box => Owner::Diamond,
        Owner::Diamond => Owner::Box,
    };
    let targets: Vec<bool> = (0..n)
        .map(|v| active[v] && arena.priority[v] == p)
        .collect();
    let a = attractor_within(&arena.graph, player, &targets, active);
    let rest: Vec<bool> = (0..n).map(|v| active[v] && !a[v]).collect();
    let even_rest = zielonka(arena, &rest);
    let opp_rest: Vec<bool> = match player {
        Owner::Box => (0..n).map(|v| rest[v] && !even_rest[v]).collect(),
        Owner::Diamond => even_rest,
    };
    if opp_rest.iter().all(|&w| !w) {
        return match player {
            Owner::Box => active.to_vec(),
            Owner::Diamond => vec![false; n],
        };
    }
    let b = attractor_within(&arena.graph, opponent, &opp_rest, active);
    let rest2: Vec<bool> = (0..n).map(|v| active[v] && !b[v]).collect();
    let even2 = zielonka(arena, &rest2);
    match player {
        Owner::Box => even2,
        Owner::Diamond => (0..n).map(|v| even2[v] || b[v]).collect(),
    }
}
