//! General-purpose solvers built on the capped configuration arena.
//!
//! Minimal safe loads never exceed B = d·max(ℓ,1)·|S| per component, so the
//! infinite configuration space can be folded into the finite box [1..B]^d:
//! finite deltas apply as usual (or fall into Fail on exhaustion) and every
//! reload jumps straight to the cap. Safety in the folded arena is a plain
//! two-player safety game, solved by backward attractor. Cover queries use
//! the same construction with the candidate load as the cap, which also
//! enforces the "never exceed the initial load" side condition.

pub mod streett;
pub(crate) mod subgame;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::antichain::{min_set, Antichain};
use crate::model::{max_finite_drop, Game, LoadVector, Owner, ResourceDelta, StateId};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum SolveError {
    #[error("arena needs {needed} vertices, limit is {limit} (override with CONSUMPTION_ARENA_LIMIT)")]
    ArenaTooLarge { needed: u64, limit: u64 },
    #[error("{pairs} acceptance pairs exceed the supported limit of {limit}")]
    TooManyPairs { pairs: usize, limit: usize },
}

fn effective_limit() -> u64 {
    // Vertex ids are u32.
    crate::arena_limit().min(u32::MAX as u64)
}

/// Per-dimension cap under which every minimal safe load fits.
pub fn safe_cap(g: &Game) -> u64 {
    (g.dimension() as u64)
        .saturating_mul(max_finite_drop(g).max(1))
        .saturating_mul(g.num_states() as u64)
}

/// Advance `v` through the box [1..caps] in the mixed-radix order used by
/// [`CappedArena::encode`] (last component least significant). Returns
/// false once the box is exhausted.
fn next_in_box(v: &mut [u64], caps: &[u64]) -> bool {
    for i in (0..v.len()).rev() {
        v[i] += 1;
        if v[i] <= caps[i] {
            return true;
        }
        v[i] = 1;
    }
    false
}

/// The folded configuration arena over the box [1..caps]. Vertex 0 is Fail
/// (box-owned, with a self-loop); vertex `1 + s*prod(caps) + mixed-radix(v)`
/// is the configuration (s, v).
#[derive(Debug)]
pub struct CappedArena {
    caps: Vec<u64>,
    per_state: u64,
    owners_by_state: Vec<Owner>,
    num_vertices: usize,
    succ_start: Vec<u32>,
    succ_data: Vec<u32>,
}

impl CappedArena {
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn fail_vertex(&self) -> usize {
        0
    }

    pub fn encode(&self, s: StateId, v: &LoadVector) -> usize {
        let mut idx = 0u64;
        for (i, &c) in v.components().iter().enumerate() {
            debug_assert!(c >= 1 && c <= self.caps[i]);
            idx = idx * self.caps[i] + (c - 1);
        }
        (1 + s.0 as u64 * self.per_state + idx) as usize
    }

    pub fn owner(&self, vertex: usize) -> Owner {
        if vertex == 0 {
            Owner::Box
        } else {
            self.owners_by_state[((vertex as u64 - 1) / self.per_state) as usize]
        }
    }

    pub fn successors(&self, vertex: usize) -> &[u32] {
        &self.succ_data[self.succ_start[vertex] as usize..self.succ_start[vertex + 1] as usize]
    }
}

/// Materialize the full folded arena; errors if the box does not fit the
/// configured vertex budget.
pub fn build_capped_arena(g: &Game, caps: &[u64]) -> Result<CappedArena, SolveError> {
    assert_eq!(caps.len(), g.dimension());
    assert!(caps.iter().all(|&c| c >= 1));
    let limit = effective_limit();
    let per_state = caps
        .iter()
        .try_fold(1u64, |acc, &c| acc.checked_mul(c))
        .unwrap_or(u64::MAX);
    let num_vertices = per_state
        .checked_mul(g.num_states() as u64)
        .and_then(|v| v.checked_add(1))
        .unwrap_or(u64::MAX);
    if num_vertices > limit {
        return Err(SolveError::ArenaTooLarge {
            needed: num_vertices,
            limit,
        });
    }

    let n = g.num_states();
    let d = g.dimension();
    let num_vertices = num_vertices as usize;
    let mut arena = CappedArena {
        caps: caps.to_vec(),
        per_state,
        owners_by_state: (0..n).map(|i| g.owner(StateId(i))).collect(),
        num_vertices,
        succ_start: Vec::with_capacity(num_vertices + 1),
        succ_data: Vec::new(),
    };

    // Fail keeps play absorbed.
    arena.succ_start.push(0);
    arena.succ_data.push(0);
    arena.succ_start.push(arena.succ_data.len() as u32);

    let mut v = vec![1u64; d];
    for s in 0..n {
        v.iter_mut().for_each(|c| *c = 1);
        loop {
            debug_assert_eq!(
                arena.succ_start.len() - 1,
                arena.encode(StateId(s), &LoadVector::new(v.clone()).unwrap())
            );
            for e in g.out_edges(StateId(s)) {
                arena
                    .succ_data
                    .push(folded_successor(&arena, e.dst.0, &e.label, &v));
            }
            arena.succ_start.push(arena.succ_data.len() as u32);
            if !next_in_box(&mut v, caps) {
                break;
            }
        }
    }
    debug_assert_eq!(arena.succ_start.len(), num_vertices + 1);
    Ok(arena)
}

/// Deterministic folded step: finite deltas subtract (Fail on exhaustion),
/// reloads jump to the cap.
fn folded_successor(arena: &CappedArena, dst_state: usize, label: &crate::model::Label, v: &[u64]) -> u32 {
    let mut out = 0u64;
    for (i, &delta) in label.deltas().iter().enumerate() {
        let next = match delta {
            ResourceDelta::Fin(c) => {
                let drop = c.unsigned_abs();
                if v[i] <= drop {
                    return 0;
                }
                v[i] - drop
            }
            ResourceDelta::Omega => arena.caps[i],
        };
        out = out * arena.caps[i] + (next - 1);
    }
    (1 + dst_state as u64 * arena.per_state + out) as u32
}

/// Least superset of `targets` closed under single-edge moves of `player`
/// and forced moves of the opponent, by backward counting.
pub fn attractor(arena: &CappedArena, player: Owner, targets: &[bool]) -> Vec<bool> {
    let n = arena.num_vertices();
    assert_eq!(targets.len(), n);
    let mut indeg = vec![0u32; n];
    for &dst in &arena.succ_data {
        indeg[dst as usize] += 1;
    }
    let mut start = vec![0usize; n + 1];
    for i in 0..n {
        start[i + 1] = start[i] + indeg[i] as usize;
    }
    let mut preds = vec![0u32; arena.succ_data.len()];
    let mut fill = start.clone();
    let mut outdeg = vec![0u32; n];
    for (u, deg) in outdeg.iter_mut().enumerate() {
        for &dst in arena.successors(u) {
            preds[fill[dst as usize]] = u as u32;
            fill[dst as usize] += 1;
            *deg += 1;
        }
    }

    let mut attr = targets.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&x| attr[x]).collect();
    while let Some(x) = queue.pop_front() {
        for &p in &preds[start[x]..start[x + 1]] {
            let p = p as usize;
            if attr[p] {
                continue;
            }
            let pull = if arena.owner(p) == player {
                true
            } else {
                outdeg[p] -= 1;
                outdeg[p] == 0
            };
            if pull {
                attr[p] = true;
                queue.push_back(p);
            }
        }
    }
    attr
}

/// Vertices from which the controller avoids Fail forever.
pub fn safe_region(arena: &CappedArena) -> Vec<bool> {
    let mut targets = vec![false; arena.num_vertices()];
    targets[arena.fail_vertex()] = true;
    attractor(arena, Owner::Diamond, &targets)
        .into_iter()
        .map(|a| !a)
        .collect()
}

/// Reachable fragment of a folded arena, interned on demand. Verdicts at
/// the roots match the full arena because safety only depends on the part
/// of the graph that play can reach.
struct LazyArena {
    owners: Vec<Owner>,
    edges: Vec<(u32, u32)>,
    num_vertices: usize,
}

fn explore_from(
    g: &Game,
    caps: &[u64],
    starts: &[(StateId, LoadVector)],
) -> Result<(LazyArena, Vec<u32>), SolveError> {
    let limit = effective_limit();
    let mut ids: HashMap<(u32, Vec<u64>), u32> = HashMap::new();
    let mut owners = vec![Owner::Box];
    let mut edges: Vec<(u32, u32)> = vec![(0, 0)];
    let mut queue: VecDeque<(u32, StateId, Vec<u64>)> = VecDeque::new();
    let mut roots = Vec::with_capacity(starts.len());

    let mut intern = |s: StateId,
                      v: Vec<u64>,
                      owners: &mut Vec<Owner>,
                      queue: &mut VecDeque<(u32, StateId, Vec<u64>)>|
     -> Result<u32, SolveError> {
        match ids.entry((s.0 as u32, v)) {
            std::collections::hash_map::Entry::Occupied(o) => Ok(*o.get()),
            std::collections::hash_map::Entry::Vacant(slot) => {
                let id = owners.len() as u32;
                if id as u64 + 1 > limit {
                    return Err(SolveError::ArenaTooLarge {
                        needed: id as u64 + 1,
                        limit,
                    });
                }
                owners.push(g.owner(s));
                queue.push_back((id, s, slot.key().1.clone()));
                slot.insert(id);
                Ok(id)
            }
        }
    };

    for (s, alpha) in starts {
        debug_assert!(alpha
            .components()
            .iter()
            .zip(caps)
            .all(|(&a, &c)| a <= c));
        roots.push(intern(*s, alpha.components().to_vec(), &mut owners, &mut queue)?);
    }

    while let Some((id, s, v)) = queue.pop_front() {
        for e in g.out_edges(s) {
            let mut next = v.clone();
            let mut dead = false;
            for (i, &delta) in e.label.deltas().iter().enumerate() {
                match delta {
                    ResourceDelta::Fin(c) => {
                        let drop = c.unsigned_abs();
                        if next[i] <= drop {
                            dead = true;
                            break;
                        }
                        next[i] -= drop;
                    }
                    ResourceDelta::Omega => next[i] = caps[i],
                }
            }
            let dst = if dead {
                0
            } else {
                intern(e.dst, next, &mut owners, &mut queue)?
            };
            edges.push((id, dst));
        }
    }

    let num_vertices = owners.len();
    Ok((
        LazyArena {
            owners,
            edges,
            num_vertices,
        },
        roots,
    ))
}

fn lazy_safe(arena: &LazyArena) -> Vec<bool> {
    let n = arena.num_vertices;
    let mut indeg = vec![0u32; n];
    for &(_, dst) in &arena.edges {
        indeg[dst as usize] += 1;
    }
    let mut start = vec![0usize; n + 1];
    for i in 0..n {
        start[i + 1] = start[i] + indeg[i] as usize;
    }
    let mut preds = vec![0u32; arena.edges.len()];
    let mut fill = start.clone();
    let mut outdeg = vec![0u32; n];
    for &(src, dst) in &arena.edges {
        preds[fill[dst as usize]] = src;
        fill[dst as usize] += 1;
        outdeg[src as usize] += 1;
    }
    let mut attr = vec![false; n];
    attr[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &p in &preds[start[x]..start[x + 1]] {
            let p = p as usize;
            if attr[p] {
                continue;
            }
            let pull = match arena.owners[p] {
                Owner::Diamond => true,
                Owner::Box => {
                    outdeg[p] -= 1;
                    outdeg[p] == 0
                }
            };
            if pull {
                attr[p] = true;
                queue.push_back(p);
            }
        }
    }
    attr.iter().map(|&a| !a).collect()
}

/// Safety verdicts for a batch of start configurations sharing one cap box.
fn winning_from(
    g: &Game,
    caps: &[u64],
    starts: &[(StateId, LoadVector)],
) -> Result<Vec<bool>, SolveError> {
    let (arena, roots) = explore_from(g, caps, starts)?;
    let safe = lazy_safe(&arena);
    Ok(roots.into_iter().map(|r| safe[r as usize]).collect())
}

/// Is `alpha` a safe load at `s`? Components are capped at the global
/// bound first; upward closure makes that sound.
pub fn safe_membership(g: &Game, s: StateId, alpha: &LoadVector) -> Result<bool, SolveError> {
    assert_eq!(alpha.dimension(), g.dimension());
    let cap = safe_cap(g);
    let caps = vec![cap; g.dimension()];
    let capped = alpha.capped_at(&LoadVector::uniform(g.dimension(), cap));
    Ok(winning_from(g, &caps, &[(s, capped)])?[0])
}

/// The antichain of minimal safe loads at `s`; empty iff no load is safe.
pub fn safe_minimal_elements(g: &Game, s: StateId) -> Result<Antichain<LoadVector>, SolveError> {
    let cap = safe_cap(g);
    let caps = vec![cap; g.dimension()];
    let arena = build_capped_arena(g, &caps)?;
    let safe = safe_region(&arena);
    let mut winning = Vec::new();
    let mut v = vec![1u64; g.dimension()];
    loop {
        let load = LoadVector::new(v.clone()).unwrap();
        if safe[arena.encode(s, &load)] {
            winning.push(load);
        }
        if !next_in_box(&mut v, &caps) {
            break;
        }
    }
    Ok(min_set(winning))
}

/// Is `alpha` a covering load at `s`: safe while never exceeding `alpha`
/// componentwise? Capping the box at `alpha` enforces the side condition.
pub fn cover_membership(g: &Game, s: StateId, alpha: &LoadVector) -> Result<bool, SolveError> {
    assert_eq!(alpha.dimension(), g.dimension());
    let caps: Vec<u64> = alpha.components().to_vec();
    Ok(winning_from(g, &caps, &[(s, alpha.clone())])?[0])
}

/// Minimal covering loads, searched inside a bounded candidate box.
#[derive(Clone, Debug)]
pub struct CoverMinimals {
    pub minimals: Antichain<LoadVector>,
    /// Candidate box edge actually used.
    pub bound: u64,
    /// True when the box is smaller than the worst-case bound, in which
    /// case minimals with a component beyond `bound` may be missing.
    pub truncated: bool,
}

/// Hard default edge for the cover candidate box.
pub const COVER_BOX_DEFAULT: u64 = 10_000;

/// Worst-case per-component bound on minimal covering loads,
/// (d·max(ℓ,1)·|S|)^(d!), saturating.
pub fn cover_cap(g: &Game) -> u64 {
    let base = safe_cap(g);
    let mut exp = 1u32;
    for k in 2..=g.dimension() as u32 {
        exp = exp.saturating_mul(k);
    }
    base.checked_pow(exp).unwrap_or(u64::MAX)
}

/// Minimal elements of the cover set at `s` inside [1..B]^d where B is the
/// smallest of the worst-case bound, `bound_override` and a hard default.
/// A candidate is minimal iff it is a member and every single-step
/// decrement is not; membership results are cached across the scan.
pub fn cover_minimal_elements(
    g: &Game,
    s: StateId,
    bound_override: Option<u64>,
) -> Result<CoverMinimals, SolveError> {
    let exact = cover_cap(g);
    let bound = exact
        .min(bound_override.unwrap_or(u64::MAX))
        .clamp(1, COVER_BOX_DEFAULT);
    let truncated = bound < exact;

    let d = g.dimension();
    let mut cache: HashMap<Vec<u64>, bool> = HashMap::new();
    let member = |alpha: &LoadVector, cache: &mut HashMap<Vec<u64>, bool>| -> Result<bool, SolveError> {
        if let Some(&hit) = cache.get(alpha.components()) {
            return Ok(hit);
        }
        let verdict = cover_membership(g, s, alpha)?;
        cache.insert(alpha.components().to_vec(), verdict);
        Ok(verdict)
    };

    let box_caps = vec![bound; d];
    let mut minimals = Antichain::new();
    let mut v = vec![1u64; d];
    loop {
        let load = LoadVector::new(v.clone()).unwrap();
        if !minimals.dominates(&load) && member(&load, &mut cache)? {
            let mut locally_minimal = true;
            for i in 0..d {
                if let Some(down) = load.minus_unit(i) {
                    if member(&down, &mut cache)? {
                        locally_minimal = false;
                        break;
                    }
                }
            }
            if locally_minimal {
                minimals.insert(load);
            }
        }
        if !next_in_box(&mut v, &box_caps) {
            break;
        }
    }

    Ok(CoverMinimals {
        minimals,
        bound,
        truncated,
    })
}

/// Per-state flag: does the state admit any safe load? Uses the global
/// bound vector, which is safe at a state exactly when anything is.
pub fn safe_state_mask(g: &Game) -> Result<Vec<bool>, SolveError> {
    let cap = safe_cap(g);
    let caps = vec![cap; g.dimension()];
    let full = LoadVector::uniform(g.dimension(), cap);
    let starts: Vec<(StateId, LoadVector)> =
        g.states().map(|s| (s, full.clone())).collect();
    winning_from(g, &caps, &starts)
}

/// Error from [`prune_unsafe_states`].
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum PruneError {
    #[error("no state of the game has a nonempty safe set")]
    AllStatesUnsafe,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Restrict a game to the states with a nonempty safe set. Totality is
/// preserved: a surviving controller state keeps a safe successor, and all
/// successors of a surviving adversary state survive. Idempotent.
pub fn prune_unsafe_states(g: &Game) -> Result<Game, PruneError> {
    let keep = safe_state_mask(g)?;
    if keep.iter().all(|&k| !k) {
        return Err(PruneError::AllStatesUnsafe);
    }
    Ok(g
        .restrict_to(&keep)
        .expect("restriction to safe states preserves every game invariant"))
}

/// Is Safe(`s`) empty? Dispatches to the cheapest applicable decider, so
/// the cost stays polynomial on one-player and decreasing games: the SCC
/// refinement for one-player games, the generalized Büchi reduction for
/// decreasing games, and the Streett-game translation otherwise. The
/// routes agree wherever their preconditions overlap; only the Streett
/// translation can fail, on more pairs than the record solver accepts.
pub fn safe_emptiness(g: &Game, s: StateId) -> Result<bool, SolveError> {
    let class = crate::model::classify(g);
    if class.one_player && g.dimension() <= 64 {
        let nonempty = crate::restricted::automaton::streett_automaton_nonempty(g, s)
            .expect("the game was just classified as one-player");
        return Ok(!nonempty);
    }
    if class.decreasing {
        let bg = crate::restricted::buchi::GenBuchiGame::from_game(g);
        return Ok(!crate::restricted::buchi::solve_generalized_buchi(&bg)[s.0]);
    }
    let winners = streett::solve_streett_game(&streett::to_streett(g))?;
    Ok(!winners[s.0])
}
