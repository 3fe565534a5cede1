//! Brute-force baseline solver.
//!
//! The oracle builds the bounded configuration graph explicitly, with one
//! vertex per (state, load) pair and one edge per move including every
//! possible reload value, then solves the safety objective by backward
//! attractor. It deliberately shares no algorithmic ideas with the real
//! solvers: reloads are not determinized to the cap, upward closure is not
//! assumed, and minimal sets come from exhaustive membership sweeps. Its
//! only job is to certify the fast paths at desk scale.

use thiserror::Error;

use crate::antichain::{min_set, Antichain, DistanceGame, ExtVector};
use crate::model::{Game, LoadVector, Owner, ResourceDelta, StateId};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum OracleError {
    #[error("oracle arena needs {needed} vertices or edges, limit is {limit}")]
    ArenaTooLarge { needed: u64, limit: u64 },
}

/// Explicit bounded configuration graph. Vertex 0 is Fail; vertex
/// `1 + s*prod(caps) + mixed-radix(v)` is the configuration (s, v) with
/// v ∈ [1..caps].
pub struct OracleArena {
    caps: Vec<u64>,
    per_state: u64,
    owners: Vec<Owner>,
    /// Forward edges as (src, dst) pairs; moves and reload choices flattened.
    edges: Vec<(u32, u32)>,
    num_vertices: usize,
}

impl OracleArena {
    /// Build the arena for loads in the box [1..caps].
    pub fn build(g: &Game, caps: &[u64]) -> Result<OracleArena, OracleError> {
        assert_eq!(caps.len(), g.dimension());
        assert!(caps.iter().all(|&c| c >= 1));
        // Vertex ids are u32; clamp the configurable limit accordingly.
        let limit = crate::arena_limit().min(u32::MAX as u64);
        let too_large = |needed: u64| OracleError::ArenaTooLarge { needed, limit };

        let per_state = caps
            .iter()
            .try_fold(1u64, |acc, &c| acc.checked_mul(c))
            .ok_or_else(|| too_large(u64::MAX))?;
        let num_vertices = per_state
            .checked_mul(g.num_states() as u64)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| too_large(u64::MAX))?;
        if num_vertices > limit {
            return Err(too_large(num_vertices));
        }

        // Edge count, analytically: a reload component with current value v
        // offers cap - v + 1 choices, which sums to cap(cap+1)/2 over a full
        // column while finite components contribute a flat factor.
        let mut edge_estimate = 0u64;
        for e in g.edges() {
            let mut per_edge = 1u64;
            for (i, &d) in e.label.deltas().iter().enumerate() {
                let factor = match d {
                    ResourceDelta::Fin(_) => caps[i],
                    ResourceDelta::Omega => caps[i].checked_mul(caps[i] + 1).map(|x| x / 2).unwrap_or(u64::MAX),
                };
                per_edge = per_edge.saturating_mul(factor);
            }
            edge_estimate = edge_estimate.saturating_add(per_edge);
        }
        if edge_estimate > limit {
            return Err(too_large(edge_estimate));
        }

        let n = g.num_states();
        let mut arena = OracleArena {
            caps: caps.to_vec(),
            per_state,
            owners: (0..n).map(|i| g.owner(StateId(i))).collect(),
            edges: Vec::new(),
            num_vertices: num_vertices as usize,
        };

        let d = g.dimension();
        let mut v = vec![1u64; d];
        for s in 0..n {
            v.iter_mut().for_each(|c| *c = 1);
            loop {
                let src = arena.encode(s, &v);
                for e in g.out_edges(StateId(s)) {
                    arena.push_moves(src, e.dst.0, &e.label, &v);
                }
                // Odometer over the box [1..caps].
                let mut i = 0;
                loop {
                    if i == d {
                        break;
                    }
                    v[i] += 1;
                    if v[i] <= caps[i] {
                        break;
                    }
                    v[i] = 1;
                    i += 1;
                }
                if i == d {
                    break;
                }
            }
        }
        Ok(arena)
    }

    fn encode(&self, s: usize, v: &[u64]) -> u32 {
        let mut idx = 0u64;
        for (i, &c) in v.iter().enumerate() {
            debug_assert!(c >= 1 && c <= self.caps[i]);
            idx = idx * self.caps[i] + (c - 1);
        }
        (1 + s as u64 * self.per_state + idx) as u32
    }

    /// All successor configurations of one game move from value `v`,
    /// enumerating every reload choice; exhaustion goes to Fail.
    fn push_moves(&mut self, src: u32, dst_state: usize, label: &crate::model::Label, v: &[u64]) {
        let d = v.len();
        let mut base = vec![0u64; d];
        for i in 0..d {
            match label.get(i) {
                ResourceDelta::Fin(c) => {
                    let drop = c.unsigned_abs();
                    if v[i] <= drop {
                        self.edges.push((src, 0));
                        return;
                    }
                    base[i] = v[i] - drop;
                }
                // Reload choices range over [v(i)..cap(i)]; enumerated below.
                ResourceDelta::Omega => base[i] = 0,
            }
        }
        let omega_dims: Vec<usize> = (0..d).filter(|&i| label.get(i).is_omega()).collect();
        let mut choice: Vec<u64> = omega_dims.iter().map(|&i| v[i]).collect();
        loop {
            let mut out = base.clone();
            for (k, &i) in omega_dims.iter().enumerate() {
                out[i] = choice[k];
            }
            let dst = self.encode(dst_state, &out);
            self.edges.push((src, dst));
            let mut k = 0;
            loop {
                if k == omega_dims.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] <= self.caps[omega_dims[k]] {
                    break;
                }
                choice[k] = v[omega_dims[k]];
                k += 1;
            }
            if k == omega_dims.len() {
                break;
            }
        }
    }

    fn owner_of(&self, vertex: usize) -> Owner {
        debug_assert!(vertex >= 1);
        let s = (vertex as u64 - 1) / self.per_state;
        self.owners[s as usize]
    }

    /// Vertices from which the mover avoids Fail forever: the complement of
    /// the adversary's attractor to Fail.
    pub fn safe_vertices(&self) -> Vec<bool> {
        let n = self.num_vertices;
        // Reverse adjacency by counting sort on destinations.
        let mut indeg = vec![0u32; n];
        for &(_, dst) in &self.edges {
            indeg[dst as usize] += 1;
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + indeg[i] as usize;
        }
        let mut preds = vec![0u32; self.edges.len()];
        let mut fill = start.clone();
        let mut outdeg = vec![0u32; n];
        for &(src, dst) in &self.edges {
            preds[fill[dst as usize]] = src;
            fill[dst as usize] += 1;
            outdeg[src as usize] += 1;
        }

        let mut attr = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        attr[0] = true;
        queue.push_back(0usize);
        while let Some(x) = queue.pop_front() {
            for &p in &preds[start[x]..start[x + 1]] {
                let p = p as usize;
                if attr[p] {
                    continue;
                }
                let pull = match self.owner_of(p) {
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
}

fn assert_in_box(alpha: &LoadVector, caps: &[u64]) {
    assert!(
        alpha
            .components()
            .iter()
            .zip(caps)
            .all(|(&a, &c)| a <= c),
        "initial load must lie within the oracle box"
    );
}

/// Does the controller win safety from (s, alpha) when all loads are
/// tracked up to `cap`? With cap at least d*l*|S| this is true membership.
pub fn oracle_safe_membership(
    g: &Game,
    s: StateId,
    alpha: &LoadVector,
    cap: u64,
) -> Result<bool, OracleError> {
    let caps = vec![cap; g.dimension()];
    assert_in_box(alpha, &caps);
    let arena = OracleArena::build(g, &caps)?;
    let safe = arena.safe_vertices();
    Ok(safe[arena.encode(s.0, alpha.components()) as usize])
}

/// Minimal safe loads at `s` within the box [1..cap]^d, by exhaustive
/// membership over one arena solve.
pub fn oracle_safe_minimals(
    g: &Game,
    s: StateId,
    cap: u64,
) -> Result<Antichain<LoadVector>, OracleError> {
    let caps = vec![cap; g.dimension()];
    let arena = OracleArena::build(g, &caps)?;
    let safe = arena.safe_vertices();
    let mut out = Vec::new();
    for_each_in_box(&caps, |v| {
        if safe[arena.encode(s.0, v) as usize] {
            out.push(LoadVector::new(v.to_vec()).unwrap());
        }
    });
    Ok(min_set(out))
}

/// Does the controller win safety from (s, alpha) while keeping every
/// visited load componentwise at most alpha?
pub fn oracle_cover_membership(
    g: &Game,
    s: StateId,
    alpha: &LoadVector,
) -> Result<bool, OracleError> {
    let caps: Vec<u64> = alpha.components().to_vec();
    let arena = OracleArena::build(g, &caps)?;
    let safe = arena.safe_vertices();
    Ok(safe[arena.encode(s.0, alpha.components()) as usize])
}

/// Minimal covering loads at `s` within [1..cap]^d. Each candidate gets its
/// own truncated arena; nothing is inferred from monotonicity.
pub fn oracle_cover_minimals(
    g: &Game,
    s: StateId,
    cap: u64,
) -> Result<Antichain<LoadVector>, OracleError> {
    let caps = vec![cap; g.dimension()];
    let mut members = Vec::new();
    let mut failure = None;
    for_each_in_box(&caps, |v| {
        if failure.is_some() {
            return;
        }
        let alpha = LoadVector::new(v.to_vec()).unwrap();
        match oracle_cover_membership(g, s, &alpha) {
            Ok(true) => members.push(alpha),
            Ok(false) => {}
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(min_set(members)),
    }
}

/// Visit every vector in the box [1..caps] in odometer order.
fn for_each_in_box(caps: &[u64], mut f: impl FnMut(&[u64])) {
    let d = caps.len();
    let mut v = vec![1u64; d];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            v[i] += 1;
            if v[i] <= caps[i] {
                break;
            }
            v[i] = 1;
            i += 1;
        }
    }
}

/// Brute-force minimal safe distances: bounded-depth alternating search
/// over every candidate load in the box [1..|S|*l+1]^d. Plays longer than
/// |S| steps cannot improve a minimal distance, so the depth bound is safe.
pub fn oracle_min_dist(dg: &DistanceGame, s: StateId) -> Antichain<ExtVector> {
    let g = dg.game();
    let l = crate::model::max_finite_drop(g);
    let bound = g.num_states() as u64 * l + 1;
    let caps = vec![bound; g.dimension()];
    let mut reached = Vec::new();
    for_each_in_box(&caps, |v| {
        if can_reach(g, dg.target(), s, v, g.num_states()) {
            reached.push(ExtVector::new(v.to_vec()));
        }
    });
    if reached.is_empty() {
        return Antichain::singleton(ExtVector::all_inf(g.dimension()));
    }
    min_set(reached)
}

fn can_reach(g: &Game, target: StateId, s: StateId, v: &[u64], depth: usize) -> bool {
    if s == target {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let step = |e: &crate::model::Edge| -> Option<Vec<u64>> {
        let mut next = v.to_vec();
        for (i, &d) in e.label.deltas().iter().enumerate() {
            match d {
                ResourceDelta::Fin(c) => {
                    let drop = c.unsigned_abs();
                    if next[i] <= drop {
                        return None;
                    }
                    next[i] -= drop;
                }
                ResourceDelta::Omega => unreachable!("distance games are omega-free"),
            }
        }
        Some(next)
    };
    match g.owner(s) {
        Owner::Box => g.out_edges(s).any(|e| {
            step(e).is_some_and(|next| can_reach(g, target, e.dst, &next, depth - 1))
        }),
        Owner::Diamond => g.out_edges(s).all(|e| match step(e) {
            Some(next) => can_reach(g, target, e.dst, &next, depth - 1),
            None => false,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn lv(cs: &[u64]) -> LoadVector {
        LoadVector::new(cs.to_vec()).unwrap()
    }

    #[test]
    fn safe_membership_on_fixtures() {
        let g = fixtures::g_pump();
        let s = g.state_id("s").unwrap();
        assert_eq!(oracle_safe_membership(&g, s, &lv(&[2]), 15), Ok(true));
        assert_eq!(oracle_safe_membership(&g, s, &lv(&[1]), 15), Ok(false));

        let g = fixtures::g_sink();
        let s = g.state_id("s").unwrap();
        assert_eq!(oracle_safe_membership(&g, s, &lv(&[9]), 9), Ok(false));

        let g = fixtures::g_loop();
        let s = g.state_id("s").unwrap();
        assert_eq!(oracle_safe_membership(&g, s, &lv(&[1]), 1), Ok(true));
    }

    #[test]
    fn safe_minimals_on_fixtures() {
        let g = fixtures::g_pump();
        let s = g.state_id("s").unwrap();
        let a = oracle_safe_minimals(&g, s, 15).unwrap();
        assert_eq!(a.elements(), &[lv(&[2])]);
        let u = g.state_id("u").unwrap();
        let a = oracle_safe_minimals(&g, u, 15).unwrap();
        assert_eq!(a.elements(), &[lv(&[6])]);

        let g = fixtures::g_order();
        let s = g.state_id("s").unwrap();
        let a = oracle_safe_minimals(&g, s, 16).unwrap();
        assert_eq!(a.elements(), &[lv(&[2, 4])]);

        let g = fixtures::g_sink();
        let s = g.state_id("s").unwrap();
        assert!(oracle_safe_minimals(&g, s, 9).unwrap().is_empty());
    }

    #[test]
    fn cover_on_fixtures() {
        let g = fixtures::g_pump();
        let s = g.state_id("s").unwrap();
        assert_eq!(oracle_cover_membership(&g, s, &lv(&[6])), Ok(true));
        assert_eq!(oracle_cover_membership(&g, s, &lv(&[5])), Ok(false));
        let a = oracle_cover_minimals(&g, s, 15).unwrap();
        assert_eq!(a.elements(), &[lv(&[6])]);

        let g = fixtures::g_loop();
        let s = g.state_id("s").unwrap();
        let a = oracle_cover_minimals(&g, s, 3).unwrap();
        assert_eq!(a.elements(), &[lv(&[1])]);
        let a = oracle_safe_minimals(&g, s, 3).unwrap();
        assert_eq!(a.elements(), &[lv(&[1])]);
    }

    #[test]
    fn two_player_membership() {
        let g = fixtures::g_2p();
        let q = g.state_id("q").unwrap();
        assert_eq!(oracle_safe_membership(&g, q, &lv(&[3]), 6), Ok(true));
        assert_eq!(oracle_safe_membership(&g, q, &lv(&[2]), 6), Ok(false));
    }

    #[test]
    fn arena_limit_is_enforced() {
        let g = fixtures::g_fork2();
        let s = g.state_id("s").unwrap();
        let err = oracle_safe_membership(&g, s, &lv(&[1, 1]), 1_000_000).unwrap_err();
        assert!(matches!(err, OracleError::ArenaTooLarge { .. }));
    }

    #[test]
    fn min_dist_oracle_matches_fixpoint_on_fixtures() {
        use crate::antichain::{min_dist, DistanceGame};
        for g in [fixtures::g_fork2(), fixtures::g_dia()] {
            let r = g.state_id("r").unwrap();
            let dg = DistanceGame::new(g.clone(), r).unwrap();
            for s in g.states() {
                assert_eq!(
                    oracle_min_dist(&dg, s).elements(),
                    min_dist(&dg, s).elements(),
                    "state {}",
                    g.name(s)
                );
            }
        }
    }
}
