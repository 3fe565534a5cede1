//! Unfoldings that turn safe-set computation into minimal-distance
//! reachability.
//!
//! Both constructions track which resources have been reloaded at least
//! once and zero out everything already covered, so the produced games are
//! ω-free and [`min_dist`] applies. The permutation unfolding fixes the
//! order in which a one-player strategy first reloads each resource and a
//! union over all `d!` orders recovers the full safe set; the subset
//! unfolding works for decreasing games of either player count at the
//! price of `2^d` copies of the state space.

use std::collections::HashSet;

use super::automaton::is_i_safe;
use super::{Permutation, RestrictedError};
use crate::antichain::{min_dist, min_set, Antichain, DistanceGame};
use crate::model::{
    classify, validate_game, Game, GameDescription, Label, LoadVector, Owner, ResourceDelta,
    StateId,
};
use crate::solver::{prune_unsafe_states, PruneError, SolveError};

/// How an edge's reload set is matched against the permutation window.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum CpiEdgeRule {
    /// The not-yet-banked reloads must be exactly the next entries of the
    /// permutation; edges that would skip ahead are dropped.
    #[default]
    ExactWindow,
    /// Every window length whose entries are all reloaded is admitted and
    /// surplus reloads are zeroed without being banked. Admits more plays
    /// per permutation than [`CpiEdgeRule::ExactWindow`], never fewer.
    LiteralWindow,
}

fn zero_label(d: usize) -> Label {
    Label::new(vec![ResourceDelta::Fin(0); d])
}

fn drain_label(d: usize) -> Label {
    Label::new(vec![ResourceDelta::Fin(-1); d])
}

fn push_edge(
    desc: &mut GameDescription,
    seen: &mut HashSet<(String, String, Label)>,
    src: String,
    dst: String,
    label: Label,
) {
    if seen.insert((src.clone(), dst.clone(), label.clone())) {
        desc.edges.push((src, dst, label));
    }
}

/// The permutation unfolding with the default window rule.
pub fn build_c_pi(g: &Game, pi: &Permutation) -> Result<DistanceGame, RestrictedError> {
    build_c_pi_with(g, pi, CpiEdgeRule::ExactWindow)
}

/// Unfold a one-player game along reload order `pi`.
///
/// States are `q@m` (state `q` with the first `m` entries of `pi` banked)
/// plus the retirement target `r` and the drain `h`. A game edge appears
/// at window position `m` when its reloads extend the banked prefix per
/// `rule`; its label is zeroed on banked and reloaded components. `q@m`
/// retires to `r` exactly when `q` can cycle forever touching only banked
/// resources. The drain keeps the game total without offering any finite
/// distance. Minimal distances to `r` from `q@0` are the minimal safe
/// loads at `q` among strategies reloading in `pi` order.
///
/// The caller is expected to prune states with empty safe sets first;
/// the construction stays sound without it, but the stated size and path
/// bounds are part of the contract only for pruned inputs.
pub fn build_c_pi_with(
    g: &Game,
    pi: &Permutation,
    rule: CpiEdgeRule,
) -> Result<DistanceGame, RestrictedError> {
    if !classify(g).one_player {
        return Err(RestrictedError::NotOnePlayer);
    }
    let d = g.dimension();
    assert!(d <= 64, "reload sets are kept as u64 bitmasks");
    assert_eq!(pi.len(), d, "permutation dimension must match the game");

    let mut desc = GameDescription {
        dimension: d,
        states: Vec::new(),
        edges: Vec::new(),
    };
    for q in g.states() {
        for m in 0..=d {
            desc.states.push((format!("{}@{}", g.name(q), m), Owner::Box));
        }
    }
    desc.states.push(("r".to_string(), Owner::Box));
    desc.states.push(("h".to_string(), Owner::Box));

    let mut seen = HashSet::new();
    for q in g.states() {
        for m in 0..=d {
            let src = format!("{}@{}", g.name(q), m);
            let banked = pi.prefix(m).bits();
            for e in g.out_edges(q) {
                let omegas = e.label.omega_mask();
                let fresh = omegas & !banked;
                match rule {
                    CpiEdgeRule::ExactWindow => {
                        let k = fresh.count_ones() as usize;
                        if m + k <= d && fresh == pi.prefix(m + k).bits() & !banked {
                            push_edge(
                                &mut desc,
                                &mut seen,
                                src.clone(),
                                format!("{}@{}", g.name(e.dst), m + k),
                                e.label.zeroed_on(pi.prefix(m + k).bits() | omegas),
                            );
                        }
                    }
                    CpiEdgeRule::LiteralWindow => {
                        let mut k = 0;
                        loop {
                            push_edge(
                                &mut desc,
                                &mut seen,
                                src.clone(),
                                format!("{}@{}", g.name(e.dst), m + k),
                                e.label.zeroed_on(pi.prefix(m + k).bits() | omegas),
                            );
                            if m + k == d || omegas >> pi.order()[m + k] & 1 == 0 {
                                break;
                            }
                            k += 1;
                        }
                    }
                }
            }
            if is_i_safe(g, q, pi.prefix(m))? {
                push_edge(&mut desc, &mut seen, src.clone(), "r".to_string(), zero_label(d));
            }
            push_edge(&mut desc, &mut seen, src, "h".to_string(), drain_label(d));
        }
    }
    push_edge(&mut desc, &mut seen, "r".to_string(), "r".to_string(), zero_label(d));
    push_edge(&mut desc, &mut seen, "h".to_string(), "h".to_string(), drain_label(d));

    let game = validate_game(&desc).expect("the unfolding is well-formed by construction");
    let target = game.state_id("r").unwrap();
    Ok(DistanceGame::new(game, target).expect("unfolded labels are omega-free"))
}

/// Unfold a decreasing game over reloaded subsets.
///
/// States are `q@I` for every subset `I` of dimensions (as a bitmask)
/// plus the target `r`; an edge updates `I` with its reloads and is
/// zeroed on the updated set, and `q@I` belongs to the controller when
/// `q` does or `I` is already full, in which case it may retire to `r`.
/// Minimal distances from `q@0` to `r` are the minimal safe loads at `q`.
///
/// The input must be pruned to states with nonempty safe sets: retirement
/// at a full subset is unguarded, so an unsafe state left in the game
/// would let distances through it pretend the play can continue forever.
pub fn build_hat_game(g: &Game) -> Result<DistanceGame, RestrictedError> {
    if !classify(g).decreasing {
        return Err(RestrictedError::NotDecreasing);
    }
    let d = g.dimension();
    assert!(d <= 64, "reload sets are kept as u64 bitmasks");
    let needed = (1u128 << d) * g.num_states() as u128 + 1;
    let limit = crate::arena_limit();
    if needed > limit as u128 {
        return Err(RestrictedError::Solve(SolveError::ArenaTooLarge {
            needed: needed.min(u64::MAX as u128) as u64,
            limit,
        }));
    }
    let subsets = 1u64 << d;
    let full = subsets - 1;

    let mut desc = GameDescription {
        dimension: d,
        states: Vec::new(),
        edges: Vec::new(),
    };
    for q in g.states() {
        for i in 0..subsets {
            let owner = if g.owner(q) == Owner::Box || i == full {
                Owner::Box
            } else {
                Owner::Diamond
            };
            desc.states.push((format!("{}@{}", g.name(q), i), owner));
        }
    }
    desc.states.push(("r".to_string(), Owner::Box));

    let mut seen = HashSet::new();
    for q in g.states() {
        for i in 0..subsets {
            let src = format!("{}@{}", g.name(q), i);
            for e in g.out_edges(q) {
                let j = i | e.label.omega_mask();
                push_edge(
                    &mut desc,
                    &mut seen,
                    src.clone(),
                    format!("{}@{}", g.name(e.dst), j),
                    e.label.zeroed_on(j),
                );
            }
            if i == full {
                push_edge(&mut desc, &mut seen, src, "r".to_string(), zero_label(d));
            }
        }
    }
    push_edge(&mut desc, &mut seen, "r".to_string(), "r".to_string(), zero_label(d));

    let game = validate_game(&desc).expect("the unfolding is well-formed by construction");
    let target = game.state_id("r").unwrap();
    Ok(DistanceGame::new(game, target).expect("unfolded labels are omega-free"))
}

/// Minimal safe loads at `s` of a one-player game, as the union of the
/// permutation unfoldings. Single-threaded; see
/// [`min_safe_one_player_jobs`] for the parallel variant.
pub fn min_safe_one_player(g: &Game, s: StateId) -> Result<Antichain<LoadVector>, RestrictedError> {
    min_safe_one_player_jobs(g, s, 1)
}

/// Like [`min_safe_one_player`] with the `d!` permutation solves spread
/// over up to `jobs` worker threads. The merge is performed in permutation
/// order, so the result does not depend on scheduling.
pub fn min_safe_one_player_jobs(
    g: &Game,
    s: StateId,
    jobs: usize,
) -> Result<Antichain<LoadVector>, RestrictedError> {
    if !classify(g).one_player {
        return Err(RestrictedError::NotOnePlayer);
    }
    let pruned = match prune_unsafe_states(g) {
        Ok(p) => p,
        Err(PruneError::AllStatesUnsafe) => return Ok(Antichain::new()),
        Err(PruneError::Solve(e)) => return Err(RestrictedError::Solve(e)),
    };
    let Some(ps) = pruned.state_id(g.name(s)) else {
        return Ok(Antichain::new());
    };
    let start = format!("{}@0", pruned.name(ps));

    let perms = Permutation::all(g.dimension());
    let jobs = jobs.clamp(1, perms.len());
    let chunk = perms.len().div_ceil(jobs);
    let results: Vec<Result<Vec<LoadVector>, RestrictedError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = perms
            .chunks(chunk)
            .map(|batch| {
                let (pruned, start) = (&pruned, &start);
                scope.spawn(move || -> Result<Vec<LoadVector>, RestrictedError> {
                    let mut out = Vec::new();
                    for pi in batch {
                        out.extend(per_permutation(pruned, start, pi)?);
                    }
                    Ok(out)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("permutation worker panicked"))
            .collect()
    });

    let mut found = Vec::new();
    for r in results {
        found.extend(r?);
    }
    Ok(min_set(found))
}

fn per_permutation(
    pruned: &Game,
    start: &str,
    pi: &Permutation,
) -> Result<Vec<LoadVector>, RestrictedError> {
    let dg = build_c_pi(pruned, pi)?;
    let sid = dg
        .game()
        .state_id(start)
        .expect("every source state appears at window position 0");
    Ok(min_dist(&dg, sid).iter().filter_map(|v| v.to_load()).collect())
}

/// Minimal safe loads at `s` of a decreasing game, via the subset
/// unfolding. Handles both players; cost `2^d · |S|` states.
pub fn min_safe_decreasing(g: &Game, s: StateId) -> Result<Antichain<LoadVector>, RestrictedError> {
    if !classify(g).decreasing {
        return Err(RestrictedError::NotDecreasing);
    }
    let pruned = match prune_unsafe_states(g) {
        Ok(p) => p,
        Err(PruneError::AllStatesUnsafe) => return Ok(Antichain::new()),
        Err(PruneError::Solve(e)) => return Err(RestrictedError::Solve(e)),
    };
    let Some(ps) = pruned.state_id(g.name(s)) else {
        return Ok(Antichain::new());
    };
    let dg = build_hat_game(&pruned)?;
    let start = dg
        .game()
        .state_id(&format!("{}@0", pruned.name(ps)))
        .expect("every source state appears at the empty subset");
    Ok(min_set(
        min_dist(&dg, start).iter().filter_map(|v| v.to_load()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::ResourceDelta::{Fin, Omega};
    use crate::solver::safe_membership;

    fn lv(cs: &[u64]) -> LoadVector {
        LoadVector::new(cs.to_vec()).unwrap()
    }

    fn loads(a: &Antichain<LoadVector>) -> Vec<Vec<u64>> {
        let mut v: Vec<Vec<u64>> = a.iter().map(|x| x.components().to_vec()).collect();
        v.sort();
        v
    }

    #[test]
    fn window_rule_admits_only_the_next_run() {
        let g = fixtures::g_order();
        let dg = build_c_pi(&g, &Permutation::new(vec![0, 1])).unwrap();
        let cg = dg.game();
        assert_eq!(cg.num_states(), 4 * 3 + 2);

        let a0 = cg.state_id("a@0").unwrap();
        let hits: Vec<_> = cg.out_edges(a0).filter(|e| cg.name(e.dst) == "b@1").collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].label, Label::new(vec![Fin(0), Fin(-1)]));

        let c2 = cg.state_id("c@2").unwrap();
        assert!(cg.out_edges(c2).any(|e| cg.name(e.dst) == "r"));

        // Under the reversed order the same edge would skip ahead.
        let dg = build_c_pi(&g, &Permutation::new(vec![1, 0])).unwrap();
        let cg = dg.game();
        let a0 = cg.state_id("a@0").unwrap();
        assert!(cg.out_edges(a0).all(|e| !cg.name(e.dst).starts_with('b')));
    }

    #[test]
    fn unfolded_games_are_omega_free_and_small() {
        for pi in Permutation::all(2) {
            let dg = build_c_pi(&fixtures::g_order(), &pi).unwrap();
            let cg = dg.game();
            assert_eq!(cg.num_states(), 14);
            assert!(cg.edges().iter().all(|e| e.label.is_omega_free()));
            for q in cg.states() {
                assert!(cg.out_edge_ids(q).len() <= 4 + 2);
            }
        }
    }

    #[test]
    fn literal_window_banks_lazily_but_stays_sound() {
        let g = fixtures::g_order();
        let pi = Permutation::new(vec![1, 0]);

        let exact = build_c_pi(&g, &pi).unwrap();
        let s0 = exact.game().state_id("s@0").unwrap();
        assert!(min_dist(&exact, s0).iter().all(|v| !v.is_finite()));

        let lit = build_c_pi_with(&g, &pi, CpiEdgeRule::LiteralWindow).unwrap();
        let s0 = lit.game().state_id("s@0").unwrap();
        let got: Vec<LoadVector> = min_dist(&lit, s0).iter().filter_map(|v| v.to_load()).collect();
        assert_eq!(got, vec![lv(&[3, 4])]);
        let s = g.state_id("s").unwrap();
        assert!(safe_membership(&g, s, &lv(&[3, 4])).unwrap());
    }

    #[test]
    fn every_finite_unfolded_distance_is_a_safe_load() {
        let g = fixtures::g_order();
        for pi in Permutation::all(2) {
            let dg = build_c_pi(&g, &pi).unwrap();
            for q in g.states() {
                let start = dg
                    .game()
                    .state_id(&format!("{}@0", g.name(q)))
                    .unwrap();
                for v in min_dist(&dg, start).iter() {
                    if let Some(load) = v.to_load() {
                        assert!(safe_membership(&g, q, &load).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn subset_unfolding_banks_reloads_and_retires_when_full() {
        let dg = build_hat_game(&fixtures::g_pump()).unwrap();
        let hg = dg.game();
        assert_eq!(hg.num_states(), 2 * 3 + 1);
        let expect = [
            ("s@0", "t@0", Label::new(vec![Fin(-1)])),
            ("t@0", "u@1", Label::new(vec![Fin(0)])),
            ("u@1", "t@1", Label::new(vec![Fin(0)])),
            ("t@1", "r", Label::new(vec![Fin(0)])),
        ];
        for (src, dst, label) in expect {
            let sid = hg.state_id(src).unwrap();
            assert!(
                hg.out_edges(sid)
                    .any(|e| hg.name(e.dst) == dst && e.label == label),
                "missing {src} -> {dst}"
            );
        }

        let dg = build_hat_game(&fixtures::g_2p()).unwrap();
        let hg = dg.game();
        assert_eq!(hg.owner(hg.state_id("q@0").unwrap()), Owner::Diamond);
        assert_eq!(hg.owner(hg.state_id("q@1").unwrap()), Owner::Box);
        assert_eq!(hg.owner(hg.state_id("a@1").unwrap()), Owner::Box);
    }

    #[test]
    fn subset_unfolding_paths_stay_short() {
        fn dfs(gm: &Game, v: usize, on_path: &mut Vec<bool>) -> usize {
            let mut best = 0;
            for e in gm.out_edges(StateId(v)) {
                let w = e.dst.0;
                if !on_path[w] {
                    on_path[w] = true;
                    best = best.max(1 + dfs(gm, w, on_path));
                    on_path[w] = false;
                }
            }
            best
        }
        for g in [fixtures::g_pump(), fixtures::g_2p()] {
            let dg = build_hat_game(&g).unwrap();
            let hg = dg.game();
            let longest = (0..hg.num_states())
                .map(|v| {
                    let mut on = vec![false; hg.num_states()];
                    on[v] = true;
                    dfs(hg, v, &mut on)
                })
                .max()
                .unwrap();
            assert!(longest <= g.num_states() * g.dimension() + 1);
        }
    }

    #[test]
    fn hat_games_beyond_the_vertex_budget_are_refused() {
        let mut b = crate::model::GameBuilder::new(30).state("x", Owner::Box);
        b = b.edge("x", "x", &vec![Omega; 30]);
        let g = b.build().unwrap();
        match build_hat_game(&g) {
            Err(RestrictedError::Solve(SolveError::ArenaTooLarge { needed, .. })) => {
                assert_eq!(needed, (1u64 << 30) + 1);
            }
            other => panic!("expected a size refusal, got {other:?}"),
        }
    }

    #[test]
    fn minimal_safe_loads_by_permutation_union() {
        let g = fixtures::g_order();
        let s = g.state_id("s").unwrap();
        let seq = min_safe_one_player(&g, s).unwrap();
        assert_eq!(loads(&seq), vec![vec![2, 4]]);
        let par = min_safe_one_player_jobs(&g, s, 3).unwrap();
        assert_eq!(loads(&par), loads(&seq));

        let g = fixtures::g_pump();
        let s = g.state_id("s").unwrap();
        assert_eq!(loads(&min_safe_one_player(&g, s).unwrap()), vec![vec![2]]);

        let g = fixtures::g_sink();
        let s = g.state_id("s").unwrap();
        assert!(min_safe_one_player(&g, s).unwrap().is_empty());

        let g = fixtures::g_2p();
        let q = g.state_id("q").unwrap();
        assert_eq!(
            min_safe_one_player(&g, q).unwrap_err(),
            RestrictedError::NotOnePlayer
        );

        // Both formulas of the chained gadget are satisfiable, so its
        // designated load (5,12,12,13) is dominated rather than minimal.
        let g = fixtures::g_dp();
        let s1 = g.state_id("s1").unwrap();
        let minimal = min_safe_one_player(&g, s1).unwrap();
        assert!(minimal.elements().contains(&lv(&[5, 12, 12, 12])));
        assert!(!minimal.elements().contains(&lv(&[5, 12, 12, 13])));
    }

    #[test]
    fn minimal_safe_loads_by_subset_unfolding() {
        let g = fixtures::g_pump();
        let s = g.state_id("s").unwrap();
        assert_eq!(loads(&min_safe_decreasing(&g, s).unwrap()), vec![vec![2]]);

        let g = fixtures::g_2p();
        let q = g.state_id("q").unwrap();
        assert_eq!(loads(&min_safe_decreasing(&g, q).unwrap()), vec![vec![3]]);

        let g = fixtures::g_sink();
        let s = g.state_id("s").unwrap();
        assert!(min_safe_decreasing(&g, s).unwrap().is_empty());

        let g = fixtures::g_order();
        let s = g.state_id("s").unwrap();
        assert_eq!(
            min_safe_decreasing(&g, s).unwrap_err(),
            RestrictedError::NotDecreasing
        );

        // The alternation gadget encodes a true formula: its critical
        // load is the whole minimal antichain at s1.
        let g = fixtures::g_qbf3();
        let s1 = g.state_id("s1").unwrap();
        assert_eq!(loads(&min_safe_decreasing(&g, s1).unwrap()), vec![vec![7, 7, 7]]);
    }
}
