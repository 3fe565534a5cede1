//! Generalized Büchi games for emptiness in decreasing games.
//!
//! In a decreasing game no cycle leaves a resource untouched, so any play
//! that never reloads some resource keeps consuming it and eventually dies.
//! A load large enough therefore exists at `s` exactly when the controller
//! can traverse, for every dimension, a reloading edge infinitely often:
//! a generalized Büchi game on the unchanged arena.

use super::RestrictedError;
use crate::model::{classify, Game, Owner, StateId};
use crate::solver::subgame::{attractor_within, TurnGraph};

/// Two-player game where the controller must traverse an edge of every
/// target set infinitely often.
#[derive(Clone, Debug)]
pub struct GenBuchiGame {
    names: Vec<String>,
    owners: Vec<Owner>,
    edges: Vec<(usize, usize)>,
    targets: Vec<Vec<usize>>,
}

impl GenBuchiGame {
    /// Assemble a generalized Büchi game. Panics on structural misuse: no
    /// states, a duplicate or unknown state name, a state without an
    /// outgoing edge, no target sets, or an edge id out of range.
    pub fn new(
        states: Vec<(String, Owner)>,
        edges: Vec<(String, String)>,
        mut targets: Vec<Vec<usize>>,
    ) -> GenBuchiGame {
        assert!(!states.is_empty(), "a Büchi game needs at least one state");
        assert!(!targets.is_empty(), "a Büchi game needs at least one target set");
        let mut index = std::collections::HashMap::new();
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
        let mut outdeg = vec![0usize; states.len()];
        for &(src, _) in &edges {
            outdeg[src] += 1;
        }
        for (i, &o) in outdeg.iter().enumerate() {
            assert!(o > 0, "state {:?} has no outgoing edge", states[i].0);
        }
        for set in &mut targets {
            set.sort_unstable();
            set.dedup();
            if let Some(&max) = set.last() {
                assert!(max < edges.len(), "edge id {max} out of range");
            }
        }
        let (names, owners) = states.into_iter().unzip();
        GenBuchiGame {
            names,
            owners,
            edges,
            targets,
        }
    }

    /// One target set per resource, holding its reloading edges.
    pub fn from_game(g: &Game) -> GenBuchiGame {
        let states = g
            .states()
            .map(|s| (g.name(s).to_string(), g.owner(s)))
            .collect();
        let edges = g
            .edges()
            .iter()
            .map(|e| (g.name(e.src).to_string(), g.name(e.dst).to_string()))
            .collect();
        let targets = (0..g.dimension())
            .map(|i| {
                g.edges()
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.label.get(i).is_omega())
                    .map(|(id, _)| id)
                    .collect()
            })
            .collect();
        GenBuchiGame::new(states, edges, targets)
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn targets(&self) -> &[Vec<usize>] {
        &self.targets
    }
}

/// States from which the controller wins the generalized Büchi game, as a
/// mask indexed by state.
///
/// Degeneralization tracks which target set is awaited next: product
/// vertex (v, c) waits for set c, an awaited edge advances the counter,
/// and a wrap routes through a relay vertex so that visiting relays
/// infinitely often is equivalent to hitting every set infinitely often.
/// The single-target game is then solved by the classical loop: remove the
/// adversary attractor of the vertices that cannot reach a relay, until
/// the remainder re-reaches relays forever.
pub fn solve_generalized_buchi(bg: &GenBuchiGame) -> Vec<bool> {
    let n = bg.names.len();
    let m = bg.targets.len();
    let mut awaited = vec![vec![false; bg.edges.len()]; m];
    for (i, set) in bg.targets.iter().enumerate() {
        for &e in set {
            awaited[i][e] = true;
        }
    }

    let base = n * m;
    let mut relays = 0usize;
    let mut moves: Vec<(u32, u32, bool)> = Vec::new();
    for (c, awaited_c) in awaited.iter().enumerate() {
        for (e, &(src, dst)) in bg.edges.iter().enumerate() {
            let from = (src * m + c) as u32;
            if awaited_c[e] {
                let wrap = c + 1 == m;
                let next = if wrap { 0 } else { c + 1 };
                moves.push((from, (dst * m + next) as u32, wrap));
                if wrap {
                    relays += 1;
                }
            } else {
                moves.push((from, (dst * m + c) as u32, false));
            }
        }
    }

    let total = base + relays;
    let mut owners = Vec::with_capacity(total);
    for s in 0..n {
        for _ in 0..m {
            owners.push(bg.owners[s]);
        }
    }
    owners.resize(total, Owner::Box);
    let mut graph = TurnGraph::new(owners);
    let mut is_relay = vec![false; total];
    let mut next_relay = base as u32;
    for &(from, to, wrap) in &moves {
        if wrap {
            graph.add_edge(from, next_relay);
            graph.add_edge(next_relay, to);
            is_relay[next_relay as usize] = true;
            next_relay += 1;
        } else {
            graph.add_edge(from, to);
        }
    }

    let mut active = vec![true; total];
    loop {
        let targets: Vec<bool> = (0..total).map(|v| active[v] && is_relay[v]).collect();
        let reach = attractor_within(&graph, Owner::Box, &targets, &active);
        let mut doomed = vec![false; total];
        let mut any = false;
        for v in 0..total {
            if active[v] && !reach[v] {
                doomed[v] = true;
                any = true;
            }
        }
        if !any {
            break;
        }
        let lost = attractor_within(&graph, Owner::Diamond, &doomed, &active);
        for v in 0..total {
            if lost[v] {
                active[v] = false;
            }
        }
    }
    (0..n).map(|s| active[s * m]).collect()
}

/// Is the safe set at `s` empty? Decreasing games only: the controller
/// survives from some load iff it wins the derived generalized Büchi game.
pub fn emptiness_decreasing(g: &Game, s: StateId) -> Result<bool, RestrictedError> {
    if !classify(g).decreasing {
        return Err(RestrictedError::NotDecreasing);
    }
    Ok(!solve_generalized_buchi(&GenBuchiGame::from_game(g))[s.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn target_sets_are_the_reloading_edges() {
        let g = fixtures::g_pump();
        let bg = GenBuchiGame::from_game(&g);
        let tu = g
            .edges()
            .iter()
            .position(|e| g.name(e.src) == "t" && g.name(e.dst) == "u")
            .unwrap();
        assert_eq!(bg.targets(), &[vec![tu]]);

        let bg = GenBuchiGame::from_game(&fixtures::g_sink());
        assert_eq!(bg.targets(), &[vec![]]);
    }

    #[test]
    fn winning_regions_on_fixtures() {
        let bg = GenBuchiGame::from_game(&fixtures::g_pump());
        assert_eq!(solve_generalized_buchi(&bg), vec![true; 3]);

        let bg = GenBuchiGame::from_game(&fixtures::g_sink());
        assert_eq!(solve_generalized_buchi(&bg), vec![false]);

        let bg = GenBuchiGame::from_game(&fixtures::g_2p());
        assert_eq!(solve_generalized_buchi(&bg), vec![true; 3]);
    }

    #[test]
    fn multi_target_alternation() {
        // Both sets must recur; a □ state alternating two loops manages,
        // a ◇ state just starves one set.
        let states = vec![("s".to_string(), Owner::Box)];
        let edges = vec![
            ("s".to_string(), "s".to_string()),
            ("s".to_string(), "s".to_string()),
        ];
        let bg = GenBuchiGame::new(states, edges, vec![vec![0], vec![1]]);
        assert_eq!(solve_generalized_buchi(&bg), vec![true]);

        let states = vec![("s".to_string(), Owner::Diamond)];
        let edges = vec![
            ("s".to_string(), "s".to_string()),
            ("s".to_string(), "s".to_string()),
        ];
        let bg = GenBuchiGame::new(states, edges, vec![vec![0], vec![1]]);
        assert_eq!(solve_generalized_buchi(&bg), vec![false]);
    }

    #[test]
    fn emptiness_on_fixtures() {
        let g = fixtures::g_pump();
        assert_eq!(emptiness_decreasing(&g, g.state_id("s").unwrap()), Ok(false));

        let g = fixtures::g_sink();
        assert_eq!(emptiness_decreasing(&g, g.state_id("s").unwrap()), Ok(true));

        let g = fixtures::g_2p();
        assert_eq!(emptiness_decreasing(&g, g.state_id("q").unwrap()), Ok(false));

        // A zero-cost loop breaks the decreasing precondition.
        let g = fixtures::g_order();
        assert_eq!(
            emptiness_decreasing(&g, g.state_id("s").unwrap()),
            Err(RestrictedError::NotDecreasing)
        );
    }
}
