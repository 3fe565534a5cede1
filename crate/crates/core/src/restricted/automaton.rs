//! Safe-set nonemptiness for one-player games, by SCC refinement.
//!
//! With a single player, some load is safe at `s` exactly when one
//! infinite path from `s` reloads every resource it keeps consuming. The
//! edges repeated forever all lie in one strongly connected component, so
//! it suffices to look for an SCC whose internal edges consume no
//! dimension without also reloading it; deleting the offending consuming
//! edges and refining handles the components that overshoot.

use super::{ReloadSet, RestrictedError};
use crate::model::{classify, Game, ResourceDelta, StateId};

/// Is Safe(`s`) nonempty? One-player games only.
pub fn streett_automaton_nonempty(g: &Game, s: StateId) -> Result<bool, RestrictedError> {
    if !classify(g).one_player {
        return Err(RestrictedError::NotOnePlayer);
    }
    let live = vec![true; g.edges().len()];
    Ok(accepting_cycle_from(g, s, live, dims_mask(g.dimension())))
}

pub(crate) fn dims_mask(dimension: usize) -> u64 {
    ReloadSet::full(dimension).bits()
}

/// Does an infinite path from `s` through `live` edges exist whose
/// infinitely-repeated edge set reloads every `dims` dimension it
/// consumes? Dead ends simply fail; totality is not required.
pub(crate) fn accepting_cycle_from(g: &Game, s: StateId, live: Vec<bool>, dims: u64) -> bool {
    let mut reachable = vec![false; g.num_states()];
    reachable[s.0] = true;
    let mut stack = vec![s.0];
    while let Some(v) = stack.pop() {
        for &e in g.out_edge_ids(StateId(v)) {
            let w = g.edge(e).dst.0;
            if live[e] && !reachable[w] {
                reachable[w] = true;
                stack.push(w);
            }
        }
    }
    let scope: Vec<usize> = (0..g.num_states()).filter(|&v| reachable[v]).collect();
    refine(g, &scope, &live, dims)
}

fn refine(g: &Game, scope: &[usize], live: &[bool], dims: u64) -> bool {
    for scc in sccs(g, scope, live) {
        let mut in_scc = vec![false; g.num_states()];
        for &v in &scc {
            in_scc[v] = true;
        }
        let internal: Vec<usize> = (0..g.edges().len())
            .filter(|&e| live[e] && in_scc[g.edge(e).src.0] && in_scc[g.edge(e).dst.0])
            .collect();
        if internal.is_empty() {
            continue;
        }
        let mut consumed = 0u64;
        let mut reloaded = 0u64;
        for &e in &internal {
            for (i, &delta) in g.edge(e).label.deltas().iter().enumerate() {
                match delta {
                    ResourceDelta::Fin(c) if c < 0 => consumed |= 1 << i,
                    ResourceDelta::Omega => reloaded |= 1 << i,
                    ResourceDelta::Fin(_) => {}
                }
            }
        }
        let bad = consumed & !reloaded & dims;
        if bad == 0 {
            return true;
        }
        // Drop this component's edges that consume a starved dimension
        // and look again inside; the edge set strictly shrinks.
        let mut sub_live = live.to_vec();
        for (e, alive) in sub_live.iter_mut().enumerate() {
            if !internal.contains(&e) {
                *alive = false;
            }
        }
        for &e in &internal {
            let consumes_bad = g.edge(e).label.deltas().iter().enumerate().any(|(i, &d)| {
                bad >> i & 1 != 0 && matches!(d, ResourceDelta::Fin(c) if c < 0)
            });
            if consumes_bad {
                sub_live[e] = false;
            }
        }
        if refine(g, &scc, &sub_live, dims) {
            return true;
        }
    }
    false
}

/// Strongly connected components of the subgraph on `scope` vertices and
/// `live` edges, by forward then reverse depth-first search.
fn sccs(g: &Game, scope: &[usize], live: &[bool]) -> Vec<Vec<usize>> {
    let n = g.num_states();
    let mut in_scope = vec![false; n];
    for &v in scope {
        in_scope[v] = true;
    }
    let mut fwd: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, edge) in g.edges().iter().enumerate() {
        if live[e] && in_scope[edge.src.0] && in_scope[edge.dst.0] {
            fwd[edge.src.0].push(edge.dst.0);
            rev[edge.dst.0].push(edge.src.0);
        }
    }

    let mut order = Vec::with_capacity(scope.len());
    let mut visited = vec![false; n];
    for &root in scope {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < fwd[v].len() {
                let w = fwd[v][*i];
                *i += 1;
                if !visited[w] {
                    visited[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }

    let mut component = vec![usize::MAX; n];
    let mut result: Vec<Vec<usize>> = Vec::new();
    for &v in order.iter().rev() {
        if component[v] != usize::MAX {
            continue;
        }
        let c = result.len();
        result.push(Vec::new());
        component[v] = c;
        let mut stack = vec![v];
        while let Some(w) = stack.pop() {
            result[c].push(w);
            for &x in &rev[w] {
                if component[x] == usize::MAX {
                    component[x] = c;
                    stack.push(x);
                }
            }
        }
    }
    result
}

/// Is `s` I-safe: can the controller stay forever on edges that leave
/// every dimension outside `i` untouched, reloading whatever it consumes
/// inside `i`? The zero-subgame keeps exactly the edges whose label is 0
/// outside `i`; successor-less vertices are pruned iteratively so that
/// unrelated dead ends cannot mask a genuine loop.
pub fn is_i_safe(g: &Game, s: StateId, i: ReloadSet) -> Result<bool, RestrictedError> {
    if !classify(g).one_player {
        return Err(RestrictedError::NotOnePlayer);
    }
    let d = g.dimension();
    assert!(d <= 64, "reload sets are kept as u64 bitmasks");
    let mut live: Vec<bool> = g
        .edges()
        .iter()
        .map(|e| {
            e.label
                .deltas()
                .iter()
                .enumerate()
                .all(|(dim, &delta)| i.contains(dim) || delta == ResourceDelta::Fin(0))
        })
        .collect();

    let n = g.num_states();
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for v in 0..n {
            if alive[v]
                && !g
                    .out_edge_ids(StateId(v))
                    .iter()
                    .any(|&e| live[e] && alive[g.edge(e).dst.0])
            {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !alive[s.0] {
        return Ok(false);
    }
    for (e, edge) in g.edges().iter().enumerate() {
        if !(alive[edge.src.0] && alive[edge.dst.0]) {
            live[e] = false;
        }
    }
    Ok(accepting_cycle_from(g, s, live, i.bits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn nonemptiness_on_fixtures() {
        let g = fixtures::g_pump();
        assert_eq!(
            streett_automaton_nonempty(&g, g.state_id("s").unwrap()),
            Ok(true)
        );

        let g = fixtures::g_sink();
        assert_eq!(
            streett_automaton_nonempty(&g, g.state_id("s").unwrap()),
            Ok(false)
        );

        let g = fixtures::g_chain();
        assert_eq!(
            streett_automaton_nonempty(&g, g.state_id("t").unwrap()),
            Ok(true)
        );
        assert_eq!(
            streett_automaton_nonempty(&g, g.state_id("s").unwrap()),
            Ok(true)
        );

        let g = fixtures::g_2p();
        assert_eq!(
            streett_automaton_nonempty(&g, g.state_id("q").unwrap()),
            Err(RestrictedError::NotOnePlayer)
        );
    }

    #[test]
    fn refinement_discards_overdrawn_components() {
        // One SCC where dimension 0 is consumed but only dimension 1
        // reloads; dropping the consuming edge leaves the harmless loop.
        let g = crate::model::GameBuilder::new(2)
            .state("a", crate::model::Owner::Box)
            .state("b", crate::model::Owner::Box)
            .edge("a", "b", &[ResourceDelta::Fin(-1), ResourceDelta::Omega])
            .edge("b", "a", &[ResourceDelta::Fin(0), ResourceDelta::Omega])
            .edge("b", "b", &[ResourceDelta::Fin(0), ResourceDelta::Omega])
            .build()
            .unwrap();
        assert_eq!(
            streett_automaton_nonempty(&g, g.state_id("a").unwrap()),
            Ok(true)
        );

        // Same shape but the only cycle through b needs dimension 0.
        let g = crate::model::GameBuilder::new(2)
            .state("a", crate::model::Owner::Box)
            .state("b", crate::model::Owner::Box)
            .edge("a", "b", &[ResourceDelta::Fin(-1), ResourceDelta::Omega])
            .edge("b", "a", &[ResourceDelta::Fin(-1), ResourceDelta::Omega])
            .build()
            .unwrap();
        assert_eq!(
            streett_automaton_nonempty(&g, g.state_id("a").unwrap()),
            Ok(false)
        );
    }

    #[test]
    fn i_safety_on_fixtures() {
        let g = fixtures::g_order();
        let s = g.state_id("s").unwrap();
        let c = g.state_id("c").unwrap();
        assert_eq!(is_i_safe(&g, c, ReloadSet::empty()), Ok(true));
        assert_eq!(is_i_safe(&g, s, ReloadSet::empty()), Ok(false));

        let g = fixtures::g_pump();
        let t = g.state_id("t").unwrap();
        assert_eq!(is_i_safe(&g, t, ReloadSet::full(1)), Ok(true));

        let g = fixtures::g_2p();
        assert_eq!(
            is_i_safe(&g, g.state_id("q").unwrap(), ReloadSet::empty()),
            Err(RestrictedError::NotOnePlayer)
        );
    }
}
