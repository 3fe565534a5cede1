//! Extended vectors, antichains of minimal elements, and the minimal
//! multi-distance fixpoint.
//!
//! Distances here are resource loads: the minimal vectors from which the
//! controller can force a visit to a target while every resource stays ≥ 1
//! along the way. Because a game may trade one resource against another,
//! minima form an antichain instead of a single vector.

use std::fmt;

use thiserror::Error;

use crate::model::{Game, Label, LoadVector, Owner, ResourceDelta, StateId};

/// Per-component infinity sentinel. `u64::MAX` makes componentwise min, max
/// and saturating addition behave correctly without special cases.
pub const INF: u64 = u64::MAX;

/// Vector over positive integers extended with ∞ per component.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExtVector(Vec<u64>);

impl ExtVector {
    pub fn new(components: Vec<u64>) -> Self {
        assert!(!components.is_empty());
        ExtVector(components)
    }

    pub fn all_inf(dimension: usize) -> Self {
        ExtVector(vec![INF; dimension])
    }

    pub fn ones(dimension: usize) -> Self {
        ExtVector(vec![1; dimension])
    }

    pub fn from_load(v: &LoadVector) -> Self {
        ExtVector(v.components().to_vec())
    }

    /// `None` if any component is ∞.
    pub fn to_load(&self) -> Option<LoadVector> {
        if self.0.contains(&INF) {
            return None;
        }
        Some(LoadVector::new(self.0.clone()).expect("distance components stay >= 1"))
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0[i]
    }

    pub fn is_all_inf(&self) -> bool {
        self.0.iter().all(|&c| c == INF)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|&c| c != INF)
    }

    /// Componentwise max; ∞ absorbs.
    pub fn cw_max(&self, other: &ExtVector) -> ExtVector {
        assert_eq!(self.0.len(), other.0.len());
        ExtVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        )
    }

    /// `self − δ` for a nonpositive finite δ: components grow by |δ(i)|,
    /// ∞ stays ∞ (saturation at the sentinel is exactly absorption).
    fn minus_label_unchecked(&self, delta: &Label) -> ExtVector {
        ExtVector(
            self.0
                .iter()
                .zip(delta.deltas())
                .map(|(&c, &d)| match d {
                    ResourceDelta::Fin(v) => c.saturating_add(v.unsigned_abs()),
                    ResourceDelta::Omega => unreachable!("distance labels are omega-free"),
                })
                .collect(),
        )
    }
}

impl Componentwise for ExtVector {
    fn cw_leq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Componentwise for LoadVector {
    fn cw_leq(&self, other: &Self) -> bool {
        self.leq(other)
    }
}

impl fmt::Display for ExtVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, &c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if c == INF {
                f.write_str("inf")?;
            } else {
                write!(f, "{c}")?;
            }
        }
        f.write_str(")")
    }
}

/// Componentwise partial order used for antichain pruning.
pub trait Componentwise {
    fn cw_leq(&self, other: &Self) -> bool;
}

/// A set of pairwise ≤-incomparable vectors, kept lexicographically sorted
/// so that equal antichains compare and print identically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Antichain<T> {
    elems: Vec<T>,
}

impl<T: Componentwise + Ord + Clone> Antichain<T> {
    pub fn new() -> Self {
        Antichain { elems: Vec::new() }
    }

    pub fn singleton(v: T) -> Self {
        Antichain { elems: vec![v] }
    }

    /// Insert `v` unless it is dominated; drops elements `v` dominates.
    /// Returns whether the antichain now contains `v`.
    pub fn insert(&mut self, v: T) -> bool {
        if self.elems.iter().any(|e| e.cw_leq(&v)) {
            return false;
        }
        self.elems.retain(|e| !v.cw_leq(e));
        let pos = self.elems.binary_search(&v).unwrap_err();
        self.elems.insert(pos, v);
        true
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Elements in lexicographic order.
    pub fn elements(&self) -> &[T] {
        &self.elems
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.elems.iter()
    }

    /// Is some element ≤ `v`, i.e. does `v` lie in the upward closure?
    pub fn dominates(&self, v: &T) -> bool {
        self.elems.iter().any(|e| e.cw_leq(v))
    }

    pub fn extend(&mut self, items: impl IntoIterator<Item = T>) {
        for v in items {
            self.insert(v);
        }
    }
}

impl<T: Componentwise + Ord + Clone> Default for Antichain<T> {
    fn default() -> Self {
        Antichain::new()
    }
}

impl<T: Componentwise + Ord + Clone> FromIterator<T> for Antichain<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut a = Antichain::new();
        a.extend(iter);
        a
    }
}

/// The ≤-minimal elements of `items`.
pub fn min_set<T: Componentwise + Ord + Clone>(
    items: impl IntoIterator<Item = T>,
) -> Antichain<T> {
    items.into_iter().collect()
}

/// Componentwise-max cross product of `sets`: every way of picking one
/// vector from each set, joined with componentwise max. ∞ absorbs. The
/// result is not minimized; callers usually wrap it in [`min_set`].
pub fn cwm(sets: &[&[ExtVector]]) -> Vec<ExtVector> {
    assert!(!sets.is_empty(), "cwm needs at least one operand");
    let mut acc: Vec<ExtVector> = sets[0].to_vec();
    for set in &sets[1..] {
        let mut next = Vec::with_capacity(acc.len() * set.len());
        for a in &acc {
            for b in *set {
                next.push(a.cw_max(b));
            }
        }
        acc = next;
    }
    acc
}

/// Errors from distance computations.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum DistanceError {
    #[error("distance label has an omega reload in component {0}")]
    OmegaInDistanceLabel(usize),
}

/// `{β − δ : β ∈ m}` for a nonpositive ω-free label δ.
pub fn subtract_label(m: &[ExtVector], delta: &Label) -> Result<Vec<ExtVector>, DistanceError> {
    if let Some(component) = delta.deltas().iter().position(|d| d.is_omega()) {
        return Err(DistanceError::OmegaInDistanceLabel(component));
    }
    Ok(m.iter().map(|v| v.minus_label_unchecked(delta)).collect())
}

/// A game with ω-free labels plus a designated target state.
#[derive(Clone, Debug)]
pub struct DistanceGame {
    game: Game,
    target: StateId,
}

impl DistanceGame {
    pub fn new(game: Game, target: StateId) -> Result<Self, DistanceError> {
        assert!(target.0 < game.num_states());
        for e in game.edges() {
            if let Some(component) = e.label.deltas().iter().position(|d| d.is_omega()) {
                return Err(DistanceError::OmegaInDistanceLabel(component));
            }
        }
        Ok(DistanceGame { game, target })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn target(&self) -> StateId {
        self.target
    }
}

/// Result of the minimal-distance fixpoint, with convergence telemetry.
#[derive(Clone, Debug)]
pub struct MinDistTable {
    /// Minimal safe distances per state, indexed by `StateId`. The all-∞
    /// vector means no safe distance exists from that state.
    pub table: Vec<Antichain<ExtVector>>,
    /// Sweeps that changed at least one entry before the fixpoint.
    pub iterations: usize,
    /// Largest antichain seen in any entry at any point.
    pub max_antichain_len: usize,
    /// Largest finite component present after each changing sweep.
    pub max_component_by_iter: Vec<u64>,
}

/// Minimal safe distances from every state to the target.
///
/// Start from {(1,…,1)} at the target and {(∞,…,∞)} elsewhere, then apply
/// the optimality equations synchronously until nothing changes: at a
/// controller state take the minimal elements over all outgoing edges of
/// `d[dst] − δ`, at an adversary state the minimal elements of the
/// componentwise max across all outgoing edges. The target row stays pinned.
pub fn min_dist_table(dg: &DistanceGame) -> MinDistTable {
    trace_or_table(dg, &mut |_| {})
}

/// Single-state view of [`min_dist_table`].
pub fn min_dist(dg: &DistanceGame, s: StateId) -> Antichain<ExtVector> {
    min_dist_table(dg).table[s.0].clone()
}

/// Like [`min_dist_table`] but records the table after every sweep,
/// including the initial one. Used to test monotone convergence.
pub fn min_dist_trace(dg: &DistanceGame) -> Vec<Vec<Antichain<ExtVector>>> {
    let mut snapshots = Vec::new();
    trace_or_table(dg, &mut |t: &[Antichain<ExtVector>]| {
        snapshots.push(t.to_vec())
    });
    snapshots
}

fn trace_or_table(
    dg: &DistanceGame,
    observe: &mut dyn FnMut(&[Antichain<ExtVector>]),
) -> MinDistTable {
    let g = dg.game();
    let n = g.num_states();
    let d = g.dimension();
    let mut cur: Vec<Antichain<ExtVector>> = (0..n)
        .map(|i| {
            if StateId(i) == dg.target() {
                Antichain::singleton(ExtVector::ones(d))
            } else {
                Antichain::singleton(ExtVector::all_inf(d))
            }
        })
        .collect();
    observe(&cur);

    let mut iterations = 0;
    let mut max_antichain_len = 1;
    let mut max_component_by_iter = Vec::new();
    // The fixpoint is reached within the longest acyclic path length, which
    // is at most the number of states. A sweep count beyond that means the
    // update is broken, so fail loudly instead of spinning.
    let cap = 2 * n + 8;
    loop {
        let mut next = Vec::with_capacity(n);
        for s in g.states() {
            if s == dg.target() {
                next.push(cur[s.0].clone());
                continue;
            }
            let per_edge: Vec<Vec<ExtVector>> = g
                .out_edges(s)
                .map(|e| {
                    cur[e.dst.0]
                        .iter()
                        .map(|v| v.minus_label_unchecked(&e.label))
                        .collect()
                })
                .collect();
            let entry: Antichain<ExtVector> = match g.owner(s) {
                Owner::Box => min_set(per_edge.into_iter().flatten()),
                Owner::Diamond => {
                    let refs: Vec<&[ExtVector]> =
                        per_edge.iter().map(|m| m.as_slice()).collect();
                    min_set(cwm(&refs))
                }
            };
            debug_assert!(
                entry.iter().all(|v| v.is_finite() || v.is_all_inf()),
                "distance vectors are all-finite or all-infinite"
            );
            max_antichain_len = max_antichain_len.max(entry.len());
            next.push(entry);
        }
        if next == cur {
            break;
        }
        cur = next;
        iterations += 1;
        max_component_by_iter.push(
            cur.iter()
                .flat_map(|a| a.iter())
                .flat_map(|v| v.components())
                .filter(|&&c| c != INF)
                .max()
                .copied()
                .unwrap_or(1),
        );
        observe(&cur);
        assert!(iterations <= cap, "minimal-distance fixpoint failed to converge");
    }

    MinDistTable {
        table: cur,
        iterations,
        max_antichain_len,
        max_component_by_iter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GameBuilder;
    use ResourceDelta::Fin;

    fn ev(cs: &[u64]) -> ExtVector {
        ExtVector::new(cs.to_vec())
    }

    #[test]
    fn min_set_keeps_exactly_minimal_elements() {
        let a = min_set(vec![ev(&[2, 3]), ev(&[3, 2]), ev(&[3, 3])]);
        assert_eq!(a.elements(), &[ev(&[2, 3]), ev(&[3, 2])]);

        let a = min_set(vec![ev(&[INF, INF])]);
        assert_eq!(a.elements(), &[ev(&[INF, INF])]);

        let a = min_set(vec![ev(&[2, 3]), ev(&[3, 2]), ev(&[1, 5])]);
        assert_eq!(a.elements(), &[ev(&[1, 5]), ev(&[2, 3]), ev(&[3, 2])]);
    }

    #[test]
    fn cwm_examples() {
        assert_eq!(cwm(&[&[ev(&[2])], &[ev(&[4])]]), vec![ev(&[4])]);
        let got = min_set(cwm(&[&[ev(&[2, 3]), ev(&[3, 2])], &[ev(&[1, 1])]]));
        assert_eq!(got.elements(), &[ev(&[2, 3]), ev(&[3, 2])]);
        assert_eq!(cwm(&[&[ev(&[2])], &[ev(&[INF])]]), vec![ev(&[INF])]);
    }

    #[test]
    fn subtract_label_grows_by_magnitude() {
        let l = Label::new(vec![Fin(-2)]);
        assert_eq!(subtract_label(&[ev(&[3])], &l).unwrap(), vec![ev(&[5])]);

        let l = Label::new(vec![Fin(-1), Fin(-9)]);
        assert_eq!(
            subtract_label(&[ev(&[INF, INF])], &l).unwrap(),
            vec![ev(&[INF, INF])]
        );

        let l = Label::new(vec![Fin(-1), Fin(-2)]);
        assert_eq!(
            subtract_label(&[ev(&[1, 1])], &l).unwrap(),
            vec![ev(&[2, 3])]
        );

        let l = Label::new(vec![ResourceDelta::Omega]);
        assert!(matches!(
            subtract_label(&[ev(&[1])], &l),
            Err(DistanceError::OmegaInDistanceLabel(_))
        ));
    }

    #[test]
    fn min_dist_two_incomparable_paths() {
        // Two parallel edges trading the resources against each other.
        let g = GameBuilder::new(2)
            .state("s", Owner::Box)
            .state("r", Owner::Box)
            .edge("s", "r", &[Fin(-1), Fin(-2)])
            .edge("s", "r", &[Fin(-2), Fin(-1)])
            .edge("r", "r", &[Fin(0), Fin(0)])
            .build()
            .unwrap();
        let target = g.state_id("r").unwrap();
        let dg = DistanceGame::new(g, target).unwrap();
        let s = dg.game().state_id("s").unwrap();
        assert_eq!(
            min_dist(&dg, s).elements(),
            &[ev(&[2, 3]), ev(&[3, 2])]
        );
        assert_eq!(
            min_dist(&dg, target).elements(),
            &[ev(&[1, 1])]
        );
    }

    #[test]
    fn min_dist_adversary_picks_the_worse_edge() {
        let g = GameBuilder::new(1)
            .state("s", Owner::Diamond)
            .state("r", Owner::Box)
            .edge("s", "r", &[Fin(-1)])
            .edge("s", "r", &[Fin(-3)])
            .edge("r", "r", &[Fin(0)])
            .build()
            .unwrap();
        let target = g.state_id("r").unwrap();
        let dg = DistanceGame::new(g, target).unwrap();
        let s = dg.game().state_id("s").unwrap();
        assert_eq!(min_dist(&dg, s).elements(), &[ev(&[4])]);
    }

    #[test]
    fn min_dist_unreachable_is_all_inf() {
        let g = GameBuilder::new(1)
            .state("s", Owner::Box)
            .state("r", Owner::Box)
            .edge("s", "s", &[Fin(-1)])
            .edge("r", "r", &[Fin(0)])
            .build()
            .unwrap();
        let target = g.state_id("r").unwrap();
        let dg = DistanceGame::new(g.clone(), target).unwrap();
        let s = g.state_id("s").unwrap();
        let a = min_dist(&dg, s);
        assert_eq!(a.len(), 1);
        assert!(a.elements()[0].is_all_inf());
    }

    #[test]
    fn distance_game_rejects_omega() {
        let g = GameBuilder::new(1)
            .state("s", Owner::Box)
            .edge("s", "s", &[ResourceDelta::Omega])
            .build()
            .unwrap();
        assert!(matches!(
            DistanceGame::new(g, StateId(0)),
            Err(DistanceError::OmegaInDistanceLabel(_))
        ));
    }

    #[test]
    fn antichain_insert_reports_membership_change() {
        let mut a = Antichain::new();
        assert!(a.insert(ev(&[3, 3])));
        assert!(a.insert(ev(&[2, 4])));
        assert!(!a.insert(ev(&[3, 4])));
        assert!(a.insert(ev(&[1, 1])));
        assert_eq!(a.elements(), &[ev(&[1, 1])]);
        assert!(a.dominates(&ev(&[9, 9])));
        assert!(!min_set(vec![ev(&[2u64])]).dominates(&ev(&[1])));
    }
}
