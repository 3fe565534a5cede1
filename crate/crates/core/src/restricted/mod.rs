//! Faster deciders for restricted game classes.
//!
//! A game is one-player when the adversary owns no state, and decreasing
//! when no cycle leaves any resource untouched (see
//! [`classify`](crate::model::classify)). One-player games reduce
//! emptiness to automaton nonemptiness ([`automaton`]) and membership to a
//! short path plus a certificate ([`bounded`]); decreasing games reduce
//! emptiness to a generalized Büchi game ([`buchi`]) and membership to a
//! bounded alternating search. Both classes admit minimal-safe-set
//! computations through ω-free distance games ([`unfold`]).

pub mod automaton;
pub mod bounded;
pub mod buchi;
pub mod unfold;

use thiserror::Error;

/// Violated preconditions of the restricted deciders.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum RestrictedError {
    #[error("some cycle leaves a resource untouched; this decider needs a decreasing game")]
    NotDecreasing,
    #[error("the adversary owns a state; this decider needs a one-player game")]
    NotOnePlayer,
    #[error(transparent)]
    Solve(#[from] crate::solver::SolveError),
}

/// Subset of the resource dimensions, as a bitmask over 0-based indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct ReloadSet(u64);

impl ReloadSet {
    pub fn empty() -> ReloadSet {
        ReloadSet(0)
    }

    pub fn full(dimension: usize) -> ReloadSet {
        assert!(dimension <= 64, "reload sets are kept as u64 bitmasks");
        if dimension == 64 {
            ReloadSet(u64::MAX)
        } else {
            ReloadSet((1u64 << dimension) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> ReloadSet {
        ReloadSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, dim: usize) -> bool {
        self.0 >> dim & 1 != 0
    }

    pub fn insert(&mut self, dim: usize) {
        assert!(dim < 64);
        self.0 |= 1 << dim;
    }

    pub fn union(self, other: ReloadSet) -> ReloadSet {
        ReloadSet(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// A reload order: bijection over the 0-based dimensions, stored as the
/// visit sequence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Panics unless `order` lists each of 0..len exactly once.
    pub fn new(order: Vec<usize>) -> Permutation {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            assert!(
                i < order.len() && !seen[i],
                "not a permutation of 0..{}",
                order.len()
            );
            seen[i] = true;
        }
        Permutation(order)
    }

    pub fn identity(dimension: usize) -> Permutation {
        Permutation((0..dimension).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    /// Dimensions at the first `m` positions.
    pub fn prefix(&self, m: usize) -> ReloadSet {
        let mut set = ReloadSet::empty();
        for &dim in &self.0[..m] {
            set.insert(dim);
        }
        set
    }

    /// All d! permutations in lexicographic order. Capped well below the
    /// point where the enumeration itself would exhaust memory.
    pub fn all(dimension: usize) -> Vec<Permutation> {
        assert!(
            dimension <= 10,
            "refusing to enumerate {dimension}! permutations"
        );
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(dimension);
        let mut used = vec![false; dimension];
        fill(dimension, &mut current, &mut used, &mut out);
        out
    }
}

fn fill(
    dimension: usize,
    current: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Permutation>,
) {
    if current.len() == dimension {
        out.push(Permutation(current.clone()));
        return;
    }
    for dim in 0..dimension {
        if !used[dim] {
            used[dim] = true;
            current.push(dim);
            fill(dimension, current, used, out);
            current.pop();
            used[dim] = false;
        }
    }
}
