//! Core model of consumption games.
//!
//! A game is a finite arena of dimension `d`. Every edge carries a vector of
//! `d` resource updates, each either a nonpositive integer (consumption) or
//! the reload symbol ω. States belong to the controller (box), who tries to
//! keep every resource positive forever, or to the adversary (diamond).
//! Edges out of adversary states may not reload.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Owner of a state.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Owner {
    /// Controller state, written `box` in the text format.
    Box,
    /// Adversary state, written `diamond`.
    Diamond,
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Box => f.write_str("box"),
            Owner::Diamond => f.write_str("diamond"),
        }
    }
}

/// One component of an edge label: consume a fixed amount, or reload.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ResourceDelta {
    /// Finite update, always ≤ 0 in a valid game.
    Fin(i64),
    /// Reload: the mover may raise this resource to any value ≥ its current one.
    Omega,
}

impl ResourceDelta {
    pub fn is_omega(self) -> bool {
        matches!(self, ResourceDelta::Omega)
    }

    /// Absolute value of a finite delta; `None` for ω.
    pub fn magnitude(self) -> Option<u64> {
        match self {
            ResourceDelta::Fin(v) => Some(v.unsigned_abs()),
            ResourceDelta::Omega => None,
        }
    }
}

impl fmt::Display for ResourceDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResourceDelta::Fin(v) => write!(f, "{v}"),
            ResourceDelta::Omega => f.write_str("w"),
        }
    }
}

// Canonical order: finite drops by increasing magnitude, then ω. This is the
// order edge labels sort in when a game is serialized.
impl Ord for ResourceDelta {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use ResourceDelta::*;
        match (self, other) {
            (Fin(a), Fin(b)) => a.unsigned_abs().cmp(&b.unsigned_abs()).then(a.cmp(b)),
            (Fin(_), Omega) => std::cmp::Ordering::Less,
            (Omega, Fin(_)) => std::cmp::Ordering::Greater,
            (Omega, Omega) => std::cmp::Ordering::Equal,
        }
    }
}

impl PartialOrd for ResourceDelta {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Edge label: one [`ResourceDelta`] per dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Label(Vec<ResourceDelta>);

impl Label {
    pub fn new(deltas: Vec<ResourceDelta>) -> Self {
        Label(deltas)
    }

    /// All components finite and equal to `value` (must be ≤ 0).
    pub fn uniform_fin(dimension: usize, value: i64) -> Self {
        Label(vec![ResourceDelta::Fin(value); dimension])
    }

    /// All components ω.
    pub fn uniform_omega(dimension: usize) -> Self {
        Label(vec![ResourceDelta::Omega; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn deltas(&self) -> &[ResourceDelta] {
        &self.0
    }

    pub fn get(&self, i: usize) -> ResourceDelta {
        self.0[i]
    }

    pub fn is_omega_free(&self) -> bool {
        self.0.iter().all(|d| !d.is_omega())
    }

    /// Bitmask of ω components. Only valid for dimensions ≤ 64; callers that
    /// build subset-indexed unfoldings enforce that bound up front.
    pub fn omega_mask(&self) -> u64 {
        assert!(self.0.len() <= 64, "omega_mask requires dimension <= 64");
        let mut mask = 0u64;
        for (i, d) in self.0.iter().enumerate() {
            if d.is_omega() {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Copy of the label with every component in `mask` replaced by 0.
    /// Components outside the mask are kept as they are, ω included.
    pub fn zeroed_on(&self, mask: u64) -> Label {
        assert!(self.0.len() <= 64, "zeroed_on requires dimension <= 64");
        Label(
            self.0
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    if mask & (1 << i) != 0 {
                        ResourceDelta::Fin(0)
                    } else {
                        d
                    }
                })
                .collect(),
        )
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Errors from [`LoadVector::new`].
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum VectorError {
    #[error("load vector must have at least one component")]
    Empty,
    #[error("load vector component {index} is 0; components must be >= 1")]
    ZeroComponent { index: usize },
}

/// Resource configuration: `d` positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LoadVector(Vec<u64>);

impl LoadVector {
    pub fn new(components: Vec<u64>) -> Result<Self, VectorError> {
        if components.is_empty() {
            return Err(VectorError::Empty);
        }
        if let Some(index) = components.iter().position(|&c| c == 0) {
            return Err(VectorError::ZeroComponent { index });
        }
        Ok(LoadVector(components))
    }

    /// `(value, …, value)` of the given dimension; `value` must be ≥ 1.
    pub fn uniform(dimension: usize, value: u64) -> Self {
        assert!(dimension >= 1 && value >= 1);
        LoadVector(vec![value; dimension])
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

    /// Componentwise ≤.
    pub fn leq(&self, other: &LoadVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise minimum with `cap`.
    pub fn capped_at(&self, cap: &LoadVector) -> LoadVector {
        assert_eq!(self.0.len(), cap.0.len());
        LoadVector(
            self.0
                .iter()
                .zip(&cap.0)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        )
    }

    /// The vector decreased by 1 in component `i`; `None` if that would
    /// leave the positive orthant.
    pub fn minus_unit(&self, i: usize) -> Option<LoadVector> {
        if self.0[i] <= 1 {
            return None;
        }
        let mut c = self.0.clone();
        c[i] -= 1;
        Some(LoadVector(c))
    }
}

impl fmt::Display for LoadVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Index of a state in its [`Game`]; stable declaration order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A labeled transition of the arena.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub src: StateId,
    pub dst: StateId,
    pub label: Label,
}

/// A configuration of the induced infinite game: a state with a current
/// load, or the absorbing fail configuration reached on exhaustion.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Config {
    At(StateId, LoadVector),
    Fail,
}

/// Structural classification of a game.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GameClass {
    /// No state is adversary-owned.
    pub one_player: bool,
    /// Every cycle updates every dimension with a nonzero delta or ω.
    pub decreasing: bool,
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.one_player, self.decreasing) {
            (true, true) => f.write_str("one-player decreasing"),
            (true, false) => f.write_str("one-player"),
            (false, true) => f.write_str("decreasing"),
            (false, false) => f.write_str("general"),
        }
    }
}

/// Unvalidated game description; states and edges refer to states by name.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GameDescription {
    pub dimension: usize,
    pub states: Vec<(String, Owner)>,
    pub edges: Vec<(String, String, Label)>,
}

/// Errors detected by [`validate_game`].
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ValidateError {
    #[error("game has no states")]
    EmptyGame,
    #[error("dimension must be >= 1")]
    ZeroDimension,
    #[error("state {0:?} is declared twice")]
    DuplicateState(String),
    #[error("edge {src:?} -> {dst:?} refers to undeclared state {name:?}")]
    UnknownState { src: String, dst: String, name: String },
    #[error("edge {src:?} -> {dst:?} has {found} label components, game dimension is {expected}")]
    DimensionMismatch {
        src: String,
        dst: String,
        expected: usize,
        found: usize,
    },
    #[error("edge {src:?} -> {dst:?} has positive finite delta {value} in component {component}")]
    PositiveFiniteDelta {
        src: String,
        dst: String,
        component: usize,
        value: i64,
    },
    #[error("edge {src:?} -> {dst:?} leaves a diamond state but reloads component {component}")]
    OmegaOnDiamond {
        src: String,
        dst: String,
        component: usize,
    },
    #[error("edge {src:?} -> {dst:?} with label {label} is declared twice")]
    DuplicateEdge {
        src: String,
        dst: String,
        label: String,
    },
    #[error("state {0:?} has no outgoing edge")]
    MissingOutgoingEdge(String),
}

/// A validated consumption game. Immutable after construction; cheap to
/// share read-only between threads.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Game {
    dimension: usize,
    names: Vec<String>,
    owners: Vec<Owner>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    index: HashMap<String, StateId>,
}

impl Game {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.names.len()).map(StateId)
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s.0]
    }

    pub fn owner(&self, s: StateId) -> Owner {
        self.owners[s.0]
    }

    /// Resolve a state name; declaration order gives the id.
    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Outgoing edge indices of `s` in declaration order.
    pub fn out_edge_ids(&self, s: StateId) -> &[usize] {
        &self.out[s.0]
    }

    pub fn out_edges(&self, s: StateId) -> impl Iterator<Item = &Edge> + '_ {
        self.out[s.0].iter().map(move |&e| &self.edges[e])
    }

    /// Rebuild the unvalidated description (used by the serializer and by
    /// game transformations).
    pub fn description(&self) -> GameDescription {
        GameDescription {
            dimension: self.dimension,
            states: self
                .names
                .iter()
                .cloned()
                .zip(self.owners.iter().copied())
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    (
                        self.names[e.src.0].clone(),
                        self.names[e.dst.0].clone(),
                        e.label.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Induced subgame on the states where `keep` is true. The caller must
    /// guarantee that the restriction is still total.
    pub(crate) fn restrict_to(&self, keep: &[bool]) -> Result<Game, ValidateError> {
        let desc = GameDescription {
            dimension: self.dimension,
            states: self
                .states()
                .filter(|s| keep[s.0])
                .map(|s| (self.names[s.0].clone(), self.owners[s.0]))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| keep[e.src.0] && keep[e.dst.0])
                .map(|e| {
                    (
                        self.names[e.src.0].clone(),
                        self.names[e.dst.0].clone(),
                        e.label.clone(),
                    )
                })
                .collect(),
        };
        validate_game(&desc)
    }
}

/// Check every structural invariant and build the indexed [`Game`].
pub fn validate_game(desc: &GameDescription) -> Result<Game, ValidateError> {
    if desc.dimension == 0 {
        return Err(ValidateError::ZeroDimension);
    }
    if desc.states.is_empty() {
        return Err(ValidateError::EmptyGame);
    }

    let mut index = HashMap::with_capacity(desc.states.len());
    for (i, (name, _)) in desc.states.iter().enumerate() {
        match index.entry(name.clone()) {
            Entry::Occupied(_) => return Err(ValidateError::DuplicateState(name.clone())),
            Entry::Vacant(v) => {
                v.insert(StateId(i));
            }
        }
    }

    let names: Vec<String> = desc.states.iter().map(|(n, _)| n.clone()).collect();
    let owners: Vec<Owner> = desc.states.iter().map(|&(_, o)| o).collect();

    let mut edges = Vec::with_capacity(desc.edges.len());
    let mut out = vec![Vec::new(); names.len()];
    let mut seen = HashMap::new();
    for (src_name, dst_name, label) in &desc.edges {
        let unknown = |name: &str| ValidateError::UnknownState {
            src: src_name.clone(),
            dst: dst_name.clone(),
            name: name.to_string(),
        };
        let src = *index.get(src_name).ok_or_else(|| unknown(src_name))?;
        let dst = *index.get(dst_name).ok_or_else(|| unknown(dst_name))?;
        if label.dimension() != desc.dimension {
            return Err(ValidateError::DimensionMismatch {
                src: src_name.clone(),
                dst: dst_name.clone(),
                expected: desc.dimension,
                found: label.dimension(),
            });
        }
        for (component, &delta) in label.deltas().iter().enumerate() {
            match delta {
                ResourceDelta::Fin(value) if value > 0 => {
                    return Err(ValidateError::PositiveFiniteDelta {
                        src: src_name.clone(),
                        dst: dst_name.clone(),
                        component,
                        value,
                    })
                }
                ResourceDelta::Omega if owners[src.0] == Owner::Diamond => {
                    return Err(ValidateError::OmegaOnDiamond {
                        src: src_name.clone(),
                        dst: dst_name.clone(),
                        component,
                    })
                }
                _ => {}
            }
        }
        if seen
            .insert((src, dst, label.clone()), ())
            .is_some()
        {
            return Err(ValidateError::DuplicateEdge {
                src: src_name.clone(),
                dst: dst_name.clone(),
                label: label.to_string(),
            });
        }
        out[src.0].push(edges.len());
        edges.push(Edge {
            src,
            dst,
            label: label.clone(),
        });
    }

    for (i, outgoing) in out.iter().enumerate() {
        if outgoing.is_empty() {
            return Err(ValidateError::MissingOutgoingEdge(names[i].clone()));
        }
    }

    Ok(Game {
        dimension: desc.dimension,
        names,
        owners,
        edges,
        out,
        index,
    })
}

/// Fluent construction of small games, mainly for tests and generators.
#[derive(Clone, Debug)]
pub struct GameBuilder {
    desc: GameDescription,
}

impl GameBuilder {
    pub fn new(dimension: usize) -> Self {
        GameBuilder {
            desc: GameDescription {
                dimension,
                states: Vec::new(),
                edges: Vec::new(),
            },
        }
    }

    pub fn state(mut self, name: &str, owner: Owner) -> Self {
        self.desc.states.push((name.to_string(), owner));
        self
    }

    pub fn edge(mut self, src: &str, dst: &str, deltas: &[ResourceDelta]) -> Self {
        self.desc
            .edges
            .push((src.to_string(), dst.to_string(), Label::new(deltas.to_vec())));
        self
    }

    pub fn build(self) -> Result<Game, ValidateError> {
        validate_game(&self.desc)
    }
}

/// Classify a game as one-player and/or decreasing.
///
/// Decreasingness quantifies over all cycles, which is equivalent to the
/// per-dimension check implemented here: the subgraph of edges whose delta in
/// dimension `i` is exactly 0 must be acyclic (ω counts as nonzero).
pub fn classify(g: &Game) -> GameClass {
    let one_player = g.states().all(|s| g.owner(s) == Owner::Box);
    let decreasing = (0..g.dimension()).all(|i| {
        zero_subgraph_is_acyclic(g, |label| matches!(label.get(i), ResourceDelta::Fin(0)))
    });
    GameClass {
        one_player,
        decreasing,
    }
}

fn zero_subgraph_is_acyclic(g: &Game, in_subgraph: impl Fn(&Label) -> bool) -> bool {
    // Iterative three-color DFS over the edge-filtered subgraph.
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let n = g.num_states();
    let mut color = vec![WHITE; n];
    for root in 0..n {
        if color[root] != WHITE {
            continue;
        }
        // Stack frames: (state, next out-edge position to try).
        let mut stack = vec![(root, 0usize)];
        color[root] = GRAY;
        while let Some(frame) = stack.last_mut() {
            let (s, pos) = *frame;
            let out = g.out_edge_ids(StateId(s));
            if pos >= out.len() {
                color[s] = BLACK;
                stack.pop();
                continue;
            }
            frame.1 += 1;
            let edge = g.edge(out[pos]);
            if !in_subgraph(&edge.label) {
                continue;
            }
            let t = edge.dst.0;
            match color[t] {
                GRAY => return false,
                WHITE => {
                    color[t] = GRAY;
                    stack.push((t, 0));
                }
                _ => {}
            }
        }
    }
    true
}

/// ℓ: the largest |δ(i)| over all finite label components; 0 when every
/// finite component is 0.
pub fn max_finite_drop(g: &Game) -> u64 {
    g.edges()
        .iter()
        .flat_map(|e| e.label.deltas())
        .filter_map(|d| d.magnitude())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ResourceDelta::{Fin, Omega};

    fn chain_game() -> Game {
        GameBuilder::new(1)
            .state("s", Owner::Box)
            .state("t", Owner::Box)
            .edge("s", "t", &[Fin(-3)])
            .edge("t", "t", &[Omega])
            .build()
            .unwrap()
    }

    #[test]
    fn validates_well_formed_game() {
        let g = chain_game();
        assert_eq!(g.num_states(), 2);
        assert_eq!(g.dimension(), 1);
        assert_eq!(g.state_id("t"), Some(StateId(1)));
        assert_eq!(g.out_edges(StateId(0)).count(), 1);
    }

    #[test]
    fn rejects_omega_on_diamond() {
        let err = GameBuilder::new(1)
            .state("q", Owner::Diamond)
            .edge("q", "q", &[Omega])
            .build()
            .unwrap_err();
        assert!(matches!(err, ValidateError::OmegaOnDiamond { .. }));
    }

    #[test]
    fn rejects_missing_outgoing_edge() {
        let err = GameBuilder::new(1)
            .state("s", Owner::Box)
            .state("t", Owner::Box)
            .edge("s", "t", &[Fin(-3)])
            .build()
            .unwrap_err();
        assert_eq!(err, ValidateError::MissingOutgoingEdge("t".to_string()));
    }

    #[test]
    fn rejects_positive_delta_and_duplicates() {
        let err = GameBuilder::new(1)
            .state("s", Owner::Box)
            .edge("s", "s", &[Fin(2)])
            .build()
            .unwrap_err();
        assert!(matches!(err, ValidateError::PositiveFiniteDelta { .. }));

        let err = GameBuilder::new(1)
            .state("s", Owner::Box)
            .edge("s", "s", &[Fin(-1)])
            .edge("s", "s", &[Fin(-1)])
            .build()
            .unwrap_err();
        assert!(matches!(err, ValidateError::DuplicateEdge { .. }));
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let err = GameBuilder::new(2)
            .state("s", Owner::Box)
            .edge("s", "s", &[Fin(-1)])
            .build()
            .unwrap_err();
        assert!(matches!(err, ValidateError::DimensionMismatch { .. }));
    }

    #[test]
    fn classify_detects_zero_cycles() {
        // A cycle whose label is all zero in some dimension is not decreasing.
        let g = GameBuilder::new(2)
            .state("s", Owner::Box)
            .edge("s", "s", &[Fin(0), Fin(-1)])
            .build()
            .unwrap();
        let c = classify(&g);
        assert!(c.one_player);
        assert!(!c.decreasing);

        let g = GameBuilder::new(2)
            .state("s", Owner::Box)
            .edge("s", "s", &[Omega, Fin(-1)])
            .build()
            .unwrap();
        assert!(classify(&g).decreasing);
    }

    #[test]
    fn classify_zero_edges_off_cycle_are_fine() {
        // Zero deltas on acyclic parts do not break decreasingness.
        let g = GameBuilder::new(1)
            .state("s", Owner::Box)
            .state("t", Owner::Box)
            .edge("s", "t", &[Fin(0)])
            .edge("t", "t", &[Fin(-1)])
            .build()
            .unwrap();
        assert!(classify(&g).decreasing);
    }

    #[test]
    fn max_drop_ignores_omega() {
        assert_eq!(max_finite_drop(&chain_game()), 3);
        let g = GameBuilder::new(1)
            .state("s", Owner::Box)
            .edge("s", "s", &[Omega])
            .build()
            .unwrap();
        assert_eq!(max_finite_drop(&g), 0);
    }

    #[test]
    fn delta_order_is_magnitude_then_omega() {
        let mut v = vec![Omega, Fin(-3), Fin(0), Fin(-1)];
        v.sort();
        assert_eq!(v, vec![Fin(0), Fin(-1), Fin(-3), Omega]);
    }

    #[test]
    fn load_vector_invariants() {
        assert!(LoadVector::new(vec![1, 2]).is_ok());
        assert_eq!(
            LoadVector::new(vec![1, 0]),
            Err(VectorError::ZeroComponent { index: 1 })
        );
        assert_eq!(LoadVector::new(vec![]), Err(VectorError::Empty));
        let v = LoadVector::new(vec![2, 1]).unwrap();
        assert_eq!(v.minus_unit(1), None);
        assert_eq!(
            v.minus_unit(0),
            Some(LoadVector::new(vec![1, 1]).unwrap())
        );
    }
}
