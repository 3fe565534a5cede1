//! Formula-to-game compilers and seeded random instance generators.
//!
//! [`gen_qbf`] compiles a quantified CNF formula into a game with one
//! resource per clause whose safe set at the start state encodes the
//! formula's truth: walking the variable chain, the player picks a literal
//! per variable, each clause containing the pick charges a deep drop and
//! immediately repays it with a reload, and clauses missed by every pick
//! drain to death before the goal loop. [`gen_satunsat`] chains two such
//! gadgets so that a designated load is a minimal safe load exactly when
//! the first formula is satisfiable and the second is not.
//!
//! [`eval_qbf`] recomputes formula truth by brute force, so every compiled
//! instance doubles as a solver test with an independently known verdict.
//! [`random_game`] and [`random_qbf`] produce reproducible corpora for the
//! cross-checking suites.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::format::{parse_qbf, QbfInstance, Quantifier};
use crate::model::{
    validate_game, Game, GameDescription, Label, LoadVector, Owner, ResourceDelta, StateId,
};

/// Failures of the gadget generators.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum GadgetError {
    /// The two formulas given to [`gen_satunsat`] share a variable.
    #[error("variable {variable} appears in both formulas; their variable sets must be disjoint")]
    VariableOverlap { variable: usize },
    /// [`random_game`] kept sampling games that missed the requested
    /// structure and gave up.
    #[error("no game with the requested structure was sampled in {attempts} attempts")]
    ResamplingExhausted { attempts: usize },
}

/// Output of [`gen_qbf`]: the compiled game plus the load whose safety
/// encodes the formula.
#[derive(Clone, Debug)]
pub struct QbfGadgetOutput {
    pub game: Game,
    /// Head of the variable chain (named `s1`).
    pub start: StateId,
    /// (2n+1, …, 2n+1). Safe at `start` exactly when the formula is true,
    /// and in that case the unique minimal safe load there: every resource
    /// shrinks by at least 2n before its first possible reload.
    pub critical: LoadVector,
}

/// Name of the state for a literal: `s_x3` for variable 3 positive under
/// chain letter `s`/axis `x`, `s_nx3` for its negation.
fn literal_state(chain: char, axis: char, var: usize, negated: bool) -> String {
    if negated {
        format!("{chain}_n{axis}{var}")
    } else {
        format!("{chain}_{axis}{var}")
    }
}

/// Shared skeleton of the formula chain: states `s1..s{n+1}` (adversary
/// owns position i iff its quantifier is ∀), a pair of literal states per
/// variable, the goal state `r`, and the pricing/repayment edge pairs. The
/// pick of literal L at position i (1-based) charges every clause resource
/// containing L with −2(n−i+1) and then reloads it; everything else pays
/// −1 per step. Clause resources live in the first `q.num_clauses()` of
/// `dimension` components; any extra components always pay −1.
fn push_formula_chain(desc: &mut GameDescription, q: &QbfInstance, dimension: usize) {
    let n = q.num_vars();
    let m = q.num_clauses();
    for (i, &(quant, var)) in q.prefix().iter().enumerate() {
        let owner = if quant == Quantifier::ForAll {
            Owner::Diamond
        } else {
            Owner::Box
        };
        desc.states.push((format!("s{}", i + 1), owner));
        desc.states.push((literal_state('s', 'x', var, false), Owner::Box));
        desc.states.push((literal_state('s', 'x', var, true), Owner::Box));
    }
    desc.states.push((format!("s{}", n + 1), Owner::Box));
    desc.states.push(("r".to_string(), Owner::Box));

    for (i, &(_, var)) in q.prefix().iter().enumerate() {
        let drop = 2 * (n - i) as i64;
        for negated in [false, true] {
            let hits = |j: usize| j < m && q.clause_contains(j, var, negated);
            let pricing = Label::new(
                (0..dimension)
                    .map(|j| ResourceDelta::Fin(if hits(j) { -drop } else { -1 }))
                    .collect(),
            );
            let repayment = Label::new(
                (0..dimension)
                    .map(|j| {
                        if hits(j) {
                            ResourceDelta::Omega
                        } else {
                            ResourceDelta::Fin(-1)
                        }
                    })
                    .collect(),
            );
            let lit = literal_state('s', 'x', var, negated);
            desc.edges.push((format!("s{}", i + 1), lit.clone(), pricing));
            desc.edges.push((lit, format!("s{}", i + 2), repayment));
        }
    }
    desc.edges.push((
        format!("s{}", n + 1),
        "r".to_string(),
        Label::uniform_fin(dimension, -1),
    ));
}

/// Compile a quantified CNF formula (n ≥ 1 variables, m ≥ 1 clauses) into
/// a game of dimension m with 3n+2 states. The formula is true iff
/// `critical` is safe at `start`, iff it is the minimal safe load there.
/// The output is always decreasing, and one-player exactly when the
/// formula is purely existential; every label component is nonzero.
pub fn gen_qbf(q: &QbfInstance) -> QbfGadgetOutput {
    let n = q.num_vars();
    let m = q.num_clauses();
    assert!(n >= 1 && m >= 1, "the gadget needs a variable and a clause");
    let mut desc = GameDescription {
        dimension: m,
        ..Default::default()
    };
    push_formula_chain(&mut desc, q, m);
    desc.edges
        .push(("r".to_string(), "r".to_string(), Label::uniform_omega(m)));
    let game = validate_game(&desc).expect("the compiled game is structurally valid");
    let start = game.state_id("s1").expect("the chain starts at s1");
    let critical = LoadVector::uniform(m, 2 * n as u64 + 1);
    QbfGadgetOutput {
        game,
        start,
        critical,
    }
}

/// Output of [`gen_satunsat`]: a one-player game and the designated load
/// `xi` whose minimal-safety encodes the combined verdict.
#[derive(Clone, Debug)]
pub struct SatUnsatGadgetOutput {
    pub game: Game,
    /// Head of the first chain (named `s1`).
    pub start: StateId,
    /// Safe at `start` iff the first formula is satisfiable; a minimal
    /// safe load there iff additionally the second is unsatisfiable.
    pub xi: LoadVector,
}

/// Drop magnitude for a second-chain pricing edge of [`gen_satunsat`] that
/// hits a clause at position i of n′.
#[derive(Clone, Copy, PartialEq, Eq, Default, Debug)]
pub enum GammaRule {
    /// 2(n′−i+1)+1: one deeper than the first-chain pricing, so any walk
    /// of the second chain costs each of its clause resources at least
    /// 2n′+1 before the first reload. That pins the intermediate
    /// components of `xi` no matter how the second formula evaluates,
    /// which the minimality verdict relies on. The default.
    #[default]
    Deep,
    /// 2(n′−i+1): mirrors the first-chain pricing exactly; selectable for
    /// comparison runs (`--gamma-literal` on the command line).
    Shallow,
}

/// [`gen_satunsat_with`] under the default [`GammaRule::Deep`].
pub fn gen_satunsat(
    phi: &QbfInstance,
    psi: &QbfInstance,
) -> Result<SatUnsatGadgetOutput, GadgetError> {
    gen_satunsat_with(phi, psi, GammaRule::default())
}

/// Chain the gadget for `phi` (n variables, m clauses) into the one for
/// `psi` (n′ variables, m′ clauses, disjoint from `phi`'s); both must be
/// purely existential. The result has dimension M = m+m′+1 and is
/// one-player: resources 1..m price `phi`'s clauses, m+1..m+m′ price
/// `psi`'s, and the last ticks down along the whole walk so that the two
/// exit edges can trade it off against the intermediate resources. The
/// designated load `xi` is safe at `s1` iff `phi` is satisfiable, and
/// minimal iff additionally `psi` is unsatisfiable: an unsatisfiable `psi`
/// blocks the exit that would spare the last resource one unit.
pub fn gen_satunsat_with(
    phi: &QbfInstance,
    psi: &QbfInstance,
    rule: GammaRule,
) -> Result<SatUnsatGadgetOutput, GadgetError> {
    assert!(
        phi.is_existential() && psi.is_existential(),
        "both formulas must be purely existential"
    );
    let n = phi.num_vars();
    let m = phi.num_clauses();
    let np = psi.num_vars();
    let mp = psi.num_clauses();
    assert!(
        n >= 1 && m >= 1 && np >= 1 && mp >= 1,
        "each gadget needs a variable and a clause"
    );
    for &(_, var) in psi.prefix() {
        if phi.prefix().iter().any(|&(_, u)| u == var) {
            return Err(GadgetError::VariableOverlap { variable: var });
        }
    }

    let dim = m + mp + 1;
    let mut desc = GameDescription {
        dimension: dim,
        ..Default::default()
    };
    push_formula_chain(&mut desc, phi, dim);

    for (i, &(_, var)) in psi.prefix().iter().enumerate() {
        desc.states.push((format!("t{}", i + 1), Owner::Box));
        desc.states.push((literal_state('t', 'y', var, false), Owner::Box));
        desc.states.push((literal_state('t', 'y', var, true), Owner::Box));
    }
    desc.states.push((format!("t{}", np + 1), Owner::Box));
    desc.states.push(("p".to_string(), Owner::Box));
    desc.states.push(("pp".to_string(), Owner::Box));

    // Join: entering the second chain reloads the settled first-chain
    // resources and keeps everything else ticking.
    let join = Label::new(
        (0..dim)
            .map(|j| {
                if j < m {
                    ResourceDelta::Omega
                } else {
                    ResourceDelta::Fin(-1)
                }
            })
            .collect(),
    );
    desc.edges.push(("r".to_string(), "t1".to_string(), join));

    for (i, &(_, var)) in psi.prefix().iter().enumerate() {
        let hit = 2 * (np - i) as i64
            + match rule {
                GammaRule::Deep => 1,
                GammaRule::Shallow => 0,
            };
        for negated in [false, true] {
            let hits = |j: usize| {
                j >= m && j < m + mp && psi.clause_contains(j - m, var, negated)
            };
            let pricing = Label::new(
                (0..dim)
                    .map(|j| {
                        if j < m {
                            ResourceDelta::Omega
                        } else if hits(j) {
                            ResourceDelta::Fin(-hit)
                        } else {
                            ResourceDelta::Fin(-1)
                        }
                    })
                    .collect(),
            );
            let repayment = Label::new(
                (0..dim)
                    .map(|j| {
                        if j < m || hits(j) {
                            ResourceDelta::Omega
                        } else {
                            ResourceDelta::Fin(-1)
                        }
                    })
                    .collect(),
            );
            let lit = literal_state('t', 'y', var, negated);
            desc.edges.push((format!("t{}", i + 1), lit.clone(), pricing));
            desc.edges.push((lit, format!("t{}", i + 2), repayment));
        }
    }

    // Two exits: `p` spares the intermediates and costs the last resource
    // 2; `pp` spares the last resource but needs every intermediate
    // reloaded, which is possible exactly when `psi` is satisfiable.
    let exit = |intermediate: i64, last: i64| {
        Label::new(
            (0..dim)
                .map(|j| {
                    if j < m {
                        ResourceDelta::Omega
                    } else if j < m + mp {
                        ResourceDelta::Fin(intermediate)
                    } else {
                        ResourceDelta::Fin(last)
                    }
                })
                .collect(),
        )
    };
    let tail = format!("t{}", np + 1);
    desc.edges.push((tail.clone(), "p".to_string(), exit(-1, -2)));
    desc.edges.push((tail, "pp".to_string(), exit(-2, -1)));
    desc.edges
        .push(("p".to_string(), "p".to_string(), Label::uniform_omega(dim)));
    desc.edges
        .push(("pp".to_string(), "pp".to_string(), Label::uniform_omega(dim)));

    let game = validate_game(&desc).expect("the compiled game is structurally valid");
    let start = game.state_id("s1").expect("the first chain starts at s1");
    let xi = LoadVector::new(
        (0..dim)
            .map(|j| {
                if j < m {
                    2 * n as u64 + 1
                } else if j < m + mp {
                    2 * (n + np) as u64 + 4
                } else {
                    2 * (n + np) as u64 + 5
                }
            })
            .collect(),
    )
    .expect("xi components are positive");
    Ok(SatUnsatGadgetOutput { game, start, xi })
}

/// Exact truth value of a quantified CNF formula by exhaustive recursion
/// over the prefix. Capped at 20 variables.
pub fn eval_qbf(q: &QbfInstance) -> bool {
    assert!(
        q.num_vars() <= 20,
        "exhaustive evaluation is capped at 20 variables"
    );
    fn go(q: &QbfInstance, pos: usize, assignment: &mut HashMap<usize, bool>) -> bool {
        let Some(&(quant, var)) = q.prefix().get(pos) else {
            return q.clauses().iter().all(|clause| {
                clause
                    .iter()
                    .any(|&lit| assignment[&(lit.unsigned_abs() as usize)] == (lit > 0))
            });
        };
        let branch = |value: bool, a: &mut HashMap<usize, bool>| {
            a.insert(var, value);
            go(q, pos + 1, a)
        };
        match quant {
            Quantifier::Exists => branch(true, assignment) || branch(false, assignment),
            Quantifier::ForAll => branch(true, assignment) && branch(false, assignment),
        }
    }
    go(q, 0, &mut HashMap::new())
}

/// Structure requests for [`random_game`]. A set flag constrains the
/// output; a cleared flag leaves that aspect to chance.
#[derive(Clone, Copy, Debug)]
pub struct RandomGameFlags {
    /// Give every state to the controller.
    pub one_player: bool,
    /// Resample until every cycle touches every dimension.
    pub decreasing: bool,
    /// Probability that a label component reloads instead of dropping.
    pub omega_density: f64,
}

/// Seeded, reproducible random game on `num_states` states named
/// `q0..q{num_states-1}` with drops drawn from [0..ell]. Totality is kept
/// by giving edge-less states a uniform −1 self-loop; the decreasing flag
/// is enforced by resampling against [`crate::model::classify`], which
/// fails with [`GadgetError::ResamplingExhausted`] if no candidate fits.
pub fn random_game(
    seed: u64,
    num_states: usize,
    dimension: usize,
    ell: u64,
    flags: RandomGameFlags,
) -> Result<Game, GadgetError> {
    assert!(
        num_states >= 1 && dimension >= 1 && ell >= 1,
        "parameters must be positive"
    );
    assert!(ell <= i64::MAX as u64, "ell must fit a signed drop");
    assert!(
        (0.0..=1.0).contains(&flags.omega_density),
        "omega_density is a probability"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ATTEMPTS: usize = 400;
    for _ in 0..ATTEMPTS {
        let game = sample_game(&mut rng, num_states, dimension, ell, flags);
        if flags.decreasing && !crate::model::classify(&game).decreasing {
            continue;
        }
        return Ok(game);
    }
    Err(GadgetError::ResamplingExhausted { attempts: ATTEMPTS })
}

fn sample_game(
    rng: &mut ChaCha8Rng,
    num_states: usize,
    dimension: usize,
    ell: u64,
    flags: RandomGameFlags,
) -> Game {
    let mut desc = GameDescription {
        dimension,
        ..Default::default()
    };
    let mut owners = Vec::with_capacity(num_states);
    for k in 0..num_states {
        let owner = if flags.one_player || rng.random_bool(0.5) {
            Owner::Box
        } else {
            Owner::Diamond
        };
        owners.push(owner);
        desc.states.push((format!("q{k}"), owner));
    }
    let mut seen: HashSet<(usize, usize, Label)> = HashSet::new();
    for (src, &owner) in owners.iter().enumerate() {
        let mut placed = false;
        for _ in 0..rng.random_range(0..=3) {
            let dst = rng.random_range(0..num_states);
            let label = sample_label(
                rng,
                dimension,
                ell,
                owner == Owner::Diamond,
                flags.omega_density,
            );
            // Identical triples would fail validation; drop the repeat.
            if seen.insert((src, dst, label.clone())) {
                desc.edges
                    .push((format!("q{src}"), format!("q{dst}"), label));
                placed = true;
            }
        }
        if !placed {
            desc.edges.push((
                format!("q{src}"),
                format!("q{src}"),
                Label::uniform_fin(dimension, -1),
            ));
        }
    }
    validate_game(&desc).expect("the sampled game is structurally valid")
}

fn sample_label(
    rng: &mut ChaCha8Rng,
    dimension: usize,
    ell: u64,
    from_diamond: bool,
    omega_density: f64,
) -> Label {
    Label::new(
        (0..dimension)
            .map(|_| {
                // Adversary-owned sources may not reload.
                if !from_diamond && rng.random_bool(omega_density) {
                    ResourceDelta::Omega
                } else {
                    ResourceDelta::Fin(-(rng.random_range(0..=ell) as i64))
                }
            })
            .collect(),
    )
}

/// The same formula with every variable renumbered upward by `offset`.
/// Makes two independently numbered instances disjoint before
/// [`gen_satunsat`].
pub fn shift_variables(q: &QbfInstance, offset: usize) -> QbfInstance {
    let mut text = format!("p cnf {} {}\n", q.max_var() + offset, q.num_clauses());
    for &(quant, var) in q.prefix() {
        let letter = match quant {
            Quantifier::Exists => 'e',
            Quantifier::ForAll => 'a',
        };
        let _ = writeln!(text, "{letter} {} 0", var + offset);
    }
    for clause in q.clauses() {
        for &lit in clause {
            let moved = if lit > 0 {
                lit + offset as i64
            } else {
                lit - offset as i64
            };
            let _ = write!(text, "{moved} ");
        }
        let _ = writeln!(text, "0");
    }
    parse_qbf(&text).expect("shifting keeps the text inside the grammar")
}

/// Seeded random prenex CNF over variables 1..=vars with exactly `clauses`
/// clauses; purely existential when `existential_only`, random quantifiers
/// otherwise. Every variable is planted in at least one clause and each
/// clause receives at least one literal, then the instance is rendered as
/// text and fed through [`parse_qbf`] so the result is parser-clean by
/// construction.
pub fn random_qbf(seed: u64, vars: usize, clauses: usize, existential_only: bool) -> QbfInstance {
    assert!(vars >= 1 && clauses >= 1, "parameters must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cls: Vec<Vec<i64>> = vec![Vec::new(); clauses];
    for v in 1..=vars {
        let home = rng.random_range(0..clauses);
        for (j, clause) in cls.iter_mut().enumerate() {
            if j == home || rng.random_bool(0.4) {
                let lit = if rng.random_bool(0.5) { v as i64 } else { -(v as i64) };
                clause.push(lit);
            }
        }
    }
    for clause in cls.iter_mut().filter(|c| c.is_empty()) {
        let v = rng.random_range(1..=vars) as i64;
        clause.push(if rng.random_bool(0.5) { v } else { -v });
    }
    let mut text = format!("p cnf {vars} {clauses}\n");
    for v in 1..=vars {
        let quant = if existential_only || rng.random_bool(0.5) {
            'e'
        } else {
            'a'
        };
        let _ = writeln!(text, "{quant} {v} 0");
    }
    for clause in &cls {
        for lit in clause {
            let _ = write!(text, "{lit} ");
        }
        let _ = writeln!(text, "0");
    }
    parse_qbf(&text).expect("the generated text is inside the accepted grammar")
}
